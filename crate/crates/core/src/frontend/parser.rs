//! Recursive-descent parser producing a srcML-shaped tree.
//!
//! Expressions are kept flat (operands and operators are siblings under one
//! `expression` node); calls, subscripts, casts and `sizeof` get their own
//! subtrees. Statements, declarations and directives follow the element
//! layout of srcML closely enough that depth differences between tokens carry
//! the same information.

use super::ast::{Ast, AstBuilder, Category, Token, TokenKind};
use super::lexer::{tokenize, Lexed, TYPE_KEYWORDS};
use super::FrontendError;

pub fn parse_program(src: &str, source_id: &str) -> Result<Ast, FrontendError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        b: AstBuilder::new(),
    };
    p.b.open(Category::TranslationUnit);
    while !p.at_end() {
        p.item()?;
    }
    p.b.close();
    p.b.finish(source_id)
}

type PResult<T = ()> = Result<T, FrontendError>;

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    b: AstBuilder,
}

const BINARY_OPS: &[&str] = &[
    "*", "/", "%", "+", "-", "<<", ">>", "<", "<=", ">", ">=", "==", "!=", "&", "^", "|", "&&",
    "||", "?", ":", "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
];

const PREFIX_OPS: &[&str] = &["+", "-", "!", "~", "*", "&", "++", "--"];

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek_at(&self, off: usize) -> Option<&Token> {
        self.toks.get(self.pos + off).map(|l| &l.token)
    }

    fn peek(&self) -> Option<&Token> {
        self.peek_at(0)
    }

    fn is(&self, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.lexeme == lexeme && t.kind != TokenKind::Literal)
    }

    fn is_at(&self, off: usize, lexeme: &str) -> bool {
        self.peek_at(off)
            .is_some_and(|t| t.lexeme == lexeme && t.kind != TokenKind::Literal)
    }

    fn kind_at(&self, off: usize) -> Option<TokenKind> {
        self.peek_at(off).map(|t| t.kind)
    }

    fn error(&self, message: impl Into<String>) -> FrontendError {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(l) => (l.line, l.column),
            None => (1, 1),
        };
        let found = match self.peek() {
            Some(t) => format!(" near `{}`", t.lexeme),
            None => " at end of input".to_string(),
        };
        FrontendError::Syntax {
            line,
            column,
            message: format!("{}{}", message.into(), found),
        }
    }

    fn take(&mut self) -> PResult<Token> {
        match self.toks.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok(l.token.clone())
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    /// Emits the next token as a leaf under the current node.
    fn leaf(&mut self) -> PResult {
        let tok = self.take()?;
        let cat = match tok.kind {
            TokenKind::Identifier => Category::Name,
            TokenKind::Keyword => Category::Keyword,
            TokenKind::Literal => Category::Literal,
            TokenKind::Operator => Category::Operator,
            TokenKind::Punctuation => Category::Punctuation,
            TokenKind::Filename => Category::File,
        };
        self.b.leaf(cat, tok);
        Ok(())
    }

    fn leaf_as(&mut self, cat: Category) -> PResult {
        let tok = self.take()?;
        self.b.leaf(cat, tok);
        Ok(())
    }

    fn expect(&mut self, lexeme: &str) -> PResult {
        if self.is(lexeme) {
            self.leaf()
        } else {
            Err(self.error(format!("expected `{lexeme}`")))
        }
    }

    fn expect_ident(&mut self) -> PResult {
        if self.kind_at(0) == Some(TokenKind::Identifier) {
            self.leaf_as(Category::Name)
        } else {
            Err(self.error("expected identifier"))
        }
    }

    fn with<T>(&mut self, cat: Category, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.b.open(cat);
        let r = f(self);
        self.b.close();
        r
    }

    fn is_type_keyword_at(&self, off: usize) -> bool {
        self.peek_at(off)
            .is_some_and(|t| t.kind == TokenKind::Keyword && TYPE_KEYWORDS.contains(&t.lexeme.as_str()))
    }

    /// Does a declaration begin here? Type keywords, or `Ident Ident` where
    /// the first identifier names a type.
    fn starts_declaration(&self) -> bool {
        if self.is_type_keyword_at(0) {
            return true;
        }
        self.kind_at(0) == Some(TokenKind::Identifier)
            && (self.kind_at(1) == Some(TokenKind::Identifier)
                || (self.is_at(1, "*")
                    && self.kind_at(2) == Some(TokenKind::Identifier)
                    && matches!(self.peek_at(3).map(|t| t.lexeme.as_str()), Some(";" | "=" | ",")))
                    && self.pos == 0)
    }

    // ---- top level -------------------------------------------------------

    fn item(&mut self) -> PResult {
        if self.is("#") {
            return self.include();
        }
        if self.is("using") {
            return self.with(Category::UsingDirective, |p| {
                p.leaf()?;
                p.expect("namespace")?;
                p.expect_ident()?;
                p.expect(";")
            });
        }
        if self.is(";") {
            return self.with(Category::Empty, |p| p.leaf());
        }
        if !self.starts_declaration() {
            return Err(self.error("expected declaration or function definition"));
        }
        // Look ahead past the type and declarator name for `(`.
        let mut look = 0;
        while self.is_type_keyword_at(look) {
            look += 1;
        }
        if look == 0 {
            look = 1;
        }
        while self.is_at(look, "*") {
            look += 1;
        }
        if self.kind_at(look) == Some(TokenKind::Identifier) && self.is_at(look + 1, "(") {
            self.function()
        } else {
            self.declaration_statement()
        }
    }

    fn include(&mut self) -> PResult {
        self.with(Category::IncludeDirective, |p| {
            p.expect("#")?;
            if !p.is("include") {
                return Err(p.error("only #include directives are supported"));
            }
            p.with(Category::Directive, |p| p.leaf_as(Category::Keyword))?;
            if p.kind_at(0) != Some(TokenKind::Filename) {
                return Err(p.error("expected header name"));
            }
            p.leaf_as(Category::File)
        })
    }

    fn function(&mut self) -> PResult {
        let start = self.b.current_child_count();
        self.type_spec()?;
        while self.is("*") {
            self.leaf_as(Category::Modifier)?;
        }
        self.expect_ident()?;
        self.with(Category::ParameterList, |p| {
            p.expect("(")?;
            if !p.is(")") {
                loop {
                    p.with(Category::Parameter, |p| {
                        p.with(Category::Declaration, |p| {
                            p.type_spec()?;
                            while p.is("*") {
                                p.leaf_as(Category::Modifier)?;
                            }
                            if p.kind_at(0) == Some(TokenKind::Identifier) {
                                p.declarator_name()?;
                            }
                            Ok(())
                        })
                    })?;
                    if p.is(",") {
                        p.leaf()?;
                    } else {
                        break;
                    }
                }
            }
            p.expect(")")
        })?;
        let cat = if self.is(";") {
            self.leaf()?;
            Category::FunctionDeclaration
        } else {
            self.block()?;
            Category::Function
        };
        self.b.wrap_trailing(cat, start);
        Ok(())
    }

    fn type_spec(&mut self) -> PResult {
        self.with(Category::Type, |p| {
            if p.is_type_keyword_at(0) {
                while p.is_type_keyword_at(0) {
                    p.leaf_as(Category::Name)?;
                }
                Ok(())
            } else if p.kind_at(0) == Some(TokenKind::Identifier) {
                p.leaf_as(Category::Name)
            } else {
                Err(p.error("expected type"))
            }
        })
    }

    // ---- declarations ----------------------------------------------------

    fn declaration_statement(&mut self) -> PResult {
        self.with(Category::DeclarationStatement, |p| {
            p.declaration_list()?;
            p.expect(";")
        })
    }

    /// `type declarator [= init] (, declarator [= init])*` without the `;`.
    fn declaration_list(&mut self) -> PResult {
        self.with(Category::Declaration, |p| {
            p.type_spec()?;
            p.declarator_tail()
        })?;
        while self.is(",") {
            self.leaf()?;
            self.with(Category::Declaration, |p| p.declarator_tail())?;
        }
        Ok(())
    }

    fn declarator_tail(&mut self) -> PResult {
        while self.is("*") {
            self.leaf_as(Category::Modifier)?;
        }
        self.declarator_name()?;
        if self.is("=") {
            self.with(Category::Init, |p| {
                p.leaf()?;
                if p.is("{") {
                    p.initializer_list()
                } else {
                    p.expression(false)
                }
            })?;
        }
        Ok(())
    }

    fn declarator_name(&mut self) -> PResult {
        if self.kind_at(0) != Some(TokenKind::Identifier) {
            return Err(self.error("expected identifier"));
        }
        if self.is_at(1, "[") {
            self.with(Category::Name, |p| {
                p.leaf_as(Category::Name)?;
                while p.is("[") {
                    p.with(Category::Index, |p| {
                        p.leaf()?;
                        if !p.is("]") {
                            p.expression(false)?;
                        }
                        p.expect("]")
                    })?;
                }
                Ok(())
            })
        } else {
            self.leaf_as(Category::Name)
        }
    }

    fn initializer_list(&mut self) -> PResult {
        self.with(Category::InitializerList, |p| {
            p.expect("{")?;
            while !p.is("}") {
                if p.is("{") {
                    p.initializer_list()?;
                } else {
                    p.expression(false)?;
                }
                if p.is(",") {
                    p.leaf()?;
                } else {
                    break;
                }
            }
            p.expect("}")
        })
    }

    // ---- statements ------------------------------------------------------

    fn block(&mut self) -> PResult {
        self.with(Category::Block, |p| {
            p.expect("{")?;
            p.with(Category::BlockContent, |p| {
                while !p.is("}") {
                    if p.at_end() {
                        return Err(p.error("unterminated block"));
                    }
                    p.statement()?;
                }
                Ok(())
            })?;
            p.expect("}")
        })
    }

    fn statement(&mut self) -> PResult {
        let Some(tok) = self.peek() else {
            return Err(self.error("expected statement"));
        };
        let keyword = if tok.kind == TokenKind::Keyword {
            tok.lexeme.clone()
        } else {
            String::new()
        };
        match keyword.as_str() {
            "if" => self.with(Category::If, |p| {
                p.leaf()?;
                p.paren_condition()?;
                p.statement()?;
                if p.is("else") {
                    p.with(Category::Else, |p| {
                        p.leaf()?;
                        p.statement()
                    })?;
                }
                Ok(())
            }),
            "for" => self.with(Category::For, |p| {
                p.leaf()?;
                p.with(Category::Control, |p| {
                    p.expect("(")?;
                    p.with(Category::ForInit, |p| {
                        if p.starts_declaration() {
                            p.declaration_list()?;
                        } else if !p.is(";") {
                            p.expression(true)?;
                        }
                        p.expect(";")
                    })?;
                    p.with(Category::Condition, |p| {
                        if !p.is(";") {
                            p.expression(true)?;
                        }
                        p.expect(";")
                    })?;
                    p.with(Category::ForIncr, |p| {
                        if !p.is(")") {
                            p.expression(true)?;
                        }
                        Ok(())
                    })?;
                    p.expect(")")
                })?;
                p.statement()
            }),
            "while" => self.with(Category::While, |p| {
                p.leaf()?;
                p.paren_condition()?;
                p.statement()
            }),
            "do" => self.with(Category::Do, |p| {
                p.leaf()?;
                p.statement()?;
                p.expect("while")?;
                p.paren_condition()?;
                p.expect(";")
            }),
            "return" => self.with(Category::Return, |p| {
                p.leaf()?;
                if !p.is(";") {
                    p.expression(true)?;
                }
                p.expect(";")
            }),
            "break" | "continue" => self.with(Category::Jump, |p| {
                p.leaf()?;
                p.expect(";")
            }),
            "else" => Err(self.error("`else` without `if`")),
            _ if self.is("{") => self.block(),
            _ if self.is(";") => self.with(Category::Empty, |p| p.leaf()),
            _ if self.starts_declaration() => self.declaration_statement(),
            _ => self.with(Category::ExpressionStatement, |p| {
                p.expression(true)?;
                p.expect(";")
            }),
        }
    }

    fn paren_condition(&mut self) -> PResult {
        self.with(Category::Condition, |p| {
            p.expect("(")?;
            p.expression(true)?;
            p.expect(")")
        })
    }

    // ---- expressions -----------------------------------------------------

    fn expression(&mut self, allow_comma: bool) -> PResult {
        self.with(Category::Expression, |p| p.expr_items(allow_comma))
    }

    /// `unary (binop unary)*` emitted flat into the open expression node.
    fn expr_items(&mut self, allow_comma: bool) -> PResult {
        self.unary()?;
        loop {
            let is_bin = self.peek().is_some_and(|t| {
                t.kind == TokenKind::Operator && BINARY_OPS.contains(&t.lexeme.as_str())
            });
            if is_bin {
                self.leaf()?;
                self.unary()?;
            } else if allow_comma && self.is(",") {
                self.leaf_as(Category::Operator)?;
                self.unary()?;
            } else {
                return Ok(());
            }
        }
    }

    fn unary(&mut self) -> PResult {
        while self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::Operator && PREFIX_OPS.contains(&t.lexeme.as_str()))
        {
            self.leaf()?;
        }
        if self.is("(") && (self.is_type_keyword_at(1)) {
            self.with(Category::Cast, |p| {
                p.leaf_as(Category::Operator)?;
                p.type_spec()?;
                while p.is("*") {
                    p.leaf_as(Category::Modifier)?;
                }
                p.expect(")")
            })?;
            return self.unary();
        }
        if self.is("sizeof") {
            return self.with(Category::Sizeof, |p| {
                p.leaf()?;
                if p.is("(") && (p.is_type_keyword_at(1)) {
                    p.with(Category::ArgumentList, |p| {
                        p.leaf()?;
                        p.type_spec()?;
                        while p.is("*") {
                            p.leaf_as(Category::Modifier)?;
                        }
                        p.expect(")")
                    })
                } else {
                    p.unary()
                }
            });
        }
        self.primary()?;
        self.postfix()
    }

    fn primary(&mut self) -> PResult {
        match self.kind_at(0) {
            Some(TokenKind::Identifier) => {
                let start = self.b.current_child_count();
                let qualified = self.is_at(1, "::");
                if qualified {
                    self.with(Category::Name, |p| {
                        p.leaf_as(Category::Name)?;
                        while p.is("::") {
                            p.leaf_as(Category::Operator)?;
                            p.expect_ident()?;
                        }
                        Ok(())
                    })?;
                } else {
                    self.leaf_as(Category::Name)?;
                }
                if self.is("(") {
                    self.argument_list()?;
                    self.b.wrap_trailing(Category::Call, start);
                } else if self.is("[") {
                    while self.is("[") {
                        self.index()?;
                    }
                    self.b.wrap_trailing(Category::Name, start);
                }
                Ok(())
            }
            Some(TokenKind::Literal) => {
                self.leaf_as(Category::Literal)?;
                while self.kind_at(0) == Some(TokenKind::Literal)
                    && self.peek().is_some_and(|t| t.lexeme.starts_with('"'))
                {
                    self.leaf_as(Category::Literal)?;
                }
                Ok(())
            }
            _ if self.is("(") => {
                self.leaf_as(Category::Operator)?;
                self.expr_items(true)?;
                if self.is(")") {
                    self.leaf_as(Category::Operator)
                } else {
                    Err(self.error("expected `)`"))
                }
            }
            _ => Err(self.error("expected expression")),
        }
    }

    fn postfix(&mut self) -> PResult {
        loop {
            if self.is("++") || self.is("--") {
                self.leaf()?;
            } else if self.is(".") || self.is("->") {
                self.leaf()?;
                self.expect_ident()?;
            } else if self.is("[") {
                self.index()?;
            } else {
                return Ok(());
            }
        }
    }

    fn index(&mut self) -> PResult {
        self.with(Category::Index, |p| {
            p.leaf()?;
            p.expression(true)?;
            p.expect("]")
        })
    }

    fn argument_list(&mut self) -> PResult {
        self.with(Category::ArgumentList, |p| {
            p.expect("(")?;
            if !p.is(")") {
                loop {
                    p.with(Category::Argument, |p| p.expression(false))?;
                    if p.is(",") {
                        p.leaf()?;
                    } else {
                        break;
                    }
                }
            }
            p.expect(")")
        })
    }
}
