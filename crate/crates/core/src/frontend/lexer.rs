//! Tokenizer for the supported C/C++ subset.

use super::ast::{Token, TokenKind};
use super::FrontendError;

pub const KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "include", "int", "long", "namespace",
    "register", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "using", "void", "volatile", "while",
];

/// Keywords that may start or continue a type specifier.
pub const TYPE_KEYWORDS: &[&str] = &[
    "char", "const", "double", "float", "int", "long", "short", "signed", "static", "unsigned",
    "void", "volatile", "register", "extern", "auto",
];

// Longest first so that maximal munch falls out of a linear scan.
const OPERATORS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::", "+", "-", "*", "/", "%", "<", ">", "=", "!",
    "&", "|", "^", "~", "?", ":", ".",
];

const PUNCTUATION: &[char] = &['(', ')', '[', ']', '{', '}', ';', ',', '#'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexed {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

/// Classifies a single lexeme the same way the tokenizer would.
/// `include` is a keyword only right after `#`; out of context it is
/// classified as an identifier and callers override by position.
pub fn classify(lexeme: &str) -> Option<TokenKind> {
    let first = lexeme.chars().next()?;
    if first.is_ascii_alphabetic() || first == '_' {
        if !lexeme.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return None;
        }
        return Some(if KEYWORDS.contains(&lexeme) && lexeme != "include" {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        });
    }
    if first.is_ascii_digit() || (first == '.' && lexeme.len() > 1) {
        return Some(TokenKind::Literal);
    }
    if first == '"' || first == '\'' {
        return Some(TokenKind::Literal);
    }
    if lexeme.len() == 1 && PUNCTUATION.contains(&first) {
        return Some(TokenKind::Punctuation);
    }
    if OPERATORS.contains(&lexeme) {
        return Some(TokenKind::Operator);
    }
    if first == '<' && lexeme.ends_with('>') && lexeme.len() > 2 {
        return Some(TokenKind::Filename);
    }
    None
}

pub fn tokenize(src: &str) -> Result<Vec<Lexed>, FrontendError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    out: Vec<Lexed>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            out: Vec::new(),
        }
    }

    fn err(&self, msg: impl Into<String>) -> FrontendError {
        FrontendError::Syntax {
            line: self.line,
            column: self.col,
            message: msg.into(),
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump(&mut self) {
        if let Some(&b) = self.bytes.get(self.pos) {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
                self.col = 1;
            } else if b & 0xC0 != 0x80 {
                self.col += 1;
            }
        }
    }

    fn push(&mut self, start: usize, line: usize, col: usize, kind: TokenKind) {
        self.out.push(Lexed {
            token: Token::new(&self.src[start..self.pos], kind),
            line,
            column: col,
        });
    }

    /// True when the last two tokens are `#` `include` on the current line.
    fn after_include(&self) -> bool {
        let n = self.out.len();
        n >= 2
            && self.out[n - 1].token.lexeme == "include"
            && self.out[n - 2].token.lexeme == "#"
            && self.out[n - 1].line == self.line
    }

    fn run(mut self) -> Result<Vec<Lexed>, FrontendError> {
        while let Some(b) = self.peek(0) {
            let (start, line, col) = (self.pos, self.line, self.col);
            match b {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.bump(),
                b'/' if self.peek(1) == Some(b'/') => {
                    while !matches!(self.peek(0), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                b'/' if self.peek(1) == Some(b'*') => {
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek(0) {
                            None => return Err(self.err("unterminated comment")),
                            Some(b'*') if self.peek(1) == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => self.bump(),
                        }
                    }
                }
                b'<' if self.after_include() => {
                    while !matches!(self.peek(0), None | Some(b'>') | Some(b'\n')) {
                        self.bump();
                    }
                    if self.peek(0) != Some(b'>') {
                        return Err(self.err("unterminated header name"));
                    }
                    self.bump();
                    self.push(start, line, col, TokenKind::Filename);
                }
                b'"' | b'\'' => {
                    self.quoted(b)?;
                    let kind = if b == b'"' && self.after_include() {
                        TokenKind::Filename
                    } else {
                        TokenKind::Literal
                    };
                    self.push(start, line, col, kind);
                }
                b'0'..=b'9' => {
                    self.number()?;
                    self.push(start, line, col, TokenKind::Literal);
                }
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => {
                    self.number()?;
                    self.push(start, line, col, TokenKind::Literal);
                }
                b if b.is_ascii_alphabetic() || b == b'_' => {
                    while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                        self.bump();
                    }
                    let word = &self.src[start..self.pos];
                    let after_hash = self
                        .out
                        .last()
                        .is_some_and(|l| l.token.lexeme == "#" && l.line == line);
                    let kind = if word == "include" {
                        if after_hash {
                            TokenKind::Keyword
                        } else {
                            TokenKind::Identifier
                        }
                    } else if KEYWORDS.contains(&word) {
                        TokenKind::Keyword
                    } else {
                        TokenKind::Identifier
                    };
                    self.push(start, line, col, kind);
                }
                b if PUNCTUATION.contains(&(b as char)) => {
                    self.bump();
                    self.push(start, line, col, TokenKind::Punctuation);
                }
                _ => {
                    let rest = &self.src[self.pos..];
                    match OPERATORS.iter().find(|op| rest.starts_with(*op)) {
                        Some(op) => {
                            for _ in 0..op.len() {
                                self.bump();
                            }
                            self.push(start, line, col, TokenKind::Operator);
                        }
                        None => {
                            let ch = rest.chars().next().unwrap_or('?');
                            return Err(self.err(format!("unexpected character {ch:?}")));
                        }
                    }
                }
            }
        }
        Ok(self.out)
    }

    fn quoted(&mut self, quote: u8) -> Result<(), FrontendError> {
        self.bump();
        loop {
            match self.peek(0) {
                None | Some(b'\n') => return Err(self.err("unterminated literal")),
                Some(b'\\') => {
                    self.bump();
                    if self.peek(0).is_none() {
                        return Err(self.err("unterminated literal"));
                    }
                    self.bump();
                }
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => self.bump(),
            }
        }
    }

    fn number(&mut self) -> Result<(), FrontendError> {
        let hex = self.peek(0) == Some(b'0') && matches!(self.peek(1), Some(b'x' | b'X'));
        if hex {
            self.bump();
            self.bump();
        }
        loop {
            match self.peek(0) {
                Some(c) if c.is_ascii_digit() || c == b'.' => self.bump(),
                Some(c) if hex && c.is_ascii_hexdigit() => self.bump(),
                Some(b'e' | b'E') if !hex => {
                    self.bump();
                    if matches!(self.peek(0), Some(b'+' | b'-')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        while matches!(self.peek(0), Some(b'u' | b'U' | b'l' | b'L' | b'f' | b'F')) {
            self.bump();
        }
        if matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            return Err(self.err("malformed number or identifier"));
        }
        Ok(())
    }
}
