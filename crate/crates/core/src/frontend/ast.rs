//! Ordered syntax trees with token-carrying leaves.

use std::collections::HashMap;
use std::fmt;

use super::FrontendError;

/// Index of a node inside its [`Ast`] arena.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Punctuation,
    Filename,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Identifier => "identifier",
            TokenKind::Keyword => "keyword",
            TokenKind::Literal => "literal",
            TokenKind::Operator => "operator",
            TokenKind::Punctuation => "punctuation",
            TokenKind::Filename => "filename",
        }
    }
}

/// Whether an identifier is used as a value/function name or in a type position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum TokenRole {
    #[default]
    Plain,
    TypeName,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub lexeme: String,
    pub kind: TokenKind,
    pub role: TokenRole,
}

impl Token {
    pub fn new(lexeme: impl Into<String>, kind: TokenKind) -> Self {
        Token {
            lexeme: lexeme.into(),
            kind,
            role: TokenRole::Plain,
        }
    }

    pub fn is_plain_identifier(&self) -> bool {
        self.kind == TokenKind::Identifier && self.role == TokenRole::Plain
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexeme)
    }
}

macro_rules! categories {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Node category label; doubles as the XML element name.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Category {
            $($variant),*
        }

        impl Category {
            pub const ALL: &'static [Category] = &[$(Category::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Category::$variant => $name),*
                }
            }

            pub fn from_name(name: &str) -> Option<Category> {
                match name {
                    $($name => Some(Category::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

categories! {
    TranslationUnit => "translation-unit",
    IncludeDirective => "include-directive",
    Directive => "directive",
    File => "file",
    UsingDirective => "using-directive",
    Function => "function",
    FunctionDeclaration => "function-declaration",
    ParameterList => "parameter-list",
    Parameter => "parameter",
    Block => "block",
    BlockContent => "block-content",
    DeclarationStatement => "declaration-statement",
    Declaration => "declaration",
    Type => "type",
    Init => "init",
    InitializerList => "initializer-list",
    Index => "index",
    ExpressionStatement => "expression-statement",
    Expression => "expression",
    Call => "call",
    ArgumentList => "argument-list",
    Argument => "argument",
    Cast => "cast",
    Sizeof => "sizeof",
    If => "if",
    Condition => "condition",
    Else => "else",
    For => "for",
    Control => "control",
    ForInit => "for-init",
    ForIncr => "for-incr",
    While => "while",
    Do => "do",
    Return => "return",
    Jump => "jump-statement",
    Empty => "empty-statement",
    Name => "name",
    Keyword => "keyword",
    Literal => "literal",
    Operator => "operator",
    Punctuation => "punctuation",
    Modifier => "modifier",
}

impl Category {
    /// Categories whose subtrees delimit statements for the boundary-arrow rule.
    pub fn is_statement_level(self) -> bool {
        matches!(
            self,
            Category::IncludeDirective
                | Category::UsingDirective
                | Category::DeclarationStatement
                | Category::ExpressionStatement
                | Category::If
                | Category::For
                | Category::While
                | Category::Do
                | Category::Return
                | Category::Block
                | Category::Jump
                | Category::Empty
        )
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub category: Category,
    pub children: Vec<NodeId>,
    pub token: Option<Token>,
    pub depth: u32,
    pub parent: Option<NodeId>,
}

impl AstNode {
    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }
}

/// An immutable, validated syntax tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ast {
    nodes: Vec<AstNode>,
    root: NodeId,
    source_id: String,
}

impl Ast {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn node(&self, id: NodeId) -> &AstNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[AstNode] {
        &self.nodes
    }

    /// Node ids in depth-first pre-order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev().copied());
        }
        out
    }

    /// Node ids in depth-first post-order (children before parents).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                stack.extend(self.nodes[id].children.iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    /// Leaf ids in pre-order, i.e. program token order.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|&id| self.nodes[id].is_leaf())
            .collect()
    }

    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.nodes[id].parent, move |&p| self.nodes[p].parent)
    }

    /// Closest ancestor whose category is statement-level; falls back to the
    /// ancestor directly under the root (or the node itself at depth <= 1).
    pub fn statement_of(&self, id: NodeId) -> NodeId {
        let mut top = id;
        for anc in self.ancestors(id) {
            if self.nodes[anc].category.is_statement_level() {
                return anc;
            }
            if anc != self.root {
                top = anc;
            }
        }
        top
    }

    /// Rebuilds the tree with leaf tokens passed through `f`; structure is kept.
    pub fn map_tokens(&self, mut f: impl FnMut(&Token) -> Token) -> Ast {
        let mut nodes = self.nodes.clone();
        for node in &mut nodes {
            if let Some(tok) = &node.token {
                node.token = Some(f(tok));
            }
        }
        Ast {
            nodes,
            root: self.root,
            source_id: self.source_id.clone(),
        }
    }

    /// Compares categories, tokens and ordering; node numbering and the
    /// source id are ignored.
    pub fn structurally_eq(&self, other: &Ast) -> bool {
        fn walk(a: &Ast, x: NodeId, b: &Ast, y: NodeId) -> bool {
            let (nx, ny) = (&a.nodes[x], &b.nodes[y]);
            nx.category == ny.category
                && nx.token == ny.token
                && nx.children.len() == ny.children.len()
                && nx
                    .children
                    .iter()
                    .zip(&ny.children)
                    .all(|(&cx, &cy)| walk(a, cx, b, cy))
        }
        walk(self, self.root, other, other.root)
    }
}

/// Incremental builder used by the parser and the XML importer.
#[derive(Debug, Default)]
pub struct AstBuilder {
    nodes: Vec<AstNode>,
    stack: Vec<NodeId>,
}

impl AstBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_node(&mut self, category: Category, token: Option<Token>) -> NodeId {
        let id = self.nodes.len();
        let parent = self.stack.last().copied();
        self.nodes.push(AstNode {
            category,
            children: Vec::new(),
            token,
            depth: 0,
            parent,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    pub fn open(&mut self, category: Category) -> NodeId {
        let id = self.push_node(category, None);
        self.stack.push(id);
        id
    }

    pub fn close(&mut self) {
        self.stack.pop();
    }

    pub fn leaf(&mut self, category: Category, token: Token) -> NodeId {
        self.push_node(category, Some(token))
    }

    /// Number of open nodes; the parser uses this to unwind on backtrack.
    pub fn open_depth(&self) -> usize {
        self.stack.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Discards every node created after `mark` (a previous `node_count`).
    pub fn truncate(&mut self, mark: usize, open_depth: usize) {
        self.nodes.truncate(mark);
        for node in &mut self.nodes {
            node.children.retain(|&c| c < mark);
        }
        self.stack.truncate(open_depth);
    }

    /// Wraps the already-built children `from..` of the current open node into
    /// a new node of `category`.
    pub fn wrap_trailing(&mut self, category: Category, first_child_pos: usize) -> NodeId {
        let parent = *self.stack.last().expect("wrap_trailing needs an open node");
        let moved: Vec<NodeId> = self.nodes[parent].children.split_off(first_child_pos);
        let id = self.push_node(category, None);
        for &c in &moved {
            self.nodes[c].parent = Some(id);
        }
        self.nodes[id].children = moved;
        id
    }

    pub fn current_child_count(&self) -> usize {
        self.stack
            .last()
            .map(|&p| self.nodes[p].children.len())
            .unwrap_or(0)
    }

    pub fn finish(self, source_id: impl Into<String>) -> Result<Ast, FrontendError> {
        from_nodes(self.nodes, source_id.into())
    }
}

/// Validates raw nodes, renumbers them in pre-order, computes depths and
/// assigns type-name roles.
fn from_nodes(raw: Vec<AstNode>, source_id: String) -> Result<Ast, FrontendError> {
    let roots: Vec<NodeId> = (0..raw.len()).filter(|&i| raw[i].parent.is_none()).collect();
    if roots.len() != 1 {
        return Err(FrontendError::Schema(format!(
            "expected exactly one root, found {}",
            roots.len()
        )));
    }
    // Renumber in pre-order so ids are stable across construction routes.
    let mut order = Vec::with_capacity(raw.len());
    let mut stack = vec![roots[0]];
    while let Some(id) = stack.pop() {
        order.push(id);
        stack.extend(raw[id].children.iter().rev().copied());
    }
    if order.len() != raw.len() {
        return Err(FrontendError::Schema("nodes unreachable from root".into()));
    }
    let remap: HashMap<NodeId, NodeId> = order.iter().enumerate().map(|(n, &o)| (o, n)).collect();
    let mut nodes: Vec<AstNode> = order
        .iter()
        .map(|&o| {
            let n = &raw[o];
            AstNode {
                category: n.category,
                children: n.children.iter().map(|c| remap[c]).collect(),
                token: n.token.clone(),
                depth: 0,
                parent: n.parent.map(|p| remap[&p]),
            }
        })
        .collect();
    for id in 0..nodes.len() {
        let node = &nodes[id];
        if node.token.is_some() && !node.children.is_empty() {
            return Err(FrontendError::Schema(format!(
                "node `{}` carries a token and children",
                node.category
            )));
        }
        if let Some(tok) = &node.token {
            if tok.lexeme.is_empty() {
                return Err(FrontendError::Schema("empty token".into()));
            }
        }
        if let Some(p) = node.parent {
            nodes[id].depth = nodes[p].depth + 1;
        }
    }
    let mut ast = Ast {
        nodes,
        root: 0,
        source_id,
    };
    assign_roles(&mut ast);
    Ok(ast)
}

fn assign_roles(ast: &mut Ast) {
    for id in 0..ast.nodes.len() {
        let in_type = ast
            .ancestors(id)
            .any(|a| ast.nodes[a].category == Category::Type);
        if let Some(tok) = ast.nodes[id].token.as_mut() {
            tok.role = if in_type && tok.kind == TokenKind::Identifier {
                TokenRole::TypeName
            } else {
                TokenRole::Plain
            };
        }
    }
}
