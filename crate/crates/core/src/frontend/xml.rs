//! XML interchange: one element per node, element name = category, leaf
//! token text as element content.

use std::fmt::Write as _;

use super::ast::{Ast, AstBuilder, Category, NodeId, Token, TokenKind};
use super::lexer::classify;
use super::FrontendError;

pub fn import_xml(xml_text: &str) -> Result<Ast, FrontendError> {
    let doc = roxmltree::Document::parse(xml_text)
        .map_err(|e| FrontendError::Schema(format!("malformed XML: {e}")))?;
    let mut b = AstBuilder::new();
    visit(doc.root_element(), None, &mut b)?;
    b.finish("")
}

fn category_of(node: roxmltree::Node) -> Result<Category, FrontendError> {
    let name = node.tag_name().name();
    Category::from_name(name).ok_or_else(|| FrontendError::Schema(format!("unknown element <{name}>")))
}

fn visit(
    node: roxmltree::Node,
    parent: Option<Category>,
    b: &mut AstBuilder,
) -> Result<(), FrontendError> {
    let category = category_of(node)?;
    let mut text = String::new();
    let mut has_elements = false;
    for child in node.children() {
        if child.is_element() {
            has_elements = true;
        } else if child.is_text() {
            text.push_str(child.text().unwrap_or(""));
        }
    }
    let blank = text.chars().all(char::is_whitespace);
    if has_elements && !blank {
        return Err(FrontendError::Schema(format!(
            "element <{}> mixes text and child elements",
            category.name()
        )));
    }
    if !has_elements && !blank {
        let kind = if category == Category::File {
            TokenKind::Filename
        } else if text == "include" && parent == Some(Category::Directive) {
            TokenKind::Keyword
        } else {
            classify(&text).ok_or_else(|| FrontendError::Schema(format!("invalid token `{text}`")))?
        };
        b.leaf(category, Token::new(text, kind));
        return Ok(());
    }
    b.open(category);
    for child in node.children().filter(|c| c.is_element()) {
        visit(child, Some(category), b)?;
    }
    b.close();
    Ok(())
}

pub fn export_xml(ast: &Ast) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    write_node(ast, ast.root(), 0, &mut out);
    out
}

fn write_node(ast: &Ast, id: NodeId, indent: usize, out: &mut String) {
    let node = ast.node(id);
    let name = node.category.name();
    for _ in 0..indent {
        out.push_str("  ");
    }
    if let Some(tok) = &node.token {
        let _ = writeln!(out, "<{name}>{}</{name}>", escape(&tok.lexeme));
    } else if node.children.is_empty() {
        let _ = writeln!(out, "<{name}/>");
    } else {
        let _ = writeln!(out, "<{name}>");
        for &c in &node.children {
            write_node(ast, c, indent + 1, out);
        }
        for _ in 0..indent {
            out.push_str("  ");
        }
        let _ = writeln!(out, "</{name}>");
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
