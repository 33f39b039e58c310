//! MSO formulas over graphs: atoms `E(x,y)`, `x=y`, `X(x)`, the usual
//! connectives, and point/set quantifiers.
//!
//! Concrete syntax: lowercase identifiers are point variables, capitalized
//! identifiers are set variables; `~`, `&`, `|`, `->` with `&` binding
//! tighter than `|` tighter than `->`; quantifiers `ex x.`, `all x.`,
//! `exS X.`, `allS X.` scope maximally to the right; `#` starts a comment.

use crate::error::{Error, Result};

/// Reference to a point variable: bound ones by quantifier-stack depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRef {
    Free(usize),
    Bound(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRef {
    Free(usize),
    Bound(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Edge(PointRef, PointRef),
    Eq(PointRef, PointRef),
    Member(SetRef, PointRef),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    ExistsPoint(Box<Node>),
    ForallPoint(Box<Node>),
    ExistsSet(Box<Node>),
    ForallSet(Box<Node>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsoFormula {
    pub root: Node,
    /// Free set variables in first-occurrence order.
    pub free_set_vars: Vec<String>,
    /// Free point variables; the file grammar has no way to declare them, so
    /// parsed formulas always have none.
    pub free_point_vars: Vec<String>,
}

impl MsoFormula {
    /// Nesting depth of quantifiers, point and set alike.
    pub fn quantifier_rank(&self) -> usize {
        fn qr(n: &Node) -> usize {
            match n {
                Node::Edge(..) | Node::Eq(..) | Node::Member(..) => 0,
                Node::Not(a) => qr(a),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => qr(a).max(qr(b)),
                Node::ExistsPoint(a)
                | Node::ForallPoint(a)
                | Node::ExistsSet(a)
                | Node::ForallSet(a) => 1 + qr(a),
            }
        }
        qr(&self.root)
    }

    pub fn is_sentence(&self) -> bool {
        self.free_set_vars.is_empty() && self.free_point_vars.is_empty()
    }

    /// Maximum number of simultaneously open set quantifiers.
    pub fn set_quantifier_depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Edge(..) | Node::Eq(..) | Node::Member(..) => 0,
                Node::Not(a) => depth(a),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => depth(a).max(depth(b)),
                Node::ExistsPoint(a) | Node::ForallPoint(a) => depth(a),
                Node::ExistsSet(a) | Node::ForallSet(a) => 1 + depth(a),
            }
        }
        depth(&self.root)
    }
}

// --- parser -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        match c {
            '#' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, pos));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, pos));
                i += 1;
            }
            '~' => {
                toks.push((Tok::Not, pos));
                i += 1;
            }
            '&' => {
                toks.push((Tok::And, pos));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Or, pos));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, pos));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '>' {
                    toks.push((Tok::Implies, pos));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        line: line_of(text, pos),
                        msg: "expected \"->\"".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(bytes[start..i].iter().collect()), pos));
            }
            other => {
                return Err(Error::Parse {
                    line: line_of(text, pos),
                    msg: format!("unexpected character {other:?}"),
                });
            }
        }
    }
    Ok(toks)
}

fn line_of(text: &str, char_pos: usize) -> usize {
    text.chars().take(char_pos).filter(|&c| c == '\n').count() + 1
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    text: &'a str,
    point_stack: Vec<String>,
    set_stack: Vec<String>,
    free_sets: Vec<String>,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> Error {
        let line = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map_or(1, |(_, p)| line_of(self.text, *p));
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(self.error(format!("expected {tok:?}, found {other:?}"))),
        }
    }

    fn parse_implies(&mut self) -> Result<Node> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.next();
            let rhs = self.parse_implies()?;
            Ok(Node::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Node> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.next();
            let rhs = self.parse_and()?;
            lhs = Node::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Node> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.next();
            let rhs = self.parse_unary()?;
            lhs = Node::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Tok::Not) => {
                self.next();
                Ok(Node::Not(Box::new(self.parse_unary()?)))
            }
            Some(Tok::Ident(name)) if matches!(name.as_str(), "ex" | "all" | "exS" | "allS") => {
                let kw = name.clone();
                self.next();
                let var = match self.next() {
                    Some(Tok::Ident(v)) => v,
                    other => return Err(self.error(format!("expected variable, found {other:?}"))),
                };
                let is_set = kw.ends_with('S');
                let starts_upper = var.chars().next().is_some_and(|c| c.is_ascii_uppercase());
                if is_set != starts_upper {
                    return Err(self.error(format!(
                        "quantifier \"{kw}\" expects a {} variable, found \"{var}\"",
                        if is_set { "capitalized set" } else { "lowercase point" }
                    )));
                }
                self.expect(Tok::Dot)?;
                if is_set {
                    self.set_stack.push(var);
                    let body = self.parse_implies()?;
                    self.set_stack.pop();
                    Ok(match kw.as_str() {
                        "exS" => Node::ExistsSet(Box::new(body)),
                        _ => Node::ForallSet(Box::new(body)),
                    })
                } else {
                    self.point_stack.push(var);
                    let body = self.parse_implies()?;
                    self.point_stack.pop();
                    Ok(match kw.as_str() {
                        "ex" => Node::ExistsPoint(Box::new(body)),
                        _ => Node::ForallPoint(Box::new(body)),
                    })
                }
            }
            _ => self.parse_atom(),
        }
    }

    fn resolve_point(&self, name: &str) -> Result<PointRef> {
        if let Some(d) = self.point_stack.iter().rposition(|v| v == name) {
            return Ok(PointRef::Bound(d));
        }
        Err(self.error(format!(
            "unbound point variable \"{name}\" (point variables cannot be declared free)"
        )))
    }

    fn resolve_set(&mut self, name: &str) -> SetRef {
        if let Some(d) = self.set_stack.iter().rposition(|v| v == name) {
            return SetRef::Bound(d);
        }
        match self.free_sets.iter().position(|v| v == name) {
            Some(i) => SetRef::Free(i),
            None => {
                self.free_sets.push(name.to_string());
                SetRef::Free(self.free_sets.len() - 1)
            }
        }
    }

    fn parse_atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.parse_implies()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let upper = name.chars().next().is_some_and(|c| c.is_ascii_uppercase());
                if name == "E" && self.peek() == Some(&Tok::LParen) {
                    self.next();
                    let x = self.parse_point_name()?;
                    self.expect(Tok::Comma)?;
                    let y = self.parse_point_name()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Node::Edge(self.resolve_point(&x)?, self.resolve_point(&y)?));
                }
                if upper {
                    self.expect(Tok::LParen)?;
                    let x = self.parse_point_name()?;
                    self.expect(Tok::RParen)?;
                    let s = self.resolve_set(&name);
                    return Ok(Node::Member(s, self.resolve_point(&x)?));
                }
                // Pointatom: x = y.
                self.expect(Tok::Equals)?;
                let y = self.parse_point_name()?;
                Ok(Node::Eq(self.resolve_point(&name)?, self.resolve_point(&y)?))
            }
            other => Err(self.error(format!("expected formula, found {other:?}"))),
        }
    }

    fn parse_point_name(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(v)) if v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) => {
                Ok(v)
            }
            other => Err(self.error(format!("expected point variable, found {other:?}"))),
        }
    }
}

/// Parse one formula; `#` comments are ignored. Set variables not bound by a
/// quantifier become free variables in first-occurrence order.
pub fn parse_formula(text: &str) -> Result<MsoFormula> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "empty formula".into(),
        });
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        text,
        point_stack: Vec::new(),
        set_stack: Vec::new(),
        free_sets: Vec::new(),
    };
    let root = p.parse_implies()?;
    if p.pos != toks.len() {
        return Err(p.error("trailing input after formula"));
    }
    Ok(MsoFormula {
        root,
        free_set_vars: p.free_sets,
        free_point_vars: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sentence() {
        let f = parse_formula("ex x. ex y. E(x,y)").unwrap();
        assert!(f.is_sentence());
        assert_eq!(f.quantifier_rank(), 2);
    }

    #[test]
    fn three_coloring_has_rank_five() {
        let f = parse_formula(
            "exS R. exS Gr. exS B. all x. (((R(x) | Gr(x)) | B(x)) & \
             all y. (E(x,y) -> (~(R(x) & R(y)) & (~(Gr(x) & Gr(y)) & ~(B(x) & B(y))))))",
        )
        .unwrap();
        assert!(f.is_sentence());
        assert_eq!(f.quantifier_rank(), 5);
        assert_eq!(f.set_quantifier_depth(), 3);
    }

    #[test]
    fn dominating_set_predicate() {
        let f = parse_formula("all y. (S(y) | ex x. (S(x) & E(x,y)))").unwrap();
        assert_eq!(f.free_set_vars, vec!["S".to_string()]);
        assert_eq!(f.quantifier_rank(), 2);
    }

    #[test]
    fn unbound_point_variable_is_an_error() {
        assert!(matches!(
            parse_formula("E(x,y)"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn comments_and_precedence() {
        // & binds tighter than | binds tighter than ->.
        let f = parse_formula("# proper\nall x. (x = x -> x = x & x = x | x = x)").unwrap();
        match &f.root {
            Node::ForallPoint(b) => match b.as_ref() {
                Node::Implies(_, rhs) => match rhs.as_ref() {
                    Node::Or(l, _) => assert!(matches!(l.as_ref(), Node::And(..))),
                    other => panic!("expected Or, got {other:?}"),
                },
                other => panic!("expected Implies, got {other:?}"),
            },
            other => panic!("expected ForallPoint, got {other:?}"),
        }
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("ex x. x = x & ex y. x = y").unwrap();
        // The & is inside the ex x scope.
        assert!(matches!(f.root, Node::ExistsPoint(_)));
        assert_eq!(f.quantifier_rank(), 2);
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_formula("ex x.\nE(x,,)") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("ex X. X(X)").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn forall_desugar_keeps_rank() {
        let all = parse_formula("all x. ~E(x,x)").unwrap();
        let ex = parse_formula("ex x. E(x,x)").unwrap();
        assert_eq!(all.quantifier_rank(), ex.quantifier_rank());
    }
}
