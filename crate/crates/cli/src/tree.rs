//! Composition-tree expressions.
//!
//! ```text
//! expr  := NAME
//!        | lex(NAME, expr, expr)          L_E(left, right)
//!        | left(NAME, expr, expr, ...)    ((C1 E C2) E C3) ...
//!        | right(NAME, expr, expr, ...)   C1 E (C2 E (C3 ...))
//! ```
//!
//! The first argument of each form names an exclusion function, the rest
//! name choice functions or nested forms.

use lexichoice_core::compose::{fold_left_tree, fold_right_tree};
use lexichoice_core::CompositionTree;

use crate::spec::Loaded;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Name(String),
    Form { op: Op, label: String, args: Vec<Expr> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Lex,
    Left,
    Right,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> String {
        format!("{msg} at offset {} in {:?}", self.pos, self.src)
    }

    fn name(&mut self) -> Result<String, String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let name = self.name()?;
        if !self.eat('(') {
            return Ok(Expr::Name(name));
        }
        let op = match name.as_str() {
            "lex" => Op::Lex,
            "left" => Op::Left,
            "right" => Op::Right,
            other => return Err(self.err(&format!("unknown form {other:?}"))),
        };
        let label = self.name()?;
        let mut args = Vec::new();
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(')') {
            return Err(self.err("expected ')' or ','"));
        }
        match (op, args.len()) {
            (Op::Lex, 2) => {}
            (Op::Lex, k) => return Err(self.err(&format!("lex takes two choice arguments, got {k}"))),
            (_, 0) => return Err(self.err("fold needs at least one choice argument")),
            _ => {}
        }
        Ok(Expr::Form { op, label, args })
    }
}

pub fn parse(src: &str) -> Result<Expr, String> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

pub fn build(expr: &Expr, spec: &Loaded) -> Result<CompositionTree, String> {
    match expr {
        Expr::Name(n) => spec.choice(n).map(|c| CompositionTree::Leaf(c.clone())).map_err(|d| d.message),
        Expr::Form { op, label, args } => {
            let e = spec.exclusion(label).map_err(|d| d.message)?.clone();
            let subtrees = args.iter().map(|a| build(a, spec)).collect::<Result<Vec<_>, _>>()?;
            Ok(match op {
                Op::Lex => {
                    let mut it = subtrees.into_iter();
                    let (l, r) = (it.next().expect("two args"), it.next().expect("two args"));
                    CompositionTree::node(l, r, e)
                }
                Op::Left | Op::Right => {
                    // Subtrees are evaluated to leaves so folds accept nested forms.
                    let leaves = subtrees
                        .iter()
                        .map(|t| t.eval())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    let labels = vec![e; leaves.len() - 1];
                    let tree = if *op == Op::Left {
                        fold_left_tree(&leaves, &labels)
                    } else {
                        fold_right_tree(&leaves, &labels)
                    };
                    tree.map_err(|e| e.to_string())?
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_forms() {
        let e = parse("lex(E, a, right(F, b, c, d))").unwrap();
        let Expr::Form { op, label, args } = e else { panic!() };
        assert_eq!((op, label.as_str(), args.len()), (Op::Lex, "E", 2));
        assert!(matches!(&args[1], Expr::Form { op: Op::Right, args, .. } if args.len() == 3));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("lex(E, a)").is_err());
        assert!(parse("lex(E, a, b").is_err());
        assert!(parse("mix(E, a, b)").is_err());
        assert!(parse("a b").is_err());
        assert!(parse("").is_err());
    }
}
