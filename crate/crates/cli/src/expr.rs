//! Set expressions for the `mu` command.
//!
//! ```text
//! expr := term (('+' | '-') term)*
//! term := atom ('&' atom)*
//! atom := '{' rect-literal '}' | '(' expr ')'
//! ```
//! `&` is intersection, `-` difference, `+` union.

use std::sync::Arc;

use c0dyn::literal::{parse_rect, RectLiteral, TailLiteral};
use c0dyn::product::{Rectangle, SetExpr};
use c0dyn::witness::WitnessSchedule;
use c0dyn::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Rect(RectLiteral),
    Intersect(Box<ExprAst>, Box<ExprAst>),
    Diff(Box<ExprAst>, Box<ExprAst>),
    Union(Box<ExprAst>, Box<ExprAst>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut left = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let right = self.term()?;
            left = if op == '+' {
                ExprAst::Union(Box::new(left), Box::new(right))
            } else {
                ExprAst::Diff(Box::new(left), Box::new(right))
            };
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut left = self.atom()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            let right = self.atom()?;
            left = ExprAst::Intersect(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::parse(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('{') => {
                let start = self.pos + 1;
                let close = self.src[start..]
                    .find('}')
                    .ok_or_else(|| Error::parse(self.pos, "unterminated '{'"))?;
                let body = &self.src[start..start + close];
                let lit = parse_rect(body).map_err(|e| match e {
                    Error::Parse { pos, msg } => Error::parse(start + pos, msg),
                    other => other,
                })?;
                self.pos = start + close + 1;
                Ok(ExprAst::Rect(lit))
            }
            Some(c) => Err(Error::parse(
                self.pos,
                format!("unexpected '{c}', expected '{{' or '('"),
            )),
            None => Err(Error::parse(self.pos, "unexpected end of expression")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<ExprAst> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(Error::parse(p.pos, format!("unexpected trailing '{c}'")));
    }
    Ok(e)
}

impl ExprAst {
    /// Whether any operand has a schedule tail.
    pub fn needs_schedule(&self) -> bool {
        match self {
            ExprAst::Rect(r) => matches!(r.tail, TailLiteral::Schedule { .. }),
            ExprAst::Intersect(a, b) | ExprAst::Diff(a, b) | ExprAst::Union(a, b) => {
                a.needs_schedule() || b.needs_schedule()
            }
        }
    }

    pub fn bind(&self, schedule: Option<&Arc<WitnessSchedule>>) -> Result<SetExpr> {
        Ok(match self {
            ExprAst::Rect(r) => SetExpr::rect(Rectangle::from_literal(r, schedule)?),
            ExprAst::Intersect(a, b) => a.bind(schedule)?.intersect(b.bind(schedule)?),
            ExprAst::Diff(a, b) => a.bind(schedule)?.diff(b.bind(schedule)?),
            ExprAst::Union(a, b) => a.bind(schedule)?.union(b.bind(schedule)?),
        })
    }
}
