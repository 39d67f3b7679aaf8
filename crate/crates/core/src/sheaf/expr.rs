//! Bundle expressions.
//!
//! ```text
//! product := postfix ("*" postfix)*
//! postfix := primary ("(" lin ")")*
//! primary := "O(" lin ")" | "U" | "Ud" | "K" | "Kd" | "Sprime" | "dual(" product ")"
//! lin     := ["+"|"-"] term (("+"|"-") term)*      term := [digits] ("h"|"H") | digits
//! ```
//!
//! Whitespace is ignored everywhere. A bare integer term must be zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bwb::LineClass;

/// The named bundles of the calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Builtin {
    U,
    Ud,
    K,
    Kd,
    Sprime,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::U,
        Builtin::Ud,
        Builtin::K,
        Builtin::Kd,
        Builtin::Sprime,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Builtin::U => "U",
            Builtin::Ud => "Ud",
            Builtin::K => "K",
            Builtin::Kd => "Kd",
            Builtin::Sprime => "Sprime",
        }
    }

    /// Filtration factors, subobject first.
    pub fn factors(self) -> Vec<LineClass> {
        let l = LineClass::new;
        match self {
            Builtin::U => vec![l(-1, 0), l(1, -1)],
            Builtin::Ud => vec![l(-1, 1), l(1, 0)],
            Builtin::Kd => vec![l(3, -1), l(0, 1)],
            Builtin::K => vec![l(0, -1), l(-3, 1)],
            // O(-h), then the two factors of Kd(-2h), then O.
            Builtin::Sprime => vec![l(-1, 0), l(1, -1), l(-2, 1), l(0, 0)],
        }
    }
}

/// A parsed or constructed bundle expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Line(LineClass),
    Named(Builtin),
    Dual(Box<Expr>),
    Twist(Box<Expr>, LineClass),
    Tensor(Vec<Expr>),
}

impl Expr {
    pub fn line(a: i64, b: i64) -> Expr {
        Expr::Line(LineClass::new(a, b))
    }

    pub fn named(b: Builtin) -> Expr {
        Expr::Named(b)
    }

    /// Twist that folds into line bundles, earlier twists and the first tensor factor.
    pub fn twisted(self, c: LineClass) -> Expr {
        if c == LineClass::ZERO {
            return self;
        }
        match self {
            Expr::Line(d) => Expr::Line(d + c),
            Expr::Twist(inner, d) => inner.twisted(d + c),
            Expr::Tensor(mut parts) => {
                let first = parts.remove(0);
                parts.insert(0, first.twisted(c));
                Expr::Tensor(parts)
            }
            other => Expr::Twist(Box::new(other), c),
        }
    }

    pub fn dual(self) -> Expr {
        match self {
            Expr::Line(c) => Expr::Line(-c),
            Expr::Dual(inner) => *inner,
            other => Expr::Dual(Box::new(other)),
        }
    }

    /// Flattening tensor product; the trivial line bundle is dropped.
    pub fn tensor(self, other: Expr) -> Expr {
        let mut parts = Vec::new();
        for e in [self, other] {
            match e {
                Expr::Tensor(ps) => parts.extend(ps),
                Expr::Line(c) if c == LineClass::ZERO => {}
                e => parts.push(e),
            }
        }
        match parts.len() {
            0 => Expr::Line(LineClass::ZERO),
            1 => parts.pop().expect("one part"),
            _ => Expr::Tensor(parts),
        }
    }

    /// Filtration factors of the expression.
    pub fn factors(&self) -> Vec<LineClass> {
        match self {
            Expr::Line(c) => vec![*c],
            Expr::Named(b) => b.factors(),
            Expr::Dual(inner) => inner.factors().into_iter().rev().map(|c| -c).collect(),
            Expr::Twist(inner, c) => inner.factors().into_iter().map(|f| f + *c).collect(),
            Expr::Tensor(parts) => parts.iter().fold(vec![LineClass::ZERO], |acc, p| {
                let pf = p.factors();
                acc.iter()
                    .flat_map(|a| pf.iter().map(move |b| *a + *b))
                    .collect()
            }),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Line(c) if *c == LineClass::ZERO => write!(f, "O"),
            Expr::Line(c) => write!(f, "O({c})"),
            Expr::Named(b) => write!(f, "{}", b.symbol()),
            Expr::Dual(inner) => write!(f, "dual({inner})"),
            Expr::Twist(inner, c) => match inner.as_ref() {
                // A bare "O" would read back as the start of a line bundle.
                Expr::Tensor(_) => write!(f, "dual(dual({inner}))({c})"),
                _ => write!(f, "{inner}({c})"),
            },
            Expr::Tensor(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

pub fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(input);
    let e = p.product()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["\"*\"", "\"(\"", "end of input"]));
    }
    Ok(e)
}

pub fn parse_lin(input: &str) -> Result<LineClass, ParseError> {
    let mut p = Parser::new(input);
    let c = p.lin()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["\"+\"", "\"-\"", "end of input"]));
    }
    Ok(c)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        self.skip_ws();
        let found = match self.rest().chars().next() {
            None => "end of input".to_string(),
            Some(c) => format!("{c:?}"),
        };
        ParseError {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), ParseError> {
        if self.eat(ch) {
            Ok(())
        } else {
            let want = format!("\"{ch}\"");
            Err(self.error(&[want.as_str()]))
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.postfix()?;
        while self.eat('*') {
            let rhs = self.postfix()?;
            e = match e {
                Expr::Tensor(mut ps) => {
                    ps.push(rhs);
                    Expr::Tensor(ps)
                }
                lhs => Expr::Tensor(vec![lhs, rhs]),
            };
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.eat('(') {
            let c = self.lin()?;
            self.expect(')')?;
            e = match e {
                Expr::Twist(inner, d) => Expr::Twist(inner, d + c),
                other => Expr::Twist(Box::new(other), c),
            };
        }
        Ok(e)
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|(_, c)| !c.is_ascii_alphanumeric() && *c != '_')
            .map_or(rest.len(), |(i, _)| i);
        &rest[..len]
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: [&str; 7] = [
            "\"O(\"",
            "\"U\"",
            "\"Ud\"",
            "\"K\"",
            "\"Kd\"",
            "\"Sprime\"",
            "\"dual(\"",
        ];
        let word = self.ident();
        let builtin = Builtin::ALL.into_iter().find(|b| b.symbol() == word);
        if let Some(b) = builtin {
            self.pos += word.len();
            return Ok(Expr::Named(b));
        }
        match word {
            "O" => {
                self.pos += 1;
                if self.eat('(') {
                    let c = self.lin()?;
                    self.expect(')')?;
                    Ok(Expr::Line(c))
                } else {
                    Ok(Expr::Line(LineClass::ZERO))
                }
            }
            "dual" => {
                self.pos += 4;
                self.expect('(')?;
                let inner = self.product()?;
                self.expect(')')?;
                Ok(Expr::Dual(Box::new(inner)))
            }
            _ => Err(self.error(&EXPECTED)),
        }
    }

    fn lin(&mut self) -> Result<LineClass, ParseError> {
        let mut total = LineClass::ZERO;
        let mut first = true;
        loop {
            let sign = if self.eat('-') {
                -1
            } else if self.eat('+') || first {
                1
            } else {
                return Ok(total);
            };
            let term = self.lin_term()?;
            let scaled = term.checked_scale(sign).and_then(|t| total.checked_add(t));
            total = match scaled {
                Some(t) => t,
                None => return Err(self.error(&["a coefficient that fits in 64 bits"])),
            };
            first = false;
        }
    }

    fn lin_term(&mut self) -> Result<LineClass, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        let coeff = if digits == 0 {
            None
        } else {
            let text = &self.src[start..start + digits];
            match text.parse::<i64>() {
                Ok(v) => Some(v),
                Err(_) => return Err(self.error(&["a coefficient that fits in 64 bits"])),
            }
        };
        self.pos += digits;
        let sym = self.rest().chars().next();
        let unit = match sym {
            Some('h') => Some(LineClass::H_SMALL),
            Some('H') => Some(LineClass::H_BIG),
            _ => None,
        };
        match (coeff, unit) {
            (c, Some(u)) => {
                self.pos += 1;
                u.checked_scale(c.unwrap_or(1))
                    .ok_or_else(|| self.error(&["a coefficient that fits in 64 bits"]))
            }
            (Some(0), None) => Ok(LineClass::ZERO),
            (Some(_), None) => Err(self.error(&["\"h\"", "\"H\""])),
            (None, None) => Err(self.error(&["integer", "\"h\"", "\"H\""])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc(a: i64, b: i64) -> LineClass {
        LineClass::new(a, b)
    }

    #[test]
    fn parses_lin() {
        assert_eq!(parse_lin("3h-2H").unwrap(), lc(3, -2));
        assert_eq!(parse_lin(" - h - H ").unwrap(), lc(-1, -1));
        assert_eq!(parse_lin("0").unwrap(), lc(0, 0));
        assert_eq!(parse_lin("H-2h").unwrap(), lc(-2, 1));
        assert_eq!(parse_lin("+h+h").unwrap(), lc(2, 0));
        assert!(parse_lin("3").is_err());
        assert!(parse_lin("").is_err());
    }

    #[test]
    fn parses_exprs() {
        assert_eq!(parse_expr("O(3h-2H)").unwrap(), Expr::line(3, -2));
        assert_eq!(parse_expr("O").unwrap(), Expr::line(0, 0));
        let e = parse_expr("dual(U)(-h)").unwrap();
        assert_eq!(e.factors(), vec![lc(-2, 1), lc(0, 0)]);
        let e = parse_expr("U * U(h)").unwrap();
        assert_eq!(e.factors().len(), 4);
        let e = parse_expr("Ud(H)(-h)").unwrap();
        assert_eq!(
            e,
            Expr::Twist(Box::new(Expr::Named(Builtin::Ud)), lc(-1, 1))
        );
    }

    #[test]
    fn twist_binds_tighter_than_product() {
        let e = parse_expr("U * U(h)").unwrap();
        let Expr::Tensor(parts) = e else {
            panic!("tensor expected")
        };
        assert_eq!(parts[0], Expr::Named(Builtin::U));
        assert_eq!(parts[1], Expr::Named(Builtin::U).twisted(lc(1, 0)));
    }

    #[test]
    fn error_reports_position_and_expectation() {
        let err = parse_expr("U * Q").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.expected.iter().any(|e| e.contains("Ud")));
        assert_eq!(err.found, "'Q'");
        let err = parse_expr("O(3h").unwrap_err();
        assert_eq!(err.found, "end of input");
        assert!(parse_expr("U)").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "O(3h-2H)",
            "Ud(-h)",
            "dual(U)(-h)",
            "U * U(h)",
            "Sprime",
            "dual(U * Kd)",
            "O",
            "Kd(h+H) * O(-h)",
        ] {
            let e = parse_expr(src).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(again.factors(), e.factors(), "{src}");
        }
        let t = parse_expr("U * Ud").unwrap().twisted(lc(1, 0));
        assert_eq!(parse_expr(&t.to_string()).unwrap().factors(), t.factors());
    }

    #[test]
    fn builtin_duals() {
        assert_eq!(
            Expr::named(Builtin::U).dual().factors(),
            Builtin::Ud.factors()
        );
        assert_eq!(
            Expr::named(Builtin::Kd).dual().factors(),
            Builtin::K.factors()
        );
    }
}
