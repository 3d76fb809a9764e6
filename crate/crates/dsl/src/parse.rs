//! Recursive-descent parser.
//!
//! Precedence, loosest first: comparisons, `+ -`, `* /`, unary `-`, `^`.
//! `^` is right-associative and its right operand may carry a unary minus,
//! so `2^-1` parses as `2^(-1)` while `-2^2` is `-(2^2)`.

use crate::ast::{BinOp, CmpOp, Expr, Func};
use crate::error::{DslError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2exp` stays an error
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| DslError::Syntax {
                offset: start,
                expected: vec!["number".into()],
                found: format!("`{lit}`"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let two = if i + 1 < bytes.len() { &text[i..i + 2] } else { "" };
        let tok = match two {
            "<=" => Some("<="),
            ">=" => Some(">="),
            "==" => Some("=="),
            _ => None,
        };
        if let Some(op) = tok {
            out.push((Tok::Op(op), start));
            i += 2;
            continue;
        }
        let tok = match c {
            b'+' => Tok::Op("+"),
            b'-' => Tok::Op("-"),
            b'*' => Tok::Op("*"),
            b'/' => Tok::Op("/"),
            b'^' => Tok::Op("^"),
            b'<' => Tok::Op("<"),
            b'>' => Tok::Op(">"),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(DslError::Syntax {
                    offset: start,
                    expected: vec!["expression".into()],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T> {
        Err(DslError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&[what])
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Op("==") => CmpOp::Eq,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op("-") {
            self.bump();
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op("^") {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name, offset)
            }
            _ => self.error(&["number", "identifier", "`(`", "`-`"]),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr> {
        if name == "if" {
            self.expect(Tok::LParen, "`(`")?;
            let c = self.expr()?;
            self.expect(Tok::Comma, "`,`")?;
            let a = self.expr()?;
            self.expect(Tok::Comma, "`,`")?;
            let b = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(`")?;
            let mut args = vec![self.expr()?];
            for _ in 1..func.arity() {
                self.expect(Tok::Comma, "`,`")?;
                args.push(self.expr()?);
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Call(func, args));
        }
        if name == "pi" {
            return Ok(Expr::Num(std::f64::consts::PI));
        }
        let unknown = || DslError::UnknownIdentifier {
            name: name.clone(),
            offset,
        };
        let (head, digits) = name.split_at(1);
        let idx: usize = digits.parse().map_err(|_| unknown())?;
        if idx == 0 || digits.starts_with('0') {
            return Err(unknown());
        }
        match head {
            "x" => Ok(Expr::Coord(idx - 1)),
            "t" => Ok(Expr::Param(idx - 1)),
            _ => Err(unknown()),
        }
    }
}

/// Parses an expression over any number of `x`/`t` variables.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(&["operator", "end of input"]);
    }
    Ok(e)
}

/// Parses and checks that only `x1..x{coords}` and `t1..t{params}` occur.
pub fn parse_with_arity(text: &str, coords: usize, params: usize) -> Result<Expr> {
    let e = parse(text)?;
    let (m, d) = e.arity();
    if m > coords || d > params {
        let name = if m > coords { format!("x{m}") } else { format!("t{d}") };
        let offset = text.find(&name).unwrap_or(0);
        return Err(DslError::UnknownIdentifier { name, offset });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_node() {
        let e = parse("t1*(1-t1)").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinOp::Mul,
                Expr::Param(0),
                Expr::binary(BinOp::Sub, Expr::Num(1.0), Expr::Param(0))
            )
        );
    }

    #[test]
    fn conditional_node() {
        let e = parse("if(x1 >= 0, exp(-1/abs(t1)), 2*exp(-1/abs(t1))*x2)").unwrap();
        match e {
            Expr::If(c, _, _) => assert!(matches!(*c, Expr::Cmp(CmpOp::Ge, _, _))),
            other => panic!("expected conditional, got {other:?}"),
        }
    }

    #[test]
    fn nested_calls() {
        let e = parse("exp(-1/abs(t1))").unwrap();
        // unary minus binds tighter than `/`
        let inner = Expr::binary(
            BinOp::Div,
            Expr::negate(Expr::Num(1.0)),
            Expr::call(Func::Abs, Expr::Param(0)),
        );
        assert_eq!(e, Expr::call(Func::Exp, inner));
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("-2^2").unwrap(),
            Expr::negate(Expr::binary(BinOp::Pow, Expr::Num(2.0), Expr::Num(2.0)))
        );
        assert_eq!(
            parse("2^3^2").unwrap(),
            Expr::binary(
                BinOp::Pow,
                Expr::Num(2.0),
                Expr::binary(BinOp::Pow, Expr::Num(3.0), Expr::Num(2.0))
            )
        );
        assert_eq!(
            parse("1-2-3").unwrap(),
            Expr::binary(
                BinOp::Sub,
                Expr::binary(BinOp::Sub, Expr::Num(1.0), Expr::Num(2.0)),
                Expr::Num(3.0)
            )
        );
        assert!(matches!(parse("1+2 < 3*4").unwrap(), Expr::Cmp(CmpOp::Lt, _, _)));
        assert_eq!(
            parse("2^-1").unwrap(),
            Expr::binary(BinOp::Pow, Expr::Num(2.0), Expr::negate(Expr::Num(1.0)))
        );
    }

    #[test]
    fn exponent_literals() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse("2E3").unwrap(), Expr::Num(2000.0));
        assert!(parse("2exp(1)").is_err());
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("t1 + * 2") {
            Err(DslError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 5);
                assert!(expected.iter().any(|e| e == "number"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(t1"), Err(DslError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("t1 t2"), Err(DslError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("min(t1)"), Err(DslError::Syntax { .. })));
        assert!(matches!(parse("t1 $ 2"), Err(DslError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("t1 +"), Err(DslError::Syntax { offset: 4, .. })));
        assert!(matches!(parse(""), Err(DslError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn unknown_identifiers() {
        assert!(matches!(
            parse("foo + 1"),
            Err(DslError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("x0"), Err(DslError::UnknownIdentifier { .. })));
        assert!(matches!(parse("t01"), Err(DslError::UnknownIdentifier { .. })));
        assert!(matches!(
            parse_with_arity("x1 + t3", 1, 2),
            Err(DslError::UnknownIdentifier { ref name, offset: 5 }) if name == "t3"
        ));
        assert!(parse_with_arity("x1 + t2", 1, 2).is_ok());
    }
}
