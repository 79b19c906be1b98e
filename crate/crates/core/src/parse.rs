//! Recursive-descent parser for polynomial text such as `x0 + y0 + x0*y0`
//! or `y^2 - x*(x - 1)*(x - t)`. Coefficients live in Q(t); division is
//! only allowed by variable-free expressions.

use std::collections::HashMap;

use crate::basefield::{Field, RatFunc};
use crate::diffring::{DiffPoly, JetVar};
use crate::error::{Error, Result};

/// Where a string sits inside its source file, for diagnostics.
#[derive(Clone, Debug)]
pub struct Origin {
    pub path: String,
    pub line: usize,
    pub col: usize,
}

impl Origin {
    pub fn inline() -> Self {
        Origin {
            path: "<input>".into(),
            line: 1,
            col: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str, origin: &Origin) -> Result<Lexer> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            toks.push((Tok::Int(chars[s..i].iter().collect()), s));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[s..i].iter().collect()), s));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(error_at(origin, src, i, format!("unexpected character '{}'", c)));
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

fn error_at(origin: &Origin, src: &str, pos: usize, msg: String) -> Error {
    let mut line = origin.line;
    let mut col = origin.col;
    for c in src.chars().take(pos) {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    Error::Parse {
        path: origin.path.clone(),
        line,
        col,
        msg,
    }
}

struct Parser<'a> {
    src: &'a str,
    origin: &'a Origin,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a HashMap<String, JetVar>,
}

type P = DiffPoly<RatFunc>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        error_at(self.origin, self.src, self.here(), msg.into())
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Int(s) | Tok::Ident(s) => format!("'{}'", s),
            Tok::Op(c) => format!("'{}'", c),
            Tok::End => "end of input".into(),
        }
    }

    fn expr(&mut self) -> Result<P> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<P> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.unary()?;
                    if !d.variables().is_empty() {
                        return Err(error_at(self.origin, self.src, at, "division by an expression with variables".into()));
                    }
                    let c = d.constant_term();
                    let inv = c
                        .inv()
                        .ok_or_else(|| error_at(self.origin, self.src, at, "division by zero".into()))?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<P> {
        match self.peek() {
            Tok::Op('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<P> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().clone() {
            Tok::Int(s) => {
                let e: u32 = s.parse().map_err(|_| self.err("exponent too large"))?;
                if e > 64 {
                    return Err(self.err("exponent too large"));
                }
                self.pos += 1;
                Ok(base.pow(e))
            }
            _ => Err(self.err(format!("expected a nonnegative integer exponent, found {}", self.describe()))),
        }
    }

    fn atom(&mut self) -> Result<P> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.pos += 1;
                let n: num_bigint::BigInt = s.parse().expect("digits");
                let q = crate::basefield::Rational::from_integer(n);
                Ok(P::constant(RatFunc::from_rational(&q), None))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(v) = self.vars.get(&name) {
                    Ok(P::var(*v, None))
                } else if name == "t" {
                    Ok(P::constant(RatFunc::t(), None))
                } else {
                    self.pos -= 1;
                    Err(self.err(format!("unknown variable '{}'", name)))
                }
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return Err(self.err(format!("expected ')', found {}", self.describe())));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err(format!("expected a number, variable or '(', found {}", self.describe()))),
        }
    }
}

/// Parse `src` with the given variable names.
pub fn parse_poly(src: &str, vars: &HashMap<String, JetVar>, origin: &Origin) -> Result<P> {
    let lx = lex(src, origin)?;
    let mut p = Parser {
        src,
        origin,
        toks: lx.toks,
        pos: 0,
        vars,
    };
    if p.peek() == &Tok::End {
        return Err(p.err("empty polynomial"));
    }
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.err(format!("unexpected {}", p.describe())));
    }
    Ok(e)
}

/// Parse a scalar in Q(t), e.g. `t`, `3/2`, `(t + 1)/(t - 2)`.
pub fn parse_ratfunc(src: &str, origin: &Origin) -> Result<RatFunc> {
    Ok(parse_poly(src, &HashMap::new(), origin)?.constant_term())
}

/// Rational coefficients only (no t), as required in constant-field mode.
pub fn to_constant_coeffs(p: &P) -> Option<DiffPoly<crate::basefield::Rational>> {
    if p.terms().any(|(_, c)| c.as_constant().is_none()) {
        return None;
    }
    Some(p.map_coeffs(|c| c.as_constant().expect("checked")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::rat;

    fn names() -> HashMap<String, JetVar> {
        let mut m = HashMap::new();
        m.insert("x0".to_string(), JetVar::left(0, 0));
        m.insert("y0".to_string(), JetVar::right(0, 0));
        m
    }

    #[test]
    fn parses_gm_law() {
        let p = parse_poly("x0 + y0 + x0*y0", &names(), &Origin::inline()).unwrap();
        assert_eq!(p.to_string(), "x0 + y0 + x0*y0");
    }

    #[test]
    fn precedence_and_powers() {
        let p = parse_poly("-(x0 - y0)^2 / 2 + t*x0", &names(), &Origin::inline()).unwrap();
        assert_eq!(p.to_string(), "t*x0 - (1/2)*x0^2 + x0*y0 - (1/2)*y0^2");
    }

    #[test]
    fn error_points_at_token() {
        let o = Origin {
            path: "g.toml".into(),
            line: 4,
            col: 10,
        };
        let e = parse_poly("x0 + * y0", &names(), &o).unwrap_err();
        match e {
            Error::Parse { line, col, ref msg, .. } => {
                assert_eq!((line, col), (4, 15));
                assert!(msg.contains("'*'"), "{msg}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_variable_division_and_unknowns() {
        assert!(parse_poly("x0 / y0", &names(), &Origin::inline()).is_err());
        assert!(parse_poly("z + 1", &names(), &Origin::inline()).is_err());
        assert!(parse_poly("x0 / 0", &names(), &Origin::inline()).is_err());
        assert!(parse_poly("", &names(), &Origin::inline()).is_err());
    }

    #[test]
    fn scalars() {
        let o = Origin::inline();
        assert_eq!(parse_ratfunc("t", &o).unwrap(), RatFunc::t());
        let r = parse_ratfunc("(t + 1)/(t - 2)", &o).unwrap();
        assert_eq!(r.to_string(), "(t + 1)/(t - 2)");
        assert_eq!(parse_ratfunc("3/2", &o).unwrap(), RatFunc::from_rational(&rat(3, 2)));
        assert!(parse_ratfunc("1/(t - t)", &o).is_err());
    }
}
