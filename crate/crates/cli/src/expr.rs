//! Infix expressions over the coordinates of a manifold, compiled into
//! [`ScalarField`] normal form.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, decimal numbers, `pi`,
//! `sin(..)` and `cos(..)`. Sphere coordinates may appear anywhere. Torus
//! angles may only appear inside `sin`/`cos`, and the argument must be affine
//! in the angles with frequencies compatible with the periods. Division is
//! by constants only; exponents are non-negative integer constants.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use contact_flux::funcalg::Complex;
use contact_flux::manifolds::CoordKind;
use contact_flux::{ManifoldSpec, ScalarField};

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> PResult<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v = text
                .parse()
                .map_err(|_| ParseError { position: start, message: format!("bad number `{text}`") })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(ParseError { position: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Intermediate value during compilation.
#[derive(Clone, Debug)]
enum Val {
    Const(f64),
    /// `sum_i coefs[i] * theta_i + constant` over torus angles.
    Angle(Vec<f64>, f64),
    Field(ScalarField),
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    m: &'a Arc<ManifoldSpec>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { position: self.offset(), message: message.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> PResult<Val> {
        let mut acc = self.term()?;
        loop {
            let at = self.offset();
            if self.eat('+') {
                let rhs = self.term()?;
                acc = self.add(acc, rhs, 1.0, at)?;
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = self.add(acc, rhs, -1.0, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<Val> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = self.mul(acc, rhs, at)?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                match rhs {
                    Val::Const(c) if c != 0.0 => acc = self.mul(acc, Val::Const(1.0 / c), at)?,
                    Val::Const(_) => return Err(ParseError { position: at, message: "division by zero".into() }),
                    _ => return Err(ParseError { position: at, message: "division is only by constants".into() }),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<Val> {
        let at = self.offset();
        if self.eat('-') {
            let v = self.unary()?;
            self.mul(Val::Const(-1.0), v, at)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Val> {
        let base = self.atom()?;
        let at = self.offset();
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = match self.unary()? {
            Val::Const(e) => e,
            _ => return Err(ParseError { position: at, message: "exponent must be a constant".into() }),
        };
        match base {
            Val::Const(b) => Ok(Val::Const(b.powf(exp))),
            Val::Field(f) => {
                if exp < 0.0 || exp.fract() != 0.0 || exp > 64.0 {
                    return Err(ParseError {
                        position: at,
                        message: format!("exponent {exp} is not a small non-negative integer"),
                    });
                }
                Ok(Val::Field(f.powi(exp as u32)))
            }
            Val::Angle(..) => Err(ParseError { position: at, message: "torus angles may only appear inside sin/cos".into() }),
        }
    }

    fn atom(&mut self) -> PResult<Val> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Val::Const(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "sin" || name == "cos" {
                    if !self.eat('(') {
                        return self.err(format!("expected `(` after `{name}`"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected `)`");
                    }
                    return self.trig(&name, arg, at);
                }
                if name == "pi" {
                    return Ok(Val::Const(PI));
                }
                let idx = self.m.coord(&name).map_err(|_| ParseError {
                    position: at,
                    message: format!("unknown identifier `{name}` (coordinates: {})", self.m.coord_names().join(", ")),
                })?;
                match self.m.kind(idx) {
                    Ok(CoordKind::Angle { .. }) => {
                        let mut coefs = vec![0.0; self.m.torus_count()];
                        coefs[idx] = 1.0;
                        Ok(Val::Angle(coefs, 0.0))
                    }
                    _ => Ok(Val::Field(
                        ScalarField::coordinate(self.m, idx)
                            .map_err(|e| ParseError { position: at, message: e.to_string() })?,
                    )),
                }
            }
            Some(Token::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of expression"),
        }
    }

    fn trig(&self, name: &str, arg: Val, at: usize) -> PResult<Val> {
        let sin = name == "sin";
        match arg {
            Val::Const(c) => Ok(Val::Const(if sin { c.sin() } else { c.cos() })),
            Val::Angle(coefs, c) => {
                let mut modes = Vec::with_capacity(coefs.len());
                for (i, a) in coefs.iter().enumerate() {
                    let k = a * self.m.periods()[i] / TAU;
                    if (k - k.round()).abs() > 1e-9 {
                        return Err(ParseError {
                            position: at,
                            message: format!(
                                "frequency {a} of `{}` is not a multiple of 2*pi/{}",
                                self.m.coord_name(i),
                                self.m.periods()[i]
                            ),
                        });
                    }
                    modes.push(k.round() as i32);
                }
                let wrap = |r: contact_flux::Result<ScalarField>| {
                    r.map_err(|e| ParseError { position: at, message: e.to_string() })
                };
                let s = wrap(ScalarField::sin_mode(self.m, &modes, 1.0))?;
                let co = wrap(ScalarField::cos_mode(self.m, &modes, 1.0))?;
                // sin(t + c) = sin t cos c + cos t sin c; cos(t + c) = cos t cos c - sin t sin c
                let f = if sin {
                    s.scale(c.cos()) + co.scale(c.sin())
                } else {
                    co.scale(c.cos()) - s.scale(c.sin())
                };
                Ok(Val::Field(f))
            }
            Val::Field(_) => Err(ParseError {
                position: at,
                message: format!("argument of `{name}` must be affine in the torus angles"),
            }),
        }
    }

    fn to_field(&self, v: Val, at: usize) -> PResult<ScalarField> {
        match v {
            Val::Const(c) => Ok(ScalarField::constant(self.m, c)),
            Val::Field(f) => Ok(f),
            Val::Angle(..) => {
                Err(ParseError { position: at, message: "torus angles may only appear inside sin/cos".into() })
            }
        }
    }

    fn add(&self, a: Val, b: Val, sign: f64, at: usize) -> PResult<Val> {
        Ok(match (a, b) {
            (Val::Const(x), Val::Const(y)) => Val::Const(x + sign * y),
            (Val::Angle(mut u, c), Val::Angle(v, d)) => {
                u.iter_mut().zip(&v).for_each(|(p, q)| *p += sign * q);
                Val::Angle(u, c + sign * d)
            }
            (Val::Angle(u, c), Val::Const(d)) => Val::Angle(u, c + sign * d),
            (Val::Const(d), Val::Angle(u, c)) => Val::Angle(u.iter().map(|x| sign * x).collect(), d + sign * c),
            (a, b) => {
                let fa = self.to_field(a, at)?;
                let fb = self.to_field(b, at)?;
                Val::Field(fa + fb.scale(sign))
            }
        })
    }

    fn mul(&self, a: Val, b: Val, at: usize) -> PResult<Val> {
        Ok(match (a, b) {
            (Val::Const(x), Val::Const(y)) => Val::Const(x * y),
            (Val::Angle(u, c), Val::Const(s)) | (Val::Const(s), Val::Angle(u, c)) => {
                Val::Angle(u.iter().map(|x| s * x).collect(), s * c)
            }
            (Val::Field(f), Val::Const(s)) | (Val::Const(s), Val::Field(f)) => Val::Field(f.scale(s)),
            (a, b) => {
                let fa = self.to_field(a, at)?;
                let fb = self.to_field(b, at)?;
                Val::Field(&fa * &fb)
            }
        })
    }
}

/// Compiles `src` into a function on `m`.
pub fn parse_function(src: &str, m: &Arc<ManifoldSpec>) -> PResult<ScalarField> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(ParseError { position: 0, message: "empty expression".into() });
    }
    let mut p = Parser { tokens, pos: 0, end: src.len(), m };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.err("trailing input");
    }
    let f = p.to_field(v, 0)?;
    if !f.is_real() {
        return Err(ParseError { position: 0, message: "expression is not real-valued".into() });
    }
    Ok(f)
}

/// Parses a constant expression such as `2*pi/3`.
pub fn parse_constant(src: &str) -> PResult<f64> {
    let m = Arc::new(
        ManifoldSpec::new("point", vec![contact_flux::manifolds::Factor::Torus { dim: 1, period: TAU }], vec![
            "_".into(),
        ])
        .expect("valid manifold"),
    );
    let f = parse_function(src, &m)?;
    f.constant_value()
        .map(|c: Complex| c.re)
        .ok_or_else(|| ParseError { position: 0, message: "expected a constant".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use contact_flux::registry;

    fn t3() -> Arc<ManifoldSpec> {
        registry("torus3").unwrap().manifold
    }

    #[test]
    fn trig_terms_compile_to_modes() {
        let m = t3();
        let f = parse_function("sin(z)/(2*pi)^2", &m).unwrap();
        let g = ScalarField::sin_coord(&m, 2, 1, 1.0 / (4.0 * PI * PI)).unwrap();
        assert!(f.approx_eq(&g, 1e-15));
        let h = parse_function("cos(2*x - y + 3*z)", &m).unwrap();
        assert!(h.approx_eq(&ScalarField::cos_mode(&m, &[2, -1, 3], 1.0).unwrap(), 1e-15));
    }

    #[test]
    fn phases_and_products() {
        let m = t3();
        let f = parse_function("sin(z + pi/2)", &m).unwrap();
        assert!(f.approx_eq(&ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap(), 1e-15));
        let sq = parse_function("sin(z)^2 + cos(z)^2", &m).unwrap();
        assert!(sq.approx_eq(&ScalarField::constant(&m, 1.0), 1e-14));
        let p = [0.1, 0.2, 0.3];
        let v = parse_function("-3*cos(x)*sin(y) + 0.5", &m).unwrap().evaluate_real(&p).unwrap();
        assert!((v - (-3.0 * 0.1f64.cos() * 0.2f64.sin() + 0.5)).abs() < 1e-14);
    }

    #[test]
    fn sphere_coordinates_and_periods() {
        let m = registry("torus-sphere(2)").unwrap().manifold;
        let f = parse_function("y0^2 + y1^2 + y2^2", &m).unwrap();
        assert!(f.approx_eq(&ScalarField::constant(&m, 1.0), 1e-14));
        let g = parse_function("sin(2*pi*x1)*y0", &m).unwrap();
        let p = [0.0, 0.125, 0.0, 1.0, 0.0, 0.0];
        assert!((g.evaluate_real(&p).unwrap() - (TAU * 0.125).sin()).abs() < 1e-14);
        assert!(parse_function("sin(x1)", &m).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let m = t3();
        for bad in ["", "x", "sin(x", "sin(y0)", "2 +", "z*sin(z)", "1/sin(z)", "sin(z)^-1", "sin(z)^0.5", "q", "3 $"] {
            assert!(parse_function(bad, &m).is_err(), "{bad}");
        }
        let e = parse_function("sin(x) + w", &m).unwrap_err();
        assert_eq!(e.position, 9);
    }

    #[test]
    fn constants() {
        assert!((parse_constant("2*pi/4").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_constant("1e-3").unwrap(), 1e-3);
        assert!(parse_constant("_").is_err());
    }
}
