//! Parser for polynomial expressions such as `x^2 - 3/2*a0_0*y + (u+v)^2`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing, Q};
use crate::ring::{reduce_normal_form, CurveRing, RingElement};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<PolyRing>,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let f = self.unary()?;
            if c == b'*' {
                acc = &acc * &f;
            } else {
                match f.constant_value() {
                    Some(d) if !d.is_zero() => acc = acc.scale(&d.recip()),
                    Some(_) => return Err(syntax(at, "division by zero")),
                    None => return Err(syntax(at, "division by a non-constant")),
                }
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let e = self.digits().ok_or_else(|| syntax(at, "expected exponent"))?;
            let e: u32 = e.parse().map_err(|_| syntax(at, "exponent too large"))?;
            let mut out = self.ring.one();
            for _ in 0..e {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Poly> {
        let Some(c) = self.peek() else {
            return Err(syntax(self.pos, "unexpected end of input"));
        };
        let at = self.pos;
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(syntax(self.pos, "expected `)`"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() {
            let d = self.digits().expect("digit present");
            let n: num_bigint::BigInt = d.parse().map_err(|_| syntax(at, "bad number"))?;
            return Ok(self.ring.constant(Q::from_integer(n)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[at..self.pos]).expect("ascii");
            return self
                .ring
                .var_named(name)
                .map_err(|_| syntax(at, format!("unknown variable `{name}`")));
        }
        Err(syntax(at, format!("unexpected `{}`", c as char)))
    }
}

/// Parse a polynomial over `ring`; errors carry the byte offset.
pub fn parse_poly(ring: &Arc<PolyRing>, src: &str) -> Result<Poly> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, ring };
    if !src.is_ascii() {
        let off = src.char_indices().find(|(_, c)| !c.is_ascii()).map(|(i, _)| i).unwrap_or(0);
        return Err(syntax(off, "non-ASCII character"));
    }
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    Ok(out)
}

/// Parse an element of a curve ring written in `x`, `y` and the coefficient parameters.
pub fn parse_element(ring: &Arc<CurveRing>, src: &str) -> Result<RingElement> {
    let coeff = ring.coeff();
    let mut names = vec!["x".to_string(), "y".to_string()];
    names.extend(coeff.ring().names().iter().cloned());
    let full = PolyRing::grevlex(&names)?;
    let p = parse_poly(&full, src)?;
    let n = coeff.ring().nvars();
    let raw = p.terms().iter().map(|(m, c)| {
        let e = m.exps();
        let cm = crate::poly::Monomial::from_exps(e[2..].to_vec());
        debug_assert_eq!(cm.exps().len(), n);
        let cp = Poly::from_terms(coeff.ring(), vec![(cm, c.clone())]);
        ((e[0] as u32, e[1] as u32), coeff.normalize(cp))
    });
    Ok(reduce_normal_form(raw.collect::<Vec<_>>(), ring))
}

/// Parse a rational number such as `-3/4`.
pub fn parse_rational(src: &str) -> Result<Q> {
    let ring = PolyRing::grevlex::<&str>(&[])?;
    let p = parse_poly(&ring, src)?;
    Ok(p.constant_value().unwrap_or_else(Q::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::coeff::CoeffAlgebra;
    use crate::poly::qr;

    #[test]
    fn polynomials_round_trip() {
        let r = PolyRing::grevlex(&["a", "b"]).unwrap();
        let p = parse_poly(&r, "(a - b)^2 - 3/2*a*b").unwrap();
        assert_eq!(p.to_string(), "a^2 - 7/2*a*b + b^2");
        assert_eq!(parse_poly(&r, " -a ").unwrap().to_string(), "-a");
        assert!(parse_poly(&r, "1").unwrap().lc().unwrap().is_one());
    }

    #[test]
    fn errors_report_offsets() {
        let r = PolyRing::grevlex(&["x", "y"]).unwrap();
        assert_eq!(parse_poly(&r, "x^").unwrap_err(), syntax(2, "expected exponent"));
        assert!(matches!(parse_poly(&r, "x + z"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_poly(&r, "(x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_poly(&r, "x y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_poly(&r, "x/y"), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn curve_elements() {
        let n = CurveRing::node(CoeffAlgebra::rationals(), 20).unwrap();
        let e = parse_element(&n, "x*y + y^2 + 2*x").unwrap();
        assert_eq!(e.to_string(), "2*x + y^2");
        let c = CurveRing::cusp(CoeffAlgebra::rationals(), 20).unwrap();
        assert_eq!(parse_element(&c, "x^2").unwrap().to_string(), "y^3");
        assert_eq!(parse_rational("-3/4").unwrap(), qr(-3, 4));
    }
}
