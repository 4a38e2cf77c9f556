//! Ideal expressions: comma-separated generators in `x`, `y` and an optional parameter `a`.

use std::fmt;
use std::sync::Arc;

use hilbloc::{parse_poly, reduce_normal_form, CurveRing, Error, IdealGens, Poly, PolyRing, Result, RingElement, Q};

/// Name of the symbolic family parameter.
pub const PARAM: &str = "a";

/// A parsed ideal expression.
#[derive(Clone, Debug)]
pub struct IdealExpr {
    source: String,
    pieces: Vec<String>,
    gens: Vec<Poly>,
}

fn formal_ring() -> Arc<PolyRing> {
    PolyRing::grevlex(&["x", "y", PARAM]).expect("three distinct names")
}

/// Byte ranges of the top-level comma-separated pieces.
fn split_top_level(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, c) in text.bytes().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Syntax { offset: k, message: "unbalanced `)`".into() });
                }
            }
            b',' if depth == 0 => {
                out.push((start, k));
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push((start, text.len()));
    Ok(out)
}

/// Parse `text`; syntax errors carry byte offsets into `text`.
pub fn parse_ideal_expr(text: &str) -> Result<IdealExpr> {
    let ring = formal_ring();
    let mut pieces = Vec::new();
    let mut gens = Vec::new();
    for (lo, hi) in split_top_level(text)? {
        let piece = &text[lo..hi];
        if piece.trim().is_empty() {
            return Err(Error::Syntax { offset: lo, message: "empty generator".into() });
        }
        let p = parse_poly(&ring, piece).map_err(|e| match e {
            Error::Syntax { offset, message } => Error::Syntax { offset: lo + offset, message },
            other => other,
        })?;
        pieces.push(piece.trim().to_string());
        gens.push(p);
    }
    Ok(IdealExpr { source: text.to_string(), pieces, gens })
}

impl IdealExpr {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_symbolic(&self) -> bool {
        self.gens.iter().any(|g| g.terms().iter().any(|(m, _)| m.exps()[2] > 0))
    }

    /// Generators as ring elements; the expression must not mention `a`.
    pub fn to_elements(&self, ring: &Arc<CurveRing>) -> Result<Vec<RingElement>> {
        if self.is_symbolic() {
            return Err(Error::InvalidInput(format!(
                "`{}` uses the parameter `{PARAM}`, which this command does not accept; give a numeric value",
                self.source
            )));
        }
        self.specialize(ring, &Q::from_integer(0.into()))
    }

    /// Generators with `a` replaced by `value`.
    pub fn specialize(&self, ring: &Arc<CurveRing>, value: &Q) -> Result<Vec<RingElement>> {
        let coeff = ring.coeff();
        Ok(self
            .gens
            .iter()
            .map(|g| {
                let raw: Vec<_> = g
                    .terms()
                    .iter()
                    .map(|(m, c)| {
                        let e = m.exps();
                        let mut v = c.clone();
                        for _ in 0..e[2] {
                            v *= value;
                        }
                        ((e[0] as u32, e[1] as u32), coeff.scalar(v))
                    })
                    .collect();
                reduce_normal_form(raw, ring)
            })
            .collect())
    }

    pub fn to_ideal(&self, ring: &Arc<CurveRing>) -> Result<IdealGens> {
        IdealGens::new(ring, self.to_elements(ring)?)
    }

    pub fn ideal_at(&self, ring: &Arc<CurveRing>, value: &Q) -> Result<IdealGens> {
        IdealGens::new(ring, self.specialize(ring, value)?)
    }
}

impl fmt::Display for IdealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pieces.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hilbloc::CoeffAlgebra;

    #[test]
    fn examples() {
        assert_eq!(parse_ideal_expr("x*y^2 + 3/2*y^4, y^5").unwrap().len(), 2);
        let e = parse_ideal_expr("y^2 + a*x^2").unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.is_symbolic());
        assert!(matches!(parse_ideal_expr("x^"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn offsets_are_global() {
        assert!(matches!(parse_ideal_expr("x, y^"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse_ideal_expr("x,,y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_ideal_expr("(x, y)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ideal_expr("x)"), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn round_trip_up_to_whitespace() {
        let e = parse_ideal_expr(" x*y^2 +3/2*y^4 ,y^5").unwrap();
        let again = parse_ideal_expr(&e.to_string()).unwrap();
        let strip = |s: &str| s.split_whitespace().collect::<String>();
        assert_eq!(strip(&e.to_string()), strip(e.source()));
        assert_eq!(again.gens(), e.gens());
    }

    #[test]
    fn specialization() {
        let r = CurveRing::cusp(CoeffAlgebra::rationals(), 32).unwrap();
        let e = parse_ideal_expr("x + a*y^2").unwrap();
        assert!(e.to_elements(&r).is_err());
        let g = e.specialize(&r, &Q::from_integer(3.into())).unwrap();
        assert_eq!(g[0].to_string(), "x + 3*y^2");
        assert_eq!(parse_ideal_expr("x^2").unwrap().to_elements(&r).unwrap()[0].to_string(), "y^3");
    }
}
