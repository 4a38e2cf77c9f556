//! Exact computations on punctual, relative and flag Hilbert schemes of the node `xy = 0`
//! and the cusp `x^2 = y^3`.

pub mod coeff;
pub mod cusp;
pub mod error;
pub mod flag;
pub mod gb;
pub mod linalg;
pub mod node;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod tangent;

pub use coeff::{CoeffAlgebra, CoeffKind};
pub use cusp::{AssocForm, CuspCanonicalIdeal};
pub use error::{Error, Result};
pub use gb::GroebnerBasis;
pub use oracle::{IdealGens, Oracle, Quotient, QuotientBasis};
pub use parse::{parse_element, parse_poly, parse_rational};
pub use poly::{q, qr, Monomial, MonomialOrder, Poly, PolyRing, Q};
pub use ring::{reduce_normal_form, CurveKind, CurveMono, CurveRing, RingElement};
pub use tangent::HomSpace;
