//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use hilbloc::{parse_element, CoeffAlgebra, CurveRing, IdealGens, Result};

pub fn node_ring(trunc: u32) -> Result<Arc<CurveRing>> {
    CurveRing::node(CoeffAlgebra::rationals(), trunc)
}

pub fn cusp_ring(trunc: u32) -> Result<Arc<CurveRing>> {
    CurveRing::cusp(CoeffAlgebra::rationals(), trunc)
}

/// Ideal from comma-separated generators.
pub fn ideal(ring: &Arc<CurveRing>, src: &str) -> Result<IdealGens> {
    let gens = src.split(',').map(|g| parse_element(ring, g)).collect::<Result<Vec<_>>>()?;
    IdealGens::new(ring, gens)
}
