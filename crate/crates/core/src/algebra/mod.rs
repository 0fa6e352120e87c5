//! Scalar linear network coding over an FDG: symbolic transfer matrices and
//! exhaustive solvability search over prime fields.

mod poly;
mod search;
mod transfer;

pub use poly::{Indet, Monomial, Poly};
pub use search::{
    solvability_search, SearchError, SearchOptions, SearchOutcome, DEFAULT_MAX_FIELD, DEFAULT_MAX_INDETS,
};
pub use transfer::{
    build_transfer_system, transfer_matrix, Endpoint, Indeterminate, PolyMatrix, Slot, TransferError,
    TransferSystem,
};

use num_traits::ToPrimitive;

use crate::rational::Rational;

/// Size comparison of two transfer systems for the same network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStats {
    pub original_indets: usize,
    pub reduced_indets: usize,
    /// `(1 - reduced/original) · 100`, rounded half up.
    pub var_reduction_pct: i64,
    /// Edge adjacency `F` shapes.
    pub original_dims: (usize, usize),
    pub reduced_dims: (usize, usize),
    /// `(1 - (r/o)^2) · 100` over adjacency sizes, exact.
    pub squared_complexity_pct: Rational,
    /// `(1 - (r/o)^3) · 100` over adjacency sizes, exact.
    pub cubed_complexity_pct: Rational,
}

impl ReductionStats {
    /// The squared convention, rounded half up.
    pub fn complexity_pct(&self) -> i64 {
        round(&self.squared_complexity_pct)
    }
}

fn round(r: &Rational) -> i64 {
    r.round_half_up().to_i64().expect("percentage fits")
}

fn shrink_pct(reduced: usize, original: usize, power: u32) -> Rational {
    if original == 0 {
        return Rational::zero();
    }
    let ratio = Rational::new(reduced as i64, original as i64);
    let mut p = Rational::one();
    for _ in 0..power {
        p = &p * &ratio;
    }
    (Rational::one() - p) * Rational::from_integer(100)
}

pub fn reduction_stats(original: &TransferSystem, reduced: &TransferSystem) -> ReductionStats {
    let (o, r) = (original.indet_count(), reduced.indet_count());
    let (oe, re) = (original.edges().len(), reduced.edges().len());
    ReductionStats {
        original_indets: o,
        reduced_indets: r,
        var_reduction_pct: round(&shrink_pct(r, o, 1)),
        original_dims: (oe, oe),
        reduced_dims: (re, re),
        squared_complexity_pct: shrink_pct(re, oe, 2),
        cubed_complexity_pct: shrink_pct(re, oe, 3),
    }
}
