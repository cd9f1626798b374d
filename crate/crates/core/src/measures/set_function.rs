use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::grid::{BoundingBox, GridRegion, Point};
use crate::value::{ExtendedValue, Rational};

/// Class a constructor claims for its output. Metadata only: the checker suite decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Class {
    Measure,
    /// Difference of two measures, one of them finite.
    Sm,
    Tm,
    Dtm,
    Stm,
    Sdtm,
    Unknown,
}

/// Which infinity, if any, the function may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum InfinitySign {
    None,
    Pos,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub name: String,
    pub claimed_class: Class,
    /// Variation and norm searches only consider compacts with cells in this window.
    pub support_window: BoundingBox,
    pub infinity_sign: InfinitySign,
}

pub type Fun = Arc<dyn SetFunction>;

/// An evaluator from grid regions (any level) to extended values.
///
/// Implementations must be refinement invariant, return 0 on the empty region, and never
/// produce the infinity opposite to `meta().infinity_sign`.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn eval(&self, region: &GridRegion) -> Result<ExtendedValue>;

    fn meta(&self) -> &Meta;

    /// `A ⊆ B ⇒ f(A) ≤ f(B)` is known to hold (point masses, areas, topological measures).
    fn is_monotone(&self) -> bool {
        false
    }

    /// `f = Σ cᵢ·gᵢ` when the function was built as a linear combination.
    fn linear_parts(&self) -> Option<Vec<(Rational, Fun)>> {
        None
    }

    /// Points whose cells carry the function's mass; the search oracles branch on them first.
    fn atoms(&self) -> Vec<Point> {
        Vec::new()
    }

    /// Whether the value on `r` is exact rather than a lower bound from a truncated search.
    fn settled(&self, _region: &GridRegion) -> Result<bool> {
        Ok(true)
    }

    /// Total weight of the non-atomic (area) part; zero for purely atomic functions.
    fn diffuse_weight(&self) -> Rational {
        Rational::zero()
    }
}

/// Express `f` as `Σ cᵢ·gᵢ` with every `gᵢ` monotone, if its construction allows it.
pub fn monotone_decomposition(f: &Fun) -> Option<Vec<(Rational, Fun)>> {
    if f.is_monotone() {
        return Some(vec![(Rational::from_integer(1), f.clone())]);
    }
    let parts = f.linear_parts()?;
    let mut out: Vec<(Rational, Fun)> = Vec::new();
    for (c, g) in parts {
        if c.is_zero() {
            continue;
        }
        for (d, h) in monotone_decomposition(&g)? {
            if let Some(slot) = out.iter_mut().find(|(_, e)| Arc::ptr_eq(e, &h)) {
                slot.0 += c * d;
            } else {
                out.push((c * d, h));
            }
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    Some(out)
}
