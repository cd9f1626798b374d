use serde::Serialize;

use super::{scaled, Fun};
use crate::error::Result;
use crate::value::{ExtendedValue, Rational};
use crate::variations::{search_cells, VariationConfig, VariationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormPair {
    /// Largest `|f(K)|` over grid compacts in the support window.
    pub norm1: ExtendedValue,
    /// `|f|(X)`: largest `Σ |f(Kᵢ)|` over disjoint grid compacts in the window.
    pub norm2: ExtendedValue,
    /// Level of the reported values.
    pub level: u32,
    /// Both norms agreed at the two finest levels searched.
    pub stabilized: bool,
}

fn at_level(f: &Fun, neg: &Fun, level: u32, cfg: &VariationConfig) -> Result<(Rational, Rational)> {
    let window = f.meta().support_window.cells_at(level);
    let cells = window.members();
    let up = search_cells(f, VariationKind::Plus, level, cells, cfg)?.value;
    let down = search_cells(neg, VariationKind::Minus, level, cells, cfg)?.value;
    let total = search_cells(f, VariationKind::Total, level, cells, cfg)?.value;
    Ok((up.max(down), total))
}

/// Both norms of `f`, searched at the last two levels up to the configured cap.
pub fn norms(f: &Fun, cfg: &VariationConfig) -> Result<NormPair> {
    let neg = scaled(Rational::from_integer(-1), f)?;
    let coarse = cfg.level_cap.saturating_sub(1).max(f.meta().support_window.level);
    let first = at_level(f, &neg, coarse, cfg)?;
    let second = at_level(f, &neg, coarse + 1, cfg)?;
    Ok(NormPair {
        norm1: second.0.into(),
        norm2: second.1.into(),
        level: coarse + 1,
        stabilized: first == second,
    })
}
