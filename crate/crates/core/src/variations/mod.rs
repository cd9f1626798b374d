//! Positive, negative and total variations of a set function, searched exactly over grid
//! compacts up to a level cap.

mod checks;
mod function;
pub mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoundingBox, GridRegion};
use crate::measures::{monotone_decomposition, scaled, Fun};
use crate::value::{ExtendedValue, Rational};

pub use checks::{jordan_check, variation_is_dtm_check};
pub use function::VariationFn;
pub use search::Found;

/// Which search backs a variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    /// Branch and bound when a monotone decomposition exists, else exhaustive subsets.
    Auto,
    Exhaustive,
    Grouped,
    Naive,
    BranchBound,
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Oracle::Auto,
            "exhaustive" => Oracle::Exhaustive,
            "grouped" => Oracle::Grouped,
            "naive" => Oracle::Naive,
            "bnb" | "branch-bound" | "branchbound" => Oracle::BranchBound,
            _ => return Err(Error::parse("oracle", format!("unknown oracle `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariationConfig {
    pub level_cap: u32,
    /// Largest candidate cell count for subset enumeration.
    pub budget: usize,
    /// Number of one-cell neighbourhoods, at successive levels, used for closed regions.
    pub closed_dilations: u32,
    pub oracle: Oracle,
}

impl Default for VariationConfig {
    fn default() -> Self {
        VariationConfig { level_cap: 3, budget: 18, closed_dilations: 2, oracle: Oracle::Auto }
    }
}

impl VariationConfig {
    pub fn with_level_cap(mut self, cap: u32) -> Self {
        self.level_cap = cap;
        self
    }

    pub fn with_oracle(mut self, oracle: Oracle) -> Self {
        self.oracle = oracle;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariationKind {
    Plus,
    Minus,
    Total,
}

impl VariationKind {
    pub fn symbol(self) -> &'static str {
        match self {
            VariationKind::Plus => "plus",
            VariationKind::Minus => "minus",
            VariationKind::Total => "total",
        }
    }
}

impl fmt::Display for VariationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariationResult {
    pub value: ExtendedValue,
    /// A compact attaining the value, or the disjoint compacts of a total-variation family.
    pub witness: Vec<GridRegion>,
    pub level_cap: u32,
    /// The two finest search levels gave the same value.
    pub stabilized: bool,
    /// `(level, value)` for every open search performed, for convergence tables.
    #[serde(skip)]
    pub trace: Vec<(u32, Rational)>,
}

/// Cells worth searching: the support window, widened for unbounded regions so a free ring
/// surrounds every excluded cell. Compacts joining atoms the long way round an obstacle
/// that reaches past the window then stay inside the search.
fn search_window(f: &Fun, region: &GridRegion) -> BoundingBox {
    let window = f.meta().support_window;
    let cells = region.cells();
    match cells.bbox() {
        Some((x0, y0, x1, y1)) if cells.is_cofinite() => {
            window.hull(&BoundingBox::new(cells.level(), x0 - 1, y0 - 1, x1 + 2, y1 + 2))
        }
        _ => window,
    }
}

fn search_level(f: &Fun, region: &GridRegion, kind: VariationKind, level: u32, cfg: &VariationConfig) -> Result<Found> {
    let window = search_window(f, region);
    let candidates = region
        .cells()
        .refine_to(level)
        .erode8()
        .intersection(&window.cells_at(level));
    search_cells(f, kind, level, candidates.members(), cfg)
}

/// Maximize over compacts built from `cells` at `level`: `f(K)` for signed kinds (pass the
/// negated function for the negative variation) or `Σ |f(Kᵢ)|` for the total variation.
pub fn search_cells(f: &Fun, kind: VariationKind, level: u32, cells: &[crate::grid::Pos], cfg: &VariationConfig) -> Result<Found> {
    let has_bounds = || monotone_decomposition(f).is_some();
    match kind {
        VariationKind::Total => match cfg.oracle {
            Oracle::Naive => search::naive_total(f, level, cells),
            Oracle::BranchBound => search::branch_bound_total(f, level, cells),
            Oracle::Auto if has_bounds() => search::branch_bound_total(f, level, cells),
            _ => search::grouped_total(f, level, cells, cfg.budget),
        },
        _ => match cfg.oracle {
            Oracle::BranchBound => search::branch_bound_signed(f, level, cells),
            Oracle::Auto if has_bounds() => search::branch_bound_signed(f, level, cells),
            _ => search::exhaustive_signed(f, level, cells, cfg.budget),
        },
    }
}

struct OpenSearch {
    found: Found,
    stabilized: bool,
    trace: Vec<(u32, Rational)>,
}

fn search_open(f: &Fun, u: &GridRegion, kind: VariationKind, cfg: &VariationConfig) -> Result<OpenSearch> {
    let coarse = cfg
        .level_cap
        .saturating_sub(1)
        .max(u.level())
        .max(f.meta().support_window.level);
    let first = search_level(f, u, kind, coarse, cfg)?;
    let second = search_level(f, u, kind, coarse + 1, cfg)?;
    Ok(OpenSearch {
        stabilized: first.value == second.value,
        trace: vec![(coarse, first.value), (coarse + 1, second.value)],
        found: second,
    })
}

/// Variation of `f` (already negated for the negative variation) on an open or closed
/// region.
fn variation_of(f: &Fun, a: &GridRegion, kind: VariationKind, cfg: &VariationConfig) -> Result<VariationResult> {
    let a = if a.is_empty() { GridRegion::empty() } else { a.clone() };
    if a.is_open() || a.is_empty() {
        let s = search_open(f, &a, kind, cfg)?;
        return Ok(VariationResult {
            value: s.found.value.into(),
            witness: s.found.witness,
            level_cap: cfg.level_cap,
            stabilized: s.stabilized,
            trace: s.trace,
        });
    }
    let mut best: Option<OpenSearch> = None;
    let mut values = Vec::new();
    let mut stable = true;
    let mut trace = Vec::new();
    // neighbourhoods one fine cell wide, starting at the resolution of the open searches
    let base = cfg
        .level_cap
        .saturating_sub(1)
        .max(f.meta().support_window.level)
        .saturating_sub(a.level());
    for m in base..base + cfg.closed_dilations.max(1) {
        let u = GridRegion::open(a.cells().refine(m).dilate8());
        let s = search_open(f, &u, kind, cfg)?;
        stable &= s.stabilized;
        values.push(s.found.value);
        trace.extend(s.trace.iter().copied());
        if best.as_ref().map_or(true, |b| s.found.value < b.found.value) {
            best = Some(s);
        }
    }
    let n = values.len();
    let settled = n < 2 || values[n - 1] == values[n - 2];
    let best = best.expect("at least one dilation");
    Ok(VariationResult {
        value: best.found.value.into(),
        witness: best.found.witness,
        level_cap: cfg.level_cap,
        stabilized: stable && settled,
        trace,
    })
}

/// `f⁺`: on open sets the largest `f(K)` over compacts `K ⊆ a`; on closed sets the least
/// value over a dilation sequence of open neighbourhoods.
pub fn variation_plus(f: &Fun, a: &GridRegion, cfg: &VariationConfig) -> Result<VariationResult> {
    variation_of(f, a, VariationKind::Plus, cfg)
}

/// `f⁻ = (−f)⁺`.
pub fn variation_minus(f: &Fun, a: &GridRegion, cfg: &VariationConfig) -> Result<VariationResult> {
    let neg = scaled(Rational::from_integer(-1), f)?;
    variation_of(&neg, a, VariationKind::Minus, cfg)
}

/// `|f|`: the largest `Σ |f(Kᵢ)|` over disjoint compacts inside `a` (open), or the least
/// such value over open neighbourhoods (closed).
pub fn total_variation(f: &Fun, a: &GridRegion, cfg: &VariationConfig) -> Result<VariationResult> {
    variation_of(f, a, VariationKind::Total, cfg)
}

pub fn variation(f: &Fun, kind: VariationKind, a: &GridRegion, cfg: &VariationConfig) -> Result<VariationResult> {
    match kind {
        VariationKind::Plus => variation_plus(f, a, cfg),
        VariationKind::Minus => variation_minus(f, a, cfg),
        VariationKind::Total => total_variation(f, a, cfg),
    }
}
