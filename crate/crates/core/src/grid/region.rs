use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cellset::{CellSet, Pos};
use crate::error::{Error, Result};
use crate::value::{format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Open,
    Closed,
}

impl Kind {
    pub fn dual(self) -> Kind {
        match self {
            Kind::Open => Kind::Closed,
            Kind::Closed => Kind::Open,
        }
    }
}

/// A point of the plane with exact rational coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

fn scaled_indices(t: Rational, level: u32) -> (i64, Option<i64>) {
    let s = t * Rational::from_integer(1i64 << level);
    if s.is_integer() {
        let n = s.to_integer();
        (n - 1, Some(n))
    } else {
        (s.floor().to_integer(), None)
    }
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// True when both coordinates have a reduced denominator that is not a power of two,
    /// so the point is interior to exactly one cell at every level.
    pub fn is_non_dyadic(&self) -> bool {
        let bad = |r: &Rational| r.denom().count_ones() == 1;
        !bad(&self.x) && !bad(&self.y)
    }

    /// Cells at `level` whose closure contains the point (1, 2 or 4 of them).
    pub fn incident_cells(&self, level: u32) -> Vec<Pos> {
        let (x0, x1) = scaled_indices(self.x, level);
        let (y0, y1) = scaled_indices(self.y, level);
        let xs: Vec<i64> = std::iter::once(x0).chain(x1).collect();
        let ys: Vec<i64> = std::iter::once(y0).chain(y1).collect();
        let mut out = Vec::with_capacity(4);
        for &x in &xs {
            for &y in &ys {
                out.push((x, y));
            }
        }
        out
    }

    /// The unique cell containing a non-dyadic point in its interior.
    pub fn cell_at(&self, level: u32) -> Pos {
        let c = self.incident_cells(level);
        debug_assert_eq!(c.len(), 1);
        c[0]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", format_rational(&self.x), format_rational(&self.y))
    }
}

/// An exact open or closed subset of the plane.
///
/// `Closed` over cells `S` is the union of the closed cells of `S`; `Open` over `T` is the
/// set of points all of whose incident cells lie in `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridRegion {
    cells: CellSet,
    kind: Kind,
}

impl GridRegion {
    pub fn new(cells: CellSet, kind: Kind) -> Self {
        GridRegion { cells, kind }
    }

    pub fn open(cells: CellSet) -> Self {
        GridRegion::new(cells, Kind::Open)
    }

    pub fn closed(cells: CellSet) -> Self {
        GridRegion::new(cells, Kind::Closed)
    }

    pub fn empty() -> Self {
        GridRegion::closed(CellSet::empty(0))
    }

    pub fn whole() -> Self {
        GridRegion::open(CellSet::all(0))
    }

    pub fn cells(&self) -> &CellSet {
        &self.cells
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn level(&self) -> u32 {
        self.cells.level()
    }

    pub fn is_open(&self) -> bool {
        self.kind == Kind::Open
    }

    pub fn is_closed(&self) -> bool {
        self.kind == Kind::Closed
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cells.is_all()
    }

    /// Compact: closed over finitely many cells.
    pub fn is_compact(&self) -> bool {
        self.kind == Kind::Closed && self.cells.is_finite()
    }

    /// Bounded: the closure is compact.
    pub fn is_bounded(&self) -> bool {
        self.cells.is_finite()
    }

    pub fn refine(&self, steps: u32) -> Self {
        GridRegion::new(self.cells.refine(steps), self.kind)
    }

    pub fn refine_to(&self, level: u32) -> Self {
        GridRegion::new(self.cells.refine_to(level), self.kind)
    }

    /// Canonical representative of the point set: coarsest level, with ∅ closed and X open.
    pub fn canonical(&self) -> Self {
        if self.cells.is_empty() {
            return GridRegion::empty();
        }
        if self.cells.is_all() {
            return GridRegion::whole();
        }
        GridRegion::new(self.cells.canonical(), self.kind)
    }

    /// Point-set equality.
    pub fn same_set(&self, other: &GridRegion) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn complement(&self) -> Self {
        GridRegion::new(self.cells.complement(), self.kind.dual())
    }

    /// Closure of an open region (`K(T)`); closed regions are returned unchanged.
    pub fn closure(&self) -> Self {
        GridRegion::closed(self.cells.clone())
    }

    /// Interior of a closed region (`U(S)`); open regions are returned unchanged.
    pub fn interior(&self) -> Self {
        GridRegion::open(self.cells.clone())
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        let inc = p.incident_cells(self.level());
        match self.kind {
            Kind::Open => inc.iter().all(|&c| self.cells.contains(c)),
            Kind::Closed => inc.iter().any(|&c| self.cells.contains(c)),
        }
    }

    fn aligned(&self, other: &GridRegion) -> (GridRegion, GridRegion) {
        let l = self.level().max(other.level());
        (self.refine_to(l), other.refine_to(l))
    }

    /// Point-set containment `self ⊆ other`.
    pub fn is_subset(&self, other: &GridRegion) -> bool {
        let (a, b) = self.aligned(other);
        match (a.kind, b.kind) {
            (Kind::Closed, Kind::Closed) | (Kind::Open, Kind::Open) => a.cells.is_subset(&b.cells),
            (Kind::Closed, Kind::Open) => a.cells.dilate8().is_subset(&b.cells),
            (Kind::Open, Kind::Closed) => a.cells.is_subset(&b.cells),
        }
    }

    /// Point-set disjointness.
    pub fn is_disjoint(&self, other: &GridRegion) -> bool {
        let (a, b) = self.aligned(other);
        match (a.kind, b.kind) {
            (Kind::Closed, Kind::Closed) => a.cells.dilate8().is_disjoint(&b.cells),
            _ => a.cells.is_disjoint(&b.cells),
        }
    }

    /// The region whose point set is `self ⊔ other`, or [`Error::Reject`] when that union
    /// is neither open nor closed.
    pub fn disjoint_union(&self, other: &GridRegion) -> Result<GridRegion> {
        if !self.is_disjoint(other) {
            return Err(Error::Precondition("disjoint_union of overlapping regions".into()));
        }
        let (a, b) = self.aligned(other);
        let union = a.cells.union(&b.cells);
        match (a.kind, b.kind) {
            (Kind::Closed, Kind::Closed) => Ok(GridRegion::closed(union)),
            (Kind::Open, Kind::Open) => {
                if a.cells.dilate4().is_disjoint(&b.cells) {
                    Ok(GridRegion::open(union))
                } else {
                    Err(Error::Reject)
                }
            }
            _ => {
                let (k, u) = if a.kind == Kind::Closed { (&a, &b) } else { (&b, &a) };
                if k.cells.dilate8().is_subset(&union) {
                    Ok(GridRegion::open(union))
                } else if boundary_covered(&u.cells, &k.cells) {
                    Ok(GridRegion::closed(union))
                } else {
                    Err(Error::Reject)
                }
            }
        }
    }

    /// `u ∖ k` for a compact `k ⊆ u`.
    pub fn set_minus_compact(&self, k: &GridRegion) -> Result<GridRegion> {
        if !self.is_open() || !k.is_compact() || !k.is_subset(self) {
            return Err(Error::Precondition(
                "set_minus_compact needs an open region and a compact subset".into(),
            ));
        }
        let (u, k) = self.aligned(k);
        Ok(GridRegion::open(u.cells.difference(&k.cells)))
    }

    /// Lebesgue area of the finite part of the region (`None` for unbounded regions).
    pub fn area(&self) -> Option<Rational> {
        let n = self.cells.len()? as i64;
        Some(Rational::new(n, 1i64 << (2 * self.level())))
    }
}

/// Every boundary point of `U(t)` lies in `K(s)`: each face (cell interior, edge or
/// vertex) incident to cells both in and out of `t` also touches a cell of `s`.
fn boundary_covered(t: &CellSet, s: &CellSet) -> bool {
    let span = |d: i64| if d == 0 { 0..=0 } else if d > 0 { 0..=1 } else { -1..=0 };
    t.members().iter().all(|&(x, y)| {
        (-1..=1).all(|dx| {
            (-1..=1).all(|dy| {
                let incident: Vec<Pos> = span(dx)
                    .flat_map(|i| span(dy).map(move |j| (x + i, y + j)))
                    .collect();
                let inside = incident.iter().filter(|&&c| t.contains(c)).count();
                inside == 0 || inside == incident.len() || incident.iter().any(|&c| s.contains(c))
            })
        })
    })
}

impl fmt::Display for GridRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::format_region(self))
    }
}

impl Serialize for GridRegion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GridRegion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::format::parse_region(&s, "region").map_err(serde::de::Error::custom)
    }
}
