//! Constructive versions of the compact splitting lemma and the interpolation lemma.

use super::cellset::{CellSet, Pos};
use super::region::{GridRegion, Point};
use crate::error::{Error, Result};
use crate::value::Rational;

pub const DEFAULT_SPLIT_DEPTH: u32 = 12;

/// Closed faces of a cell at a fixed level: the open cell, its four open edges, its four
/// vertices. Each face is described by the cells incident to every point of it.
fn faces(c: Pos) -> [(Vec<Pos>, (Rational, Rational)); 9] {
    let (x, y) = c;
    let h = Rational::new(1, 2);
    let xr = Rational::from_integer(x);
    let yr = Rational::from_integer(y);
    let one = Rational::from_integer(1);
    [
        (vec![(x, y)], (xr + h, yr + h)),
        (vec![(x, y), (x - 1, y)], (xr, yr + h)),
        (vec![(x, y), (x + 1, y)], (xr + one, yr + h)),
        (vec![(x, y), (x, y - 1)], (xr + h, yr)),
        (vec![(x, y), (x, y + 1)], (xr + h, yr + one)),
        (vec![(x, y), (x - 1, y), (x, y - 1), (x - 1, y - 1)], (xr, yr)),
        (vec![(x, y), (x + 1, y), (x, y - 1), (x + 1, y - 1)], (xr + one, yr)),
        (vec![(x, y), (x - 1, y), (x, y + 1), (x - 1, y + 1)], (xr, yr + one)),
        (vec![(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)], (xr + one, yr + one)),
    ]
}

/// Split a compact `c ⊆ u ∪ v` into compacts `K ⊆ u`, `D ⊆ v` with `K ∪ D = c`.
///
/// The cover is decided exactly on the faces of `c` at the common level; refinement then
/// assigns every fine cell whose closed 3×3 neighbourhood lies in `u` to `K` and the rest
/// (neighbourhood in `v`) to `D`.
pub fn halmos_split(
    c: &GridRegion,
    u: &GridRegion,
    v: &GridRegion,
    max_depth: u32,
) -> Result<(GridRegion, GridRegion)> {
    if !c.is_compact() || !u.is_open() || !v.is_open() {
        return Err(Error::Precondition(
            "halmos_split needs a compact and two open regions".into(),
        ));
    }
    let level = c.level().max(u.level()).max(v.level());
    let s = c.cells().refine_to(level);
    let tu = u.cells().refine_to(level);
    let tv = v.cells().refine_to(level);
    let scale = Rational::from_integer(1i64 << level);
    for &cell in s.members() {
        for (incident, (px, py)) in faces(cell) {
            let in_u = incident.iter().all(|&p| tu.contains(p));
            let in_v = incident.iter().all(|&p| tv.contains(p));
            if !in_u && !in_v {
                return Err(Error::CoverViolation {
                    x: crate::value::format_rational(&(px / scale)),
                    y: crate::value::format_rational(&(py / scale)),
                });
            }
        }
    }
    for m in 0..=max_depth {
        let fine = s.refine(m);
        let fu = tu.refine(m);
        let fv = tv.refine(m);
        let mut k = Vec::new();
        let mut d = Vec::new();
        let mut ok = true;
        for &cell in fine.members() {
            let nb = CellSet::finite(level + m, [cell]).dilate8();
            if nb.is_subset(&fu) {
                k.push(cell);
            } else if nb.is_subset(&fv) {
                d.push(cell);
            } else {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((
                GridRegion::closed(CellSet::finite(level + m, k)),
                GridRegion::closed(CellSet::finite(level + m, d)),
            ));
        }
    }
    Err(Error::AssignmentDepthExceeded { depth: max_depth })
}

/// Bounded open `V` with `k ⊆ V ⊆ closure(V) ⊆ u`, built one level finer as the interior
/// of the dilated children of `k`.
pub fn interpolate(k: &GridRegion, u: &GridRegion) -> Result<GridRegion> {
    if !k.is_compact() || !u.is_open() || !k.is_subset(u) {
        return Err(Error::Precondition(
            "interpolate needs a compact subset of an open region".into(),
        ));
    }
    let level = k.level().max(u.level());
    let children = k.cells().refine_to(level + 1);
    Ok(GridRegion::open(children.dilate8()))
}

/// Some point of `c` outside `u ∪ v`, if any (exact, by face enumeration).
pub fn uncovered_point(c: &GridRegion, u: &GridRegion, v: &GridRegion) -> Option<Point> {
    match halmos_split(c, u, v, 0) {
        Err(Error::CoverViolation { x, y }) => Some(Point::new(
            crate::value::parse_rational(&x).ok()?,
            crate::value::parse_rational(&y).ok()?,
        )),
        _ => None,
    }
}
