//! Connected components of grid regions.
//!
//! Closed regions connect through shared corners (8-connectivity of cells); open regions
//! only through shared edges (4-connectivity).

use super::cellset::{bbox_of, CellSet, Pos, N4, N8};
use super::region::{GridRegion, Kind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub region: GridRegion,
    pub bounded: bool,
}

pub type ComponentList = Vec<Component>;

fn offsets(kind: Kind) -> &'static [Pos] {
    match kind {
        Kind::Closed => &N8,
        Kind::Open => &N4,
    }
}

/// Dense occupancy grid over an inclusive bounding box.
struct Grid {
    x0: i64,
    y0: i64,
    w: i64,
    h: i64,
    cells: Vec<i32>,
}

impl Grid {
    fn new(b: (i64, i64, i64, i64)) -> Self {
        let w = b.2 - b.0 + 1;
        let h = b.3 - b.1 + 1;
        Grid {
            x0: b.0,
            y0: b.1,
            w,
            h,
            cells: vec![0; (w * h) as usize],
        }
    }

    fn idx(&self, (x, y): Pos) -> Option<usize> {
        let (i, j) = (x - self.x0, y - self.y0);
        (i >= 0 && j >= 0 && i < self.w && j < self.h).then(|| (i * self.h + j) as usize)
    }

    fn pos(&self, k: usize) -> Pos {
        let k = k as i64;
        (self.x0 + k / self.h, self.y0 + k % self.h)
    }
}

/// Label the connected components of a finite cell list. Components come out ordered by
/// their lexicographically smallest cell, each sorted.
pub(crate) fn label_finite(cells: &[Pos], conn: &[Pos]) -> Vec<Vec<Pos>> {
    let Some(b) = bbox_of(cells) else {
        return Vec::new();
    };
    let mut g = Grid::new(b);
    for &c in cells {
        let i = g.idx(c).unwrap();
        g.cells[i] = -1;
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for &start in cells {
        let si = g.idx(start).unwrap();
        if g.cells[si] != -1 {
            continue;
        }
        let label = out.len() as i32 + 1;
        g.cells[si] = label;
        stack.push(si);
        let mut comp = Vec::new();
        while let Some(k) = stack.pop() {
            let (x, y) = g.pos(k);
            comp.push((x, y));
            for &(dx, dy) in conn {
                if let Some(n) = g.idx((x + dx, y + dy)) {
                    if g.cells[n] == -1 {
                        g.cells[n] = label;
                        stack.push(n);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Components of a cofinite cell set `all ∖ excluded`: the bounded pieces (finite cell
/// lists) and whether an unbounded piece exists (always, for a cofinite set).
///
/// Works in the box two cells larger than the excluded cells; every cell on the box border
/// belongs to the single unbounded component.
fn label_cofinite(excluded: &[Pos], conn: &[Pos]) -> Vec<Vec<Pos>> {
    let Some(b) = bbox_of(excluded) else {
        return Vec::new();
    };
    let b = (b.0 - 2, b.1 - 2, b.2 + 2, b.3 + 2);
    let mut g = Grid::new(b);
    for &c in excluded {
        let i = g.idx(c).unwrap();
        g.cells[i] = -2;
    }
    // flood the outside from the border
    let mut stack = Vec::new();
    for k in 0..g.cells.len() {
        let (x, y) = g.pos(k);
        let border = x == b.0 || x == b.2 || y == b.1 || y == b.3;
        if border && g.cells[k] == 0 {
            g.cells[k] = 1;
            stack.push(k);
        }
    }
    while let Some(k) = stack.pop() {
        let (x, y) = g.pos(k);
        for &(dx, dy) in conn {
            if let Some(n) = g.idx((x + dx, y + dy)) {
                if g.cells[n] == 0 {
                    g.cells[n] = 1;
                    stack.push(n);
                }
            }
        }
    }
    let inner: Vec<Pos> = (0..g.cells.len())
        .filter(|&k| g.cells[k] == 0)
        .map(|k| g.pos(k))
        .collect();
    label_finite(&inner, conn)
}

/// Connected components of the point set of `r`.
pub fn components(r: &GridRegion) -> ComponentList {
    let cells = r.cells();
    let level = cells.level();
    let conn = offsets(r.kind());
    if cells.is_finite() {
        return label_finite(cells.members(), conn)
            .into_iter()
            .map(|c| Component {
                region: GridRegion::new(CellSet::from_sorted(level, c, false), r.kind()),
                bounded: true,
            })
            .collect();
    }
    let bounded = label_cofinite(cells.members(), conn);
    let mut excluded: Vec<Pos> = cells.members().to_vec();
    for c in &bounded {
        excluded.extend_from_slice(c);
    }
    let mut out = vec![Component {
        region: GridRegion::new(CellSet::cofinite(level, excluded), r.kind()),
        bounded: false,
    }];
    out.extend(bounded.into_iter().map(|c| Component {
        region: GridRegion::new(CellSet::from_sorted(level, c, false), r.kind()),
        bounded: true,
    }));
    out
}

pub fn is_connected(r: &GridRegion) -> bool {
    components(r).len() == 1
}

/// The bounded connected components of the complement of a bounded region.
pub fn bounded_holes(r: &GridRegion) -> Vec<GridRegion> {
    if !r.is_bounded() {
        return Vec::new();
    }
    let comp = r.complement();
    let conn = offsets(comp.kind());
    label_cofinite(comp.cells().members(), conn)
        .into_iter()
        .map(|c| GridRegion::new(CellSet::from_sorted(r.level(), c, false), comp.kind()))
        .collect()
}

fn check_solid_domain(r: &GridRegion) -> Result<()> {
    if r.is_bounded() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "solidity is only defined here for compact or bounded open regions".into(),
        ))
    }
}

/// Connected, with only unbounded complement components. The empty region is not solid.
pub fn is_solid(r: &GridRegion) -> Result<bool> {
    check_solid_domain(r)?;
    Ok(!r.is_empty() && is_connected(r) && bounded_holes(r).is_empty())
}

/// The region together with all bounded complement components.
///
/// Accepts compact connected regions and bounded open connected regions; the result has
/// the same kind and is solid.
pub fn solid_hull(c: &GridRegion) -> Result<GridRegion> {
    check_solid_domain(c)?;
    if !is_connected(c) {
        return Err(Error::Precondition("solid_hull needs a connected region".into()));
    }
    let mut cells = c.cells().clone();
    for h in bounded_holes(c) {
        cells = cells.union(h.cells());
    }
    Ok(GridRegion::new(cells, c.kind()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(cells: &[Pos]) -> GridRegion {
        GridRegion::closed(CellSet::finite(0, cells.iter().copied()))
    }

    fn ring() -> GridRegion {
        GridRegion::closed(CellSet::block(0, 0, 0, 3, 3).difference(&CellSet::finite(0, [(1, 1)])))
    }

    #[test]
    fn diagonal_cells() {
        assert_eq!(components(&closed(&[(0, 0), (1, 1)])).len(), 1);
        let open = closed(&[(0, 0), (1, 1)]).interior();
        assert_eq!(components(&open).len(), 2);
        assert!(components(&GridRegion::empty()).is_empty());
    }

    #[test]
    fn ring_is_not_solid_but_its_hull_is() {
        assert!(is_solid(&closed(&[(0, 0)])).unwrap());
        assert!(!is_solid(&ring()).unwrap());
        let hull = solid_hull(&ring()).unwrap();
        assert_eq!(hull, closed(&CellSet::block(0, 0, 0, 3, 3).members().to_vec()));
        assert!(is_solid(&hull).unwrap());
    }

    #[test]
    fn cofinite_components() {
        // complement of the ring: one unbounded open piece plus the open centre
        let comps = components(&ring().complement());
        assert_eq!(comps.len(), 2);
        assert!(!comps[0].bounded);
        assert!(comps[1].bounded);
        assert_eq!(comps[1].region, closed(&[(1, 1)]).interior());
    }

    #[test]
    fn solidity_precondition() {
        assert!(is_solid(&GridRegion::whole()).is_err());
    }
}
