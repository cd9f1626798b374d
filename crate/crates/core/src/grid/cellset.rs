use std::cmp::Ordering;

use serde::Serialize;

/// Lattice position of a cell at a fixed dyadic level.
pub type Pos = (i64, i64);

/// A cell: the closed square `[x, x+1] × [y, y+1]` scaled by `2^(-level)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
    pub level: u32,
}

impl Cell {
    pub fn new(x: i64, y: i64, level: u32) -> Self {
        Cell { x, y, level }
    }

    pub fn children(&self) -> [Cell; 4] {
        let (x, y, l) = (2 * self.x, 2 * self.y, self.level + 1);
        [
            Cell::new(x, y, l),
            Cell::new(x, y + 1, l),
            Cell::new(x + 1, y, l),
            Cell::new(x + 1, y + 1, l),
        ]
    }

    pub fn parent(&self) -> Option<Cell> {
        (self.level > 0).then(|| Cell::new(self.x.div_euclid(2), self.y.div_euclid(2), self.level - 1))
    }
}

pub(crate) const N4: [Pos; 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
pub(crate) const N8: [Pos; 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// A finite or cofinite set of same-level cells.
///
/// `members` is sorted lexicographically and duplicate free. When `cofinite` is set the
/// represented set is every level-`level` cell *except* the members.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellSet {
    level: u32,
    members: Vec<Pos>,
    cofinite: bool,
}

fn sorted(mut v: Vec<Pos>) -> Vec<Pos> {
    v.sort_unstable();
    v.dedup();
    v
}

fn merge_union(a: &[Pos], b: &[Pos]) -> Vec<Pos> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_intersection(a: &[Pos], b: &[Pos]) -> Vec<Pos> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn merge_difference(a: &[Pos], b: &[Pos]) -> Vec<Pos> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &p in a {
        while j < b.len() && b[j] < p {
            j += 1;
        }
        if j >= b.len() || b[j] != p {
            out.push(p);
        }
    }
    out
}

fn sorted_subset(a: &[Pos], b: &[Pos]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &p in a {
        while j < b.len() && b[j] < p {
            j += 1;
        }
        if j >= b.len() || b[j] != p {
            return false;
        }
        j += 1;
    }
    true
}

fn sorted_disjoint(a: &[Pos], b: &[Pos]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => return false,
        }
    }
    true
}

fn dilate_members(m: &[Pos], offsets: &[Pos]) -> Vec<Pos> {
    let mut out = Vec::with_capacity(m.len() * (offsets.len() + 1));
    for &(x, y) in m {
        out.push((x, y));
        for &(dx, dy) in offsets {
            out.push((x + dx, y + dy));
        }
    }
    sorted(out)
}

fn erode_members(m: &[Pos], offsets: &[Pos]) -> Vec<Pos> {
    m.iter()
        .copied()
        .filter(|&(x, y)| {
            offsets
                .iter()
                .all(|&(dx, dy)| m.binary_search(&(x + dx, y + dy)).is_ok())
        })
        .collect()
}

impl CellSet {
    pub fn empty(level: u32) -> Self {
        CellSet {
            level,
            members: Vec::new(),
            cofinite: false,
        }
    }

    pub fn all(level: u32) -> Self {
        CellSet {
            level,
            members: Vec::new(),
            cofinite: true,
        }
    }

    /// Finite set from arbitrary positions (duplicates collapse).
    pub fn finite(level: u32, members: impl IntoIterator<Item = Pos>) -> Self {
        CellSet {
            level,
            members: sorted(members.into_iter().collect()),
            cofinite: false,
        }
    }

    /// All cells except the given ones.
    pub fn cofinite(level: u32, excluded: impl IntoIterator<Item = Pos>) -> Self {
        CellSet {
            level,
            members: sorted(excluded.into_iter().collect()),
            cofinite: true,
        }
    }

    pub(crate) fn from_sorted(level: u32, members: Vec<Pos>, cofinite: bool) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        CellSet {
            level,
            members,
            cofinite,
        }
    }

    /// Axis-aligned block of cells `[x0, x1) × [y0, y1)`.
    pub fn block(level: u32, x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        let mut v = Vec::new();
        for x in x0..x1 {
            for y in y0..y1 {
                v.push((x, y));
            }
        }
        CellSet::from_sorted(level, v, false)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The listed cells: the set itself when finite, the excluded cells when cofinite.
    pub fn members(&self) -> &[Pos] {
        &self.members
    }

    pub fn is_cofinite(&self) -> bool {
        self.cofinite
    }

    pub fn is_finite(&self) -> bool {
        !self.cofinite
    }

    pub fn is_empty(&self) -> bool {
        !self.cofinite && self.members.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.cofinite && self.members.is_empty()
    }

    /// Number of cells of a finite set. `None` for cofinite sets.
    pub fn len(&self) -> Option<usize> {
        (!self.cofinite).then_some(self.members.len())
    }

    pub fn contains(&self, p: Pos) -> bool {
        self.members.binary_search(&p).is_ok() != self.cofinite
    }

    pub fn complement(&self) -> Self {
        CellSet {
            level: self.level,
            members: self.members.clone(),
            cofinite: !self.cofinite,
        }
    }

    /// Replace every cell by its four children, `steps` times.
    pub fn refine(&self, steps: u32) -> Self {
        if steps == 0 {
            return self.clone();
        }
        let k = 1i64 << steps;
        let mut v = Vec::with_capacity(self.members.len() * (k * k) as usize);
        for &(x, y) in &self.members {
            for dx in 0..k {
                for dy in 0..k {
                    v.push((x * k + dx, y * k + dy));
                }
            }
        }
        v.sort_unstable();
        CellSet::from_sorted(self.level + steps, v, self.cofinite)
    }

    pub fn refine_to(&self, level: u32) -> Self {
        assert!(level >= self.level, "cannot refine to a coarser level");
        self.refine(level - self.level)
    }

    /// Coarsen as far as the point set allows; two sets denote the same cells iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> Self {
        let mut cur = self.clone();
        while cur.level > 0 {
            match cur.coarsen_once() {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur
    }

    fn coarsen_once(&self) -> Option<Self> {
        let mut parents: Vec<Pos> = Vec::with_capacity(self.members.len() / 4 + 1);
        let mut counts: Vec<u8> = Vec::new();
        let mut ps: Vec<Pos> = self
            .members
            .iter()
            .map(|&(x, y)| (x.div_euclid(2), y.div_euclid(2)))
            .collect();
        ps.sort_unstable();
        for p in ps {
            if parents.last() == Some(&p) {
                *counts.last_mut().unwrap() += 1;
            } else {
                parents.push(p);
                counts.push(1);
            }
        }
        if counts.iter().all(|&c| c == 4) {
            Some(CellSet::from_sorted(self.level - 1, parents, self.cofinite))
        } else {
            None
        }
    }

    /// Bring two sets to their common (finer) level.
    pub fn align(a: &CellSet, b: &CellSet) -> (CellSet, CellSet) {
        let l = a.level.max(b.level);
        (a.refine_to(l), b.refine_to(l))
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let (a, b) = CellSet::align(self, other);
        let (m, cof) = match (a.cofinite, b.cofinite) {
            (false, false) => (merge_union(&a.members, &b.members), false),
            (false, true) => (merge_difference(&b.members, &a.members), true),
            (true, false) => (merge_difference(&a.members, &b.members), true),
            (true, true) => (merge_intersection(&a.members, &b.members), true),
        };
        CellSet::from_sorted(a.level, m, cof)
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let (a, b) = CellSet::align(self, other);
        let (m, cof) = match (a.cofinite, b.cofinite) {
            (false, false) => (merge_intersection(&a.members, &b.members), false),
            (false, true) => (merge_difference(&a.members, &b.members), false),
            (true, false) => (merge_difference(&b.members, &a.members), false),
            (true, true) => (merge_union(&a.members, &b.members), true),
        };
        CellSet::from_sorted(a.level, m, cof)
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        let (a, b) = CellSet::align(self, other);
        match (a.cofinite, b.cofinite) {
            (false, false) => sorted_subset(&a.members, &b.members),
            (false, true) => sorted_disjoint(&a.members, &b.members),
            (true, false) => false,
            (true, true) => sorted_subset(&b.members, &a.members),
        }
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// `S ∪` all 8-neighbours of `S`.
    pub fn dilate8(&self) -> CellSet {
        self.dilate_with(&N8)
    }

    /// `{c : N₈[c] ⊆ T}`.
    pub fn erode8(&self) -> CellSet {
        self.erode_with(&N8)
    }

    pub fn dilate4(&self) -> CellSet {
        self.dilate_with(&N4)
    }

    fn dilate_with(&self, offsets: &[Pos]) -> CellSet {
        if self.cofinite {
            // complement of dilate(S) is erode(complement S)
            CellSet::from_sorted(self.level, erode_members(&self.members, offsets), true)
        } else {
            CellSet::from_sorted(self.level, dilate_members(&self.members, offsets), false)
        }
    }

    fn erode_with(&self, offsets: &[Pos]) -> CellSet {
        if self.cofinite {
            CellSet::from_sorted(self.level, dilate_members(&self.members, offsets), true)
        } else {
            CellSet::from_sorted(self.level, erode_members(&self.members, offsets), false)
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        assert!(!self.cofinite, "cannot enumerate a cofinite cell set");
        self.members.iter().map(move |&(x, y)| Cell::new(x, y, self.level))
    }

    /// Bounding box `(xmin, ymin, xmax, ymax)` of the listed members (inclusive).
    pub fn bbox(&self) -> Option<(i64, i64, i64, i64)> {
        bbox_of(&self.members)
    }
}

pub(crate) fn bbox_of(cells: &[Pos]) -> Option<(i64, i64, i64, i64)> {
    let first = cells.first()?;
    let mut b = (first.0, first.1, first.0, first.1);
    for &(x, y) in cells {
        b.0 = b.0.min(x);
        b.1 = b.1.min(y);
        b.2 = b.2.max(x);
        b.3 = b.3.max(y);
    }
    Some(b)
}
