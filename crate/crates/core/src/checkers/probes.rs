//! Deterministic probe families standing in for "for all regions" quantifiers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{BoundingBox, CellSet, GridRegion, Kind, Point, Pos};

/// Largest window (in cells) whose subsets are enumerated exhaustively.
pub const EXHAUSTIVE_CELLS: usize = 16;
/// Largest window whose three-label colourings are enumerated exhaustively.
pub const EXHAUSTIVE_LABEL_CELLS: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeFamily {
    pub window: BoundingBox,
    /// Level at which all cell subsets of the window are enumerated (when small enough).
    pub exhaustive_level: u32,
    pub random_count: usize,
    pub random_seed: u64,
    /// Steps of erosion/dilation refinement used by limit checks.
    pub refinement_depth: u32,
    /// Random probes use levels `exhaustive_level ..= exhaustive_level + random_levels`.
    #[serde(default = "default_random_levels")]
    pub random_levels: u32,
}

fn default_random_levels() -> u32 {
    1
}

/// A colouring of window cells into labels `0..=k` (0 = unused) with a label for everything
/// outside the window.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub level: u32,
    pub labels: Vec<(Pos, u8)>,
    pub background: u8,
}

impl Labeling {
    /// Cell set carrying `label`, cofinite when the background carries it.
    pub fn cells(&self, label: u8) -> CellSet {
        let pick = |keep: bool| {
            self.labels
                .iter()
                .filter(move |(_, l)| (*l == label) == keep)
                .map(|(c, _)| *c)
        };
        if self.background == label {
            CellSet::cofinite(self.level, pick(false))
        } else {
            CellSet::finite(self.level, pick(true))
        }
    }
}

impl ProbeFamily {
    pub fn new(window: BoundingBox, random_count: usize, seed: u64) -> Self {
        ProbeFamily {
            window,
            exhaustive_level: window.level,
            random_count,
            random_seed: seed,
            refinement_depth: 4,
            random_levels: 1,
        }
    }

    /// The 3×3 unit window `[0,3)²` with exhaustive subsets at level 0.
    pub fn unit3(random_count: usize, seed: u64) -> Self {
        ProbeFamily::new(BoundingBox::new(0, 0, 0, 3, 3), random_count, seed)
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.refinement_depth = depth;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.random_seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn window_cells(&self, level: u32) -> Vec<Pos> {
        self.window.cells_at(level).members().to_vec()
    }

    fn random_level(&self, rng: &mut ChaCha8Rng) -> u32 {
        let base = self.exhaustive_level.max(self.window.level);
        base + rng.gen_range(0..=self.random_levels)
    }

    fn random_subset(&self, rng: &mut ChaCha8Rng, level: u32) -> CellSet {
        let density: f64 = rng.gen_range(0.15..0.85);
        let cells = self.window_cells(level);
        CellSet::finite(level, cells.into_iter().filter(|_| rng.gen_bool(density)))
    }

    /// Every finite cell subset of the window at the exhaustive level (empty if too large).
    pub fn exhaustive_sets(&self) -> Vec<CellSet> {
        let level = self.exhaustive_level.max(self.window.level);
        let cells = self.window_cells(level);
        if cells.len() > EXHAUSTIVE_CELLS {
            return Vec::new();
        }
        (0u64..1 << cells.len())
            .map(|m| {
                let members = cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, &c)| c);
                CellSet::finite(level, members)
            })
            .collect()
    }

    /// Exhaustive regions (each subset as compact, bounded open, and both complements)
    /// followed by `random_count` random regions.
    pub fn regions(&self) -> Vec<GridRegion> {
        let mut out = Vec::new();
        for s in self.exhaustive_sets() {
            let k = GridRegion::closed(s.clone());
            let u = GridRegion::open(s);
            out.push(k.complement());
            out.push(u.complement());
            out.push(k);
            out.push(u);
        }
        let mut rng = self.rng(1);
        for _ in 0..self.random_count {
            let level = self.random_level(&mut rng);
            let s = self.random_subset(&mut rng, level);
            let kind = if rng.gen_bool(0.5) { Kind::Open } else { Kind::Closed };
            let r = GridRegion::new(s, kind);
            out.push(if rng.gen_bool(0.2) { r.complement() } else { r });
        }
        out
    }

    pub fn opens(&self) -> Vec<GridRegion> {
        self.regions().into_iter().filter(|r| r.is_open()).collect()
    }

    pub fn bounded_opens(&self) -> Vec<GridRegion> {
        self.regions().into_iter().filter(|r| r.is_open() && r.is_bounded()).collect()
    }

    pub fn compacts(&self) -> Vec<GridRegion> {
        self.regions().into_iter().filter(|r| r.is_compact()).collect()
    }

    /// Three-label colourings: all of them on small windows (with every background label),
    /// then random ones.
    pub fn labelings(&self) -> Vec<Labeling> {
        let mut out = Vec::new();
        let level = self.exhaustive_level.max(self.window.level);
        let cells = self.window_cells(level);
        if cells.len() <= EXHAUSTIVE_LABEL_CELLS {
            let total = 3usize.pow(cells.len() as u32);
            for background in 0..3u8 {
                for mut code in 0..total {
                    let labels = cells
                        .iter()
                        .map(|&c| {
                            let l = (code % 3) as u8;
                            code /= 3;
                            (c, l)
                        })
                        .collect();
                    out.push(Labeling { level, labels, background });
                }
            }
        }
        let mut rng = self.rng(2);
        for _ in 0..self.random_count {
            let level = self.random_level(&mut rng);
            let labels = self
                .window_cells(level)
                .into_iter()
                .map(|c| (c, rng.gen_range(0..3u8)))
                .collect();
            let background = if rng.gen_bool(0.25) { rng.gen_range(1..3u8) } else { 0 };
            out.push(Labeling { level, labels, background });
        }
        out
    }

    /// Random families of 2 to 4 mutually separated compacts.
    pub fn separated_families(&self) -> Vec<Vec<GridRegion>> {
        let mut rng = self.rng(3);
        let mut out = Vec::new();
        for _ in 0..self.random_count {
            let level = self.random_level(&mut rng);
            let k = rng.gen_range(2..=4usize);
            let mut cells = self.window_cells(level);
            cells.shuffle(&mut rng);
            let mut owner: std::collections::HashMap<Pos, usize> = Default::default();
            let density: f64 = rng.gen_range(0.2..0.7);
            for c in cells {
                if !rng.gen_bool(density) {
                    continue;
                }
                let b = rng.gen_range(0..k);
                let clash = crate::grid::N8
                    .iter()
                    .any(|(dx, dy)| owner.get(&(c.0 + dx, c.1 + dy)).is_some_and(|&o| o != b));
                if !clash {
                    owner.insert(c, b);
                }
            }
            let fam: Vec<GridRegion> = (0..k)
                .map(|b| {
                    GridRegion::closed(CellSet::finite(
                        level,
                        owner.iter().filter(|(_, &o)| o == b).map(|(&c, _)| c),
                    ))
                })
                .collect();
            out.push(fam);
        }
        out
    }

    /// Random open axis-aligned rectangles in the window at level 0 and 1.
    pub fn rectangles(&self) -> Vec<GridRegion> {
        let mut rng = self.rng(4);
        let mut out = Vec::new();
        for _ in 0..self.random_count {
            let level = self.random_level(&mut rng);
            let w = self.window.at_level(level);
            let x0 = rng.gen_range(w.x0..w.x1);
            let x1 = rng.gen_range(x0 + 1..=w.x1);
            let y0 = rng.gen_range(w.y0..w.y1);
            let y1 = rng.gen_range(y0 + 1..=w.y1);
            out.push(GridRegion::open(CellSet::block(level, x0, y0, x1, y1)));
        }
        out
    }

    /// Compacts `K ⊆ u` used for `u = K ⊔ (u ∖ K)` probes: random subsets of refined
    /// erosions, and square rings around each atom.
    pub fn inner_compacts(&self, u: &GridRegion, atoms: &[Point], rng_stream: u64) -> Vec<GridRegion> {
        let mut rng = self.rng(5 ^ rng_stream);
        let mut out = Vec::new();
        for extra in 0..=self.random_levels + 2 {
            let level = u.level() + extra;
            let core = u.cells().refine_to(level).erode8().intersection(&self.window.cells_at(level));
            let core_cells = core.members();
            if core_cells.is_empty() {
                continue;
            }
            for _ in 0..2 {
                let density: f64 = rng.gen_range(0.2..0.9);
                let pick = core_cells.iter().copied().filter(|_| rng.gen_bool(density));
                out.push(GridRegion::closed(CellSet::finite(level, pick)));
            }
            for p in atoms {
                let (cx, cy) = p.cell_at(level);
                for r in 1..=2i64 {
                    let ring: Vec<Pos> = (cx - r..=cx + r)
                        .flat_map(|x| (cy - r..=cy + r).map(move |y| (x, y)))
                        .filter(|&(x, y)| (x - cx).abs() == r || (y - cy).abs() == r)
                        .collect();
                    if ring.iter().all(|&c| core.contains(c)) {
                        out.push(GridRegion::closed(CellSet::finite(level, ring)));
                    }
                }
            }
        }
        out
    }
}
