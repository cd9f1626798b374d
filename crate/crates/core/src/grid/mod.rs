//! Exact algebra of open and closed grid regions of the plane.

mod cellset;
mod connectivity;
mod format;
mod lemmas;
mod region;

pub use cellset::{Cell, CellSet, Pos};
pub use connectivity::{
    bounded_holes, components, is_connected, is_solid, solid_hull, Component, ComponentList,
};
pub use format::{format_region, parse_region, parse_regions};
pub use lemmas::{halmos_split, interpolate, uncovered_point, DEFAULT_SPLIT_DEPTH};
pub use region::{GridRegion, Kind, Point};

pub(crate) use connectivity::label_finite;
pub(crate) use cellset::N8;

/// Axis-aligned window of cells `[x0, x1) × [y0, y1)` at a fixed level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BoundingBox {
    pub level: u32,
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl BoundingBox {
    pub fn new(level: u32, x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        BoundingBox { level, x0, y0, x1, y1 }
    }

    pub fn cells(&self) -> CellSet {
        CellSet::block(self.level, self.x0, self.y0, self.x1, self.y1)
    }

    /// The window's cells at a (finer or equal) level.
    pub fn cells_at(&self, level: u32) -> CellSet {
        let l = level.max(self.level);
        let k = 1i64 << (l - self.level);
        CellSet::block(l, self.x0 * k, self.y0 * k, self.x1 * k, self.y1 * k)
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    /// Smallest window (at the coarser of the two levels' finer level) containing both.
    pub fn hull(&self, other: &BoundingBox) -> BoundingBox {
        let l = self.level.max(other.level);
        let a = self.at_level(l);
        let b = other.at_level(l);
        BoundingBox::new(l, a.x0.min(b.x0), a.y0.min(b.y0), a.x1.max(b.x1), a.y1.max(b.y1))
    }

    pub fn at_level(&self, level: u32) -> BoundingBox {
        assert!(level >= self.level);
        let k = 1i64 << (level - self.level);
        BoundingBox::new(level, self.x0 * k, self.y0 * k, self.x1 * k, self.y1 * k)
    }
}
