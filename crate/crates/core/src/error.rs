use thiserror::Error;

use crate::grid::GridRegion;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("infinite values of opposite sign cannot be combined")]
    InfConflict,
    #[error("point {0} lies on a dyadic grid line")]
    DyadicPoint(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("union exists as a point set but is neither open nor closed")]
    Reject,
    #[error("cover violation: point ({x}, {y}) of the compact lies outside both open sets")]
    CoverViolation { x: String, y: String },
    #[error("no assignment found after {depth} refinement steps")]
    AssignmentDepthExceeded { depth: u32 },
    #[error("search space of {cells} cells exceeds the enumeration bound of {budget}")]
    SearchBudgetExceeded { cells: usize, budget: usize },
    #[error("extension produced {value} outside [0, {total}] on {region}")]
    NegativeValue {
        region: GridRegion,
        value: String,
        total: String,
    },
    #[error("set function has infinite total mass")]
    InfiniteTotal,
    #[error("variation values did not stabilize on {0}")]
    VariationUnstable(GridRegion),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
