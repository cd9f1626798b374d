//! Set functions on grid regions and the gallery of concrete examples.

mod gallery;
mod norms;
mod set_function;

pub use gallery::{
    component_majority, linear_combination, maj3, point_mass, scaled, unbounded_area, windowed_area, zero,
    ComponentMajority, LinearCombination, NaiveMajority, PointMass, UnboundedArea, WindowedArea, Zero,
};
pub use norms::{norms, NormPair};
pub use set_function::{monotone_decomposition, Class, Fun, InfinitySign, Meta, SetFunction};
