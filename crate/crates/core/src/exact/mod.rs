//! Exact rational and polynomial arithmetic, coefficient-sum bounds, and
//! bisection-based enclosures.

mod enclosure;
mod poly;
pub mod rational;

pub use enclosure::{integral_abs_split, isolate_level_crossing, Enclosure};
pub use poly::Polynomial;
pub use rational::Rational;
