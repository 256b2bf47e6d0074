pub mod curve;
pub mod document;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod model;
pub mod omega;
pub mod verify;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use exact::{Enclosure, Polynomial, Rational};
pub use model::{build_model, CurveModel, Schedule, ShapeNode, Side, Word};
pub use omega::OmegaSpec;
