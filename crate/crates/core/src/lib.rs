//! Numerical workbench for biquaternionic electrodynamics.
//!
//! * [`algebra`]: biquaternion arithmetic, involutions, Lorentz transformers
//! * [`calculus`]: the quaternionic derivative, Fueter regularity, and
//!   Cauchy-Fueter reconstruction
//! * [`maxwell`]: potentials, field strengths, and Maxwell residuals
//! * [`worldline`]: retarded fields of point charges and the constant
//!   retarded-distance tube
//! * [`action`]: the field Lagrangian, its bilinear decomposition, and the
//!   tube-evaluated kinetic and interaction terms

pub mod action;
pub mod algebra;
pub mod calculus;
pub mod error;
pub mod maxwell;
pub mod quadrature;
pub mod worldline;

pub use algebra::{
    make_transformer, minkowski_interval, multiply, transform, Biquaternion, FourEvent, Involution,
    ReversalVariant, TransformKind, UnitTransformer,
};
pub use error::{Error, Result};
