//! Numerical toolkit for fractional Hessians, fractional Pucci operators,
//! Riesz potentials and inf-convolutions, together with an explicit radial
//! family on which the ABP estimate at the critical exponent breaks down.
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases
//! at the crate root fix it to `f64`.

pub mod counterexample;
pub mod error;
pub mod fields;
pub mod matrixcore;
pub mod nonlocal;
pub mod quad;
pub mod real;
pub mod special;

pub use error::{Error, Result};
pub use real::Real;

pub type SymMatrix64 = matrixcore::SymMatrix<f64>;
pub type KernelParams64 = special::KernelParams<f64>;
pub type Constants64 = special::Constants<f64>;
pub type QuadratureSpec64 = quad::QuadratureSpec<f64>;
pub type Estimate64 = quad::Estimate<f64>;
pub type MatrixEstimate64 = quad::MatrixEstimate<f64>;
pub type InfConvParams64 = fields::InfConvParams<f64>;
pub type SplineProfile64 = fields::SplineProfile<f64>;
pub type CounterexampleParams64 = counterexample::CounterexampleParams<f64>;
