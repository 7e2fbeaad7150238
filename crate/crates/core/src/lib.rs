//! Concentration of measure for weakly dependent discrete random variables.
//!
//! Difference operators, tensor norms, log-Sobolev machinery, Gibbs models,
//! multilevel tail bounds and exact or Monte Carlo verification of those
//! bounds. Numeric code is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

pub mod bounds;
pub mod diffops;
pub mod error;
pub mod funcs;
pub mod lsi;
pub mod models;
pub mod scalar;
pub mod space;
pub mod tensors;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;
pub use space::DEFAULT_CAP;
pub use tensors::{OpNormOptions, Partition};

pub type ProductSpace = space::ProductSpace<f64>;
pub type Measure = space::Measure<f64>;
pub type ExactLaw = space::ExactLaw<f64>;
pub type FunctionSpec = funcs::FunctionSpec<f64>;
pub type DenseTensor = tensors::DenseTensor<f64>;
pub type IsingSpec = models::IsingSpec<f64>;
pub type ErgmSpec = models::ErgmSpec<f64>;

pub type MeasureF32 = space::Measure<f32>;
pub type DenseTensorF32 = tensors::DenseTensor<f32>;
