//! Steady-state Keldysh Green's functions of a bosonic mode in a thermal bath.
//!
//! The numerical core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the solvers are tuned for.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod error;
pub mod keldysh;
pub mod nca;
pub mod numerics;
pub mod scalar;
pub mod weakcorr;

pub use error::{Error, Result};
pub use scalar::Real;

pub type FrequencyGrid64 = numerics::FrequencyGrid<f64>;
pub type TimeGrid64 = numerics::TimeGrid<f64>;
pub type ThermalParams64 = numerics::ThermalParams<f64>;
pub type ComplexSignal64 = numerics::ComplexSignal<f64>;
pub type SpectralDensity64 = bath::SpectralDensity<f64>;
pub type BathPropagator64 = bath::BathPropagator<f64>;
pub type KeldyshGF64 = keldysh::KeldyshGF<f64>;
pub type SelfEnergy64 = keldysh::SelfEnergy<f64>;
pub type SpectralFunction64 = keldysh::SpectralFunction<f64>;
pub type ModelConfig64 = nca::ModelConfig<f64>;
pub type SolverConfig64 = nca::SolverConfig<f64>;
pub type LinearModeModel64 = weakcorr::LinearModeModel<f64>;
pub type SpinBosonModel64 = weakcorr::SpinBosonModel<f64>;
pub type CorrelatorResult64 = weakcorr::CorrelatorResult<f64>;

pub type FrequencyGrid32 = numerics::FrequencyGrid<f32>;
pub type KeldyshGF32 = keldysh::KeldyshGF<f32>;
pub type ModelConfig32 = nca::ModelConfig<f32>;
