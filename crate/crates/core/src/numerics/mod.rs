//! Grids, thermal factors, principal-value quadrature and Fourier transforms.

pub mod grid;
pub mod pv;
pub mod thermal;
pub mod transform;

pub use grid::{FrequencyGrid, TimeGrid};
pub use pv::principal_value_integral;
pub use thermal::{coth_half, occupation, omega_coth_half, Statistics, ThermalParams};
pub use transform::{ComplexSignal, Domain};
