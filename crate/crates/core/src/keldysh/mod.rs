//! Keldysh component algebra: the ∘ product, Dyson inversion, spectral
//! representation and the fluctuation-dissipation check.

pub mod circ;
pub mod dyson;
pub mod fdr;
pub mod gf;
pub mod linear;

pub use circ::{circ_frequency, circ_multi, circ_two};
pub use dyson::dyson;
pub use fdr::{fdr_check, FdrReport, GridInfo};
pub use gf::{free_mode, free_mode_time, KeldyshGF, SelfEnergy, SpectralFunction};
pub use linear::{linear_self_energy, DEFAULT_WIDTH};
