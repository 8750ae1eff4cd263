use thiserror::Error;

use crate::nca::SolveTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bose occupation is singular at omega = {omega} (beta = {beta})")]
    BoseZeroFrequency { omega: f64, beta: f64 },

    #[error("omega = {omega} lies within one grid spacing of the grid edge (omega_max = {omega_max})")]
    OutOfRange { omega: f64, omega_max: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("retarded and advanced components are not Hermitian partners (max |Im rho| = {max_imag:e})")]
    NonHermitianPair { max_imag: f64 },

    #[error("singular propagator at omega = {omega} (|G^-1| = {magnitude:e})")]
    SingularPropagator { omega: f64, magnitude: f64 },

    #[error("fixed point not reached after {} iterations", .0.iterations)]
    NotConverged(Box<SolveTrace>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid spectral density: {0}")]
    InvalidSpectralDensity(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
