use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Below this value of `|beta * omega|` the series branch of [`coth_half`] is used.
pub const COTH_SERIES_EPS: f64 = 1e-6;

/// Bose occupation is refused for `|beta * omega|` below this.
pub const BOSE_ZERO_EPS: f64 = 1e-8;

/// Particle statistics, stored as the sign `eta` in `1 / (exp(beta w) + eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl Statistics {
    pub fn eta(self) -> i8 {
        match self {
            Statistics::Fermion => 1,
            Statistics::Boson => -1,
        }
    }
}

impl TryFrom<i8> for Statistics {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Statistics::Fermion),
            -1 => Ok(Statistics::Boson),
            _ => Err(format!("eta must be +1 or -1, got {v}")),
        }
    }
}

impl From<Statistics> for i8 {
    fn from(s: Statistics) -> i8 {
        s.eta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams<T> {
    pub beta: T,
    pub eta: Statistics,
}

impl<T: Real> ThermalParams<T> {
    pub fn new(beta: T, eta: Statistics) -> Result<Self> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("must be positive and finite, got {beta}"),
            });
        }
        Ok(Self { beta, eta })
    }

    pub fn boson(beta: T) -> Result<Self> {
        Self::new(beta, Statistics::Boson)
    }

    pub fn fermion(beta: T) -> Result<Self> {
        Self::new(beta, Statistics::Fermion)
    }

    pub fn eta_value(&self) -> T {
        T::lit(self.eta.eta() as f64)
    }
}

/// `n(w) = 1 / (exp(beta w) + eta)`.
pub fn occupation<T: Real>(tp: &ThermalParams<T>, omega: T) -> Result<T> {
    let x = tp.beta * omega;
    match tp.eta {
        Statistics::Boson => {
            if x.abs() < T::lit(BOSE_ZERO_EPS) {
                return Err(Error::BoseZeroFrequency {
                    omega: omega.as_f64(),
                    beta: tp.beta.as_f64(),
                });
            }
            // exp_m1 keeps precision for small |x|
            Ok(T::one() / x.exp_m1())
        }
        Statistics::Fermion => {
            if x > T::zero() {
                let e = (-x).exp();
                Ok(e / (T::one() + e))
            } else {
                Ok(T::one() / (T::one() + x.exp()))
            }
        }
    }
}

/// `coth(beta * omega / 2)`.
///
/// Near the origin the Laurent series `2/(beta w) + beta w / 6` is used. The
/// pole itself has no finite value; at exactly `omega = 0` this returns 0, the
/// symmetric (odd-part) value. Products with spectral functions should go
/// through [`omega_coth_half`] or `bath::spectral_times_coth` instead.
pub fn coth_half<T: Real>(beta: T, omega: T) -> T {
    let x = beta * omega;
    if x == T::zero() {
        return T::zero();
    }
    if x.abs() < T::lit(COTH_SERIES_EPS) {
        return T::lit(2.0) / x + x / T::lit(6.0);
    }
    T::one() / (x * T::lit(0.5)).tanh()
}

/// `omega * coth(beta * omega / 2)`, continuous through `2 / beta` at the origin.
pub fn omega_coth_half<T: Real>(beta: T, omega: T) -> T {
    let x = beta * omega;
    if x.abs() < T::lit(COTH_SERIES_EPS) {
        return T::lit(2.0) / beta + x * omega / T::lit(6.0);
    }
    omega * coth_half(beta, omega)
}

/// Overwrite bin `z` with the fourth-order symmetric interpolation
/// `(4 avg(f[z±1]) - avg(f[z±2])) / 3` of its neighbours.
pub fn fill_zero_bin<T: Real>(f: &mut [Complex<T>], z: usize) {
    if z < 2 || z + 2 >= f.len() {
        return;
    }
    let half = T::lit(0.5);
    let a1 = (f[z - 1] + f[z + 1]) * half;
    let a2 = (f[z - 2] + f[z + 2]) * half;
    f[z] = (a1 * T::lit(4.0) - a2) / T::lit(3.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermi_at_zero_is_half() {
        let tp = ThermalParams::fermion(1.0).unwrap();
        assert_eq!(occupation(&tp, 0.0).unwrap(), 0.5);
        assert!(occupation(&tp, 800.0).unwrap() < 1e-300);
    }

    #[test]
    fn bose_value_and_pole() {
        let tp = ThermalParams::boson(1.0).unwrap();
        let expect = 1.0 / (std::f64::consts::E - 1.0);
        assert!((occupation(&tp, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(
            occupation(&tp, 1e-10),
            Err(Error::BoseZeroFrequency { .. })
        ));
    }

    #[test]
    fn coth_reference_and_parity() {
        // coth(1) to 20 digits
        assert!((coth_half(2.0f64, 1.0) - 1.313_035_285_499_331_3).abs() < 1e-14);
        for &w in &[0.3, 2.0, 1e-7, 17.0] {
            assert_eq!(coth_half(1.3, w), -coth_half(1.3, -w));
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let beta = 1.0;
        let edge = COTH_SERIES_EPS;
        let inside = omega_coth_half(beta, edge * (1.0 - 1e-9));
        let outside = omega_coth_half(beta, edge * (1.0 + 1e-9));
        assert!((inside - outside).abs() < 1e-10);
        assert_eq!(omega_coth_half(beta, 0.0), 2.0);
    }

    #[test]
    fn f32_works() {
        let tp = ThermalParams::<f32>::boson(2.0).unwrap();
        assert!((occupation(&tp, 1.0).unwrap() - 0.156_517_64).abs() < 1e-6);
    }
}
