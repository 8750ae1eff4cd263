use num_complex::Complex;

use crate::bath::{BathPropagator, SpectralDensity};
use crate::error::Result;
use crate::keldysh::gf::SelfEnergy;
use crate::numerics::{FrequencyGrid, ThermalParams};
use crate::scalar::Real;

/// Width constant that reproduces the `(J/2)²` Lorentzian denominator.
pub const DEFAULT_WIDTH: f64 = 0.5;

/// Self-energy of linear coupling to the bath.
///
/// `Σ_R = c (Σ(ω) - iJ(ω))`, `Σ_A = conj(Σ_R)`, `Σ_K = -2ic J(ω) coth(βω/2)`,
/// i.e. `2c` times the bath propagator. The shift is scaled with the width so
/// the pair stays a Hilbert-transform pair and `Σ_R` stays analytic in the
/// upper half plane.
pub fn linear_self_energy<T: Real>(
    j: &SpectralDensity<T>,
    tp: &ThermalParams<T>,
    grid: &FrequencyGrid<T>,
    width: T,
) -> Result<SelfEnergy<T>> {
    let d = BathPropagator::new(j, tp, grid)?;
    Ok(d.as_gf().scale(Complex::new(T::lit(2.0) * width, T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn value_at_one() {
        let grid = FrequencyGrid::new(20.0, 4096).unwrap();
        let tp = ThermalParams::boson(1.0).unwrap();
        let c = 0.5;
        let s = linear_self_energy(&SpectralDensity::default_ohmic(), &tp, &grid, c).unwrap();
        let k = grid.nearest(1.0);
        let w = grid.omega(k);
        let want = Complex::new(-c * PI / (1.0 + w * w), -c * PI * w / (1.0 + w * w));
        assert!((s.r().samples()[k] - want).norm() < 1e-5);
    }

    #[test]
    fn vanishes_with_density() {
        let grid = FrequencyGrid::new(20.0, 256).unwrap();
        let tp = ThermalParams::boson(1.0).unwrap();
        let j = SpectralDensity::default_ohmic().scaled(0.0);
        let s = linear_self_energy(&j, &tp, &grid, 0.5).unwrap();
        assert_eq!(s.r().max_abs(), 0.0);
        assert_eq!(s.k().max_abs(), 0.0);
    }
}
