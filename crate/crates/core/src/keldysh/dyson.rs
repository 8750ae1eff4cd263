use num_complex::Complex;

use crate::error::{Error, Result};
use crate::keldysh::gf::{KeldyshGF, SelfEnergy};
use crate::numerics::{ComplexSignal, Domain};
use crate::scalar::Real;

/// Below this `|g1_R^{-1} - Σ_R|` the propagator is treated as singular.
pub const SINGULAR_EPS: f64 = 1e-14;

/// `G_R = 1/(g1_R^{-1} - Σ_R)`, `G_A = conj(G_R)` and
/// `G_K = G_R (Σ_K + g1_R^{-1} g1_K g1_A^{-1}) G_A`, all in frequency space.
pub fn dyson<T: Real>(g1: &KeldyshGF<T>, sigma: &SelfEnergy<T>) -> Result<KeldyshGF<T>> {
    g1.r().expect_domain(Domain::Frequency)?;
    g1.r().check_compatible(sigma.r())?;
    let grid = *g1.grid();
    let one = Complex::new(T::one(), T::zero());
    let mut inv_r = Vec::with_capacity(grid.len());
    let mut source = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let (r, a, k) = (g1.r().samples()[j], g1.a().samples()[j], g1.k().samples()[j]);
        if !(r.norm() > T::zero()) || !r.re.is_finite() || !r.im.is_finite() {
            return Err(Error::SingularPropagator {
                omega: grid.omega(j).as_f64(),
                magnitude: 0.0,
            });
        }
        let ir = one / r;
        let ia = one / a;
        inv_r.push(ir);
        source.push(ir * k * ia);
    }
    dyson_with_inverse(&inv_r, &source, sigma)
}

/// Dyson solve with the bare inverse `g1_R^{-1}` and Keldysh source supplied
/// directly; used when `g1` itself is an undamped pole.
pub(crate) fn dyson_with_inverse<T: Real>(
    inv_r: &[Complex<T>],
    source: &[Complex<T>],
    sigma: &SelfEnergy<T>,
) -> Result<KeldyshGF<T>> {
    sigma.r().expect_domain(Domain::Frequency)?;
    let grid = *sigma.grid();
    let eps = T::lit(SINGULAR_EPS);
    let one = Complex::new(T::one(), T::zero());
    let mut gr = Vec::with_capacity(grid.len());
    let mut gk = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let den = inv_r[j] - sigma.r().samples()[j];
        if den.norm() < eps {
            return Err(Error::SingularPropagator {
                omega: grid.omega(j).as_f64(),
                magnitude: den.norm().as_f64(),
            });
        }
        let r = one / den;
        gr.push(r);
        gk.push(r * (sigma.k().samples()[j] + source[j]) * r.conj());
    }
    KeldyshGF::from_retarded(
        ComplexSignal::new(grid, Domain::Frequency, gr)?,
        ComplexSignal::new(grid, Domain::Frequency, gk)?,
        sigma.beta(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keldysh::free_mode;
    use crate::numerics::FrequencyGrid;

    #[test]
    fn zero_self_energy_is_identity() {
        let grid = FrequencyGrid::new(8.0, 128).unwrap();
        let g1 = free_mode(1.0 + 0.5 * grid.step(), &grid).unwrap();
        let s = KeldyshGF::zeros(grid, Domain::Frequency);
        let g = dyson(&g1, &s).unwrap();
        assert!(g.r().max_abs_diff(g1.r()).unwrap() < 1e-12 * g1.r().max_abs());
        assert_eq!(g.k().max_abs(), 0.0);
    }

    #[test]
    fn pole_cancellation_is_singular() {
        let grid = FrequencyGrid::new(8.0, 128).unwrap();
        let g1 = free_mode(1.0 + 0.5 * grid.step(), &grid).unwrap();
        let inv = g1.r().map(|z| Complex::new(1.0, 0.0) / z);
        let s = KeldyshGF::from_retarded(inv, ComplexSignal::zeros(grid, Domain::Frequency), None).unwrap();
        assert!(matches!(dyson(&g1, &s), Err(Error::SingularPropagator { .. })));
    }
}
