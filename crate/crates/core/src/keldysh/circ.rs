use num_complex::Complex;

use crate::error::{Error, Result};
use crate::keldysh::gf::{KeldyshGF, SelfEnergy};
use crate::numerics::{ComplexSignal, Domain};
use crate::scalar::{imag_unit, Real};

/// `Σ = D ∘ G` for two time-domain factors.
///
/// Component rules: `Σ_K = i(D_K G_K + D_R G_R + D_A G_A)`,
/// `Σ_R = i(D_K G_R + D_R G_K)`, `Σ_A = i(D_K G_A + D_A G_K)`, evaluated pointwise
/// with `θ² = θ`, so the half-weight at `τ = 0` is not squared away.
pub fn circ_two<T: Real>(d: &KeldyshGF<T>, g: &KeldyshGF<T>) -> Result<SelfEnergy<T>> {
    circ_multi(&[d, g], &[])
}

/// Contraction of `l` time-domain factors with scalar ring prefactors.
///
/// Writing `P = i(R - A)` and `C = iK` for each factor, and letting `S` run over
/// the subsets of factors that contribute their `P` part:
/// `Σ_K = -i Σ_{|S| even} Π C Π P`, `Σ_R = -iθ Σ_{|S| odd} Π C Π P` and
/// `Σ_A = i(1-θ) Σ_{|S| odd} Π C Π P`, all multiplied by the product of `ring_factors`.
/// For two factors this is exactly [`circ_two`]; for one factor it returns the input.
pub fn circ_multi<T: Real>(
    factors: &[&KeldyshGF<T>],
    ring_factors: &[Complex<T>],
) -> Result<SelfEnergy<T>> {
    let first = factors.first().ok_or_else(|| Error::InvalidParameter {
        name: "factors",
        reason: "at least one factor is required".into(),
    })?;
    if factors.len() > 16 {
        return Err(Error::InvalidParameter {
            name: "factors",
            reason: format!("{} factors exceed the supported 16", factors.len()),
        });
    }
    let grid = *first.grid();
    for f in factors {
        f.r().expect_domain(Domain::Time)?;
        grid.check_same(f.grid())?;
    }
    let i = imag_unit::<T>();
    let n = grid.len();
    let p: Vec<Vec<Complex<T>>> = factors
        .iter()
        .map(|f| {
            f.r().samples()
                .iter()
                .zip(f.a().samples())
                .map(|(&r, &a)| (r - a) * i)
                .collect()
        })
        .collect();
    let c: Vec<Vec<Complex<T>>> = factors
        .iter()
        .map(|f| f.k().samples().iter().map(|&k| k * i).collect())
        .collect();

    let zero = Complex::new(T::zero(), T::zero());
    let mut even = vec![zero; n];
    let mut odd = vec![zero; n];
    let mut prod = vec![zero; n];
    for mask in 0u32..(1u32 << factors.len()) {
        prod.iter_mut().for_each(|z| *z = Complex::new(T::one(), T::zero()));
        for j in 0..factors.len() {
            let src = if mask & (1 << j) != 0 { &p[j] } else { &c[j] };
            prod.iter_mut().zip(src).for_each(|(z, &s)| *z *= s);
        }
        let acc = if mask.count_ones() % 2 == 0 { &mut even } else { &mut odd };
        acc.iter_mut().zip(&prod).for_each(|(a, &z)| *a += z);
    }

    let ring = ring_factors
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, &r| acc * r);
    let theta = grid.time_grid().heaviside();
    let k: Vec<_> = even.iter().map(|&z| -i * ring * z).collect();
    let r: Vec<_> = odd
        .iter()
        .zip(&theta)
        .map(|(&z, &th)| -i * ring * z * th)
        .collect();
    let a: Vec<_> = odd
        .iter()
        .zip(&theta)
        .map(|(&z, &th)| i * ring * z * (T::one() - th))
        .collect();

    let beta = first.beta().filter(|b| factors.iter().all(|f| f.beta() == Some(*b)));
    KeldyshGF::new(
        ComplexSignal::new(grid, Domain::Time, r)?,
        ComplexSignal::new(grid, Domain::Time, a)?,
        ComplexSignal::new(grid, Domain::Time, k)?,
        beta,
    )
}

/// Frequency-domain front end to [`circ_multi`].
///
/// Factors are zero-padded onto a grid of the same spacing and at least
/// `factors.len()` times the width before going to the time domain, so the
/// implied frequency convolutions do not wrap around. The result is cropped
/// back to the input grid.
pub fn circ_frequency<T: Real>(
    factors: &[&KeldyshGF<T>],
    ring_factors: &[Complex<T>],
) -> Result<SelfEnergy<T>> {
    let first = factors.first().ok_or_else(|| Error::InvalidParameter {
        name: "factors",
        reason: "at least one factor is required".into(),
    })?;
    let grid = *first.grid();
    let (big, _) = grid.padded(factors.len())?;
    let mut timed = Vec::with_capacity(factors.len());
    for f in factors {
        f.r().expect_domain(Domain::Frequency)?;
        grid.check_same(f.grid())?;
        timed.push(f.embed(&big)?.to_time_domain()?);
    }
    let refs: Vec<&KeldyshGF<T>> = timed.iter().collect();
    circ_multi(&refs, ring_factors)?.to_frequency_domain()?.crop(&grid)
}
