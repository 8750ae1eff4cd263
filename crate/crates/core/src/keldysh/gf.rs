use std::io::{self, Write};

use num_complex::Complex;

use crate::bath::spectral_times_coth;
use crate::error::{Error, Result};
use crate::numerics::{ComplexSignal, Domain, FrequencyGrid, ThermalParams};
use crate::scalar::{cplx, imag_unit, Real};

/// Retarded, advanced and Keldysh components of a stationary two-point function.
#[derive(Debug, Clone, PartialEq)]
pub struct KeldyshGF<T> {
    r: ComplexSignal<T>,
    a: ComplexSignal<T>,
    k: ComplexSignal<T>,
    beta: Option<T>,
}

/// Self-energies carry the same component triple.
pub type SelfEnergy<T> = KeldyshGF<T>;

impl<T: Real> KeldyshGF<T> {
    pub fn new(
        r: ComplexSignal<T>,
        a: ComplexSignal<T>,
        k: ComplexSignal<T>,
        beta: Option<T>,
    ) -> Result<Self> {
        r.check_compatible(&a)?;
        r.check_compatible(&k)?;
        Ok(Self { r, a, k, beta })
    }

    pub fn zeros(grid: FrequencyGrid<T>, domain: Domain) -> Self {
        let z = ComplexSignal::zeros(grid, domain);
        Self {
            r: z.clone(),
            a: z.clone(),
            k: z,
            beta: None,
        }
    }

    /// Frequency-domain function from its retarded and Keldysh parts, with
    /// `A = conj(R)`.
    pub fn from_retarded(r: ComplexSignal<T>, k: ComplexSignal<T>, beta: Option<T>) -> Result<Self> {
        r.expect_domain(Domain::Frequency)?;
        let a = r.conj();
        Self::new(r, a, k, beta)
    }

    pub fn r(&self) -> &ComplexSignal<T> {
        &self.r
    }

    pub fn a(&self) -> &ComplexSignal<T> {
        &self.a
    }

    pub fn k(&self) -> &ComplexSignal<T> {
        &self.k
    }

    pub fn beta(&self) -> Option<T> {
        self.beta
    }

    pub fn with_beta(mut self, beta: Option<T>) -> Self {
        self.beta = beta;
        self
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        self.r.grid()
    }

    pub fn domain(&self) -> Domain {
        self.r.domain()
    }

    pub fn into_parts(self) -> (ComplexSignal<T>, ComplexSignal<T>, ComplexSignal<T>) {
        (self.r, self.a, self.k)
    }

    /// Thermal function with spectral weight `rho` at inverse temperature `tp.beta`.
    ///
    /// Built in the time domain as `R = -i θ ρ̂`, `A = i (1-θ) ρ̂` and
    /// `K = -i (ρ coth)^`, with `ρ̂(τ) = ∫ρ(ω) e^{-iωτ} dω`, then transformed to
    /// frequency. `R - A = -2πiρ` and `K = (R - A) coth(βω/2)` hold to rounding.
    pub fn from_spectral(rho: &SpectralFunction<T>, tp: &ThermalParams<T>) -> Result<Self> {
        let two_pi = cplx(T::TAU());
        let rho_hat = rho.signal().to_time()?.scale(two_pi);
        let kt = spectral_times_coth(rho.signal(), tp)?
            .to_time()?
            .scale(two_pi * -imag_unit::<T>());
        let (rt, at) = causal_pair(&rho_hat);
        Self::new(rt.to_frequency()?, at.to_frequency()?, kt.to_frequency()?, Some(tp.beta))
    }

    /// `ρ = i (R - A) / 2π`; fails if the result has a visible imaginary part.
    pub fn to_spectral(&self) -> Result<SpectralFunction<T>> {
        self.r.expect_domain(Domain::Frequency)?;
        let c = imag_unit::<T>() / T::TAU();
        let rho = self.r.zip_with(&self.a, |r, a| (r - a) * c)?;
        SpectralFunction::from_signal(rho)
    }

    /// Time-domain image. `R` and `A` are rebuilt from the transformed spectral
    /// weight so that causality and `R(0) + A(0) = 0` hold exactly on the lattice.
    pub fn to_time_domain(&self) -> Result<Self> {
        self.r.expect_domain(Domain::Frequency)?;
        let i = imag_unit::<T>();
        let rho_hat = self.r.zip_with(&self.a, |r, a| (r - a) * i)?.to_time()?;
        let (rt, at) = causal_pair(&rho_hat);
        Self::new(rt, at, self.k.to_time()?, self.beta)
    }

    pub fn to_frequency_domain(&self) -> Result<Self> {
        self.r.expect_domain(Domain::Time)?;
        Self::new(
            self.r.to_frequency()?,
            self.a.to_frequency()?,
            self.k.to_frequency()?,
            self.beta,
        )
    }

    /// Frequency-domain copy placed at the centre of a larger grid with equal spacing.
    pub fn embed(&self, target: &FrequencyGrid<T>) -> Result<Self> {
        Self::new(
            self.r.embed(target)?,
            self.a.embed(target)?,
            self.k.embed(target)?,
            self.beta,
        )
    }

    pub fn crop(&self, target: &FrequencyGrid<T>) -> Result<Self> {
        Self::new(
            self.r.crop(target)?,
            self.a.crop(target)?,
            self.k.crop(target)?,
            self.beta,
        )
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            r: self.r.scale(c),
            a: self.a.scale(c),
            k: self.k.scale(c),
            beta: self.beta,
        }
    }

    /// `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: T) -> Result<Self> {
        let v = T::one() - w;
        let f = |x: Complex<T>, y: Complex<T>| x * w + y * v;
        Self::new(
            self.r.zip_with(&other.r, f)?,
            self.a.zip_with(&other.a, f)?,
            self.k.zip_with(&other.k, f)?,
            self.beta.or(other.beta),
        )
    }

    /// `max |A - conj(R)|`, frequency domain.
    pub fn hermiticity_defect(&self) -> Result<T> {
        self.r.expect_domain(Domain::Frequency)?;
        self.a.max_abs_diff(&self.r.conj())
    }

    /// `|R(0) + A(0)|` of the time-domain image.
    pub fn equal_time_defect(&self) -> Result<T> {
        let t = match self.domain() {
            Domain::Time => self.clone(),
            Domain::Frequency => self.to_time_domain()?,
        };
        let z = t.grid().time_grid().zero_index();
        Ok((t.r.samples()[z] + t.a.samples()[z]).norm())
    }

    /// `∫ ρ dω` on the grid.
    pub fn sum_rule(&self) -> Result<T> {
        Ok(self.to_spectral()?.integral())
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.a.is_finite() && self.k.is_finite()
    }

    /// CSV with columns `omega,re_GR,im_GR,re_GA,im_GA,re_GK,im_GK` (or `tau,...`
    /// in the time domain), 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (axis, xs) = match self.domain() {
            Domain::Frequency => ("omega", self.grid().values()),
            Domain::Time => ("tau", self.grid().time_grid().values()),
        };
        writeln!(out, "{axis},re_GR,im_GR,re_GA,im_GA,re_GK,im_GK")?;
        for (j, x) in xs.iter().enumerate() {
            let (r, a, k) = (self.r.samples()[j], self.a.samples()[j], self.k.samples()[j]);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                x.as_f64(),
                r.re.as_f64(),
                r.im.as_f64(),
                a.re.as_f64(),
                a.im.as_f64(),
                k.re.as_f64(),
                k.im.as_f64()
            )?;
        }
        Ok(())
    }
}

/// `(-i θ f, i (1-θ) f)` on the time lattice.
pub(crate) fn causal_pair<T: Real>(f: &ComplexSignal<T>) -> (ComplexSignal<T>, ComplexSignal<T>) {
    let theta = f.time_grid().heaviside();
    let i = imag_unit::<T>();
    let r = f.map_indexed(|n, z| -i * z * theta[n]);
    let a = f.map_indexed(|n, z| i * z * (T::one() - theta[n]));
    (r, a)
}

/// Undamped mode at `omega0`: `R = 1/(ω - ω0)`, `K = 0`, frequency domain.
///
/// Fails with `SingularPropagator` if `omega0` coincides with a node.
pub fn free_mode<T: Real>(omega0: T, grid: &FrequencyGrid<T>) -> Result<KeldyshGF<T>> {
    let tiny = T::lit(1e-14);
    let mut r = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let d = grid.omega(j) - omega0;
        if d.abs() < tiny {
            return Err(Error::SingularPropagator {
                omega: grid.omega(j).as_f64(),
                magnitude: d.abs().as_f64(),
            });
        }
        r.push(cplx(T::one() / d));
    }
    let r = ComplexSignal::new(*grid, Domain::Frequency, r)?;
    KeldyshGF::from_retarded(r, ComplexSignal::zeros(*grid, Domain::Frequency), None)
}

/// Undamped mode at `omega0` evaluated analytically on the time lattice:
/// `R = -iθ e^{-iω0τ}`, `A = i(1-θ) e^{-iω0τ}` and, when `thermal_beta` is given,
/// `K = -i coth(βω0/2) e^{-iω0τ}` (otherwise `K = 0`).
pub fn free_mode_time<T: Real>(
    omega0: T,
    grid: &FrequencyGrid<T>,
    thermal_beta: Option<T>,
) -> Result<KeldyshGF<T>> {
    let wave = ComplexSignal::from_fn(*grid, Domain::Time, |tau| {
        Complex::new(T::zero(), -omega0 * tau).exp()
    });
    let (r, a) = causal_pair(&wave);
    let k = match thermal_beta {
        Some(beta) => {
            let c = crate::numerics::coth_half(beta, omega0);
            wave.scale(Complex::new(T::zero(), -c))
        }
        None => ComplexSignal::zeros(*grid, Domain::Time),
    };
    KeldyshGF::new(r, a, k, thermal_beta)
}

/// Real spectral weight `ρ(ω)` on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction<T> {
    rho: ComplexSignal<T>,
}

impl<T: Real> SpectralFunction<T> {
    pub fn from_values(grid: FrequencyGrid<T>, rho: &[T]) -> Result<Self> {
        Ok(Self {
            rho: ComplexSignal::from_real(grid, Domain::Frequency, rho)?,
        })
    }

    /// Accepts a frequency-domain signal whose imaginary part is at rounding level.
    pub fn from_signal(s: ComplexSignal<T>) -> Result<Self> {
        s.expect_domain(Domain::Frequency)?;
        let max_re = s.samples().iter().fold(T::zero(), |m, z| m.max(z.re.abs()));
        let max_im = s.samples().iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(256.0)) * max_re.max(T::one());
        if max_im > tol {
            return Err(Error::NonHermitianPair {
                max_imag: max_im.as_f64(),
            });
        }
        Ok(Self {
            rho: s.map(|z| cplx(z.re)),
        })
    }

    /// Sampled from a closure of `omega`.
    pub fn from_fn(grid: FrequencyGrid<T>, f: impl Fn(T) -> T) -> Self {
        Self {
            rho: ComplexSignal::from_fn(grid, Domain::Frequency, |w| cplx(f(w))),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        self.rho.grid()
    }

    pub fn signal(&self) -> &ComplexSignal<T> {
        &self.rho
    }

    pub fn values(&self) -> Vec<T> {
        self.rho.re()
    }

    pub fn integral(&self) -> T {
        self.rho.samples().iter().fold(T::zero(), |s, z| s + z.re) * self.grid().step()
    }
}
