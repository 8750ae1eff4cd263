use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::grid::{FrequencyGrid, TimeGrid};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Frequency,
    Time,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Frequency => "frequency",
            Domain::Time => "time",
        }
    }
}

/// Complex samples on a frequency grid or on its dual time grid.
///
/// The frequency grid is stored in both cases; the time grid is derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal<T> {
    grid: FrequencyGrid<T>,
    domain: Domain,
    samples: Vec<Complex<T>>,
}

impl<T: Real> ComplexSignal<T> {
    pub fn new(grid: FrequencyGrid<T>, domain: Domain, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, domain, samples })
    }

    pub fn zeros(grid: FrequencyGrid<T>, domain: Domain) -> Self {
        Self {
            samples: vec![Complex::new(T::zero(), T::zero()); grid.len()],
            grid,
            domain,
        }
    }

    /// Samples `f` at the nodes of the grid belonging to `domain`.
    pub fn from_fn(grid: FrequencyGrid<T>, domain: Domain, f: impl Fn(T) -> Complex<T>) -> Self {
        let samples = match domain {
            Domain::Frequency => (0..grid.len()).map(|j| f(grid.omega(j))).collect(),
            Domain::Time => {
                let tg = grid.time_grid();
                (0..grid.len()).map(|n| f(tg.tau(n))).collect()
            }
        };
        Self { grid, domain, samples }
    }

    pub fn from_real(grid: FrequencyGrid<T>, domain: Domain, re: &[T]) -> Result<Self> {
        Self::new(grid, domain, re.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn time_grid(&self) -> TimeGrid<T> {
        self.grid.time_grid()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn re(&self) -> Vec<T> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<T> {
        self.samples.iter().map(|z| z.im).collect()
    }

    pub fn expect_domain(&self, d: Domain) -> Result<()> {
        if self.domain == d {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: d.name(),
                found: self.domain.name(),
            })
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        other.expect_domain(self.domain)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid,
            domain: self.domain,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Pointwise map with the node index.
    pub fn map_indexed(&self, f: impl Fn(usize, Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid,
            domain: self.domain,
            samples: self.samples.iter().enumerate().map(|(j, &z)| f(j, z)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            domain: self.domain,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn l2_norm(&self) -> T {
        self.samples.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
    }

    /// `max_j |self_j - other_j|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `f(tau) = ∫ dω/2π F(ω) e^{-iωτ}` on the dual time grid.
    pub fn to_time(&self) -> Result<Self> {
        self.expect_domain(Domain::Frequency)?;
        let n = self.len();
        let mut buf: Vec<Complex<T>> = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, &z)| alternate(k, z))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let c = self.grid.step() / T::TAU();
        for (m, z) in buf.iter_mut().enumerate() {
            *z = alternate(m, *z) * c;
        }
        Ok(Self {
            grid: self.grid,
            domain: Domain::Time,
            samples: buf,
        })
    }

    /// Same as [`Self::to_time`], but checks the target time grid first.
    pub fn to_time_on(&self, target: &TimeGrid<T>) -> Result<Self> {
        if !target.is_dual_of(&self.grid) {
            return Err(Error::GridMismatch(format!(
                "time grid (tau_max = {}, n = {}) is not dual to the frequency grid",
                target.tau_max(),
                target.len()
            )));
        }
        self.to_time()
    }

    /// `F(ω) = ∫ dτ f(τ) e^{iωτ}` on the frequency grid.
    pub fn to_frequency(&self) -> Result<Self> {
        self.expect_domain(Domain::Time)?;
        let n = self.len();
        let mut buf: Vec<Complex<T>> = self
            .samples
            .iter()
            .enumerate()
            .map(|(m, &z)| alternate(m, z))
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let c = self.time_grid().step();
        for (k, z) in buf.iter_mut().enumerate() {
            *z = alternate(k, *z) * c;
        }
        Ok(Self {
            grid: self.grid,
            domain: Domain::Frequency,
            samples: buf,
        })
    }

    /// Copy of the samples placed in the middle of a larger grid with the same
    /// spacing (zeros elsewhere). Frequency domain only.
    pub fn embed(&self, target: &FrequencyGrid<T>) -> Result<Self> {
        self.expect_domain(Domain::Frequency)?;
        let offset = embed_offset(&self.grid, target)?;
        let mut out = Self::zeros(*target, Domain::Frequency);
        out.samples[offset..offset + self.len()].copy_from_slice(&self.samples);
        Ok(out)
    }

    /// Inverse of [`Self::embed`]: keep the central window matching `target`.
    pub fn crop(&self, target: &FrequencyGrid<T>) -> Result<Self> {
        self.expect_domain(Domain::Frequency)?;
        let offset = embed_offset(target, &self.grid)?;
        Ok(Self {
            grid: *target,
            domain: Domain::Frequency,
            samples: self.samples[offset..offset + target.len()].to_vec(),
        })
    }
}

fn embed_offset<T: Real>(small: &FrequencyGrid<T>, large: &FrequencyGrid<T>) -> Result<usize> {
    let tol = T::lit(1e-9) * small.step();
    if large.len() < small.len() || (large.step() - small.step()).abs() > tol {
        return Err(Error::GridMismatch(format!(
            "cannot embed a grid of {} points (step {}) into one of {} points (step {})",
            small.len(),
            small.step(),
            large.len(),
            large.step()
        )));
    }
    Ok((large.len() - small.len()) / 2)
}

#[inline]
fn alternate<T: Real>(k: usize, z: Complex<T>) -> Complex<T> {
    if k.is_multiple_of(2) {
        z
    } else {
        -z
    }
}

impl<T: Real> Add for &ComplexSignal<T> {
    type Output = ComplexSignal<T>;

    fn add(self, rhs: Self) -> ComplexSignal<T> {
        self.zip_with(rhs, |a, b| a + b).expect("compatible signals")
    }
}

impl<T: Real> Sub for &ComplexSignal<T> {
    type Output = ComplexSignal<T>;

    fn sub(self, rhs: Self) -> ComplexSignal<T> {
        self.zip_with(rhs, |a, b| a - b).expect("compatible signals")
    }
}

impl<T: Real> Mul for &ComplexSignal<T> {
    type Output = ComplexSignal<T>;

    fn mul(self, rhs: Self) -> ComplexSignal<T> {
        self.zip_with(rhs, |a, b| a * b).expect("compatible signals")
    }
}
