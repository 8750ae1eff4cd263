//! Bath spectral densities, Lamb shifts and the bath contour propagator.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keldysh::KeldyshGF;
use crate::numerics::thermal::fill_zero_bin;
use crate::numerics::{coth_half, principal_value_integral, ComplexSignal, Domain, FrequencyGrid, ThermalParams};
use crate::scalar::{cplx, Real};

/// Coupling-weighted density of bath modes, odd-extended to negative frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralDensity<T> {
    /// `J(ω) = A (ω/ωc) / (1 + (ω/ωc)²)`.
    OhmicLorentzian { amplitude: T, cutoff: T },
    /// Samples `(ω_i, J_i)` with `0 <= ω_0 < ω_1 < ...`, linearly interpolated,
    /// zero beyond the last node and ramped linearly from the origin below the first.
    Tabulated { omega: Vec<T>, j: Vec<T> },
}

impl<T: Real> SpectralDensity<T> {
    pub fn ohmic(amplitude: T, cutoff: T) -> Result<Self> {
        if !(amplitude >= T::zero()) || !amplitude.is_finite() {
            return Err(Error::InvalidSpectralDensity(format!(
                "amplitude must be finite and non-negative, got {amplitude}"
            )));
        }
        if !(cutoff > T::zero()) || !cutoff.is_finite() {
            return Err(Error::InvalidSpectralDensity(format!(
                "cutoff must be positive, got {cutoff}"
            )));
        }
        Ok(Self::OhmicLorentzian { amplitude, cutoff })
    }

    /// `J(ω) = πω/(1+ω²)`.
    pub fn default_ohmic() -> Self {
        Self::OhmicLorentzian {
            amplitude: T::PI(),
            cutoff: T::one(),
        }
    }

    pub fn tabulated(omega: Vec<T>, j: Vec<T>) -> Result<Self> {
        if omega.len() != j.len() || omega.is_empty() {
            return Err(Error::InvalidSpectralDensity(
                "table needs matching, non-empty columns".into(),
            ));
        }
        for (i, (&w, &v)) in omega.iter().zip(&j).enumerate() {
            if !w.is_finite() || !v.is_finite() {
                return Err(Error::InvalidSpectralDensity(format!("row {i} is not finite")));
            }
            if w < T::zero() {
                return Err(Error::InvalidSpectralDensity(format!(
                    "row {i}: negative frequency {w}; give omega >= 0 only, the odd extension is implied"
                )));
            }
            if v < T::zero() {
                return Err(Error::InvalidSpectralDensity(format!("row {i}: J = {v} < 0")));
            }
            if i > 0 && w <= omega[i - 1] {
                return Err(Error::InvalidSpectralDensity(format!(
                    "row {i}: frequencies must increase strictly"
                )));
            }
        }
        Ok(Self::Tabulated { omega, j })
    }

    /// Two-column text `omega J`, whitespace or comma separated, `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut j = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected two columns, found {}", cols.len()),
                });
            }
            let num = |s: &str| -> Result<T> {
                s.parse::<f64>().map(T::lit).map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("`{s}`: {e}"),
                })
            };
            omega.push(num(cols[0])?);
            j.push(num(cols[1])?);
        }
        Self::tabulated(omega, j)
    }

    pub fn eval(&self, omega: T) -> T {
        if omega < T::zero() {
            return -self.eval(-omega);
        }
        match self {
            Self::OhmicLorentzian { amplitude, cutoff } => {
                let u = omega / *cutoff;
                *amplitude * u / (T::one() + u * u)
            }
            Self::Tabulated { omega: xs, j: ys } => {
                let last = xs.len() - 1;
                if omega > xs[last] {
                    return T::zero();
                }
                if omega <= xs[0] {
                    return if xs[0] > T::zero() { ys[0] * omega / xs[0] } else { ys[0] };
                }
                let i = xs.partition_point(|&x| x < omega);
                let t = (omega - xs[i - 1]) / (xs[i] - xs[i - 1]);
                ys[i - 1] + (ys[i] - ys[i - 1]) * t
            }
        }
    }

    pub fn sample(&self, grid: &FrequencyGrid<T>) -> Vec<T> {
        (0..grid.len()).map(|k| self.eval(grid.omega(k))).collect()
    }

    /// `s * J`.
    pub fn scaled(&self, s: T) -> Self {
        match self {
            Self::OhmicLorentzian { amplitude, cutoff } => Self::OhmicLorentzian {
                amplitude: *amplitude * s,
                cutoff: *cutoff,
            },
            Self::Tabulated { omega, j } => Self::Tabulated {
                omega: omega.clone(),
                j: j.iter().map(|&v| v * s).collect(),
            },
        }
    }

    /// Part of `(1/π) P∫ J(x)/(ω-x) dx` lying outside `[a, b]`.
    ///
    /// With `positive_only` the integrand is restricted to `x > 0` (and `a` is
    /// ignored). Closed form for the Ohmic family; tables are assumed to vanish
    /// beyond the grid, so their tail is zero.
    pub fn pv_tail(&self, omega: T, a: T, b: T, positive_only: bool) -> T {
        match self {
            Self::OhmicLorentzian { amplitude, cutoff } => {
                let w = omega / *cutoff;
                let d = T::one() + w * w;
                let aw = w / d;
                let c = -T::one() / d;
                let f = |u: T| aw * ((T::one() + u * u).sqrt() / (w - u).abs()).ln() + c * u.atan();
                let bu = b / *cutoff;
                let inner = if positive_only {
                    c * T::FRAC_PI_2() - f(bu)
                } else {
                    c * T::PI() - f(bu) + f(a / *cutoff)
                };
                *amplitude / T::PI() * inner
            }
            Self::Tabulated { .. } => T::zero(),
        }
    }

    /// Largest frequency with appreciable weight, for grid sanity warnings.
    pub fn support_hint(&self) -> T {
        match self {
            Self::OhmicLorentzian { cutoff, .. } => *cutoff,
            Self::Tabulated { omega, .. } => omega[omega.len() - 1],
        }
    }
}

/// `ρ(ω) coth(βω/2)` with the ω = 0 bin interpolated from its neighbours.
pub fn spectral_times_coth<T: Real>(
    rho: &ComplexSignal<T>,
    tp: &ThermalParams<T>,
) -> Result<ComplexSignal<T>> {
    rho.expect_domain(Domain::Frequency)?;
    let grid = *rho.grid();
    let mut out = rho.map_indexed(|k, z| z * coth_half(tp.beta, grid.omega(k)));
    fill_zero_bin(out.samples_mut(), grid.zero_index());
    Ok(out)
}

/// Lamb shift on a grid together with the edge bins that had to be clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct LambShift<T> {
    pub values: ComplexSignal<T>,
    /// Nodes within one spacing of the grid edge; they carry the nearest valid value.
    pub clamped: Vec<usize>,
}

/// `Σ(ω) = (1/π) P∫ J(x)/(ω-x) dx` over the full line.
pub fn lamb_shift<T: Real>(j: &SpectralDensity<T>, grid: &FrequencyGrid<T>) -> Result<LambShift<T>> {
    hilbert(j, grid, false, T::one())
}

/// `(1/2π) P∫₀^∞ J(x)/(ω-x) dx`, the frequency shift that accompanies the
/// half-width `J/2` in the Laplace-transformed memory kernel.
pub fn kernel_shift<T: Real>(j: &SpectralDensity<T>, grid: &FrequencyGrid<T>) -> Result<LambShift<T>> {
    hilbert(j, grid, true, T::lit(0.5))
}

fn hilbert<T: Real>(
    j: &SpectralDensity<T>,
    grid: &FrequencyGrid<T>,
    positive_only: bool,
    factor: T,
) -> Result<LambShift<T>> {
    let n = grid.len();
    let mut f = j.sample(grid);
    if positive_only {
        for (k, v) in f.iter_mut().enumerate() {
            if grid.omega(k) <= T::zero() {
                *v = T::zero();
            }
        }
    }
    if let SpectralDensity::Tabulated { omega, .. } = j {
        if omega[omega.len() - 1] > grid.omega_max() {
            log::warn!("tabulated J extends beyond the grid; the excess is ignored in the Lamb shift");
        }
    }
    let (a, b) = (grid.omega(0), grid.omega(n - 1));
    let mut vals: Vec<Option<T>> = Vec::with_capacity(n);
    for k in 0..n {
        let w = grid.omega(k);
        match principal_value_integral(&f, grid, w) {
            Ok(v) => vals.push(Some((v + j.pv_tail(w, a, b, positive_only)) * factor)),
            Err(Error::OutOfRange { .. }) => vals.push(None),
            Err(e) => return Err(e),
        }
    }
    let first = vals.iter().position(Option::is_some).expect("interior nodes exist");
    let last = vals.iter().rposition(Option::is_some).expect("interior nodes exist");
    let mut clamped = Vec::new();
    let samples = vals
        .iter()
        .enumerate()
        .map(|(k, v)| {
            cplx(v.unwrap_or_else(|| {
                clamped.push(k);
                if k < first {
                    vals[first].unwrap()
                } else {
                    vals[last].unwrap()
                }
            }))
        })
        .collect();
    Ok(LambShift {
        values: ComplexSignal::new(*grid, Domain::Frequency, samples)?,
        clamped,
    })
}

/// Frequency-domain bath propagator `D_R = Σ/2 - iJ/2`, `D_A = conj(D_R)`,
/// `D_K = -iJ coth(βω/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathPropagator<T> {
    gf: KeldyshGF<T>,
    thermal: ThermalParams<T>,
    density: SpectralDensity<T>,
    clamped: Vec<usize>,
}

impl<T: Real> BathPropagator<T> {
    pub fn new(j: &SpectralDensity<T>, tp: &ThermalParams<T>, grid: &FrequencyGrid<T>) -> Result<Self> {
        if j.support_hint() > grid.omega_max() {
            log::warn!("spectral density extends past omega_max; consider a wider grid");
        }
        let jw = j.sample(grid);
        let shift = lamb_shift(j, grid)?;
        let half = T::lit(0.5);
        let r = shift
            .values
            .map_indexed(|k, s| Complex::new(s.re * half, -jw[k] * half));
        let jsig = ComplexSignal::from_real(*grid, Domain::Frequency, &jw)?;
        let k = spectral_times_coth(&jsig, tp)?.map(|z| Complex::new(z.im, -z.re));
        let gf = KeldyshGF::from_retarded(r, k, Some(tp.beta))?;
        Ok(Self {
            gf,
            thermal: *tp,
            density: j.clone(),
            clamped: shift.clamped,
        })
    }

    pub fn r(&self) -> &ComplexSignal<T> {
        self.gf.r()
    }

    pub fn a(&self) -> &ComplexSignal<T> {
        self.gf.a()
    }

    pub fn k(&self) -> &ComplexSignal<T> {
        self.gf.k()
    }

    pub fn as_gf(&self) -> &KeldyshGF<T> {
        &self.gf
    }

    pub fn thermal(&self) -> &ThermalParams<T> {
        &self.thermal
    }

    pub fn density(&self) -> &SpectralDensity<T> {
        &self.density
    }

    pub fn clamped_bins(&self) -> &[usize] {
        &self.clamped
    }
}

/// Convenience wrapper matching the free-function style of the other builders.
pub fn bath_propagator<T: Real>(
    j: &SpectralDensity<T>,
    tp: &ThermalParams<T>,
    grid: &FrequencyGrid<T>,
) -> Result<BathPropagator<T>> {
    BathPropagator::new(j, tp, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ohmic_values() {
        let j = SpectralDensity::<f64>::default_ohmic();
        assert!((j.eval(1.0) - PI / 2.0).abs() < 1e-15);
        assert_eq!(j.eval(-2.0), -j.eval(2.0));
        assert_eq!(j.eval(0.0), 0.0);
    }

    #[test]
    fn table_parsing() {
        let text = "# omega J\n0 0\n1.0, 2.0 # peak\n\n2 1\n";
        let j = SpectralDensity::<f64>::parse_table(text).unwrap();
        assert!((j.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((j.eval(-1.5) + 1.5).abs() < 1e-15);
        assert_eq!(j.eval(3.0), 0.0);
        let err = SpectralDensity::<f64>::parse_table("0 0\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(SpectralDensity::<f64>::parse_table("1 -1\n").is_err());
        assert!(SpectralDensity::<f64>::parse_table("2 1\n1 1\n").is_err());
    }

    #[test]
    fn closed_form_shift() {
        let grid = FrequencyGrid::new(20.0, 4096).unwrap();
        let j = SpectralDensity::default_ohmic();
        let s = lamb_shift(&j, &grid).unwrap();
        assert_eq!(s.clamped, vec![0, 4095]);
        for k in (1..4095).step_by(37) {
            let w: f64 = grid.omega(k);
            let want = -PI / (1.0 + w * w);
            assert!((s.values.samples()[k].re - want).abs() < 1e-5, "w = {w}");
        }
    }

    #[test]
    fn one_sided_closed_form() {
        let grid = FrequencyGrid::new(20.0, 4096).unwrap();
        let j = SpectralDensity::default_ohmic();
        let s = kernel_shift(&j, &grid).unwrap();
        for &w in &[0.5f64, 1.0, 2.5, -1.0] {
            let k = grid.nearest(w);
            let w = grid.omega(k);
            let full = -PI / (2.0 * (1.0 + w * w)) + w / (1.0 + w * w) * w.abs().ln();
            let want = 0.5 * full;
            assert!((s.values.samples()[k].re - want).abs() < 1e-4, "w = {w}");
        }
    }

    #[test]
    fn spectral_times_coth_limit() {
        let grid = FrequencyGrid::<f64>::new(5.0, 256).unwrap();
        let tp = ThermalParams::boson(2.0).unwrap();
        let rho = ComplexSignal::from_fn(grid, Domain::Frequency, cplx);
        let p = spectral_times_coth(&rho, &tp).unwrap();
        // residual 4h⁴/45 of the symmetric rule
        assert!((p.samples()[grid.zero_index()].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn propagator_fdr_and_sign() {
        let grid = FrequencyGrid::new(20.0, 1024).unwrap();
        let tp = ThermalParams::boson(1.0).unwrap();
        let d = BathPropagator::new(&SpectralDensity::default_ohmic(), &tp, &grid).unwrap();
        for k in 0..grid.len() {
            let w: f64 = grid.omega(k);
            let (r, a, kk) = (d.r().samples()[k], d.a().samples()[k], d.k().samples()[k]);
            assert_eq!(a, r.conj());
            if w > 0.0 {
                assert!(r.im <= 0.0);
            }
            if k != grid.zero_index() {
                let want = (r - a) * coth_half(1.0, w);
                assert!((kk - want).norm() < 1e-12);
            }
        }
    }
}
