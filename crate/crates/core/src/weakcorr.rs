//! Weak-coupling steady-state correlators of a linearly damped mode and of the
//! secular spin-boson model, plus the KMS verifier.

use gauss_quad::GaussLegendre;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bath::{kernel_shift, SpectralDensity};
use crate::error::{Error, Result};
use crate::keldysh::{FdrReport, GridInfo};
use crate::numerics::{ComplexSignal, Domain, FrequencyGrid, Statistics, ThermalParams};
use crate::scalar::{cplx, Real};

/// Gauss-Legendre order per panel of the equal-time quadrature.
const PANEL_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModeModel<T> {
    pub omega0: T,
    pub j: SpectralDensity<T>,
    pub tp: ThermalParams<T>,
}

impl<T: Real> LinearModeModel<T> {
    pub fn new(omega0: T, j: SpectralDensity<T>, tp: ThermalParams<T>) -> Result<Self> {
        check_omega0(omega0)?;
        Ok(Self { omega0, j, tp })
    }
}

/// Secular spin-boson model. `shift_scale` multiplies the Lamb shift that
/// enters the resonance denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonModel<T> {
    pub omega0: T,
    pub j: SpectralDensity<T>,
    pub tp: ThermalParams<T>,
    pub shift_scale: T,
}

impl<T: Real> SpinBosonModel<T> {
    /// The bath is bosonic whatever statistics `tp` carries.
    pub fn new(omega0: T, j: SpectralDensity<T>, tp: ThermalParams<T>) -> Result<Self> {
        check_omega0(omega0)?;
        Ok(Self {
            omega0,
            j,
            tp: ThermalParams::new(tp.beta, Statistics::Boson)?,
            shift_scale: T::one(),
        })
    }

    pub fn with_shift_scale(mut self, s: T) -> Self {
        self.shift_scale = s;
        self
    }
}

fn check_omega0<T: Real>(omega0: T) -> Result<()> {
    if omega0 > T::zero() && omega0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "omega0",
            reason: format!("must be positive, got {omega0}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCorrelator {
    /// `<a†(τ) a(0)>`
    Lesser,
    /// `<a(τ) a†(0)>`
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinCorrelator {
    /// `<σ+(τ) σ-(0)>`
    PlusMinus,
    /// `<σ-(τ) σ+(0)>`
    MinusPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelatorLabel {
    Lesser,
    Greater,
    PlusMinus,
    MinusPlus,
}

impl CorrelatorLabel {
    /// Lesser-type correlators rotate as `e^{+iΩτ}`, greater-type as `e^{-iΩτ}`.
    fn phase_sign(self) -> i8 {
        match self {
            CorrelatorLabel::Lesser | CorrelatorLabel::PlusMinus => 1,
            CorrelatorLabel::Greater | CorrelatorLabel::MinusPlus => -1,
        }
    }
}

/// Spectral weight `S(Ω)` and the correlator `C(τ) = ∫₀^{Ω_max} dΩ/2π S(Ω) e^{±iΩτ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorResult<T> {
    pub label: CorrelatorLabel,
    /// `S(Ω)` on the full frequency grid, zero for `Ω < 0`.
    pub spectrum: ComplexSignal<T>,
    /// `C(τ)` from the grid transform (trapezoid in `Ω`).
    pub time_series: ComplexSignal<T>,
    /// `C(0)` from panel Gauss-Legendre quadrature refined around the resonance;
    /// stays accurate when the line is far narrower than the grid spacing.
    pub equal_time: T,
    /// Rough size of the weight beyond the last grid node, `Ω S(Ω) / 2π` there.
    pub tail_estimate: T,
}

impl<T: Real> CorrelatorResult<T> {
    /// `(Ω, S(Ω))` for `Ω >= 0`.
    pub fn positive_spectrum(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let g = *self.spectrum.grid();
        (g.zero_index()..g.len()).map(move |k| (g.omega(k), self.spectrum.samples()[k].re))
    }
}

#[derive(Clone, Copy)]
enum Width {
    /// `J/2`
    Half,
    /// `(n + 1/2) J`
    Secular,
}

#[derive(Clone, Copy)]
enum Numerator {
    /// `J n`
    Occupied,
    /// `J (1 - η n)`
    Empty,
}

/// Everything needed to evaluate `S(Ω)` at arbitrary `Ω >= 0`.
struct Weight<'a, T> {
    omega0: T,
    j: &'a SpectralDensity<T>,
    tp: ThermalParams<T>,
    grid: FrequencyGrid<T>,
    shift: Vec<T>,
    width: Width,
    numerator: Numerator,
}

impl<T: Real> Weight<'_, T> {
    /// `J(Ω)/Ω`, continued to `J'(0)` at the origin.
    fn j_over_omega(&self, w: T) -> T {
        let tiny = T::lit(1e-7) * self.grid.step();
        if w.abs() < tiny {
            self.j.eval(tiny) / tiny
        } else {
            self.j.eval(w) / w
        }
    }

    /// `Ω n(Ω)`, finite at the origin for bosons.
    fn omega_n(&self, w: T) -> T {
        let x = self.tp.beta * w;
        match self.tp.eta {
            Statistics::Boson => {
                if x.abs() < T::lit(1e-8) {
                    T::one() / self.tp.beta - w * T::lit(0.5)
                } else {
                    w / x.exp_m1()
                }
            }
            Statistics::Fermion => {
                let n = if x > T::zero() {
                    let e = (-x).exp();
                    e / (T::one() + e)
                } else {
                    T::one() / (T::one() + x.exp())
                };
                w * n
            }
        }
    }

    fn shift_at(&self, w: T) -> T {
        let s = (w + self.grid.omega_max()) / self.grid.step();
        let n = self.grid.len();
        let k = s.floor().to_usize().unwrap_or(0).min(n - 2);
        let t = (s - T::from_usize_lossy(k)).max(T::zero()).min(T::one());
        self.shift[k] * (T::one() - t) + self.shift[k + 1] * t
    }

    fn half_width(&self, w: T) -> T {
        let jo = self.j_over_omega(w);
        match self.width {
            Width::Half => T::lit(0.5) * jo * w,
            // (n + 1/2) J = J/Ω · (Ω n + Ω/2)
            Width::Secular => jo * (self.omega_n(w) + w * T::lit(0.5)),
        }
    }

    fn eval(&self, w: T) -> T {
        if w < T::zero() {
            return T::zero();
        }
        let jo = self.j_over_omega(w);
        let num = match self.numerator {
            Numerator::Occupied => jo * self.omega_n(w),
            Numerator::Empty => jo * (w - self.tp.eta_value() * self.omega_n(w)),
        };
        let d = w - self.omega0 - self.shift_at(w);
        let g = self.half_width(w);
        num / (d * d + g * g)
    }

    /// Resonance position and half-width for panel refinement.
    fn resonance(&self) -> (T, T) {
        let mut p = self.omega0;
        for _ in 0..8 {
            p = self.omega0 + self.shift_at(p.max(T::zero()));
        }
        (p, self.half_width(p).abs())
    }

    fn integrate(&self) -> T {
        let upper = self.grid.omega(self.grid.len() - 1).as_f64();
        let (p, g) = self.resonance();
        let (p, g) = (p.as_f64(), g.as_f64().max(1e-300));
        let mut cuts = vec![0.0, upper];
        let coarse = 64usize;
        cuts.extend((1..coarse).map(|i| upper * i as f64 / coarse as f64));
        let mut s = 0.25;
        while s * g < upper {
            cuts.push(p - s * g);
            cuts.push(p + s * g);
            s *= 4.0;
        }
        cuts.push(p);
        cuts.retain(|&c| (0.0..=upper).contains(&c));
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut points"));
        cuts.dedup();
        let rule = GaussLegendre::new(PANEL_ORDER).expect("valid Gauss-Legendre order");
        let total: f64 = cuts
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], |x| self.eval(T::lit(x)).as_f64()))
            .sum();
        T::lit(total / std::f64::consts::TAU)
    }

    fn build(&self, label: CorrelatorLabel) -> Result<CorrelatorResult<T>> {
        let grid = self.grid;
        let z = grid.zero_index();
        let mut s = ComplexSignal::zeros(grid, Domain::Frequency);
        for k in z..grid.len() {
            s.samples_mut()[k] = cplx(self.eval(grid.omega(k)));
        }
        // trapezoid endpoint at Ω = 0
        let mut weighted = s.clone();
        weighted.samples_mut()[z] = weighted.samples()[z] * T::lit(0.5);
        let mut c = weighted.to_time()?;
        if label.phase_sign() > 0 {
            c = c.conj();
        }
        let last = grid.len() - 1;
        let tail = grid.omega(last) * s.samples()[last].re / T::TAU();
        Ok(CorrelatorResult {
            label,
            spectrum: s,
            time_series: c,
            equal_time: self.integrate(),
            tail_estimate: tail,
        })
    }
}

fn warn_grid<T: Real>(omega0: T, grid: &FrequencyGrid<T>) {
    if omega0 * T::lit(4.0) > grid.omega_max() {
        log::warn!("omega_max = {} is not much larger than omega0 = {}", grid.omega_max(), omega0);
    }
}

pub fn mode_correlator<T: Real>(
    m: &LinearModeModel<T>,
    grid: &FrequencyGrid<T>,
    which: ModeCorrelator,
) -> Result<CorrelatorResult<T>> {
    warn_grid(m.omega0, grid);
    let shift = kernel_shift(&m.j, grid)?.values.re();
    let (numerator, label) = match which {
        ModeCorrelator::Lesser => (Numerator::Occupied, CorrelatorLabel::Lesser),
        ModeCorrelator::Greater => (Numerator::Empty, CorrelatorLabel::Greater),
    };
    Weight {
        omega0: m.omega0,
        j: &m.j,
        tp: m.tp,
        grid: *grid,
        shift,
        width: Width::Half,
        numerator,
    }
    .build(label)
}

pub fn spin_correlator<T: Real>(
    m: &SpinBosonModel<T>,
    grid: &FrequencyGrid<T>,
    which: SpinCorrelator,
) -> Result<CorrelatorResult<T>> {
    warn_grid(m.omega0, grid);
    let shift = kernel_shift(&m.j, grid)?
        .values
        .re()
        .into_iter()
        .map(|v| v * m.shift_scale)
        .collect();
    let (numerator, label) = match which {
        SpinCorrelator::PlusMinus => (Numerator::Occupied, CorrelatorLabel::PlusMinus),
        SpinCorrelator::MinusPlus => (Numerator::Empty, CorrelatorLabel::MinusPlus),
    };
    Weight {
        omega0: m.omega0,
        j: &m.j,
        tp: ThermalParams::new(m.tp.beta, Statistics::Boson)?,
        grid: *grid,
        shift,
        width: Width::Secular,
        numerator,
    }
    .build(label)
}

/// `∫₀^{Ω_max} dΩ/2π J / [(Ω - ω0 - Σ)² + (J/2)²]`, i.e. `C_>(0) + η C_<(0)`:
/// the equal-time commutator (bosons) or anticommutator (fermions).
pub fn commutator_sum_rule<T: Real>(m: &LinearModeModel<T>, grid: &FrequencyGrid<T>) -> Result<T> {
    let g = mode_correlator(m, grid, ModeCorrelator::Greater)?;
    let l = mode_correlator(m, grid, ModeCorrelator::Lesser)?;
    Ok(g.equal_time + m.tp.eta_value() * l.equal_time)
}

/// Pointwise `r(Ω) = |S_<(Ω) - e^{-βΩ} S_>(Ω)| / max(S_>(Ω), floor)` over `Ω >= 0`.
///
/// `l_inf` is the maximum of `r`, `l2` its root mean square; `ratio` holds `S_< / S_>`.
pub fn kms_check<T: Real>(
    lesser: &CorrelatorResult<T>,
    greater: &CorrelatorResult<T>,
    tp: &ThermalParams<T>,
) -> Result<FdrReport> {
    lesser.spectrum.check_compatible(&greater.spectrum)?;
    let grid = *lesser.spectrum.grid();
    let z = grid.zero_index();
    let s_max = greater.spectrum.max_abs().as_f64();
    let floor = (1e-14 * s_max).max(1e-300);
    let mut ratio = vec![None; grid.len()];
    let (mut max_r, mut sum_r2, mut max_abs, mut sum_abs2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in z..grid.len() {
        let w = grid.omega(k);
        let sl = lesser.spectrum.samples()[k].re.as_f64();
        let sg = greater.spectrum.samples()[k].re.as_f64();
        let boltz = (-(tp.beta * w)).exp().as_f64();
        let diff = (sl - boltz * sg).abs();
        let r = diff / sg.max(floor);
        max_r = max_r.max(r);
        sum_r2 += r * r;
        max_abs = max_abs.max(diff);
        sum_abs2 += diff * diff;
        if sg > floor {
            ratio[k] = Some(sl / sg);
        }
    }
    let count = (grid.len() - z) as f64;
    Ok(FdrReport {
        l_inf: max_r,
        l2: (sum_r2 / count).sqrt(),
        abs_l_inf: max_abs,
        abs_l2: sum_abs2.sqrt(),
        beta: tp.beta.as_f64(),
        grid: GridInfo {
            omega_max: grid.omega_max().as_f64(),
            n: grid.len(),
        },
        ratio,
    })
}

/// `C(τ)` evaluated from the grid spectrum at a single time, for spot checks.
pub fn correlator_at<T: Real>(r: &CorrelatorResult<T>, tau: T) -> Complex<T> {
    let grid = *r.spectrum.grid();
    let z = grid.zero_index();
    let sign = T::lit(r.label.phase_sign() as f64);
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in z..grid.len() {
        let w = grid.omega(k);
        let wt = if k == z { T::lit(0.5) } else { T::one() };
        acc += Complex::new(T::zero(), sign * w * tau).exp() * (r.spectrum.samples()[k].re * wt);
    }
    acc * (grid.step() / T::TAU())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(scale: f64, eta: Statistics) -> LinearModeModel<f64> {
        LinearModeModel::new(
            1.0,
            SpectralDensity::default_ohmic().scaled(scale),
            ThermalParams::new(1.0, eta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn kms_is_exact_for_the_mode() {
        let grid = FrequencyGrid::new(20.0, 2048).unwrap();
        for eta in [Statistics::Boson, Statistics::Fermion] {
            let m = model(0.05, eta);
            let l = mode_correlator(&m, &grid, ModeCorrelator::Lesser).unwrap();
            let g = mode_correlator(&m, &grid, ModeCorrelator::Greater).unwrap();
            let rep = kms_check(&l, &g, &m.tp).unwrap();
            assert!(rep.l_inf < 1e-12, "{eta:?}: {}", rep.l_inf);
        }
    }

    #[test]
    fn both_representations_agree_at_zero() {
        let grid = FrequencyGrid::new(20.0, 4096).unwrap();
        let m = model(0.1, Statistics::Boson);
        let l = mode_correlator(&m, &grid, ModeCorrelator::Lesser).unwrap();
        let z = grid.time_grid().zero_index();
        let c0 = l.time_series.samples()[z];
        assert!(c0.im.abs() < 1e-12);
        assert!((c0.re - l.equal_time).abs() < 1e-3 * l.equal_time, "{} vs {}", c0.re, l.equal_time);
        let direct = correlator_at(&l, 0.0);
        assert!((direct - c0).norm() < 1e-12);
    }

    #[test]
    fn spectra_are_nonnegative() {
        let grid = FrequencyGrid::new(20.0, 1024).unwrap();
        let m = model(0.2, Statistics::Boson);
        for which in [ModeCorrelator::Lesser, ModeCorrelator::Greater] {
            let r = mode_correlator(&m, &grid, which).unwrap();
            assert!(r.spectrum.samples().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
        }
    }

    #[test]
    fn zero_temperature_spin_lesser_vanishes() {
        let grid = FrequencyGrid::new(20.0, 1024).unwrap();
        let sb = SpinBosonModel::new(
            1.0,
            SpectralDensity::default_ohmic().scaled(0.05),
            ThermalParams::boson(800.0).unwrap(),
        )
        .unwrap();
        let r = spin_correlator(&sb, &grid, SpinCorrelator::PlusMinus).unwrap();
        let k = grid.nearest(0.5);
        assert!(r.spectrum.samples()[k].re < 1e-100);
    }
}
