//! Born, one-iteration and fully self-consistent Green's functions of a mode
//! coupled to the bath through `a†a (b + b†)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bath::{BathPropagator, SpectralDensity};
use crate::error::{Error, Result};
use crate::keldysh::dyson::dyson_with_inverse;
use crate::keldysh::{
    circ_frequency, circ_two, dyson, fdr_check, free_mode, free_mode_time, linear_self_energy,
    FdrReport, KeldyshGF, SelfEnergy,
};
use crate::numerics::{ComplexSignal, FrequencyGrid, Statistics, ThermalParams};
use crate::scalar::{cplx, Real};

/// Keldysh component of the bare propagator used inside the Born self-energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BareKeldysh {
    Zero,
    Thermal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig<T> {
    pub omega0: T,
    pub j: SpectralDensity<T>,
    pub tp: ThermalParams<T>,
    /// Scale of `J` inside the nonlinear self-energy.
    pub lambda_sq: T,
    /// Scale of `J` inside the linear self-energy.
    pub linear_scale: T,
    pub bare_keldysh: BareKeldysh,
    /// Width constant `c` of the linear self-energy.
    pub width: T,
}

impl<T: Real> ModelConfig<T> {
    pub const DEFAULT_LINEAR_SCALE: f64 = 0.1;

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.into(),
            })
        };
        if !(self.omega0 > T::zero()) || !self.omega0.is_finite() {
            return bad("omega0", "must be positive");
        }
        if !(self.lambda_sq >= T::zero()) || !self.lambda_sq.is_finite() {
            return bad("lambda_sq", "must be ≥ 0");
        }
        if !(self.linear_scale >= T::zero()) || !self.linear_scale.is_finite() {
            return bad("linear_scale", "must be ≥ 0");
        }
        if !(self.width > T::zero()) || !self.width.is_finite() {
            return bad("width", "must be positive");
        }
        if self.tp.eta != Statistics::Boson {
            return bad("eta", "the Keldysh solvers treat a bosonic mode only");
        }
        Ok(())
    }

    pub fn with_lambda_sq(mut self, l: T) -> Self {
        self.lambda_sq = l;
        self
    }
}

impl<T: Real> Default for ModelConfig<T> {
    fn default() -> Self {
        Self {
            omega0: T::one(),
            j: SpectralDensity::default_ohmic(),
            tp: ThermalParams {
                beta: T::one(),
                eta: Statistics::Boson,
            },
            lambda_sq: T::lit(0.02),
            linear_scale: T::lit(Self::DEFAULT_LINEAR_SCALE),
            bare_keldysh: BareKeldysh::Zero,
            width: T::lit(crate::keldysh::DEFAULT_WIDTH),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub mixing: T,
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > T::zero() && self.mixing <= T::one()) {
            return Err(Error::InvalidParameter {
                name: "mixing",
                reason: format!("must lie in (0, 1], got {}", self.mixing),
            });
        }
        if !(self.tol > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be positive, got {}", self.tol),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            mixing: T::lit(0.5),
            tol: T::lit(1e-8),
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub iterations: usize,
    /// `max |G_R^{(n+1)} - G_R^{(n)}|` per iteration.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub fdr: Option<FdrReport>,
    pub sum_rule: Option<f64>,
    /// `max |G - dyson(g1, Σ[G])|` on return.
    pub self_consistency: Option<f64>,
}

/// The redefined bare propagator: the free mode dressed by the linear self-energy.
pub fn g1<T: Real>(m: &ModelConfig<T>, grid: &FrequencyGrid<T>) -> Result<KeldyshGF<T>> {
    m.validate()?;
    if m.linear_scale == T::zero() {
        return match free_mode(m.omega0, grid) {
            Err(Error::SingularPropagator { .. }) => {
                let shifted = m.omega0 + grid.step() * T::lit(0.5);
                log::warn!("undamped pole at omega0 = {} sits on a node; shifted to {}", m.omega0, shifted);
                free_mode(shifted, grid)
            }
            other => other,
        }
        .map(|g| g.with_beta(Some(m.tp.beta)));
    }
    let sigma = linear_self_energy(&m.j.scaled(m.linear_scale), &m.tp, grid, m.width)?;
    let inv: Vec<Complex<T>> = (0..grid.len()).map(|k| cplx(grid.omega(k) - m.omega0)).collect();
    let zero = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    dyson_with_inverse(&inv, &zero, &sigma)
}

/// Born self-energy `λ² D ∘ G0` with the undamped bare mode, and `G_B = dyson(g1, Σ)`.
pub fn born<T: Real>(m: &ModelConfig<T>, grid: &FrequencyGrid<T>) -> Result<(KeldyshGF<T>, SelfEnergy<T>)> {
    let g1 = g1(m, grid)?;
    let d = BathPropagator::new(&m.j, &m.tp, grid)?;
    let sigma = born_self_energy(m, &d, grid)?;
    Ok((dyson(&g1, &sigma)?, sigma))
}

fn born_self_energy<T: Real>(
    m: &ModelConfig<T>,
    d: &BathPropagator<T>,
    grid: &FrequencyGrid<T>,
) -> Result<SelfEnergy<T>> {
    let (big, _) = grid.padded(2)?;
    let dt = d.as_gf().embed(&big)?.to_time_domain()?;
    let keldysh = match m.bare_keldysh {
        BareKeldysh::Zero => None,
        BareKeldysh::Thermal => Some(m.tp.beta),
    };
    let g0 = free_mode_time(m.omega0, &big, keldysh)?;
    let s = circ_two(&dt, &g0)?.to_frequency_domain()?.crop(grid)?;
    Ok(s.scale(cplx(m.lambda_sq)).with_beta(Some(m.tp.beta)))
}

fn nonlinear_self_energy<T: Real>(
    m: &ModelConfig<T>,
    d: &BathPropagator<T>,
    g: &KeldyshGF<T>,
) -> Result<SelfEnergy<T>> {
    Ok(circ_frequency(&[d.as_gf(), g], &[])?.scale(cplx(m.lambda_sq)))
}

/// One self-consistency step from `g1`: `Σ₁ = λ² D ∘ G₁`, `G₂ = dyson(g1, Σ₁)`.
pub fn g2<T: Real>(m: &ModelConfig<T>, grid: &FrequencyGrid<T>) -> Result<(KeldyshGF<T>, SelfEnergy<T>)> {
    let g1 = g1(m, grid)?;
    let d = BathPropagator::new(&m.j, &m.tp, grid)?;
    let sigma = nonlinear_self_energy(m, &d, &g1)?;
    Ok((dyson(&g1, &sigma)?, sigma))
}

/// Damped Picard iteration `G ← w dyson(g1, λ² D ∘ G) + (1-w) G` from `G = g1`.
pub fn nca_solve<T: Real>(
    m: &ModelConfig<T>,
    grid: &FrequencyGrid<T>,
    sc: &SolverConfig<T>,
) -> Result<(KeldyshGF<T>, SelfEnergy<T>, SolveTrace)> {
    sc.validate()?;
    let g1 = g1(m, grid)?;
    let d = BathPropagator::new(&m.j, &m.tp, grid)?;
    let mut g = g1.clone();
    let mut history = Vec::new();
    let mut converged = false;
    for n in 0..sc.max_iter {
        let sigma = nonlinear_self_energy(m, &d, &g)?;
        let cand = dyson(&g1, &sigma)?;
        let next = cand.mix(&g, sc.mixing)?;
        let change = next.r().max_abs_diff(g.r())?;
        history.push(change.as_f64());
        g = next;
        if !change.is_finite() {
            break;
        }
        if change < sc.tol {
            converged = true;
            log::debug!("fixed point after {} iterations", n + 1);
            break;
        }
    }
    let sigma = nonlinear_self_energy(m, &d, &g)?;
    let image = dyson(&g1, &sigma)?;
    let trace = SolveTrace {
        iterations: history.len(),
        residual_history: history,
        converged,
        fdr: fdr_check(&g, &m.tp).ok(),
        sum_rule: g.sum_rule().ok().map(|s| s.as_f64()),
        self_consistency: Some(image.r().max_abs_diff(g.r())?.as_f64()),
    };
    if !converged {
        return Err(Error::NotConverged(Box::new(trace)));
    }
    Ok((g.with_beta(Some(m.tp.beta)), sigma, trace))
}

/// `‖a - b‖₂ / ‖b‖₂`.
pub fn relative_gap<T: Real>(a: &ComplexSignal<T>, b: &ComplexSignal<T>) -> Result<f64> {
    let num = a.zip_with(b, |x, y| x - y)?.l2_norm().as_f64();
    let den = b.l2_norm().as_f64();
    Ok(if den > 0.0 { num / den } else { num })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    /// `‖G_B - G_2‖ / ‖G_2‖`
    pub born_g2: f64,
    /// `‖G_B - G_SC‖ / ‖G_SC‖`
    pub born_sc: f64,
    /// `‖G_2 - G_SC‖ / ‖G_SC‖`
    pub g2_sc: f64,
}

impl Gaps {
    pub fn max(&self) -> f64 {
        self.born_g2.max(self.born_sc).max(self.g2_sc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrTriple {
    pub born: FdrReport,
    pub g2: FdrReport,
    pub sc: FdrReport,
}

/// Retarded functions of the three approximations side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable<T> {
    pub born: KeldyshGF<T>,
    pub g2: KeldyshGF<T>,
    pub sc: KeldyshGF<T>,
    pub gaps: Gaps,
    pub fdr: FdrTriple,
    pub trace: SolveTrace,
}

impl<T: Real> CompareTable<T> {
    /// `(ω, G_B,R, G_2,R, G_SC,R)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (T, Complex<T>, Complex<T>, Complex<T>)> + '_ {
        let grid = *self.born.grid();
        (0..grid.len()).map(move |k| {
            (
                grid.omega(k),
                self.born.r().samples()[k],
                self.g2.r().samples()[k],
                self.sc.r().samples()[k],
            )
        })
    }
}

pub fn retarded_compare<T: Real>(
    m: &ModelConfig<T>,
    grid: &FrequencyGrid<T>,
    sc: &SolverConfig<T>,
) -> Result<CompareTable<T>> {
    let (gb, _) = born(m, grid)?;
    let (g2, _) = g2(m, grid)?;
    let (gsc, _, trace) = nca_solve(m, grid, sc)?;
    let gaps = Gaps {
        born_g2: relative_gap(gb.r(), g2.r())?,
        born_sc: relative_gap(gb.r(), gsc.r())?,
        g2_sc: relative_gap(g2.r(), gsc.r())?,
    };
    let fdr = FdrTriple {
        born: fdr_check(&gb, &m.tp)?,
        g2: fdr_check(&g2, &m.tp)?,
        sc: fdr_check(&gsc, &m.tp)?,
    };
    Ok(CompareTable {
        born: gb,
        g2,
        sc: gsc,
        gaps,
        fdr,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    /// Local maxima of `|Re G_R(τ)|` for `τ > 0` above the noise floor.
    pub extrema: usize,
    /// Sign changes of `Re G_R(τ)` over the same window.
    pub sign_changes: usize,
    /// Every maximum after the first is no larger than its predecessor.
    pub envelope_decreasing: bool,
}

impl OscillationReport {
    pub fn is_damped_oscillation(&self) -> bool {
        self.extrema >= 3 && self.sign_changes >= 2 && self.envelope_decreasing
    }
}

/// Shape of the time-domain retarded function of a frequency-domain `g`.
///
/// The window runs from `τ = 0` to half the periodic time span, stopping early
/// once `|G_R|` falls below `1e-4` of its maximum; further out the ringing of
/// the band-limited transform is comparable to the signal. A relative slack of
/// `1e-3` absorbs the sampling jitter of peak heights.
pub fn damped_oscillation<T: Real>(g: &KeldyshGF<T>) -> Result<OscillationReport> {
    let t = g.to_time_domain()?;
    let tg = g.grid().time_grid();
    let z = tg.zero_index();
    let end = z + tg.len() / 4;
    let r: Vec<Complex<f64>> = t.r().samples()[z + 1..end]
        .iter()
        .map(|c| Complex::new(c.re.as_f64(), c.im.as_f64()))
        .collect();
    let peak = r.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let floor = 1e-4 * peak;
    let stop = r.iter().rposition(|c| c.norm() > floor).map_or(0, |p| p + 1);
    let re: Vec<f64> = r[..stop].iter().map(|c| c.re).collect();
    let mut maxima = Vec::new();
    for k in 1..re.len().saturating_sub(1) {
        let (a, b, c) = (re[k - 1].abs(), re[k].abs(), re[k + 1].abs());
        if b >= a && b > c {
            maxima.push(b);
        }
    }
    let sign_changes = re.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let envelope_decreasing = maxima.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-3));
    Ok(OscillationReport {
        extrema: maxima.len(),
        sign_changes,
        envelope_decreasing,
    })
}
