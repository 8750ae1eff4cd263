use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use keldysh_core::bath::{lamb_shift, SpectralDensity};
use keldysh_core::keldysh::{circ_frequency, dyson, fdr_check, FdrReport, KeldyshGF, SpectralFunction};
use keldysh_core::nca::{self, SolveTrace};
use keldysh_core::numerics::{coth_half, ComplexSignal, Domain, FrequencyGrid, ThermalParams};
use keldysh_core::weakcorr::{
    commutator_sum_rule, kms_check, mode_correlator, spin_correlator, CorrelatorResult, LinearModeModel,
    ModeCorrelator, SpinBosonModel, SpinCorrelator,
};
use keldysh_core::Error as CoreError;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::Artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Born,
    G2,
    Nca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    CheckFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 2,
            Status::CheckFailed => 3,
        }
    }
}

/// What a command hands back to the driver.
pub struct Outcome {
    pub status: Status,
    pub report: Value,
    pub summary: Vec<String>,
}

/// Command-specific options beyond the config file.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub method: Option<Method>,
    pub seed: u64,
    pub cases: usize,
    pub input: Option<std::path::PathBuf>,
}

fn params(cfg: &RunConfig) -> Value {
    let f = &cfg.file;
    json!({
        "omega0": f.model.omega0,
        "beta": f.thermal.beta,
        "eta": f.thermal.eta,
        "lambda_sq": f.model.lambda_sq,
        "linear_scale": f.model.linear_scale,
        "omega_max": f.grid.omega_max,
        "n": f.grid.n,
    })
}

fn fdr_json(r: &FdrReport) -> Value {
    json!({ "l_inf": r.l_inf, "l2": r.l2 })
}

fn trace_json(t: &SolveTrace) -> Value {
    json!({
        "iterations": t.iterations,
        "converged": t.converged,
        "residual_history": t.residual_history,
        "sum_rule": t.sum_rule,
        "self_consistency": t.self_consistency,
    })
}

fn correlator_files(art: &mut Artifacts, stem: &str, r: &CorrelatorResult<f64>) -> Result<()> {
    art.csv(
        &format!("{stem}_spectrum.csv"),
        "omega,S",
        r.positive_spectrum().map(|(w, s)| vec![w, s]),
    )?;
    let tg = r.time_series.time_grid();
    art.csv(
        &format!("{stem}_time.csv"),
        "tau,re_C,im_C",
        r.time_series
            .samples()
            .iter()
            .enumerate()
            .map(|(n, c)| vec![tg.tau(n), c.re, c.im]),
    )
}

/// `max |S_< - e^{-βΩ} S_>| / max S_>` together with the pointwise form.
fn kms_residual(l: &CorrelatorResult<f64>, g: &CorrelatorResult<f64>, tp: &ThermalParams<f64>) -> Result<(f64, f64)> {
    let r = kms_check(l, g, tp)?;
    Ok((r.abs_l_inf / g.spectrum.max_abs(), r.l_inf))
}

fn kms_outcome(cfg: &RunConfig, label: &str, residual: f64, pointwise: f64) -> (Status, String) {
    let tol = cfg.file.checks.kms_tol;
    let status = if residual <= tol { Status::Ok } else { Status::CheckFailed };
    (
        status,
        format!("{label}: KMS residual {residual:.3e} (tolerance {tol:.1e}), pointwise {pointwise:.3e}"),
    )
}

pub fn weak_corr(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let j = cfg.model.j.scaled(cfg.model.lambda_sq);
    let m = LinearModeModel::new(cfg.model.omega0, j, cfg.thermal)?;
    let lesser = mode_correlator(&m, &cfg.grid, ModeCorrelator::Lesser)?;
    let greater = mode_correlator(&m, &cfg.grid, ModeCorrelator::Greater)?;
    correlator_files(art, "weak_corr_lesser", &lesser)?;
    correlator_files(art, "weak_corr_greater", &greater)?;
    let (residual, pointwise) = kms_residual(&lesser, &greater, &cfg.thermal)?;
    let sum_rule = commutator_sum_rule(&m, &cfg.grid)?;
    let (status, line) = kms_outcome(cfg, "mode", residual, pointwise);
    Ok(Outcome {
        status,
        report: json!({
            "command": "weak-corr",
            "params": params(cfg),
            "kms": { "l_inf": residual, "pointwise_l_inf": pointwise },
            "equal_time": { "lesser": lesser.equal_time, "greater": greater.equal_time },
            "tail_estimate": { "lesser": lesser.tail_estimate, "greater": greater.tail_estimate },
            "commutator_sum_rule": sum_rule,
        }),
        summary: vec![
            line,
            format!("C_<(0) = {:.8}, C_>(0) = {:.8}", lesser.equal_time, greater.equal_time),
            format!("commutator sum rule {sum_rule:.8}"),
        ],
    })
}

pub fn spin_corr(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let j = cfg.model.j.scaled(cfg.model.lambda_sq);
    let m = SpinBosonModel::new(cfg.model.omega0, j, cfg.thermal)?.with_shift_scale(cfg.file.model.shift_scale);
    let pm = spin_correlator(&m, &cfg.grid, SpinCorrelator::PlusMinus)?;
    let mp = spin_correlator(&m, &cfg.grid, SpinCorrelator::MinusPlus)?;
    correlator_files(art, "spin_corr_plus_minus", &pm)?;
    correlator_files(art, "spin_corr_minus_plus", &mp)?;
    let (residual, pointwise) = kms_residual(&pm, &mp, &m.tp)?;
    let (status, line) = kms_outcome(cfg, "spin", residual, pointwise);
    Ok(Outcome {
        status,
        report: json!({
            "command": "spin-corr",
            "params": params(cfg),
            "kms": { "l_inf": residual, "pointwise_l_inf": pointwise },
            "equal_time": { "plus_minus": pm.equal_time, "minus_plus": mp.equal_time },
            "shift_scale": m.shift_scale,
        }),
        summary: vec![
            line,
            format!("<σ+σ->(0) = {:.8}, <σ-σ+>(0) = {:.8}", pm.equal_time, mp.equal_time),
        ],
    })
}

pub fn lamb(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let j = &cfg.model.j;
    let s = lamb_shift(j, &cfg.grid)?;
    let grid = cfg.grid;
    art.csv(
        "lamb_shift.csv",
        "omega,sigma",
        (0..grid.len()).map(|k| vec![grid.omega(k), s.values.samples()[k].re]),
    )?;
    let mut report = json!({
        "command": "lamb-shift",
        "params": params(cfg),
        "clamped_bins": s.clamped,
    });
    let mut summary = vec![format!("{} clamped edge bins", s.clamped.len())];
    if let SpectralDensity::OhmicLorentzian { amplitude, cutoff } = *j {
        // closed form of (1/π) P∫ J/(ω-x) for J = A u/(1+u²), u = x/cutoff
        let mut dev = 0.0f64;
        for k in 0..grid.len() {
            let w = grid.omega(k);
            if w.abs() <= 5.0 * cutoff {
                let u = w / cutoff;
                dev = dev.max((s.values.samples()[k].re + amplitude / (1.0 + u * u)).abs());
            }
        }
        report["closed_form_max_dev"] = json!(dev);
        summary.push(format!("max deviation from -A/(1+(ω/ωc)²) on |ω| ≤ 5ωc: {dev:.3e}"));
    }
    Ok(Outcome {
        status: Status::Ok,
        report,
        summary,
    })
}

/// Runs one solver; a non-converged NCA still yields its trace.
fn solve(cfg: &RunConfig, method: Method) -> Result<(Option<KeldyshGF<f64>>, Option<SolveTrace>)> {
    cfg.require_boson()?;
    match method {
        Method::Born => Ok((Some(nca::born(&cfg.model, &cfg.grid)?.0), None)),
        Method::G2 => Ok((Some(nca::g2(&cfg.model, &cfg.grid)?.0), None)),
        Method::Nca => match nca::nca_solve(&cfg.model, &cfg.grid, &cfg.solver) {
            Ok((g, _, trace)) => Ok((Some(g), Some(trace))),
            Err(CoreError::NotConverged(trace)) => Ok((None, Some(*trace))),
            Err(e) => Err(e.into()),
        },
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Born => "born",
        Method::G2 => "g2",
        Method::Nca => "nca",
    }
}

pub fn greens(cfg: &RunConfig, art: &mut Artifacts, method: Method) -> Result<Outcome> {
    let (g, trace) = solve(cfg, method)?;
    let mut report = json!({
        "command": "greens",
        "method": method,
        "params": params(cfg),
        "trace": trace.as_ref().map(trace_json),
    });
    let mut summary = Vec::new();
    if let Some(t) = &trace {
        summary.push(format!("NCA: {} iterations, converged {}", t.iterations, t.converged));
    }
    let Some(g) = g else {
        summary.push("fixed point not reached; no Green's function written".into());
        return Ok(Outcome {
            status: Status::NotConverged,
            report,
            summary,
        });
    };
    art.greens_csv(&format!("greens_{}.csv", method_name(method)), &g)?;
    let fdr = fdr_check(&g, &cfg.model.tp)?;
    let sum_rule = g.sum_rule()?;
    report["fdr"] = fdr_json(&fdr);
    report["sum_rule"] = json!(sum_rule);
    let verdict = if fdr.passes(cfg.file.checks.fdr_tol) { "satisfied" } else { "violated" };
    summary.push(format!("FDR {verdict}: relative residual {:.3e}", fdr.l_inf));
    summary.push(format!("sum rule ∫ρ = {sum_rule:.6}"));
    Ok(Outcome {
        status: Status::Ok,
        report,
        summary,
    })
}

/// Reads `omega,re_GR,im_GR,re_GA,im_GA,re_GK,im_GK`, as written by `greens`.
pub fn read_greens_csv(path: &Path, beta: f64) -> Result<KeldyshGF<f64>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expect = ["omega", "re_GR", "im_GR", "re_GA", "im_GA", "re_GK", "im_GK"];
    if header != expect {
        bail!("{}: expected columns {}", path.display(), expect.join(","));
    }
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let mut row = [0.0; 7];
        for (c, field) in rec.iter().enumerate() {
            row[c] = field
                .trim()
                .parse()
                .map_err(|e| anyhow!("{}: line {}: {e}", path.display(), i + 2))?;
        }
        rows.push(row);
    }
    let n = rows.len();
    let omega_max = -rows.first().ok_or_else(|| anyhow!("{}: no data rows", path.display()))?[0];
    let grid = FrequencyGrid::new(omega_max, n)?;
    for (k, r) in rows.iter().enumerate() {
        if (r[0] - grid.omega(k)).abs() > 1e-9 * omega_max {
            bail!("{}: omega column is not a symmetric lattice (row {})", path.display(), k + 2);
        }
    }
    let col = |re: usize| {
        let v = rows.iter().map(|r| Complex::new(r[re], r[re + 1])).collect();
        ComplexSignal::new(grid, Domain::Frequency, v)
    };
    Ok(KeldyshGF::new(col(1)?, col(3)?, col(5)?, Some(beta))?)
}

pub fn fdr(cfg: &RunConfig, art: &mut Artifacts, opts: &Options) -> Result<Outcome> {
    let method = opts.method.unwrap_or(Method::Nca);
    let (g, trace, source) = match &opts.input {
        Some(p) => (Some(read_greens_csv(p, cfg.thermal.beta)?), None, json!(p)),
        None => {
            let (g, t) = solve(cfg, method)?;
            (g, t, json!(method))
        }
    };
    let mut report = json!({
        "command": "fdr-check",
        "source": source,
        "params": params(cfg),
        "trace": trace.as_ref().map(trace_json),
    });
    let Some(g) = g else {
        return Ok(Outcome {
            status: Status::NotConverged,
            report,
            summary: vec!["fixed point not reached; nothing to check".into()],
        });
    };
    let tp = ThermalParams::boson(cfg.thermal.beta)?;
    let r = fdr_check(&g, &tp)?;
    let ratio: Vec<Vec<f64>> = r
        .ratio
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|x| vec![g.grid().omega(k), x]))
        .collect();
    art.csv("fdr_ratio.csv", "omega,ratio", ratio)?;
    report["fdr"] = fdr_json(&r);
    report["fdr_abs"] = json!({ "l_inf": r.abs_l_inf, "l2": r.abs_l2 });
    report["hermiticity_defect"] = json!(g.hermiticity_defect()?);
    let tol = cfg.file.checks.fdr_tol;
    let ok = r.passes(tol);
    report["pass"] = json!(ok);
    Ok(Outcome {
        status: if ok { Status::Ok } else { Status::CheckFailed },
        report,
        summary: vec![format!(
            "FDR residual {:.3e} (tolerance {tol:.1e}): {}",
            r.l_inf,
            if ok { "pass" } else { "FAIL" }
        )],
    })
}

pub fn compare(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    cfg.require_boson()?;
    let table = match nca::retarded_compare(&cfg.model, &cfg.grid, &cfg.solver) {
        Ok(t) => t,
        Err(CoreError::NotConverged(trace)) => {
            return Ok(Outcome {
                status: Status::NotConverged,
                report: json!({
                    "command": "compare",
                    "params": params(cfg),
                    "trace": trace_json(&trace),
                }),
                summary: vec![format!("NCA did not converge in {} iterations", trace.iterations)],
            });
        }
        Err(e) => return Err(e.into()),
    };
    art.csv(
        "compare.csv",
        "omega,re_GBR,im_GBR,re_G2R,im_G2R,re_GSCR,im_GSCR",
        table.rows().map(|(w, b, g2, sc)| vec![w, b.re, b.im, g2.re, g2.im, sc.re, sc.im]),
    )?;
    let g = table.gaps;
    Ok(Outcome {
        status: Status::Ok,
        report: json!({
            "command": "compare",
            "params": params(cfg),
            "gaps": g,
            "fdr": {
                "born": fdr_json(&table.fdr.born),
                "g2": fdr_json(&table.fdr.g2),
                "sc": fdr_json(&table.fdr.sc),
            },
            "trace": trace_json(&table.trace),
        }),
        summary: vec![
            format!(
                "relative L2 gaps: B-2 {:.4}, B-SC {:.4}, 2-SC {:.4}",
                g.born_g2, g.born_sc, g.g2_sc
            ),
            format!(
                "FDR residuals: B {:.3e}, 2 {:.3e}, SC {:.3e}",
                table.fdr.born.l_inf, table.fdr.g2.l_inf, table.fdr.sc.l_inf
            ),
            format!("NCA: {} iterations", table.trace.iterations),
        ],
    })
}

/// `w [L(ω-a) - L(ω+a)]` with random centre, width and weight.
struct Pair {
    a: f64,
    g: f64,
    w: f64,
}

impl Pair {
    fn random<R: Rng>(rng: &mut R) -> Self {
        Self {
            a: rng.gen_range(0.3..3.0),
            g: rng.gen_range(0.2..1.0),
            w: rng.gen_range(0.5..2.0),
        }
    }

    fn rho(&self, x: f64) -> f64 {
        let l = |y: f64| self.g / std::f64::consts::PI / (y * y + self.g * self.g);
        self.w * (l(x - self.a) - l(x + self.a))
    }

    /// `P∫ ρ(x)/x dx`.
    fn static_moment(&self) -> f64 {
        2.0 * self.w * self.a / (self.a * self.a + self.g * self.g)
    }

    fn thermal(&self, grid: FrequencyGrid<f64>, tp: &ThermalParams<f64>) -> Result<KeldyshGF<f64>> {
        Ok(KeldyshGF::from_spectral(&SpectralFunction::from_fn(grid, |x| self.rho(x)), tp)?)
    }
}

/// Randomised closure checks: contraction and Dyson equation of thermal
/// inputs stay thermal, and the coth composition identity.
pub fn property_check(cfg: &RunConfig, art: &mut Artifacts, opts: &Options) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let grid = cfg.grid;
    let tol = cfg.file.checks.fdr_tol;
    let mut rows = Vec::with_capacity(opts.cases);
    let (mut circ_worst, mut dyson_worst, mut coth_worst) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..opts.cases {
        let beta = rng.gen_range(0.3..3.0);
        let tp = ThermalParams::boson(beta)?;
        let l = rng.gen_range(2..=3usize);
        let factors = (0..l)
            .map(|_| Pair::random(&mut rng).thermal(grid, &tp))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&KeldyshGF<f64>> = factors.iter().collect();
        let circ = fdr_check(&circ_frequency(&refs, &[])?, &tp)?.l_inf;

        let mode = Pair { w: 1.0, ..Pair::random(&mut rng) };
        let mut bath = Pair { w: rng.gen_range(0.05..0.5), ..Pair::random(&mut rng) };
        // keep the dressed mode gapped
        bath.w *= (0.5 / (mode.static_moment() * bath.static_moment())).min(1.0);
        let g = dyson(&mode.thermal(grid, &tp)?, &bath.thermal(grid, &tp)?)?;
        let dy = fdr_check(&g, &tp)?.l_inf;

        let (x, y): (f64, f64) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let (cx, cy) = (coth_half(2.0, x), coth_half(2.0, y));
        let co = (coth_half(2.0, x + y) * (cx + cy) - (cx * cy + 1.0)).abs() / (cx * cy).abs().max(1.0);

        circ_worst = circ_worst.max(circ);
        dyson_worst = dyson_worst.max(dy);
        coth_worst = coth_worst.max(co);
        rows.push(vec![case as f64, beta, l as f64, circ, dy, co]);
    }
    art.csv("property_check.csv", "case,beta,factors,circ_fdr,dyson_fdr,coth_error", rows)?;
    let ok = circ_worst <= tol && dyson_worst <= tol && coth_worst <= 1e-12;
    Ok(Outcome {
        status: if ok { Status::Ok } else { Status::CheckFailed },
        report: json!({
            "command": "property-check",
            "params": params(cfg),
            "seed": opts.seed,
            "cases": opts.cases,
            "worst": { "circ_fdr": circ_worst, "dyson_fdr": dyson_worst, "coth_identity": coth_worst },
            "pass": ok,
        }),
        summary: vec![
            format!("{} cases, seed {}", opts.cases, opts.seed),
            format!("contraction FDR worst {circ_worst:.3e} (tolerance {tol:.1e})"),
            format!("Dyson FDR worst {dyson_worst:.3e} (tolerance {tol:.1e})"),
            format!("coth identity worst {coth_worst:.3e} (tolerance 1e-12)"),
        ],
    })
}

