use serde::{Deserialize, Serialize};

use crate::bath::spectral_times_coth;
use crate::error::Result;
use crate::keldysh::gf::KeldyshGF;
use crate::numerics::{Domain, ThermalParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub omega_max: f64,
    pub n: usize,
}

/// Residuals of `K = (R - A) coth(βω/2)`.
///
/// `l_inf` and `l2` are relative to `max|K|` and `‖K‖`; the `abs_*` fields are
/// the raw norms. `ratio[j] = K / ((R - A) coth)` where the reference is non-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrReport {
    pub l_inf: f64,
    pub l2: f64,
    pub abs_l_inf: f64,
    pub abs_l2: f64,
    pub beta: f64,
    pub grid: GridInfo,
    #[serde(skip)]
    pub ratio: Vec<Option<f64>>,
}

impl FdrReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.l_inf <= tol
    }
}

pub fn fdr_check<T: Real>(g: &KeldyshGF<T>, tp: &ThermalParams<T>) -> Result<FdrReport> {
    g.r().expect_domain(Domain::Frequency)?;
    let diff = g.r().zip_with(g.a(), |r, a| r - a)?;
    let reference = spectral_times_coth(&diff, tp)?;
    let k = g.k().samples();
    let floor = reference.max_abs().as_f64() * 1e-14;
    let mut max_r = 0.0f64;
    let mut sum_r = 0.0f64;
    let mut ratio = Vec::with_capacity(k.len());
    for (kk, rf) in k.iter().zip(reference.samples()) {
        let r = (kk - rf).norm().as_f64();
        max_r = max_r.max(r);
        sum_r += r * r;
        let den = rf.norm().as_f64();
        ratio.push(if den > floor && den > 0.0 { Some((kk / rf).re.as_f64()) } else { None });
    }
    let k_max = g.k().max_abs().as_f64();
    let k_l2 = g.k().l2_norm().as_f64();
    let rel = |num: f64, den: f64| if den > 0.0 { num / den } else if num > 0.0 { f64::INFINITY } else { 0.0 };
    let abs_l2 = sum_r.sqrt();
    Ok(FdrReport {
        l_inf: rel(max_r, k_max),
        l2: rel(abs_l2, k_l2),
        abs_l_inf: max_r,
        abs_l2,
        beta: tp.beta.as_f64(),
        grid: GridInfo {
            omega_max: g.grid().omega_max().as_f64(),
            n: g.grid().len(),
        },
        ratio,
    })
}
