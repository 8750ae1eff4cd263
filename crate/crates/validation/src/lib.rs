//! Reference evaluations that share no code path with `keldysh-core`.
//!
//! Everything here is deliberately plain: direct sums instead of FFTs,
//! substitution quadrature instead of singularity subtraction, and closed forms
//! where they exist.

use rand::Rng;

pub fn coth(x: f64) -> f64 {
    x.cosh() / x.sinh()
}

pub fn bose(beta: f64, omega: f64) -> f64 {
    1.0 / ((beta * omega).exp() - 1.0)
}

/// `P∫ f(x)/(ω-x) dx` over the real line, folded onto `t = |x - ω|`:
/// `∫₀^∞ [f(ω-t) - f(ω+t)]/t dt`, integrated by the midpoint rule in `ln t`.
///
/// The integrand on `t > t_max` is assumed to fall as `1/t²`, which holds for
/// any `f` decaying like `1/x`; its contribution is added in closed form.
pub fn dense_pv(f: impl Fn(f64) -> f64, omega: f64, t_max: f64, points: usize) -> f64 {
    let g = |t: f64| (f(omega - t) - f(omega + t)) / t;
    let (s0, s1) = (1e-10f64.ln(), t_max.ln());
    let h = (s1 - s0) / points as f64;
    let mut acc = 0.0;
    for k in 0..points {
        let t = (s0 + (k as f64 + 0.5) * h).exp();
        acc += g(t) * t;
    }
    acc * h + g(t_max) * t_max
}

/// Closed-form Lamb shift `(1/π) P∫ J(x)/(ω-x) dx` of `J = A x/(1+x²)`.
pub fn ohmic_lamb_shift(amplitude: f64, omega: f64) -> f64 {
    -amplitude / (1.0 + omega * omega)
}

/// Bath-density Lorentzian pair `ρ(ω) = w [L(ω-a) - L(ω+a)]`, `L(x) = (γ/π)/(x²+γ²)`.
#[derive(Debug, Clone, Copy)]
pub struct LorentzPair {
    pub centre: f64,
    pub width: f64,
    pub weight: f64,
}

impl LorentzPair {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self {
            centre: rng.gen_range(0.3..3.0),
            width: rng.gen_range(0.2..1.0),
            weight: rng.gen_range(0.5..2.0),
        }
    }

    fn lorentz(&self, x: f64) -> f64 {
        self.width / std::f64::consts::PI / (x * x + self.width * self.width)
    }

    pub fn rho(&self, omega: f64) -> f64 {
        self.weight * (self.lorentz(omega - self.centre) - self.lorentz(omega + self.centre))
    }

    /// `P∫ ρ(x)/x dx`, i.e. `-G_R(0)` of the propagator with this spectral function.
    pub fn static_moment(&self) -> f64 {
        let (a, g) = (self.centre, self.width);
        2.0 * self.weight * a / (a * a + g * g)
    }

    /// `ρ(ω) coth(βω/2)`, with its limit `2ρ'(0)/β` at the origin.
    pub fn rho_coth(&self, beta: f64, omega: f64) -> f64 {
        if omega == 0.0 {
            let (a, g) = (self.centre, self.width);
            let slope = 4.0 * a * g / (std::f64::consts::PI * (a * a + g * g).powi(2));
            2.0 * self.weight * slope / beta
        } else {
            self.rho(omega) * coth(beta * omega / 2.0)
        }
    }
}

/// Symmetric frequency lattice `ω_j = -W + jΔω`, `Δω = 2W/N`.
pub fn lattice(omega_max: f64, n: usize) -> Vec<f64> {
    let dw = 2.0 * omega_max / n as f64;
    (0..n).map(|j| -omega_max + j as f64 * dw).collect()
}

/// Rectangle-rule convolution on the symmetric lattice, truncated to the lattice.
pub fn convolve(f: &[f64], g: &[f64], dw: f64) -> Vec<f64> {
    let n = f.len();
    let half = n as isize / 2;
    (0..n as isize)
        .map(|k| {
            let mut acc = 0.0;
            for j in 0..n as isize {
                let m = k - j + half;
                if (0..n as isize).contains(&m) {
                    acc += f[j as usize] * g[m as usize];
                }
            }
            acc * dw
        })
        .collect()
}

/// Spectral function of the contraction of thermal factors: the sum over
/// odd-sized subsets `S` of the convolution of `ρ_j` (for `j ∈ S`) with
/// `ρ_j coth_j` (for `j ∉ S`).
pub fn contraction_spectrum(rho: &[Vec<f64>], rho_coth: &[Vec<f64>], dw: f64) -> Vec<f64> {
    let l = rho.len();
    let n = rho[0].len();
    let mut out = vec![0.0; n];
    for mask in 0u32..(1 << l) {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let pick = |j: usize| if mask & (1 << j) != 0 { &rho[j] } else { &rho_coth[j] };
        let mut acc = pick(0).clone();
        for j in 1..l {
            acc = convolve(&acc, pick(j), dw);
        }
        out.iter_mut().zip(&acc).for_each(|(o, a)| *o += a);
    }
    out
}

pub fn relative_l1(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum();
    let den: f64 = reference.iter().map(|y| y.abs()).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_pv_reproduces_the_ohmic_closed_form() {
        let j = |x: f64| std::f64::consts::PI * x / (1.0 + x * x);
        for &w in &[-4.0, -1.3, 0.0, 0.7, 2.5] {
            let num = dense_pv(j, w, 1e7, 200_000) / std::f64::consts::PI;
            assert!((num - ohmic_lamb_shift(std::f64::consts::PI, w)).abs() < 1e-6, "{w}: {num}");
        }
    }

    #[test]
    fn convolution_of_lorentzians_adds_widths() {
        let (w, n) = (40.0, 2048);
        let om = lattice(w, n);
        let dw = 2.0 * w / n as f64;
        let l = |g: f64| move |x: f64| g / std::f64::consts::PI / (x * x + g * g);
        let f: Vec<f64> = om.iter().map(|&x| l(0.5)(x)).collect();
        let h: Vec<f64> = om.iter().map(|&x| l(0.7)(x)).collect();
        let c = convolve(&f, &h, dw);
        let exact = l(1.2)(0.0);
        assert!((c[n / 2] - exact).abs() / exact < 2e-2);
    }

    #[test]
    fn static_moment_matches_quadrature() {
        let p = LorentzPair { centre: 0.8, width: 0.3, weight: 1.7 };
        let num = -dense_pv(|x| p.rho(x), 0.0, 1e7, 200_000);
        assert!((num - p.static_moment()).abs() < 1e-6, "{num}");
    }

    #[test]
    fn rho_coth_is_continuous_at_zero() {
        let p = LorentzPair { centre: 1.1, width: 0.4, weight: 1.3 };
        let at0 = p.rho_coth(0.7, 0.0);
        let near = p.rho_coth(0.7, 1e-5);
        assert!((at0 - near).abs() < 1e-8 * at0.abs());
    }
}
