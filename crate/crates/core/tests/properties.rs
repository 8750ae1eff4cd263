use std::f64::consts::PI;

use keldysh_core::bath::{lamb_shift, BathPropagator, SpectralDensity};
use keldysh_core::keldysh::{circ_frequency, dyson, fdr_check, KeldyshGF, SpectralFunction};
use keldysh_core::numerics::{
    coth_half, occupation, omega_coth_half, principal_value_integral, ComplexSignal, Domain, FrequencyGrid,
    Statistics, ThermalParams,
};
use num_complex::Complex;
use proptest::prelude::*;

fn grid() -> FrequencyGrid<f64> {
    FrequencyGrid::new(20.0, 512).unwrap()
}

/// `w [L(ω-a) - L(ω+a)]`: odd, positive for ω > 0, Lorentzian tails.
fn pair(a: f64, g: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |x| w * g / PI * (1.0 / ((x - a).powi(2) + g * g) - 1.0 / ((x + a).powi(2) + g * g))
}

fn thermal(a: f64, g: f64, w: f64, tp: &ThermalParams<f64>) -> KeldyshGF<f64> {
    KeldyshGF::from_spectral(&SpectralFunction::from_fn(grid(), pair(a, g, w)), tp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_round_trip(seed in any::<u64>()) {
        let g = grid();
        let mut s = seed | 1;
        let mut next = || { s ^= s << 13; s ^= s >> 7; s ^= s << 17; (s % 2001) as f64 / 1000.0 - 1.0 };
        let v: Vec<_> = (0..g.len()).map(|_| Complex::new(next(), next())).collect();
        let x = ComplexSignal::new(g, Domain::Frequency, v).unwrap();
        let back = x.to_time().unwrap().to_frequency().unwrap();
        prop_assert!(back.max_abs_diff(&x).unwrap() < 1e-12);
    }

    #[test]
    fn principal_value_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, w in -15.0..15.0f64) {
        let g = grid();
        let f: Vec<f64> = g.values().iter().map(|&x| (-x * x).exp()).collect();
        let h: Vec<f64> = g.values().iter().map(|&x| x / (1.0 + x * x)).collect();
        let mix: Vec<f64> = f.iter().zip(&h).map(|(p, q)| a * p + b * q).collect();
        let lhs = principal_value_integral(&mix, &g, w).unwrap();
        let rhs = a * principal_value_integral(&f, &g, w).unwrap() + b * principal_value_integral(&h, &g, w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn occupation_obeys_detailed_balance(beta in 0.1..10.0f64, w in 0.01..5.0f64, boson in any::<bool>()) {
        let eta = if boson { Statistics::Boson } else { Statistics::Fermion };
        let tp = ThermalParams::new(beta, eta).unwrap();
        let n = occupation(&tp, w).unwrap();
        let lhs = (beta * w).exp() * n;
        // eta = +1 for fermions, -1 for bosons
        prop_assert!((lhs - (1.0 - tp.eta_value() * n)).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn omega_coth_is_continuous_through_zero(beta in 0.1..10.0f64, w in -1e-4..1e-4f64) {
        let series = 2.0 / beta + beta * w * w / 6.0;
        prop_assert!((omega_coth_half(beta, w) - series).abs() <= 1e-9 * series);
    }

    #[test]
    fn coth_is_odd(beta in 0.1..10.0f64, w in 1e-3..10.0f64) {
        prop_assert_eq!(coth_half(beta, -w), -coth_half(beta, w));
    }

    #[test]
    fn bath_propagator_is_thermal(beta in 0.2..5.0f64, amp in 0.01..5.0f64, cutoff in 0.5..3.0f64) {
        let tp = ThermalParams::boson(beta).unwrap();
        let j = SpectralDensity::ohmic(amp, cutoff).unwrap();
        let d = BathPropagator::new(&j, &tp, &grid()).unwrap();
        prop_assert!(fdr_check(d.as_gf(), &tp).unwrap().l_inf < 1e-12);
    }

    #[test]
    fn lamb_shift_is_even(amp in 0.1..5.0f64, cutoff in 0.5..3.0f64) {
        let g = grid();
        let s = lamb_shift(&SpectralDensity::ohmic(amp, cutoff).unwrap(), &g).unwrap();
        let v = s.values.re();
        let z = g.zero_index();
        for k in 1..z - 2 {
            prop_assert!((v[z + k] - v[z - k]).abs() < 1e-8 * (1.0 + v[z + k].abs()));
        }
    }

    #[test]
    fn contraction_keeps_equilibrium(
        beta in 0.3..3.0f64,
        a1 in 0.3..3.0f64, g1 in 0.2..1.0f64,
        a2 in 0.3..3.0f64, g2 in 0.2..1.0f64,
    ) {
        let tp = ThermalParams::boson(beta).unwrap();
        let (x, y) = (thermal(a1, g1, 1.0, &tp), thermal(a2, g2, 1.0, &tp));
        let s = circ_frequency(&[&x, &y], &[]).unwrap();
        prop_assert!(fdr_check(&s, &tp).unwrap().l_inf < 1e-3);
    }

    #[test]
    fn dyson_keeps_equilibrium(beta in 0.3..3.0f64, a in 0.5..3.0f64, g in 0.2..1.0f64, w in 0.01..0.2f64) {
        let tp = ThermalParams::boson(beta).unwrap();
        let g1 = thermal(a, g, 1.0, &tp);
        // a weak, broad Σ leaves the dressed mode gapped
        let sigma = thermal(2.0, 1.0, w, &tp);
        let out = dyson(&g1, &sigma).unwrap();
        prop_assert!(fdr_check(&out, &tp).unwrap().l_inf < 1e-3);
    }

    #[test]
    fn retarded_and_advanced_are_causal(a in 0.3..3.0f64, g in 0.2..1.0f64, beta in 0.3..3.0f64) {
        let tp = ThermalParams::boson(beta).unwrap();
        let t = thermal(a, g, 1.0, &tp).to_time_domain().unwrap();
        let z = grid().zero_index();
        // n = 0 is the periodic image of τ = 0 and carries θ = 1/2
        prop_assert!(t.r().samples()[1..z].iter().all(|c| c.norm() == 0.0));
        prop_assert!(t.a().samples()[z + 1..].iter().all(|c| c.norm() == 0.0));
    }
}
