use keldysh_core::keldysh::fdr_check;
use keldysh_core::nca::{self, BareKeldysh, ModelConfig, SolverConfig};
use keldysh_core::{Error, FrequencyGrid32, FrequencyGrid64, ModelConfig32};

fn grid() -> FrequencyGrid64 {
    FrequencyGrid64::new(20.0, 1024).unwrap()
}

#[test]
fn thermal_solvers_satisfy_the_fdr_and_born_does_not() {
    // the residual of G₂ is discretisation-limited: ~1e-2 at N = 1024, ~3e-4 at 4096
    let grid = FrequencyGrid64::default();
    let m = ModelConfig::default().with_lambda_sq(0.2);
    let (g2, s1) = nca::g2(&m, &grid).unwrap();
    let (gb, _) = nca::born(&m, &grid).unwrap();
    assert!(fdr_check(&s1, &m.tp).unwrap().l_inf < 1e-6);
    assert!(fdr_check(&g2, &m.tp).unwrap().l_inf < 1e-3);
    assert!(fdr_check(&gb, &m.tp).unwrap().l_inf > 0.1);
}

#[test]
fn thermal_bare_keldysh_restores_the_born_fdr() {
    let m = ModelConfig {
        bare_keldysh: BareKeldysh::Thermal,
        ..ModelConfig::default()
    }
    .with_lambda_sq(0.2);
    let (gb, _) = nca::born(&m, &FrequencyGrid64::default()).unwrap();
    assert!(fdr_check(&gb, &m.tp).unwrap().l_inf < 1e-3);
}

#[test]
fn nca_trace_is_consistent() {
    let m = ModelConfig::default();
    let (g, _, trace) = nca::nca_solve(&m, &grid(), &SolverConfig::default()).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.residual_history.len(), trace.iterations);
    assert!(*trace.residual_history.last().unwrap() < 1e-8);
    assert!(trace.self_consistency.unwrap() < 1e-6);
    assert!((g.sum_rule().unwrap() - 1.0).abs() < 0.02);
    assert!(nca::damped_oscillation(&g).unwrap().is_damped_oscillation());
}

#[test]
fn iteration_cap_reports_not_converged() {
    let sc = SolverConfig {
        max_iter: 4,
        ..SolverConfig::default()
    };
    match nca::nca_solve(&ModelConfig::default(), &grid(), &sc) {
        Err(Error::NotConverged(t)) => {
            assert_eq!(t.iterations, 4);
            assert!(!t.converged);
        }
        other => panic!("{:?}", other.map(|r| r.2)),
    }
}

#[test]
fn csv_output_is_byte_stable() {
    let m = ModelConfig::default();
    let write = || {
        let (g, _) = nca::g2(&m, &grid()).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        buf
    };
    let a = write();
    assert_eq!(a, write());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("omega,re_GR,im_GR,re_GA,im_GA,re_GK,im_GK\n"));
    assert_eq!(text.lines().count(), 1025);
}

#[test]
fn single_precision_pipeline_runs() {
    let g32 = FrequencyGrid32::new(20.0, 1024).unwrap();
    let m = ModelConfig32::default();
    let (g2, _) = nca::g2(&m, &g32).unwrap();
    assert!(g2.is_finite());
    assert!((g2.sum_rule().unwrap() - 1.0).abs() < 0.02);
    assert!(fdr_check(&g2, &m.tp).unwrap().l_inf < 1e-2);
}
