use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use keldysh_core::keldysh::{KeldyshGF, SpectralFunction};
use keldysh_core::numerics::{FrequencyGrid, ThermalParams};
use keldysh_nca::FileConfig;
use serde_json::Value;
use tempfile::TempDir;

const SMALL: &str = "[grid]\nomega_max = 20.0\nn = 1024\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_keldysh-nca"))
}

/// Runs in `dir` with the given config text and `--out dir/out`.
fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    bin()
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn report(dir: &Path, command: &str) -> Value {
    let text = fs::read_to_string(dir.join("out").join(format!("{command}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn printed_defaults_parse_back() {
    let o = bin().arg("--print-defaults").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(FileConfig::parse(&text).unwrap(), FileConfig::default());
}

#[test]
fn unknown_key_names_the_key() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "[model]\nomgea = 2.0\n", &["lamb-shift"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ValidationError(model.omgea)"), "{}", stderr(&o));
}

#[test]
fn negative_coupling_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), SMALL, &["greens", "--lambda-sq", "-0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ValidationError(lambda_sq): must be ≥ 0"), "{}", stderr(&o));
}

#[test]
fn syntax_error_reports_the_line() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "[model]\n\nomega0 = = 1\n", &["lamb-shift"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ParseError at line 3"), "{}", stderr(&o));
}

#[test]
fn thermal_fixture_passes_fdr_check() {
    let tmp = TempDir::new().unwrap();
    let grid = FrequencyGrid::new(20.0, 1024).unwrap();
    let rho = SpectralFunction::from_fn(grid, |w: f64| {
        let l = |x: f64| 0.3 / std::f64::consts::PI / (x * x + 0.09);
        l(w - 1.0) - l(w + 1.0)
    });
    let g = KeldyshGF::from_spectral(&rho, &ThermalParams::boson(1.0).unwrap()).unwrap();
    let fixture = tmp.path().join("fixture.csv");
    g.write_csv(fs::File::create(&fixture).unwrap()).unwrap();
    let o = run(tmp.path(), SMALL, &["fdr-check", "--input", fixture.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path(), "fdr-check");
    assert!(r["fdr"]["l_inf"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn born_violates_fdr_and_fdr_check_flags_it() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), SMALL, &["greens", "--method", "born", "--lambda-sq", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(report(tmp.path(), "greens")["fdr"]["l_inf"].as_f64().unwrap() >= 0.1);
    let csv = fs::read_to_string(tmp.path().join("out/greens_born.csv")).unwrap();
    assert!(csv.starts_with("omega,re_GR,im_GR,re_GA,im_GA,re_GK,im_GK\n"));

    let o = run(tmp.path(), SMALL, &["fdr-check", "--method", "born", "--lambda-sq", "0.2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exhausted_iterations_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = format!("{SMALL}[solver]\nmax_iter = 2\n");
    let o = run(tmp.path(), &cfg, &["greens", "--method", "nca"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let r = report(tmp.path(), "greens");
    assert_eq!(r["trace"]["iterations"], 2);
    assert_eq!(r["trace"]["converged"], false);
}

#[test]
fn compare_writes_the_table_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), SMALL, &["compare", "--lambda-sq", "0.02"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read(tmp.path().join("out/compare.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "omega,re_GBR,im_GBR,re_G2R,im_G2R,re_GSCR,im_GSCR");
    assert_eq!(lines.clone().count(), 1024);
    for line in lines {
        assert!(line.split(',').all(|v| v.parse::<f64>().unwrap().is_finite()));
    }
    let r = report(tmp.path(), "compare");
    assert!(r["trace"]["converged"].as_bool().unwrap());
    assert!(r["gaps"]["g2_sc"].as_f64().unwrap() < 0.05);

    run(tmp.path(), SMALL, &["compare", "--lambda-sq", "0.02"]);
    assert_eq!(fs::read(tmp.path().join("out/compare.csv")).unwrap(), first);
}

#[test]
fn weak_corr_satisfies_kms() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "[thermal]\nbeta = 2.0\neta = 1\n", &["weak-corr"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path(), "weak-corr");
    assert!(r["kms"]["l_inf"].as_f64().unwrap() <= 1e-12);
    let spec = fs::read_to_string(tmp.path().join("out/weak_corr_lesser_spectrum.csv")).unwrap();
    assert!(spec.starts_with("omega,S\n"));
    let time = fs::read_to_string(tmp.path().join("out/weak_corr_lesser_time.csv")).unwrap();
    assert!(time.starts_with("tau,re_C,im_C\n"));
}

#[test]
fn fermions_are_refused_by_the_solvers() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "[thermal]\neta = 1\n", &["greens"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ValidationError(eta)"));
}

#[test]
fn property_check_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let args = ["property-check", "--seed", "11", "--cases", "5"];
    let o = run(tmp.path(), SMALL, &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read(tmp.path().join("out/property_check.csv")).unwrap();
    run(tmp.path(), SMALL, &args);
    assert_eq!(fs::read(tmp.path().join("out/property_check.csv")).unwrap(), first);
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/property-check.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["grid"]["n"], 1024);
}

#[test]
fn tabulated_density_is_read_relative_to_the_config() {
    let tmp = TempDir::new().unwrap();
    let table: String = (0..=200)
        .map(|i| {
            let w = i as f64 * 0.1;
            format!("{w} {}\n", std::f64::consts::PI * w / (1.0 + w * w))
        })
        .collect();
    fs::write(tmp.path().join("j.dat"), format!("# omega J\n{table}")).unwrap();
    let cfg = format!("{SMALL}[j]\nkind = \"tabulated\"\nfile = \"j.dat\"\n");
    let o = run(tmp.path(), &cfg, &["lamb-shift"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(tmp.path(), "[j]\nkind = \"tabulated\"\n", &["lamb-shift"]);
    assert!(stderr(&o).contains("ValidationError(j.file)"));
}
