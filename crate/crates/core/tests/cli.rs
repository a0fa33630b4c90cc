use std::path::{Path, PathBuf};
use std::process::Command;

use responsum::cli::{parse_config, RunConfig, EXIT_NON_CONVERGENCE, EXIT_OK, EXIT_VALIDATION};
use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn responsum(args: &[&str], out: &Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_responsum"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    status.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_linear_writes_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("linear.json");
    assert_eq!(responsum(&["solve", "--config", cfg.to_str().unwrap()], dir.path()), EXIT_OK);
    let sol = json(&dir.path().join("solution.json"));
    let u1 = sol["modes"].as_array().unwrap().iter().find(|m| m["nu"] == serde_json::json!([1])).unwrap();
    assert_eq!(u1["re"][0].as_f64().unwrap(), 0.0);
    assert!((u1["im"][0].as_f64().unwrap() + 0.1).abs() < 1e-16);
    assert!(sol["residual"]["sup"].as_f64().unwrap() <= 1e-15);
}

#[test]
fn oracle_matches_recursion_from_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("cubic.json");
    let code = responsum(&["oracle", "--config", cfg.to_str().unwrap(), "--k", "4", "--nu", "3"], dir.path());
    assert_eq!(code, EXIT_OK);
    let r = json(&dir.path().join("oracle.json"));
    assert!(r["abs_diff"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["counting_checks"]["holding"], r["counting_checks"]["topologies"]);
}

#[test]
fn bounds_reports_the_small_divisor() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("forced_potential.json");
    assert_eq!(responsum(&["bounds", "--config", cfg.to_str().unwrap(), "--N", "2"], dir.path()), EXIT_OK);
    let r = json(&dir.path().join("bounds.json"));
    let s = r["small_divisors"]["sN"].as_f64().unwrap();
    assert!((s - (2f64.sqrt() - 1.0)).abs() < 1e-12);
}

#[test]
fn sweep_and_integrate_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("linear.json");
    assert_eq!(responsum(&["sweep", "--config", cfg.to_str().unwrap()], dir.path()), EXIT_OK);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("epsilon,zeta_1,H_residual,u_sup_norm,newton_iters,status"));
    assert_eq!(responsum(&["integrate", "--config", cfg.to_str().unwrap()], dir.path()), EXIT_OK);
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 4002);
}

#[test]
fn runs_are_byte_identical() {
    let cfg = config("cubic.json");
    for (cmd, file) in [("solve", "solution.json"), ("verify", "report.json"), ("sweep", "sweep.csv"), ("oracle", "oracle.json")] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(responsum(&[cmd, "--config", cfg.to_str().unwrap()], a.path()), EXIT_OK);
        assert_eq!(responsum(&[cmd, "--config", cfg.to_str().unwrap()], b.path()), EXIT_OK);
        let (x, y) = (std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
        assert_eq!(x, y, "{cmd}");
    }
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = config("cubic.json");
    let c = cubic.to_str().unwrap();
    assert_eq!(responsum(&["solve", "--config", c, "--epsilon", "100"], dir.path()), EXIT_NON_CONVERGENCE);
    assert_eq!(responsum(&["solve", "--config", c, "--epsilon", "-0.1"], dir.path()), EXIT_VALIDATION);
    assert_eq!(responsum(&["oracle", "--config", c, "--k", "7"], dir.path()), EXIT_VALIDATION);

    let bad = dir.path().join("bad.json");
    let mut v = json(&cubic);
    v["system"]["m"] = 2.into();
    v["system"]["damping"] = serde_json::json!([[1.0, 2.0], [0.0, 1.0]]);
    v["system"]["potential"] = "0.5 x1^2 + 0.5 x2^2".into();
    v["system"]["forcing"] = serde_json::json!([{"nu": [1], "re": [1.0, 0.0]}]);
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(responsum(&["solve", "--config", bad.to_str().unwrap()], dir.path()), EXIT_VALIDATION);
    std::fs::write(&bad, "{ \"system\": ").unwrap();
    assert_eq!(responsum(&["solve", "--config", bad.to_str().unwrap()], dir.path()), EXIT_VALIDATION);
}

#[test]
fn shipped_configs_round_trip() {
    for name in ["linear.json", "cubic.json", "forced_potential.json"] {
        let cfg = parse_config(&config(name)).unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg, "{name}");
    }
}

mod round_trip {
    use proptest::prelude::*;
    use responsum::cli::{ModeVector, PolyInput, PotentialInput, RunConfig, Term};

    fn base() -> RunConfig {
        responsum::cli::parse_config(&super::config("cubic.json")).unwrap()
    }

    proptest! {
        #[test]
        fn random_configs_round_trip(
            eps in 1e-6f64..1.0,
            k_max in 1usize..20,
            n_trunc in proptest::option::of(1usize..40),
            coeffs in proptest::collection::vec(-10.0f64..10.0, 1..4),
            f_re in -5.0f64..5.0,
            f_im in proptest::option::of(-5.0f64..5.0),
            eps_list in proptest::collection::vec(1e-6f64..1.0, 0..5),
        ) {
            let mut cfg = base();
            cfg.solve.epsilon = eps;
            cfg.solve.k_max = k_max;
            cfg.solve.n_trunc = n_trunc;
            let mut terms = vec![Term { exp: vec![2], coeff: 0.5 }];
            terms.extend(coeffs.iter().enumerate().map(|(i, c)| Term { exp: vec![i as u32 + 3], coeff: *c }));
            cfg.system.potential = PotentialInput::Poly(PolyInput::Terms(terms));
            cfg.system.forcing = vec![ModeVector { nu: vec![1], re: vec![f_re], im: f_im.map(|x| vec![x]) }];
            cfg.sweep.epsilon_list = eps_list;
            let text = cfg.to_json();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
