use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virialkit")).args(args).output().expect("binary runs")
}

fn run_model(sub: &str, model: &str, extra: &[&str]) -> Output {
    let path = fixture(model);
    let mut args = vec![sub, "--model", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn hard_rod_rows_are_exact() {
    let o = run_model("virial", "hard_rods.json", &["--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&o);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][0], "1");
    assert_eq!(r[0][1].parse::<f64>().unwrap(), -2.0);
    assert_eq!(r[1][1].parse::<f64>().unwrap(), -1.5);
    assert!(r.iter().all(|row| row[2] == "exact_1d" && row[3] == "0"));
}

#[test]
fn rational_mode_prints_fractions() {
    let o = run_model("virial", "hard_rods.json", &["--order", "3", "--mode", "rational"]);
    let r = rows(&o);
    assert_eq!(r[1][1], "-3/2");
    assert_eq!(r[2][1], "-4/3");
}

#[test]
fn ideal_gas_rows_vanish() {
    let o = run_model("virial", "ideal.json", &["--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(rows(&o).iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn sphere_first_coefficient_is_minus_excluded_volume() {
    let o = run_model("virial", "hard_spheres3.json", &["--order", "1"]);
    let r = rows(&o);
    let c = 4.0 / 3.0 * std::f64::consts::PI;
    assert!((r[0][1].parse::<f64>().unwrap() + c).abs() < 1e-12);
    assert_eq!(r[0][2], "analytic");
}

#[test]
fn bounds_table_rows() {
    let o = run_model("bounds", "hard_spheres3.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let get = |name: &str| -> f64 {
        rows(&o).iter().find(|r| r[0] == name).unwrap_or_else(|| panic!("row {name}"))[1].parse().unwrap()
    };
    assert!((get("banach_ratio_linear") - 8.0).abs() < 1e-6);
    assert!((get("banach_ratio_quadratic") - 8.0).abs() < 1e-6);
    assert!((0.14476..=0.14478).contains(&get("k")));
    assert!((get("r_star_over_r_0") - 1.2706).abs() < 1e-4);
    assert!(get("one_over_2e") > 0.1839 && get("one_over_2e") < 0.1840);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(rows(&o).iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn selftest_accepts_extra_species_file() {
    let o = run_model("selftest", "matrix3.json", &["--order", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn failing_inversion_exits_one_with_margins() {
    let o = run_model("invert", "profile_refused.json", &["--order", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("species,margin"));
    assert!(err.lines().filter(|l| l.contains(",-")).count() == 3);
}

#[test]
fn passing_inversion_reports_potential() {
    let o = run_model("invert", "profile_ok.json", &["--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&o).len(), 3);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["virial", "--model", "/definitely/missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["virial"]).status.code(), Some(2));
    assert_eq!(run_model("virial", "matrix3.json", &[]).status.code(), Some(2));
}

#[test]
fn capability_limit_exits_three() {
    assert_eq!(run_model("virial", "hard_spheres3.json", &["--order", "5"]).status.code(), Some(3));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("virial_{threads}.csv"));
        let o = run_model(
            "virial",
            "hard_spheres3.json",
            &[
                "--order",
                "3",
                "--samples",
                "20000",
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ],
        );
        assert_eq!(o.status.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
        let out = dir.path().join(format!("mixture_{threads}.json"));
        run_model(
            "mixture",
            "mixture.json",
            &["--order", "3", "--threads", threads, "--format", "json", "--out", out.to_str().unwrap()],
        );
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
}

#[test]
fn request_runs_against_relative_state() {
    let o = run_model("request", "request_density.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["truncated"], false);
    assert!(v["value"].is_string());
}

#[test]
fn rods_and_demo_run() {
    let o = run_model("rods", "rods.json", &["--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("excess_3"));
    let o = run(&["demo", "--k-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&o).len(), 5);
}

#[test]
fn order_guard_can_be_raised_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    let state = fixture("rods_line.json");
    let body =
        serde_json::json!({ "state": state, "N": 7, "op": "pressure_of_nu", "inputs": { "nu": [0.01, 0.01, 0.01] } });
    std::fs::write(&req, body.to_string()).unwrap();
    let cmd = |limit: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_virialkit"));
        c.args(["request", "--model", req.to_str().unwrap()]);
        match limit {
            Some(v) => c.env("VIRIALKIT_MAX_ORDER", v),
            None => c.env_remove("VIRIALKIT_MAX_ORDER"),
        };
        c.output().unwrap().status.code()
    };
    assert_eq!(cmd(None), Some(3));
    assert_eq!(cmd(Some("7")), Some(0));
}
