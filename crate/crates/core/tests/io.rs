use num::BigRational;
use serde_json::{json, Value};
use virialkit::inversion::GCState;
use virialkit::io::{bell_check, handle_request, identity_suite, tree_oracle_check, Mode, Request, SpeciesFile};
use virialkit::{Energy, Error, Rational};

fn rods_line() -> SpeciesFile {
    SpeciesFile::from_json_str(
        r#"{"species": [
            {"id": 0, "weight": 0.5, "payload": {"position": [0.0]}},
            {"id": 1, "weight": 0.5, "payload": {"position": [0.5]}},
            {"id": 2, "weight": 0.5, "payload": {"position": [1.5]}}],
           "potential": {"kind": "hard_rod", "params": {"a": 1.0}}}"#,
    )
    .unwrap()
}

fn request(op: &str, n: usize, inputs: Value) -> Request {
    serde_json::from_value(json!({ "state": {}, "N": n, "op": op, "inputs": inputs })).unwrap()
}

fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn hard_rod_overlaps_are_strict() {
    let v = rods_line().energies().unwrap();
    assert!(v[0][1].is_hard_core() && v[1][0].is_hard_core());
    // separation exactly a does not overlap
    assert_eq!(v[1][2], Energy::Finite(0.0));
    assert_eq!(v[0][2], Energy::Finite(0.0));
    assert!((0..3).all(|i| v[i][i].is_hard_core()));
}

#[test]
fn sphere_radii_fall_back_to_default() {
    let f = SpeciesFile::from_json_str(
        r#"{"species": [
            {"id": 0, "weight": 1, "payload": {"position": [0, 0], "radius": 0.2}},
            {"id": 1, "weight": 1, "payload": {"position": [0.65, 0]}}],
           "potential": {"kind": "hard_sphere", "params": {"radius": 0.5}}}"#,
    )
    .unwrap();
    assert!(f.energies().unwrap()[0][1].is_hard_core());
    let g = SpeciesFile::from_json_str(
        r#"{"species": [{"id": 0, "weight": 1, "payload": {"position": [0, 0]}}],
           "potential": {"kind": "hard_sphere", "params": {}}}"#,
    )
    .unwrap();
    assert!(matches!(g.energies(), Err(Error::Input(_))));
}

#[test]
fn crossing_planar_rods_exclude_each_other() {
    let f = SpeciesFile::from_json_str(
        r#"{"species": [
            {"id": 0, "weight": 1, "payload": {"position": [0, 0], "orientation": 0}},
            {"id": 1, "weight": 1, "payload": {"position": [0.2, 0.1], "orientation": 1.5707963267948966}},
            {"id": 2, "weight": 1, "payload": {"position": [0, 0.5], "orientation": 0}}],
           "potential": {"kind": "rods2d", "params": {"length": 1.0}}}"#,
    )
    .unwrap();
    let v = f.energies().unwrap();
    assert!(v[0][1].is_hard_core());
    assert!(!v[0][2].is_hard_core());
}

#[test]
fn ids_must_be_contiguous() {
    let f = SpeciesFile::from_json_str(
        r#"{"species": [{"id": 1, "weight": 1}], "potential": {"kind": "matrix", "params": {"v": [[0]]}}}"#,
    )
    .unwrap();
    assert!(matches!(f.space(), Err(Error::Input(_))));
}

#[test]
fn matrix_energies_accept_infinity_literal() {
    let f = SpeciesFile::from_json_str(
        r#"{"species": [{"id": 0, "weight": 1}, {"id": 1, "weight": 1}],
           "potential": {"kind": "matrix", "params": {"v": [[0.5, "inf"], ["inf", 1]]}}}"#,
    )
    .unwrap();
    let v = f.energies().unwrap();
    assert_eq!(v[0][0], Energy::Finite(0.5));
    assert!(v[0][1].is_hard_core());
}

#[test]
fn exact_density_matches_hand_enumeration() {
    // admissible sets: {}, {0}, {1}, {2}, {0,2}, {1,2}; masses w z = 1/4, 1/6, 1/8
    let file = rods_line();
    let z = json!(["1/2", "1/3", "1/4"]);
    let xi = handle_request(&request("xi_exact", 3, json!({ "z": z })), &file, Mode::Rational).unwrap();
    assert_eq!(xi["value"], "51/32");
    let rho = handle_request(&request("density_exact", 3, json!({ "z": z, "q": 0 })), &file, Mode::Rational).unwrap();
    assert_eq!(rho["value"], "6/17");
}

#[test]
fn float_density_agrees_with_series_to_truncation_order() {
    let file = rods_line();
    let eps: f64 = 1e-3;
    let z = json!([eps, eps, eps]);
    let exact = handle_request(&request("density_exact", 4, json!({ "z": z, "q": 2 })), &file, Mode::Float).unwrap();
    let series = handle_request(&request("rho_of_z", 4, json!({ "z": z })), &file, Mode::Float).unwrap();
    let diff = exact["value"].as_f64().unwrap() - series["values"][2].as_f64().unwrap();
    assert!(diff.abs() < 10.0 * eps.powi(5), "{diff}");
}

#[test]
fn every_operation_dispatches() {
    let file = rods_line();
    let nu = json!([0.01, 0.01, 0.01]);
    let w = json!([0.1, 0.1, 0.1]);
    let cases = [
        ("rho_of_z", json!({ "z": nu })),
        ("zeta_of_nu", json!({ "nu": nu, "path": "tree" })),
        ("check_pu", json!({ "z": nu, "a": w })),
        ("check_sab", json!({ "nu": nu, "a": w, "b": w })),
        ("check_sb", json!({ "nu": nu, "b": w })),
        ("check_virmb", json!({ "nu": nu, "b": w })),
        ("check_dissym_b", json!({ "z": nu, "a": w, "b": w })),
        ("search_weights", json!({ "nu": nu })),
        ("log_xi_series", json!({ "z": nu })),
        ("pressure_of_nu", json!({ "nu": nu })),
        ("free_energy", json!({ "nu": nu, "m": [1.0, 1.0, 1.0] })),
        ("legendre_residual", json!({ "nu": nu, "m": [1.0, 1.0, 1.0] })),
        ("identities", json!({})),
        ("dissymmetry", json!({})),
        ("tree_oracle", json!({})),
        ("stability", json!({ "n_check": 4 })),
    ];
    for (op, inputs) in cases {
        let out = handle_request(&request(op, 3, inputs), &file, Mode::Float).unwrap_or_else(|e| panic!("{op}: {e}"));
        assert_eq!(out["op"], op);
        if let Some(p) = out.get("passed") {
            assert_eq!(p, true, "{op}: {out}");
        }
    }
    let err = handle_request(&request("no_such_op", 3, json!({})), &file, Mode::Float);
    assert!(matches!(err, Err(Error::Input(_))));
    let err = handle_request(&request("rho_of_z", 3, json!({ "z": nu })), &file, Mode::Rational);
    assert!(matches!(err, Err(Error::Input(m)) if m.contains("float mode")));
    let err = handle_request(&request("check_pu", 3, json!({ "z": nu })), &file, Mode::Float);
    assert!(matches!(err, Err(Error::Input(_))));
}

#[test]
fn identity_suite_is_exact_on_fixture() {
    let file = rods_line();
    let st = GCState::<Rational>::new(&file.potential().unwrap(), file.space().unwrap(), 4).unwrap();
    let reports = identity_suite(&st, 0.0).unwrap();
    assert_eq!(reports.len(), 10);
    assert!(reports.iter().all(|r| r.passed && r.exact_zero), "{reports:?}");
    assert!(tree_oracle_check(&st, 4).unwrap().exact_zero);
}

#[test]
fn bell_numbers_from_exponential() {
    let r = bell_check(8).unwrap();
    assert!(r.passed && r.exact_zero);
    assert_eq!(r.per_order.len(), 9);
}

#[test]
fn rational_inputs_are_parsed_exactly() {
    let file = rods_line();
    let out =
        handle_request(&request("log_xi_series", 2, json!({ "z": ["1/10", 0, 0] })), &file, Mode::Rational).unwrap();
    // single allowed species: log(1 + m) to order 2 with m = 1/20
    let m = ratio(1, 20);
    let expect = m.clone() - m.clone() * m / ratio(2, 1);
    assert_eq!(out["value"], virialkit::Scalar::to_json(&expect));
}
