//! JSON species files, JSON requests against a grand-canonical state, and the
//! exact identity suite.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::applications::rods_intersect;
use crate::error::{Error, Result};
use crate::fps::FormalSeries;
use crate::inversion::{GCState, ZetaPath};
use crate::report::ResidualReport;
use crate::scalar::{Rational, Scalar};
use crate::species::{check_stability, Energy, MeasureVec, PairPotential, Payload, SpeciesSpace};
use crate::tree::{compute_tn, tn_via_trees, verify_fp, verify_fp_prime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub id: usize,
    pub weight: f64,
    #[serde(default)]
    pub payload: Payload,
}

/// How the pair energy matrix is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// Explicit energies; `"inf"` marks a hard core.
    Matrix { v: Vec<Vec<Energy>> },
    /// Points on a line, overlapping when closer than `a`.
    HardRod { a: f64 },
    /// Balls at payload positions with payload radii (or a common `radius`).
    HardSphere {
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Thin planar rods of a common length at payload positions and orientations.
    Rods2d { length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesFile {
    #[serde(default = "one")]
    pub beta: f64,
    pub species: Vec<SpeciesRecord>,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub b_stability: Option<Vec<f64>>,
    #[serde(default)]
    pub b_star: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

fn position(p: &Payload, id: usize, dim: Option<usize>) -> Result<&[f64]> {
    let pos = p.position.as_deref().ok_or_else(|| Error::Input(format!("species {id} has no position")))?;
    if let Some(d) = dim {
        if pos.len() != d {
            return Err(Error::Input(format!("species {id} needs a {d}-dimensional position")));
        }
    }
    Ok(pos)
}

fn hard_if(overlap: bool) -> Energy {
    if overlap {
        Energy::HardCore
    } else {
        Energy::Finite(0.0)
    }
}

impl SpeciesFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn space(&self) -> Result<SpeciesSpace> {
        for (i, s) in self.species.iter().enumerate() {
            if s.id != i {
                return Err(Error::Input(format!(
                    "species ids must be 0..S-1 in order; found {} at position {i}",
                    s.id
                )));
            }
        }
        SpeciesSpace::with_payloads(
            self.species.iter().map(|s| s.weight).collect(),
            self.species.iter().map(|s| s.payload.clone()).collect(),
        )
    }

    pub fn energies(&self) -> Result<Vec<Vec<Energy>>> {
        let n = self.species.len();
        let pay = |i: usize| &self.species[i].payload;
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let mut v = vec![vec![Energy::Finite(0.0); n]; n];
        match &self.potential {
            PotentialSpec::Matrix { v: m } => {
                if m.len() != n || m.iter().any(|r| r.len() != n) {
                    return Err(Error::Structural("energy matrix must be S x S".into()));
                }
                return Ok(m.clone());
            }
            PotentialSpec::HardRod { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::Input("rod length must be positive".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        v[i][j] =
                            hard_if((position(pay(i), i, Some(1))?[0] - position(pay(j), j, Some(1))?[0]).abs() < *a);
                    }
                }
            }
            PotentialSpec::HardSphere { radius } => {
                let r = |i: usize| {
                    pay(i)
                        .radius
                        .or(*radius)
                        .filter(|r| r.is_finite() && *r > 0.0)
                        .ok_or_else(|| Error::Input(format!("species {i} has no positive radius")))
                };
                for i in 0..n {
                    for j in 0..n {
                        v[i][j] = hard_if(dist(position(pay(i), i, None)?, position(pay(j), j, None)?) < r(i)? + r(j)?);
                    }
                }
            }
            PotentialSpec::Rods2d { length } => {
                for i in 0..n {
                    for j in 0..n {
                        let (pi, pj) = (position(pay(i), i, Some(2))?, position(pay(j), j, Some(2))?);
                        let angle = |k: usize| {
                            pay(k).orientation.ok_or_else(|| Error::Input(format!("species {k} has no orientation")))
                        };
                        let (ti, tj) = (angle(i)?, angle(j)?);
                        let c = [pj[0] - pi[0], pj[1] - pi[1]];
                        // identical rods always overlap
                        v[i][j] =
                            hard_if(i == j || (c == [0.0, 0.0] && ti == tj) || rods_intersect(*length, ti, tj, &c));
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn potential(&self) -> Result<PairPotential> {
        PairPotential::new(self.beta, self.energies()?, self.b_stability.clone(), self.b_star.clone())
    }
}

/// Numeric field used for a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Rational,
    #[default]
    Float,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Request {
    /// Path to a species file (relative to the request file) or an inline one.
    pub state: Value,
    #[serde(rename = "N")]
    pub n: usize,
    pub op: String,
    #[serde(default)]
    pub inputs: Value,
    #[serde(default)]
    pub mode: Option<Mode>,
}

/// Exact identity suite on one state: the two fixed-point equations, both
/// round trips along both activity paths, agreement of the paths, the density
/// series, the pressure identity and the dissymmetry identity.
pub fn identity_suite<S: Scalar>(state: &GCState<S>, tol: f64) -> Result<Vec<ResidualReport>> {
    let a = state.a_family()?;
    let t = state.t_family()?;
    let mut out = vec![verify_fp(a, t, tol)?, verify_fp_prime(a, t, tol)?];
    for path in [ZetaPath::Tree, ZetaPath::Biconnected] {
        let tag = match path {
            ZetaPath::Tree => "tree",
            ZetaPath::Biconnected => "biconnected",
        };
        for mut r in <[ResidualReport; 2]>::from(state.roundtrip_check(path, tol)?) {
            r.identity = format!("{} ({tag})", r.identity);
            out.push(r);
        }
    }
    out.push(state.zeta_paths_check(tol)?);
    out.push(state.density_series_check(tol)?);
    out.push(state.pressure_identity_check(tol)?);
    out.push(state.dissymmetry_check(tol)?);
    Ok(out)
}

/// Recursion for `t_n` against the enriched-tree sum, on every multi-index
/// of length `n <= max_n`.
pub fn tree_oracle_check<S: Scalar>(state: &GCState<S>, max_n: usize) -> Result<ResidualReport> {
    let a = state.a_family()?;
    let trunc = max_n.min(state.trunc()).min(crate::tree::MAX_TREE_ORACLE);
    let t = compute_tn(a, trunc)?;
    let mut per_order = vec![0.0; trunc + 1];
    let mut all_zero = true;
    for n in 1..=trunc {
        for q in 0..state.species() {
            for (x, v) in t.root(q).coeff(n).entries() {
                let xs: Vec<usize> = x.iter().map(|&i| i as usize).collect();
                let diff = tn_via_trees(a, n, q, &xs)? - v.clone();
                all_zero &= diff.is_zero();
                per_order[n] = f64::max(per_order[n], diff.magnitude());
            }
        }
    }
    Ok(ResidualReport::from_orders("tree recursion vs enriched trees", per_order, S::is_exact(), all_zero, 1e-10))
}

/// `exp` of the all-ones single-variable series: its coefficients are the Bell numbers.
pub fn bell_check(order: usize) -> Result<ResidualReport> {
    let ones = FormalSeries::<Rational>::from_fn_with(1, order.min(12), &crate::fps::Limits::unlimited(), |n, _| {
        if n == 0 {
            Rational::from_int(0)
        } else {
            Rational::from_int(1)
        }
    })?;
    let e = ones.exp_series()?;
    let expected: [i64; 13] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
    let per_order: Vec<f64> = (0..=order.min(12))
        .map(|n| (e.get(&vec![0; n]).clone() - Rational::from_int(expected[n])).magnitude())
        .collect();
    let zero = per_order.iter().all(|v| *v == 0.0);
    Ok(ResidualReport::from_orders("Bell numbers", per_order, true, zero, 0.0))
}

fn field<T: serde::de::DeserializeOwned>(inputs: &Value, name: &str) -> Result<T> {
    let v = inputs.get(name).ok_or_else(|| Error::Input(format!("request input {name:?} is missing")))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("request input {name:?}: {e}")))
}

fn opt_field<T: serde::de::DeserializeOwned>(inputs: &Value, name: &str) -> Result<Option<T>> {
    match inputs.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(inputs, name).map(Some),
    }
}

fn measure<S: Scalar>(space: &SpeciesSpace, inputs: &Value, name: &str) -> Result<MeasureVec<S>> {
    let raw: Vec<Value> = field(inputs, name)?;
    let vals = raw
        .iter()
        .map(|v| S::from_json(v).ok_or_else(|| Error::Input(format!("cannot read {v} as a number in {name:?}"))))
        .collect::<Result<Vec<S>>>()?;
    MeasureVec::new(space, vals)
}

fn values_json<S: Scalar>(m: &MeasureVec<S>) -> Value {
    Value::Array(m.values().iter().map(|v| v.to_json()).collect())
}

/// Loads the state named in a request; a string is a path relative to `base`.
pub fn resolve_state(req: &Request, base: Option<&Path>) -> Result<SpeciesFile> {
    match &req.state {
        Value::String(p) => {
            let path = match base {
                Some(b) => b.join(p),
                None => p.into(),
            };
            SpeciesFile::load(&path)
        }
        v @ Value::Object(_) => Ok(serde_json::from_value(v.clone())?),
        _ => Err(Error::Input("request state must be a file path or an inline species object".into())),
    }
}

/// Executes a request and returns the JSON response.
pub fn handle_request(req: &Request, file: &SpeciesFile, mode: Mode) -> Result<Value> {
    let pot = file.potential()?;
    let space = file.space()?;
    let mode = req.mode.unwrap_or(mode);
    let head = json!({ "op": req.op, "N": req.n, "mode": mode });
    let body = match mode {
        _ if req.op == "stability" => {
            cert_response(check_stability(&pot, opt_field(&req.inputs, "n_check")?.unwrap_or(req.n))?)
        }
        Mode::Float => dispatch_float(req, &pot, space)?,
        Mode::Rational => dispatch_exact(req, &pot, space)?,
    };
    let mut out = head;
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

fn cert_response(c: crate::certificate::BoundCertificate) -> Value {
    json!({ "passed": c.passed, "certificate": c })
}

fn residual_response(reports: &[ResidualReport]) -> Value {
    json!({ "passed": reports.iter().all(|r| r.passed), "residuals": reports })
}

fn dispatch_exact(req: &Request, pot: &PairPotential, space: SpeciesSpace) -> Result<Value> {
    let st = GCState::<Rational>::new(pot, space.clone(), req.n)?;
    let inp = &req.inputs;
    Ok(match req.op.as_str() {
        "identities" => residual_response(&identity_suite(&st, 0.0)?),
        "tree_oracle" => residual_response(&[tree_oracle_check(&st, 4)?]),
        "xi_exact" => {
            let r = st.xi_exact(&measure(&space, inp, "z")?, opt_field(inp, "n_max")?)?;
            json!({ "value": r.value.to_json(), "truncated": r.truncated, "n_max": r.n_max })
        }
        "density_exact" => {
            let r = st.density_exact(&measure(&space, inp, "z")?, field(inp, "q")?, opt_field(inp, "n_max")?)?;
            json!({ "value": r.value.to_json(), "truncated": r.truncated, "n_max": r.n_max })
        }
        "log_xi_series" => json!({ "value": st.log_xi_series(&measure(&space, inp, "z")?)?.to_json() }),
        "pressure_of_nu" => json!({ "value": st.pressure_of_nu(&measure(&space, inp, "nu")?)?.to_json() }),
        "rho_of_z" | "zeta_of_nu" | "free_energy" | "legendre_residual" | "check_dissym_b" => {
            return Err(Error::Input(format!("op {:?} needs exp/log and runs in float mode only", req.op)))
        }
        _ => return common_ops(req, &st, &space),
    })
}

fn dispatch_float(req: &Request, pot: &PairPotential, space: SpeciesSpace) -> Result<Value> {
    let st = GCState::<f64>::new(pot, space.clone(), req.n)?;
    let inp = &req.inputs;
    Ok(match req.op.as_str() {
        "identities" => residual_response(&identity_suite(&st, 1e-10)?),
        "tree_oracle" => residual_response(&[tree_oracle_check(&st, 4)?]),
        "rho_of_z" => json!({ "values": values_json(&st.rho_of_z(&measure(&space, inp, "z")?)?) }),
        "zeta_of_nu" => {
            let path = opt_field(inp, "path")?.unwrap_or(ZetaPath::Biconnected);
            json!({ "values": values_json(&st.zeta_of_nu(&measure(&space, inp, "nu")?, path)?), "path": path })
        }
        "xi_exact" => {
            let r = st.xi_exact(&measure(&space, inp, "z")?, opt_field(inp, "n_max")?)?;
            json!({ "value": r.value, "truncated": r.truncated, "n_max": r.n_max })
        }
        "density_exact" => {
            let r = st.density_exact(&measure(&space, inp, "z")?, field(inp, "q")?, opt_field(inp, "n_max")?)?;
            json!({ "value": r.value, "truncated": r.truncated, "n_max": r.n_max })
        }
        "log_xi_series" => json!({ "value": st.log_xi_series(&measure(&space, inp, "z")?)? }),
        "pressure_of_nu" => json!({ "value": st.pressure_of_nu(&measure(&space, inp, "nu")?)? }),
        "free_energy" => {
            json!({ "value": st.free_energy(&measure(&space, inp, "nu")?, &measure(&space, inp, "m")?)? })
        }
        "legendre_residual" => {
            json!({ "value": st.legendre_residual(&measure(&space, inp, "nu")?, &measure(&space, inp, "m")?)? })
        }
        "check_dissym_b" => cert_response(st.check_dissym_b(
            &measure(&space, inp, "z")?,
            &field::<Vec<f64>>(inp, "a")?,
            &field::<Vec<f64>>(inp, "b")?,
        )?),
        _ => return common_ops(req, &st, &space),
    })
}

fn common_ops<S: Scalar>(req: &Request, st: &GCState<S>, space: &SpeciesSpace) -> Result<Value> {
    let inp = &req.inputs;
    let w = |name: &str| field::<Vec<f64>>(inp, name);
    Ok(match req.op.as_str() {
        "check_pu" => cert_response(st.check_pu(&measure(space, inp, "z")?, &w("a")?)?),
        "check_sab" => cert_response(st.check_sab(&measure(space, inp, "nu")?, &w("a")?, &w("b")?)?),
        "check_sb" => cert_response(st.check_sb(&measure(space, inp, "nu")?, &w("b")?)?),
        "check_virmb" => cert_response(st.check_virmb(&measure(space, inp, "nu")?, &w("b")?)?),
        "search_weights" => match st.search_constant_weights(&measure(space, inp, "nu")?)? {
            Some(c) => cert_response(c),
            None => json!({ "passed": false, "certificate": Value::Null }),
        },
        "dissymmetry" => residual_response(&[st.dissymmetry_check(if S::is_exact() { 0.0 } else { 1e-10 })?]),
        other => return Err(Error::Input(format!("unknown request op {other:?}"))),
    })
}
