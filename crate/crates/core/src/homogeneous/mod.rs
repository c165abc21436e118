//! Single-species, translation-invariant systems: irreducible integrals
//! `β_n`, the hard-rod oracle, and the radius bounds.

pub mod bounds;
pub mod geometry;
pub mod mc;
pub mod tonks;

use std::fmt::Write as _;

use num::traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fps::Limits;
use crate::inversion::GCState;
use crate::scalar::{format_float, format_rational, Rational};
use crate::species::{FMatrix, SpeciesSpace};

pub use bounds::{
    banach_compare, bloch_radii, hard_disk_refinement, k_constant, lambert_w0, lp_chain, lp_chain_for,
    neighborhood_radii, r_lp, r_star, tree_fn_t, BanachComparison, BlochRadii, KConstant, LpChain, NeighborhoodRadii,
};
pub use geometry::{ball_volume, lens_volume, triangle_overlap_integral, unit_ball_volume};
pub use mc::{cluster_integral_mc, norm, McEstimate, MC_BATCHES};
pub use tonks::{beta_n_exact_1d, tonks_activity_ratio, tonks_beta_coefficients, tonks_oracle, TonksValues};

/// One step of a radial potential: value `v` on `r_prev <= r < r_out`.
/// `v = +inf` encodes a hard core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialStep {
    pub r_out: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interaction {
    Ideal,
    /// Rods of length `a`: overlap iff `|x - y| < a`.
    HardRod {
        a: f64,
    },
    /// Spheres of radius `sigma`: overlap iff `|x - y| < 2 sigma`.
    HardSphere {
        sigma: f64,
    },
    /// Piecewise-constant radial potential, zero beyond the last step.
    Radial {
        steps: Vec<RadialStep>,
    },
}

/// How the size parameter of a hard-core interaction relates to the
/// contact distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionConvention {
    /// The parameter is the contact distance itself (hard rods).
    ContactDistance,
    /// The parameter is a radius; contact happens at twice it.
    Radius,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousModel {
    pub dimension: usize,
    pub interaction: Interaction,
    #[serde(default = "one")]
    pub beta: f64,
    /// Stability constant `B`.
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub b_star: f64,
}

fn one() -> f64 {
    1.0
}

impl HomogeneousModel {
    pub fn new(dimension: usize, interaction: Interaction, beta: f64) -> Result<Self> {
        let m = HomogeneousModel { dimension, interaction, beta, b: 0.0, b_star: 0.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn hard_rods(a: f64) -> Result<Self> {
        Self::new(1, Interaction::HardRod { a }, 1.0)
    }

    pub fn hard_spheres(dimension: usize, sigma: f64) -> Result<Self> {
        Self::new(dimension, Interaction::HardSphere { sigma }, 1.0)
    }

    pub fn with_stability(mut self, b: f64, b_star: f64) -> Result<Self> {
        self.b = b;
        self.b_star = b_star;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Input("beta must be positive".into()));
        }
        if !(self.b.is_finite() && self.b >= 0.0 && self.b_star.is_finite() && self.b_star >= 0.0) {
            return Err(Error::Input("B and B* must be finite and non-negative".into()));
        }
        match &self.interaction {
            Interaction::Ideal => {}
            Interaction::HardRod { a } => {
                if self.dimension != 1 {
                    return Err(Error::Input("hard rods live in one dimension".into()));
                }
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::Input("rod length must be positive".into()));
                }
            }
            Interaction::HardSphere { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::Input("sphere radius must be positive".into()));
                }
            }
            Interaction::Radial { steps } => {
                let mut prev = 0.0;
                for s in steps {
                    if !(s.r_out.is_finite() && s.r_out > prev) {
                        return Err(Error::Input("radial steps must have increasing finite radii".into()));
                    }
                    if s.v.is_nan() || s.v == f64::NEG_INFINITY {
                        return Err(Error::Input("radial potential values must be finite or +inf".into()));
                    }
                    prev = s.r_out;
                }
            }
        }
        Ok(())
    }

    pub fn convention(&self) -> ExclusionConvention {
        match self.interaction {
            Interaction::HardRod { .. } => ExclusionConvention::ContactDistance,
            Interaction::HardSphere { .. } => ExclusionConvention::Radius,
            _ => ExclusionConvention::None,
        }
    }

    /// Contact distance of a hard-core model.
    pub fn exclusion_distance(&self) -> Option<f64> {
        match self.interaction {
            Interaction::HardRod { a } => Some(a),
            Interaction::HardSphere { sigma } => Some(2.0 * sigma),
            _ => None,
        }
    }

    pub fn is_hard_core(&self) -> bool {
        self.exclusion_distance().is_some()
    }

    /// Range beyond which the Mayer function vanishes.
    pub fn reach(&self) -> f64 {
        match &self.interaction {
            Interaction::Ideal => 0.0,
            Interaction::Radial { steps } => steps.last().map_or(0.0, |s| s.r_out),
            _ => self.exclusion_distance().unwrap_or(0.0),
        }
    }

    /// Mayer function at distance `r`.
    pub fn mayer(&self, r: f64) -> f64 {
        match &self.interaction {
            Interaction::Ideal => 0.0,
            Interaction::Radial { steps } => {
                steps.iter().find(|s| r < s.r_out).map_or(0.0, |s| (-self.beta * s.v).exp() - 1.0)
            }
            _ => {
                if r < self.exclusion_distance().unwrap_or(0.0) {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn shell_sum(&self, g: impl Fn(f64) -> f64) -> f64 {
        match &self.interaction {
            Interaction::Radial { steps } => {
                let mut prev = 0.0;
                steps
                    .iter()
                    .map(|s| {
                        let w = ball_volume(self.dimension, s.r_out) - ball_volume(self.dimension, prev);
                        prev = s.r_out;
                        g(s.v) * w
                    })
                    .sum()
            }
            _ => 0.0,
        }
    }

    /// `C̄ = ∫ (1 - e^{-β|v|}) dx`.
    pub fn c_bar(&self) -> Result<f64> {
        Ok(match &self.interaction {
            Interaction::Ideal => 0.0,
            Interaction::Radial { .. } => self.shell_sum(|v| -(-self.beta * v.abs()).exp_m1()),
            _ => ball_volume(self.dimension, self.exclusion_distance().unwrap_or(0.0)),
        })
    }

    /// `β_1 = ∫ f dx`.
    pub fn beta_1(&self) -> f64 {
        match &self.interaction {
            Interaction::Ideal => 0.0,
            Interaction::Radial { .. } => self.shell_sum(|v| (-self.beta * v).exp_m1()),
            _ => -self.c_bar().unwrap_or(0.0),
        }
    }
}

/// `(1/n!) ∫ D_{n+1}(0, x) dx` by Monte Carlo, in two or three dimensions.
pub fn beta_n_mc(model: &HomogeneousModel, n: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    if !(2..=3).contains(&model.dimension) {
        return Err(Error::Capability("Monte Carlo integrals are offered for d = 2 or 3".into()));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::Capability("Monte Carlo integrals are offered for 1 <= n <= 3".into()));
    }
    if model.reach() == 0.0 {
        return Ok(McEstimate { mean: 0.0, stderr: 0.0, samples: 0 });
    }
    let f = |_: usize, _: usize, v: &[f64]| model.mayer(mc::norm(v));
    cluster_integral_mc(model.dimension, n, &f, model.reach(), samples, seed)
}

/// `β_2` for hard spheres from the overlap volume of two balls, integrated radially.
pub fn beta_2_hard_sphere(model: &HomogeneousModel) -> Result<f64> {
    let e = model.exclusion_distance().ok_or_else(|| Error::Domain("needs a hard-core model".into()))?;
    Ok(-0.5 * triangle_overlap_integral(model.dimension, e, e, e)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VirialMethod {
    Analytic,
    Exact1d,
    /// Radial quadrature of ball overlap volumes.
    Quadrature,
    Mc,
    EosInversion,
}

impl VirialMethod {
    pub fn tag(self) -> &'static str {
        match self {
            VirialMethod::Analytic => "analytic",
            VirialMethod::Exact1d => "exact_1d",
            VirialMethod::Quadrature => "quadrature",
            VirialMethod::Mc => "mc",
            VirialMethod::EosInversion => "eos_inversion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VirialRow {
    pub n: usize,
    pub beta_n: f64,
    /// Exact value when the method produces one.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_rational")]
    pub exact: Option<Rational>,
    pub method: VirialMethod,
    pub stderr: f64,
}

fn ser_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VirialTable {
    pub rows: Vec<VirialRow>,
}

/// Sampling settings for Monte Carlo rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { samples: 1 << 20, seed: 0 }
    }
}

impl VirialTable {
    pub fn beta(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.beta_n)
    }

    /// CSV with header `n,beta_n,method,stderr`; exact entries are written as
    /// `p/q` when `exact` is set.
    pub fn to_csv(&self, exact: bool) -> String {
        let mut out = String::from("n,beta_n,method,stderr\n");
        for r in &self.rows {
            let v = match (&r.exact, exact) {
                (Some(q), true) => format_rational(q),
                _ => format_float(r.beta_n),
            };
            let _ = writeln!(out, "{},{},{},{}", r.n, v, r.method.tag(), format_float(r.stderr));
        }
        out
    }

    /// `z(ρ) = ρ exp(-Σ β_n ρ^n)`.
    pub fn activity(&self, rho: f64) -> f64 {
        rho * (-self.rows.iter().map(|r| r.beta_n * rho.powi(r.n as i32)).sum::<f64>()).exp()
    }

    /// `βp = ρ - Σ n β_n/(n+1) ρ^{n+1}`.
    pub fn pressure(&self, rho: f64) -> f64 {
        rho - self
            .rows
            .iter()
            .map(|r| r.n as f64 * r.beta_n / (r.n as f64 + 1.0) * rho.powi(r.n as i32 + 1))
            .sum::<f64>()
    }

    /// `βf = ρ(log ρ - 1) - Σ β_n/(n+1) ρ^{n+1}`.
    pub fn free_energy(&self, rho: f64) -> f64 {
        let ideal = if rho == 0.0 { 0.0 } else { rho * (rho.ln() - 1.0) };
        ideal - self.rows.iter().map(|r| r.beta_n / (r.n as f64 + 1.0) * rho.powi(r.n as i32 + 1)).sum::<f64>()
    }
}

fn rational_of(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

fn exact_row(n: usize, c: Rational, a: f64, method: VirialMethod) -> VirialRow {
    let exact = rational_of(a).map(|q| c.clone() * num::pow(q, n));
    let beta_n = c.to_f64().unwrap_or(f64::NAN) * a.powi(n as i32);
    VirialRow { n, beta_n, exact, method, stderr: 0.0 }
}

/// `β_1..β_order` for a model, each by the most exact route available.
pub fn virial_table(model: &HomogeneousModel, order: usize, mc: McOptions) -> Result<VirialTable> {
    model.validate()?;
    if order == 0 {
        return Err(Error::Input("order must be at least 1".into()));
    }
    let rod_length = match (&model.interaction, model.dimension) {
        (Interaction::HardRod { a }, _) => Some(*a),
        (Interaction::HardSphere { sigma }, 1) => Some(2.0 * sigma),
        _ => None,
    };
    let mut rows = Vec::with_capacity(order);
    if let Some(a) = rod_length {
        let eos = if order > tonks::MAX_EXACT_1D { tonks_beta_coefficients(order)? } else { Vec::new() };
        for n in 1..=order {
            rows.push(if n <= tonks::MAX_EXACT_1D {
                exact_row(n, beta_n_exact_1d(n)?, a, VirialMethod::Exact1d)
            } else {
                exact_row(n, eos[n].clone(), a, VirialMethod::EosInversion)
            });
        }
        return Ok(VirialTable { rows });
    }
    for n in 1..=order {
        rows.push(match &model.interaction {
            Interaction::Ideal => {
                VirialRow { n, beta_n: 0.0, exact: Some(Rational::zero()), method: VirialMethod::Analytic, stderr: 0.0 }
            }
            _ if n == 1 => {
                VirialRow { n, beta_n: model.beta_1(), exact: None, method: VirialMethod::Analytic, stderr: 0.0 }
            }
            Interaction::HardSphere { .. } if n == 2 && model.dimension <= 3 => VirialRow {
                n,
                beta_n: beta_2_hard_sphere(model)?,
                exact: None,
                method: VirialMethod::Quadrature,
                stderr: 0.0,
            },
            _ => {
                let est = beta_n_mc(model, n, mc.samples, mc.seed.wrapping_add(n as u64))?;
                VirialRow { n, beta_n: est.mean, exact: None, method: VirialMethod::Mc, stderr: est.stderr }
            }
        });
    }
    Ok(VirialTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: String,
    pub value: f64,
    pub formula: String,
}

/// Every bound and constant for a model, as table rows.
pub fn bounds_table(model: &HomogeneousModel, b_bar: f64) -> Result<Vec<BoundRow>> {
    let k = k_constant();
    let rs = r_star(model)?;
    let r0 = r_lp(model, b_bar)?;
    let nb = neighborhood_radii(model)?;
    let lp = lp_chain(model)?;
    let c = model.c_bar()?;
    let linear = move |r: f64| c * r;
    let quadratic = move |r: f64| c * r * r;
    let bl = banach_compare(&linear, f64::INFINITY)?;
    let bq = banach_compare(&quadratic, f64::INFINITY)?;
    let row = |name: &str, value: f64, formula: &str| BoundRow { name: name.into(), value, formula: formula.into() };
    Ok(vec![
        row("c_bar", c, "integral of 1 - exp(-beta |v|)"),
        row("k", k.k, "max_{0<=w<=1} (2 exp(-w) - 1) w"),
        row("k_closed_form", k.closed_form, "(W(e/2) - 1)^2 / W(e/2)"),
        row("one_over_2e", 1.0 / (2.0 * std::f64::consts::E), "1/(2e)"),
        row("r_star", rs, "1/(2e C exp(beta (B + B*)))"),
        row("r_0", r0, "k/(C exp(beta Bbar))"),
        row("r_star_over_r_0", rs / r0, "R*/R_0"),
        row("inner_radius", nb.inner, "1/(e exp(2/e) C exp(beta (B + B*)))"),
        row("outer_radius", nb.outer, "1/(2 sqrt(e) C exp(beta (B + B*)))"),
        row("lp_sup", lp.sup, "sup_r r exp(-T(C r))"),
        row("lp_closed_form", lp.closed_form, "1/(2e C)"),
        row("banach_ratio_linear", bl.ratio, "P'/P for M(r) = C r"),
        row("banach_ratio_quadratic", bq.ratio, "P'/P for M(r) = C r^2"),
    ])
}

pub fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("name,value,formula\n");
    for r in rows {
        let _ = writeln!(out, "{},{},\"{}\"", r.name, format_float(r.value), r.formula);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientCheck {
    pub n: usize,
    pub from_table: String,
    pub oracle: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub points_per_length: usize,
    pub h: f64,
    pub beta: Vec<f64>,
    pub error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomSelftest {
    pub order: usize,
    pub coefficients: Vec<CoefficientCheck>,
    pub grid: Vec<GridRow>,
    /// `log2(err(h)/err(h/2))` per order and refinement step.
    pub observed_orders: Vec<Vec<f64>>,
    pub passed: bool,
}

/// Grid resolutions (points per rod length) used by the discretized check.
pub const GRID_LEVELS: [usize; 3] = [4, 8, 16];
const GRID_ORDER: usize = 2;

/// Checks the hard-rod virial table against the closed-form equation of
/// state through `order`, and the discretized activity map on a periodic
/// lattice against the continuum coefficients as the spacing shrinks.
pub fn hom_inversion_selftest(model: &HomogeneousModel, order: usize) -> Result<HomSelftest> {
    let a = match model.interaction {
        Interaction::HardRod { a } => a,
        _ => return Err(Error::Domain("the hard-rod self-test needs a hard-rod model".into())),
    };
    let table = virial_table(model, order, McOptions::default())?;
    let exact: Vec<Rational> = table
        .rows
        .iter()
        .map(|r| r.exact.clone().ok_or_else(|| Error::Domain("rod length must be a finite binary fraction".into())))
        .collect::<Result<_>>()?;

    // z/ρ = exp(-Σ β_n ρ^n) against the closed form in x = aρ, rescaled by a^n
    let mut minus_log = vec![Rational::zero(); order + 1];
    for n in 1..=order {
        minus_log[n] = -exact[n - 1].clone();
    }
    let from_table = tonks::ops_exp(&minus_log);
    let a_q = rational_of(a).expect("checked above");
    let oracle = tonks_activity_ratio(order)?;
    let mut coefficients = Vec::new();
    for n in 1..=order {
        let t = from_table[n].clone();
        let o = oracle[n].clone() * num::pow(a_q.clone(), n);
        coefficients.push(CoefficientCheck {
            n,
            from_table: format_rational(&t),
            oracle: format_rational(&o),
            equal: t == o,
        });
    }

    let targets = tonks_oracle(a, 0.0, GRID_ORDER)?.beta_n;
    let mut grid = Vec::new();
    for &k in &GRID_LEVELS {
        let beta = grid_betas(a, k)?;
        let error = beta.iter().zip(&targets).map(|(b, t)| (b - t).abs()).collect();
        grid.push(GridRow { points_per_length: k, h: a / k as f64, beta, error });
    }
    let observed_orders: Vec<Vec<f64>> =
        (0..GRID_ORDER).map(|i| grid.windows(2).map(|w| (w[0].error[i] / w[1].error[i]).log2()).collect()).collect();
    let passed =
        coefficients.iter().all(|c| c.equal) && observed_orders.iter().flatten().all(|p| (0.8..=1.3).contains(p));
    Ok(HomSelftest { order, coefficients, grid, observed_orders, passed })
}

/// `β_1, β_2` of the activity map on a ring of lattice sites, `k` per rod length,
/// read off the biconnected coefficients at one site.
fn grid_betas(a: f64, k: usize) -> Result<Vec<f64>> {
    // ring long enough that no cluster of GRID_ORDER + 1 rods wraps around
    let sites = k * (2 * GRID_ORDER + 1);
    let h = a / k as f64;
    let ring = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d.min(sites - d)
    };
    let rows: Vec<Vec<f64>> =
        (0..sites).map(|i| (0..sites).map(|j| if ring(i, j) < k { -1.0 } else { 0.0 }).collect()).collect();
    let space = SpeciesSpace::uniform(sites, h)?;
    let limits = Limits { max_order: GRID_ORDER, max_species: sites };
    let state = GCState::<f64>::from_f_with_limits(FMatrix::from_rows(rows)?, space, GRID_ORDER, &limits)?;
    let masses = vec![h; sites];
    let terms = state.d_family()?.root(0).eval_terms(&masses)?;
    Ok(terms[1..].to_vec())
}

impl HomSelftest {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.coefficients {
            let _ = writeln!(
                out,
                "order {}: table {} oracle {} {}",
                c.n,
                c.from_table,
                c.oracle,
                if c.equal { "equal" } else { "DIFFER" }
            );
        }
        for g in &self.grid {
            let _ = writeln!(out, "grid h={}: beta={:?} error={:?}", format_float(g.h), g.beta, g.error);
        }
        let _ = writeln!(out, "observed grid orders: {:?}", self.observed_orders);
        out
    }
}
