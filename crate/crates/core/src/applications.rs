//! Worked settings built on the inversion engine: external-potential
//! reconstruction on a grid, hard-sphere mixtures, thin rods with discrete
//! orientations, and a mixture whose density map has no uniform inverse.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::certificate::{BoundCertificate, Condition};
use crate::error::{Error, Result};
use crate::homogeneous::{ball_volume, cluster_integral_mc, norm, triangle_overlap_integral, McEstimate, RadialStep};
use crate::inversion::{GCState, ZetaPath, WEIGHT_GRID_POINTS, WEIGHT_GRID_STEP};
use crate::scalar::factorial;
use crate::species::{Energy, MeasureVec, PairPotential, SpeciesSpace};

/// Largest grid for truncation orders of three or more.
pub const MAX_PROFILE_POINTS_HIGH_ORDER: usize = 10;

/// Pair interaction between grid points, as a function of their separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKernel {
    Ideal,
    HardCore {
        diameter: f64,
    },
    /// Piecewise-constant radial energy; `v = +inf` marks a hard core.
    Radial {
        steps: Vec<RadialStep>,
    },
    /// Energies given point by point.
    Matrix {
        energies: Vec<Vec<Energy>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProfile {
    pub points: Vec<Vec<f64>>,
    /// Cell volumes, used as quadrature weights.
    pub cells: Vec<f64>,
    pub rho: Vec<f64>,
    pub z0: f64,
    #[serde(default = "unit")]
    pub beta: f64,
    /// Box lengths for minimum-image distances.
    #[serde(default)]
    pub period: Option<Vec<f64>>,
    #[serde(default)]
    pub v_ext_known: Option<Vec<f64>>,
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
}

fn unit() -> f64 {
    1.0
}

impl GridProfile {
    fn validate(&self) -> Result<()> {
        let s = self.points.len();
        if s == 0 {
            return Err(Error::Input("profile needs at least one grid point".into()));
        }
        if self.cells.len() != s || self.rho.len() != s {
            return Err(Error::Structural("points, cells and rho must have equal length".into()));
        }
        let d = self.points[0].len();
        if self.points.iter().any(|p| p.len() != d) {
            return Err(Error::Structural("grid points must share one dimension".into()));
        }
        if let Some(per) = &self.period {
            if per.len() != d || per.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                return Err(Error::Input("period must give one positive length per axis".into()));
            }
        }
        if self.cells.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Input("cell volumes must be positive".into()));
        }
        if self.rho.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Input("densities must be finite and non-negative".into()));
        }
        if !(self.z0.is_finite() && self.z0 > 0.0) || !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Input("z0 and beta must be positive".into()));
        }
        Ok(())
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (&self.points[i], &self.points[j]);
        let mut r2 = 0.0;
        for c in 0..p.len() {
            let mut dx = (p[c] - q[c]).abs();
            if let Some(per) = &self.period {
                dx %= per[c];
                dx = dx.min(per[c] - dx);
            }
            r2 += dx * dx;
        }
        r2.sqrt()
    }

    /// Pair potential over the grid points.
    pub fn potential(&self, kernel: &ProfileKernel) -> Result<PairPotential> {
        self.validate()?;
        let s = self.points.len();
        let energy = |i: usize, j: usize| -> Energy {
            let r = self.distance(i, j);
            match kernel {
                ProfileKernel::Ideal => Energy::Finite(0.0),
                ProfileKernel::HardCore { diameter } => {
                    if r < *diameter {
                        Energy::HardCore
                    } else {
                        Energy::Finite(0.0)
                    }
                }
                ProfileKernel::Radial { steps } => match steps.iter().find(|st| r < st.r_out) {
                    Some(st) if st.v == f64::INFINITY => Energy::HardCore,
                    Some(st) => Energy::Finite(st.v),
                    None => Energy::Finite(0.0),
                },
                ProfileKernel::Matrix { energies } => energies[i][j],
            }
        };
        if let ProfileKernel::Matrix { energies } = kernel {
            if energies.len() != s || energies.iter().any(|r| r.len() != s) {
                return Err(Error::Structural("energy matrix must be square over the grid".into()));
            }
        }
        let v = (0..s).map(|i| (0..s).map(|j| energy(i, j)).collect()).collect();
        PairPotential::new(self.beta, v, None, None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileInversion {
    /// `V_ext` per grid point; `+inf` where the target density vanishes.
    pub v_ext: Vec<f64>,
    /// Activities `z0 e^{-β V_ext}`.
    pub activity: Vec<f64>,
    pub certificate: BoundCertificate,
    /// Largest deviation from a supplied reference potential.
    pub max_error_vs_known: Option<f64>,
    pub note: String,
}

fn sab_certificate(
    state: &GCState<f64>,
    nu: &MeasureVec<f64>,
    a: Option<&Vec<f64>>,
    b: Option<&Vec<f64>>,
) -> Result<BoundCertificate> {
    match (a, b) {
        (Some(a), Some(b)) => state.check_sab(nu, a, b),
        (None, None) => match state.search_constant_weights(nu)? {
            Some(c) => Ok(c),
            None => {
                let w = vec![WEIGHT_GRID_STEP * WEIGHT_GRID_POINTS as f64; state.species()];
                Ok(state
                    .check_sab(nu, &w, &w)?
                    .with_note("no constant weight on the search grid passes; margins at the largest"))
            }
        },
        _ => Err(Error::Input("supply both weight vectors a and b, or neither".into())),
    }
}

/// Background potential producing the target density, from the truncated
/// biconnected expansion of the activity.
pub fn invert_profile(gp: &GridProfile, kernel: &ProfileKernel, order: usize) -> Result<ProfileInversion> {
    let pot = gp.potential(kernel)?;
    let s = gp.points.len();
    if order >= 3 && s > MAX_PROFILE_POINTS_HIGH_ORDER {
        return Err(Error::Capability(format!(
            "order {order} is limited to {MAX_PROFILE_POINTS_HIGH_ORDER} grid points, got {s}"
        )));
    }
    let space = SpeciesSpace::new(gp.cells.clone())?;
    let nu = MeasureVec::new(&space, gp.rho.clone())?;
    let state = GCState::<f64>::new(&pot, space, order)?;
    let cert = sab_certificate(&state, &nu, gp.a.as_ref(), gp.b.as_ref())?;
    if !cert.passed {
        return Err(Error::Refused(Box::new(cert)));
    }
    let zeta = state.zeta_of_nu(&nu, ZetaPath::Biconnected)?;
    let v_ext: Vec<f64> = zeta
        .values()
        .iter()
        .zip(&gp.rho)
        .map(|(z, r)| if *r == 0.0 { f64::INFINITY } else { (gp.z0.ln() - z.ln()) / gp.beta })
        .collect();
    let activity = v_ext.iter().map(|v| gp.z0 * (-gp.beta * v).exp()).collect();
    let max_error_vs_known = match &gp.v_ext_known {
        Some(k) if k.len() == s => Some(
            v_ext
                .iter()
                .zip(k)
                .filter(|(v, k)| v.is_finite() || k.is_finite())
                .map(|(v, k)| (v - k).abs())
                .fold(0.0, f64::max),
        ),
        Some(_) => return Err(Error::Structural("known potential must have one value per grid point".into())),
        None => None,
    };
    Ok(ProfileInversion {
        v_ext,
        activity,
        certificate: cert,
        max_error_vs_known,
        note: "unique among potentials whose densities satisfy the certified condition".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub dimension: usize,
    pub radii: Vec<f64>,
    pub rho: Vec<f64>,
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> u64 {
    1 << 18
}

impl MixtureSpec {
    fn validate(&self) -> Result<()> {
        let k = self.radii.len();
        if k == 0 || self.rho.len() != k {
            return Err(Error::Structural("radii and rho must be non-empty and of equal length".into()));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Capability("mixtures are implemented for d in 1..=3".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Input("radii must be positive".into()));
        }
        if self.rho.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Input("densities must be non-negative".into()));
        }
        for w in [&self.a, &self.b].into_iter().flatten() {
            if w.len() != k || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::Input("weights must be non-negative, one per component".into()));
            }
        }
        if let (Some(a), Some(b)) = (&self.a, &self.b) {
            if a.iter().zip(b).any(|(x, y)| x > y) {
                return Err(Error::Input("weights must satisfy a <= b".into()));
            }
        }
        Ok(())
    }

    fn excluded(&self, k: usize, l: usize) -> f64 {
        ball_volume(self.dimension, self.radii[k] + self.radii[l])
    }

    /// `a_k - Σ_l ρ_l vol_d(R_k + R_l) e^{a_l + b_l}` per component.
    pub fn check(&self, a: &[f64], b: &[f64]) -> BoundCertificate {
        let n = self.radii.len();
        let margins = (0..n)
            .map(|k| a[k] - (0..n).map(|l| self.rho[l] * self.excluded(k, l) * (a[l] + b[l]).exp()).sum::<f64>())
            .collect();
        BoundCertificate::new(Condition::Sab, a.to_vec(), b.to_vec(), margins)
    }

    fn certificate(&self) -> Result<BoundCertificate> {
        let n = self.radii.len();
        match (&self.a, &self.b) {
            (Some(a), Some(b)) => Ok(self.check(a, b)),
            (None, None) => {
                for step in 1..=WEIGHT_GRID_POINTS {
                    let w = vec![WEIGHT_GRID_STEP * step as f64; n];
                    let c = self.check(&w, &w);
                    if c.passed {
                        return Ok(c.with_note(format!("constant weights a = b = {:.2} from grid search", w[0])));
                    }
                }
                let w = vec![WEIGHT_GRID_STEP * WEIGHT_GRID_POINTS as f64; n];
                Ok(self.check(&w, &w))
            }
            _ => Err(Error::Input("supply both weight vectors a and b, or neither".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureInversion {
    pub z: Vec<f64>,
    /// `terms[k][n-1]` is the order-`n` part of `-log(z_k/ρ_k)`.
    pub terms: Vec<Vec<f64>>,
    /// Monte Carlo standard error of the summed exponent, per component.
    pub stderr: Vec<f64>,
    pub certificate: BoundCertificate,
}

/// Multisets of size `n` over `0..k` with their number of orderings.
fn multisets(k: usize, n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..k {
            cur.push(v);
            rec(v, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, n, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|m| {
            let mut count = factorial(n) as f64;
            let mut i = 0;
            while i < m.len() {
                let j = (i..m.len()).find(|&j| m[j] != m[i]).unwrap_or(m.len());
                count /= factorial(j - i) as f64;
                i = j;
            }
            (m, count)
        })
        .collect()
}

/// Activities of a hard-sphere mixture at the given partial densities.
/// Orders one and two use overlap volumes; order three is sampled.
pub fn invert_mixture(ms: &MixtureSpec, order: usize) -> Result<MixtureInversion> {
    ms.validate()?;
    if !(1..=3).contains(&order) {
        return Err(Error::Capability("mixture inversion supports orders 1..=3".into()));
    }
    let cert = ms.certificate()?;
    if !cert.passed {
        return Err(Error::Refused(Box::new(cert)));
    }
    let kk = ms.radii.len();
    let d = ms.dimension;
    let contact = |i: usize, j: usize| ms.radii[i] + ms.radii[j];
    let mut terms = vec![vec![0.0; order]; kk];
    let mut stderr = vec![0.0; kk];
    for k in 0..kk {
        terms[k][0] = (0..kk).map(|l| -ms.rho[l] * ms.excluded(k, l)).sum::<f64>();
        if order >= 2 {
            let mut t2 = 0.0;
            for l in 0..kk {
                for m in 0..kk {
                    let tri = triangle_overlap_integral(d, contact(k, l), contact(k, m), contact(l, m))?;
                    t2 += (-0.5 * tri) * ms.rho[l] * ms.rho[m];
                }
            }
            terms[k][1] = t2;
        }
        if order >= 3 {
            let reach =
                (0..kk).flat_map(|i| (0..kk).map(move |j| (i, j))).map(|(i, j)| contact(i, j)).fold(0.0, f64::max);
            let mut t3 = 0.0;
            let mut var = 0.0;
            for (labels, count) in multisets(kk, 3) {
                let weight = count * labels.iter().map(|&l| ms.rho[l]).product::<f64>();
                if weight == 0.0 {
                    continue;
                }
                let species = [k, labels[0], labels[1], labels[2]];
                let f = move |i: usize, j: usize, v: &[f64]| {
                    if norm(v) < contact(species[i], species[j]) {
                        -1.0
                    } else {
                        0.0
                    }
                };
                let est: McEstimate = cluster_integral_mc(d, 3, &f, reach, ms.samples, ms.seed.wrapping_add(3))?;
                t3 += weight * est.mean;
                var += (weight * est.stderr).powi(2);
            }
            terms[k][2] = t3;
            stderr[k] = var.sqrt();
        }
    }
    let z = (0..kk).map(|k| ms.rho[k] * (-terms[k].iter().sum::<f64>()).exp()).collect();
    Ok(MixtureInversion { z, terms, stderr, certificate: cert })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RodSystem {
    #[serde(default = "two")]
    pub dimension: usize,
    /// Orientation angles in radians.
    pub angles: Vec<f64>,
    pub p: Vec<f64>,
    pub rho0: f64,
    /// Rod length; zero switches interactions off.
    pub length: f64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
}

fn two() -> usize {
    2
}

/// Whether two thin rods of length `len` at centers `0` and `c` with angles
/// `t1`, `t2` cross.
pub fn rods_intersect(len: f64, t1: f64, t2: f64, c: &[f64]) -> bool {
    let h = 0.5 * len;
    let (u1, u2) = ((t1.cos(), t1.sin()), (t2.cos(), t2.sin()));
    let p = [(-h * u1.0, -h * u1.1), (h * u1.0, h * u1.1)];
    let q = [(c[0] - h * u2.0, c[1] - h * u2.1), (c[0] + h * u2.0, c[1] + h * u2.1)];
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let d1 = orient(q[0], q[1], p[0]);
    let d2 = orient(q[0], q[1], p[1]);
    let d3 = orient(p[0], p[1], q[0]);
    let d4 = orient(p[0], p[1], q[1]);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Excluded area of two thin rods at relative angle `gamma`: `L^2 |sin gamma|`.
pub fn excluded_area(len: f64, gamma: f64) -> f64 {
    len * len * gamma.sin().abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RodTerm {
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RodsFreeEnergy {
    pub ideal: f64,
    pub orientational: f64,
    /// `-(ρ0^n/n!) Σ_σ ∫ D_n Π p`, for `2 <= n <= N`.
    pub excess: Vec<RodTerm>,
    pub total: f64,
    pub certificate: BoundCertificate,
}

impl RodSystem {
    fn validate(&self) -> Result<()> {
        if self.dimension != 2 {
            return Err(Error::Capability(
                "thin rods have zero excluded volume outside the plane; only d = 2 is offered".into(),
            ));
        }
        if self.angles.is_empty() || self.angles.len() != self.p.len() {
            return Err(Error::Structural("angles and p must be non-empty and of equal length".into()));
        }
        if self.p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || (self.p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Input("orientation probabilities must be non-negative and sum to 1".into()));
        }
        if !(self.rho0.is_finite() && self.rho0 > 0.0) || !(self.length.is_finite() && self.length >= 0.0) {
            return Err(Error::Input("rho0 must be positive and length non-negative".into()));
        }
        Ok(())
    }

    /// `1/(2e) - ρ0 Σ_τ p(τ) L^2 |sin(σ - τ)|` per orientation.
    pub fn certificate(&self) -> BoundCertificate {
        let margins: Vec<f64> = self
            .angles
            .iter()
            .map(|s| {
                let load: f64 =
                    self.angles.iter().zip(&self.p).map(|(t, p)| p * excluded_area(self.length, s - t)).sum();
                1.0 / (2.0 * E) - self.rho0 * load
            })
            .collect();
        BoundCertificate::new(Condition::Sab, Vec::new(), Vec::new(), margins)
            .with_note("constant-density bound for orientation-dependent hard cores")
    }
}

/// Free energy per area of thin hard rods with a fixed orientation
/// distribution, split into ideal, orientational and excess parts.
pub fn rods_free_energy(rs: &RodSystem, order: usize) -> Result<RodsFreeEnergy> {
    rs.validate()?;
    if !(1..=4).contains(&order) {
        return Err(Error::Capability("rod free energies support orders 1..=4".into()));
    }
    let cert = rs.certificate();
    if !cert.passed {
        return Err(Error::Refused(Box::new(cert)));
    }
    let rho0 = rs.rho0;
    let ideal = rho0 * (rho0.ln() - 1.0);
    let orientational = rho0 * rs.p.iter().filter(|p| **p > 0.0).map(|p| p * p.ln()).sum::<f64>();
    let s = rs.angles.len();
    let mut excess = Vec::new();
    for n in 2..=order {
        let (mut sum, mut var) = (0.0, 0.0);
        if rs.length > 0.0 {
            if n == 2 {
                for a in 0..s {
                    for b in 0..s {
                        sum -= rs.p[a] * rs.p[b] * excluded_area(rs.length, rs.angles[a] - rs.angles[b]);
                    }
                }
            } else {
                for (labels, count) in multisets(s, n) {
                    let weight = count * labels.iter().map(|&l| rs.p[l]).product::<f64>();
                    if weight == 0.0 {
                        continue;
                    }
                    let angles: Vec<f64> = labels.iter().map(|&l| rs.angles[l]).collect();
                    let f = |i: usize, j: usize, v: &[f64]| {
                        if rods_intersect(rs.length, angles[i], angles[j], v) {
                            -1.0
                        } else {
                            0.0
                        }
                    };
                    let est = cluster_integral_mc(2, n - 1, &f, rs.length, rs.samples, rs.seed.wrapping_add(n as u64))?;
                    // the estimator carries 1/(n-1)!
                    let scale = factorial(n - 1) as f64;
                    sum += weight * est.mean * scale;
                    var += (weight * est.stderr * scale).powi(2);
                }
            }
        }
        let pref = rho0.powi(n as i32) / factorial(n) as f64;
        excess.push(RodTerm { n, value: -pref * sum, stderr: pref * var.sqrt() });
    }
    let total = ideal + orientational + excess.iter().map(|t| t.value).sum::<f64>();
    Ok(RodsFreeEnergy { ideal, orientational, excess, total, certificate: cert })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoRow {
    pub k: usize,
    pub z: f64,
    pub rho: f64,
    /// `|ρ_k / z_k|`.
    pub ratio: f64,
    pub roundtrip_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundedDemo {
    pub z1: f64,
    pub rows: Vec<DemoRow>,
    /// `sup_k |ρ_k - z_k|` over the shown components.
    pub sup_difference: f64,
    /// Slope `c` of the weights `b(k) = c k`.
    pub weight_slope: f64,
    /// `sup_k |ρ_k| e^{-b(k)} / sup_k |z_k|`.
    pub weighted_ratio: f64,
    pub weighted_passes: bool,
    pub narrative: String,
}

/// The map `ρ_1 = z_1`, `ρ_k = z_k e^{-k z_1}` and its inverse
/// `z_k = ρ_k e^{k ρ_1}` for `k <= k_max`, at `z_k = eps` for `k >= 2`.
pub fn unbounded_mixture_demo(k_max: usize, z1: f64, eps: f64) -> Result<UnboundedDemo> {
    if k_max == 0 || !z1.is_finite() || !eps.is_finite() {
        return Err(Error::Input("need k_max >= 1 and finite activities".into()));
    }
    let z: Vec<f64> = (1..=k_max).map(|k| if k == 1 { z1 } else { eps }).collect();
    let rho: Vec<f64> =
        z.iter().enumerate().map(|(i, zk)| if i == 0 { *zk } else { zk * (-((i + 1) as f64) * z1).exp() }).collect();
    let back: Vec<f64> =
        rho.iter().enumerate().map(|(i, r)| if i == 0 { *r } else { r * ((i + 1) as f64 * rho[0]).exp() }).collect();
    let rows: Vec<DemoRow> = (0..k_max)
        .map(|i| DemoRow {
            k: i + 1,
            z: z[i],
            rho: rho[i],
            ratio: if z[i] == 0.0 { 1.0 } else { (rho[i] / z[i]).abs() },
            roundtrip_error: (back[i] - z[i]).abs(),
        })
        .collect();
    let sup_difference = rho.iter().zip(&z).map(|(r, z)| (r - z).abs()).fold(0.0, f64::max);
    let slope = (-z1).max(0.0);
    let sup_z = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let weighted = rho.iter().enumerate().map(|(i, r)| r.abs() * (-slope * (i + 1) as f64).exp()).fold(0.0, f64::max);
    let weighted_ratio = if sup_z == 0.0 { 0.0 } else { weighted / sup_z };
    let narrative = format!(
        "with z_1 = {z1}, |rho_k/z_k| = exp({}k) grows without bound in k, so no uniform neighbourhood of the \
         origin is mapped boundedly; measured against weights b(k) = {slope} k the same densities stay bounded \
         (ratio {weighted_ratio:.6})",
        -z1
    );
    Ok(UnboundedDemo {
        z1,
        rows,
        sup_difference,
        weight_slope: slope,
        weighted_ratio,
        weighted_passes: weighted_ratio <= 1.0 + 1e-12,
        narrative,
    })
}
