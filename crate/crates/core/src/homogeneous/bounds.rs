//! Radius bounds and constants for the single-species inversion.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};

use super::HomogeneousModel;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal function on `[lo, hi]`; returns `(argmax, max)`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)].into_iter().fold((x, fx), |best, c| if c.1 > best.1 { c } else { best })
}

/// Root of an increasing function on `[lo, hi]` by bisection.
fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KConstant {
    pub k: f64,
    pub w_star: f64,
    /// `(W(e/2) - 1)^2 / W(e/2)`, reported for comparison only.
    pub closed_form: f64,
}

/// `k = max_{0<=w<=1} (2e^{-w} - 1) w`, located by bisection on the
/// first-order condition `2e^{-w}(1 - w) = 1`.
pub fn k_constant() -> KConstant {
    // 1 - 2e^{-w}(1-w) increases from -1 to 1 on [0, 1]
    let w = bisect_increasing(|w| 1.0 - 2.0 * (-w).exp() * (1.0 - w), 0.0, 1.0);
    let k = (2.0 * (-w).exp() - 1.0) * w;
    let lw = lambert_w0(E / 2.0);
    KConstant { k, w_star: w, closed_form: (lw - 1.0).powi(2) / lw }
}

/// Principal branch of Lambert W for `x >= 0`.
pub fn lambert_w0(x: f64) -> f64 {
    let mut w = (1.0 + x).ln();
    for _ in 0..100 {
        let ew = w.exp();
        let step = (w * ew - x) / (ew * (w + 1.0));
        w -= step;
        if step.abs() < 1e-16 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

fn scale(model: &HomogeneousModel, b_total: f64) -> Result<f64> {
    let c = model.c_bar()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("exclusion integral must be positive, got {c}")));
    }
    Ok(c * (model.beta * b_total).exp())
}

/// `R* = 1 / (2e C̄ e^{β(B+B*)})`.
pub fn r_star(model: &HomogeneousModel) -> Result<f64> {
    Ok(1.0 / (2.0 * E * scale(model, model.b + model.b_star)?))
}

/// `R_0 = k / (C̄ e^{β B̄})`.
pub fn r_lp(model: &HomogeneousModel, b_bar: f64) -> Result<f64> {
    Ok(k_constant().k / scale(model, b_bar)?)
}

/// Rooted labelled tree function: the solution of `T = s e^T` on `[0, 1/e]`.
pub fn tree_fn_t(s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("tree function needs s >= 0, got {s}")));
    }
    let gap = 1.0 - s * E;
    if gap < -1e-14 {
        return Err(Error::Domain(format!("tree function diverges for s = {s} > 1/e")));
    }
    if gap <= 4.0 * f64::EPSILON {
        return Ok(1.0);
    }
    // series seed, then Newton safeguarded by the bracket [0, 1]
    let mut t = 0.0;
    let mut fact = 1.0;
    for n in 1..=20i32 {
        fact *= n as f64;
        t += (n as f64).powi(n - 1) * s.powi(n) / fact;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    t = t.clamp(lo, hi);
    for _ in 0..200 {
        let g = t - s * t.exp();
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if g.abs() <= 1e-16 || hi - lo <= 1e-16 {
            break;
        }
        let dg = 1.0 - s * t.exp();
        let next = t - g / dg;
        t = if dg > 0.0 && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpChain {
    pub sup: f64,
    pub argmax: f64,
    pub closed_form: f64,
}

/// `sup_{0 < r <= 1/(e C̄)} r e^{-T(C̄ r)}` next to its closed form `1/(2e C̄)`.
pub fn lp_chain(model: &HomogeneousModel) -> Result<LpChain> {
    lp_chain_for(model.c_bar()?)
}

pub fn lp_chain_for(c_bar: f64) -> Result<LpChain> {
    if !(c_bar > 0.0 && c_bar.is_finite()) {
        return Err(Error::Domain(format!("exclusion integral must be positive, got {c_bar}")));
    }
    let (s, v) = golden_max(|s| s * (-tree_fn_t(s).unwrap_or(f64::INFINITY)).exp(), 0.0, 1.0 / E);
    Ok(LpChain { sup: v / c_bar, argmax: s / c_bar, closed_form: 1.0 / (2.0 * E * c_bar) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BanachComparison {
    pub p: f64,
    pub p_prime: f64,
    pub ratio: f64,
}

/// Compares the Banach-space inversion radius `P = (1/8) sup_r r e^{-M(r)}`
/// with `P' = sup_b sup{s : M(s e^b) <= b}` for a convex increasing `M` with
/// `M(0) = 0`, defined on `[0, domain_max]` (`domain_max` may be infinite).
pub fn banach_compare(m: &dyn Fn(f64) -> f64, domain_max: f64) -> Result<BanachComparison> {
    if domain_max.is_nan() || domain_max <= 0.0 {
        return Err(Error::Domain("domain of M must have positive length".into()));
    }
    if m(0.0).abs() > 1e-12 {
        return Err(Error::Domain("M must vanish at 0".into()));
    }
    // for convex M the maximiser of r e^{-M(r)} lies below the first r with M(r) >= 1
    let mut r_hi = 1e-6_f64.min(domain_max);
    while m(r_hi) < 1.0 && r_hi < domain_max {
        r_hi = (r_hi * 2.0).min(domain_max);
        if r_hi > 1e300 {
            return Err(Error::Domain("M stays below 1 on its whole domain; the suprema are unbounded".into()));
        }
    }
    let top = m(r_hi);
    if !top.is_finite() || top <= 0.0 {
        return Err(Error::Domain("M is degenerate on its domain".into()));
    }
    let (_, sup) = golden_max(|r| r * (-m(r)).exp(), 0.0, r_hi);
    let inverse = |b: f64| bisect_increasing(|r| m(r) - b, 0.0, r_hi);
    let (_, p_prime) = golden_max(|b| (-b).exp() * inverse(b), 0.0, top);
    let p = sup / 8.0;
    Ok(BanachComparison { p, p_prime, ratio: p_prime / p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochRadii {
    pub r: f64,
    pub p: f64,
}

/// Radii from the quantitative inverse function theorem:
/// `r = R^2 a / (4M)`, `P = R^2 a^2 / (8M)`.
pub fn bloch_radii(big_r: f64, a: f64, m: f64) -> Result<BlochRadii> {
    if !(big_r > 0.0 && a > 0.0 && m > 0.0) {
        return Err(Error::Domain("R, a and M must be positive".into()));
    }
    Ok(BlochRadii { r: big_r * big_r * a / (4.0 * m), p: big_r * big_r * a * a / (8.0 * m) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborhoodRadii {
    pub inner: f64,
    pub outer: f64,
    pub inner_below_outer: bool,
    /// Where `R*` falls relative to the two radii, as computed.
    pub r_star_between: bool,
}

/// Inner radius `1/(e e^{2/e})` and outer radius `1/(2 sqrt e)`, both over
/// `C̄ e^{β(B+B*)}`.
pub fn neighborhood_radii(model: &HomogeneousModel) -> Result<NeighborhoodRadii> {
    let sc = scale(model, model.b + model.b_star)?;
    let inner = 1.0 / (E * (2.0 / E).exp()) / sc;
    let outer = 1.0 / (2.0 * E.sqrt()) / sc;
    let rs = r_star(model)?;
    Ok(NeighborhoodRadii { inner, outer, inner_below_outer: inner < outer, r_star_between: inner < rs && rs < outer })
}

/// Fixed-point equation for the refined hard-disk radius. Needs tabulated
/// angular data that is not part of this crate.
pub fn hard_disk_refinement() -> Result<f64> {
    Err(Error::Capability("the refined hard-disk radius needs external tabulated data and is not implemented".into()))
}
