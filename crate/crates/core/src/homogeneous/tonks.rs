//! Hard rods on a line: the closed-form equation of state and exact
//! irreducible integrals.

use num::traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::d_with;
use crate::scalar::{factorial, Rational, Scalar};

/// Largest `n` for the exact cell-counting integral.
pub const MAX_EXACT_1D: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct TonksValues {
    pub rho: f64,
    pub z: f64,
    pub beta_p: f64,
    /// Free energy density `βf`, with `0 log 0 = 0`.
    pub beta_f: f64,
    /// `β_n` for `n = 1..=order`.
    pub beta_n: Vec<f64>,
}

/// Equation of state of hard rods of length `a` at density `rho`, with the
/// first `order` irreducible integrals.
pub fn tonks_oracle(a: f64, rho: f64, order: usize) -> Result<TonksValues> {
    if !(a.is_finite() && a > 0.0) || !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::Domain("rod length must be positive and density non-negative".into()));
    }
    let x = a * rho;
    if x >= 1.0 {
        return Err(Error::Domain(format!("packing fraction a*rho = {x} must be below 1")));
    }
    let beta_p = rho / (1.0 - x);
    let z = beta_p * (x / (1.0 - x)).exp();
    let beta_f = if rho == 0.0 { 0.0 } else { rho * (rho.ln() - 1.0) - rho * (-x).ln_1p() };
    let beta_n = tonks_beta_coefficients(order)?
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c.real_f64() * a.powi(n as i32))
        .collect();
    Ok(TonksValues { rho, z, beta_p, beta_f, beta_n })
}

/// Largest series order for the closed-form expansion.
pub const MAX_TONKS_ORDER: usize = 64;

/// Coefficients `c_n` with `β_n = c_n a^n`, read off from the expansion of
/// `-log(z/ρ)` in `x = aρ` where `z/ρ = (1-x)^{-1} exp(x/(1-x))`.
/// Entry 0 is zero.
pub fn tonks_beta_coefficients(order: usize) -> Result<Vec<Rational>> {
    Ok(ops_log(&tonks_activity_ratio(order)?).into_iter().map(|c| -c).collect())
}

/// Ordinary power-series coefficients of `z/ρ` in `x = aρ`, through `order`.
pub fn tonks_activity_ratio(order: usize) -> Result<Vec<Rational>> {
    if order == 0 || order > MAX_TONKS_ORDER {
        return Err(Error::Capability(format!("series order must be in 1..={MAX_TONKS_ORDER}")));
    }
    let geometric = vec![Rational::one(); order + 1];
    let mut shifted = geometric.clone();
    shifted[0] = Rational::zero();
    Ok(ops_mul(&geometric, &ops_exp(&shifted)))
}

/// Truncated product of ordinary power series of equal length.
pub fn ops_mul(f: &[Rational], g: &[Rational]) -> Vec<Rational> {
    (0..f.len()).map(|n| (0..=n).map(|k| f[k].clone() * g[n - k].clone()).sum()).collect()
}

/// `exp(f)` for `f(0) = 0`, from `n g_n = sum_k k f_k g_{n-k}`.
pub fn ops_exp(f: &[Rational]) -> Vec<Rational> {
    let mut g = vec![Rational::zero(); f.len()];
    g[0] = Rational::one();
    for n in 1..f.len() {
        let acc: Rational = (1..=n).map(|k| Rational::from_int(k as i64) * f[k].clone() * g[n - k].clone()).sum();
        g[n] = acc / Rational::from_int(n as i64);
    }
    g
}

/// `log(g)` for `g(0) = 1`.
pub fn ops_log(g: &[Rational]) -> Vec<Rational> {
    let mut f = vec![Rational::zero(); g.len()];
    for n in 1..g.len() {
        let acc: Rational = (1..n).map(|k| Rational::from_int(k as i64) * f[k].clone() * g[n - k].clone()).sum();
        f[n] = g[n].clone() - acc / Rational::from_int(n as i64);
    }
    f
}

/// Exact `(1/n!) ∫ D_{n+1}(0, x) dx` for rods of unit length, so that
/// `β_n = c · a^n`.
///
/// Shift every coordinate by an integer cell `k_i` and write `x_i = k_i + u_i`
/// with `u_i ∈ (0, 1)`. Whether `|x_i - x_j| < 1` then depends only on
/// `k_i - k_j` and on the order of the `u_i`, so the integrand is constant on
/// each of the `n!` simplices of every unit cube, each of volume `1/n!`.
pub fn beta_n_exact_1d(n: usize) -> Result<Rational> {
    if !(1..=MAX_EXACT_1D).contains(&n) {
        return Err(Error::Capability(format!("exact 1D integrals are implemented for n in 1..={MAX_EXACT_1D}")));
    }
    // a biconnected configuration has every |x_i| < n
    let lo = -(n as i64);
    let cells = 2 * n as i64;
    let scale = n as i64 + 1;
    let orders = permutations(n);
    let mut total = Rational::zero();
    let mut pos = vec![0i64; n + 1];
    for code in 0..cells.pow(n as u32) {
        let mut c = code;
        let k: Vec<i64> = (0..n)
            .map(|_| {
                let v = lo + c % cells;
                c /= cells;
                v
            })
            .collect();
        for perm in &orders {
            // fractional parts placed at (rank + 1)/(n + 1); x_0 = 0 sits below them all
            for i in 0..n {
                pos[i + 1] = k[i] * scale + perm[i] as i64 + 1;
            }
            let edge = |i: usize, j: usize| {
                if (pos[i] - pos[j]).abs() < scale {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            };
            total += d_with(n + 1, edge)?;
        }
    }
    let nf = factorial(n) as i64;
    Ok(total / Rational::from_int(nf * nf))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        a.swap(j, k - 1);
    }
    heap_permute(k - 1, a, out);
}
