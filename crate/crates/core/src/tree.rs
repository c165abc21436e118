//! Coefficients `t_n(q; x)` of the inverse series and their enriched-tree expansion.

use crate::certificate::{BoundCertificate, Condition};
use crate::error::{Error, Result};
use crate::fps::templates::set_partitions;
use crate::fps::{compose_measure_order, exp_order, RootedFamily};
use crate::graphs::{pairs, GraphClass};
use crate::report::ResidualReport;
use crate::scalar::Scalar;

/// Family with `t_n(q; x)` at order `n` and `t_0 = 1`.
pub type TnFamily<S> = RootedFamily<S>;

pub const MAX_TREE_ORACLE: usize = 5;

/// Triangular recursion for the `t_n`: at each order `n`, `B_n(q; .)` is the
/// order-`n` part of `A_q` composed with the `t` family (using only
/// `t_1..t_{n-1}`), and `t_n` is the order-`n` part of `exp(B_q)`.
pub fn compute_tn<S: Scalar>(a: &RootedFamily<S>, trunc: usize) -> Result<TnFamily<S>> {
    compute_tn_with_b(a, trunc).map(|(t, _)| t)
}

/// As [`compute_tn`], also returning the `B` family.
pub fn compute_tn_with_b<S: Scalar>(a: &RootedFamily<S>, trunc: usize) -> Result<(TnFamily<S>, RootedFamily<S>)> {
    if a.trunc() < trunc {
        return Err(Error::Structural(format!("A family has order {} < requested {trunc}", a.trunc())));
    }
    let a = a.truncate(trunc);
    if a.roots().iter().any(|r| !r.constant().is_zero()) {
        return Err(Error::Domain("A family must vanish at order 0".into()));
    }
    let s = a.species();
    let mut t = RootedFamily::unit(s, trunc)?;
    let mut b = RootedFamily::from_fn(s, trunc, |_, _, _| S::zero())?;
    for n in 1..=trunc {
        for q in 0..s {
            let bn = compose_measure_order(a.root(q), &t, n);
            b.root_mut(q).set_coeff(n, bn)?;
        }
        for q in 0..s {
            let tn = exp_order(b.root(q), n);
            t.root_mut(q).set_coeff(n, tn)?;
        }
    }
    Ok((t, b))
}

/// A rooted tree on `{0..n}` (root 0) with, at every vertex, a set partition
/// of its children into cliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichedTree {
    pub n: usize,
    /// `parent[i - 1]` is the parent of vertex `i`.
    pub parent: Vec<usize>,
    /// For each vertex `0..=n`, its children grouped into blocks (bitmasks over vertex ids).
    pub cliques: Vec<Vec<u32>>,
}

impl EnrichedTree {
    pub fn children(&self, v: usize) -> u32 {
        self.parent.iter().enumerate().filter(|(_, &p)| p == v).fold(0, |acc, (i, _)| acc | 1 << (i + 1))
    }
}

fn orient(n_vertices: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent = vec![usize::MAX; n_vertices];
    parent[0] = 0;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    parent[1..].to_vec()
}

/// Every enriched tree with `n` non-root vertices, `1 <= n <= 5`.
pub fn enumerate_enriched_trees(n: usize) -> Result<Vec<EnrichedTree>> {
    if !(1..=MAX_TREE_ORACLE).contains(&n) {
        return Err(Error::Capability(format!("enriched-tree enumeration supports 1..={MAX_TREE_ORACLE}")));
    }
    let nv = n + 1;
    let pair_list = pairs(nv);
    let mut out = Vec::new();
    for tree in crate::graphs::enumerate_class(nv, GraphClass::Tree)? {
        let edges: Vec<(usize, usize)> =
            (0..pair_list.len()).filter(|k| tree.mask >> k & 1 == 1).map(|k| pair_list[k]).collect();
        let parent = orient(nv, &edges);
        let base = EnrichedTree { n, parent, cliques: vec![Vec::new(); nv] };
        let child_sets: Vec<Vec<usize>> =
            (0..nv).map(|v| (0..nv).filter(|&c| base.children(v) >> c & 1 == 1).collect()).collect();
        // all combinations of one set partition per vertex
        let mut acc = vec![base];
        for (v, kids) in child_sets.iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            let parts = set_partitions(kids.len());
            let mut next = Vec::with_capacity(acc.len() * parts.len());
            for t in &acc {
                for p in parts.iter() {
                    let mut t2 = t.clone();
                    t2.cliques[v] = p
                        .iter()
                        .map(|&blk| (0..kids.len()).filter(|i| blk >> i & 1 == 1).fold(0u32, |m, i| m | 1 << kids[i]))
                        .collect();
                    next.push(t2);
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    Ok(out)
}

/// `t_n(q; xs)` as a weighted sum over enriched trees: each clique `J` of
/// children of vertex `i` contributes `A_{|J|}(x_i; x_J)`, with `x_0 = q`.
pub fn tn_via_trees<S: Scalar>(a: &RootedFamily<S>, n: usize, q: usize, xs: &[usize]) -> Result<S> {
    if xs.len() != n {
        return Err(Error::Structural("multi-index length must equal n".into()));
    }
    if n == 0 {
        return Ok(S::one());
    }
    let labels: Vec<usize> = std::iter::once(q).chain(xs.iter().copied()).collect();
    let mut total = S::zero();
    for tree in enumerate_enriched_trees(n)? {
        let mut w = S::one();
        for (v, blocks) in tree.cliques.iter().enumerate() {
            for &blk in blocks {
                let members: Vec<usize> = (0..=n).filter(|c| blk >> c & 1 == 1).map(|c| labels[c]).collect();
                w = w * a.get(labels[v], &members).clone();
            }
        }
        total = total + w;
    }
    Ok(total)
}

/// `T_q(nu) = 1 + sum_n (1/n!) sum t_n(q; x) prod nu(x_i) w(x_i)` for masses `nu * w`.
pub fn eval_t<S: Scalar>(t: &TnFamily<S>, masses: &[S], q: usize) -> Result<S> {
    t.root(q).eval(masses)
}

/// Partial sums `1 + sum_{n<=N} (1/n!) sum |t_n| |nu|^n` per root, certified
/// against `e^{b(q)}`.
pub fn eval_t_abs<S: Scalar>(t: &TnFamily<S>, abs_masses: &[f64], b: &[f64]) -> Result<BoundCertificate> {
    let values = abs_partial_sums(t, abs_masses)?;
    if b.len() != values.len() {
        return Err(Error::Structural("b must have one entry per species".into()));
    }
    let margins = values.iter().zip(b).map(|(v, bq)| bq.exp() - v).collect();
    Ok(BoundCertificate::new(Condition::Mb, Vec::new(), b.to_vec(), margins).truncated(t.trunc()))
}

fn abs_partial_sums<S: Scalar>(t: &TnFamily<S>, abs_masses: &[f64]) -> Result<Vec<f64>> {
    if abs_masses.iter().any(|m| *m < 0.0 || !m.is_finite()) {
        return Err(Error::Domain("absolute masses must be finite and non-negative".into()));
    }
    t.roots().iter().map(|r| r.map(|v| v.magnitude()).eval(abs_masses)).collect()
}

/// The weight `b(q) = log T_q(|nu|)` implied by the truncated absolute sums;
/// a diagnostic for how tight a supplied `b` is.
pub fn implied_b<S: Scalar>(t: &TnFamily<S>, abs_masses: &[f64]) -> Result<Vec<f64>> {
    Ok(abs_partial_sums(t, abs_masses)?.into_iter().map(f64::ln).collect())
}

/// Residual of `T_q = exp(A_q o T)` coefficientwise through the truncation order.
pub fn verify_fp<S: Scalar>(a: &RootedFamily<S>, t: &TnFamily<S>, tol: f64) -> Result<ResidualReport> {
    let a = a.truncate(t.trunc());
    let residual = RootedFamily::new(
        (0..t.species())
            .map(|q| t.root(q).sub(&a.root(q).compose_measure(t)?.exp_series()?))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(ResidualReport::of_family("FP", &residual, tol))
}

/// Residual of `T_q(rho[z]) = exp(A_q(z))`, with `rho(x) = z(x) exp(-A_x(z))`, as series in `z`.
pub fn verify_fp_prime<S: Scalar>(a: &RootedFamily<S>, t: &TnFamily<S>, tol: f64) -> Result<ResidualReport> {
    let a = a.truncate(t.trunc());
    let e = a.try_map(|r| r.neg().exp_series())?;
    let residual = RootedFamily::new(
        (0..t.species())
            .map(|q| t.root(q).compose_measure(&e)?.sub(&a.root(q).exp_series()?))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(ResidualReport::of_family("FP'", &residual, tol))
}
