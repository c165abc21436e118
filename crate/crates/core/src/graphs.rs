//! Labelled graph classes and the graph-sum coefficients built on them.
//!
//! Edge sets are bitmasks over vertex pairs `(i, j)`, `i < j`, listed in
//! lexicographic order. Connected and biconnected graphs come from a
//! filtered scan of all masks; trees come from Prüfer sequences.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::fps::{FormalSeries, Idx, Limits, RootedFamily};
use crate::scalar::Scalar;
use crate::species::FMatrix;

pub const MAX_CLASS_VERTICES: usize = 8;
pub const MAX_TREE_VERTICES: usize = 9;
/// Largest `n` for which `D_n` is evaluated.
pub const MAX_D_ORDER: usize = 7;
/// Largest `n` for the fast Ursell recursion.
pub const MAX_URSELL_FAST: usize = 12;
pub const MAX_URSELL_BRUTE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeMask {
    pub n: u8,
    pub mask: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphClass {
    Connected,
    Biconnected,
    Tree,
}

/// Vertex pairs in mask-bit order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl EdgeMask {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = pairs(self.n as usize);
        (0..p.len()).filter(move |&k| self.mask >> k & 1 == 1).map(move |k| p[k])
    }

    pub fn edge_count(&self) -> u32 {
        self.mask.count_ones()
    }

    fn adjacency(&self) -> [u16; 16] {
        adjacency(self.n as usize, self.mask)
    }

    pub fn is_connected(&self) -> bool {
        connected_within(&self.adjacency(), full(self.n as usize))
    }

    pub fn is_biconnected(&self) -> bool {
        biconnected(self.n as usize, &self.adjacency())
    }
}

fn full(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

fn adjacency(n: usize, mask: u64) -> [u16; 16] {
    let mut adj = [0u16; 16];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> k & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
            k += 1;
        }
    }
    adj
}

/// Whether the subgraph induced on `verts` is connected (empty counts as not connected).
fn connected_within(adj: &[u16; 16], verts: u16) -> bool {
    if verts == 0 {
        return false;
    }
    let start = verts & verts.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & verts & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == verts
}

fn biconnected(n: usize, adj: &[u16; 16]) -> bool {
    let all = full(n);
    if !connected_within(adj, all) {
        return false;
    }
    n <= 2 || (0..n).all(|v| connected_within(adj, all & !(1 << v)))
}

fn check_range(n: usize, class: GraphClass) -> Result<()> {
    let hi = if class == GraphClass::Tree { MAX_TREE_VERTICES } else { MAX_CLASS_VERTICES };
    if n < 2 || n > hi {
        return Err(Error::Capability(format!("{class:?} graphs on {n} vertices: supported range is 2..={hi}")));
    }
    Ok(())
}

/// Streams every labelled graph of the class on `n` vertices exactly once.
pub fn enumerate_class(n: usize, class: GraphClass) -> Result<Box<dyn Iterator<Item = EdgeMask> + Send>> {
    check_range(n, class)?;
    let m = n * (n - 1) / 2;
    let n8 = n as u8;
    Ok(match class {
        GraphClass::Connected => Box::new(
            (0u64..1 << m)
                .filter(move |&mask| connected_within(&adjacency(n, mask), full(n)))
                .map(move |mask| EdgeMask { n: n8, mask }),
        ),
        GraphClass::Biconnected => Box::new(
            // A biconnected graph on n >= 3 vertices has at least n edges.
            (0u64..1 << m)
                .filter(move |&mask| (n == 2 || mask.count_ones() as usize >= n) && biconnected(n, &adjacency(n, mask)))
                .map(move |mask| EdgeMask { n: n8, mask }),
        ),
        GraphClass::Tree => Box::new(PruferTrees::new(n)),
    })
}

/// Number of graphs of a class, from the cached lists where available.
pub fn class_count(n: usize, class: GraphClass) -> Result<usize> {
    match class {
        GraphClass::Biconnected if (2..=MAX_D_ORDER).contains(&n) => Ok(biconnected_masks(n)?.len()),
        GraphClass::Connected if (2..=MAX_URSELL_BRUTE).contains(&n) => Ok(connected_masks(n)?.len()),
        _ => Ok(enumerate_class(n, class)?.count()),
    }
}

struct PruferTrees {
    n: usize,
    code: Vec<usize>,
    done: bool,
}

impl PruferTrees {
    fn new(n: usize) -> Self {
        PruferTrees { n, code: vec![0; n.saturating_sub(2)], done: false }
    }

    fn decode(&self) -> u64 {
        let n = self.n;
        let mut degree = vec![1usize; n];
        for &c in &self.code {
            degree[c] += 1;
        }
        let mut mask = 0u64;
        for &c in &self.code {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("Prüfer decoding always finds a leaf");
            mask |= 1 << pair_index(n, leaf, c);
            degree[leaf] -= 1;
            degree[c] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        mask | 1 << pair_index(n, rest[0], rest[1])
    }
}

impl Iterator for PruferTrees {
    type Item = EdgeMask;

    fn next(&mut self) -> Option<EdgeMask> {
        if self.done {
            return None;
        }
        let out = EdgeMask { n: self.n as u8, mask: self.decode() };
        // odometer increment
        let mut i = 0;
        loop {
            if i == self.code.len() {
                self.done = true;
                break;
            }
            self.code[i] += 1;
            if self.code[i] < self.n {
                break;
            }
            self.code[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

type MaskCache = [OnceLock<Arc<Vec<u64>>>; MAX_CLASS_VERTICES + 1];

fn cached(cache: &'static MaskCache, n: usize, class: GraphClass) -> Result<Arc<Vec<u64>>> {
    check_range(n, class)?;
    Ok(cache[n]
        .get_or_init(|| Arc::new(enumerate_class(n, class).expect("range checked").map(|g| g.mask).collect()))
        .clone())
}

/// Cached edge masks of all biconnected graphs on `n <= 7` vertices.
pub fn biconnected_masks(n: usize) -> Result<Arc<Vec<u64>>> {
    static CACHE: MaskCache = [const { OnceLock::new() }; MAX_CLASS_VERTICES + 1];
    if n > MAX_D_ORDER {
        return Err(Error::Capability(format!("D_n is supported for n <= {MAX_D_ORDER}")));
    }
    cached(&CACHE, n, GraphClass::Biconnected)
}

fn connected_masks(n: usize) -> Result<Arc<Vec<u64>>> {
    static CACHE: MaskCache = [const { OnceLock::new() }; MAX_CLASS_VERTICES + 1];
    if n > MAX_URSELL_BRUTE {
        return Err(Error::Capability(format!("brute-force Ursell sums are supported for n <= {MAX_URSELL_BRUTE}")));
    }
    cached(&CACHE, n, GraphClass::Connected)
}

fn sum_over_masks<S: Scalar>(n: usize, masks: &[u64], edge: &impl Fn(usize, usize) -> S) -> S {
    let weights: Vec<S> = pairs(n).into_iter().map(|(i, j)| edge(i, j)).collect();
    let zero_bits: u64 = weights.iter().enumerate().filter(|(_, w)| w.is_zero()).fold(0, |acc, (k, _)| acc | 1 << k);
    let mut acc = S::zero();
    for &mask in masks {
        if mask & zero_bits != 0 {
            continue;
        }
        let mut prod = S::one();
        let mut m = mask;
        while m != 0 {
            prod = prod * weights[m.trailing_zeros() as usize].clone();
            m &= m - 1;
        }
        acc = acc + prod;
    }
    acc
}

/// Connected-graph sum on `n` vertices with edge weights `edge(i, j)`, by
/// the cumulant recursion `phi(S) = w(S) - sum_{min S in T < S} phi(T) w(S\T)`.
pub fn ursell_with<S: Scalar>(n: usize, edge: impl Fn(usize, usize) -> S) -> S {
    assert!((1..=MAX_URSELL_FAST).contains(&n), "Ursell recursion supports 1..={MAX_URSELL_FAST} vertices");
    if n == 1 {
        return S::one();
    }
    let size = 1usize << n;
    let mut one_plus = vec![vec![S::one(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = S::one() + edge(i, j);
            one_plus[i][j] = v.clone();
            one_plus[j][i] = v;
        }
    }
    // w(S) = prod_{i<j in S} (1 + f_ij)
    let mut w = vec![S::one(); size];
    for s in 1..size {
        let top = usize::BITS - 1 - s.leading_zeros();
        let rest = s & !(1 << top);
        let mut v = w[rest].clone();
        let mut r = rest;
        while r != 0 && !v.is_zero() {
            v = v * one_plus[top as usize][r.trailing_zeros() as usize].clone();
            r &= r - 1;
        }
        w[s] = v;
    }
    let mut phi = vec![S::zero(); size];
    for s in 1..size {
        let low = s & s.wrapping_neg();
        let others = s & !low;
        let mut v = w[s].clone();
        // proper subsets T of s containing the lowest vertex: T = low | sub, sub a proper subset of `others`
        let mut sub = others;
        while sub != 0 {
            sub = (sub - 1) & others;
            let t = low | sub;
            if !phi[t].is_zero() && !w[s & !t].is_zero() {
                v = v - phi[t].clone() * w[s & !t].clone();
            }
        }
        phi[s] = v;
    }
    phi[size - 1].clone()
}

/// Connected-graph sum by explicit enumeration (oracle path, `n <= 6`).
pub fn ursell_brute_with<S: Scalar>(n: usize, edge: impl Fn(usize, usize) -> S) -> Result<S> {
    if n == 1 {
        return Ok(S::one());
    }
    Ok(sum_over_masks(n, &connected_masks(n)?, &edge))
}

/// Biconnected-graph sum on `2 <= n <= 7` vertices.
pub fn d_with<S: Scalar>(n: usize, edge: impl Fn(usize, usize) -> S) -> Result<S> {
    if !(2..=MAX_D_ORDER).contains(&n) {
        return Err(Error::Capability(format!("D_n needs 2 <= n <= {MAX_D_ORDER}, got {n}")));
    }
    Ok(sum_over_masks(n, &biconnected_masks(n)?, &edge))
}

/// `phi_n^T(x)` for the species tuple `xs`.
pub fn ursell<S: Scalar>(f: &FMatrix<S>, xs: &[usize]) -> S {
    ursell_with(xs.len(), |i, j| f.get(xs[i], xs[j]).clone())
}

pub fn ursell_brute<S: Scalar>(f: &FMatrix<S>, xs: &[usize]) -> Result<S> {
    ursell_brute_with(xs.len(), |i, j| f.get(xs[i], xs[j]).clone())
}

/// `D_n(x)` for the species tuple `xs`.
pub fn d_coeff<S: Scalar>(f: &FMatrix<S>, xs: &[usize]) -> Result<S> {
    d_with(xs.len(), |i, j| f.get(xs[i], xs[j]).clone())
}

/// `A_n(q; x) = -[prod_j (1 + f(q, x_j)) - 1] phi_n^T(x)`.
pub fn a_coeff<S: Scalar>(f: &FMatrix<S>, q: usize, xs: &[usize]) -> S {
    let bracket = xs.iter().fold(S::one(), |acc, &x| acc * (S::one() + f.get(q, x).clone())) - S::one();
    if bracket.is_zero() {
        return S::zero();
    }
    -(bracket * ursell(f, xs))
}

fn widen(x: &[Idx]) -> Vec<usize> {
    x.iter().map(|&i| i as usize).collect()
}

// Size policy belongs to the callers; here only what the templates can hold.
fn check_trunc(trunc: usize, species: usize) -> Result<()> {
    Limits::unlimited().check(species, trunc)
}

/// The family `A(q; .)` with `A_n(q; x)` at order `n` (order 0 is zero).
pub fn build_a_family<S: Scalar>(f: &FMatrix<S>, trunc: usize) -> Result<RootedFamily<S>> {
    check_trunc(trunc, f.size())?;
    Ok(RootedFamily::from_fn_unchecked(
        f.size(),
        trunc,
        |q, n, x| if n == 0 { S::zero() } else { a_coeff(f, q, &widen(x)) },
    ))
}

/// The family with `D_{n+1}(q, x)` at order `n` (order 0 is zero, order 1 is `f`).
pub fn build_d_family<S: Scalar>(f: &FMatrix<S>, trunc: usize) -> Result<RootedFamily<S>> {
    check_trunc(trunc, f.size())?;
    if trunc + 1 > MAX_D_ORDER {
        return Err(Error::Capability(format!("D family needs D_{}, beyond n = {MAX_D_ORDER}", trunc + 1)));
    }
    Ok(RootedFamily::from_fn_unchecked(f.size(), trunc, |q, n, x| {
        if n == 0 {
            return S::zero();
        }
        let mut xs = Vec::with_capacity(n + 1);
        xs.push(q);
        xs.extend(x.iter().map(|&i| i as usize));
        d_coeff(f, &xs).expect("order checked above")
    }))
}

/// The series of Ursell functions, `phi_n^T` at order `n` (order 0 is zero).
pub fn build_phi_series<S: Scalar>(f: &FMatrix<S>, trunc: usize) -> Result<FormalSeries<S>> {
    check_trunc(trunc, f.size())?;
    Ok(FormalSeries::from_fn_unchecked(f.size(), trunc, |n, x| if n == 0 { S::zero() } else { ursell(f, &widen(x)) }))
}

/// The series of biconnected sums, `D_n` at order `n >= 2` (orders 0 and 1 are zero).
pub fn build_d_series<S: Scalar>(f: &FMatrix<S>, trunc: usize) -> Result<FormalSeries<S>> {
    check_trunc(trunc, f.size())?;
    if trunc > MAX_D_ORDER {
        return Err(Error::Capability(format!("D series needs D_{trunc}, beyond n = {MAX_D_ORDER}")));
    }
    Ok(FormalSeries::from_fn_unchecked(f.size(), trunc, |n, x| {
        if n < 2 {
            S::zero()
        } else {
            d_coeff(f, &widen(x)).expect("order checked above")
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_matches_listing() {
        for n in 2..8 {
            for (k, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
            }
        }
    }

    #[test]
    fn small_graph_shapes() {
        let triangle = EdgeMask { n: 3, mask: 0b111 };
        assert!(triangle.is_biconnected());
        let path = EdgeMask { n: 3, mask: 0b011 };
        assert!(path.is_connected() && !path.is_biconnected());
        assert!(EdgeMask { n: 2, mask: 1 }.is_biconnected());
        assert_eq!(triangle.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn out_of_range_requests() {
        assert!(matches!(enumerate_class(9, GraphClass::Connected), Err(Error::Capability(_))));
        assert!(enumerate_class(9, GraphClass::Tree).is_ok());
        assert!(matches!(d_with(8, |_, _| 1.0), Err(Error::Capability(_))));
        assert!(matches!(d_with(1, |_, _| 1.0), Err(Error::Capability(_))));
    }
}
