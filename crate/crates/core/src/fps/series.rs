use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::layout::{gather, layout, multiplicity_factorial, Idx, Layout};
use super::templates::{ordered_partitions, rooted_compositions, set_partitions, MAX_TEMPLATE_ORDER};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Environment variable that raises the default order guard.
pub const MAX_ORDER_ENV: &str = "VIRIALKIT_MAX_ORDER";

const PAR_THRESHOLD: usize = 64;

/// Size guard applied when series are constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_order: usize,
    pub max_species: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_order: 6, max_species: 12 }
    }
}

impl Limits {
    /// Default limits, with the order guard raised by `VIRIALKIT_MAX_ORDER` when set.
    pub fn desk() -> Self {
        let mut l = Limits::default();
        if let Some(n) = std::env::var(MAX_ORDER_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            l.max_order = n.min(MAX_TEMPLATE_ORDER);
        }
        l
    }

    /// Everything the index templates can represent.
    pub fn unlimited() -> Self {
        Limits { max_order: MAX_TEMPLATE_ORDER, max_species: Idx::MAX as usize + 1 }
    }

    pub fn check(&self, species: usize, trunc: usize) -> Result<()> {
        if species == 0 {
            return Err(Error::Structural("species space must be non-empty".into()));
        }
        if trunc > self.max_order {
            return Err(Error::Capability(format!(
                "truncation order {trunc} exceeds limit {} (set {MAX_ORDER_ENV} to raise it)",
                self.max_order
            )));
        }
        if species > self.max_species {
            return Err(Error::Capability(format!("{species} species exceeds limit {}", self.max_species)));
        }
        Ok(())
    }
}

/// A symmetric coefficient tensor of a fixed order.
#[derive(Debug, Clone)]
pub struct SymTensor<S> {
    layout: Arc<Layout>,
    data: Vec<S>,
}

impl<S: PartialEq> PartialEq for SymTensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.layout.species() == other.layout.species()
            && self.layout.order() == other.layout.order()
            && self.data == other.data
    }
}

impl<S: Scalar> SymTensor<S> {
    pub fn zeros(species: usize, order: usize) -> Self {
        let layout = layout(species, order);
        let data = vec![S::zero(); layout.len()];
        SymTensor { layout, data }
    }

    /// Fills every canonical slot with `f(sorted multi-index)`. Entries are
    /// computed independently, so the result does not depend on scheduling.
    pub fn from_fn<F>(species: usize, order: usize, f: F) -> Self
    where
        F: Fn(&[Idx]) -> S + Sync,
    {
        let layout = layout(species, order);
        let n = layout.len();
        let data = if n < PAR_THRESHOLD {
            (0..n).map(|r| f(layout.tuple(r))).collect()
        } else {
            (0..n).into_par_iter().map(|r| f(layout.tuple(r))).collect()
        };
        SymTensor { layout, data }
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn species(&self) -> usize {
        self.layout.species()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    #[inline]
    pub fn get_sorted(&self, x: &[Idx]) -> &S {
        &self.data[self.layout.rank(x)]
    }

    /// Entry at an arbitrary (unsorted) multi-index.
    pub fn get(&self, x: &[usize]) -> &S {
        let mut buf: Vec<Idx> = x.iter().map(|&i| i as Idx).collect();
        buf.sort_unstable();
        self.get_sorted(&buf)
    }

    pub fn set(&mut self, x: &[usize], value: S) {
        let mut buf: Vec<Idx> = x.iter().map(|&i| i as Idx).collect();
        buf.sort_unstable();
        let r = self.layout.rank(&buf);
        self.data[r] = value;
    }

    pub fn values(&self) -> &[S] {
        &self.data
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[Idx], &S)> {
        (0..self.data.len()).map(move |r| (self.layout.tuple(r), &self.data[r]))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SymTensor<T> {
        SymTensor { layout: self.layout.clone(), data: self.data.iter().map(f).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        SymTensor {
            layout: self.layout.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    /// Dense `S^n` expansion in row-major order (debug backend for small `n`).
    pub fn to_dense(&self) -> Vec<S> {
        let s = self.species();
        let n = self.order();
        let total = s.pow(n as u32);
        let mut idx = vec![0usize; n];
        (0..total)
            .map(|mut code| {
                for slot in idx.iter_mut().rev() {
                    *slot = code % s;
                    code /= s;
                }
                self.get(&idx).clone()
            })
            .collect()
    }
}

/// Product of `coeffs[|block|](x_block)` over the blocks of a partition.
#[inline]
fn partition_product<S: Scalar>(coeffs: &[SymTensor<S>], x: &[Idx], blocks: &[u32], buf: &mut [Idx]) -> S {
    let mut acc = S::one();
    for &b in blocks {
        let k = gather(x, b, buf);
        let v = coeffs[k].get_sorted(&buf[..k]);
        if v.is_zero() {
            return S::zero();
        }
        acc = acc * v.clone();
    }
    acc
}

/// A truncated formal power series: symmetric coefficient tensors of orders `0..=trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<S> {
    species: usize,
    coeffs: Vec<SymTensor<S>>,
}

impl<S: Scalar> FormalSeries<S> {
    /// The zero series, subject to the desk-scale [`Limits`].
    pub fn zero(species: usize, trunc: usize) -> Result<Self> {
        Self::zero_with(species, trunc, &Limits::desk())
    }

    pub fn zero_with(species: usize, trunc: usize, limits: &Limits) -> Result<Self> {
        limits.check(species, trunc)?;
        Ok(Self::zero_unchecked(species, trunc))
    }

    pub(crate) fn zero_unchecked(species: usize, trunc: usize) -> Self {
        FormalSeries { species, coeffs: (0..=trunc).map(|n| SymTensor::zeros(species, n)).collect() }
    }

    /// The multiplicative unit.
    pub fn unit(species: usize, trunc: usize) -> Result<Self> {
        let mut s = Self::zero(species, trunc)?;
        s.coeffs[0].data[0] = S::one();
        Ok(s)
    }

    pub fn from_fn<F>(species: usize, trunc: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, &[Idx]) -> S + Sync,
    {
        Self::from_fn_with(species, trunc, &Limits::desk(), f)
    }

    pub fn from_fn_with<F>(species: usize, trunc: usize, limits: &Limits, f: F) -> Result<Self>
    where
        F: Fn(usize, &[Idx]) -> S + Sync,
    {
        limits.check(species, trunc)?;
        Ok(Self::from_fn_unchecked(species, trunc, f))
    }

    pub(crate) fn from_fn_unchecked<F>(species: usize, trunc: usize, f: F) -> Self
    where
        F: Fn(usize, &[Idx]) -> S + Sync,
    {
        let coeffs = (0..=trunc).map(|n| SymTensor::from_fn(species, n, |x| f(n, x))).collect();
        FormalSeries { species, coeffs }
    }

    pub fn from_tensors(coeffs: Vec<SymTensor<S>>) -> Result<Self> {
        let species = coeffs.first().map(|t| t.species()).ok_or_else(|| Error::Structural("no coefficients".into()))?;
        for (n, t) in coeffs.iter().enumerate() {
            if t.order() != n || t.species() != species {
                return Err(Error::Structural(format!("coefficient {n} has the wrong shape")));
            }
        }
        Ok(FormalSeries { species, coeffs })
    }

    pub fn species(&self) -> usize {
        self.species
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &SymTensor<S> {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[SymTensor<S>] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, t: SymTensor<S>) -> Result<()> {
        if n > self.trunc() || t.order() != n || t.species() != self.species {
            return Err(Error::Structural(format!("cannot place tensor at order {n}")));
        }
        self.coeffs[n] = t;
        Ok(())
    }

    /// Coefficient at an arbitrary multi-index; its length selects the order.
    pub fn get(&self, x: &[usize]) -> &S {
        self.coeffs[x.len()].get(x)
    }

    pub fn constant(&self) -> &S {
        &self.coeffs[0].data[0]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> FormalSeries<T> {
        FormalSeries { species: self.species, coeffs: self.coeffs.iter().map(|c| c.map(f)).collect() }
    }

    /// Drops all orders above `n`.
    pub fn truncate(&self, n: usize) -> Self {
        FormalSeries { species: self.species, coeffs: self.coeffs[..=n.min(self.trunc())].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest coefficient modulus per order.
    pub fn max_magnitude_by_order(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.max_magnitude()).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.species != other.species || self.trunc() != other.trunc() {
            return Err(Error::Structural(format!(
                "series shapes differ: (S={}, N={}) vs (S={}, N={})",
                self.species,
                self.trunc(),
                other.species,
                other.trunc()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FormalSeries {
            species: self.species,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.zip(b, |u, v| u.clone() + v.clone()))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FormalSeries {
            species: self.species,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.zip(b, |u, v| u.clone() - v.clone()))
                .collect(),
        })
    }

    pub fn scale(&self, lambda: &S) -> Self {
        self.map_owned(|v| lambda.clone() * v.clone())
    }

    pub fn neg(&self) -> Self {
        self.map_owned(|v| -v.clone())
    }

    fn map_owned(&self, f: impl Fn(&S) -> S) -> Self {
        FormalSeries {
            species: self.species,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| SymTensor { layout: c.layout.clone(), data: c.data.iter().map(&f).collect() })
                .collect(),
        }
    }

    /// `(KG)_n(x) = sum_{J subset [n]} K(x_J) G(x_{[n]\J})`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_fn_unchecked(self.species, self.trunc(), |n, x| {
            let full: u32 = (1u32 << n) - 1;
            let mut a = [0 as Idx; MAX_TEMPLATE_ORDER];
            let mut b = [0 as Idx; MAX_TEMPLATE_ORDER];
            let mut acc = S::zero();
            for j in 0..=full {
                let ka = gather(x, j, &mut a);
                let kb = gather(x, full & !j, &mut b);
                let u = self.coeffs[ka].get_sorted(&a[..ka]);
                if u.is_zero() {
                    continue;
                }
                acc = acc + u.clone() * other.coeffs[kb].get_sorted(&b[..kb]).clone();
            }
            acc
        }))
    }

    /// Product of several series via the ordered-partition formula.
    pub fn multi_product(factors: &[Self]) -> Result<Self> {
        let first = factors.first().ok_or_else(|| Error::Structural("multi_product needs a factor".into()))?;
        for f in &factors[1..] {
            first.check_compatible(f)?;
        }
        let r = factors.len();
        let templates: Vec<Vec<Vec<u32>>> = (0..=first.trunc()).map(|n| ordered_partitions(n, r)).collect();
        Ok(Self::from_fn_unchecked(first.species, first.trunc(), |n, x| {
            let mut buf = [0 as Idx; MAX_TEMPLATE_ORDER];
            let mut acc = S::zero();
            'outer: for blocks in &templates[n] {
                let mut prod = S::one();
                for (f, &b) in factors.iter().zip(blocks) {
                    let k = gather(x, b, &mut buf);
                    let v = f.coeffs[k].get_sorted(&buf[..k]);
                    if v.is_zero() {
                        continue 'outer;
                    }
                    prod = prod * v.clone();
                }
                acc = acc + prod;
            }
            acc
        }))
    }

    fn require_constant(&self, value: S, op: &str) -> Result<()> {
        if *self.constant() != value {
            return Err(Error::Domain(format!("{op}: constant term must be {value}, found {}", self.constant())));
        }
        Ok(())
    }

    /// `(F o K)_n = sum over set partitions of f_{#blocks} prod K_{|block|}`; needs `K_0 = 0`.
    pub fn compose_univariate(f: &[S], k: &Self) -> Result<Self> {
        k.require_constant(S::zero(), "composition")?;
        let coef = |m: usize| f.get(m).cloned().unwrap_or_else(S::zero);
        let parts: Vec<_> = (0..=k.trunc()).map(set_partitions).collect();
        Ok(Self::from_fn_unchecked(k.species, k.trunc(), |n, x| {
            if n == 0 {
                return coef(0);
            }
            let mut buf = [0 as Idx; MAX_TEMPLATE_ORDER];
            let mut acc = S::zero();
            for p in parts[n].iter() {
                let fm = coef(p.len());
                if fm.is_zero() {
                    continue;
                }
                acc = acc + fm * partition_product(&k.coeffs, x, p, &mut buf);
            }
            acc
        }))
    }

    pub fn exp_series(&self) -> Result<Self> {
        self.require_constant(S::zero(), "exp")?;
        let mut out = Self::zero_unchecked(self.species, self.trunc());
        for n in 0..=self.trunc() {
            out.coeffs[n] = exp_order(self, n);
        }
        Ok(out)
    }

    /// The unique `L` with `L_0 = 0` and `exp(L) = K` through the truncation order.
    pub fn log_series(&self) -> Result<Self> {
        self.require_constant(S::one(), "log")?;
        let mut out = Self::zero_unchecked(self.species, self.trunc());
        for n in 1..=self.trunc() {
            let parts = set_partitions(n);
            let t = SymTensor::from_fn(self.species, n, |x| {
                let mut buf = [0 as Idx; MAX_TEMPLATE_ORDER];
                let mut acc = self.coeffs[n].get_sorted(x).clone();
                for p in parts.iter().filter(|p| p.len() >= 2) {
                    acc = acc - partition_product(&out.coeffs, x, p, &mut buf);
                }
                acc
            });
            out.coeffs[n] = t;
        }
        Ok(out)
    }

    /// `(dK/dz(q))_n(x) = K_{n+1}(q, x)`; the result is truncated one order lower.
    pub fn var_derivative(&self, q: usize) -> Result<Self> {
        if self.trunc() == 0 {
            return Err(Error::Domain("variational derivative needs truncation order >= 1".into()));
        }
        if q >= self.species {
            return Err(Error::Structural(format!("species {q} out of range")));
        }
        Ok(Self::from_fn_unchecked(self.species, self.trunc() - 1, |n, x| {
            let mut buf = [0 as Idx; MAX_TEMPLATE_ORDER + 1];
            insert_sorted(x, q as Idx, &mut buf);
            self.coeffs[n + 1].get_sorted(&buf[..n + 1]).clone()
        }))
    }

    /// Substitutes `nu(x) = z(x) G_x(z)` into this series.
    pub fn compose_measure(&self, g: &RootedFamily<S>) -> Result<Self> {
        if g.species() != self.species || g.trunc() != self.trunc() {
            return Err(Error::Structural("compose_measure: family shape differs from series".into()));
        }
        let mut out = Self::zero_unchecked(self.species, self.trunc());
        for n in 0..=self.trunc() {
            out.coeffs[n] = compose_measure_order(self, g, n);
        }
        Ok(out)
    }

    /// Contribution of each order to the value at a measure with masses
    /// `m_x = nu(x) w_x`: `(1/n!) sum_{x in X^n} K_n(x) prod m`.
    pub fn eval_terms(&self, masses: &[S]) -> Result<Vec<S>> {
        if masses.len() != self.species {
            return Err(Error::Structural("measure length differs from species count".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|c| {
                let mut acc = S::zero();
                for (x, v) in c.entries() {
                    if v.is_zero() {
                        continue;
                    }
                    let mut term = v.clone();
                    for &i in x {
                        term = term * masses[i as usize].clone();
                    }
                    let mf = multiplicity_factorial(x);
                    if mf != 1 {
                        term = term * S::from_ratio(1, mf as i64);
                    }
                    acc = acc + term;
                }
                acc
            })
            .collect())
    }

    pub fn eval(&self, masses: &[S]) -> Result<S> {
        Ok(self.eval_terms(masses)?.into_iter().fold(S::zero(), |a, b| a + b))
    }

    /// JSON dump: one list of `{multiindex, value}` records per order.
    pub fn to_json(&self) -> Value {
        let orders: Vec<Value> = self
            .coeffs
            .iter()
            .map(|c| Value::Array(c.entries().map(|(x, v)| json!({"multiindex": x, "value": v.to_json()})).collect()))
            .collect();
        json!({"species": self.species, "trunc": self.trunc(), "orders": orders})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("series JSON: {m}"));
        let species = v["species"].as_u64().ok_or_else(|| bad("missing species"))? as usize;
        let trunc = v["trunc"].as_u64().ok_or_else(|| bad("missing trunc"))? as usize;
        let mut out = Self::zero(species, trunc)?;
        let orders = v["orders"].as_array().ok_or_else(|| bad("missing orders"))?;
        for (n, entries) in orders.iter().enumerate().take(trunc + 1) {
            for e in entries.as_array().ok_or_else(|| bad("order is not a list"))? {
                let idx: Vec<usize> =
                    serde_json::from_value(e["multiindex"].clone()).map_err(|_| bad("bad multiindex"))?;
                if idx.len() != n || idx.iter().any(|&i| i >= species) {
                    return Err(bad("multiindex does not match its order"));
                }
                let val = S::from_json(&e["value"]).ok_or_else(|| bad("bad value"))?;
                out.coeffs[n].set(&idx, val);
            }
        }
        Ok(out)
    }
}

fn insert_sorted(x: &[Idx], q: Idx, out: &mut [Idx]) {
    let pos = x.partition_point(|&v| v < q);
    out[..pos].copy_from_slice(&x[..pos]);
    out[pos] = q;
    out[pos + 1..=x.len()].copy_from_slice(&x[pos..]);
}

/// Order-`n` coefficient of `exp(k)`, reading only orders `1..=n` of `k`.
pub fn exp_order<S: Scalar>(k: &FormalSeries<S>, n: usize) -> SymTensor<S> {
    if n == 0 {
        return SymTensor::from_fn(k.species, 0, |_| S::one());
    }
    let parts = set_partitions(n);
    SymTensor::from_fn(k.species, n, |x| {
        let mut buf = [0 as Idx; MAX_TEMPLATE_ORDER];
        parts.iter().fold(S::zero(), |acc, p| acc + partition_product(&k.coeffs, x, p, &mut buf))
    })
}

/// Order-`n` coefficient of `k` composed with the rooted family `g`. Reads
/// `g` only at orders `< n` (and order `0`), which is what makes the tree
/// recursion triangular.
pub fn compose_measure_order<S: Scalar>(k: &FormalSeries<S>, g: &RootedFamily<S>, n: usize) -> SymTensor<S> {
    if n == 0 {
        return k.coeffs[0].clone();
    }
    let comps = rooted_compositions(n);
    SymTensor::from_fn(k.species, n, |x| {
        let mut a = [0 as Idx; MAX_TEMPLATE_ORDER];
        let mut b = [0 as Idx; MAX_TEMPLATE_ORDER];
        let mut acc = S::zero();
        'outer: for rc in comps.iter() {
            let m = gather(x, rc.roots, &mut a);
            let kv = k.coeffs[m].get_sorted(&a[..m]);
            if kv.is_zero() {
                continue;
            }
            let mut prod = kv.clone();
            for &(j, v) in &rc.blocks {
                let len = gather(x, v, &mut b);
                let gv = g.roots[x[j as usize] as usize].coeffs[len].get_sorted(&b[..len]);
                if gv.is_zero() {
                    continue 'outer;
                }
                prod = prod * gv.clone();
            }
            acc = acc + prod;
        }
        acc
    })
}

/// One formal series per root species `q`: the coefficient at order `n`
/// holds `G_n(q; x_1..x_n)`, symmetric in the `x` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedFamily<S> {
    roots: Vec<FormalSeries<S>>,
}

impl<S: Scalar> RootedFamily<S> {
    pub fn new(roots: Vec<FormalSeries<S>>) -> Result<Self> {
        let first = roots.first().ok_or_else(|| Error::Structural("empty family".into()))?;
        if roots.len() != first.species {
            return Err(Error::Structural(format!("family has {} roots for {} species", roots.len(), first.species)));
        }
        for r in &roots[1..] {
            first.check_compatible(r)?;
        }
        Ok(RootedFamily { roots })
    }

    pub fn from_fn<F>(species: usize, trunc: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, &[Idx]) -> S + Sync,
    {
        Limits::desk().check(species, trunc)?;
        Ok(Self::from_fn_unchecked(species, trunc, f))
    }

    pub(crate) fn from_fn_unchecked<F>(species: usize, trunc: usize, f: F) -> Self
    where
        F: Fn(usize, usize, &[Idx]) -> S + Sync,
    {
        RootedFamily {
            roots: (0..species).map(|q| FormalSeries::from_fn_unchecked(species, trunc, |n, x| f(q, n, x))).collect(),
        }
    }

    /// The family `G_q = 1` for every `q`.
    pub fn unit(species: usize, trunc: usize) -> Result<Self> {
        Self::from_fn(species, trunc, |_, n, _| if n == 0 { S::one() } else { S::zero() })
    }

    pub fn species(&self) -> usize {
        self.roots.len()
    }

    pub fn trunc(&self) -> usize {
        self.roots[0].trunc()
    }

    pub fn root(&self, q: usize) -> &FormalSeries<S> {
        &self.roots[q]
    }

    pub fn roots(&self) -> &[FormalSeries<S>] {
        &self.roots
    }

    pub(crate) fn root_mut(&mut self, q: usize) -> &mut FormalSeries<S> {
        &mut self.roots[q]
    }

    pub fn get(&self, q: usize, x: &[usize]) -> &S {
        self.roots[q].get(x)
    }

    /// Applies a series-level operation to every root.
    pub fn try_map(&self, f: impl Fn(&FormalSeries<S>) -> Result<FormalSeries<S>>) -> Result<Self> {
        RootedFamily::new(self.roots.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    pub fn truncate(&self, n: usize) -> Self {
        RootedFamily { roots: self.roots.iter().map(|r| r.truncate(n)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.roots.iter().all(|r| r.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> RootedFamily<T> {
        RootedFamily { roots: self.roots.iter().map(|r| r.map(f)).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.roots.iter().map(|r| r.to_json()).collect())
    }
}
