//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use virialkit::fps::Idx;
use virialkit::graphs::pairs;
use virialkit::{FMatrix, FormalSeries, Rational, RootedFamily, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Small rational with mixed sign.
pub fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    q(r.gen_range(-5..=5), r.gen_range(1..=4))
}

pub fn random_series(
    species: usize,
    trunc: usize,
    constant: Option<Rational>,
    r: &mut ChaCha8Rng,
) -> FormalSeries<Rational> {
    let vals: Vec<Vec<Rational>> = (0..=trunc)
        .map(|n| {
            let len = virialkit::fps::layout(species, n).len();
            (0..len).map(|_| small_rational(r)).collect()
        })
        .collect();
    FormalSeries::from_fn(species, trunc, |n, x: &[Idx]| {
        if n == 0 {
            if let Some(c) = &constant {
                return c.clone();
            }
        }
        vals[n][virialkit::fps::layout(species, n).rank(x)].clone()
    })
    .unwrap()
}

pub fn random_family(
    species: usize,
    trunc: usize,
    constant: Option<Rational>,
    r: &mut ChaCha8Rng,
) -> RootedFamily<Rational> {
    RootedFamily::new((0..species).map(|_| random_series(species, trunc, constant.clone(), r)).collect()).unwrap()
}

/// Random symmetric Mayer matrix over the rationals, mixing hard cores,
/// zeros, attractive and repulsive entries.
pub fn random_f(species: usize, r: &mut ChaCha8Rng) -> FMatrix<Rational> {
    let mut rows = vec![vec![Rational::zero(); species]; species];
    for i in 0..species {
        for j in i..species {
            let v = match r.gen_range(0..4) {
                0 => -Rational::one(),
                1 => Rational::zero(),
                2 => q(-r.gen_range(1..=3), 4),
                _ => q(r.gen_range(1..=6), 4),
            };
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    FMatrix::from_rows(rows).unwrap()
}

pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |a, k| a * Rational::from_int(k))
}

pub fn binom(n: usize, k: usize) -> Rational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Truncated ordinary power series in one variable: the univariate oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Ops(pub Vec<Rational>);

impl Ops {
    pub fn from_egf(a: &[Rational]) -> Ops {
        Ops(a.iter().enumerate().map(|(n, v)| v.clone() / factorial(n)).collect())
    }

    pub fn to_egf(&self) -> Vec<Rational> {
        self.0.iter().enumerate().map(|(n, v)| v.clone() * factorial(n)).collect()
    }

    pub fn mul(&self, o: &Ops) -> Ops {
        let n = self.0.len();
        let mut c = vec![Rational::zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = c[i + j].clone() + self.0[i].clone() * o.0[j].clone();
            }
        }
        Ops(c)
    }

    pub fn add(&self, o: &Ops) -> Ops {
        Ops(self.0.iter().zip(&o.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn scale(&self, s: &Rational) -> Ops {
        Ops(self.0.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn unit(len: usize) -> Ops {
        let mut v = vec![Rational::zero(); len];
        v[0] = Rational::one();
        Ops(v)
    }

    /// `sum_m f_m K^m / m!`; requires `K(0) = 0`.
    pub fn compose_egf_outer(f: &[Rational], k: &Ops) -> Ops {
        let len = k.0.len();
        let mut out = Ops(vec![Rational::zero(); len]);
        let mut pow = Ops::unit(len);
        for m in 0..len {
            let c = f.get(m).cloned().unwrap_or_else(Rational::zero) / factorial(m);
            out = out.add(&pow.scale(&c));
            pow = pow.mul(k);
        }
        out
    }

    /// `K(t)` with `t` a series vanishing at 0.
    pub fn substitute(&self, t: &Ops) -> Ops {
        let len = self.0.len();
        let mut out = Ops(vec![Rational::zero(); len]);
        let mut pow = Ops::unit(len);
        for m in 0..len {
            out = out.add(&pow.scale(&self.0[m]));
            pow = pow.mul(t);
        }
        out
    }
}

pub fn single_species_egf(s: &FormalSeries<Rational>) -> Vec<Rational> {
    (0..=s.trunc()).map(|n| s.get(&vec![0; n]).clone()).collect()
}

pub fn series_from_egf(a: &[Rational]) -> FormalSeries<Rational> {
    FormalSeries::from_fn(1, a.len() - 1, |n, _| a[n].clone()).unwrap()
}

pub fn is_exact_zero<S: Scalar>(s: &FormalSeries<S>) -> bool {
    s.is_zero()
}

/// Independent connectivity test by union-find over an explicit edge list.
pub fn uf_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

pub fn edges_of(n: usize, mask: u64) -> Vec<(usize, usize)> {
    pairs(n).into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e).collect()
}

/// Connected, biconnected and tree counts on `n` labelled vertices by
/// union-find over every edge subset.
pub fn recount(n: usize) -> (usize, usize, usize) {
    let m = n * (n - 1) / 2;
    let (mut conn, mut bic, mut trees) = (0, 0, 0);
    for mask in 0u64..1 << m {
        let e = edges_of(n, mask);
        if uf_components(n, &e) != 1 {
            continue;
        }
        conn += 1;
        if e.len() == n - 1 {
            trees += 1;
        }
        let no_cut = (0..n).all(|v| {
            let rest: Vec<(usize, usize)> = e
                .iter()
                .filter(|&&(a, b)| a != v && b != v)
                .map(|&(a, b)| (a - (a > v) as usize, b - (b > v) as usize))
                .collect();
            uf_components(n - 1, &rest) == 1
        });
        if n == 2 || no_cut {
            bic += 1;
        }
    }
    (conn, bic, trees)
}
