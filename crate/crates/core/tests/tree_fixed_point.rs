mod common;

use common::*;
use num::traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use virialkit::graphs::build_a_family;
use virialkit::tree::*;
use virialkit::{FMatrix, FormalSeries, Rational, RootedFamily, Scalar};

fn random_a(s: usize, trunc: usize, r: &mut rand_chacha::ChaCha8Rng) -> RootedFamily<Rational> {
    random_family(s, trunc, Some(Rational::zero()), r)
}

fn ones_a(trunc: usize) -> RootedFamily<Rational> {
    RootedFamily::from_fn(1, trunc, |_, n, _| if n == 0 { Rational::zero() } else { Rational::one() }).unwrap()
}

#[test]
fn t1_and_t2_match_the_explicit_displays() {
    let mut r = rng(20);
    let a = random_a(3, 3, &mut r);
    let t = compute_tn(&a, 3).unwrap();
    for qq in 0..3 {
        for x1 in 0..3 {
            assert_eq!(t.get(qq, &[x1]), a.get(qq, &[x1]));
            for x2 in 0..3 {
                let expected = a.get(qq, &[x1, x2]).clone()
                    + a.get(qq, &[x1]).clone() * t.get(x1, &[x2]).clone()
                    + a.get(qq, &[x2]).clone() * t.get(x2, &[x1]).clone()
                    + a.get(qq, &[x1]).clone() * a.get(qq, &[x2]).clone();
                assert_eq!(*t.get(qq, &[x1, x2]), expected);
            }
        }
    }
}

#[test]
fn unit_weights_count_enriched_trees() {
    let t = compute_tn(&ones_a(5), 5).unwrap();
    assert_eq!(*t.get(0, &[0]), Rational::one());
    assert_eq!(*t.get(0, &[0, 0]), Rational::from_int(4));
    for n in 1..=5 {
        let count = enumerate_enriched_trees(n).unwrap().len();
        assert_eq!(*t.get(0, &vec![0; n]), Rational::from_int(count as i64));
    }
    assert_eq!(enumerate_enriched_trees(1).unwrap().len(), 1);
    assert_eq!(enumerate_enriched_trees(2).unwrap().len(), 4);
}

#[test]
fn enriched_trees_are_well_formed() {
    for n in 1..=4 {
        for tree in enumerate_enriched_trees(n).unwrap() {
            for v in 0..=n {
                let union = tree.cliques[v].iter().fold(0u32, |acc, &b| {
                    assert_eq!(acc & b, 0);
                    assert_ne!(b, 0);
                    acc | b
                });
                assert_eq!(union, tree.children(v));
            }
            for i in 1..=n {
                let mut v = i;
                for _ in 0..=n {
                    if v != 0 {
                        v = tree.parent[v - 1];
                    }
                }
                assert_eq!(v, 0);
            }
        }
    }
    assert!(enumerate_enriched_trees(6).is_err());
}

#[test]
fn zero_a_gives_trivial_t() {
    let a = RootedFamily::<Rational>::from_fn(2, 3, |_, _, _| Rational::zero()).unwrap();
    let t = compute_tn(&a, 3).unwrap();
    assert_eq!(t, RootedFamily::unit(2, 3).unwrap());
    assert!(verify_fp(&a, &t, 0.0).unwrap().passed);
    assert!(verify_fp_prime(&a, &t, 0.0).unwrap().passed);
}

#[test]
fn hard_core_single_species_fixed_points() {
    let f = FMatrix::constant(1, -Rational::one());
    let a = build_a_family(&f, 3).unwrap();
    let t = compute_tn(&a, 3).unwrap();
    let fp = verify_fp(&a, &t, 0.0).unwrap();
    assert!(fp.passed && fp.exact_zero, "{}", fp.summary());
    assert!(verify_fp_prime(&a, &t, 0.0).unwrap().passed);
}

#[test]
fn evaluation_at_zero_is_one() {
    let mut r = rng(21);
    let t = compute_tn(&random_a(2, 3, &mut r), 3).unwrap();
    assert_eq!(eval_t(&t, &[Rational::zero(), Rational::zero()], 1).unwrap(), Rational::one());
    let cert = eval_t_abs(&t, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert!(cert.passed);
    assert_eq!(implied_b(&t, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert!(eval_t_abs(&t, &[-1.0, 0.0], &[0.0, 0.0]).is_err());
}

#[test]
fn float_mode_fixed_points() {
    let mut r = rng(22);
    let f: FMatrix<f64> = random_f(3, &mut r).map(|v| v.real_f64());
    let a = build_a_family(&f, 4).unwrap();
    let t = compute_tn(&a, 4).unwrap();
    let rep = verify_fp(&a, &t, 1e-10).unwrap();
    assert!(rep.passed && !rep.exact, "{}", rep.summary());
    assert!(verify_fp_prime(&a, &t, 1e-10).unwrap().passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn recursion_matches_tree_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = r.gen_range(1..=3usize);
        let a = random_a(s, 4, &mut r);
        let t = compute_tn(&a, 4).unwrap();
        for n in 1..=4usize {
            let qq = r.gen_range(0..s);
            let xs: Vec<usize> = (0..n).map(|_| r.gen_range(0..s)).collect();
            prop_assert_eq!(t.get(qq, &xs).clone(), tn_via_trees(&a, n, qq, &xs).unwrap());
        }
    }

    #[test]
    fn fixed_point_residuals_vanish(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = r.gen_range(1..=3usize);
        let a = random_a(s, 4, &mut r);
        let t = compute_tn(&a, 4).unwrap();
        prop_assert!(verify_fp(&a, &t, 0.0).unwrap().exact_zero);
        prop_assert!(verify_fp_prime(&a, &t, 0.0).unwrap().exact_zero);
    }

    #[test]
    fn triangular_and_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = r.gen_range(1..=3usize);
        let a = random_a(s, 4, &mut r);
        let t = compute_tn(&a, 4).unwrap();
        // replace order 3 and 4 coefficients of A
        let perturbed = RootedFamily::new(
            (0..s).map(|qq| {
                let noise = random_series(s, 4, Some(Rational::zero()), &mut r);
                FormalSeries::from_fn(s, 4, |n, x| {
                    let xs: Vec<usize> = x.iter().map(|&i| i as usize).collect();
                    if n >= 3 { noise.get(&xs).clone() } else { a.get(qq, &xs).clone() }
                }).unwrap()
            }).collect()).unwrap();
        let t2 = compute_tn(&perturbed, 4).unwrap();
        for qq in 0..s {
            for n in 0..=2 {
                prop_assert_eq!(t.root(qq).coeff(n), t2.root(qq).coeff(n));
            }
        }
        let xs: Vec<usize> = (0..4).map(|_| r.gen_range(0..s)).collect();
        let mut ys = xs.clone();
        ys.swap(r.gen_range(0..4), r.gen_range(0..4));
        prop_assert_eq!(t.get(0, &xs), t.get(0, &ys));
    }
}
