mod common;

use common::*;
use num::traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use virialkit::fps::templates::set_partitions;
use virialkit::graphs::*;
use virialkit::{FMatrix, Rational};

#[test]
fn class_counts_match_independent_recount() {
    let connected = [1, 4, 38, 728];
    let bicon = [1, 1, 10, 238];
    for n in 2..=5 {
        let (c, b, t) = recount(n);
        assert_eq!(c, connected[n - 2]);
        assert_eq!(b, bicon[n - 2]);
        assert_eq!(t, n.pow(n as u32 - 2));
        assert_eq!(enumerate_class(n, GraphClass::Connected).unwrap().count(), c);
        assert_eq!(enumerate_class(n, GraphClass::Biconnected).unwrap().count(), b);
        assert_eq!(class_count(n, GraphClass::Biconnected).unwrap(), b);
        assert_eq!(enumerate_class(n, GraphClass::Tree).unwrap().count(), t);
    }
    assert_eq!(class_count(6, GraphClass::Connected).unwrap(), 26704);
    assert_eq!(class_count(6, GraphClass::Biconnected).unwrap(), 11368);
}

#[test]
fn trees_are_distinct_connected_graphs_with_n_minus_one_edges() {
    for n in 2..=7 {
        let mut masks: Vec<u64> = enumerate_class(n, GraphClass::Tree)
            .unwrap()
            .map(|g| {
                assert_eq!(g.edge_count() as usize, n - 1);
                assert!(g.is_connected());
                g.mask
            })
            .collect();
        let total = masks.len();
        masks.sort_unstable();
        masks.dedup();
        assert_eq!(masks.len(), total);
        assert_eq!(total, n.pow(n as u32 - 2));
    }
    let brute = enumerate_class(5, GraphClass::Connected).unwrap().filter(|g| g.edge_count() == 4).count();
    assert_eq!(brute, 125);
}

#[test]
fn biconnected_subset_of_connected() {
    for g in enumerate_class(5, GraphClass::Biconnected).unwrap() {
        assert!(g.is_connected());
    }
}

#[test]
fn ursell_small_cases() {
    let mut r = rng(10);
    let f = random_f(3, &mut r);
    let (a, b, c) = (f.get(0, 1).clone(), f.get(0, 2).clone(), f.get(1, 2).clone());
    assert_eq!(ursell(&f, &[0, 1]), a);
    let expected =
        a.clone() * b.clone() + a.clone() * c.clone() + b.clone() * c.clone() + a.clone() * b.clone() * c.clone();
    assert_eq!(ursell(&f, &[0, 1, 2]), expected);
    let hard = FMatrix::constant(1, -Rational::one());
    assert_eq!(ursell(&hard, &[0, 0]), -Rational::one());
    assert_eq!(ursell(&hard, &[0]), Rational::one());
}

#[test]
fn d_coefficient_examples() {
    let mut r = rng(11);
    let f = random_f(3, &mut r);
    assert_eq!(d_coeff(&f, &[0, 1]).unwrap(), f.get(0, 1).clone());
    assert_eq!(d_coeff(&f, &[0, 1, 2]).unwrap(), f.get(0, 1).clone() * f.get(0, 2).clone() * f.get(1, 2).clone());
    let hard = FMatrix::constant(1, -Rational::one());
    assert_eq!(d_coeff(&hard, &[0; 4]).unwrap(), Rational::from_integer((-2).into()));
}

#[test]
fn a_coefficient_examples() {
    let mut r = rng(12);
    let f = random_f(3, &mut r);
    assert_eq!(a_coeff(&f, 0, &[2]), -f.get(0, 2).clone());
    let zero = FMatrix::<Rational>::zeros(2);
    assert!(a_coeff(&zero, 0, &[1, 1]).is_zero());
    let hard = FMatrix::constant(1, -Rational::one());
    assert_eq!(a_coeff(&hard, 0, &[0, 0]), -Rational::one());
}

#[test]
fn family_slices() {
    let mut r = rng(13);
    let f = random_f(3, &mut r);
    let a = build_a_family(&f, 2).unwrap();
    let d = build_d_family(&f, 2).unwrap();
    let phi = build_phi_series(&f, 3).unwrap();
    for q in 0..3 {
        for x in 0..3 {
            assert_eq!(*a.get(q, &[x]), -f.get(q, x).clone());
            assert_eq!(*d.get(q, &[x]), f.get(q, x).clone());
        }
        assert_eq!(*phi.get(&[q]), Rational::one());
    }
    assert!(build_d_family(&f, 7).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn fast_ursell_equals_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = r.gen_range(1..=4usize);
        let f = random_f(s, &mut r);
        for n in 1..=6usize {
            let xs: Vec<usize> = (0..n).map(|_| r.gen_range(0..s)).collect();
            prop_assert_eq!(ursell(&f, &xs), ursell_brute(&f, &xs).unwrap());
        }
    }

    #[test]
    fn boltzmann_factor_is_partition_sum_of_ursell(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6usize);
        let edge: Vec<Vec<Rational>> = {
            let mut e = vec![vec![Rational::zero(); n]; n];
            for i in 0..n { for j in i + 1..n { let v = small_rational(&mut r); e[i][j] = v.clone(); e[j][i] = v; } }
            e
        };
        let mut lhs = Rational::one();
        for i in 0..n { for j in i + 1..n { lhs *= Rational::one() + edge[i][j].clone(); } }
        let mut rhs = Rational::zero();
        for p in set_partitions(n).iter() {
            let mut prod = Rational::one();
            for &b in p {
                let verts: Vec<usize> = (0..n).filter(|v| b >> v & 1 == 1).collect();
                prod *= ursell_with(verts.len(), |i, j| edge[verts[i]][verts[j]].clone());
            }
            rhs += prod;
        }
        prop_assert_eq!(lhs, rhs);
    }
}
