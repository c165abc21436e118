//! Finite species spaces, pair potentials and Mayer functions.
//!
//! A species space is the discretization of the one-particle space: every
//! integral against a measure becomes a sum `sum_x value[x] * weight[x]`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::certificate::{BoundCertificate, Condition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Optional geometric data attached to a species.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Orientation angle in radians (planar rods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub id: usize,
    pub payload: Payload,
}

/// Ordered species `0..S-1` with positive quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpace {
    species: Vec<Species>,
    weights: Vec<f64>,
}

impl SpeciesSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let payloads = vec![Payload::default(); weights.len()];
        Self::with_payloads(weights, payloads)
    }

    pub fn uniform(count: usize, weight: f64) -> Result<Self> {
        Self::new(vec![weight; count])
    }

    pub fn with_payloads(weights: Vec<f64>, payloads: Vec<Payload>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("species space needs at least one species".into()));
        }
        if payloads.len() != weights.len() {
            return Err(Error::Structural(format!("{} payloads for {} species", payloads.len(), weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Input(format!("quadrature weight {w} is not positive and finite")));
        }
        let species = payloads.into_iter().enumerate().map(|(id, payload)| Species { id, payload }).collect();
        Ok(SpeciesSpace { species, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }
}

/// One value per species: an activity, a density, or a reference measure,
/// expressed as a density with respect to the quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVec<S> {
    values: Vec<S>,
}

impl<S: Scalar> MeasureVec<S> {
    pub fn new(space: &SpeciesSpace, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Structural(format!("measure has {} entries for {} species", values.len(), space.len())));
        }
        Ok(MeasureVec { values })
    }

    pub fn zero(space: &SpeciesSpace) -> Self {
        MeasureVec { values: vec![S::zero(); space.len()] }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize) -> &S {
        &self.values[x]
    }

    /// `sum_x |value[x]| * weight[x]`.
    pub fn total_variation(&self, space: &SpeciesSpace) -> f64 {
        self.values.iter().zip(space.weights()).map(|(v, w)| v.magnitude() * w).sum()
    }

    /// The measure masses `value[x] * weight[x]`.
    pub fn masses(&self, space: &SpeciesSpace) -> Vec<S>
    where
        S: Scalar,
    {
        self.values
            .iter()
            .zip(space.weights())
            .map(|(v, w)| v.clone() * S::from_f64_exact(*w).unwrap_or_else(S::zero))
            .collect()
    }

    /// Entrywise moduli.
    pub fn abs(&self) -> MeasureVec<f64> {
        MeasureVec { values: self.values.iter().map(Scalar::magnitude).collect() }
    }

    pub fn scaled(&self, factor: S) -> Self {
        MeasureVec { values: self.values.iter().map(|v| v.clone() * factor.clone()).collect() }
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }
}

/// A pair energy in `R ∪ {+∞}`; hard cores are tagged, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Finite(f64),
    HardCore,
}

impl Energy {
    pub fn is_hard_core(self) -> bool {
        matches!(self, Energy::HardCore)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Energy::Finite(v) => Some(v),
            Energy::HardCore => None,
        }
    }
}

impl Serialize for Energy {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            Energy::Finite(v) => s.serialize_f64(*v),
            Energy::HardCore => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Energy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct EnergyVisitor;
        impl<'de> Visitor<'de> for EnergyVisitor {
            type Value = Energy;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number, \"inf\", or null")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Energy, E> {
                if v == f64::INFINITY {
                    Ok(Energy::HardCore)
                } else if v.is_finite() {
                    Ok(Energy::Finite(v))
                } else {
                    Err(E::custom("pair energy must be finite or +inf"))
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Energy, E> {
                Ok(Energy::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Energy, E> {
                Ok(Energy::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Energy, E> {
                match v.trim().to_ascii_lowercase().as_str() {
                    "inf" | "+inf" | "infinity" | "+infinity" => Ok(Energy::HardCore),
                    other => Err(E::custom(format!("unknown energy literal {other:?}"))),
                }
            }
            fn visit_unit<E: de::Error>(self) -> std::result::Result<Energy, E> {
                Ok(Energy::HardCore)
            }
        }
        d.deserialize_any(EnergyVisitor)
    }
}

/// Symmetric pair potential with stability constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPotential {
    beta: f64,
    v: Vec<Vec<Energy>>,
    b_stability: Vec<f64>,
    b_star: Vec<f64>,
}

impl PairPotential {
    /// Builds a potential; `b_star` defaults to the smallest admissible value
    /// `max(0, -min_y v[x][y])` and `b_stability` to zero.
    pub fn new(
        beta: f64,
        v: Vec<Vec<Energy>>,
        b_stability: Option<Vec<f64>>,
        b_star: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Input(format!("beta = {beta} must be positive")));
        }
        let s = v.len();
        if s == 0 || v.iter().any(|row| row.len() != s) {
            return Err(Error::Structural("potential must be a non-empty square matrix".into()));
        }
        for i in 0..s {
            for j in 0..i {
                if v[i][j] != v[j][i] {
                    return Err(Error::Input(format!("potential not symmetric at ({i},{j})")));
                }
            }
        }
        let min_star: Vec<f64> = v
            .iter()
            .map(|row| {
                let lowest = row.iter().filter_map(|e| e.finite()).fold(f64::INFINITY, f64::min);
                if lowest.is_finite() {
                    (-lowest).max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        let b_star = match b_star {
            None => min_star,
            Some(bs) => {
                if bs.len() != s {
                    return Err(Error::Structural("b_star length mismatch".into()));
                }
                for (x, (given, needed)) in bs.iter().zip(&min_star).enumerate() {
                    if *given < *needed - 1e-12 * needed.abs().max(1.0) {
                        return Err(Error::Input(format!("b_star[{x}] = {given} is below -min_y v = {needed}")));
                    }
                }
                bs
            }
        };
        let b_stability = match b_stability {
            None => vec![0.0; s],
            Some(b) if b.len() == s && b.iter().all(|x| *x >= 0.0) => b,
            Some(_) => return Err(Error::Input("stability constants must be non-negative, one per species".into())),
        };
        Ok(PairPotential { beta, v, b_stability, b_star })
    }

    /// All pairs hard core (every species excludes every other, itself included).
    pub fn all_hard_core(beta: f64, species: usize) -> Result<Self> {
        Self::new(beta, vec![vec![Energy::HardCore; species]; species], None, None)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn species_count(&self) -> usize {
        self.v.len()
    }

    pub fn energy(&self, i: usize, j: usize) -> Energy {
        self.v[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Energy>] {
        &self.v
    }

    pub fn b_stability(&self) -> &[f64] {
        &self.b_stability
    }

    pub fn b_star(&self) -> &[f64] {
        &self.b_star
    }

    pub fn with_stability(mut self, b: Vec<f64>) -> Result<Self> {
        if b.len() != self.v.len() || b.iter().any(|x| *x < 0.0) {
            return Err(Error::Input("stability constants must be non-negative, one per species".into()));
        }
        self.b_stability = b;
        Ok(self)
    }

    /// True when every species carries a hard core with itself, so that a
    /// species is occupied at most once.
    pub fn has_diagonal_hard_core(&self) -> bool {
        (0..self.v.len()).all(|x| self.v[x][x].is_hard_core())
    }

    pub fn is_non_negative(&self) -> bool {
        self.v.iter().flatten().all(|e| e.finite().is_none_or(|v| v >= 0.0))
    }
}

/// Dense symmetric edge-weight matrix over a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> FMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("edge-weight matrix must be square and non-empty".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Input(format!("edge weights not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(FMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn constant(n: usize, value: S) -> Self {
        FMatrix { n, data: vec![value; n * n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, S::zero())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FMatrix<T> {
        FMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }
}

impl FMatrix<f64> {
    /// The absolute-value companion `f̄ = 1 - exp(-β|V|)` expressed through
    /// `f` alone: `|f|` on the repulsive side, `f/(1+f)` on the attractive side.
    pub fn bar_from_f(&self) -> FMatrix<f64> {
        self.map(|f| if *f <= 0.0 { -f } else { f / (1.0 + f) })
    }
}

/// Mayer function `f = e^{-βV} - 1` and its companion `f̄ = 1 - e^{-β|V|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MayerMatrices {
    pub f: FMatrix<f64>,
    pub f_bar: FMatrix<f64>,
}

impl MayerMatrices {
    /// The Mayer function over an exact field. Hard-core entries map to exactly
    /// `-1`; finite entries go through their binary float value.
    pub fn f_in<S: Scalar>(&self) -> FMatrix<S> {
        self.f.map(|x| {
            if *x == -1.0 {
                -S::one()
            } else {
                S::from_f64_exact(*x).expect("Mayer function entries are finite")
            }
        })
    }
}

pub fn build_mayer(pot: &PairPotential) -> MayerMatrices {
    let s = pot.species_count();
    let beta = pot.beta();
    let mut f = Vec::with_capacity(s);
    let mut f_bar = Vec::with_capacity(s);
    for i in 0..s {
        let (mut fr, mut br) = (Vec::with_capacity(s), Vec::with_capacity(s));
        for j in 0..s {
            match pot.energy(i, j) {
                Energy::HardCore => {
                    fr.push(-1.0);
                    br.push(1.0);
                }
                Energy::Finite(v) => {
                    fr.push((-beta * v).exp_m1());
                    br.push(-(-beta * v.abs()).exp_m1());
                }
            }
        }
        f.push(fr);
        f_bar.push(br);
    }
    MayerMatrices {
        f: FMatrix::from_rows(f).expect("potential is symmetric"),
        f_bar: FMatrix::from_rows(f_bar).expect("potential is symmetric"),
    }
}

/// Default multiset size for the brute-force stability check.
pub const DEFAULT_STABILITY_CHECK: usize = 6;

/// Brute-force stability certificate over all multisets of size `2..=n_check`.
///
/// The margin of species `x` is the smallest value of `H_n + sum_i B(x_i)`
/// over multisets containing `x`; configurations with a hard-core pair have
/// infinite energy and never constrain the margin.
pub fn check_stability(pot: &PairPotential, n_check: usize) -> Result<BoundCertificate> {
    if n_check < 2 {
        return Err(Error::Domain("stability check needs n_check >= 2".into()));
    }
    let s = pot.species_count();
    let mut margins = vec![f64::INFINITY; s];
    let mut tuple = Vec::with_capacity(n_check);
    for n in 2..=n_check {
        for_each_multiset(s, n, &mut tuple, &mut |xs| {
            let mut energy = 0.0;
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    match pot.energy(xs[i], xs[j]) {
                        Energy::HardCore => return,
                        Energy::Finite(v) => energy += v,
                    }
                }
            }
            let margin = energy + xs.iter().map(|&x| pot.b_stability()[x]).sum::<f64>();
            for &x in xs {
                if margin < margins[x] {
                    margins[x] = margin;
                }
            }
        });
    }
    let cert = BoundCertificate::new(Condition::Stability, vec![], pot.b_stability().to_vec(), margins)
        .truncated(n_check)
        .with_note("checked by enumeration of all multisets up to the truncation size");
    Ok(cert)
}

fn for_each_multiset(s: usize, n: usize, buf: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    fn rec(s: usize, n: usize, start: usize, buf: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if buf.len() == n {
            visit(buf);
            return;
        }
        for x in start..s {
            buf.push(x);
            rec(s, n, x, buf, visit);
            buf.pop();
        }
    }
    buf.clear();
    rec(s, n, 0, buf, visit);
}

/// Discrete exclusion integral `x -> sum_y f̄[x][y] |z|(y) w_y`.
pub fn c_bar(mayer: &MayerMatrices, space: &SpeciesSpace, z_abs: &MeasureVec<f64>) -> Result<Vec<f64>> {
    let s = space.len();
    if mayer.f_bar.size() != s || z_abs.len() != s {
        return Err(Error::Structural("c_bar operands disagree on species count".into()));
    }
    if z_abs.values().iter().any(|z| *z < 0.0) {
        return Err(Error::Domain("c_bar needs a non-negative measure".into()));
    }
    Ok((0..s).map(|x| (0..s).map(|y| mayer.f_bar.get(x, y) * z_abs.get(y) * space.weight(y)).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(beta: f64, v: Energy) -> PairPotential {
        PairPotential::new(beta, vec![vec![v]], None, None).unwrap()
    }

    #[test]
    fn mayer_hard_core_and_ideal() {
        let m = build_mayer(&single(1.0, Energy::HardCore));
        assert_eq!(*m.f.get(0, 0), -1.0);
        assert_eq!(*m.f_bar.get(0, 0), 1.0);
        let m = build_mayer(&single(2.0, Energy::Finite(0.0)));
        assert_eq!(*m.f.get(0, 0), 0.0);
        assert_eq!(*m.f_bar.get(0, 0), 0.0);
    }

    #[test]
    fn mayer_log_two() {
        let beta = 1.7;
        let m = build_mayer(&single(beta, Energy::Finite(2f64.ln() / beta)));
        assert!((m.f.get(0, 0) + 0.5).abs() < 1e-15);
        assert!((m.f_bar.get(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn attractive_entries_and_bar_from_f() {
        let pot = PairPotential::new(
            1.0,
            vec![vec![Energy::Finite(-0.3), Energy::Finite(0.8)], vec![Energy::Finite(0.8), Energy::HardCore]],
            None,
            None,
        )
        .unwrap();
        assert_eq!(pot.b_star(), &[0.3, 0.0]);
        let m = build_mayer(&pot);
        let derived = m.f.bar_from_f();
        for i in 0..2 {
            for j in 0..2 {
                assert!((derived.get(i, j) - m.f_bar.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn b_star_below_minimum_rejected() {
        let err = PairPotential::new(1.0, vec![vec![Energy::Finite(-1.0)]], None, Some(vec![0.5]));
        assert!(matches!(err, Err(Error::Input(_))));
    }

    #[test]
    fn asymmetric_potential_rejected() {
        let v = vec![vec![Energy::Finite(0.0), Energy::Finite(1.0)], vec![Energy::Finite(2.0), Energy::Finite(0.0)]];
        assert!(PairPotential::new(1.0, v, None, None).is_err());
    }

    #[test]
    fn energy_json_literals() {
        let e: Vec<Energy> = serde_json::from_str(r#"[1.5, "inf", null, 2]"#).unwrap();
        assert_eq!(e, vec![Energy::Finite(1.5), Energy::HardCore, Energy::HardCore, Energy::Finite(2.0)]);
        assert!(serde_json::from_str::<Energy>(r#""-inf""#).is_err());
    }

    #[test]
    fn stability_non_negative_passes_with_zero_margin() {
        let pot = PairPotential::new(
            1.0,
            vec![vec![Energy::Finite(0.0), Energy::Finite(1.0)], vec![Energy::Finite(1.0), Energy::HardCore]],
            None,
            None,
        )
        .unwrap();
        let cert = check_stability(&pot, 4).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.margins[0], 0.0);
    }

    #[test]
    fn stability_constant_attraction() {
        let pot = single(1.0, Energy::Finite(-1.0));
        assert!(!check_stability(&pot, 3).unwrap().passed);
        // H_n = -n(n-1)/2 >= -n B  iff  B >= (n-1)/2
        let pot = pot.with_stability(vec![1.0]).unwrap();
        let cert = check_stability(&pot, 3).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.worst_margin(), 0.0);
        assert!(check_stability(&single(1.0, Energy::HardCore), 1).is_err());
    }

    #[test]
    fn c_bar_examples() {
        let space = SpeciesSpace::new(vec![1.0, 1.0]).unwrap();
        let mayer = MayerMatrices {
            f: FMatrix::zeros(2),
            f_bar: FMatrix::from_rows(vec![vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        };
        let z = MeasureVec::new(&space, vec![1.0, 2.0]).unwrap();
        assert_eq!(c_bar(&mayer, &space, &z).unwrap(), vec![2.0, 2.5]);
        let one = SpeciesSpace::new(vec![0.3]).unwrap();
        let m = build_mayer(&single(1.0, Energy::HardCore));
        let z = MeasureVec::new(&one, vec![1.0]).unwrap();
        assert_eq!(c_bar(&m, &one, &z).unwrap(), vec![0.3]);
        let ideal = build_mayer(&single(1.0, Energy::Finite(0.0)));
        assert_eq!(c_bar(&ideal, &one, &z).unwrap(), vec![0.0]);
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(SpeciesSpace::new(vec![]).is_err());
        assert!(SpeciesSpace::new(vec![1.0, 0.0]).is_err());
        assert!(SpeciesSpace::new(vec![f64::INFINITY]).is_err());
        let space = SpeciesSpace::new(vec![1.0]).unwrap();
        assert!(MeasureVec::<f64>::new(&space, vec![1.0, 2.0]).is_err());
    }

    fn arb_potential() -> impl Strategy<Value = PairPotential> {
        (1usize..4).prop_flat_map(|s| {
            (proptest::collection::vec(prop_oneof![Just(None), (-2.0f64..3.0).prop_map(Some)], s * s), 0.2f64..3.0)
                .prop_map(move |(raw, beta)| {
                    let mut v = vec![vec![Energy::HardCore; s]; s];
                    for i in 0..s {
                        for j in 0..=i {
                            let e = raw[i * s + j].map_or(Energy::HardCore, Energy::Finite);
                            v[i][j] = e;
                            v[j][i] = e;
                        }
                    }
                    PairPotential::new(beta, v, None, None).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn mayer_inverts_on_finite_entries(pot in arb_potential()) {
            let m = build_mayer(&pot);
            let s = pot.species_count();
            for i in 0..s {
                for j in 0..s {
                    let f = *m.f.get(i, j);
                    prop_assert!(f >= -1.0);
                    let fb = *m.f_bar.get(i, j);
                    prop_assert!((0.0..=1.0).contains(&fb));
                    match pot.energy(i, j) {
                        Energy::HardCore => prop_assert_eq!(f, -1.0),
                        Energy::Finite(v) => {
                            let back = -(f.ln_1p()) / pot.beta();
                            prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(1e-300) + 1e-15);
                            if v >= 0.0 { prop_assert!(fb >= f.abs() - 1e-15); }
                        }
                    }
                }
            }
        }

        #[test]
        fn c_bar_is_monotone(pot in arb_potential(), bump in 0.0f64..2.0, which in 0usize..3) {
            let s = pot.species_count();
            let space = SpeciesSpace::uniform(s, 0.7).unwrap();
            let m = build_mayer(&pot);
            let base: Vec<f64> = (0..s).map(|x| 0.1 * (x + 1) as f64).collect();
            let mut raised = base.clone();
            raised[which % s] += bump;
            let lo = c_bar(&m, &space, &MeasureVec::new(&space, base).unwrap()).unwrap();
            let hi = c_bar(&m, &space, &MeasureVec::new(&space, raised).unwrap()).unwrap();
            for (l, h) in lo.iter().zip(&hi) {
                prop_assert!(h >= l);
            }
        }

        #[test]
        fn non_negative_potentials_are_stable(pot in arb_potential()) {
            prop_assume!(pot.is_non_negative());
            prop_assert!(check_stability(&pot, 4).unwrap().passed);
        }
    }
}
