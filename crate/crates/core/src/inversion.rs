//! Density/activity maps, their convergence certificates, and exact
//! finite-system oracles.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::certificate::{BoundCertificate, Condition};
use crate::error::{Error, Result};
use crate::fps::{layout, multiplicity_factorial, FormalSeries, Limits, RootedFamily};
use crate::graphs::{build_a_family, build_d_family, build_d_series, build_phi_series};
use crate::report::ResidualReport;
use crate::scalar::{Analytic, Scalar};
use crate::species::{build_mayer, FMatrix, MeasureVec, PairPotential, SpeciesSpace};
use crate::tree::{compute_tn, TnFamily};

/// Which expansion computes the activity from a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaPath {
    Tree,
    Biconnected,
}

/// Grid used when no weights are supplied: constant `a = b = 0.05 k`.
pub const WEIGHT_GRID_STEP: f64 = 0.05;
pub const WEIGHT_GRID_POINTS: usize = 40;

/// Exact sum with a flag telling whether the particle number was capped.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue<S> {
    pub value: S,
    pub truncated: bool,
    pub n_max: usize,
}

/// A grand-canonical system at fixed truncation order, with lazily built
/// coefficient caches.
#[derive(Debug)]
pub struct GCState<S: Scalar> {
    space: SpeciesSpace,
    beta: f64,
    f: FMatrix<S>,
    f_bar: FMatrix<f64>,
    b_stability: Vec<f64>,
    b_star: Vec<f64>,
    trunc: usize,
    a: OnceLock<RootedFamily<S>>,
    d: OnceLock<RootedFamily<S>>,
    d_series: OnceLock<FormalSeries<S>>,
    phi: OnceLock<FormalSeries<S>>,
    t: OnceLock<TnFamily<S>>,
}

fn f_bar_of(f: f64) -> f64 {
    if f <= 0.0 {
        -f
    } else {
        f / (1.0 + f)
    }
}

macro_rules! lazy {
    ($self:ident, $cell:ident, $build:expr) => {{
        if let Some(v) = $self.$cell.get() {
            return Ok(v);
        }
        let built = $build?;
        Ok($self.$cell.get_or_init(|| built))
    }};
}

impl<S: Scalar> GCState<S> {
    /// State for a pair potential; the Mayer function is carried into `S`
    /// (hard cores exactly as `-1`).
    pub fn new(pot: &PairPotential, space: SpeciesSpace, trunc: usize) -> Result<Self> {
        if pot.species_count() != space.len() {
            return Err(Error::Structural("potential and species space disagree on species count".into()));
        }
        let m = build_mayer(pot);
        Self::build(
            space,
            pot.beta(),
            m.f_in::<S>(),
            m.f_bar,
            pot.b_stability().to_vec(),
            pot.b_star().to_vec(),
            trunc,
            &Limits::desk(),
        )
    }

    /// State given directly by a Mayer matrix (at `beta = 1`). `f̄` and `B*`
    /// are derived from `f`; the stability constants are zero.
    pub fn from_f(f: FMatrix<S>, space: SpeciesSpace, trunc: usize) -> Result<Self> {
        Self::from_f_with_limits(f, space, trunc, &Limits::desk())
    }

    /// As [`Self::from_f`] with an explicit size guard.
    pub fn from_f_with_limits(f: FMatrix<S>, space: SpeciesSpace, trunc: usize, limits: &Limits) -> Result<Self> {
        if f.size() != space.len() {
            return Err(Error::Structural("Mayer matrix and species space disagree on species count".into()));
        }
        let ff = f.map(|v| v.real_f64());
        let f_bar = ff.map(|v| f_bar_of(*v));
        let b_star = (0..f.size())
            .map(|x| (0..f.size()).map(|y| f64::ln_1p(ff.get(x, y).max(0.0))).fold(0.0, f64::max))
            .collect();
        Self::build(space, 1.0, f, f_bar, vec![0.0; ff.size()], b_star, trunc, limits)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        space: SpeciesSpace,
        beta: f64,
        f: FMatrix<S>,
        f_bar: FMatrix<f64>,
        b_stability: Vec<f64>,
        b_star: Vec<f64>,
        trunc: usize,
        limits: &Limits,
    ) -> Result<Self> {
        if trunc == 0 {
            return Err(Error::Input("truncation order must be at least 1".into()));
        }
        limits.check(space.len(), trunc)?;
        Ok(GCState {
            space,
            beta,
            f,
            f_bar,
            b_stability,
            b_star,
            trunc,
            a: OnceLock::new(),
            d: OnceLock::new(),
            d_series: OnceLock::new(),
            phi: OnceLock::new(),
            t: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &SpeciesSpace {
        &self.space
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn species(&self) -> usize {
        self.space.len()
    }

    pub fn f(&self) -> &FMatrix<S> {
        &self.f
    }

    pub fn f_bar(&self) -> &FMatrix<f64> {
        &self.f_bar
    }

    pub fn a_family(&self) -> Result<&RootedFamily<S>> {
        lazy!(self, a, build_a_family(&self.f, self.trunc))
    }

    /// `D_{n+1}(q, x)` at order `n`.
    pub fn d_family(&self) -> Result<&RootedFamily<S>> {
        lazy!(self, d, build_d_family(&self.f, self.trunc))
    }

    /// `D_n` at order `n`.
    pub fn d_series(&self) -> Result<&FormalSeries<S>> {
        lazy!(self, d_series, build_d_series(&self.f, self.trunc))
    }

    pub fn phi_series(&self) -> Result<&FormalSeries<S>> {
        lazy!(self, phi, build_phi_series(&self.f, self.trunc))
    }

    pub fn t_family(&self) -> Result<&TnFamily<S>> {
        lazy!(self, t, self.a_family().and_then(|a| compute_tn(a, self.trunc)))
    }

    /// Masses `value(x) w_x` of a measure.
    pub fn masses(&self, m: &MeasureVec<S>) -> Result<Vec<S>> {
        if m.len() != self.species() {
            return Err(Error::Structural("measure length differs from species count".into()));
        }
        Ok(m.masses(&self.space))
    }

    fn abs_masses(&self, m: &MeasureVec<S>) -> Vec<f64> {
        m.values().iter().zip(self.space.weights()).map(|(v, w)| v.magnitude() * w).collect()
    }

    fn check_weights(&self, name: &str, w: &[f64]) -> Result<()> {
        if w.len() != self.species() {
            return Err(Error::Structural(format!("{name} must have one entry per species")));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain(format!("{name} must be finite and non-negative")));
        }
        Ok(())
    }

    fn exclusion_margins(&self, abs_masses: &[f64], a: &[f64], exponent: impl Fn(usize) -> f64) -> Vec<f64> {
        let s = self.species();
        (0..s)
            .map(|x| a[x] - (0..s).map(|y| self.f_bar.get(x, y) * exponent(y).exp() * abs_masses[y]).sum::<f64>())
            .collect()
    }

    /// Activity condition: `a(x) - sum_y f̄(x,y) e^{a(y) + βB(y)} |z|(y) w_y`.
    pub fn check_pu(&self, z: &MeasureVec<S>, a: &[f64]) -> Result<BoundCertificate> {
        self.check_weights("a", a)?;
        let m = self.abs_masses(z);
        let margins = self.exclusion_margins(&m, a, |y| a[y] + self.beta * self.b_stability[y]);
        Ok(BoundCertificate::new(Condition::Pu, a.to_vec(), Vec::new(), margins))
    }

    /// Density condition with weights `a <= b`.
    pub fn check_sab(&self, nu: &MeasureVec<S>, a: &[f64], b: &[f64]) -> Result<BoundCertificate> {
        self.check_weights("a", a)?;
        self.check_weights("b", b)?;
        if a.iter().zip(b).any(|(x, y)| x > y) {
            return Err(Error::Domain("weights must satisfy a <= b".into()));
        }
        let m = self.abs_masses(nu);
        let beta = self.beta;
        let margins = self.exclusion_margins(&m, a, |y| a[y] + b[y] + beta * (self.b_stability[y] + self.b_star[y]));
        Ok(BoundCertificate::new(Condition::Sab, a.to_vec(), b.to_vec(), margins))
    }

    /// `b(q) - sum_{n<=N} (1/n!) sum |A_n(q; x)| e^{sum b(x_j)} |nu|^n`.
    pub fn check_sb(&self, nu: &MeasureVec<S>, b: &[f64]) -> Result<BoundCertificate> {
        self.check_weights("b", b)?;
        let m: Vec<f64> = self.abs_masses(nu).iter().zip(b).map(|(v, bx)| v * bx.exp()).collect();
        let a = self.a_family()?;
        let margins = a
            .roots()
            .iter()
            .zip(b)
            .map(|(r, bq)| Ok(bq - r.map(|v| v.magnitude()).eval(&m)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(BoundCertificate::new(Condition::Sb, Vec::new(), b.to_vec(), margins)
            .truncated(self.trunc)
            .with_note("partial sums only; the tail beyond the truncation order is not bounded"))
    }

    /// Truncated biconnected sums `sum_{n<=N} (1/n!) sum |D_{n+1}(q, x)| |nu|^n` per root.
    pub fn virmb_sums(&self, nu: &MeasureVec<S>) -> Result<Vec<f64>> {
        let m = self.abs_masses(nu);
        self.d_family()?.roots().iter().map(|r| r.map(|v| v.magnitude()).eval(&m)).collect()
    }

    pub fn check_virmb(&self, nu: &MeasureVec<S>, b: &[f64]) -> Result<BoundCertificate> {
        self.check_weights("b", b)?;
        let sums = self.virmb_sums(nu)?;
        let margins = b.iter().zip(&sums).map(|(bq, s)| bq - s).collect();
        Ok(BoundCertificate::new(Condition::VirMb, Vec::new(), b.to_vec(), margins).truncated(self.trunc))
    }

    /// Conditions under which the pressure has its density form: the
    /// activity condition with `a`, and the density condition for
    /// `e^{a + βB} |z|` with the same `a <= b`. The integrability part is
    /// automatic on a finite species space.
    pub fn check_dissym_b(&self, z: &MeasureVec<f64>, a: &[f64], b: &[f64]) -> Result<BoundCertificate>
    where
        S: Scalar,
    {
        self.check_weights("a", a)?;
        self.check_weights("b", b)?;
        if a.iter().zip(b).any(|(x, y)| x > y) {
            return Err(Error::Domain("weights must satisfy a <= b".into()));
        }
        let zm: Vec<f64> = z.values().iter().zip(self.space.weights()).map(|(v, w)| v.abs() * w).collect();
        let pu = self.exclusion_margins(&zm, a, |y| a[y] + self.beta * self.b_stability[y]);
        let lifted: Vec<f64> =
            zm.iter().enumerate().map(|(y, m)| m * (a[y] + self.beta * self.b_stability[y]).exp()).collect();
        let sab =
            self.exclusion_margins(&lifted, a, |y| a[y] + b[y] + self.beta * (self.b_stability[y] + self.b_star[y]));
        let margins = pu.iter().zip(&sab).map(|(p, s)| p.min(*s)).collect();
        Ok(BoundCertificate::new(Condition::DissymB, a.to_vec(), b.to_vec(), margins)
            .with_note("integrability of (1+b) e^{a+βB}|z| holds trivially on a finite species space"))
    }

    /// Smallest constant `a = b = 0.05 k` for which the density condition holds.
    pub fn search_constant_weights(&self, nu: &MeasureVec<S>) -> Result<Option<BoundCertificate>> {
        for k in 1..=WEIGHT_GRID_POINTS {
            let w = vec![WEIGHT_GRID_STEP * k as f64; self.species()];
            let cert = self.check_sab(nu, &w, &w)?;
            if cert.passed {
                return Ok(Some(cert.with_note(format!("constant weights a = b = {:.2} from grid search", w[0]))));
            }
        }
        Ok(None)
    }

    /// Formal family `exp(-A_q)`: `rho(q) = z(q) exp(-A_q(z))`.
    pub fn rho_factor(&self) -> Result<RootedFamily<S>> {
        self.a_family()?.try_map(|r| r.neg().exp_series())
    }

    /// Formal family `zeta(q) = nu(q) G_q(nu)` along the chosen path.
    pub fn zeta_factor(&self, path: ZetaPath) -> Result<RootedFamily<S>> {
        match path {
            ZetaPath::Tree => Ok(self.t_family()?.clone()),
            ZetaPath::Biconnected => self.d_family()?.try_map(|r| r.neg().exp_series()),
        }
    }

    /// Residuals of `zeta o rho = id` and `rho o zeta = id` as series in the input.
    pub fn roundtrip_check(&self, path: ZetaPath, tol: f64) -> Result<(ResidualReport, ResidualReport)> {
        let e = self.rho_factor()?;
        let g = self.zeta_factor(path)?;
        let one = FormalSeries::unit(self.species(), self.trunc)?;
        let zr = RootedFamily::new(
            (0..self.species())
                .map(|q| e.root(q).mul(&g.root(q).compose_measure(&e)?)?.sub(&one))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let rz = RootedFamily::new(
            (0..self.species())
                .map(|q| g.root(q).mul(&e.root(q).compose_measure(&g)?)?.sub(&one))
                .collect::<Result<Vec<_>>>()?,
        )?;
        Ok((
            ResidualReport::of_family("zeta o rho = id", &zr, tol),
            ResidualReport::of_family("rho o zeta = id", &rz, tol),
        ))
    }

    /// Residual between the tree and biconnected forms of the activity map.
    pub fn zeta_paths_check(&self, tol: f64) -> Result<ResidualReport> {
        let t = self.zeta_factor(ZetaPath::Tree)?;
        let d = self.zeta_factor(ZetaPath::Biconnected)?;
        let diff =
            RootedFamily::new((0..self.species()).map(|q| t.root(q).sub(d.root(q))).collect::<Result<Vec<_>>>()?)?;
        Ok(ResidualReport::of_family("tree path = biconnected path", &diff, tol))
    }

    /// Residual of `d(log Xi)/dz(q) = exp(-A_q)`.
    pub fn density_series_check(&self, tol: f64) -> Result<ResidualReport> {
        let phi = self.phi_series()?;
        let e = self.rho_factor()?;
        let parts = (0..self.species())
            .map(|q| {
                let lhs = phi.var_derivative(q)?;
                let rhs = e.root(q).truncate(self.trunc - 1);
                Ok(ResidualReport::of_series("", &lhs.sub(&rhs)?, tol))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ResidualReport::combine("d log Xi / dz = rho / z", &parts))
    }

    /// Residual of `log Xi(zeta[nu]) = sum nu - sum (n-1)/n! D_n nu^n` as series in `nu`.
    pub fn pressure_identity_check(&self, tol: f64) -> Result<ResidualReport> {
        let zf = self.zeta_factor(ZetaPath::Biconnected)?;
        let lhs = self.phi_series()?.compose_measure(&zf)?;
        let d = self.d_series()?;
        let rhs = FormalSeries::from_fn(self.species(), self.trunc, |n, x| match n {
            0 => S::zero(),
            1 => S::one(),
            _ => -(S::from_int(n as i64 - 1) * d.coeff(n).get_sorted(x).clone()),
        })?;
        Ok(ResidualReport::of_series("log Xi(zeta[nu]) = pressure(nu)", &lhs.sub(&rhs)?, tol))
    }

    /// Residual of `phi_n = n phi_n - sum (m-1) D_m o (phi_{.+1})` through the truncation order.
    pub fn dissymmetry_check(&self, tol: f64) -> Result<ResidualReport> {
        let n_max = self.trunc;
        let phi = self.phi_series()?;
        let d = self.d_series()?;
        let s = self.species();
        let k = FormalSeries::from_fn(s, n_max, |m, x| {
            if m < 2 {
                S::zero()
            } else {
                S::from_int(m as i64 - 1) * d.coeff(m).get_sorted(x).clone()
            }
        })?;
        // G_k(q; y) = phi_{k+1}(q, y); the top order is never read.
        let g = RootedFamily::new(
            (0..s)
                .map(|q| {
                    let dq = phi.var_derivative(q)?;
                    FormalSeries::from_fn(s, n_max, |n, x| {
                        if n < n_max {
                            dq.coeff(n).get_sorted(x).clone()
                        } else {
                            S::zero()
                        }
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        let n_phi = FormalSeries::from_fn(s, n_max, |n, x| S::from_int(n as i64) * phi.coeff(n).get_sorted(x).clone())?;
        let residual = phi.sub(&n_phi)?.add(&k.compose_measure(&g)?)?;
        Ok(ResidualReport::of_series("dissymmetry", &residual, tol))
    }

    /// `log Xi` from the Ursell series, truncated.
    pub fn log_xi_series(&self, z: &MeasureVec<S>) -> Result<S> {
        self.phi_series()?.eval(&self.masses(z)?)
    }

    /// Per-order contributions to [`Self::log_xi_series`].
    pub fn log_xi_terms(&self, z: &MeasureVec<S>) -> Result<Vec<S>> {
        self.phi_series()?.eval_terms(&self.masses(z)?)
    }

    /// `sum_x nu(x) w_x - sum_{2<=n<=N} ((n-1)/n!) sum D_n nu^n`.
    pub fn pressure_of_nu(&self, nu: &MeasureVec<S>) -> Result<S> {
        let m = self.masses(nu)?;
        let terms = self.d_series()?.eval_terms(&m)?;
        let mut p = m.iter().fold(S::zero(), |acc, v| acc + v.clone());
        for (n, t) in terms.into_iter().enumerate().skip(2) {
            p = p - S::from_int(n as i64 - 1) * t;
        }
        Ok(p)
    }

    fn boltzmann(&self, xs: &[usize]) -> S {
        let mut w = S::one();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                w = w * (S::one() + self.f.get(xs[i], xs[j]).clone());
                if w.is_zero() {
                    return w;
                }
            }
        }
        w
    }

    /// Every species excludes a second copy of itself.
    pub fn has_diagonal_hard_core(&self) -> bool {
        (0..self.species()).all(|x| *self.f.get(x, x) == -S::one())
    }

    fn particle_cap(&self, n_max: Option<usize>) -> Result<(usize, bool)> {
        match (self.has_diagonal_hard_core(), n_max) {
            (true, None) => Ok((self.species(), false)),
            (true, Some(n)) => Ok((n.min(self.species()), n < self.species())),
            (false, Some(n)) => Ok((n, true)),
            (false, None) => Err(Error::Domain(
                "partition function does not terminate without a diagonal hard core; supply n_max".into(),
            )),
        }
    }

    /// `sum over configurations of weight(config) prod m / prod mult!` for
    /// multisets up to `cap` particles.
    fn configuration_sum(&self, m: &[S], cap: usize, extra: impl Fn(&[usize]) -> S) -> S {
        let s = self.species();
        let diag = self.has_diagonal_hard_core();
        let mut total = extra(&[]);
        for n in 1..=cap {
            let l = layout(s, n);
            for x in l.tuples() {
                if diag && x.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let xs: Vec<usize> = x.iter().map(|&i| i as usize).collect();
                let e = extra(&xs);
                if e.is_zero() {
                    continue;
                }
                let w = self.boltzmann(&xs);
                if w.is_zero() {
                    continue;
                }
                let mut term = e * w;
                for &i in &xs {
                    term = term * m[i].clone();
                }
                let mf = multiplicity_factorial(x);
                if mf != 1 {
                    term = term * S::from_ratio(1, mf as i64);
                }
                total = total + term;
            }
        }
        total
    }

    /// Grand-canonical partition function by direct summation.
    pub fn xi_exact(&self, z: &MeasureVec<S>, n_max: Option<usize>) -> Result<ExactValue<S>> {
        let (cap, truncated) = self.particle_cap(n_max)?;
        let m = self.masses(z)?;
        let value = self.configuration_sum(&m, cap, |_| S::one());
        Ok(ExactValue { value, truncated, n_max: cap })
    }

    /// One-particle density at `q` (per unit quadrature weight) by direct summation.
    pub fn density_exact(&self, z: &MeasureVec<S>, q: usize, n_max: Option<usize>) -> Result<ExactValue<S>> {
        if q >= self.species() {
            return Err(Error::Structural(format!("species {q} out of range")));
        }
        let (cap, truncated) = self.particle_cap(n_max)?;
        let m = self.masses(z)?;
        let xi = self.configuration_sum(&m, cap, |_| S::one());
        let test_cap = if self.has_diagonal_hard_core() { cap.saturating_sub(1) } else { cap };
        let xi_q = self.configuration_sum(&m, test_cap, |xs| {
            xs.iter().fold(S::one(), |acc, &x| acc * (S::one() + self.f.get(q, x).clone()))
        });
        let value = z.get(q).clone() * xi_q / xi;
        Ok(ExactValue { value, truncated, n_max: cap })
    }
}

impl<S: Analytic> GCState<S> {
    /// `A(q; z)` truncated at the state's order.
    pub fn a_value(&self, z: &MeasureVec<S>, q: usize) -> Result<S> {
        self.a_family()?.root(q).eval(&self.masses(z)?)
    }

    /// `rho(q) = z(q) exp(-A(q; z))`.
    pub fn rho_of_z(&self, z: &MeasureVec<S>) -> Result<MeasureVec<S>> {
        let m = self.masses(z)?;
        let a = self.a_family()?;
        let vals = (0..self.species())
            .map(|q| Ok(z.get(q).clone() * (-a.root(q).eval(&m)?).exp()))
            .collect::<Result<Vec<_>>>()?;
        MeasureVec::new(&self.space, vals)
    }

    /// Activity for a prescribed density, along either expansion.
    pub fn zeta_of_nu(&self, nu: &MeasureVec<S>, path: ZetaPath) -> Result<MeasureVec<S>> {
        let m = self.masses(nu)?;
        let vals = match path {
            ZetaPath::Tree => {
                let t = self.t_family()?;
                (0..self.species()).map(|q| Ok(nu.get(q).clone() * t.root(q).eval(&m)?)).collect::<Result<Vec<_>>>()?
            }
            ZetaPath::Biconnected => {
                let d = self.d_family()?;
                (0..self.species())
                    .map(|q| Ok(nu.get(q).clone() * (-d.root(q).eval(&m)?).exp()))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        MeasureVec::new(&self.space, vals)
    }
}

impl GCState<f64> {
    /// `βF = sum nu [log(nu/m) - 1] w - sum_{2<=n<=N} (1/n!) sum D_n nu^n`, with `0 log 0 = 0`.
    pub fn free_energy(&self, nu: &MeasureVec<f64>, m_ref: &MeasureVec<f64>) -> Result<f64> {
        let mut entropy = 0.0;
        for x in 0..self.species() {
            let (v, mr, w) = (*nu.get(x), *m_ref.get(x), self.space.weight(x));
            if v < 0.0 || mr < 0.0 {
                return Err(Error::Domain("free energy needs non-negative measures".into()));
            }
            if v == 0.0 {
                continue;
            }
            if mr == 0.0 {
                return Err(Error::Domain(format!("density charges species {x} where the reference measure vanishes")));
            }
            entropy += v * ((v / mr).ln() - 1.0) * w;
        }
        let terms = self.d_series()?.eval_terms(&self.masses(nu)?)?;
        Ok(entropy - terms.iter().skip(2).sum::<f64>())
    }

    /// `F(nu) + log Xi(zeta[nu]) - sum nu log(zeta[nu]/m) w`, which vanishes up to truncation.
    pub fn legendre_residual(&self, nu: &MeasureVec<f64>, m_ref: &MeasureVec<f64>) -> Result<f64> {
        let zeta = self.zeta_of_nu(nu, ZetaPath::Biconnected)?;
        let f = self.free_energy(nu, m_ref)?;
        let log_xi = self.log_xi_series(&zeta)?;
        let mut cross = 0.0;
        for x in 0..self.species() {
            let v = *nu.get(x);
            if v != 0.0 {
                cross += v * (zeta.get(x) / m_ref.get(x)).ln() * self.space.weight(x);
            }
        }
        Ok(f + log_xi - cross)
    }
}
