//! Exact integration over `G(H)` for the Gaussian test ring `p · exp(-a ρ)`.
//!
//! With `ρ = Σ` of all `d = 4n+3` squared coordinates,
//!
//! ```text
//! ∫ x^α exp(-bρ) = (π/b)^{d/2} · Π_i (α_i - 1)!! / (2b)^{α_i/2}     (all α_i even)
//! ```
//!
//! so every integral is a rational multiple of `(π/b)^{d/2}`; only the rational
//! coefficient is tracked. Lebesgue measure stands in for `Vol_η`: the two differ
//! by a constant factor and every identity checked here is homogeneous in it.
//! Functions in the ring decay fast enough for the divergence formula to hold.

use crate::decomp::hessian_sp_decompose;
use crate::error::{QcError, Result};
use crate::heisenberg::{rotate_horizontal, GroupModel, PolyVectorField};
use crate::matrix::Mat;
use crate::poly::{FloatPoly, Monomial, Poly};
use crate::quat::{BilinearForm, HypercomplexTriple};
use crate::random::rng_for;
use crate::scalar::{rat, rat_to_f64, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

/// `p · exp(-rate · ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussFn {
    pub p: Poly,
    pub rate: Rational,
}

impl GaussFn {
    pub fn new(p: Poly, rate: Rational) -> Result<Self> {
        if !rate.is_positive() {
            return Err(QcError::NonPositiveRate(rate.to_string()));
        }
        Ok(GaussFn { p, rate })
    }

    fn same_rate(&self, o: &GaussFn) -> Result<()> {
        if self.rate != o.rate {
            return Err(QcError::RateMismatch(self.rate.to_string(), o.rate.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, o: &GaussFn) -> Result<GaussFn> {
        self.same_rate(o)?;
        Ok(GaussFn { p: &self.p + &o.p, rate: self.rate.clone() })
    }

    pub fn sub(&self, o: &GaussFn) -> Result<GaussFn> {
        self.same_rate(o)?;
        Ok(GaussFn { p: &self.p - &o.p, rate: self.rate.clone() })
    }

    /// Product; rates add.
    pub fn mul(&self, o: &GaussFn) -> GaussFn {
        GaussFn { p: &self.p * &o.p, rate: &self.rate + &o.rate }
    }

    pub fn scale(&self, r: &Rational) -> GaussFn {
        GaussFn { p: self.p.scale(r), rate: self.rate.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// `V(p e^{-aρ}) = (V p - a p V ρ) e^{-aρ}`.
    pub fn apply_field(&self, v: &PolyVectorField, rho: &Poly) -> GaussFn {
        let vp = v.apply(&self.p);
        let vr = v.apply(rho);
        GaussFn { p: &vp - &(&self.p * &vr).scale(&self.rate), rate: self.rate.clone() }
    }
}

/// `coeff · (π/rate)^{dim/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactIntegral {
    pub coeff: Rational,
    pub rate: Rational,
    pub dim: usize,
}

impl ExactIntegral {
    pub fn zero(rate: Rational, dim: usize) -> Self {
        ExactIntegral { coeff: Rational::zero(), rate, dim }
    }

    fn compatible(&self, o: &ExactIntegral) -> Result<()> {
        if self.rate != o.rate || self.dim != o.dim {
            return Err(QcError::RateMismatch(self.rate.to_string(), o.rate.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, o: &ExactIntegral) -> Result<ExactIntegral> {
        self.compatible(o)?;
        Ok(ExactIntegral { coeff: &self.coeff + &o.coeff, ..self.clone() })
    }

    pub fn sub(&self, o: &ExactIntegral) -> Result<ExactIntegral> {
        self.compatible(o)?;
        Ok(ExactIntegral { coeff: &self.coeff - &o.coeff, ..self.clone() })
    }

    pub fn scale(&self, r: &Rational) -> ExactIntegral {
        ExactIntegral { coeff: &self.coeff * r, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The common transcendental factor `(π/rate)^{dim/2}`.
    pub fn factor_f64(&self) -> f64 {
        (std::f64::consts::PI / rat_to_f64(&self.rate)).powf(self.dim as f64 / 2.0)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * self.factor_f64()
    }
}

fn double_factorial_odd(k: u32) -> BigInt {
    // (k-1)!! for even k
    let mut acc = BigInt::one();
    let mut j = k as i64 - 1;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// `∫ x^α exp(-bρ)` over `R^dim`.
pub fn gaussian_moment(mono: &Monomial, b: &Rational, dim: usize) -> Result<ExactIntegral> {
    if !b.is_positive() {
        return Err(QcError::NonPositiveRate(b.to_string()));
    }
    Ok(ExactIntegral { coeff: moment_coeff(mono, b), rate: b.clone(), dim })
}

fn moment_coeff(mono: &Monomial, b: &Rational) -> Rational {
    let two_b = b * rat(2, 1);
    let mut c = Rational::one();
    for &(_, e) in mono.pairs() {
        if e % 2 == 1 {
            return Rational::zero();
        }
        let num = Rational::from_integer(double_factorial_odd(e as u32));
        c *= num / num_traits::pow(two_b.clone(), (e / 2) as usize);
    }
    c
}

/// `∫ q` over `G(H)` for `q = p · exp(-bρ)`.
pub fn integrate_exact(m: &GroupModel, q: &GaussFn) -> Result<ExactIntegral> {
    if q.p.var_bound() > m.coord_count() {
        return Err(QcError::Mismatch { expected: m.coord_count(), got: q.p.var_bound() });
    }
    if !q.rate.is_positive() {
        return Err(QcError::NonPositiveRate(q.rate.to_string()));
    }
    let coeff = q.p.terms().fold(Rational::zero(), |acc, (mono, c)| acc + c * moment_coeff(mono, &q.rate));
    Ok(ExactIntegral { coeff, rate: q.rate.clone(), dim: m.coord_count() })
}

/// Dense exponents and the odd-exponent parity mask of every term.
struct PairTerms {
    terms: Vec<(Vec<u16>, u64, BigInt)>,
    den: BigInt,
}

fn pair_terms(p: &Poly, dim: usize) -> PairTerms {
    let den = p.terms().fold(BigInt::one(), |acc, (_, c)| num_integer::Integer::lcm(&acc, c.denom()));
    let terms = p
        .terms()
        .map(|(mono, c)| {
            let mut exps = vec![0u16; dim];
            let mut mask = 0u64;
            for &(v, e) in mono.pairs() {
                exps[v as usize] = e;
                if e % 2 == 1 {
                    mask |= 1 << v;
                }
            }
            (exps, mask, c.numer() * (&den / c.denom()))
        })
        .collect();
    PairTerms { terms, den }
}

/// `∫ f·g` without expanding the product: only term pairs with matching
/// parity survive, and `∫ x^α e^{-bρ} = Π(α_i-1)!! / (2b)^{|α|/2}` up to the
/// common factor, so numerators are accumulated per half-degree.
pub fn integrate_product(m: &GroupModel, f: &GaussFn, g: &GaussFn) -> Result<ExactIntegral> {
    let dim = m.coord_count();
    let bound = f.p.var_bound().max(g.p.var_bound());
    if bound > dim {
        return Err(QcError::Mismatch { expected: dim, got: bound });
    }
    let rate = &f.rate + &g.rate;
    if dim > 64 {
        return integrate_exact(m, &f.mul(g));
    }
    let a = pair_terms(&f.p, dim);
    let b = pair_terms(&g.p, dim);
    let mut by_mask: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    for (j, t) in b.terms.iter().enumerate() {
        by_mask.entry(t.1).or_default().push(j);
    }
    let mut by_half: Vec<BigInt> = Vec::new();
    for (ea, mask, ca) in &a.terms {
        let Some(partners) = by_mask.get(mask) else { continue };
        for &j in partners {
            let (eb, _, cb) = &b.terms[j];
            let mut df = BigInt::one();
            let mut deg = 0usize;
            for (x, y) in ea.iter().zip(eb) {
                let e = (x + y) as u32;
                deg += e as usize;
                if e > 2 {
                    df *= double_factorial_odd(e);
                }
            }
            let k = deg / 2;
            if by_half.len() <= k {
                by_half.resize(k + 1, BigInt::zero());
            }
            by_half[k] += ca * cb * df;
        }
    }
    let two_b = &rate * rat(2, 1);
    let mut coeff = Rational::zero();
    let mut pow = Rational::one();
    for acc in by_half {
        if !acc.is_zero() {
            coeff += Rational::from_integer(acc) / &pow;
        }
        pow *= &two_b;
    }
    coeff /= Rational::from_integer(&a.den * &b.den);
    Ok(ExactIntegral { coeff, rate, dim })
}

/// Two sides of an exact integral identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: ExactIntegral,
    pub rhs: ExactIntegral,
}

impl IdentityCheck {
    pub fn residual(&self) -> ExactIntegral {
        ExactIntegral { coeff: &self.lhs.coeff - &self.rhs.coeff, ..self.lhs.clone() }
    }

    pub fn holds(&self) -> bool {
        self.lhs.rate == self.rhs.rate && self.lhs.coeff == self.rhs.coeff
    }
}

/// Frame derivatives of one Gaussian-ring function, all with its rate.
pub struct GaussDerivatives {
    pub f: GaussFn,
    /// `e_a f`
    pub grad: Vec<GaussFn>,
    /// `e_a(e_b f)`
    pub hess: Vec<Vec<GaussFn>>,
    /// `ξ_s f`
    pub xi: [GaussFn; 3],
    /// `ξ_s(e_a f)`, indexed `[s-1][a]`
    pub xi_grad: [Vec<GaussFn>; 3],
}

pub fn derivatives(m: &GroupModel, f: &GaussFn) -> GaussDerivatives {
    let rho = m.rho();
    let grad: Vec<GaussFn> = m.frame().iter().map(|e| f.apply_field(e, &rho)).collect();
    let hess = m
        .frame()
        .iter()
        .map(|ea| grad.iter().map(|gb| gb.apply_field(ea, &rho)).collect())
        .collect();
    let xi = [1, 2, 3].map(|s| f.apply_field(m.reeb(s), &rho));
    let xi_grad = [1, 2, 3].map(|s| grad.iter().map(|g| g.apply_field(m.reeb(s), &rho)).collect());
    GaussDerivatives { f: f.clone(), grad, hess, xi, xi_grad }
}

fn sum_all(rate: &Rational, items: impl IntoIterator<Item = GaussFn>) -> GaussFn {
    let mut acc = GaussFn { p: Poly::zero(), rate: rate.clone() };
    for it in items {
        debug_assert_eq!(&it.rate, rate);
        acc.p = &acc.p + &it.p;
    }
    acc
}

/// Products used by the integral identities, all at rate `2a`.
pub struct QuadraticIntegrands {
    /// `Σ_s ∇²f(ξ_s, I_s∇f)`
    pub vertical_hess: GaussFn,
    /// `Σ_s (ξ_s f)²`
    pub xi_sq: GaussFn,
    /// `|∇²f|²`
    pub hess_sq: GaussFn,
    /// `(Δf)²`
    pub lap_sq: GaussFn,
    /// `|(∇²f)_[3]|²`
    pub hess3_sq: GaussFn,
    /// `|(∇²f)_[-1]|²`
    pub hessm1_sq: GaussFn,
    /// `Σ_s (Σ_a ∇²f(e_a, I_s e_a))²`
    pub omega_trace_sq: GaussFn,
    /// `Σ_s T(ξ_s, I_s∇f, ∇f)`
    pub torsion: GaussFn,
    /// `Σ_s τ_s(I_s∇f, ∇f)`
    pub tau: GaussFn,
}

fn form_on_gauss(form: &BilinearForm, x: &[GaussFn], y: &[GaussFn], rate: &Rational) -> GaussFn {
    let mut acc = GaussFn { p: Poly::zero(), rate: rate.clone() };
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            let c = form.at(a, b);
            if !c.is_zero() {
                acc.p = &acc.p + &xa.mul(yb).p.scale(c);
            }
        }
    }
    acc
}

fn rotate_gauss(t: &HypercomplexTriple, s: usize, v: &[GaussFn]) -> Vec<GaussFn> {
    let rate = v[0].rate.clone();
    let polys: Vec<Poly> = v.iter().map(|g| g.p.clone()).collect();
    rotate_horizontal(t, s, &polys).into_iter().map(|p| GaussFn { p, rate: rate.clone() }).collect()
}

pub fn quadratic_integrands(m: &GroupModel, d: &GaussDerivatives) -> Result<QuadraticIntegrands> {
    let n = m.n();
    let h = 4 * n;
    let rate2 = &d.f.rate * rat(2, 1);
    let t = m.triple();

    let mut vertical = Vec::new();
    for s in 1..=3 {
        let rotated = rotate_gauss(t, s, &d.grad);
        vertical.extend(rotated.iter().zip(&d.xi_grad[s - 1]).map(|(r, x)| r.mul(x)));
    }
    let vertical_hess = sum_all(&rate2, vertical);
    let xi_sq = sum_all(&rate2, d.xi.iter().map(|x| x.mul(x)));

    let hess_poly = Mat::from_fn(h, |a, b| d.hess[a][b].p.clone());
    let hess_sq = GaussFn { p: hess_poly.norm_sq(), rate: rate2.clone() };
    let lap = GaussFn { p: -&hess_poly.trace(), rate: d.f.rate.clone() };
    let lap_sq = lap.mul(&lap);

    let poly_triple = t.map(|r| Poly::constant(r.clone()));
    let hform = BilinearForm::new(n, hess_poly.clone())?;
    let split = hessian_sp_decompose(&poly_triple, &hform)?;
    let hess3_sq = GaussFn { p: split.part3.norm_sq(), rate: rate2.clone() };
    let hessm1_sq = GaussFn { p: split.partm1.norm_sq(), rate: rate2.clone() };

    let omega_trace_sq = sum_all(
        &rate2,
        (1..=3).map(|s| {
            let w = t.omega_matrix(s).map(|r| Poly::constant(r.clone()));
            let tr = hess_poly.frobenius(&w);
            GaussFn { p: &tr * &tr, rate: rate2.clone() }
        }),
    );

    let st = m.structure();
    let mut torsion = GaussFn { p: Poly::zero(), rate: rate2.clone() };
    let mut tau = GaussFn { p: Poly::zero(), rate: rate2.clone() };
    for s in 1..=3 {
        let rotated = rotate_gauss(t, s, &d.grad);
        torsion.p = &torsion.p + &form_on_gauss(&st.torsion_xi[s - 1], &rotated, &d.grad, &rate2).p;
        tau.p = &tau.p + &form_on_gauss(&st.tau[s - 1], &rotated, &d.grad, &rate2).p;
    }
    Ok(QuadraticIntegrands { vertical_hess, xi_sq, hess_sq, lap_sq, hess3_sq, hessm1_sq, omega_trace_sq, torsion, tau })
}

fn require_rates(sigma: &[GaussFn]) -> Result<Rational> {
    let first = sigma.first().ok_or_else(|| QcError::Invalid("empty form".into()))?;
    for s in sigma {
        first.same_rate(s)?;
    }
    Ok(first.rate.clone())
}

/// `∫ ∇*σ` with `∇*σ = -Σ_a e_a(σ_a)`; must vanish.
pub fn verify_divergence(m: &GroupModel, sigma: &[GaussFn]) -> Result<ExactIntegral> {
    if sigma.len() != 4 * m.n() {
        return Err(QcError::Mismatch { expected: 4 * m.n(), got: sigma.len() });
    }
    let rate = require_rates(sigma)?;
    let rho = m.rho();
    let div = sigma
        .iter()
        .zip(m.frame())
        .fold(GaussFn { p: Poly::zero(), rate: rate.clone() }, |acc, (s, e)| GaussFn {
            p: &acc.p - &s.apply_field(e, &rho).p,
            rate: rate.clone(),
        });
    integrate_exact(m, &div)
}

/// Integrals of the [`QuadraticIntegrands`], computed pairwise by
/// [`integrate_product`].
#[derive(Clone, Debug)]
pub struct QuadraticIntegrals {
    pub vertical_hess: ExactIntegral,
    pub xi_sq: ExactIntegral,
    pub hess_sq: ExactIntegral,
    pub lap_sq: ExactIntegral,
    pub hess3_sq: ExactIntegral,
    pub hessm1_sq: ExactIntegral,
    pub omega_trace_sq: ExactIntegral,
    pub torsion: ExactIntegral,
    pub tau: ExactIntegral,
}

struct Pairing<'a> {
    m: &'a GroupModel,
    rate: Rational,
}

impl Pairing<'_> {
    fn int(&self, p: &Poly, q: &Poly) -> Result<ExactIntegral> {
        let f = GaussFn { p: p.clone(), rate: self.rate.clone() };
        let g = GaussFn { p: q.clone(), rate: self.rate.clone() };
        integrate_product(self.m, &f, &g)
    }

    fn sum<'b>(&self, pairs: impl IntoIterator<Item = (&'b Poly, &'b Poly)>) -> Result<ExactIntegral> {
        let mut acc = ExactIntegral::zero(&self.rate * rat(2, 1), self.m.coord_count());
        for (p, q) in pairs {
            if !p.is_zero() && !q.is_zero() {
                acc = acc.add(&self.int(p, q)?)?;
            }
        }
        Ok(acc)
    }

    fn form(&self, form: &BilinearForm, x: &[Poly], y: &[Poly]) -> Result<ExactIntegral> {
        let mut acc = ExactIntegral::zero(&self.rate * rat(2, 1), self.m.coord_count());
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                let c = form.at(a, b);
                if !c.is_zero() {
                    acc = acc.add(&self.int(xa, yb)?.scale(c))?;
                }
            }
        }
        Ok(acc)
    }
}

pub fn quadratic_integrals(m: &GroupModel, d: &GaussDerivatives) -> Result<QuadraticIntegrals> {
    let n = m.n();
    let h = 4 * n;
    let t = m.triple();
    let pr = Pairing { m, rate: d.f.rate.clone() };
    let polys = |v: &[GaussFn]| -> Vec<Poly> { v.iter().map(|g| g.p.clone()).collect() };
    let grad = polys(&d.grad);

    let mut vertical_pairs = Vec::new();
    let rotated: Vec<Vec<Poly>> = (1..=3).map(|s| rotate_horizontal(t, s, &grad)).collect();
    let xi_grad: Vec<Vec<Poly>> = d.xi_grad.iter().map(|v| polys(v)).collect();
    for s in 0..3 {
        for a in 0..h {
            vertical_pairs.push((&rotated[s][a], &xi_grad[s][a]));
        }
    }
    let vertical_hess = pr.sum(vertical_pairs)?;
    let xi_sq = pr.sum(d.xi.iter().map(|x| (&x.p, &x.p)))?;

    let hess = Mat::from_fn(h, |a, b| d.hess[a][b].p.clone());
    let hess_sq = pr.sum(hess.entries().iter().map(|p| (p, p)))?;
    let lap = -&hess.trace();
    let lap_sq = pr.sum([(&lap, &lap)])?;

    let poly_triple = t.map(|r| Poly::constant(r.clone()));
    let split = hessian_sp_decompose(&poly_triple, &BilinearForm::new(n, hess.clone())?)?;
    let hess3_sq = pr.sum(split.part3.matrix().entries().iter().map(|p| (p, p)))?;
    let hessm1_sq = pr.sum(split.partm1.matrix().entries().iter().map(|p| (p, p)))?;

    let traces: Vec<Poly> = (1..=3)
        .map(|s| hess.frobenius(&t.omega_matrix(s).map(|r| Poly::constant(r.clone()))))
        .collect();
    let omega_trace_sq = pr.sum(traces.iter().map(|p| (p, p)))?;

    let st = m.structure();
    let mut torsion = ExactIntegral::zero(&d.f.rate * rat(2, 1), m.coord_count());
    let mut tau = torsion.clone();
    for s in 1..=3 {
        torsion = torsion.add(&pr.form(&st.torsion_xi[s - 1], &rotated[s - 1], &grad)?)?;
        tau = tau.add(&pr.form(&st.tau[s - 1], &rotated[s - 1], &grad)?)?;
    }
    Ok(QuadraticIntegrals { vertical_hess, xi_sq, hess_sq, lap_sq, hess3_sq, hessm1_sq, omega_trace_sq, torsion, tau })
}

/// `∫ Σ∇²f(ξ_s,I_s∇f) = -∫ [4n Σ(ξ_s f)² + Σ T(ξ_s,I_s∇f,∇f)]`.
pub fn verify_vertical_torsion_flat(m: &GroupModel, f: &GaussFn) -> Result<IdentityCheck> {
    vertical_torsion_from(m, &quadratic_integrals(m, &derivatives(m, f))?)
}

fn vertical_torsion_from(m: &GroupModel, q: &QuadraticIntegrals) -> Result<IdentityCheck> {
    let four_n = rat(4 * m.n() as i64, 1);
    let rhs = q.xi_sq.scale(&four_n).add(&q.torsion)?.scale(&rat(-1, 1));
    Ok(IdentityCheck { lhs: q.vertical_hess.clone(), rhs })
}

/// `∫ Σ∇²f(ξ_s,I_s∇f) = ∫ [3/(4n)|(∇²f)_[3]|² - 1/(4n)|(∇²f)_[-1]|² - ½Στ_s(I_s∇f,∇f)]`.
pub fn verify_vertical_split_flat(m: &GroupModel, f: &GaussFn) -> Result<IdentityCheck> {
    vertical_split_from(m, &quadratic_integrals(m, &derivatives(m, f))?)
}

fn vertical_split_from(m: &GroupModel, q: &QuadraticIntegrals) -> Result<IdentityCheck> {
    let four_n = 4 * m.n() as i64;
    let rhs = q
        .hess3_sq
        .scale(&rat(3, four_n))
        .sub(&q.hessm1_sq.scale(&rat(1, four_n)))?
        .sub(&q.tau.scale(&rat(1, 2)))?;
    Ok(IdentityCheck { lhs: q.vertical_hess.clone(), rhs })
}

/// Outcome of the Hessian / sub-Laplacian comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum HessianRatio {
    /// `∫|∇²f|² / ∫|Δf|²`
    Defined(Rational),
    /// `Δf ≡ 0`
    Undefined,
}

/// All integral identities for one test function.
#[derive(Clone, Debug)]
pub struct GaussReport {
    /// vertical Hessian term against the `[3]`/`[-1]` split and `τ`
    pub vertical_split: IdentityCheck,
    /// vertical Hessian term against `Σ(ξ_s f)²` and the torsion
    pub vertical_torsion: IdentityCheck,
    /// `∫[3|(∇²f)_[3]|² - |(∇²f)_[-1]|²] = -16n² ∫Σ(ξ_s f)²`
    pub combined: IdentityCheck,
    /// `16n² ∫Σ(ξ_s f)² = ∫ Σ_s (Σ_a ∇²f(e_a, I_s e_a))²`
    pub vert: IdentityCheck,
    /// Integrated Bochner: `∫(Δf)² = ∫|∇²f|² + 4∫Σ∇²f(ξ_s,I_s∇f)`
    pub bochner: IdentityCheck,
    /// `∫ ∇*(∇f)` must vanish
    pub divergence: ExactIntegral,
    pub hess_sq: ExactIntegral,
    pub lap_sq: ExactIntegral,
    pub xi_sq: ExactIntegral,
    pub vertical_hess: ExactIntegral,
    pub ratio: HessianRatio,
}

pub fn analyze_gauss(m: &GroupModel, f: &GaussFn) -> Result<GaussReport> {
    let d = derivatives(m, f);
    let q = quadratic_integrals(m, &d)?;
    let n = m.n() as i64;
    let vertical_split = vertical_split_from(m, &q)?;
    let vertical_torsion = vertical_torsion_from(m, &q)?;
    let combined = IdentityCheck {
        lhs: q.hess3_sq.scale(&rat(3, 1)).sub(&q.hessm1_sq)?,
        rhs: q.xi_sq.scale(&rat(-16 * n * n, 1)),
    };
    let vert = IdentityCheck { lhs: q.xi_sq.scale(&rat(16 * n * n, 1)), rhs: q.omega_trace_sq.clone() };
    let bochner = IdentityCheck { lhs: q.lap_sq.clone(), rhs: q.hess_sq.add(&q.vertical_hess.scale(&rat(4, 1)))? };
    let divergence = verify_divergence(m, &d.grad)?;
    let ratio = ratio_of(&q.hess_sq, &q.lap_sq);
    Ok(GaussReport {
        vertical_split,
        vertical_torsion,
        combined,
        vert,
        bochner,
        divergence,
        hess_sq: q.hess_sq,
        lap_sq: q.lap_sq,
        xi_sq: q.xi_sq,
        vertical_hess: q.vertical_hess,
        ratio,
    })
}

fn ratio_of(num: &ExactIntegral, den: &ExactIntegral) -> HessianRatio {
    if den.coeff.is_zero() {
        HessianRatio::Undefined
    } else {
        HessianRatio::Defined(&num.coeff / &den.coeff)
    }
}

/// Exact `∫|∇²f|² / ∫|Δf|²`; bounded by `(n+1)/n` on `G(H)`.
pub fn verify_hessian_laplacian_bound(m: &GroupModel, f: &GaussFn) -> Result<HessianRatio> {
    let q = quadratic_integrals(m, &derivatives(m, f))?;
    Ok(ratio_of(&q.hess_sq, &q.lap_sq))
}

/// `(∫ e_a(f) g, -∫ f e_a(g))` for a frame index `a`.
pub fn integration_by_parts(m: &GroupModel, a: usize, f: &GaussFn, g: &GaussFn) -> Result<IdentityCheck> {
    let rho = m.rho();
    let e = &m.frame()[a];
    let lhs = integrate_exact(m, &f.apply_field(e, &rho).mul(g))?;
    let rhs = integrate_exact(m, &f.mul(&g.apply_field(e, &rho)))?.scale(&rat(-1, 1));
    Ok(IdentityCheck { lhs, rhs })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `|estimate - exact| ≤ k · SE`.
    pub fn agrees_with(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.std_error
    }
}

pub const MC_MIN_SAMPLES: usize = 10_000;
const MC_CHUNK: usize = 4096;

/// Importance-sampled `∫ q` over `G(H)` with proposal density `∝ exp(-bρ)`.
///
/// Samples are split into fixed chunks with one random stream each and
/// reduced in chunk order, so the result is independent of the thread count.
pub fn mc_integrate<F>(m: &GroupModel, rate: &Rational, q: F, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let v = mc_integrate_many(m, rate, 1, |x: &[f64], out: &mut [f64]| out[0] = q(x), samples, seed)?;
    Ok(v[0])
}

/// Several integrands sharing one sample stream; `q` writes `k` values.
pub fn mc_integrate_many<F>(
    m: &GroupModel,
    rate: &Rational,
    k: usize,
    q: F,
    samples: usize,
    seed: u64,
) -> Result<Vec<McEstimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if samples < MC_MIN_SAMPLES {
        return Err(QcError::SampleCount { min: MC_MIN_SAMPLES, got: samples });
    }
    if !rate.is_positive() {
        return Err(QcError::NonPositiveRate(rate.to_string()));
    }
    let dim = m.coord_count();
    let b = rat_to_f64(rate);
    let norm = (std::f64::consts::PI / b).powf(dim as f64 / 2.0);
    let normal = Normal::new(0.0, (0.5 / b).sqrt()).map_err(|e| QcError::Invalid(e.to_string()))?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; dim];
            let mut vals = vec![0.0; k];
            let mut acc = vec![(0.0, 0.0); k];
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = normal.sample(&mut rng);
                }
                let r: f64 = x.iter().map(|v| v * v).sum();
                let w = norm * (b * r).exp();
                q(&x, &mut vals);
                for (a, v) in acc.iter_mut().zip(&vals) {
                    let y = v * w;
                    a.0 += y;
                    a.1 += y * y;
                }
            }
            acc
        })
        .collect();
    let nf = samples as f64;
    Ok((0..k)
        .map(|i| {
            let (s1, s2) = partial.iter().fold((0.0, 0.0), |(a, b), p| (a + p[i].0, b + p[i].1));
            let mean = s1 / nf;
            let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
            McEstimate { estimate: mean, std_error: (var / nf).sqrt(), samples }
        })
        .collect())
}

/// Floating-point frame derivatives of a Gaussian-ring function at a point,
/// computed from ambient partial derivatives by the chain rule. This route
/// shares nothing with the exact Gaussian-ring algebra and serves as the
/// independent oracle for [`mc_integrate`] cross-checks.
pub struct FloatJetEvaluator {
    n: usize,
    rate: f64,
    p: FloatPoly,
    dp: Vec<FloatPoly>,
    ddp: Vec<Vec<FloatPoly>>,
    /// frame coefficient polynomials and their constant derivatives
    frame: Vec<Vec<(usize, FloatPoly)>>,
    frame_d: Vec<Vec<(usize, usize, f64)>>,
    reeb: Vec<Vec<(usize, f64)>>,
    triple: HypercomplexTriple,
}

/// Pointwise frame derivatives.
pub struct FloatJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Mat<f64>,
    pub xi: [f64; 3],
    pub xi_grad: [Vec<f64>; 3],
}

impl FloatJetEvaluator {
    pub fn new(m: &GroupModel, f: &GaussFn) -> Self {
        let dim = m.coord_count();
        let dp: Vec<Poly> = (0..dim).map(|i| f.p.derivative(i)).collect();
        let ddp = dp.iter().map(|d| (0..dim).map(|j| d.derivative(j).to_float()).collect()).collect();
        let frame = m
            .frame()
            .iter()
            .map(|e| {
                e.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, c.to_float()))
                    .collect()
            })
            .collect();
        let frame_d = m
            .frame()
            .iter()
            .map(|e| {
                let mut out = Vec::new();
                for (j, c) in e.coeffs().iter().enumerate() {
                    for i in 0..dim {
                        let d = c.derivative(i);
                        if let Some(k) = d.as_constant().filter(|k| !k.is_zero()) {
                            out.push((i, j, rat_to_f64(&k)));
                        }
                    }
                }
                out
            })
            .collect();
        let reeb = m
            .reeb_fields()
            .iter()
            .map(|v| {
                v.coeffs()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| c.as_constant().filter(|k| !k.is_zero()).map(|k| (i, rat_to_f64(&k))))
                    .collect()
            })
            .collect();
        FloatJetEvaluator {
            n: m.n(),
            rate: rat_to_f64(&f.rate),
            p: f.p.to_float(),
            dp: dp.iter().map(Poly::to_float).collect(),
            ddp,
            frame,
            frame_d,
            reeb,
            triple: m.triple().clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> FloatJet {
        let dim = x.len();
        let a = self.rate;
        let rho: f64 = x.iter().map(|v| v * v).sum();
        let ex = (-a * rho).exp();
        let p = self.p.eval(x);
        let dp: Vec<f64> = self.dp.iter().map(|d| d.eval(x)).collect();
        // ambient derivatives of F = p e^{-aρ}
        let df: Vec<f64> = (0..dim).map(|i| (dp[i] - 2.0 * a * x[i] * p) * ex).collect();
        let ddf = |i: usize, j: usize| -> f64 {
            let mut v = self.ddp[i][j].eval(x) - 2.0 * a * (x[j] * dp[i] + x[i] * dp[j]) + 4.0 * a * a * x[i] * x[j] * p;
            if i == j {
                v -= 2.0 * a * p;
            }
            v * ex
        };
        let h = 4 * self.n;
        let coeffs: Vec<Vec<(usize, f64)>> =
            self.frame.iter().map(|e| e.iter().map(|(i, c)| (*i, c.eval(x))).collect()).collect();
        let grad: Vec<f64> = coeffs.iter().map(|e| e.iter().map(|(i, c)| c * df[*i]).sum()).collect();
        let hess = Mat::from_fn(h, |ai, bi| {
            let mut v = 0.0;
            for (i, ca) in &coeffs[ai] {
                for (j, cb) in &coeffs[bi] {
                    v += ca * cb * ddf(*i, *j);
                }
            }
            for (i, j, d) in &self.frame_d[bi] {
                if let Some((_, ca)) = coeffs[ai].iter().find(|(k, _)| k == i) {
                    v += ca * d * df[*j];
                }
            }
            v
        });
        let xi = [0, 1, 2].map(|s| self.reeb[s].iter().map(|(i, c)| c * df[*i]).sum());
        let xi_grad = [0, 1, 2].map(|s| {
            (0..h)
                .map(|bi| {
                    let mut v = 0.0;
                    for (k, ck) in &self.reeb[s] {
                        for (j, cb) in &coeffs[bi] {
                            v += ck * cb * ddf(*k, *j);
                        }
                        for (i, j, d) in &self.frame_d[bi] {
                            if i == k {
                                v += ck * d * df[*j];
                            }
                        }
                    }
                    v
                })
                .collect()
        });
        FloatJet { value: p * ex, grad, hess, xi, xi_grad }
    }

    /// `Σ_s ∇²f(ξ_s, I_s∇f)` at a jet.
    pub fn vertical_hess(&self, j: &FloatJet) -> f64 {
        (1..=3)
            .map(|s| {
                let rotated = rotate_horizontal(&self.triple, s, &j.grad);
                rotated.iter().zip(&j.xi_grad[s - 1]).map(|(r, g)| r * g).sum::<f64>()
            })
            .sum()
    }
}

impl FloatJet {
    pub fn hess_sq(&self) -> f64 {
        self.hess.norm_sq()
    }

    pub fn lap_sq(&self) -> f64 {
        let l = self.hess.trace();
        l * l
    }

    pub fn xi_sq(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::build_group_model;

    fn gauss(p: Poly, a: Rational) -> GaussFn {
        GaussFn::new(p, a).unwrap()
    }

    #[test]
    fn moments() {
        let b = rat(3, 1);
        let one = gaussian_moment(&Monomial::one(), &b, 1).unwrap();
        assert_eq!(one.coeff, rat(1, 1));
        let x2 = gaussian_moment(&Monomial::from_exponents(&[2]), &b, 1).unwrap();
        assert_eq!(x2.coeff, rat(1, 6));
        let x4 = gaussian_moment(&Monomial::from_exponents(&[4]), &b, 1).unwrap();
        assert_eq!(x4.coeff, rat(3, 36));
        let x3 = gaussian_moment(&Monomial::from_exponents(&[3, 2]), &b, 2).unwrap();
        assert!(x3.is_zero());
        assert!(gaussian_moment(&Monomial::one(), &rat(0, 1), 1).is_err());
        assert!(GaussFn::new(Poly::from_int(1), rat(-1, 2)).is_err());
    }

    #[test]
    fn moment_against_quadrature() {
        // trapezoid rule on a wide grid for ∫ x^k e^{-b x²}
        for (k, b) in [(2u32, 0.5f64), (4, 1.0), (6, 2.0)] {
            let h = 1e-3;
            let mut s = 0.0;
            let mut x: f64 = -20.0;
            while x <= 20.0 {
                s += x.powi(k as i32) * (-b * x * x).exp() * h;
                x += h;
            }
            let exact = gaussian_moment(&Monomial::from_exponents(&[k]), &Rational::from_float(b).unwrap(), 1).unwrap();
            assert!((s - exact.to_f64()).abs() < 1e-9 * s.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn integrate_examples() {
        let m = build_group_model(1).unwrap();
        let q = gauss(Poly::from_int(1), rat(1, 1));
        assert_eq!(integrate_exact(&m, &q).unwrap().coeff, rat(1, 1));
        assert!(integrate_exact(&m, &gauss(Poly::var(0), rat(1, 1))).unwrap().is_zero());
        let t1sq = gauss(&Poly::var(0) * &Poly::var(0), rat(1, 1));
        assert_eq!(integrate_exact(&m, &t1sq).unwrap().coeff, rat(1, 2));
    }

    #[test]
    fn mixed_rates_rejected() {
        let m = build_group_model(1).unwrap();
        let a = gauss(Poly::from_int(1), rat(1, 1));
        let b = gauss(Poly::from_int(1), rat(1, 2));
        assert!(a.add(&b).is_err());
        let mut sigma = vec![a.clone(); 4];
        sigma[2] = b;
        assert!(verify_divergence(&m, &sigma).is_err());
        let i1 = integrate_exact(&m, &a).unwrap();
        let i2 = integrate_exact(&m, &gauss(Poly::from_int(1), rat(1, 2))).unwrap();
        assert!(i1.add(&i2).is_err());
    }

    #[test]
    fn divergence_examples() {
        let m = build_group_model(1).unwrap();
        let a = rat(1, 2);
        let f = gauss(Poly::var(0), a.clone());
        let d = derivatives(&m, &f);
        assert!(verify_divergence(&m, &d.grad).unwrap().is_zero());
        let mut sigma = vec![gauss(Poly::zero(), a.clone()); 4];
        sigma[0] = gauss(Poly::from_int(1), a);
        assert!(verify_divergence(&m, &sigma).unwrap().is_zero());
    }

    #[test]
    fn vertical_identities_on_named_functions() {
        let m = build_group_model(2).unwrap();
        let a = rat(1, 2);
        let v1 = Poly::var(crate::heisenberg::vertical_index(2, 1));
        for p in [Poly::from_int(1), Poly::var(0), v1] {
            let f = gauss(p, a.clone());
            let r = analyze_gauss(&m, &f).unwrap();
            assert!(r.vertical_split.holds(), "split {:?}", r.vertical_split);
            assert!(r.vertical_torsion.holds(), "vertical_torsion {:?}", r.vertical_torsion);
            assert!(r.combined.holds());
            assert!(r.vert.holds());
            assert!(r.bochner.holds());
            assert!(r.divergence.is_zero());
            match r.ratio {
                HessianRatio::Defined(q) => assert!(q > rat(0, 1) && q <= rat(3, 2), "{q}"),
                HessianRatio::Undefined => panic!("Δf vanished"),
            }
        }
        let radial = analyze_gauss(&m, &gauss(Poly::from_int(1), a)).unwrap();
        assert!(!radial.vertical_torsion.lhs.is_zero());
    }

    #[test]
    fn pairwise_integrals_match_expanded_products() {
        let m = build_group_model(2).unwrap();
        for i in 0..3u64 {
            let p = crate::random::random_poly(&mut rng_for(3, i), m.coord_count(), 3, 4);
            let f = gauss(p, crate::random::default_rates()[i as usize].clone());
            let d = derivatives(&m, &f);
            let pointwise = quadratic_integrands(&m, &d).unwrap();
            let pairwise = quadratic_integrals(&m, &d).unwrap();
            for (a, b) in [
                (&pointwise.hess_sq, &pairwise.hess_sq),
                (&pointwise.lap_sq, &pairwise.lap_sq),
                (&pointwise.hess3_sq, &pairwise.hess3_sq),
                (&pointwise.hessm1_sq, &pairwise.hessm1_sq),
                (&pointwise.vertical_hess, &pairwise.vertical_hess),
                (&pointwise.xi_sq, &pairwise.xi_sq),
                (&pointwise.omega_trace_sq, &pairwise.omega_trace_sq),
            ] {
                assert_eq!(&integrate_exact(&m, a).unwrap(), b);
            }
        }
    }

    #[test]
    fn harmonic_function_has_undefined_ratio() {
        // Δf ≡ 0 needs a polynomial; exp factor prevents that, so emulate via ratio_of
        let z = ExactIntegral::zero(rat(1, 1), 7);
        assert_eq!(ratio_of(&z, &z), HessianRatio::Undefined);
    }

    #[test]
    fn mc_matches_exact_and_is_reproducible() {
        let m = build_group_model(1).unwrap();
        let b = rat(1, 1);
        let exact = integrate_exact(&m, &gauss(&Poly::var(0) * &Poly::var(0), b.clone())).unwrap();
        let q = |x: &[f64]| x[0] * x[0] * (-x.iter().map(|v| v * v).sum::<f64>()).exp();
        let est = mc_integrate(&m, &b, q, 20_000, 9).unwrap();
        assert!(est.agrees_with(exact.to_f64(), 3.0), "{est:?} vs {}", exact.to_f64());
        let again = mc_integrate(&m, &b, q, 20_000, 9).unwrap();
        assert_eq!(est.estimate.to_bits(), again.estimate.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| mc_integrate(&m, &b, q, 20_000, 9).unwrap());
        assert_eq!(est.estimate.to_bits(), single.estimate.to_bits());
        assert!(mc_integrate(&m, &b, q, 100, 9).is_err());
    }

    #[test]
    fn float_jet_matches_exact_derivatives() {
        let m = build_group_model(1).unwrap();
        let p = &(&Poly::var(0) * &Poly::var(5)) + &Poly::var(1);
        let f = gauss(p, rat(1, 2));
        let d = derivatives(&m, &f);
        let jet = FloatJetEvaluator::new(&m, &f);
        let x = [0.3, -0.2, 0.5, 0.1, -0.4, 0.7, 0.2];
        let j = jet.eval(&x);
        let ex = (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp();
        for a in 0..4 {
            assert!((j.grad[a] - d.grad[a].p.to_float().eval(&x) * ex).abs() < 1e-12);
            for b in 0..4 {
                assert!((j.hess.get(a, b) - d.hess[a][b].p.to_float().eval(&x) * ex).abs() < 1e-12);
            }
            for s in 0..3 {
                assert!((j.xi_grad[s][a] - d.xi_grad[s][a].p.to_float().eval(&x) * ex).abs() < 1e-12);
            }
        }
    }
}
