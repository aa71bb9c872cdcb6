//! Closed-form constants of the eigenvalue and Hessian estimates, with the
//! coefficient bookkeeping of the Bochner argument redone in exact arithmetic.
//!
//! The coefficient identities are rational functions of `n` of low degree
//! (numerators and denominators of degree at most 4 after clearing), so exact
//! agreement at the nine points `n = 2..10` already forces agreement as
//! rational functions; no symbolic algebra in `n` is needed.

use crate::error::{QcError, Result};
use crate::scalar::{rat, Rational};
use num_traits::{Signed, Zero};

/// Exact constants at a fixed `n ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormConstants {
    pub n: usize,
    /// splitting constant `(n-1)/(4n-1)`
    pub c: Rational,
    pub alpha_n: Rational,
    /// `β_n` exactly as stated, `3(2n²+5n-1)/((2n+1)(n-1))`
    pub beta_n: Rational,
    pub lich_coeff: Rational,
    pub cn_sq: Rational,
    pub hess_coeff: Rational,
    pub t0_coeff: Rational,
    pub u_coeff: Rational,
    pub s_coeff: Rational,
    pub p_max: PMax,
}

/// `2 + (n + n√r)/(4n²+2n-1)` with exact radicand `r = 16n²+8n-3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PMax {
    pub radicand: u64,
    pub value: f64,
}

fn check_n(n: usize) -> Result<i64> {
    if n < 2 {
        return Err(QcError::Dimension { min: 2, got: n });
    }
    Ok(n as i64)
}

pub fn splitting_c(n: usize) -> Result<Rational> {
    let n = check_n(n)?;
    Ok(rat(n - 1, 4 * n - 1))
}

pub fn closed_form_constants(n: usize) -> Result<ClosedFormConstants> {
    let ni = check_n(n)?;
    Ok(ClosedFormConstants {
        n,
        c: rat(ni - 1, 4 * ni - 1),
        alpha_n: rat(2 * (4 * ni + 5), 2 * ni + 1),
        beta_n: rat(3 * (2 * ni * ni + 5 * ni - 1), (2 * ni + 1) * (ni - 1)),
        lich_coeff: rat(ni, ni + 2),
        cn_sq: rat(ni + 1, ni),
        hess_coeff: rat(ni, ni + 1),
        t0_coeff: rat(2 * ni * (ni + 2), ni + 1),
        u_coeff: rat(4 * ni * ni, ni - 1),
        s_coeff: rat(2 * ni * ni, ni + 1),
        p_max: p_max(n)?,
    })
}

/// Upper end of the `p` interval; defined for every `n ≥ 1`, decreasing
/// towards 3 for large `n`.
pub fn p_max(n: usize) -> Result<PMax> {
    if n == 0 {
        return Err(QcError::Dimension { min: 1, got: 0 });
    }
    let n64 = n as u64;
    let radicand = 16 * n64 * n64 + 8 * n64 - 3;
    let nf = n as f64;
    let value = 2.0 + (nf + nf * (radicand as f64).sqrt()) / (4.0 * nf * nf + 2.0 * nf - 1.0);
    Ok(PMax { radicand, value })
}

/// `n k0/(n+2)`.
pub fn lichnerowicz_bound(n: usize, k0: &Rational) -> Result<Rational> {
    let ni = check_n(n)?;
    if !k0.is_positive() {
        return Err(QcError::Invalid(format!("k0 must be positive, got {k0}")));
    }
    Ok(k0 * rat(ni, ni + 2))
}

/// A horizontal symmetric tensor expressed in the basis `{Ric, T⁰, U, S·g}`.
#[derive(Clone, Debug, PartialEq)]
struct Combo([Rational; 4]);

const RIC: usize = 0;
const T0: usize = 1;
const U: usize = 2;
const SG: usize = 3;

impl Combo {
    fn unit(i: usize) -> Combo {
        let mut c = Combo(std::array::from_fn(|_| Rational::zero()));
        c.0[i] = rat(1, 1);
        c
    }

    fn add(&self, o: &Combo) -> Combo {
        Combo(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    fn scale(&self, r: &Rational) -> Combo {
        Combo(std::array::from_fn(|i| &self.0[i] * r))
    }

    /// Eliminate `S·g` through `Ric = (2n+2)T⁰ + (4n+10)U + 2(n+2)S·g`.
    fn eliminate_sg(&self, n: i64) -> Combo {
        let sg = Combo::unit(RIC)
            .add(&Combo::unit(T0).scale(&rat(-(2 * n + 2), 1)))
            .add(&Combo::unit(U).scale(&rat(-(4 * n + 10), 1)))
            .scale(&rat(1, 2 * (n + 2)));
        let mut out = self.clone();
        let k = std::mem::replace(&mut out.0[SG], Rational::zero());
        out.add(&sg.scale(&k))
    }
}

/// One exact coefficient comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientCheck {
    pub id: String,
    pub description: String,
    pub derived: Rational,
    pub expected: Rational,
    pub passed: bool,
}

impl CoefficientCheck {
    fn eq(id: &str, description: impl Into<String>, derived: Rational, expected: Rational) -> Self {
        let passed = derived == expected;
        CoefficientCheck { id: id.into(), description: description.into(), derived, expected, passed }
    }

    fn nonneg(id: &str, description: impl Into<String>, derived: Rational) -> Self {
        let passed = !derived.is_negative();
        CoefficientCheck { id: id.into(), description: description.into(), derived, expected: Rational::zero(), passed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientReport {
    pub n: usize,
    pub checks: Vec<CoefficientCheck>,
}

impl CoefficientReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CoefficientCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Did every check with id `group` or `group.*` pass?
    pub fn group_passed(&self, group: &str) -> bool {
        let dotted = format!("{group}.");
        self.checks
            .iter()
            .filter(|c| c.id == group || c.id.starts_with(&dotted))
            .all(|c| c.passed)
    }
}

/// Identities (i)-(iv) of the eigenvalue argument at the standard `c`.
pub fn bochner_coefficient_check(n: usize) -> Result<CoefficientReport> {
    bochner_coefficient_check_with_c(n, &splitting_c(n)?)
}

/// Same as [`bochner_coefficient_check`] with an arbitrary splitting constant.
///
/// (i) the `Σ(ξ_s f)²` coefficient `16n²(1/(4n) - (1-c)/(4n²) - c/n)` vanishes;
/// (ii) the `(Δf)²` coefficient `1/(4n) + 3(1-c)/(4n²) - 1` equals
/// `2(1-n)(2n+1)/(n(4n-1))`;
/// (iii) `1 + 3(1-c)/n ≥ 0` and `1 - (1-c)/n ≥ 0`;
/// (iv) substituting the `τ` and torsion identities and the Ricci formula into
/// `Ric - 2(1-c)Στ_s(I_s·,·) + (2-4c)ΣT(ξ_s,I_s·,·)` gives
/// `F·[Ric + α_n T⁰ + β_n U]` with `F = 2(n-1)(2n+1)/((4n-1)(n+2))`.
pub fn bochner_coefficient_check_with_c(n: usize, c: &Rational) -> Result<CoefficientReport> {
    let ni = check_n(n)?;
    let k = closed_form_constants(n)?;
    let one = rat(1, 1);
    let omc = &one - c;
    let mut checks = Vec::new();

    let xi = rat(16 * ni * ni, 1) * (rat(1, 4 * ni) - &omc * rat(1, 4 * ni * ni) - c * rat(1, ni));
    checks.push(CoefficientCheck::eq("i", "vertical-square coefficient vanishes", xi, Rational::zero()));

    let lap = rat(1, 4 * ni) + &omc * rat(3, 4 * ni * ni) - &one;
    checks.push(CoefficientCheck::eq(
        "ii",
        "sub-Laplacian-square coefficient",
        lap,
        rat(2 * (1 - ni) * (2 * ni + 1), ni * (4 * ni - 1)),
    ));

    checks.push(CoefficientCheck::nonneg("iii.a", "1 + 3(1-c)/n >= 0", &one + &omc * rat(3, ni)));
    checks.push(CoefficientCheck::nonneg("iii.b", "1 - (1-c)/n >= 0", &one - &omc * rat(1, ni)));

    // Στ_s(I_s·,·) = (n+2)/n T⁰ + 3Sg ; ΣT(ξ_s,I_s·,·) = T⁰ - 3U
    let tau = Combo::unit(T0).scale(&rat(ni + 2, ni)).add(&Combo::unit(SG).scale(&rat(3, 1)));
    let tors = Combo::unit(T0).add(&Combo::unit(U).scale(&rat(-3, 1)));
    let line = Combo::unit(RIC)
        .add(&tau.scale(&(rat(-2, 1) * &omc)))
        .add(&tors.scale(&(rat(2, 1) - rat(4, 1) * c)))
        .eliminate_sg(ni);
    let f = rat(2 * (ni - 1) * (2 * ni + 1), (4 * ni - 1) * (ni + 2));
    checks.push(CoefficientCheck::eq("iv.ric", "Ric coefficient equals the common factor", line.0[RIC].clone(), f.clone()));
    checks.push(CoefficientCheck::eq(
        "iv.t0",
        "T0 coefficient equals factor * alpha_n",
        line.0[T0].clone(),
        &f * &k.alpha_n,
    ));
    checks.push(CoefficientCheck::eq(
        "iv.u",
        format!(
            "U coefficient equals factor * beta_n (stated beta_n = {})",
            k.beta_n
        ),
        line.0[U].clone(),
        &f * &k.beta_n,
    ));
    checks.push(CoefficientCheck::eq("iv.sg", "no leftover S g term", line.0[SG].clone(), Rational::zero()));
    Ok(CoefficientReport { n, checks })
}

/// The `β_n` that the substitution in (iv) actually produces:
/// `6(2n²+5n-1)/((2n+1)(n-1))`.
pub fn derived_beta_n(n: usize) -> Result<Rational> {
    let ni = check_n(n)?;
    Ok(rat(6 * (2 * ni * ni + 5 * ni - 1), (2 * ni + 1) * (ni - 1)))
}

/// Hessian estimate: `n²/(n²-1)·[Ric - (4/n)T⁰ - 6U - 6Sg]` after eliminating
/// `Ric` must equal `t0_coeff·T⁰ + u_coeff·U + s_coeff·S g`, and the
/// `|∇²f|²` coefficient must come out as `n/(n+1)` with `c = (n-4)/n`.
pub fn hessian_coefficient_check(n: usize) -> Result<CoefficientReport> {
    let ni = check_n(n)?;
    let k = closed_form_constants(n)?;
    let mut checks = Vec::new();

    let c = rat(ni - 4, ni);
    let one = rat(1, 1);
    checks.push(CoefficientCheck::eq("h.c", "c + 3/n = 1 - 1/n", &c + rat(3, ni), &one - rat(1, ni)));
    let lhs = &one - (&one - &c) * rat(1, 4 * ni);
    checks.push(CoefficientCheck::eq("h.lap", "sub-Laplacian side (n²-1)/n²", lhs.clone(), rat(ni * ni - 1, ni * ni)));
    checks.push(CoefficientCheck::eq("h.hess", "Hessian coefficient", (&one - rat(1, ni)) / &lhs, k.hess_coeff.clone()));

    let tau = Combo::unit(T0).scale(&rat(ni + 2, ni)).add(&Combo::unit(SG).scale(&rat(3, 1)));
    let tors = Combo::unit(T0).add(&Combo::unit(U).scale(&rat(-3, 1)));
    let line = Combo::unit(RIC).add(&tau.scale(&rat(-2, 1))).add(&tors.scale(&rat(2, 1)));
    let stated = Combo::unit(RIC)
        .add(&Combo::unit(T0).scale(&rat(-4, ni)))
        .add(&Combo::unit(U).scale(&rat(-6, 1)))
        .add(&Combo::unit(SG).scale(&rat(-6, 1)));
    for (i, name) in ["Ric", "T0", "U", "Sg"].iter().enumerate() {
        checks.push(CoefficientCheck::eq(
            &format!("h.line.{name}"),
            format!("{name} coefficient of the curvature line"),
            line.0[i].clone(),
            stated.0[i].clone(),
        ));
    }
    // eliminate Ric instead of Sg
    let pre = rat(ni * ni, ni * ni - 1);
    let ric = &line.0[RIC] * &pre;
    let expanded = [
        &line.0[T0] * &pre + &ric * rat(2 * ni + 2, 1),
        &line.0[U] * &pre + &ric * rat(4 * ni + 10, 1),
        &line.0[SG] * &pre + &ric * rat(2 * (ni + 2), 1),
    ];
    let expected = [k.t0_coeff.clone(), k.u_coeff.clone(), k.s_coeff.clone()];
    for ((name, d), e) in ["t0", "u", "s"].iter().zip(expanded).zip(expected) {
        checks.push(CoefficientCheck::eq(&format!("h.{name}"), format!("{name} coefficient"), d, e));
    }
    Ok(CoefficientReport { n, checks })
}
