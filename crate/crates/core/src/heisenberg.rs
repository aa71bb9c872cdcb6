//! Exact model of the flat quaternionic Heisenberg group `G(H) = H^n × Im H`.
//!
//! Coordinates are `(t_k, x_k, y_k, z_k)` for `k = 0..n` at indices `4k..4k+3`,
//! followed by `v_1, v_2, v_3` at `4n, 4n+1, 4n+2`. The horizontal fields are
//!
//! ```text
//! E_i = ∂_i + c Σ_s Σ_j ω_s(∂_i, ∂_j) u_j ∂_{v_s},     ξ_s = c ∂_{v_s}
//! ```
//!
//! with `c = REEB_SCALE`, so `[E_i, E_j] = -2 Σ_s ω_s(E_i, E_j) ξ_s` and the
//! contact forms `η_s = c⁻¹ dv_s - Σ ω_s(∂_i, ∂_j) u_j du_i` satisfy
//! `η_s(ξ_k) = δ_sk` and `dη_s = 2ω_s` on `H`. The working frame orders the
//! `E_i` as `e, I₁e, I₂e, I₃e` per quaternionic coordinate.
//!
//! On this group the Biquard connection has `α_s = 0` and parallel
//! left-invariant frame, so `∇²f(A, B) = A(B f)` for frame fields.

use crate::error::{QcError, Result};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::quat::{make_hypercomplex_triple, BilinearForm, HypercomplexTriple};
use crate::scalar::{rat, Rational, Scalar};
use num_traits::{One, Zero};

/// Scale of the Reeb fields, `ξ_s = c ∂_{v_s}`.
pub const REEB_SCALE: i64 = 1;

/// Number of coordinates of `G(H)` for quaternionic dimension `n`.
pub fn coord_count(n: usize) -> usize {
    4 * n + 3
}

/// Index of the vertical coordinate `v_s`.
pub fn vertical_index(n: usize, s: usize) -> usize {
    4 * n + s - 1
}

/// Human-readable coordinate name.
pub fn coord_name(n: usize, i: usize) -> String {
    if i >= 4 * n {
        format!("v{}", i - 4 * n + 1)
    } else {
        let tag = ["t", "x", "y", "z"][i % 4];
        format!("{tag}{}", i / 4 + 1)
    }
}

fn check_s(s: usize) -> Result<()> {
    if (1..=3).contains(&s) {
        Ok(())
    } else {
        Err(QcError::StructureIndex(s))
    }
}

/// First-order operator `Σ_i V_i ∂_i` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    n: usize,
    coeffs: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(n: usize, coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() != coord_count(n) {
            return Err(QcError::Mismatch { expected: coord_count(n), got: coeffs.len() });
        }
        Ok(PolyVectorField { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField { n, coeffs: vec![Poly::zero(); coord_count(n)] }
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coeffs[i] = Poly::from_int(1);
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.derivative(i);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        PolyVectorField {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        PolyVectorField { n: self.n, coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect() }
    }

    /// Lie bracket `[V, W]`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(QcError::Mismatch { expected: self.n, got: o.n });
        }
        let coeffs = (0..self.coeffs.len())
            .map(|i| &self.apply(&o.coeffs[i]) - &o.apply(&self.coeffs[i]))
            .collect();
        Ok(PolyVectorField { n: self.n, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }
}

/// `V(f)`, the exact directional derivative.
pub fn apply_field(v: &PolyVectorField, f: &Poly) -> Result<Poly> {
    let bound = coord_count(v.n);
    if f.var_bound() > bound {
        return Err(QcError::Mismatch { expected: bound, got: f.var_bound() });
    }
    Ok(v.apply(f))
}

/// A 1-form `Σ_i η_i du_i` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyOneForm {
    coeffs: Vec<Poly>,
}

impl PolyOneForm {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        PolyOneForm { coeffs }
    }

    pub fn eval(&self, v: &PolyVectorField) -> Poly {
        self.coeffs
            .iter()
            .zip(v.coeffs())
            .fold(Poly::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    /// `dη(V, W) = Σ_ij ∂_i η_j (V_i W_j - V_j W_i)`.
    pub fn exterior_eval(&self, v: &PolyVectorField, w: &PolyVectorField) -> Poly {
        let m = self.coeffs.len();
        let mut out = Poly::zero();
        for j in 0..m {
            for i in 0..m {
                let d = self.coeffs[j].derivative(i);
                if d.is_zero() {
                    continue;
                }
                let cross = &(v.coeff(i) * w.coeff(j)) - &(v.coeff(j) * w.coeff(i));
                out = &out + &(&d * &cross);
            }
        }
        out
    }
}

/// Curvature and torsion data of the flat model; every entry vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatStructure {
    pub scalar_s: Rational,
    pub ric: BilinearForm,
    pub t0: BilinearForm,
    pub u: BilinearForm,
    /// `T(ξ_s, X, Y)` for `s = 1, 2, 3`.
    pub torsion_xi: [BilinearForm; 3],
    pub tau: [BilinearForm; 3],
    pub rho: [BilinearForm; 3],
    /// `α_s` on the full frame `(e_1..e_4n, ξ_1..ξ_3)`.
    pub alpha: [Vec<Rational>; 3],
}

impl FlatStructure {
    fn new(n: usize) -> Self {
        let z = || BilinearForm::zero(n);
        let za = || vec![Rational::zero(); coord_count(n)];
        FlatStructure {
            scalar_s: Rational::zero(),
            ric: z(),
            t0: z(),
            u: z(),
            torsion_xi: [z(), z(), z()],
            tau: [z(), z(), z()],
            rho: [z(), z(), z()],
            alpha: [za(), za(), za()],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupModel {
    n: usize,
    frame: Vec<PolyVectorField>,
    reeb: [PolyVectorField; 3],
    eta: [PolyOneForm; 3],
    triple: HypercomplexTriple,
    structure: FlatStructure,
}

/// Outcome of [`frame_structure_selfcheck`].
#[derive(Clone, Debug, PartialEq)]
pub struct SelfCheckReport {
    pub checked: usize,
    pub first_failure: Option<String>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub fn build_group_model(n: usize) -> Result<GroupModel> {
    if n == 0 {
        return Err(QcError::Dimension { min: 1, got: 0 });
    }
    let std_triple = make_hypercomplex_triple(n)?;
    let c = rat(REEB_SCALE, 1);
    let h = 4 * n;
    let omega_std: Vec<Mat<Rational>> = (1..=3).map(|s| std_triple.omega_matrix(s)).collect();

    // coordinate-aligned left-invariant fields
    let aligned: Vec<PolyVectorField> = (0..h)
        .map(|i| {
            let mut v = PolyVectorField::coordinate(n, i);
            for s in 1..=3 {
                let mut lin = Poly::zero();
                for j in 0..h {
                    let w = omega_std[s - 1].get(i, j);
                    if !w.is_zero() {
                        lin = &lin + &Poly::var(j).scale(&(w * &c));
                    }
                }
                v.coeffs[vertical_index(n, s)] = lin;
            }
            v
        })
        .collect();

    // frame basis: columns e, I1 e, I2 e, I3 e for e = ∂_{t_k}
    let mut basis = Mat::<Rational>::zeros(h);
    for k in 0..n {
        basis.set(4 * k, 4 * k, Rational::one());
        for s in 1..=3 {
            for r in 0..h {
                basis.set(r, 4 * k + s, std_triple.i(s).get(r, 4 * k).clone());
            }
        }
    }
    let frame = (0..h)
        .map(|a| {
            (0..h).fold(PolyVectorField::zero(n), |acc, i| {
                let p = basis.get(i, a);
                if p.is_zero() {
                    acc
                } else {
                    acc.add(&aligned[i].scale(p))
                }
            })
        })
        .collect();
    let triple = std_triple.in_basis(&basis);

    let reeb = [1, 2, 3].map(|s| PolyVectorField::coordinate(n, vertical_index(n, s)).scale(&c));
    let eta = [1, 2, 3].map(|s| {
        let mut coeffs = vec![Poly::zero(); coord_count(n)];
        coeffs[vertical_index(n, s)] = Poly::constant(Rational::one() / &c);
        for (i, slot) in coeffs.iter_mut().enumerate().take(h) {
            for j in 0..h {
                let w = omega_std[s - 1].get(i, j);
                if !w.is_zero() {
                    *slot = &*slot - &Poly::var(j).scale(w);
                }
            }
        }
        PolyOneForm::new(coeffs)
    });

    let model = GroupModel { n, frame, reeb, eta, triple, structure: FlatStructure::new(n) };
    let report = frame_structure_selfcheck(&model);
    if let Some(f) = report.first_failure {
        return Err(QcError::Invalid(format!("group model self-check failed: {f}")));
    }
    Ok(model)
}

impl GroupModel {
    /// Assemble a model without running the self-check.
    pub fn from_parts(
        n: usize,
        frame: Vec<PolyVectorField>,
        reeb: [PolyVectorField; 3],
        eta: [PolyOneForm; 3],
        triple: HypercomplexTriple,
    ) -> Result<Self> {
        if frame.len() != 4 * n {
            return Err(QcError::Mismatch { expected: 4 * n, got: frame.len() });
        }
        Ok(GroupModel { n, frame, reeb, eta, triple, structure: FlatStructure::new(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coord_count(&self) -> usize {
        coord_count(self.n)
    }

    pub fn frame(&self) -> &[PolyVectorField] {
        &self.frame
    }

    pub fn reeb(&self, s: usize) -> &PolyVectorField {
        &self.reeb[s - 1]
    }

    pub fn reeb_fields(&self) -> &[PolyVectorField; 3] {
        &self.reeb
    }

    pub fn eta(&self, s: usize) -> &PolyOneForm {
        &self.eta[s - 1]
    }

    pub fn eta_forms(&self) -> &[PolyOneForm; 3] {
        &self.eta
    }

    /// The hypercomplex triple in the working frame.
    pub fn triple(&self) -> &HypercomplexTriple {
        &self.triple
    }

    pub fn structure(&self) -> &FlatStructure {
        &self.structure
    }

    /// `ρ = Σ` of all squared coordinates.
    pub fn rho(&self) -> Poly {
        (0..self.coord_count()).fold(Poly::zero(), |acc, i| &acc + &(&Poly::var(i) * &Poly::var(i)))
    }

    fn check_poly(&self, f: &Poly) -> Result<()> {
        if f.var_bound() > self.coord_count() {
            return Err(QcError::Mismatch { expected: self.coord_count(), got: f.var_bound() });
        }
        Ok(())
    }
}

fn delta(a: usize, b: usize) -> Rational {
    if a == b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Recompute every structure equation; report the first violated relation.
pub fn frame_structure_selfcheck(m: &GroupModel) -> SelfCheckReport {
    let mut checked = 0usize;
    let first_failure = selfcheck_relations(m, &mut checked);
    SelfCheckReport { checked, first_failure }
}

fn selfcheck_relations(m: &GroupModel, checked: &mut usize) -> Option<String> {
    let n = m.n;
    let h = 4 * n;
    let names: Vec<String> = (0..h).map(|a| format!("e{}", a + 1)).collect();

    if m.frame.len() != h {
        return Some(format!("frame has {} fields, expected {h}", m.frame.len()));
    }
    for s in 1..=3 {
        for k in 1..=3 {
            *checked += 1;
            if m.eta(s).eval(m.reeb(k)) != Poly::constant(delta(s, k)) {
                return Some(format!("eta{s}(xi{k}) = delta{s}{k}"));
            }
        }
        for (a, e) in m.frame.iter().enumerate() {
            *checked += 1;
            if !m.eta(s).eval(e).is_zero() {
                return Some(format!("eta{s}({}) = 0", names[a]));
            }
        }
    }
    let omegas: Vec<Mat<Rational>> = (1..=3).map(|s| m.triple.omega_matrix(s)).collect();
    for a in 0..h {
        for b in 0..h {
            *checked += 1;
            let br = match m.frame[a].bracket(&m.frame[b]) {
                Ok(v) => v,
                Err(e) => return Some(e.to_string()),
            };
            let expected = (1..=3).fold(PolyVectorField::zero(n), |acc, s| {
                acc.add(&m.reeb(s).scale(&(omegas[s - 1].get(a, b) * rat(-2, 1))))
            });
            if br != expected {
                return Some(format!("[{}, {}] = -2 sum omega_s xi_s", names[a], names[b]));
            }
        }
    }
    for s in 1..=3 {
        for (a, e) in m.frame.iter().enumerate() {
            *checked += 1;
            if !e.bracket(m.reeb(s)).map(|v| v.is_zero()).unwrap_or(false) {
                return Some(format!("[{}, xi{s}] = 0", names[a]));
            }
        }
        for t in 1..=3 {
            *checked += 1;
            if !m.reeb(s).bracket(m.reeb(t)).map(|v| v.is_zero()).unwrap_or(false) {
                return Some(format!("[xi{s}, xi{t}] = 0"));
            }
        }
    }
    for s in 1..=3 {
        for a in 0..h {
            for b in 0..h {
                *checked += 1;
                let d = m.eta(s).exterior_eval(&m.frame[a], &m.frame[b]);
                if d != Poly::constant(omegas[s - 1].get(a, b) * rat(2, 1)) {
                    return Some(format!("d eta{s}({}, {}) = 2 omega{s}", names[a], names[b]));
                }
            }
        }
        for k in 1..=3 {
            for (a, e) in m.frame.iter().enumerate() {
                *checked += 1;
                if !m.eta(k).exterior_eval(m.reeb(s), e).is_zero() {
                    return Some(format!("(xi{s} _| d eta{k})({}) = 0", names[a]));
                }
            }
        }
    }
    for a in 0..h {
        for b in 0..h {
            *checked += 1;
            let dot = (0..h).fold(Poly::zero(), |acc, i| &acc + &(m.frame[a].coeff(i) * m.frame[b].coeff(i)));
            if dot != Poly::constant(delta(a, b)) {
                return Some(format!("g({}, {}) = delta", names[a], names[b]));
            }
        }
    }
    let failures = m.triple.relation_failures();
    *checked += 1;
    if let Some(f) = failures.first() {
        return Some(format!("triple relation {f}"));
    }
    for k in 0..n {
        for s in 1..=3 {
            *checked += 1;
            let image = (0..h).fold(PolyVectorField::zero(n), |acc, b| {
                acc.add(&m.frame[b].scale(m.triple.i(s).get(b, 4 * k)))
            });
            if image != m.frame[4 * k + s] {
                return Some(format!("I{s} {} = {}", names[4 * k], names[4 * k + s]));
            }
        }
    }
    None
}

/// Components `e_a(f)`.
pub fn horizontal_gradient(m: &GroupModel, f: &Poly) -> Result<Vec<Poly>> {
    m.check_poly(f)?;
    Ok(m.frame.iter().map(|e| e.apply(f)).collect())
}

pub fn gradient_norm_sq(grad: &[Poly]) -> Poly {
    grad.iter().fold(Poly::zero(), |acc, g| &acc + &(g * g))
}

/// Entry `(a, b) = e_a(e_b f)`.
pub fn horizontal_hessian(m: &GroupModel, f: &Poly) -> Result<Mat<Poly>> {
    let grad = horizontal_gradient(m, f)?;
    Ok(hessian_from_gradient(m, &grad))
}

fn hessian_from_gradient(m: &GroupModel, grad: &[Poly]) -> Mat<Poly> {
    let h = 4 * m.n;
    Mat::from_fn(h, |a, b| m.frame[a].apply(&grad[b]))
}

/// Positive sub-Laplacian `Δf = -Σ_a e_a(e_a f)`.
pub fn sub_laplacian(m: &GroupModel, f: &Poly) -> Result<Poly> {
    m.check_poly(f)?;
    Ok(m.frame.iter().fold(Poly::zero(), |acc, e| &acc - &e.apply(&e.apply(f))))
}

/// `ξ_s(f)`.
pub fn vertical_derivative(m: &GroupModel, f: &Poly, s: usize) -> Result<Poly> {
    check_s(s)?;
    m.check_poly(f)?;
    Ok(m.reeb(s).apply(f))
}

/// Components of `I_s v` for `v = Σ_b v_b e_b`.
pub fn rotate_horizontal<T: Scalar>(t: &HypercomplexTriple, s: usize, v: &[T]) -> Vec<T> {
    let i = t.i(s);
    (0..v.len())
        .map(|a| {
            (0..v.len()).fold(T::zero(), |acc, b| {
                let c = i.get(a, b);
                if c.is_zero() || v[b].is_zero() {
                    acc
                } else {
                    acc.plus(&v[b].scale(c))
                }
            })
        })
        .collect()
}

/// `Σ_a ∇²f(e_a, I_s e_a) + 4n ξ_s f` for `s = 1, 2, 3`.
pub fn check_trace_identity(m: &GroupModel, f: &Poly) -> Result<[Poly; 3]> {
    let hess = horizontal_hessian(m, f)?;
    let four_n = rat(4 * m.n as i64, 1);
    let mut out = [Poly::zero(), Poly::zero(), Poly::zero()];
    for (s, slot) in (1..=3).zip(out.iter_mut()) {
        let omega = m.triple.omega_matrix(s);
        // Σ_a ∇²f(e_a, I_s e_a) = Σ_ab ∇²f(e_a, e_b) ω_s(e_a, e_b)
        let trace = hess.frobenius(&omega.map(|r| Poly::constant(r.clone())));
        *slot = &trace + &m.reeb(s).apply(f).scale(&four_n);
    }
    Ok(out)
}

/// Residuals of the order-two Ricci identities on the flat group.
#[derive(Clone, Debug)]
pub struct RicciResiduals {
    /// `∇²f(e_a,e_b) - ∇²f(e_b,e_a) + 2 Σ_s ω_s(e_a,e_b) ξ_s f`.
    pub horizontal: Mat<Poly>,
    /// `e_a(ξ_s f) - ξ_s(e_a f)`, indexed `[s-1][a]`.
    pub mixed: [Vec<Poly>; 3],
}

impl RicciResiduals {
    pub fn is_zero(&self) -> bool {
        self.horizontal.is_zero() && self.mixed.iter().all(|v| v.iter().all(Poly::is_zero))
    }
}

pub fn check_ricci_identities(m: &GroupModel, f: &Poly) -> Result<RicciResiduals> {
    let hess = horizontal_hessian(m, f)?;
    let xi_f: Vec<Poly> = (1..=3).map(|s| m.reeb(s).apply(f)).collect();
    let omegas: Vec<Mat<Rational>> = (1..=3).map(|s| m.triple.omega_matrix(s)).collect();
    let h = 4 * m.n;
    let horizontal = Mat::from_fn(h, |a, b| {
        let mut r = hess.get(a, b) - hess.get(b, a);
        for s in 0..3 {
            let w = omegas[s].get(a, b);
            if !w.is_zero() {
                r = &r + &xi_f[s].scale(&(w * rat(2, 1)));
            }
        }
        r
    });
    let mixed = [0, 1, 2].map(|s| {
        m.frame
            .iter()
            .map(|e| &e.apply(&xi_f[s]) - &m.reeb[s].apply(&e.apply(f)))
            .collect()
    });
    Ok(RicciResiduals { horizontal, mixed })
}

/// The individual terms of the Bochner identity for one function.
#[derive(Clone, Debug)]
pub struct BochnerTerms {
    /// `½ Δ|∇f|²`
    pub half_lap_grad_sq: Poly,
    /// `|∇²f|²`
    pub hess_sq: Poly,
    /// `g(∇(Δf), ∇f)`
    pub grad_lap_dot_grad: Poly,
    /// `Ric(∇f, ∇f)`
    pub ricci: Poly,
    /// `2 Σ_s T(ξ_s, I_s∇f, ∇f)`
    pub torsion: Poly,
    /// `4 Σ_s ∇²f(ξ_s, I_s∇f)`
    pub vertical: Poly,
    /// `2T⁰(∇f,∇f) - 6U(∇f,∇f)`
    pub t0_u: Poly,
}

fn form_on(form: &BilinearForm, x: &[Poly], y: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            let c = form.at(a, b);
            if !c.is_zero() {
                acc = &acc + &(xa * yb).scale(c);
            }
        }
    }
    acc
}

/// `Σ_s ∇²f(ξ_s, I_s∇f)` from a gradient, with `∇²f(ξ_s, Y) = ξ_s(Y f)`.
pub fn vertical_hessian_term(m: &GroupModel, grad: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for s in 1..=3 {
        let rotated = rotate_horizontal(&m.triple, s, grad);
        for (a, ra) in rotated.iter().enumerate() {
            if ra.is_zero() {
                continue;
            }
            acc = &acc + &(ra * &m.reeb(s).apply(&grad[a]));
        }
    }
    acc
}

pub fn bochner_terms(m: &GroupModel, f: &Poly) -> Result<BochnerTerms> {
    let grad = horizontal_gradient(m, f)?;
    let hess = hessian_from_gradient(m, &grad);
    let grad_sq = gradient_norm_sq(&grad);
    let half = rat(1, 2);
    let half_lap_grad_sq = sub_laplacian(m, &grad_sq)?.scale(&half);
    let hess_sq = hess.norm_sq();
    let lap = sub_laplacian(m, f)?;
    let grad_lap = horizontal_gradient(m, &lap)?;
    let grad_lap_dot_grad = grad_lap.iter().zip(&grad).fold(Poly::zero(), |acc, (a, b)| &acc + &(a * b));
    let st = &m.structure;
    let ricci = form_on(&st.ric, &grad, &grad);
    let mut torsion = Poly::zero();
    for s in 1..=3 {
        let rotated = rotate_horizontal(&m.triple, s, &grad);
        torsion = &torsion + &form_on(&st.torsion_xi[s - 1], &rotated, &grad);
    }
    let torsion = torsion.scale(&rat(2, 1));
    let vertical = vertical_hessian_term(m, &grad).scale(&rat(4, 1));
    let t0_u = &form_on(&st.t0, &grad, &grad).scale(&rat(2, 1)) - &form_on(&st.u, &grad, &grad).scale(&rat(6, 1));
    Ok(BochnerTerms { half_lap_grad_sq, hess_sq, grad_lap_dot_grad, ricci, torsion, vertical, t0_u })
}

/// Residual of the Bochner identity
/// `-½Δ|∇f|² = |∇²f|² - g(∇(Δf), ∇f) + Ric(∇f,∇f) + 2Σ T(ξ_s,I_s∇f,∇f) + 4Σ ∇²f(ξ_s,I_s∇f)`.
///
/// The left side carries a minus sign because `Δ` is the positive
/// sub-Laplacian; expanding `Δ|∇f|²` term by term through the Ricci
/// identities fixes it.
pub fn check_bochner_pointwise(m: &GroupModel, f: &Poly) -> Result<Poly> {
    let t = bochner_terms(m, f)?;
    let rhs = &(&(&(&t.hess_sq - &t.grad_lap_dot_grad) + &t.ricci) + &t.torsion) + &t.vertical;
    Ok(&(-&t.half_lap_grad_sq) - &rhs)
}

/// Same identity with the torsion term replaced by `2T⁰(∇f,∇f) - 6U(∇f,∇f)`.
pub fn check_bochner_t0u_form(m: &GroupModel, f: &Poly) -> Result<Poly> {
    let t = bochner_terms(m, f)?;
    let rhs = &(&(&(&t.hess_sq - &t.grad_lap_dot_grad) + &t.ricci) + &t.t0_u) + &t.vertical;
    Ok(&(-&t.half_lap_grad_sq) - &rhs)
}
