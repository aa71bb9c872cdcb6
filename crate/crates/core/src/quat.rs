//! Quaternions and the hypercomplex triple on `H^n ≅ R^{4n}`.
//!
//! Matrices act on column vectors: column `a` of `I_s` holds the image of the
//! basis vector `e_a`. With `g = Id` the fundamental forms are
//! `ω_s[a][b] = g(I_s e_a, e_b) = I_s[b][a]`.

use crate::error::{QcError, Result};
use crate::matrix::Mat;
use crate::scalar::{rat, rat_to_f64, Rational, Scalar};
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Exact quaternion `w + x i + y j + z k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quat {
    pub w: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Quat {
    pub fn new(w: Rational, x: Rational, y: Rational, z: Rational) -> Self {
        Quat { w, x, y, z }
    }

    pub fn from_ints(w: i64, x: i64, y: i64, z: i64) -> Self {
        Quat::new(rat(w, 1), rat(x, 1), rat(y, 1), rat(z, 1))
    }

    pub fn one() -> Self {
        Quat::from_ints(1, 0, 0, 0)
    }
    pub fn i() -> Self {
        Quat::from_ints(0, 1, 0, 0)
    }
    pub fn j() -> Self {
        Quat::from_ints(0, 0, 1, 0)
    }
    pub fn k() -> Self {
        Quat::from_ints(0, 0, 0, 1)
    }

    /// Imaginary unit `i`, `j`, `k` for `s = 1, 2, 3`.
    pub fn unit(s: usize) -> Result<Self> {
        match s {
            1 => Ok(Quat::i()),
            2 => Ok(Quat::j()),
            3 => Ok(Quat::k()),
            _ => Err(QcError::StructureIndex(s)),
        }
    }

    pub fn conj(&self) -> Self {
        Quat::new(self.w.clone(), -&self.x, -&self.y, -&self.z)
    }

    pub fn norm_sq(&self) -> Rational {
        &self.w * &self.w + &self.x * &self.x + &self.y * &self.y + &self.z * &self.z
    }

    pub fn components(&self) -> [Rational; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn from_components(c: &[Rational]) -> Self {
        Quat::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
    }

    /// 4×4 matrix of `v ↦ self · v`.
    pub fn left_matrix(&self) -> Mat<Rational> {
        matrix_of(|v| quat_mul(self, v))
    }

    /// 4×4 matrix of `v ↦ v · self`.
    pub fn right_matrix(&self) -> Mat<Rational> {
        matrix_of(|v| quat_mul(v, self))
    }
}

fn matrix_of(op: impl Fn(&Quat) -> Quat) -> Mat<Rational> {
    let mut m = Mat::zeros(4);
    for col in 0..4 {
        let mut e = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
        e[col] = Rational::one();
        let img = op(&Quat::from_components(&e)).components();
        for (row, v) in img.into_iter().enumerate() {
            m.set(row, col, v);
        }
    }
    m
}

/// Hamilton product with `ij = k`.
pub fn quat_mul(a: &Quat, b: &Quat) -> Quat {
    Quat {
        w: &a.w * &b.w - &a.x * &b.x - &a.y * &b.y - &a.z * &b.z,
        x: &a.w * &b.x + &a.x * &b.w + &a.y * &b.z - &a.z * &b.y,
        y: &a.w * &b.y - &a.x * &b.z + &a.y * &b.w + &a.z * &b.x,
        z: &a.w * &b.z + &a.x * &b.y - &a.y * &b.x + &a.z * &b.w,
    }
}

impl Mul for &Quat {
    type Output = Quat;
    fn mul(self, o: &Quat) -> Quat {
        quat_mul(self, o)
    }
}

impl Add for &Quat {
    type Output = Quat;
    fn add(self, o: &Quat) -> Quat {
        Quat::new(&self.w + &o.w, &self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl Sub for &Quat {
    type Output = Quat;
    fn sub(self, o: &Quat) -> Quat {
        Quat::new(&self.w - &o.w, &self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl Neg for &Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-&self.w, -&self.x, -&self.y, -&self.z)
    }
}

/// Which side the imaginary units act from on `H^n`.
///
/// `Left`: `I_s q = u_s q`. `Right`: `I_s q = q ū_s`, i.e. right multiplication
/// by `-i, -j, -k`; plain right multiplication by `i, j, k` is an
/// anti-representation (`R_i R_j = -R_k`) and cannot satisfy `I₁I₂ = I₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chirality {
    Left,
    Right,
}

/// The chirality used by every model in the crate.
pub const CHIRALITY: Chirality = Chirality::Right;

/// Three complex structures on `R^{4n}` with `g = Id`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypercomplexTriple<T = Rational> {
    n: usize,
    mats: [Mat<T>; 3],
}

/// Triple realizing quaternion multiplication with the crate chirality.
pub fn make_hypercomplex_triple(n: usize) -> Result<HypercomplexTriple> {
    HypercomplexTriple::with_chirality(n, CHIRALITY)
}

impl HypercomplexTriple<Rational> {
    pub fn with_chirality(n: usize, chirality: Chirality) -> Result<Self> {
        if n == 0 {
            return Err(QcError::Dimension { min: 1, got: 0 });
        }
        let block = |s: usize| -> Mat<Rational> {
            let u = Quat::unit(s).expect("s in 1..=3");
            match chirality {
                Chirality::Left => u.left_matrix(),
                Chirality::Right => u.conj().right_matrix(),
            }
        };
        let mats = [1, 2, 3].map(|s| {
            let b = block(s);
            let mut m = Mat::zeros(4 * n);
            for q in 0..n {
                for r in 0..4 {
                    for c in 0..4 {
                        m.set(4 * q + r, 4 * q + c, b.get(r, c).clone());
                    }
                }
            }
            m
        });
        let t = HypercomplexTriple { n, mats };
        debug_assert!(t.relation_failures().is_empty());
        Ok(t)
    }

    /// Names of the violated exact relations (empty when all hold).
    pub fn relation_failures(&self) -> Vec<String> {
        let id = Mat::<Rational>::identity(4 * self.n);
        let mut fails = Vec::new();
        for s in 1..=3 {
            let m = self.i(s);
            if m.mul(m) != id.neg() {
                fails.push(format!("I{s}^2 = -Id"));
            }
            if m.transpose().mul(m) != id {
                fails.push(format!("I{s}^T I{s} = Id"));
            }
            if !self.omega_matrix(s).is_antisymmetric() {
                fails.push(format!("omega{s} antisymmetric"));
            }
        }
        for (i, j, k) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            if self.i(i).mul(self.i(j)) != *self.i(k) {
                fails.push(format!("I{i} I{j} = I{k}"));
            }
            if self.i(j).mul(self.i(i)) != self.i(k).neg() {
                fails.push(format!("I{j} I{i} = -I{k}"));
            }
        }
        if self.i(1).mul(self.i(2)).mul(self.i(3)) != id.neg() {
            fails.push("I1 I2 I3 = -Id".into());
        }
        fails
    }

    /// Lossy float mirror.
    pub fn to_f64(&self) -> HypercomplexTriple<f64> {
        self.map(rat_to_f64)
    }
}

impl HypercomplexTriple<f64> {
    /// Largest entrywise defect over the quaternion and orthogonality relations.
    pub fn max_relation_defect(&self) -> f64 {
        let id = Mat::<f64>::identity(4 * self.n);
        let mut worst: f64 = 0.0;
        for s in 1..=3 {
            let m = self.i(s);
            worst = worst.max(m.mul(m).add(&id).max_abs());
            worst = worst.max(m.transpose().mul(m).sub(&id).max_abs());
        }
        for (i, j, k) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            worst = worst.max(self.i(i).mul(self.i(j)).sub(self.i(k)).max_abs());
        }
        worst
    }
}

impl<T: Scalar> HypercomplexTriple<T> {
    /// Wrap three matrices without checking any relation.
    pub fn from_matrices(n: usize, mats: [Mat<T>; 3]) -> Result<Self> {
        for m in &mats {
            if m.dim() != 4 * n {
                return Err(QcError::Mismatch { expected: 4 * n, got: m.dim() });
            }
        }
        Ok(HypercomplexTriple { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// `I_s` for `s ∈ {1, 2, 3}`.
    pub fn i(&self, s: usize) -> &Mat<T> {
        &self.mats[s - 1]
    }

    pub fn metric(&self) -> Mat<T> {
        Mat::identity(self.dim())
    }

    /// `ω_s[a][b] = g(I_s e_a, e_b)`.
    pub fn omega_matrix(&self, s: usize) -> Mat<T> {
        self.i(s).transpose()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> HypercomplexTriple<U> {
        HypercomplexTriple { n: self.n, mats: [0, 1, 2].map(|i| self.mats[i].map(&f)) }
    }

    /// Representation in the orthonormal basis given by the columns of `p`.
    pub fn in_basis(&self, p: &Mat<T>) -> Self {
        let pt = p.transpose();
        HypercomplexTriple { n: self.n, mats: [0, 1, 2].map(|i| pt.mul(&self.mats[i]).mul(p)) }
    }

    /// Return a copy with `I_a` and `I_b` exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut t = self.clone();
        t.mats.swap(a - 1, b - 1);
        t
    }
}

/// A (0,2)-tensor on `H`, stored as its matrix in the working frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm<T = Rational> {
    n: usize,
    m: Mat<T>,
}

impl<T: Scalar> BilinearForm<T> {
    pub fn new(n: usize, m: Mat<T>) -> Result<Self> {
        if m.dim() != 4 * n {
            return Err(QcError::Mismatch { expected: 4 * n, got: m.dim() });
        }
        Ok(BilinearForm { n, m })
    }

    /// The form `g(Ψ·, ·)` of an endomorphism `Ψ`.
    pub fn from_endomorphism(n: usize, psi: &Mat<T>) -> Result<Self> {
        Self::new(n, psi.transpose())
    }

    /// The endomorphism `Ψ` with `B(X, Y) = g(ΨX, Y)`.
    pub fn to_endomorphism(&self) -> Mat<T> {
        self.m.transpose()
    }

    pub fn zero(n: usize) -> Self {
        BilinearForm { n, m: Mat::zeros(4 * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.m
    }

    pub fn at(&self, a: usize, b: usize) -> &T {
        self.m.get(a, b)
    }

    pub fn is_symmetric(&self) -> bool {
        self.m.is_symmetric()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.m.is_antisymmetric()
    }

    pub fn add(&self, o: &Self) -> Self {
        BilinearForm { n: self.n, m: self.m.add(&o.m) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BilinearForm { n: self.n, m: self.m.sub(&o.m) }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        BilinearForm { n: self.n, m: self.m.scale(r) }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Trace inner product `Σ_ab B(e_a,e_b) C(e_a,e_b)`.
    pub fn inner(&self, o: &Self) -> T {
        self.m.frobenius(&o.m)
    }

    pub fn norm_sq(&self) -> T {
        self.m.norm_sq()
    }

    /// `(X, Y) ↦ B(I_s X, I_s Y)`, i.e. `I_sᵀ B I_s`.
    pub fn pullback(&self, t: &HypercomplexTriple<T>, s: usize) -> Self {
        let i = t.i(s);
        BilinearForm { n: self.n, m: i.transpose().mul(&self.m).mul(i) }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BilinearForm<U> {
        BilinearForm { n: self.n, m: self.m.map(f) }
    }
}

impl BilinearForm<Rational> {
    pub fn to_f64(&self) -> BilinearForm<f64> {
        self.map(rat_to_f64)
    }
}

/// The fundamental 2-form `ω_s(X, Y) = g(I_s X, Y)`.
pub fn omega_form<T: Scalar>(t: &HypercomplexTriple<T>, s: usize) -> Result<BilinearForm<T>> {
    if !(1..=3).contains(&s) {
        return Err(QcError::StructureIndex(s));
    }
    BilinearForm::new(t.n(), t.omega_matrix(s))
}
