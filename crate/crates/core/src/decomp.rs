//! Sp(n)- and Sp(n)Sp(1)-invariant parts of (0,2)-tensors on `H`.
//!
//! On bilinear forms the conjugation `Ψ ↦ -I_s Ψ I_s` becomes the pullback
//! `B ↦ B(I_s·, I_s·)`, so every averaging formula below is written in terms
//! of [`BilinearForm::pullback`].

use crate::error::{QcError, Result};
use crate::matrix::Mat;
use crate::quat::{BilinearForm, HypercomplexTriple};
use crate::scalar::{rat, Scalar};

/// The four Sp(n)-invariant parts, indexed by commutation signs with `(I₁, I₂, I₃)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourPartDecomposition<T> {
    pub ppp: BilinearForm<T>,
    pub pmm: BilinearForm<T>,
    pub mpm: BilinearForm<T>,
    pub mmp: BilinearForm<T>,
}

impl<T: Scalar> FourPartDecomposition<T> {
    pub fn parts(&self) -> [&BilinearForm<T>; 4] {
        [&self.ppp, &self.pmm, &self.mpm, &self.mmp]
    }

    pub fn sum(&self) -> BilinearForm<T> {
        self.ppp.add(&self.pmm).add(&self.mpm).add(&self.mmp)
    }
}

/// The `[3]` and `[-1]` components.
#[derive(Clone, Debug, PartialEq)]
pub struct SpSpDecomposition<T> {
    pub part3: BilinearForm<T>,
    pub partm1: BilinearForm<T>,
}

fn check_dims<T: Scalar>(t: &HypercomplexTriple<T>, p: &BilinearForm<T>) -> Result<()> {
    if p.n() != t.n() || p.matrix().dim() != t.dim() {
        return Err(QcError::Mismatch { expected: t.dim(), got: p.matrix().dim() });
    }
    Ok(())
}

fn pullbacks<T: Scalar>(t: &HypercomplexTriple<T>, p: &BilinearForm<T>) -> [BilinearForm<T>; 3] {
    [1, 2, 3].map(|s| p.pullback(t, s))
}

pub fn four_part_decompose<T: Scalar>(
    t: &HypercomplexTriple<T>,
    p: &BilinearForm<T>,
) -> Result<FourPartDecomposition<T>> {
    check_dims(t, p)?;
    let [q1, q2, q3] = pullbacks(t, p);
    let quarter = rat(1, 4);
    let comb = |s1: bool, s2: bool, s3: bool| {
        let mut acc = p.clone();
        for (q, plus) in [(&q1, s1), (&q2, s2), (&q3, s3)] {
            acc = if plus { acc.add(q) } else { acc.sub(q) };
        }
        acc.scale(&quarter)
    };
    Ok(FourPartDecomposition {
        ppp: comb(true, true, true),
        pmm: comb(true, false, false),
        mpm: comb(false, true, false),
        mmp: comb(false, false, true),
    })
}

/// `[3]` = the `(+++)` part, `[-1]` = the sum of the other three.
pub fn sp_decompose<T: Scalar>(
    t: &HypercomplexTriple<T>,
    p: &BilinearForm<T>,
) -> Result<SpSpDecomposition<T>> {
    let four = four_part_decompose(t, p)?;
    let partm1 = four.pmm.add(&four.mpm).add(&four.mmp);
    Ok(SpSpDecomposition { part3: four.ppp, partm1 })
}

/// `Υ P = Σ_s P(I_s·, I_s·)`.
pub fn casimir_apply<T: Scalar>(
    t: &HypercomplexTriple<T>,
    p: &BilinearForm<T>,
) -> Result<BilinearForm<T>> {
    check_dims(t, p)?;
    let [q1, q2, q3] = pullbacks(t, p);
    Ok(q1.add(&q2).add(&q3))
}

/// `Υ Ψ = -Σ_s I_s Ψ I_s` on endomorphisms.
pub fn casimir_apply_endomorphism<T: Scalar>(
    t: &HypercomplexTriple<T>,
    psi: &Mat<T>,
) -> Result<Mat<T>> {
    if psi.dim() != t.dim() {
        return Err(QcError::Mismatch { expected: t.dim(), got: psi.dim() });
    }
    let mut acc = Mat::zeros(t.dim());
    for s in 1..=3 {
        acc = acc.sub(&t.i(s).mul(psi).mul(t.i(s)));
    }
    Ok(acc)
}

/// Hessian split `(∇²f)_[3] = ¼[h + Σ h(I_s·,I_s·)]`, `(∇²f)_[-1] = ¼[3h - Σ h(I_s·,I_s·)]`.
///
/// Symmetry of `h` is not required.
pub fn hessian_sp_decompose<T: Scalar>(
    t: &HypercomplexTriple<T>,
    h: &BilinearForm<T>,
) -> Result<SpSpDecomposition<T>> {
    let pulled = casimir_apply(t, h)?;
    let quarter = rat(1, 4);
    let part3 = h.add(&pulled).scale(&quarter);
    let partm1 = h.scale(&rat(3, 1)).sub(&pulled).scale(&quarter);
    Ok(SpSpDecomposition { part3, partm1 })
}

/// Traces of the projections onto `[3]` and `[-1]` on the `16n²`-dimensional
/// space of bilinear forms, i.e. the dimensions `4n²` and `12n²`.
pub fn projector_traces<T: Scalar>(t: &HypercomplexTriple<T>) -> Result<(T, T)> {
    let d = t.dim();
    let (mut tr3, mut trm1) = (T::zero(), T::zero());
    for a in 0..d {
        for b in 0..d {
            let mut e = Mat::zeros(d);
            e.set(a, b, T::one());
            let split = sp_decompose(t, &BilinearForm::new(t.n(), e)?)?;
            tr3 = tr3.plus(split.part3.at(a, b));
            trm1 = trm1.plus(split.partm1.at(a, b));
        }
    }
    Ok((tr3, trm1))
}

/// Left side of the `[3]` characterizing equation `3Ψ + Σ I_sΨI_s`, as a form.
pub fn characteristic_3<T: Scalar>(t: &HypercomplexTriple<T>, p: &BilinearForm<T>) -> Result<BilinearForm<T>> {
    Ok(p.scale(&rat(3, 1)).sub(&casimir_apply(t, p)?))
}

/// Left side of the `[-1]` characterizing equation `Ψ - Σ I_sΨI_s`, as a form.
pub fn characteristic_m1<T: Scalar>(t: &HypercomplexTriple<T>, p: &BilinearForm<T>) -> Result<BilinearForm<T>> {
    Ok(p.add(&casimir_apply(t, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{make_hypercomplex_triple, omega_form};
    use crate::scalar::Rational;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(n: usize, rng: &mut ChaCha8Rng) -> BilinearForm<Rational> {
        let m = Mat::from_fn(4 * n, |_, _| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
        BilinearForm::new(n, m).unwrap()
    }

    fn endo(b: &BilinearForm<Rational>) -> Mat<Rational> {
        b.to_endomorphism()
    }

    #[test]
    fn projector_dimensions() {
        for n in 1..=3usize {
            let t = make_hypercomplex_triple(n).unwrap();
            let (d3, dm1) = projector_traces(&t).unwrap();
            let nn = (n * n) as i64;
            assert_eq!(d3, rat(4 * nn, 1));
            assert_eq!(dm1, rat(12 * nn, 1));
        }
    }

    #[test]
    fn identity_and_structures() {
        let t = make_hypercomplex_triple(2).unwrap();
        let g = BilinearForm::new(2, t.metric()).unwrap();
        let four = four_part_decompose(&t, &g).unwrap();
        assert_eq!(four.ppp, g);
        assert!(four.pmm.is_zero() && four.mpm.is_zero() && four.mmp.is_zero());

        let i1 = BilinearForm::from_endomorphism(2, t.i(1)).unwrap();
        let four = four_part_decompose(&t, &i1).unwrap();
        assert_eq!(four.pmm, i1);
        assert!(four.ppp.is_zero() && four.mpm.is_zero() && four.mmp.is_zero());

        let w1 = omega_form(&t, 1).unwrap();
        let sp = sp_decompose(&t, &w1).unwrap();
        assert!(sp.part3.is_zero());
        assert_eq!(sp.partm1, w1);
    }

    #[test]
    fn casimir_eigenvalues() {
        let t = make_hypercomplex_triple(2).unwrap();
        let g = BilinearForm::new(2, t.metric()).unwrap();
        assert_eq!(casimir_apply(&t, &g).unwrap(), g.scale(&rat(3, 1)));
        let w2 = omega_form(&t, 2).unwrap();
        assert_eq!(casimir_apply(&t, &w2).unwrap(), w2.scale(&rat(-1, 1)));
    }

    #[test]
    fn casimir_minimal_polynomial_n1() {
        let t = make_hypercomplex_triple(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_form(1, &mut rng);
            let up = casimir_apply(&t, &p).unwrap();
            let uup = casimir_apply(&t, &up).unwrap();
            let r = uup.sub(&up.scale(&rat(2, 1))).sub(&p.scale(&rat(3, 1)));
            assert!(r.is_zero());
        }
    }

    #[test]
    fn casimir_routes_agree() {
        let t = make_hypercomplex_triple(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let p = random_form(2, &mut rng);
            let via_form = casimir_apply(&t, &p).unwrap();
            let via_endo = casimir_apply_endomorphism(&t, &endo(&p)).unwrap();
            assert_eq!(BilinearForm::from_endomorphism(2, &via_endo).unwrap(), via_form);
        }
    }

    #[test]
    fn random_decompositions_n2() {
        let t = make_hypercomplex_triple(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_form(2, &mut rng);
            let four = four_part_decompose(&t, &p).unwrap();
            assert_eq!(four.sum(), p);
            // commutation pattern of the four parts
            let signs = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
            for (part, sg) in four.parts().iter().zip(signs) {
                let e = endo(part);
                for s in 1..=3 {
                    let a = t.i(s).mul(&e);
                    let b = e.mul(t.i(s));
                    if sg[s - 1] == 1 {
                        assert_eq!(a, b);
                    } else {
                        assert_eq!(a, b.neg());
                    }
                }
            }
            let sp = sp_decompose(&t, &p).unwrap();
            assert_eq!(sp.part3.add(&sp.partm1), p);
            assert!(sp.part3.inner(&sp.partm1).is_zero());
            assert!(characteristic_3(&t, &sp.part3).unwrap().is_zero());
            assert!(characteristic_m1(&t, &sp.partm1).unwrap().is_zero());
            assert_eq!(casimir_apply(&t, &sp.part3).unwrap(), sp.part3.scale(&rat(3, 1)));
            assert_eq!(casimir_apply(&t, &sp.partm1).unwrap(), sp.partm1.scale(&rat(-1, 1)));
            // idempotence
            let again = sp_decompose(&t, &sp.part3).unwrap();
            assert_eq!(again.part3, sp.part3);
            assert!(again.partm1.is_zero());

            let h = hessian_sp_decompose(&t, &p).unwrap();
            assert_eq!(h, sp);
            assert_eq!(p.norm_sq(), h.part3.norm_sq() + h.partm1.norm_sq());
        }
    }

    #[test]
    fn hessian_split_examples() {
        let t = make_hypercomplex_triple(2).unwrap();
        let g = BilinearForm::new(2, t.metric()).unwrap();
        assert_eq!(hessian_sp_decompose(&t, &g).unwrap().part3, g);
        let w3 = omega_form(&t, 3).unwrap();
        let h = hessian_sp_decompose(&t, &w3).unwrap();
        assert_eq!(h.partm1, w3);
        assert!(h.part3.is_zero());
    }

    #[test]
    fn projection_lower_bounds() {
        let n = 2;
        let t = make_hypercomplex_triple(n).unwrap();
        let four_n = rat(4 * n as i64, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let h = random_form(n, &mut rng);
            let sp = hessian_sp_decompose(&t, &h).unwrap();
            let tr = h.matrix().trace();
            assert!(sp.part3.norm_sq() >= &tr * &tr / &four_n);
            let mut s = Rational::zero();
            for k in 1..=3 {
                let c = h.inner(&omega_form(&t, k).unwrap());
                s += &c * &c;
            }
            assert!(sp.partm1.norm_sq() >= s / &four_n);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let t = make_hypercomplex_triple(2).unwrap();
        let p = BilinearForm::<Rational>::zero(1);
        assert!(sp_decompose(&t, &p).is_err());
        assert!(casimir_apply_endomorphism(&t, &Mat::<Rational>::zeros(3)).is_err());
    }
}
