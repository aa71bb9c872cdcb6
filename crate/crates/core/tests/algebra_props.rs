//! Properties of the quaternion algebra and the invariant decompositions.

use proptest::prelude::*;
use qc_core::decomp::{
    casimir_apply, characteristic_3, characteristic_m1, four_part_decompose, hessian_sp_decompose, sp_decompose,
};
use qc_core::quat::{make_hypercomplex_triple, quat_mul, BilinearForm, Quat};
use qc_core::{rat, Mat, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn quat() -> impl Strategy<Value = Quat> {
    prop::array::uniform4(small_rational()).prop_map(|[w, x, y, z]| Quat::new(w, x, y, z))
}

fn form(n: usize) -> impl Strategy<Value = BilinearForm> {
    let d = 4 * n;
    prop::collection::vec(small_rational(), d * d).prop_map(move |v| {
        BilinearForm::new(n, Mat::from_fn(d, |a, b| v[a * d + b].clone())).unwrap()
    })
}

fn sym_form(n: usize) -> impl Strategy<Value = BilinearForm> {
    form(n).prop_map(|f| {
        let m = f.matrix();
        let s = m.add(&m.transpose()).scale(&rat(1, 2));
        BilinearForm::new(f.n(), s).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quaternion_product_is_associative_and_multiplicative(a in quat(), b in quat(), c in quat()) {
        prop_assert_eq!(quat_mul(&quat_mul(&a, &b), &c), quat_mul(&a, &quat_mul(&b, &c)));
        prop_assert_eq!(quat_mul(&a, &b).norm_sq(), a.norm_sq() * b.norm_sq());
        prop_assert_eq!(quat_mul(&a, &b).conj(), quat_mul(&b.conj(), &a.conj()));
    }

    #[test]
    fn left_and_right_matrices_commute(a in quat(), b in quat()) {
        let l = a.left_matrix();
        let r = b.right_matrix();
        prop_assert_eq!(l.mul(&r), r.mul(&l));
    }

    #[test]
    fn four_parts_sum_back_and_are_idempotent(p in form(1)) {
        let t = make_hypercomplex_triple(1).unwrap();
        let parts = four_part_decompose(&t, &p).unwrap();
        prop_assert_eq!(parts.sum(), p);
        for part in parts.parts() {
            let again = four_part_decompose(&t, part).unwrap();
            prop_assert_eq!(again.sum(), part.clone());
            let nonzero = again.parts().iter().filter(|q| !q.is_zero()).count();
            prop_assert!(nonzero <= 1);
        }
    }

    #[test]
    fn sp_parts_are_casimir_eigenvectors(p in form(2)) {
        let t = make_hypercomplex_triple(2).unwrap();
        let d = sp_decompose(&t, &p).unwrap();
        prop_assert_eq!(d.part3.add(&d.partm1), p);
        prop_assert_eq!(casimir_apply(&t, &d.part3).unwrap(), d.part3.scale(&rat(3, 1)));
        prop_assert_eq!(casimir_apply(&t, &d.partm1).unwrap(), d.partm1.scale(&rat(-1, 1)));
        prop_assert!(characteristic_3(&t, &d.part3).unwrap().is_zero());
        prop_assert!(characteristic_m1(&t, &d.partm1).unwrap().is_zero());
        prop_assert_eq!(characteristic_3(&t, &d.partm1).unwrap(), d.partm1.scale(&rat(4, 1)));
        prop_assert_eq!(d.part3.inner(&d.partm1), Rational::from_integer(0.into()));
    }

    #[test]
    fn hessian_split_is_orthogonal_for_symmetric_forms(p in sym_form(2)) {
        let t = make_hypercomplex_triple(2).unwrap();
        let h = hessian_sp_decompose(&t, &p).unwrap();
        prop_assert_eq!(h.part3.add(&h.partm1), p.clone());
        prop_assert!(h.part3.is_symmetric());
        prop_assert!(h.partm1.is_symmetric());
        prop_assert_eq!(h.part3.norm_sq() + h.partm1.norm_sq(), p.norm_sq());
    }
}
