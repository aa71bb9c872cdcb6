//! Exact integral identities on the Gaussian ring.

use proptest::prelude::*;
use qc_core::heisenberg::build_group_model;
use qc_core::integral::{
    analyze_gauss, derivatives, integrate_exact, integrate_product, integration_by_parts, verify_divergence,
    GaussFn, HessianRatio,
};
use qc_core::random::{default_rates, random_poly, rng_for};
use qc_core::rat;

fn gauss(nvars: usize, deg: u32, terms: usize) -> impl Strategy<Value = GaussFn> {
    (any::<u64>(), 0usize..3).prop_map(move |(seed, r)| {
        let p = random_poly(&mut rng_for(seed, 0), nvars, deg, terms);
        GaussFn::new(p, default_rates()[r].clone()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frame_fields_integrate_by_parts(f in gauss(7, 3, 4), g in gauss(7, 3, 4), a in 0usize..4) {
        let m = build_group_model(1).unwrap();
        prop_assert!(integration_by_parts(&m, a, &f, &g).unwrap().holds());
    }

    #[test]
    fn pairwise_product_matches_expansion(f in gauss(11, 3, 5), g in gauss(11, 3, 5)) {
        let m = build_group_model(2).unwrap();
        prop_assert_eq!(integrate_product(&m, &f, &g).unwrap(), integrate_exact(&m, &f.mul(&g)).unwrap());
    }

    #[test]
    fn horizontal_divergences_integrate_to_zero(f in gauss(11, 3, 4)) {
        let m = build_group_model(2).unwrap();
        let d = derivatives(&m, &f);
        prop_assert!(verify_divergence(&m, &d.grad).unwrap().is_zero());
    }

    #[test]
    fn identities_and_hessian_bound_for_n2(f in gauss(11, 3, 4)) {
        let m = build_group_model(2).unwrap();
        let r = analyze_gauss(&m, &f).unwrap();
        for c in [&r.vertical_split, &r.vertical_torsion, &r.combined, &r.vert, &r.bochner] {
            prop_assert!(c.holds(), "{:?}", c);
        }
        prop_assert!(r.divergence.is_zero());
        if let HessianRatio::Defined(q) = r.ratio {
            prop_assert!(q <= rat(3, 2));
        }
    }
}
