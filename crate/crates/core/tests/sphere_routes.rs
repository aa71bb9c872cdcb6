//! The two sub-Laplacian routes on the sphere agree on polynomial functions.

use qc_core::random::{random_poly, rng_for};
use qc_core::sphere::{build_sphere_model, random_unit_point, sub_laplacian_routes, ROUTE_TOL};

#[test]
fn routes_agree_on_random_ambient_polynomials() {
    let m = build_sphere_model(2).unwrap();
    let dim = m.ambient_dim();
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let p = random_poly(&mut rng_for(41, i), dim, 3, 6).to_float();
        let f = move |x: &[f64]| p.eval(x);
        for k in 0..100u64 {
            let x = random_unit_point(&mut rng_for(42, i * 100 + k), dim);
            let r = sub_laplacian_routes(&m, &f, &x).unwrap();
            let gap = (r.route_a - r.route_b).abs() / (1.0 + r.route_a.abs());
            worst = worst.max(gap);
        }
    }
    assert!(worst <= ROUTE_TOL, "worst relative route gap {worst:e}");
}

#[test]
fn constants_are_annihilated() {
    let m = build_sphere_model(3).unwrap();
    let f = |_: &[f64]| 2.5;
    for k in 0..10u64 {
        let x = random_unit_point(&mut rng_for(43, k), m.ambient_dim());
        let r = sub_laplacian_routes(&m, &f, &x).unwrap();
        assert!(r.route_a.abs() < 1e-6 && r.route_b.abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn small_n_is_rejected() {
    assert!(build_sphere_model(1).is_err());
}
