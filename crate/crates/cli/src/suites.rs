//! The verification suites. Each suite is a list of independent work units;
//! every unit produces check records and draws randomness only from its own
//! stream, so the report does not depend on scheduling.

use std::time::Instant;

use qc_core::constants::{bochner_coefficient_check, hessian_coefficient_check, lichnerowicz_bound, closed_form_constants};
use qc_core::decomp::{casimir_apply, four_part_decompose, projector_traces, sp_decompose};
use qc_core::heisenberg::{
    build_group_model, check_bochner_pointwise, check_bochner_t0u_form, check_ricci_identities,
    check_trace_identity, frame_structure_selfcheck, GroupModel,
};
use qc_core::integral::{analyze_gauss, mc_integrate_many, ExactIntegral, FloatJetEvaluator, GaussFn, HessianRatio};
use qc_core::quat::{make_hypercomplex_triple, omega_form, BilinearForm};
use qc_core::random::{default_rates, random_coefficient, random_poly, rng_for};
use qc_core::sphere::{
    build_sphere_model, coordinate, coordinate_hessian_residual, random_unit_point, reeb_second_derivative,
    riemannian_laplacian_at, sphere_ratios_mc, sub_laplacian_routes, SphereModel,
};
use qc_core::{rat, Mat, Poly, Rational};
use rayon::prelude::*;

use crate::config::{Suite, SuiteConfig};
use crate::report::{CheckRecord, Residual};

/// Seed offsets keep the suites' random streams apart.
fn suite_seed(seed: u64, suite: Suite) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(suite as u64 + 1))
}

type Unit<'a> = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync + 'a>;

fn timed(unit: &Unit<'_>, record_time: bool) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut out = unit();
    if record_time {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for c in &mut out {
            c.runtime_ms = Some(ms);
        }
    }
    out
}

/// Run the selected suites on the current thread pool; records come back in
/// unit order.
pub fn run_suites(cfg: &SuiteConfig, record_time: bool) -> Vec<CheckRecord> {
    let mut units: Vec<Unit<'_>> = Vec::new();
    for &suite in &cfg.suites {
        match suite {
            Suite::Algebra => algebra_units(cfg, &mut units),
            Suite::GroupPointwise => group_pointwise_units(cfg, &mut units),
            Suite::GroupIntegral => group_integral_units(cfg, &mut units),
            Suite::Sphere => sphere_units(cfg, &mut units),
            Suite::Constants => constants_units(cfg, &mut units),
        }
    }
    units.par_iter().flat_map_iter(|u| timed(u, record_time)).collect()
}

fn max_abs(m: &Mat<Rational>) -> Rational {
    m.entries().iter().map(|x| if *x < rat(0, 1) { -x } else { x.clone() }).max().unwrap_or_else(|| rat(0, 1))
}

fn form_gap(a: &BilinearForm, b: &BilinearForm) -> Rational {
    max_abs(&a.matrix().sub(b.matrix()))
}

/// Largest absolute coefficient over residual polynomials.
fn poly_residual<'p>(ps: impl IntoIterator<Item = &'p Poly>) -> Residual {
    let abs = |c: &Rational| if *c < rat(0, 1) { -c } else { c.clone() };
    let worst = ps.into_iter().flat_map(|p| p.terms().map(|(_, c)| abs(c))).max();
    Residual::exact(&worst.unwrap_or_else(|| rat(0, 1)))
}

fn residual_check(id: String, anchor: &str, r: qc_core::Result<Residual>) -> CheckRecord {
    match r {
        Ok(r) => CheckRecord::new(id, anchor, r == Residual::ExactZero, r, ""),
        Err(e) => CheckRecord::error(id, anchor, e.to_string()),
    }
}

fn exact_check(id: String, anchor: &str, r: Rational, detail: impl Into<String>) -> CheckRecord {
    let ok = r == rat(0, 1);
    CheckRecord::new(id, anchor, ok, Residual::exact(&r), detail)
}

// ---------------------------------------------------------------- algebra

const A_REL: &str = "I_s² = -Id, I_1 I_2 = I_3 (cyclic), I_sᵀ I_s = Id";
const A_CAS_G: &str = "Υ g = 3 g";
const A_CAS_W: &str = "Υ ω_s = -ω_s";
const A_TRACE: &str = "dim [3] = 4n², dim [-1] = 12n² on bilinear forms";
const A_SUM: &str = "the four Sp(n) parts sum to the form";
const A_IDEM: &str = "decomposing a part returns that part alone";
const A_EIGEN: &str = "Υ = 3 on the [3] part and -1 on the [-1] part";

fn algebra_units<'a>(cfg: &'a SuiteConfig, units: &mut Vec<Unit<'a>>) {
    let seed = suite_seed(cfg.seed, Suite::Algebra);
    for n in 1..=cfg.n.max(3) {
        units.push(Box::new(move || algebra_unit(cfg, n, seed)));
    }
}

fn algebra_unit(cfg: &SuiteConfig, n: usize, seed: u64) -> Vec<CheckRecord> {
    let id = |name: &str| format!("algebra.n{n:02}.{name}");
    let t = match make_hypercomplex_triple(n) {
        Ok(t) => t,
        Err(e) => return vec![CheckRecord::error(id("relations"), A_REL, e.to_string())],
    };
    let mut out = Vec::new();
    let failures = t.relation_failures();
    out.push(exact_check(id("relations"), A_REL, rat(failures.len() as i64, 1), failures.join("; ")));

    let g = BilinearForm::new(n, Mat::identity(4 * n)).expect("square metric");
    let gap = casimir_apply(&t, &g).map(|u| form_gap(&u, &g.scale(&rat(3, 1))));
    out.push(match gap {
        Ok(r) => exact_check(id("casimir-metric"), A_CAS_G, r, ""),
        Err(e) => CheckRecord::error(id("casimir-metric"), A_CAS_G, e.to_string()),
    });
    let mut worst = rat(0, 1);
    for s in 1..=3 {
        let w = omega_form(&t, s).expect("valid index");
        let u = casimir_apply(&t, &w).expect("matching dimensions");
        worst = worst.max(form_gap(&u, &w.scale(&rat(-1, 1))));
    }
    out.push(exact_check(id("casimir-omega"), A_CAS_W, worst, "s = 1, 2, 3"));

    let (d3, dm1) = projector_traces(&t).expect("matching dimensions");
    let nn = (n * n) as i64;
    let gap = (d3.clone() - rat(4 * nn, 1)).abs_value() + (dm1.clone() - rat(12 * nn, 1)).abs_value();
    out.push(exact_check(id("projector-traces"), A_TRACE, gap, format!("traces {d3}, {dm1}")));

    let (mut sum_gap, mut idem_gap, mut eigen_gap) = (rat(0, 1), rat(0, 1), rat(0, 1));
    for i in 0..cfg.trials as u64 {
        let mut rng = rng_for(seed ^ n as u64, i);
        let d = 4 * n;
        let b = BilinearForm::new(n, Mat::from_fn(d, |_, _| random_coefficient(&mut rng))).expect("square");
        let four = four_part_decompose(&t, &b).expect("matching dimensions");
        sum_gap = sum_gap.max(form_gap(&four.sum(), &b));
        for (k, part) in four.parts().into_iter().enumerate() {
            let again = four_part_decompose(&t, part).expect("matching dimensions");
            for (l, q) in again.parts().into_iter().enumerate() {
                let target = if k == l { part.clone() } else { BilinearForm::zero(n) };
                idem_gap = idem_gap.max(form_gap(q, &target));
            }
        }
        let sp = sp_decompose(&t, &b).expect("matching dimensions");
        let u3 = casimir_apply(&t, &sp.part3).expect("matching dimensions");
        let um1 = casimir_apply(&t, &sp.partm1).expect("matching dimensions");
        eigen_gap = eigen_gap
            .max(form_gap(&u3, &sp.part3.scale(&rat(3, 1))))
            .max(form_gap(&um1, &sp.partm1.scale(&rat(-1, 1))));
    }
    let detail = format!("{} random forms", cfg.trials);
    out.push(exact_check(id("reassembly"), A_SUM, sum_gap, detail.clone()));
    out.push(exact_check(id("idempotence"), A_IDEM, idem_gap, detail.clone()));
    out.push(exact_check(id("sp-eigen"), A_EIGEN, eigen_gap, detail));
    out
}

trait AbsValue {
    fn abs_value(self) -> Self;
}

impl AbsValue for Rational {
    fn abs_value(self) -> Self {
        if self < rat(0, 1) {
            -self
        } else {
            self
        }
    }
}

// -------------------------------------------------------- group-pointwise

const G_STRUCT: &str = "[e_a, e_b] = -2 Σ ω_s(e_a, e_b) ξ_s, η_s(ξ_t) = δ_st, ξ_s central";
const G_TRACE: &str = "Σ_a ∇²f(e_a, I_s e_a) = -4n ξ_s f";
const G_RICCI: &str = "Ricci identities for the horizontal Hessian";
const G_BOCHNER: &str = "½Δ|∇f|² = |∇²f|² - g(∇Δf, ∇f) + Ric(∇f,∇f) + 2ΣT(ξ_s, I_s∇f, ∇f) - 4Σ∇²f(ξ_s, I_s∇f)";
const G_T0U: &str = "Bochner formula with the torsion written as 2T⁰ - 6U";

fn group_pointwise_units<'a>(cfg: &'a SuiteConfig, units: &mut Vec<Unit<'a>>) {
    let seed = suite_seed(cfg.seed, Suite::GroupPointwise);
    let model = match build_group_model(cfg.n) {
        Ok(m) => std::sync::Arc::new(m),
        Err(e) => {
            let msg = e.to_string();
            units.push(Box::new(move || vec![CheckRecord::error("group-pointwise.structure", G_STRUCT, msg.clone())]));
            return;
        }
    };
    let m = model.clone();
    units.push(Box::new(move || {
        let r = frame_structure_selfcheck(&m);
        let detail = r.first_failure.clone().unwrap_or_else(|| format!("{} relations", r.checked));
        let bad = if r.passed() { 0 } else { 1 };
        vec![exact_check("group-pointwise.structure".into(), G_STRUCT, rat(bad, 1), detail)]
    }));
    for i in 0..cfg.trials {
        let m = model.clone();
        units.push(Box::new(move || {
            let f = random_poly(&mut rng_for(seed, i as u64), m.coord_count(), cfg.degree, 8);
            let id = |name: &str| format!("group-pointwise.{name}.{i:04}");
            vec![
                residual_check(id("trace"), G_TRACE, check_trace_identity(&m, &f).map(|r| poly_residual(&r))),
                residual_check(
                    id("ricci"),
                    G_RICCI,
                    check_ricci_identities(&m, &f)
                        .map(|r| poly_residual(r.horizontal.entries().iter().chain(r.mixed.iter().flatten()))),
                ),
                residual_check(id("bochner"), G_BOCHNER, check_bochner_pointwise(&m, &f).map(|p| poly_residual([&p]))),
                residual_check(id("bochner-t0u"), G_T0U, check_bochner_t0u_form(&m, &f).map(|p| poly_residual([&p]))),
            ]
        }));
    }
}

// --------------------------------------------------------- group-integral

const I_SPLIT: &str = "∫Σ∇²f(ξ_s, I_s∇f) = ∫[3/(4n)|(∇²f)_[3]|² - 1/(4n)|(∇²f)_[-1]|² - ½Στ_s(I_s∇f, ∇f)]";
const I_TORSION: &str = "∫Σ∇²f(ξ_s, I_s∇f) = -∫[4nΣ(ξ_s f)² + ΣT(ξ_s, I_s∇f, ∇f)]";
const I_COMB: &str = "∫[3|(∇²f)_[3]|² - |(∇²f)_[-1]|²] = -16n²∫Σ(ξ_s f)²";
const I_VERT: &str = "16n²∫Σ(ξ_s f)² = ∫Σ_s(Σ_a ∇²f(e_a, I_s e_a))²";
const I_BOCH: &str = "∫(Δf)² = ∫|∇²f|² + 4∫Σ∇²f(ξ_s, I_s∇f)";
const I_DIV: &str = "∫∇*(∇f) = 0";
const I_BOUND: &str = "∫|∇²f|² ≤ (n+1)/n ∫(Δf)²";
const I_MC: &str = "Monte Carlo estimate agrees with the exact Gaussian integral";

fn integral_residual(lhs: &ExactIntegral, rhs: &ExactIntegral) -> qc_core::Result<Residual> {
    Ok(Residual::exact(&lhs.sub(rhs)?.coeff))
}

fn group_integral_units<'a>(cfg: &'a SuiteConfig, units: &mut Vec<Unit<'a>>) {
    let seed = suite_seed(cfg.seed, Suite::GroupIntegral);
    let model = match build_group_model(cfg.n) {
        Ok(m) => std::sync::Arc::new(m),
        Err(e) => {
            let msg = e.to_string();
            units.push(Box::new(move || vec![CheckRecord::error("group-integral.model", "", msg.clone())]));
            return;
        }
    };
    let bound = rat(cfg.n as i64 + 1, cfg.n as i64);
    for i in 0..cfg.trials {
        let m = model.clone();
        let bound = bound.clone();
        units.push(Box::new(move || gauss_unit(cfg, &m, i, seed, &bound)));
    }
}

fn gauss_unit(cfg: &SuiteConfig, m: &GroupModel, i: usize, seed: u64, bound: &Rational) -> Vec<CheckRecord> {
    let id = |name: &str| format!("group-integral.{name}.{i:04}");
    let p = random_poly(&mut rng_for(seed, i as u64), m.coord_count(), cfg.degree, 5);
    let a = default_rates()[i % 3].clone();
    let f = match GaussFn::new(p, a.clone()) {
        Ok(f) => f,
        Err(e) => return vec![CheckRecord::error(id("vertical-split"), I_SPLIT, e.to_string())],
    };
    let r = match analyze_gauss(m, &f) {
        Ok(r) => r,
        Err(e) => return vec![CheckRecord::error(id("vertical-split"), I_SPLIT, e.to_string())],
    };
    let mut out = Vec::new();
    for (name, anchor, check) in [
        ("vertical-split", I_SPLIT, &r.vertical_split),
        ("vertical-torsion", I_TORSION, &r.vertical_torsion),
        ("combined", I_COMB, &r.combined),
        ("vertical-trace", I_VERT, &r.vert),
        ("bochner", I_BOCH, &r.bochner),
    ] {
        out.push(residual_check(id(name), anchor, integral_residual(&check.lhs, &check.rhs)));
    }
    out.push(residual_check(id("divergence"), I_DIV, Ok(Residual::exact(&r.divergence.coeff))));
    out.push(match &r.ratio {
        HessianRatio::Defined(q) => {
            CheckRecord::new(id("hessian-bound"), I_BOUND, q <= bound, Residual::exact(q), format!("ratio ≤ {bound}"))
        }
        HessianRatio::Undefined => CheckRecord::new(
            id("hessian-bound"),
            I_BOUND,
            true,
            Residual::ExactZero,
            "Δf ≡ 0, ratio undefined",
        ),
    });

    let jets = FloatJetEvaluator::new(m, &f);
    let b = &a * rat(2, 1);
    let est = mc_integrate_many(
        m,
        &b,
        4,
        |x: &[f64], o: &mut [f64]| {
            let j = jets.eval(x);
            o[0] = j.hess_sq();
            o[1] = j.lap_sq();
            o[2] = j.xi_sq();
            o[3] = jets.vertical_hess(&j);
        },
        cfg.samples,
        seed ^ (i as u64).wrapping_mul(0x2545_f491_4f6c_dd1d),
    );
    let names = ["mc-hess-sq", "mc-lap-sq", "mc-xi-sq", "mc-vertical"];
    match est {
        Ok(est) => {
            for ((name, e), exact) in names.iter().zip(est).zip([&r.hess_sq, &r.lap_sq, &r.xi_sq, &r.vertical_hess]) {
                let x = exact.to_f64();
                let z = if e.std_error > 0.0 {
                    (e.estimate - x).abs() / e.std_error
                } else if e.estimate == x {
                    0.0
                } else {
                    f64::INFINITY
                };
                let detail = format!("estimate {:.6e}, exact {:.6e}, {} SE allowed", e.estimate, x, cfg.mc_sigma);
                out.push(CheckRecord::new(id(name), I_MC, z <= cfg.mc_sigma, Residual::float(z), detail));
            }
        }
        Err(e) => {
            for name in names {
                out.push(CheckRecord::error(id(name), I_MC, e.to_string()));
            }
        }
    }
    out
}

// ----------------------------------------------------------------- sphere

const S_SUB: &str = "Δx_A = 4n x_A on the sphere";
const S_RIEM: &str = "Δ^g x_A = (4n+3) x_A on the sphere";
const S_REEB: &str = "ξ_s² x_A = -x_A";
const S_ROUTE: &str = "Δ^g f + Σ(ξ_s)² f = -tr ∇²f";
const S_HESS: &str = "∇²f = -f g - Σ(ξ_s f) ω_s for coordinate functions";
const S_VERT: &str = "∫Σ(ξ_s f)² / ∫f² = 3";
const S_HOR: &str = "∫|∇f|² / ∫f² = 4n";
const S_RIEMQ: &str = "∫|∇^g f|² / ∫f² = 4n+3";
const S_SUM: &str = "4n+3 = 4n + 3";

fn sphere_units<'a>(cfg: &'a SuiteConfig, units: &mut Vec<Unit<'a>>) {
    let seed = suite_seed(cfg.seed, Suite::Sphere);
    let model = match build_sphere_model(cfg.n).and_then(|m| m.with_step(cfg.fd_step)) {
        Ok(m) => std::sync::Arc::new(m),
        Err(e) => {
            let msg = e.to_string();
            units.push(Box::new(move || vec![CheckRecord::error("sphere.model", "", msg.clone())]));
            return;
        }
    };
    // pointwise checks are reduced to one record each after the parallel map
    let m = model.clone();
    units.push(Box::new(move || sphere_pointwise(cfg, &m, seed)));
    let m = model.clone();
    units.push(Box::new(move || sphere_ratios(cfg, &m, seed)));
}

fn sphere_pointwise(cfg: &SuiteConfig, m: &SphereModel, seed: u64) -> Vec<CheckRecord> {
    let n = m.n() as f64;
    let per_point: Vec<qc_core::Result<[f64; 5]>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let x = random_unit_point(&mut rng_for(seed, i), m.ambient_dim());
            let mut w = [0.0f64; 5];
            for a in 0..m.ambient_dim() {
                let f = coordinate(a);
                let routes = sub_laplacian_routes(m, &f, &x)?;
                w[0] = w[0].max((routes.route_a - 4.0 * n * x[a]).abs());
                w[3] = w[3].max((routes.route_a - routes.route_b).abs());
                let lg = riemannian_laplacian_at(m, &f, &x)?;
                w[1] = w[1].max((lg - (4.0 * n + 3.0) * x[a]).abs());
                for s in 1..=3 {
                    w[2] = w[2].max((reeb_second_derivative(m, &f, &x, s)? + x[a]).abs());
                }
                let h = coordinate_hessian_residual(m, a, &x)?;
                w[4] = w[4].max(h.full).max(h.part3).max(h.partm1);
            }
            Ok(w)
        })
        .collect();
    let specs = [
        ("sphere.sub-laplacian-eigen", S_SUB, cfg.tol),
        ("sphere.riemannian-eigen", S_RIEM, cfg.riem_tol),
        ("sphere.reeb-second-derivative", S_REEB, cfg.reeb_tol),
        ("sphere.route-agreement", S_ROUTE, cfg.tol),
        ("sphere.equality-hessian", S_HESS, cfg.tol),
    ];
    let mut worst = [0.0f64; 5];
    for r in per_point {
        match r {
            Ok(w) => {
                for k in 0..5 {
                    worst[k] = worst[k].max(w[k]);
                }
            }
            Err(e) => return specs.iter().map(|(id, a, _)| CheckRecord::error(*id, a, e.to_string())).collect(),
        }
    }
    specs
        .iter()
        .zip(worst)
        .map(|((id, anchor, tol), w)| {
            let detail = format!("max over {} points and all coordinates, tolerance {tol:e}", cfg.trials);
            CheckRecord::new(*id, anchor, w <= *tol, Residual::float(w), detail)
        })
        .collect()
}

fn sphere_ratios(cfg: &SuiteConfig, m: &SphereModel, seed: u64) -> Vec<CheckRecord> {
    let n = m.n() as f64;
    let specs = [
        ("sphere.ratio.vertical", S_VERT, 3.0),
        ("sphere.ratio.horizontal", S_HOR, 4.0 * n),
        ("sphere.ratio.riemannian", S_RIEMQ, 4.0 * n + 3.0),
        ("sphere.ratio.sum", S_SUM, 4.0 * n + 3.0),
    ];
    let r = match sphere_ratios_mc(m, 0, cfg.samples, seed ^ 0x7) {
        Ok(r) => r,
        Err(e) => return specs.iter().map(|(id, a, _)| CheckRecord::error(*id, a, e.to_string())).collect(),
    };
    let values = [
        r.vertical_energy_ratio,
        r.rayleigh_quotient,
        r.riemannian_rayleigh,
        r.rayleigh_quotient + r.vertical_energy_ratio,
    ];
    specs
        .iter()
        .zip(values)
        .map(|((id, anchor, target), v)| {
            let rel = ((v - target) / target).abs();
            let detail = format!("value {v:.6}, target {target}, {} samples", r.samples);
            CheckRecord::new(*id, anchor, rel <= cfg.ratio_tol, Residual::float(rel), detail)
        })
        .collect()
}

// -------------------------------------------------------------- constants

const C_LICH: &str = "n k₀/(n+2) = 4n at k₀ = 4(n+2)";
const C_RECIP: &str = "c_n² · n/(n+1) = 1";
const C_PMAX: &str = "p_max = 2 + (n + n√(16n²+8n-3))/(4n²+2n-1)";

fn constants_units<'a>(cfg: &'a SuiteConfig, units: &mut Vec<Unit<'a>>) {
    for n in 2..=cfg.n.max(10) {
        units.push(Box::new(move || constants_unit(n)));
    }
}

fn constants_unit(n: usize) -> Vec<CheckRecord> {
    let id = |name: &str| format!("constants.n{n:02}.{name}");
    let ni = n as i64;
    let mut out = Vec::new();
    let k0 = rat(4 * (ni + 2), 1);
    out.push(match lichnerowicz_bound(n, &k0) {
        Ok(v) => exact_check(id("lichnerowicz"), C_LICH, (v - rat(4 * ni, 1)).abs_value(), ""),
        Err(e) => CheckRecord::error(id("lichnerowicz"), C_LICH, e.to_string()),
    });
    let k = match closed_form_constants(n) {
        Ok(k) => k,
        Err(e) => {
            out.push(CheckRecord::error(id("reciprocal"), C_RECIP, e.to_string()));
            return out;
        }
    };
    let recip = (&k.cn_sq * &k.hess_coeff - rat(1, 1)).abs_value();
    out.push(exact_check(id("reciprocal"), C_RECIP, recip, ""));
    let r = 16 * n * n + 8 * n - 3;
    let nf = n as f64;
    let expect = 2.0 + (nf + nf * (r as f64).sqrt()) / (4.0 * nf * nf + 2.0 * nf - 1.0);
    let gap = (k.p_max.value - expect).abs();
    out.push(CheckRecord::new(
        id("p-max"),
        C_PMAX,
        k.p_max.radicand as usize == r && gap <= 1e-12 && k.p_max.value > 2.0,
        Residual::float(gap),
        format!("radicand {}, value {:.12}", k.p_max.radicand, k.p_max.value),
    ));
    for (prefix, report) in [("bochner", bochner_coefficient_check(n)), ("hessian", hessian_coefficient_check(n))] {
        match report {
            Ok(rep) => {
                for c in rep.checks {
                    let name = format!("{prefix}.{}", c.id);
                    let detail = format!("derived {}, expected {}", c.derived, c.expected);
                    let residual = if c.passed { rat(0, 1) } else { (&c.derived - &c.expected).abs_value() };
                    out.push(CheckRecord::new(id(&name), &c.description, c.passed, Residual::exact(&residual), detail));
                }
            }
            Err(e) => out.push(CheckRecord::error(id(prefix), "", e.to_string())),
        }
    }
    out
}
