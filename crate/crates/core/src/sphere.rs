//! The round 3-Sasakian sphere `S^{4n+3} ⊂ R^{4n+4}` in floating point.
//!
//! `ξ_s(x) = J_s x`, `η_s = ⟨J_s x, ·⟩`, `ω_s(X, Y) = ⟨J_s X, Y⟩`, so that
//! `dη_s = 2ω_s` as on the flat model. The horizontal space at `x` is the
//! orthogonal complement of `{x, J_1 x, J_2 x, J_3 x}`.
//!
//! Frames near a point are extended by projecting the same ambient basis
//! vectors onto nearby horizontal spaces and orthonormalizing them in a fixed
//! pivot order, which makes `e_a(e_b f)` and `∇^g_{e_a} e_b` well defined.
//! The Biquard connection agrees with the horizontal part of Levi-Civita on
//! horizontal arguments (its torsion is vertical there) and `∇_{ξ_s} ξ_s = 0`.
//!
//! Step sizes: first derivatives use central differences with `h = 1e-4`
//! (truncation `O(h²) ≈ 1e-8`); nested differences for the Hessian amplify
//! roundoff to about `ε/h² ≈ 1e-8`, well inside the `1e-4` tolerance. Second
//! derivatives along great circles use the fourth-order five-point stencil
//! with `k = 1e-2`: truncation `k⁴/90 ≈ 1e-10`, roundoff `≈ 5ε/k² ≈ 1e-11`. A
//! three-point stencil at `1e-4` would sit at a roundoff floor near `4e-8`.

use crate::decomp::hessian_sp_decompose;
use crate::error::{QcError, Result};
use crate::matrix::Mat;
use crate::quat::{make_hypercomplex_triple, omega_form, BilinearForm, HypercomplexTriple};
use crate::random::rng_for;
use crate::scalar::{rat, Rational};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Ambient function on a neighbourhood of the sphere.
pub type AmbientFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_CIRCLE_STEP: f64 = 1e-2;
pub const ROUTE_TOL: f64 = 1e-4;
const UNIT_TOL: f64 = 1e-12;
const PIVOT_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SphereModel {
    n: usize,
    j: [Mat<f64>; 3],
    step: f64,
    circle_step: f64,
    /// normalized qc scalar curvature
    pub scalar_s: Rational,
    /// `Ric = ric_factor · g`
    pub ric_factor: Rational,
    pub k0: Rational,
    pub riemannian_scalar: Rational,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.dim()).map(|r| (0..m.dim()).map(|c| m.get(r, c) * v[c]).sum()).collect()
}

/// `x cos t + v sin t`.
fn great_circle(x: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    let (s, c) = t.sin_cos();
    x.iter().zip(v).map(|(a, b)| a * c + b * s).collect()
}

pub fn build_sphere_model(n: usize) -> Result<SphereModel> {
    if n < 2 {
        return Err(QcError::Invalid(format!(
            "sphere model needs n >= 2 (dimension 4n+3 > 7), got n = {n}"
        )));
    }
    let t = make_hypercomplex_triple(n + 1)?.to_f64();
    let ni = n as i64;
    let m = SphereModel {
        n,
        j: [t.i(1).clone(), t.i(2).clone(), t.i(3).clone()],
        step: DEFAULT_STEP,
        circle_step: DEFAULT_CIRCLE_STEP,
        scalar_s: rat(2, 1),
        ric_factor: rat(4 * (ni + 2), 1),
        k0: rat(4 * (ni + 2), 1),
        riemannian_scalar: rat((4 * ni + 2) * (4 * ni + 3), 1),
    };
    for i in 0..100 {
        let x = random_unit_point(&mut rng_for(0x5eed, i), m.ambient_dim());
        let defect = m.reeb_defect(&x);
        if defect > 1e-12 {
            return Err(QcError::Invalid(format!("Reeb fields not orthonormal at sample {i}: {defect:e}")));
        }
        let frame = horizontal_frame_at(&m, &x)?;
        if frame.vectors.len() != 4 * n {
            return Err(QcError::Invalid(format!("horizontal rank {} at sample {i}", frame.vectors.len())));
        }
    }
    Ok(m)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 0.1) {
        return Err(QcError::Invalid(format!("finite-difference step {h} out of range")));
    }
    Ok(())
}

/// Uniform point on the unit sphere of `R^dim`.
pub fn random_unit_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = dot(&v, &v).sqrt();
        if r > 1e-8 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

impl SphereModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        4 * self.n + 4
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn circle_step(&self) -> f64 {
        self.circle_step
    }

    /// Step for first and nested derivatives.
    pub fn with_step(mut self, h: f64) -> Result<Self> {
        check_step(h)?;
        self.step = h;
        Ok(self)
    }

    /// Step for the five-point second derivatives along great circles.
    pub fn with_circle_step(mut self, k: f64) -> Result<Self> {
        check_step(k)?;
        self.circle_step = k;
        Ok(self)
    }

    pub fn j(&self, s: usize) -> Result<&Mat<f64>> {
        if !(1..=3).contains(&s) {
            return Err(QcError::StructureIndex(s));
        }
        Ok(&self.j[s - 1])
    }

    /// `ξ_s(x) = J_s x`.
    pub fn reeb_at(&self, x: &[f64], s: usize) -> Result<Vec<f64>> {
        Ok(mat_vec(self.j(s)?, x))
    }

    fn reebs(&self, x: &[f64]) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|s| mat_vec(&self.j[s], x))
    }

    /// Largest defect in `|ξ_s| = 1`, `⟨ξ_s, x⟩ = 0`, `⟨ξ_s, ξ_t⟩ = 0`.
    pub fn reeb_defect(&self, x: &[f64]) -> f64 {
        let xi = self.reebs(x);
        let mut worst: f64 = 0.0;
        for s in 0..3 {
            worst = worst.max((dot(&xi[s], &xi[s]) - 1.0).abs());
            worst = worst.max(dot(&xi[s], x).abs());
            for t in s + 1..3 {
                worst = worst.max(dot(&xi[s], &xi[t]).abs());
            }
        }
        worst
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(QcError::Mismatch { expected: self.ambient_dim(), got: x.len() });
        }
        let r = dot(x, x);
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(QcError::OffSphere(r));
        }
        Ok(())
    }

    /// Projection of `v` onto `H_y`.
    fn project_h(&self, y: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        let yy = dot(y, y);
        axpy(&mut out, -dot(v, y) / yy, y);
        for xi in self.reebs(y) {
            axpy(&mut out, -dot(v, &xi) / yy, &xi);
        }
        out
    }

    /// Trace of the projector onto `H_x`.
    pub fn horizontal_projector_trace(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let d = self.ambient_dim();
        Ok((0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                self.project_h(x, &e)[i]
            })
            .sum())
    }
}

/// Orthonormal frame of `H_x` with the restricted complex structures.
#[derive(Clone, Debug)]
pub struct HorizontalFrameAtPoint {
    pub x: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ambient basis indices in the order they were orthonormalized
    pub pivots: Vec<usize>,
    /// `I_s` in the frame: column `b` holds the coordinates of `I_s e_b`
    pub triple: HypercomplexTriple<f64>,
}

impl HorizontalFrameAtPoint {
    pub fn max_orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, u) in self.vectors.iter().enumerate() {
            for (b, v) in self.vectors.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(u, v) - target).abs());
            }
        }
        worst
    }
}

fn gram_schmidt_step(basis: &[Vec<f64>], mut v: Vec<f64>) -> (Vec<f64>, f64) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(&v, b);
            axpy(&mut v, -c, b);
        }
    }
    let r = dot(&v, &v).sqrt();
    (v, r)
}

/// Frame at `x` by greedy pivoted Gram-Schmidt on the projected ambient basis.
pub fn horizontal_frame_at(m: &SphereModel, x: &[f64]) -> Result<HorizontalFrameAtPoint> {
    m.check_point(x)?;
    let d = m.ambient_dim();
    let projected: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            m.project_h(x, &e)
        })
        .collect();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(4 * m.n);
    let mut pivots = Vec::with_capacity(4 * m.n);
    let mut used = vec![false; d];
    for _ in 0..4 * m.n {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for i in (0..d).filter(|&i| !used[i]) {
            let (v, r) = gram_schmidt_step(&vectors, projected[i].clone());
            if best.as_ref().is_none_or(|(_, _, br)| r > *br) {
                best = Some((i, v, r));
            }
        }
        let (i, v, r) = best.ok_or(QcError::SingularPivot(0.0))?;
        if r < PIVOT_FLOOR {
            return Err(QcError::SingularPivot(r));
        }
        used[i] = true;
        pivots.push(i);
        vectors.push(v.into_iter().map(|c| c / r).collect());
    }
    let triple = restricted_triple(m, &vectors)?;
    Ok(HorizontalFrameAtPoint { x: x.to_vec(), vectors, pivots, triple })
}

fn restricted_triple(m: &SphereModel, vectors: &[Vec<f64>]) -> Result<HypercomplexTriple<f64>> {
    let h = vectors.len();
    let mats = [0, 1, 2].map(|s| {
        let images: Vec<Vec<f64>> = vectors.iter().map(|v| mat_vec(&m.j[s], v)).collect();
        Mat::from_fn(h, |a, b| dot(&vectors[a], &images[b]))
    });
    HypercomplexTriple::from_matrices(m.n, mats)
}

/// Frame at a nearby point `y` using a fixed pivot order.
fn extended_frame(m: &SphereModel, y: &[f64], pivots: &[usize]) -> Result<Vec<Vec<f64>>> {
    let d = m.ambient_dim();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(pivots.len());
    for &i in pivots {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let (v, r) = gram_schmidt_step(&vectors, m.project_h(y, &e));
        if r < PIVOT_FLOOR {
            return Err(QcError::SingularPivot(r));
        }
        vectors.push(v.into_iter().map(|c| c / r).collect());
    }
    Ok(vectors)
}

/// `df_y(v)` by an ambient central difference.
fn directional(f: AmbientFn, y: &[f64], v: &[f64], h: f64) -> f64 {
    let plus: Vec<f64> = y.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = y.iter().zip(v).map(|(a, b)| a - h * b).collect();
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// `d²/dt² f(x cos t + v sin t)` at `t = 0`, five-point stencil.
fn circle_second_derivative(f: AmbientFn, x: &[f64], v: &[f64], k: f64) -> f64 {
    let at = |t: f64| f(&great_circle(x, v, t));
    (-at(2.0 * k) + 16.0 * at(k) - 30.0 * f(x) + 16.0 * at(-k) - at(-2.0 * k)) / (12.0 * k * k)
}

/// `Δ^g f(x)` (positive sign) from geodesic second differences over a full
/// orthonormal tangent frame.
pub fn riemannian_laplacian_at(m: &SphereModel, f: AmbientFn, x: &[f64]) -> Result<f64> {
    let frame = horizontal_frame_at(m, x)?;
    let mut acc = 0.0;
    for v in frame.vectors.iter().chain(m.reebs(x).iter()) {
        acc += circle_second_derivative(f, x, v, m.circle_step);
    }
    Ok(-acc)
}

/// `ξ_s² f(x)` along the Reeb circle `x cos h + J_s x sin h`.
pub fn reeb_second_derivative(m: &SphereModel, f: AmbientFn, x: &[f64], s: usize) -> Result<f64> {
    m.check_point(x)?;
    let xi = m.reeb_at(x, s)?;
    Ok(circle_second_derivative(f, x, &xi, m.circle_step))
}

/// Horizontal Biquard Hessian in the frame of [`horizontal_frame_at`]:
/// entry `(a, b) = e_a(e_b f) - df((∇^g_{e_a} e_b)_H)`.
pub fn biquard_horizontal_hessian_at(m: &SphereModel, f: AmbientFn, x: &[f64]) -> Result<(HorizontalFrameAtPoint, Mat<f64>)> {
    let frame = horizontal_frame_at(m, x)?;
    let h = m.step;
    let dim_h = frame.vectors.len();
    let phi_x: Vec<f64> = frame.vectors.iter().map(|e| directional(f, x, e, h)).collect();
    let mut hess = Mat::zeros(dim_h);
    for (a, ea) in frame.vectors.iter().enumerate() {
        let yp = great_circle(x, ea, h);
        let ym = great_circle(x, ea, -h);
        let fp = extended_frame(m, &yp, &frame.pivots)?;
        let fm = extended_frame(m, &ym, &frame.pivots)?;
        for b in 0..dim_h {
            let mixed = (directional(f, &yp, &fp[b], h) - directional(f, &ym, &fm[b], h)) / (2.0 * h);
            let deriv: Vec<f64> = fp[b].iter().zip(&fm[b]).map(|(p, q)| (p - q) / (2.0 * h)).collect();
            let correction: f64 = frame.vectors.iter().zip(&phi_x).map(|(ec, pc)| dot(&deriv, ec) * pc).sum();
            hess.set(a, b, mixed - correction);
        }
    }
    Ok((frame, hess))
}

/// `Δf(x)` by both routes: A is `Δ^g f + Σ ξ_s² f`, B is minus the trace of
/// the Biquard horizontal Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubLaplacianRoutes {
    pub route_a: f64,
    pub route_b: f64,
}

pub fn sub_laplacian_routes(m: &SphereModel, f: AmbientFn, x: &[f64]) -> Result<SubLaplacianRoutes> {
    let lap_g = riemannian_laplacian_at(m, f, x)?;
    let mut reeb = 0.0;
    for s in 1..=3 {
        reeb += reeb_second_derivative(m, f, x, s)?;
    }
    let (_, hess) = biquard_horizontal_hessian_at(m, f, x)?;
    Ok(SubLaplacianRoutes { route_a: lap_g + reeb, route_b: -hess.trace() })
}

/// `Δf(x)`; errors when the two routes differ by more than [`ROUTE_TOL`].
pub fn sub_laplacian_at(m: &SphereModel, f: AmbientFn, x: &[f64]) -> Result<f64> {
    let r = sub_laplacian_routes(m, f, x)?;
    let diff = (r.route_a - r.route_b).abs();
    if diff > ROUTE_TOL {
        return Err(QcError::RouteDisagreement { diff, tol: ROUTE_TOL });
    }
    Ok(r.route_a)
}

/// Coordinate function `x ↦ x_A`.
pub fn coordinate(a: usize) -> impl Fn(&[f64]) -> f64 + Sync {
    move |x: &[f64]| x[a]
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub coordinate: usize,
    pub eigenvalue: f64,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

pub const EIGEN_TOL: f64 = 1e-4;

/// `max |Δx_A - 4n x_A|` over random points.
pub fn verify_eigenfunction(m: &SphereModel, a: usize, samples: usize, seed: u64) -> Result<EigenReport> {
    verify_eigenvalue_claim(m, a, 4.0 * m.n as f64, samples, seed)
}

/// `max |Δx_A - λ x_A|` over random points.
pub fn verify_eigenvalue_claim(m: &SphereModel, a: usize, lambda: f64, samples: usize, seed: u64) -> Result<EigenReport> {
    if a >= m.ambient_dim() {
        return Err(QcError::Mismatch { expected: m.ambient_dim(), got: a });
    }
    if samples == 0 {
        return Err(QcError::SampleCount { min: 1, got: 0 });
    }
    let f = coordinate(a);
    let residuals: Result<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = random_unit_point(&mut rng_for(seed, i as u64), m.ambient_dim());
            let lap = sub_laplacian_at(m, &f, &x)?;
            Ok((lap - lambda * x[a]).abs())
        })
        .collect();
    let max_residual = residuals?.into_iter().fold(0.0, f64::max);
    Ok(EigenReport { coordinate: a, eigenvalue: lambda, samples, max_residual, passed: max_residual <= EIGEN_TOL })
}

/// Residuals of the equality-case Hessian `∇²f = -f g - Σ(ξ_s f) ω_s` for a
/// coordinate function, entrywise and after the `[3]`/`[-1]` split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HessianSplitResidual {
    pub full: f64,
    pub part3: f64,
    pub partm1: f64,
}

pub fn coordinate_hessian_residual(m: &SphereModel, a: usize, x: &[f64]) -> Result<HessianSplitResidual> {
    if a >= m.ambient_dim() {
        return Err(QcError::Mismatch { expected: m.ambient_dim(), got: a });
    }
    let f = coordinate(a);
    let (frame, hess) = biquard_horizontal_hessian_at(m, &f, x)?;
    let t = &frame.triple;
    let g = Mat::<f64>::identity(4 * m.n);
    let xi = m.reebs(x);
    let mut vertical = Mat::zeros(4 * m.n);
    for s in 1..=3 {
        let w = omega_form(t, s)?;
        vertical = vertical.add(&w.matrix().scale_by(&xi[s - 1][a]));
    }
    let expected3 = g.scale_by(&-x[a]);
    let expected_m1 = vertical.neg();
    let split = hessian_sp_decompose(t, &BilinearForm::new(m.n, hess.clone())?)?;
    Ok(HessianSplitResidual {
        full: hess.sub(&expected3.add(&expected_m1)).max_abs(),
        part3: split.part3.matrix().sub(&expected3).max_abs(),
        partm1: split.partm1.matrix().sub(&expected_m1).max_abs(),
    })
}

/// Ratios of Monte Carlo averages over the round measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereRatios {
    /// `∫Σ(ξ_s f)² / ∫f²`
    pub vertical_energy_ratio: f64,
    /// `∫|∇_H f|² / ∫f²`
    pub rayleigh_quotient: f64,
    /// `∫|∇^g f|² / ∫f²`
    pub riemannian_rayleigh: f64,
    pub samples: usize,
}

pub const SPHERE_MC_MIN_SAMPLES: usize = 100_000;
const SPHERE_CHUNK: usize = 8192;

/// `(f², Σ(ξ_s f)², |∇_H f|², |∇^g f|²)` at `x` from an FD ambient gradient.
pub fn gradient_energies(m: &SphereModel, f: AmbientFn, x: &[f64]) -> [f64; 4] {
    let d = m.ambient_dim();
    let h = m.step;
    let mut grad = vec![0.0; d];
    let mut y = x.to_vec();
    for i in 0..d {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    let radial = dot(&grad, x);
    let riem = dot(&grad, &grad) - radial * radial;
    let vert: f64 = m.reebs(x).iter().map(|xi| dot(&grad, xi).powi(2)).sum();
    let horizontal = m.project_h(x, &grad);
    let v = f(x);
    [v * v, vert, dot(&horizontal, &horizontal), riem]
}

/// MC ratios for `f = x_A`; expected `(3, 4n, 4n+3)`.
pub fn sphere_ratios_mc(m: &SphereModel, a: usize, samples: usize, seed: u64) -> Result<SphereRatios> {
    if a >= m.ambient_dim() {
        return Err(QcError::Mismatch { expected: m.ambient_dim(), got: a });
    }
    sphere_ratios_mc_fn(m, &coordinate(a), samples, seed)
}

pub fn sphere_ratios_mc_fn(m: &SphereModel, f: AmbientFn, samples: usize, seed: u64) -> Result<SphereRatios> {
    if samples < SPHERE_MC_MIN_SAMPLES {
        return Err(QcError::SampleCount { min: SPHERE_MC_MIN_SAMPLES, got: samples });
    }
    let chunks = samples.div_ceil(SPHERE_CHUNK);
    let sums: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let count = SPHERE_CHUNK.min(samples - c * SPHERE_CHUNK);
            let mut acc = [0.0; 4];
            for _ in 0..count {
                let x = random_unit_point(&mut rng, m.ambient_dim());
                for (t, e) in acc.iter_mut().zip(gradient_energies(m, f, &x)) {
                    *t += e;
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; 4];
    for s in &sums {
        for (t, v) in total.iter_mut().zip(s) {
            *t += v;
        }
    }
    if total[0] == 0.0 {
        return Err(QcError::Invalid("f vanishes on every sample".into()));
    }
    Ok(SphereRatios {
        vertical_energy_ratio: total[1] / total[0],
        rayleigh_quotient: total[2] / total[0],
        riemannian_rayleigh: total[3] / total[0],
        samples,
    })
}
