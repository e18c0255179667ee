//! Strict plurisubharmonicity of `K`-invariant extensions of convex
//! `W`-invariant functions on `omega`.
//!
//! Coordinates on `a` are ambient frame coordinates in radians; the metric is
//! `c * |H|^2` with `c = metric_scale`. Matrices on `a` are written in the
//! metric-orthonormal basis [`metric_basis`].
//!
//! The Levi form at `xi0 in a` has three blocks:
//! the Hessian of `u` on `a`, a zero cross block, and on the root directions
//! `(a cot a)(b cot b) Hess(u - u0)(xi0)`, where `u0` is the linear function
//! given by the gradient of `u` at `xi0`. The Hessian of the invariant
//! extension in the root direction of `alpha` is `du(alpha#) / alpha(xi0)`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use crate::catalog::{RestrictedRootDatum, SpaceKind};
use crate::domain::{omega_polytope, sup_norm_f64};
use crate::error::{Error, Result};
use crate::exact::{dot, to_f64, vec_to_f64, Rational};
use crate::linalg::{orthonormal_columns, pd_certificate, PdCertificate};
use crate::matrix_oracle::{bracket, inner, realize, CMat, MatrixAlgebra};

const Q2: f64 = FRAC_PI_2 * FRAC_PI_2;

/// Finite-difference step on `p` for the chart route.
pub const FD_STEP: f64 = 1e-5;

/// Below this `|alpha(xi0)|` the root-direction entry uses its limit.
const REGULAR_TOL: f64 = 1e-6;

fn f1(x: f64) -> f64 {
    let d = Q2 - x * x;
    2.0 * x / (d * d)
}

fn f2(x: f64) -> f64 {
    let d = Q2 - x * x;
    2.0 * (Q2 + 3.0 * x * x) / (d * d * d)
}

/// `x cot x`, extended by `1` at `0`.
pub fn xcot(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tan()
    }
}

fn roots_f64(datum: &RestrictedRootDatum) -> Vec<(Vec<f64>, f64)> {
    datum
        .root_system
        .roots
        .iter()
        .map(|r| (vec_to_f64(r.vector.coords()), f64::from(r.mult)))
        .collect()
}

fn eval(alpha: &[f64], x: &[f64]) -> f64 {
    alpha.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// `Err(OutsideDomain)` unless every `|alpha(xi)| < pi/2`.
pub fn check_inside(datum: &RestrictedRootDatum, xi: &[f64]) -> Result<()> {
    for r in &datum.root_system.roots {
        let v = r.vector.eval_f64(xi);
        if v.abs() >= FRAC_PI_2 {
            return Err(Error::OutsideDomain {
                root: r.vector.to_string(),
                value: v.abs(),
            });
        }
    }
    Ok(())
}

/// `u(xi) = sum_alpha m_alpha / ((pi/2)^2 - alpha(xi)^2)` over all roots.
pub fn corollary_u(datum: &RestrictedRootDatum, xi: &[f64]) -> Result<f64> {
    check_inside(datum, xi)?;
    Ok(roots_f64(datum)
        .iter()
        .map(|(a, m)| {
            let x = eval(a, xi);
            m / (Q2 - x * x)
        })
        .sum())
}

/// Euclidean gradient of `u` in ambient coordinates.
fn euclidean_gradient(datum: &RestrictedRootDatum, xi: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; datum.root_system.ambient_dim];
    for (a, m) in roots_f64(datum) {
        let w = m * f1(eval(&a, xi));
        for (gi, ai) in g.iter_mut().zip(&a) {
            *gi += w * ai;
        }
    }
    g
}

/// The gradient of `u` at a base point, in both of its roles.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientRecord {
    pub base_point: Vec<f64>,
    /// Metric gradient, ambient coordinates.
    pub gradient_vector: Vec<f64>,
    /// Euclidean coefficients of `xi -> <gradient_vector, xi>_metric`.
    pub linear_functional: Vec<f64>,
}

impl GradientRecord {
    pub fn eval(&self, xi: &[f64]) -> f64 {
        eval(&self.linear_functional, xi)
    }
}

pub fn gradient_record(datum: &RestrictedRootDatum, xi0: &[f64]) -> Result<GradientRecord> {
    check_inside(datum, xi0)?;
    let c = to_f64(&datum.metric_scale);
    let lin = euclidean_gradient(datum, xi0);
    Ok(GradientRecord {
        base_point: xi0.to_vec(),
        gradient_vector: lin.iter().map(|x| x / c).collect(),
        linear_functional: lin,
    })
}

/// Columns: metric-orthonormal basis of the root span, ambient coordinates.
pub fn metric_basis(datum: &RestrictedRootDatum) -> DMatrix<f64> {
    let span = datum.root_system.span_basis();
    let amb = datum.root_system.ambient_dim;
    let cols = DMatrix::from_fn(amb, span.len(), |i, k| to_f64(&span[k][i]));
    orthonormal_columns(&cols) / to_f64(&datum.metric_scale).sqrt()
}

/// `Hess u` on `a`, metric-orthonormal basis.
pub fn hessian_u(datum: &RestrictedRootDatum, xi: &[f64]) -> Result<DMatrix<f64>> {
    check_inside(datum, xi)?;
    let b = metric_basis(datum);
    let amb = b.nrows();
    let mut h = DMatrix::zeros(amb, amb);
    for (a, m) in roots_f64(datum) {
        let av = DVector::from_vec(a);
        h += &av * av.transpose() * (m * f2(av.dot(&DVector::from_column_slice(xi))));
    }
    Ok(b.transpose() * h * &b)
}

/// A function on `a` in ambient frame coordinates.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum InvariantFunction {
    CorollaryU,
    /// Caller asserts `W`-invariance and convexity on `omega`.
    Custom(ScalarFn),
}

impl std::fmt::Debug for InvariantFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantFunction::CorollaryU => f.write_str("CorollaryU"),
            InvariantFunction::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl InvariantFunction {
    pub fn eval(&self, datum: &RestrictedRootDatum, xi: &[f64]) -> Result<f64> {
        match self {
            InvariantFunction::CorollaryU => corollary_u(datum, xi),
            InvariantFunction::Custom(f) => {
                check_inside(datum, xi)?;
                Ok(f(xi))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeviRoute {
    /// Root data only, closed form.
    ClosedForm,
    /// Finite differences of `u` composed with the oracle's invariant chart.
    OracleChart,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviMatrix {
    pub base_point: Vec<f64>,
    pub matrix: DMatrix<f64>,
    /// Size of the leading `a` block.
    pub a_dim: usize,
    /// Positive root labelling each root direction, repeated by multiplicity.
    pub root_directions: Vec<Vec<Rational>>,
    pub xcot_factors: Vec<f64>,
    /// Largest cross-block entry before it is set to zero (chart route only).
    pub cross_residual: f64,
    pub route: LeviRoute,
}

impl LeviMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn a_block(&self) -> DMatrix<f64> {
        self.matrix.view((0, 0), (self.a_dim, self.a_dim)).into_owned()
    }

    pub fn p_prime_block(&self) -> DMatrix<f64> {
        let n = self.dim() - self.a_dim;
        self.matrix.view((self.a_dim, self.a_dim), (n, n)).into_owned()
    }

    pub fn cross_block(&self) -> DMatrix<f64> {
        let n = self.dim() - self.a_dim;
        self.matrix.view((0, self.a_dim), (self.a_dim, n)).into_owned()
    }

    pub fn certificate(&self) -> PdCertificate {
        pd_certificate(&self.matrix)
    }
}

/// Hessian of the invariant extension of `u` in the unit root direction of `alpha`.
fn root_direction_hessian(datum: &RestrictedRootDatum, alpha: &[Rational], xi0: &[f64]) -> f64 {
    let c = to_f64(&datum.metric_scale);
    let ax = r_eval(alpha, xi0);
    let terms = datum
        .root_system
        .roots
        .iter()
        .map(|b| (f64::from(b.mult), b.vector.eval_f64(xi0), to_f64(&dot(alpha, b.vector.coords()))));
    if ax.abs() < REGULAR_TOL {
        let n2 = to_f64(&dot(alpha, alpha));
        terms.map(|(m, bx, ba)| m * f2(bx) * ba * ba).sum::<f64>() / (c * n2)
    } else {
        terms.map(|(m, bx, ba)| m * f1(bx) * ba).sum::<f64>() / (c * ax)
    }
}

fn root_directions(datum: &RestrictedRootDatum) -> Vec<Vec<Rational>> {
    datum
        .root_system
        .positive_roots()
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.vector.coords().to_vec(), r.mult as usize))
        .collect()
}

/// Closed-form Levi matrix of the invariant extension of [`corollary_u`].
pub fn levi_matrix_closed_form(datum: &RestrictedRootDatum, xi0: &[f64]) -> Result<LeviMatrix> {
    let ha = hessian_u(datum, xi0)?;
    let r = ha.nrows();
    let dirs = root_directions(datum);
    let n = r + dirs.len();
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (r, r)).copy_from(&ha);
    let mut factors = Vec::with_capacity(dirs.len());
    for (k, alpha) in dirs.iter().enumerate() {
        let x = xcot(r_eval(alpha, xi0));
        factors.push(x);
        m[(r + k, r + k)] = x * x * root_direction_hessian(datum, alpha, xi0);
    }
    Ok(LeviMatrix {
        base_point: xi0.to_vec(),
        matrix: m,
        a_dim: r,
        root_directions: dirs,
        xcot_factors: factors,
        cross_residual: 0.0,
        route: LeviRoute::ClosedForm,
    })
}

/// Central second differences, Richardson-extrapolated once.
fn fd_hessian<F: Fn(&DVector<f64>) -> Result<f64>>(f: F, n: usize, h: f64) -> Result<DMatrix<f64>> {
    let x0 = DVector::zeros(n);
    let e = |i: usize, s: f64| {
        let mut v = x0.clone();
        v[i] += s;
        v
    };
    let second = |i: usize, j: usize, h: f64| -> Result<f64> {
        if i == j {
            let (p, c, m) = (f(&e(i, h))?, f(&x0)?, f(&e(i, -h))?);
            Ok((p - 2.0 * c + m) / (h * h))
        } else {
            let pp = f(&(e(i, h) + e(j, h) - &x0))?;
            let pm = f(&(e(i, h) + e(j, -h) - &x0))?;
            let mp = f(&(e(i, -h) + e(j, h) - &x0))?;
            let mm = f(&(e(i, -h) + e(j, -h) - &x0))?;
            Ok((pp - pm - mp + mm) / (4.0 * h * h))
        }
    };
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (4.0 * second(i, j, h)? - second(i, j, 2.0 * h)?) / 3.0;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// `Hess u` on `a` by finite differences along [`metric_basis`].
pub fn hessian_u_fd(u: &InvariantFunction, datum: &RestrictedRootDatum, xi: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let b = metric_basis(datum);
    let x0 = DVector::from_column_slice(xi);
    fd_hessian(
        |y| {
            let x = &x0 + &b * y;
            u.eval(datum, x.as_slice())
        },
        b.ncols(),
        h,
    )
}

/// Matrix of `-ad(H)^2` on `p` in the oracle's orthonormal basis.
fn jacobi_matrix(alg: &MatrixAlgebra, x: &CMat) -> DMatrix<f64> {
    let imgs: Vec<CMat> = alg.p_basis.iter().map(|b| -bracket(x, &bracket(x, b))).collect();
    let d = imgs.len();
    DMatrix::from_fn(d, d, |i, j| inner(&alg.p_basis[i], &imgs[j]))
}

fn coords_in_p(alg: &MatrixAlgebra, x: &CMat) -> DVector<f64> {
    DVector::from_iterator(alg.p_basis.len(), alg.p_basis.iter().map(|b| inner(b, x)))
}

/// Generic `H` in `a` separating the positive roots by `|alpha(H)|`.
fn generic_direction(datum: &RestrictedRootDatum) -> Vec<f64> {
    let b = metric_basis(datum);
    let pos: Vec<Vec<f64>> = datum
        .root_system
        .positive_roots()
        .into_iter()
        .map(|r| vec_to_f64(r.vector.coords()))
        .collect();
    for t in 1..64 {
        let w = DVector::from_fn(b.ncols(), |k, _| ((k as f64 + 2.0) * (t as f64 + 1.0)).sqrt().fract() + 0.5);
        let h: Vec<f64> = (&b * w).iter().copied().collect();
        let mut vals: Vec<f64> = pos.iter().map(|a| eval(a, &h).abs()).collect();
        vals.sort_by(f64::total_cmp);
        let scale = vals.last().copied().unwrap_or(1.0);
        if vals[0] > 1e-3 * scale && vals.windows(2).all(|w| w[1] - w[0] > 1e-3 * scale) {
            return h;
        }
    }
    unreachable!("finitely many hyperplanes")
}

/// Levi matrix with every block read off finite differences of `u` composed
/// with the oracle chart `p -> a / W`.
pub fn levi_matrix_chart(alg: &MatrixAlgebra, datum: &RestrictedRootDatum, u: &InvariantFunction, xi0: &[f64]) -> Result<LeviMatrix> {
    if alg.label.kind == SpaceKind::ConjugateSquare {
        return Err(Error::Unsupported("chart route on a product".into()));
    }
    check_inside(datum, xi0)?;
    let x0 = alg.a_element(xi0);
    let p_dim = alg.p_basis.len();
    let hf = fd_hessian(
        |y| {
            let mut x = x0.clone();
            for (b, c) in alg.p_basis.iter().zip(y.iter()) {
                x += b * Complex64::new(*c, 0.0);
            }
            u.eval(datum, &alg.invariant_chart(&x)?)
        },
        p_dim,
        FD_STEP,
    )?;

    // Columns of `dirs`: metric-unit directions in p-basis coordinates.
    let mb = metric_basis(datum);
    let r = mb.ncols();
    let mut dirs = DMatrix::zeros(p_dim, p_dim);
    let mut unit_norm = 0.0;
    for k in 0..r {
        let col: Vec<f64> = mb.column(k).iter().copied().collect();
        let v = coords_in_p(alg, &alg.a_element(&col));
        unit_norm = v.norm();
        dirs.set_column(k, &v);
    }

    let hg = generic_direction(datum);
    let eig = SymmetricEigen::new(jacobi_matrix(alg, &alg.a_element(&hg)));
    let labels = root_directions(datum);
    let mut next = r;
    let mut used = vec![false; p_dim];
    for root in datum.root_system.positive_roots() {
        let target = {
            let a = r_eval(root.vector.coords(), &hg);
            -a * a
        };
        let mut found = 0;
        for (i, ev) in eig.eigenvalues.iter().enumerate() {
            if !used[i] && (ev - target).abs() <= 1e-7 * target.abs().max(1.0) {
                used[i] = true;
                dirs.set_column(next, &(eig.eigenvectors.column(i) * unit_norm));
                next += 1;
                found += 1;
            }
        }
        if found != root.mult as usize {
            return Err(Error::Oracle(format!(
                "root space of {} has dimension {found}, expected {}",
                root.vector, root.mult
            )));
        }
    }
    let raw = dirs.transpose() * hf * &dirs;
    let n = raw.nrows();
    let mut m = raw.clone();
    let mut cross = 0.0f64;
    for i in 0..r {
        for j in r..n {
            cross = cross.max(raw[(i, j)].abs());
            m[(i, j)] = 0.0;
            m[(j, i)] = 0.0;
        }
    }
    let factors: Vec<f64> = labels.iter().map(|a| xcot(r_eval(a, xi0))).collect();
    for i in r..n {
        for j in r..n {
            m[(i, j)] *= factors[i - r] * factors[j - r];
        }
    }
    Ok(LeviMatrix {
        base_point: xi0.to_vec(),
        matrix: m,
        a_dim: r,
        root_directions: labels,
        xcot_factors: factors,
        cross_residual: cross,
        route: LeviRoute::OracleChart,
    })
}

fn r_eval(a: &[Rational], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(c, v)| to_f64(c) * v).sum()
}

/// Oracle chart where a realization exists; closed form as the fallback for [`corollary_u`].
pub fn levi_matrix(datum: &RestrictedRootDatum, u: &InvariantFunction, xi0: &[f64]) -> Result<LeviMatrix> {
    match realize(&datum.space) {
        Ok(alg) if alg.label.kind == SpaceKind::Irreducible => levi_matrix_chart(&alg, datum, u, xi0),
        _ => match u {
            InvariantFunction::CorollaryU => levi_matrix_closed_form(datum, xi0),
            InvariantFunction::Custom(_) => Err(Error::Unsupported(format!(
                "no matrix realization of {} for a custom function",
                datum.space
            ))),
        },
    }
}

/// `u` along the ray `sH` as `s` approaches the boundary parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustionTrace {
    pub s_star: f64,
    pub samples: Vec<(f64, f64)>,
    pub monotone: bool,
    pub diverged: bool,
}

pub const EXHAUSTION_BOUND: f64 = 1e6;

pub fn exhaustion_trace(datum: &RestrictedRootDatum, h: &[f64]) -> Result<ExhaustionTrace> {
    let sup = sup_norm_f64(datum, h);
    if sup == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s_star = FRAC_PI_2 / sup;
    let at = |s: f64| -> Result<f64> {
        let x: Vec<f64> = h.iter().map(|v| v * s).collect();
        corollary_u(datum, &x)
    };
    let mut samples = Vec::new();
    for i in 0..=16 {
        let s = s_star * f64::from(i) / 20.0;
        samples.push((s, at(s)?));
    }
    let mut k = 1;
    loop {
        let s = s_star * (1.0 - 10f64.powi(-k));
        let v = at(s)?;
        samples.push((s, v));
        if v > EXHAUSTION_BOUND || k >= 14 {
            break;
        }
        k += 1;
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = samples.windows(2).all(|w| w[1].1 > w[0].1);
    let diverged = samples.last().is_some_and(|s| s.1 > EXHAUSTION_BOUND);
    Ok(ExhaustionTrace {
        s_star,
        samples,
        monotone,
        diverged,
    })
}

/// Uniform sample of `shrink * omega` by rejection from a bounding box.
pub fn sample_interior(datum: &RestrictedRootDatum, rng: &mut impl Rng, shrink: f64) -> Result<Vec<f64>> {
    let om = omega_polytope(datum);
    let verts = om
        .vertices
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("sampling needs vertices; rank {}", datum.rank())))?;
    let b = metric_basis(datum);
    let bt = b.transpose() * to_f64(&datum.metric_scale);
    let radius = verts
        .iter()
        .map(|v| {
            let x = DVector::from_vec(vec_to_f64(v)) * std::f64::consts::PI;
            (&bt * x).norm()
        })
        .fold(0.0, f64::max);
    loop {
        let y = DVector::from_fn(b.ncols(), |_, _| rng.gen_range(-radius..radius));
        let x: Vec<f64> = (&b * y).iter().copied().collect();
        if sup_norm_f64(datum, &x) < shrink * FRAC_PI_2 {
            return Ok(x);
        }
    }
}

/// Project onto the wall of a positive root, giving a non-regular point of `omega`.
pub fn project_to_wall(datum: &RestrictedRootDatum, xi: &[f64], root_index: usize) -> Vec<f64> {
    let pos = datum.root_system.positive_roots();
    let a = vec_to_f64(pos[root_index % pos.len()].vector.coords());
    let t = eval(&a, xi) / eval(&a, &a);
    xi.iter().zip(&a).map(|(x, ai)| x - t * ai).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PshFailure {
    pub point: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PshReport {
    pub space: String,
    pub samples: usize,
    pub non_regular: usize,
    pub route: LeviRoute,
    pub min_hessian_eigenvalue: f64,
    pub min_eigenvalue_overall: f64,
    /// Largest `|chart - closed form| / |closed form|` over samples (chart route only).
    pub max_route_discrepancy: f64,
    pub max_cross_residual: f64,
    pub failures: Vec<PshFailure>,
}

impl PshReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "space": self.space,
            "samples": self.samples,
            "non_regular": self.non_regular,
            "route": match self.route { LeviRoute::ClosedForm => "closed_form", LeviRoute::OracleChart => "oracle_chart" },
            "multiplicities": "roots counted with multiplicity",
            "min_hessian_eigenvalue": self.min_hessian_eigenvalue,
            "min_eigenvalue_overall": self.min_eigenvalue_overall,
            "max_route_discrepancy": self.max_route_discrepancy,
            "max_cross_residual": self.max_cross_residual,
            "failures": self.failures.iter().map(|f| json!({"point": f.point, "reason": f.reason})).collect::<Vec<_>>(),
        })
    }
}

/// Relative agreement required between the chart and closed-form Levi matrices.
pub const ROUTE_TOL: f64 = 1e-4;

/// Samples `samples` interior points (the last `non_regular` projected onto walls)
/// and certifies `Hess u` and the Levi matrix positive definite at each.
pub fn psh_check(datum: &RestrictedRootDatum, samples: usize, non_regular: usize, rng: &mut impl Rng) -> Result<PshReport> {
    let alg = match realize(&datum.space) {
        Ok(a) if a.label.kind == SpaceKind::Irreducible => Some(a),
        _ => None,
    };
    let mut report = PshReport {
        space: datum.space.canonical_label(),
        samples,
        non_regular: non_regular.min(samples),
        route: if alg.is_some() { LeviRoute::OracleChart } else { LeviRoute::ClosedForm },
        min_hessian_eigenvalue: f64::INFINITY,
        min_eigenvalue_overall: f64::INFINITY,
        max_route_discrepancy: 0.0,
        max_cross_residual: 0.0,
        failures: Vec::new(),
    };
    let n_pos = datum.root_system.positive_roots().len();
    for i in 0..samples {
        let mut xi = sample_interior(datum, rng, 0.99)?;
        if i >= samples - report.non_regular {
            xi = project_to_wall(datum, &xi, rng.gen_range(0..n_pos));
        }
        let fail = |reason: String| PshFailure {
            point: xi.clone(),
            reason,
        };
        let hc = pd_certificate(&hessian_u(datum, &xi)?);
        report.min_hessian_eigenvalue = report.min_hessian_eigenvalue.min(hc.min_eigenvalue);
        if !hc.is_pd() {
            report.failures.push(fail(format!("Hess u not PD: {hc:?}")));
        }
        let closed = levi_matrix_closed_form(datum, &xi)?;
        let levi = match &alg {
            Some(a) => {
                let chart = levi_matrix_chart(a, datum, &InvariantFunction::CorollaryU, &xi)?;
                let scale = closed.matrix.amax().max(1.0);
                let disc = (&chart.matrix - &closed.matrix).amax() / scale;
                report.max_route_discrepancy = report.max_route_discrepancy.max(disc);
                report.max_cross_residual = report.max_cross_residual.max(chart.cross_residual / scale);
                if disc > ROUTE_TOL {
                    report.failures.push(fail(format!("chart and closed form differ by {disc:.3e}")));
                }
                chart
            }
            None => closed,
        };
        let lc = levi.certificate();
        report.min_eigenvalue_overall = report.min_eigenvalue_overall.min(lc.min_eigenvalue);
        if !lc.is_pd() {
            report.failures.push(fail(format!("Levi matrix not PD: {lc:?}")));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, restricted_datum};

    fn datum(l: &str) -> RestrictedRootDatum {
        restricted_datum(&lookup(l).unwrap())
    }

    #[test]
    fn hyperbolic_plane_values() {
        let d = datum("BDI:p=2,q=1");
        let u = corollary_u(&d, &[0.0]).unwrap();
        assert!((u - 8.0 / (std::f64::consts::PI.powi(2))).abs() < 1e-15);
        assert!(corollary_u(&d, &[FRAC_PI_2]).is_err());
        let h = hessian_u(&d, &[0.0]).unwrap();
        assert!((h[(0, 0)] - 4.0 / Q2.powi(2)).abs() < 1e-14);
        let l = levi_matrix_closed_form(&d, &[0.0]).unwrap();
        assert_eq!(l.dim(), 2);
        assert!(l.matrix[(0, 1)] == 0.0 && l.matrix[(0, 0)] > 0.0 && l.matrix[(1, 1)] > 0.0);
    }

    #[test]
    fn xcot_on_grid() {
        assert_eq!(xcot(0.0), 1.0);
        for i in 1..1000 {
            let x = FRAC_PI_2 * f64::from(i) / 1000.0 * 0.999;
            let v = xcot(x);
            assert!(v > 0.0 && v < 1.0, "{x} -> {v}");
            assert_eq!(v, xcot(-x));
        }
        assert!((xcot(1e-4 * 0.999) - (1e-4 * 0.999) / (1e-4 * 0.999f64).tan()).abs() < 1e-15);
    }

    #[test]
    fn a2_hessian_at_origin_is_scalar() {
        let h = hessian_u(&datum("AI:n=3"), &[0.0; 3]).unwrap();
        assert!((h[(0, 0)] - h[(1, 1)]).abs() < 1e-12 && h[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn gradient_record_roles_agree() {
        let d = datum("AI:n=3");
        let g = gradient_record(&d, &[0.3, 0.1, -0.4]).unwrap();
        let c = to_f64(&d.metric_scale);
        let x = [0.2, -0.5, 0.3];
        let metric: f64 = g.gradient_vector.iter().zip(&x).map(|(a, b)| c * a * b).sum();
        assert!((metric - g.eval(&x)).abs() < 1e-12);
    }

    #[test]
    fn exhaustion_on_hyperbolic_plane() {
        let t = exhaustion_trace(&datum("BDI:p=2,q=1"), &[1.0]).unwrap();
        assert!((t.s_star - FRAC_PI_2).abs() < 1e-15);
        assert!(t.monotone && t.diverged);
    }
}
