//! Matrix realizations of the classical real forms, used as an independent
//! numeric check on the catalog.
//!
//! Each algebra is cut out of `gl(N, C)` (as a real vector space of
//! dimension `2N^2`) by linear constraints; the Cartan involution is
//! `X -> -X*`, so `k` is the anti-Hermitian part and `p` the Hermitian part.
//! The inner product is `Re tr(X* Y)`, for which `ad(H)` is symmetric when
//! `H` is Hermitian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{CartanLabel, SpaceDescriptor, SpaceKind};
use crate::error::{Error, Result};
use crate::exact::{self, q, Rational};

pub type CMat = DMatrix<Complex64>;

pub const MAX_MATRIX_SIZE: usize = 8;
/// Eigenvalues closer than this belong to the same weight space.
pub const CLUSTER_TOL: f64 = 1e-8;
const NULL_TOL: f64 = 1e-9;

/// How the chamber representative is read off the sorted spectrum of a
/// Hermitian matrix in `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ChartRule {
    /// Each frame coordinate appears this many times in the spectrum.
    step: usize,
    /// Coordinates to read (rank, or `n` for type A frames).
    count: usize,
}

#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub label: SpaceDescriptor,
    pub size: usize,
    /// Orthonormal real basis of `g`.
    pub basis: Vec<CMat>,
    pub k_basis: Vec<CMat>,
    pub p_basis: Vec<CMat>,
    pub a_basis: Vec<CMat>,
    /// Catalog-frame vector represented by each element of `a_basis`.
    pub a_frame: Vec<Vec<Rational>>,
    chart: ChartRule,
}

pub fn cartan_involution(x: &CMat) -> CMat {
    -x.adjoint()
}

pub fn bracket(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

fn flatten(x: &CMat) -> DVector<f64> {
    let n = x.nrows() * x.ncols();
    let mut v = DVector::zeros(2 * n);
    for (k, z) in x.iter().enumerate() {
        v[k] = z.re;
        v[n + k] = z.im;
    }
    v
}

fn unflatten(v: &DVector<f64>, size: usize) -> CMat {
    let n = size * size;
    CMat::from_iterator(size, size, (0..n).map(|k| Complex64::new(v[k], v[n + k])))
}

/// `Re tr(x^* y)`.
pub fn inner(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

fn real_mat(size: usize, entries: &[(usize, usize, f64)]) -> CMat {
    let mut m = CMat::zeros(size, size);
    for &(i, j, v) in entries {
        m[(i, j)] += Complex64::new(v, 0.0);
    }
    m
}

fn diag_signature(signs: &[f64]) -> CMat {
    let n = signs.len();
    real_mat(n, &signs.iter().enumerate().map(|(i, &s)| (i, i, s)).collect::<Vec<_>>())
}

/// `[[0, -I], [I, 0]]` on `C^{2m}`.
fn j_form(m: usize) -> CMat {
    let mut e = Vec::new();
    for i in 0..m {
        e.push((i, m + i, -1.0));
        e.push((m + i, i, 1.0));
    }
    real_mat(2 * m, &e)
}

type Constraint = Box<dyn Fn(&CMat) -> CMat>;

fn c_real() -> Constraint {
    Box::new(|x: &CMat| x.map(|z| Complex64::new(z.im, 0.0)))
}

fn c_traceless() -> Constraint {
    Box::new(|x: &CMat| CMat::from_element(1, 1, x.trace()))
}

/// `X* M + M X = 0`
fn c_hermitian_form(m: CMat) -> Constraint {
    Box::new(move |x: &CMat| x.adjoint() * &m + &m * x)
}

/// `X^T M + M X = 0`
fn c_bilinear_form(m: CMat) -> Constraint {
    Box::new(move |x: &CMat| x.transpose() * &m + &m * x)
}

/// `X J = J conj(X)`
fn c_quaternionic(j: CMat) -> Constraint {
    Box::new(move |x: &CMat| x * &j - &j * x.map(|z| z.conj()))
}

/// Orthonormal basis of the common kernel of `constraints` in `gl(size, C)`.
fn solve_constraints(size: usize, constraints: &[Constraint]) -> Vec<CMat> {
    let dim = 2 * size * size;
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        let x = unflatten(&e, size);
        let parts: Vec<f64> = constraints.iter().flat_map(|c| flatten(&c(&x)).iter().copied().collect::<Vec<_>>()).collect();
        cols.push(DVector::from_vec(parts));
    }
    let rows = cols[0].len();
    let c = DMatrix::from_fn(rows, dim, |i, j| cols[j][i]);
    let gram = c.transpose() * &c;
    let eig = SymmetricEigen::new(gram);
    let mut basis = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < NULL_TOL {
            basis.push(unflatten(&eig.eigenvectors.column(k).into_owned(), size));
        }
    }
    basis
}

/// Splits `g` into the `+1` (k) and `-1` (p) eigenspaces of the involution.
fn cartan_split(basis: &[CMat]) -> (Vec<CMat>, Vec<CMat>) {
    let d = basis.len();
    let theta: Vec<CMat> = basis.iter().map(cartan_involution).collect();
    let t = DMatrix::from_fn(d, d, |i, j| inner(&basis[i], &theta[j]));
    let eig = SymmetricEigen::new((&t + t.transpose()) * 0.5);
    let (mut k, mut p) = (Vec::new(), Vec::new());
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        let size = basis[0].nrows();
        let mut x = CMat::zeros(size, size);
        for (i, b) in basis.iter().enumerate() {
            x += b * Complex64::new(eig.eigenvectors[(i, idx)], 0.0);
        }
        if lambda > 0.0 {
            k.push(x);
        } else {
            p.push(x);
        }
    }
    (k, p)
}

struct Realization {
    size: usize,
    constraints: Vec<Constraint>,
    a_basis: Vec<CMat>,
    a_frame: Vec<Vec<Rational>>,
    chart: ChartRule,
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![q(0); n];
    v[i] = q(1);
    v
}

fn simple_a(n: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![q(0); n];
    v[k] = q(1);
    v[k + 1] = q(-1);
    v
}

/// `sum_k E_{k,k} - E_{k+1,k+1}` blocks for type A, repeated `copies` times along the diagonal.
fn a_type_cartan(n: usize, copies: usize) -> (Vec<CMat>, Vec<Vec<Rational>>) {
    let mut basis = Vec::new();
    let mut frame = Vec::new();
    for k in 0..n - 1 {
        let mut e = Vec::new();
        for c in 0..copies {
            e.push((c * n + k, c * n + k, 1.0));
            e.push((c * n + k + 1, c * n + k + 1, -1.0));
        }
        basis.push(real_mat(copies * n, &e));
        frame.push(simple_a(n, k));
    }
    (basis, frame)
}

/// `E_{k,off+k} + E_{off+k,k}` for `k < r`, repeated on `copies` diagonal blocks of size `m`.
fn boost_cartan(m: usize, off: usize, r: usize, copies: usize) -> (Vec<CMat>, Vec<Vec<Rational>>) {
    let mut basis = Vec::new();
    let mut frame = Vec::new();
    for k in 0..r {
        let mut e = Vec::new();
        for c in 0..copies {
            e.push((c * m + k, c * m + off + k, 1.0));
            e.push((c * m + off + k, c * m + k, 1.0));
        }
        basis.push(real_mat(copies * m, &e));
        frame.push(unit(r, k));
    }
    (basis, frame)
}

fn realization(space: &SpaceDescriptor) -> Result<Realization> {
    use CartanLabel::*;
    let unsupported = || Error::Unsupported(format!("no matrix realization for {space}"));
    let n = space.param('n').unwrap_or(0) as usize;
    let p = space.param('p').unwrap_or(0) as usize;
    let qq = space.param('q').unwrap_or(0) as usize;
    let r = space.rank;
    let signature = |p: usize, q: usize| {
        let mut s = vec![1.0; p];
        s.extend(vec![-1.0; q]);
        s
    };
    let re = match space.cartan_label {
        AI | CA => {
            let (a_basis, a_frame) = a_type_cartan(n, 1);
            let mut constraints = vec![c_traceless()];
            if space.cartan_label == AI {
                constraints.push(c_real());
            }
            Realization { size: n, constraints, a_basis, a_frame, chart: ChartRule { step: 1, count: n } }
        }
        AII => {
            let (a_basis, a_frame) = a_type_cartan(n, 2);
            Realization {
                size: 2 * n,
                constraints: vec![c_quaternionic(j_form(n)), c_traceless()],
                a_basis,
                a_frame,
                chart: ChartRule { step: 2, count: n },
            }
        }
        AIII => {
            let (a_basis, a_frame) = boost_cartan(p + qq, p, r, 1);
            Realization {
                size: p + qq,
                constraints: vec![c_hermitian_form(diag_signature(&signature(p, qq))), c_traceless()],
                a_basis,
                a_frame,
                chart: ChartRule { step: 1, count: r },
            }
        }
        BDI => {
            let (a_basis, a_frame) = boost_cartan(p + qq, p, r, 1);
            Realization {
                size: p + qq,
                constraints: vec![c_real(), c_bilinear_form(diag_signature(&signature(p, qq)))],
                a_basis,
                a_frame,
                chart: ChartRule { step: 1, count: r },
            }
        }
        CII => {
            let m = p + qq;
            let (a_basis, a_frame) = boost_cartan(m, p, r, 2);
            let mut sig = signature(p, qq);
            sig.extend(signature(p, qq));
            Realization {
                size: 2 * m,
                constraints: vec![c_quaternionic(j_form(m)), c_hermitian_form(diag_signature(&sig))],
                a_basis,
                a_frame,
                chart: ChartRule { step: 2, count: r },
            }
        }
        CI | CC => {
            let mut a_basis = Vec::new();
            let mut a_frame = Vec::new();
            for k in 0..n {
                a_basis.push(real_mat(2 * n, &[(k, k, 1.0), (n + k, n + k, -1.0)]));
                a_frame.push(unit(n, k));
            }
            let omega = -j_form(n);
            let mut constraints = vec![c_bilinear_form(omega)];
            if space.cartan_label == CI {
                constraints.push(c_real());
            }
            Realization { size: 2 * n, constraints, a_basis, a_frame, chart: ChartRule { step: 1, count: n } }
        }
        DIII => {
            let i = Complex64::new(0.0, 1.0);
            let mut a_basis = Vec::new();
            let mut a_frame = Vec::new();
            for k in 0..r {
                let mut h = CMat::zeros(2 * n, 2 * n);
                let (a, b) = (2 * k, 2 * k + 1);
                h[(a, b)] = i;
                h[(b, a)] = -i;
                h[(n + a, n + b)] = -i;
                h[(n + b, n + a)] = i;
                a_basis.push(h);
                a_frame.push(unit(r, k));
            }
            Realization {
                size: 2 * n,
                constraints: vec![c_bilinear_form(CMat::identity(2 * n, 2 * n)), c_quaternionic(j_form(n))],
                a_basis,
                a_frame,
                chart: ChartRule { step: 2, count: r },
            }
        }
        CB | CD => {
            let i = Complex64::new(0.0, 1.0);
            let mut a_basis = Vec::new();
            let mut a_frame = Vec::new();
            for k in 0..r {
                let mut h = CMat::zeros(n, n);
                h[(2 * k, 2 * k + 1)] = i;
                h[(2 * k + 1, 2 * k)] = -i;
                a_basis.push(h);
                a_frame.push(unit(r, k));
            }
            Realization {
                size: n,
                constraints: vec![c_bilinear_form(CMat::identity(n, n))],
                a_basis,
                a_frame,
                chart: ChartRule { step: 1, count: r },
            }
        }
        _ => return Err(unsupported()),
    };
    Ok(re)
}

fn block_diag(x: &CMat, y: &CMat) -> CMat {
    let (n, m) = (x.nrows(), y.nrows());
    let mut z = CMat::zeros(n + m, n + m);
    z.view_mut((0, 0), (n, n)).copy_from(x);
    z.view_mut((n, n), (m, m)).copy_from(y);
    z
}

/// Builds the matrix algebra for a classical label of size at most
/// [`MAX_MATRIX_SIZE`] (or the conjugate square of one).
pub fn realize(space: &SpaceDescriptor) -> Result<MatrixAlgebra> {
    if space.kind == SpaceKind::ConjugateSquare {
        let mut factor_space = space.clone();
        factor_space.kind = SpaceKind::Irreducible;
        factor_space.rank /= 2;
        factor_space.dim /= 2;
        let f = realize(&factor_space)?;
        let z = CMat::zeros(f.size, f.size);
        let double = |xs: &[CMat]| -> Vec<CMat> {
            xs.iter()
                .map(|x| block_diag(x, &z))
                .chain(xs.iter().map(|x| block_diag(&z, x)))
                .collect()
        };
        let amb = f.a_frame[0].len();
        let a_frame = f
            .a_frame
            .iter()
            .map(|v| [v.clone(), vec![q(0); amb]].concat())
            .chain(f.a_frame.iter().map(|v| [vec![q(0); amb], v.clone()].concat()))
            .collect();
        return Ok(MatrixAlgebra {
            label: space.clone(),
            size: 2 * f.size,
            basis: double(&f.basis),
            k_basis: double(&f.k_basis),
            p_basis: double(&f.p_basis),
            a_basis: double(&f.a_basis),
            a_frame,
            chart: f.chart,
        });
    }
    let re = realization(space)?;
    if re.size > MAX_MATRIX_SIZE {
        return Err(Error::Unsupported(format!(
            "{space} needs {}x{} matrices (limit {MAX_MATRIX_SIZE})",
            re.size, re.size
        )));
    }
    let basis = solve_constraints(re.size, &re.constraints);
    let (k_basis, p_basis) = cartan_split(&basis);
    let alg = MatrixAlgebra {
        label: space.clone(),
        size: re.size,
        basis,
        k_basis,
        p_basis,
        a_basis: re.a_basis,
        a_frame: re.a_frame,
        chart: re.chart,
    };
    if alg.p_basis.len() != space.dim {
        return Err(Error::Oracle(format!(
            "{space}: dim p = {} but the catalog says {}",
            alg.p_basis.len(),
            space.dim
        )));
    }
    Ok(alg)
}

/// Residual of `x` after orthogonal projection onto the span of an orthonormal basis.
fn residual(x: &CMat, basis: &[CMat]) -> f64 {
    let mut r = x.clone();
    for b in basis {
        r -= b * Complex64::new(inner(b, x), 0.0);
    }
    r.norm()
}

impl MatrixAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.a_basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.a_frame[0].len()
    }

    /// Largest distance of a bracket of basis elements from `g`.
    pub fn bracket_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.basis.iter().enumerate() {
            for y in &self.basis[i + 1..] {
                worst = worst.max(residual(&bracket(x, y), &self.basis));
            }
        }
        worst
    }

    /// Largest violation among `[k,k] in k`, `[k,p] in p`, `[p,p] in k`,
    /// `theta^2 = id`, `a in p` and `[a,a] = 0`.
    pub fn cartan_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in &self.basis {
            worst = worst.max((cartan_involution(&cartan_involution(x)) - x).norm());
        }
        for (i, x) in self.k_basis.iter().enumerate() {
            for y in &self.k_basis[i..] {
                worst = worst.max(residual(&bracket(x, y), &self.k_basis));
            }
            for y in &self.p_basis {
                worst = worst.max(residual(&bracket(x, y), &self.p_basis));
            }
        }
        for (i, x) in self.p_basis.iter().enumerate() {
            for y in &self.p_basis[i..] {
                worst = worst.max(residual(&bracket(x, y), &self.k_basis));
            }
        }
        for (i, h) in self.a_basis.iter().enumerate() {
            worst = worst.max(residual(h, &self.p_basis));
            for g in &self.a_basis[i..] {
                worst = worst.max(bracket(h, g).norm());
            }
        }
        worst
    }

    fn frame_matrix(&self) -> DMatrix<f64> {
        let amb = self.ambient_dim();
        DMatrix::from_fn(amb, self.rank(), |i, k| exact::to_f64(&self.a_frame[k][i]))
    }

    /// The element of `a` with catalog-frame coordinates `h` (projected onto the frame span).
    pub fn a_element(&self, h: &[f64]) -> CMat {
        let f = self.frame_matrix();
        let c = (f.transpose() * &f)
            .try_inverse()
            .expect("frame vectors are independent")
            * f.transpose()
            * DVector::from_column_slice(h);
        let mut x = CMat::zeros(self.size, self.size);
        for (ck, hk) in c.iter().zip(&self.a_basis) {
            x += hk * Complex64::new(*ck, 0.0);
        }
        x
    }

    /// Matrix of `ad(x)` on `basis` (orthonormal).
    fn ad_on(x: &CMat, basis: &[CMat]) -> DMatrix<f64> {
        let images: Vec<CMat> = basis.iter().map(|b| bracket(x, b)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |i, j| inner(&basis[i], &images[j]))
    }

    /// Eigenvalues of `-ad(H)^2` on `p`, ascending.
    pub fn jacobi_eigenvalues(&self, h: &[f64]) -> Vec<f64> {
        let x = self.a_element(h);
        let images: Vec<CMat> = self.p_basis.iter().map(|b| -bracket(&x, &bracket(&x, b))).collect();
        let d = self.p_basis.len();
        let m = DMatrix::from_fn(d, d, |i, j| inner(&self.p_basis[i], &images[j]));
        let mut ev: Vec<f64> = SymmetricEigen::new((&m + m.transpose()) * 0.5).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest `|eigenvalue|` of `ad(x)` on `g`, i.e. `max_alpha |alpha(x)|` for `x in a`.
    ///
    /// For Hermitian `x = U diag(l) U^*`, `ad(x)` acts on `U E_ij U^*` by
    /// `l_i - l_j`; the eigenvalues on `g` are those differences whose
    /// `(i, j)` entry some basis element of `g` occupies in that frame.
    pub fn spectral_sup(&self, x: &CMat) -> f64 {
        let herm = (x + x.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let (u, l) = (&eig.eigenvectors, &eig.eigenvalues);
        let n = self.size;
        let mut occupied = vec![false; n * n];
        for b in &self.basis {
            let c = u.adjoint() * b * u;
            for (k, z) in c.iter().enumerate() {
                if z.norm() > 1e-9 {
                    occupied[k] = true;
                }
            }
        }
        let mut best = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if occupied[j * n + i] {
                    best = best.max((l[i] - l[j]).abs());
                }
            }
        }
        best
    }

    /// Chamber representative (catalog frame) of the `Ad(K)`-orbit of a Hermitian `xi in p`.
    ///
    /// Type D frames get the representative with a nonnegative last
    /// coordinate, i.e. the `W(B)` chamber.
    pub fn invariant_chart(&self, xi: &CMat) -> Result<Vec<f64>> {
        if self.label.kind == SpaceKind::ConjugateSquare {
            return Err(Error::Unsupported("chart on a product".into()));
        }
        let herm = (xi + xi.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let ChartRule { step, count } = self.chart;
        Ok((0..count).map(|k| ev[k * step]).collect())
    }

    /// `exp(Y)` for `Y` in `k` (anti-Hermitian), via the Hermitian matrix `iY`.
    pub fn exp_k(y: &CMat) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let herm = y * i;
        let herm = (&herm + herm.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let u = &eig.eigenvectors;
        let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(0.0, -l).exp()));
        u * d * u.adjoint()
    }

    /// `Ad(k) xi = k xi k^{-1}` for a unitary `k`.
    pub fn conjugate(k: &CMat, xi: &CMat) -> CMat {
        k * xi * k.adjoint()
    }
}

/// Classical catalog labels whose realization fits in [`MAX_MATRIX_SIZE`].
pub fn realizable_labels() -> Vec<SpaceDescriptor> {
    let mut labels = Vec::new();
    for n in 2..=8 {
        labels.extend(["AI", "cA", "cB", "cD"].map(|l| format!("{l}:n={n}")));
    }
    for n in 1..=4 {
        labels.extend(["AII", "DIII", "CI", "cC"].map(|l| format!("{l}:n={n}")));
    }
    for p in 1..=7 {
        for q in 1..=7 {
            labels.push(format!("AIII:p={p},q={q}"));
            if p >= q {
                labels.push(format!("BDI:p={p},q={q}"));
            }
            labels.push(format!("CII:p={p},q={q}"));
        }
    }
    labels
        .iter()
        .filter_map(|l| crate::catalog::lookup(l).ok())
        .filter(|d| realize(d).is_ok())
        .collect()
}

/// Roots recovered from the joint spectrum of `ad(a)` on `g`.
#[derive(Clone, Debug)]
pub struct NumericRootDatum {
    /// Root coordinates in the catalog frame, with the dimension of the root space.
    pub roots: Vec<(Vec<f64>, usize)>,
    /// Dimension of the centralizer `Z(a)`.
    pub zero_weight_dim: usize,
}

impl NumericRootDatum {
    /// Rounds every coordinate to a rational with denominator at most 16.
    pub fn rationalize(&self) -> Result<Vec<(Vec<Rational>, u32)>> {
        let mut out = Vec::new();
        for (v, m) in &self.roots {
            let coords = v
                .iter()
                .map(|&x| {
                    exact::rationalize(x, 16, 1e-8)
                        .ok_or_else(|| Error::Oracle(format!("coordinate {x} is not a small rational")))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push((coords, *m as u32));
        }
        out.sort();
        Ok(out)
    }
}

pub fn numeric_restricted_datum(alg: &MatrixAlgebra, seed: u64) -> Result<NumericRootDatum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = alg.rank();
    let weights: Vec<f64> = (0..r).map(|_| rng.gen_range(1.0..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    let mut generic = CMat::zeros(alg.size, alg.size);
    for (w, h) in weights.iter().zip(&alg.a_basis) {
        generic += h * Complex64::new(*w, 0.0);
    }
    let ad_gen = MatrixAlgebra::ad_on(&generic, &alg.basis);
    let eig = SymmetricEigen::new((&ad_gen + ad_gen.transpose()) * 0.5);
    let ad_k: Vec<DMatrix<f64>> = alg.a_basis.iter().map(|h| MatrixAlgebra::ad_on(h, &alg.basis)).collect();

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[idx] - eig.eigenvalues[*c.last().expect("nonempty")]).abs() <= CLUSTER_TOL => {
                c.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let f = alg.frame_matrix();
    let pinv = f.clone() * (f.transpose() * &f).try_inverse().expect("independent frame");
    let mut roots = Vec::new();
    let mut zero_weight_dim = 0;
    for c in clusters {
        // Every vector of a joint eigenspace gives the same Rayleigh quotients.
        let mut lambda = DVector::zeros(r);
        for (k, adk) in ad_k.iter().enumerate() {
            let vals: Vec<f64> = c
                .iter()
                .map(|&idx| {
                    let v = eig.eigenvectors.column(idx);
                    v.dot(&(adk * v))
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            if vals.iter().any(|x| (x - mean).abs() > 1e-6) {
                return Err(Error::Oracle(format!(
                    "{}: weight space is not a joint eigenspace (spread in ad(H_{k}))",
                    alg.label
                )));
            }
            lambda[k] = mean;
        }
        if lambda.amax() < 1e-7 {
            zero_weight_dim += c.len();
        } else {
            let alpha = &pinv * lambda;
            roots.push((alpha.iter().copied().collect(), c.len()));
        }
    }
    Ok(NumericRootDatum { roots, zero_weight_dim })
}

/// Draws a random element of `K = exp(k)` of moderate size.
pub fn random_k(alg: &MatrixAlgebra, rng: &mut impl Rng) -> CMat {
    let mut y = CMat::zeros(alg.size, alg.size);
    for b in &alg.k_basis {
        y += b * Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    }
    MatrixAlgebra::exp_k(&y)
}

/// Random element of `p` with entries of size about `scale`.
pub fn random_p(alg: &MatrixAlgebra, rng: &mut impl Rng, scale: f64) -> CMat {
    let mut y = CMat::zeros(alg.size, alg.size);
    for b in &alg.p_basis {
        y += b * Complex64::new(rng.gen_range(-scale..scale), 0.0);
    }
    y
}

/// Explicit inclusion of matrix algebras underlying a real-form/envelope pair.
#[derive(Clone, Debug)]
pub enum MatrixInclusion {
    /// `X -> P X P^T` for an index map `i -> map[i]` into a larger size.
    Indices { map: Vec<usize>, size: usize },
    /// `sl(n,R) -> sp(n,R)`, `X -> diag(X, -X^T)`.
    SymplecticDouble,
    /// `X -> diag(X, X)`.
    Diagonal,
}

impl MatrixInclusion {
    pub fn apply(&self, x: &CMat) -> CMat {
        match self {
            MatrixInclusion::Indices { map, size } => {
                let mut y = CMat::zeros(*size, *size);
                for (i, &mi) in map.iter().enumerate() {
                    for (j, &mj) in map.iter().enumerate() {
                        y[(mi, mj)] = x[(i, j)];
                    }
                }
                y
            }
            MatrixInclusion::SymplecticDouble => block_diag(x, &(-x.transpose())),
            MatrixInclusion::Diagonal => block_diag(x, x),
        }
    }
}

/// The matrix inclusion for a supported pair `(M, N)`.
pub fn inclusion_for(m: &SpaceDescriptor, n: &SpaceDescriptor) -> Result<MatrixInclusion> {
    use CartanLabel::*;
    let unsupported = || Error::Unsupported(format!("no matrix embedding {m} -> {n}"));
    if n.kind == SpaceKind::ConjugateSquare {
        if n.cartan_label == m.cartan_label && n.params == m.params && m.kind == SpaceKind::Irreducible {
            return Ok(MatrixInclusion::Diagonal);
        }
        return Err(unsupported());
    }
    let (mp, mq, mn) = (m.param('p'), m.param('q'), m.param('n'));
    let (np, nq, nn) = (n.param('p'), n.param('q'), n.param('n'));
    match (m.cartan_label, n.cartan_label) {
        (BDI, BDI) if mq == Some(1) && nq == Some(2) && mp == np => {
            let p = mp.expect("BDI has p") as usize;
            Ok(MatrixInclusion::Indices { map: (0..=p).collect(), size: p + 2 })
        }
        (BDI, AIII) if mp == np && mq == nq => {
            let s = (mp.expect("p") + mq.expect("q")) as usize;
            Ok(MatrixInclusion::Indices { map: (0..s).collect(), size: s })
        }
        (CII, AIII) if np == mp.map(|p| 2 * p) && nq == mq.map(|q| 2 * q) => {
            let (p, q) = (mp.expect("p") as usize, mq.expect("q") as usize);
            let mm = p + q;
            let mut map = vec![0; 2 * mm];
            for h in 0..2 {
                for i in 0..mm {
                    map[h * mm + i] = if i < p { 2 * i + h } else { 2 * p + 2 * (i - p) + h };
                }
            }
            Ok(MatrixInclusion::Indices { map, size: 2 * mm })
        }
        (AI, CI) if mn == nn => Ok(MatrixInclusion::SymplecticDouble),
        _ => Err(unsupported()),
    }
}

/// Derives `iota: a_M -> a_N` (catalog frames, rows indexed by `N`'s
/// ambient coordinates) from the matrix inclusion, rounding to rationals.
pub fn embedding_matrix(m_alg: &MatrixAlgebra, n_alg: &MatrixAlgebra, inc: &MatrixInclusion) -> Result<Vec<Vec<Rational>>> {
    let fm = m_alg.frame_matrix();
    let fm_pinv = (fm.transpose() * &fm).try_inverse().expect("independent frame") * fm.transpose();
    let fn_ = n_alg.frame_matrix();
    // Least-squares coordinates in N's a-basis, with a residual check.
    let gram = DMatrix::from_fn(n_alg.rank(), n_alg.rank(), |i, j| inner(&n_alg.a_basis[i], &n_alg.a_basis[j]));
    let gram_inv = gram.try_inverse().expect("independent a-basis");
    let mut images = DMatrix::zeros(n_alg.ambient_dim(), m_alg.rank());
    for (k, h) in m_alg.a_basis.iter().enumerate() {
        let img = inc.apply(h);
        let rhs = DVector::from_iterator(n_alg.rank(), n_alg.a_basis.iter().map(|g| inner(g, &img)));
        let c = &gram_inv * rhs;
        let mut back = CMat::zeros(n_alg.size, n_alg.size);
        for (ck, g) in c.iter().zip(&n_alg.a_basis) {
            back += g * Complex64::new(*ck, 0.0);
        }
        if (back - &img).norm() > 1e-10 {
            return Err(Error::Oracle(format!(
                "image of a({}) is not inside a({})",
                m_alg.label, n_alg.label
            )));
        }
        images.set_column(k, &(&fn_ * c));
    }
    let iota = images * fm_pinv;
    let mut out = Vec::with_capacity(iota.nrows());
    for i in 0..iota.nrows() {
        let mut row = Vec::with_capacity(iota.ncols());
        for j in 0..iota.ncols() {
            let x = iota[(i, j)];
            row.push(
                exact::rationalize(x, 16, 1e-9)
                    .ok_or_else(|| Error::Oracle(format!("iota entry {x} is not a small rational")))?,
            );
        }
        out.push(row);
    }
    Ok(out)
}

/// Killing form `B(X, Y) = tr(ad X ad Y)` on `g`.
pub fn killing(alg: &MatrixAlgebra, x: &CMat, y: &CMat) -> f64 {
    let ax = MatrixAlgebra::ad_on(x, &alg.basis);
    let ay = MatrixAlgebra::ad_on(y, &alg.basis);
    (ax * ay).trace()
}

/// `true` when `v` has only zero entries.
pub fn is_zero_matrix(x: &CMat) -> bool {
    x.iter().all(|z| z.is_zero())
}

/// The identity of size `n`, as a convenience for callers building `K`-elements.
pub fn identity(n: usize) -> CMat {
    CMat::from_element(n, n, Complex64::zero()) + CMat::identity(n, n) * Complex64::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, restricted_datum};

    fn alg(l: &str) -> MatrixAlgebra {
        realize(&lookup(l).unwrap()).unwrap()
    }

    fn catalog_roots(l: &str) -> Vec<(Vec<Rational>, u32)> {
        let d = restricted_datum(&lookup(l).unwrap());
        let mut v: Vec<_> = d.root_system.roots.iter().map(|r| (r.vector.coords().to_vec(), r.mult)).collect();
        v.sort();
        v
    }

    #[test]
    fn sl3r_decomposition() {
        let a = alg("AI:n=3");
        assert_eq!((a.dim(), a.k_basis.len(), a.p_basis.len()), (8, 3, 5));
        assert!(a.bracket_residual() < 1e-10);
        assert!(a.cartan_residual() < 1e-10);
    }

    #[test]
    fn small_cases_match_catalog() {
        for l in ["AI:n=3", "AIII:p=2,q=1", "cA:n=2", "CII:p=1,q=1", "CI:n=2", "DIII:n=3", "DIII:n=4", "BDI:p=3,q=2"] {
            let a = alg(l);
            let got = numeric_restricted_datum(&a, 0).unwrap().rationalize().unwrap();
            assert_eq!(got, catalog_roots(l), "{l}");
        }
    }

    #[test]
    fn su21_has_four_dim_p() {
        assert_eq!(alg("AIII:p=2,q=1").p_basis.len(), 4);
        assert_eq!(alg("CII:p=1,q=1").rank(), 1);
    }

    #[test]
    fn chart_of_ai2() {
        let a = alg("AI:n=2");
        // A symmetric matrix with eigenvalues 0.2, -0.2 in a rotated basis.
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let x = real_mat(2, &[(0, 0, 0.2 * (c * c - s * s)), (0, 1, 0.4 * c * s), (1, 0, 0.4 * c * s), (1, 1, -0.2 * (c * c - s * s))]);
        let rep = a.invariant_chart(&x).unwrap();
        assert!((rep[0] - 0.2).abs() < 1e-12 && (rep[1] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn oversized_and_exceptional_are_unsupported() {
        assert!(realize(&lookup("AI:n=9").unwrap()).is_err());
        assert!(realize(&lookup("EIII").unwrap()).is_err());
    }

    #[test]
    fn corner_embedding() {
        let m = lookup("BDI:p=3,q=1").unwrap();
        let n = lookup("BDI:p=3,q=2").unwrap();
        let inc = inclusion_for(&m, &n).unwrap();
        let iota = embedding_matrix(&realize(&m).unwrap(), &realize(&n).unwrap(), &inc).unwrap();
        assert_eq!(iota, vec![vec![q(1)], vec![q(0)]]);
    }
}
