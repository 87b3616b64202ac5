//! Dense complex linear-algebra substrate.
//!
//! Everything in the crate is expressed in terms of [`CMatrix`], a dense
//! `nalgebra` matrix of `Complex64`. This module provides the exact oracles the
//! series code is checked against: spectral norm, inverse with an explicit
//! singularity test, Hermitian eigendecomposition, the matrix exponential and
//! trapezoidal quadrature on circles in the complex plane.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative threshold on the smallest singular value below which a matrix is
/// reported as singular.
pub const SINGULAR_RTOL: f64 = 1e-13;

/// Relative tolerance for Hermiticity checks.
pub const HERMITIAN_RTOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a complex matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols, "real_matrix: wrong data length");
    CMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c64(v, 0.0)),
    ))
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_same_shape(a: &CMatrix, b: &CMatrix) -> Result<usize> {
    let n = ensure_square(a)?;
    ensure_square(b)?;
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(n)
}

/// Frobenius-norm size of the anti-Hermitian part, ‖M − M*‖_F.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    m.is_square() && hermitian_defect(m) <= HERMITIAN_RTOL * m.norm().max(f64::MIN_POSITIVE)
}

pub fn ensure_hermitian(m: &CMatrix) -> Result<usize> {
    let n = ensure_square(m)?;
    if !is_hermitian(m) {
        return Err(Error::NotHermitian {
            defect: hermitian_defect(m),
        });
    }
    Ok(n)
}

/// True when every off-diagonal entry is exactly zero.
pub fn is_diagonal(m: &CMatrix) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    ensure_square(m)?;
    Ok(spectral_norm(m))
}

/// Largest singular value of an arbitrary (possibly rectangular) matrix.
pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Inverse with an explicit singularity test on the smallest singular value.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    ensure_square(m)?;
    let sv = m.clone().singular_values();
    let norm = sv.max();
    let sigma_min = sv.min();
    if !(sigma_min >= SINGULAR_RTOL * norm) || norm == 0.0 {
        return Err(Error::Singular { sigma_min, norm });
    }
    m.clone().lu().try_inverse().ok_or(Error::Singular { sigma_min, norm })
}

/// Solves `m x = rhs` by partial-pivot LU. Cheaper than [`inverse`]; the
/// singularity test is on the LU pivots only.
pub fn solve(m: &CMatrix, rhs: &CVector) -> Result<CVector> {
    let n = ensure_square(m)?;
    if rhs.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "rhs length {} for {n}x{n} system",
            rhs.len()
        )));
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let scale = m.camax();
    let pivot_min = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(pivot_min > SINGULAR_RTOL * scale) {
        return Err(Error::Singular {
            sigma_min: pivot_min,
            norm: scale,
        });
    }
    lu.solve(rhs).ok_or(Error::Singular {
        sigma_min: pivot_min,
        norm: scale,
    })
}

/// Solves `m X = rhs` for a matrix right-hand side.
pub fn solve_matrix(m: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(m)?;
    if rhs.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "rhs has {} rows for {n}x{n} system",
            rhs.nrows()
        )));
    }
    let lu = m.clone().lu();
    let scale = m.camax();
    let pivot_min = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(pivot_min > SINGULAR_RTOL * scale) {
        return Err(Error::Singular {
            sigma_min: pivot_min,
            norm: scale,
        });
    }
    lu.solve(rhs).ok_or(Error::Singular {
        sigma_min: pivot_min,
        norm: scale,
    })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// V diag(λ) V*.
    pub fn reconstruct(&self) -> CMatrix {
        let d = diag_real(&self.eigenvalues);
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }

    /// V diag(g(λ)) V*.
    pub fn apply_fn(&self, g: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = g(lam);
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= w);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Smallest distance from eigenvalue `k` to any other eigenvalue.
    pub fn gap(&self, k: usize) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &l)| (l - self.eigenvalues[k]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Trivial decomposition of a diagonal matrix in its natural (unsorted) order.
    pub(crate) fn of_diagonal(m: &CMatrix) -> Self {
        let n = m.nrows();
        SpectralDecomposition {
            eigenvalues: (0..n).map(|i| m[(i, i)].re).collect(),
            eigenvectors: CMatrix::identity(n, n),
        }
    }
}

pub fn eig_hermitian(m: &CMatrix) -> Result<SpectralDecomposition> {
    let n = ensure_hermitian(m)?;
    let (values, vectors): (Vec<f64>, CMatrix) = if m.iter().all(|z| z.im == 0.0) {
        let re = DMatrix::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        let e = SymmetricEigen::new(re);
        (
            e.eigenvalues.iter().copied().collect(),
            e.eigenvectors.map(|x| c64(x, 0.0)),
        )
    } else {
        let sym = (m + m.adjoint()) * c64(0.5, 0.0);
        let e = SymmetricEigen::new(sym);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenbasis convention used by the series modules: a diagonal matrix keeps
/// its natural ordering (index `i` is the `i`-th basis vector), anything else
/// goes through [`eig_hermitian`] and is indexed in ascending order.
pub fn eigenbasis(a: &CMatrix) -> Result<SpectralDecomposition> {
    ensure_square(a)?;
    if is_diagonal(a) {
        if a.diagonal().iter().any(|z| z.im != 0.0) {
            return Err(Error::NotHermitian {
                defect: a.diagonal().iter().map(|z| 2.0 * z.im.abs()).fold(0.0, f64::max),
            });
        }
        Ok(SpectralDecomposition::of_diagonal(a))
    } else {
        eig_hermitian(a)
    }
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    ensure_square(m)?;
    Ok(m.clone().exp())
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// ⟨x, y⟩, conjugate-linear in the first argument.
#[inline]
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    x.dotc(y)
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Circle in the complex plane sampled by the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub num_points: usize,
}

impl ContourSpec {
    pub const DEFAULT_POINTS: usize = 256;
    pub const MIN_POINTS: usize = 16;

    pub fn new(center: C64, radius: f64, num_points: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("contour radius must be positive, got {radius}")));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::invalid("contour center must be finite"));
        }
        if num_points < Self::MIN_POINTS {
            return Err(Error::invalid(format!(
                "contour needs at least {} points, got {num_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(ContourSpec {
            center,
            radius,
            num_points,
        })
    }

    pub fn circle(center: f64, radius: f64) -> Result<Self> {
        Self::new(c64(center, 0.0), radius, Self::DEFAULT_POINTS)
    }

    pub fn with_points(self, num_points: usize) -> Result<Self> {
        Self::new(self.center, self.radius, num_points)
    }

    /// Nodes and trapezoid weights such that Σ wⱼ f(zⱼ) ≈ (1/2πi)∮ f(z) dz.
    pub fn nodes(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.num_points;
        (0..n).map(move |j| {
            // half-step offset keeps nodes off the real axis
            let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            let e = C64::from_polar(1.0, theta);
            (self.center + e * self.radius, e * (self.radius / n as f64))
        })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// Values that can be accumulated by contour quadrature.
pub trait ContourValue: Clone {
    fn add_scaled(&mut self, other: &Self, w: C64);
    fn scale(&mut self, w: C64);
    fn distance(&self, other: &Self) -> f64;
}

impl ContourValue for C64 {
    fn add_scaled(&mut self, other: &Self, w: C64) {
        *self += other * w;
    }
    fn scale(&mut self, w: C64) {
        *self *= w;
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl ContourValue for CMatrix {
    fn add_scaled(&mut self, other: &Self, w: C64) {
        *self += other * w;
    }
    fn scale(&mut self, w: C64) {
        *self *= w;
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl ContourValue for Vec<C64> {
    fn add_scaled(&mut self, other: &Self, w: C64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * w;
        }
    }
    fn scale(&mut self, w: C64) {
        self.iter_mut().for_each(|a| *a *= w);
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// (1/2πi)∮ f(z) dz over the circle `c` by the trapezoid rule.
pub fn contour_integrate<T, F>(mut f: F, c: &ContourSpec) -> Result<T>
where
    T: ContourValue,
    F: FnMut(C64) -> Result<T>,
{
    let mut acc: Option<T> = None;
    for (z, w) in c.nodes() {
        let v = f(z)?;
        match acc.as_mut() {
            Some(a) => a.add_scaled(&v, w),
            None => {
                let mut first = v;
                first.scale(w);
                acc = Some(first);
            }
        }
    }
    Ok(acc.expect("contour has at least MIN_POINTS nodes"))
}

/// Like [`contour_integrate`] but also returns the distance to the result on a
/// twice-refined node set, as an a-posteriori quadrature error estimate.
pub fn contour_integrate_estimate<T, F>(mut f: F, c: &ContourSpec) -> Result<(T, f64)>
where
    T: ContourValue,
    F: FnMut(C64) -> Result<T>,
{
    let coarse = contour_integrate(&mut f, c)?;
    let fine = contour_integrate(&mut f, &c.with_points(2 * c.num_points)?)?;
    let err = coarse.distance(&fine);
    Ok((fine, err))
}
