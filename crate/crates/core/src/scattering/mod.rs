//! Scattering-matrix entries at finite regularization τ > 0.
//!
//! With λ_τ = (λᵢ+λⱼ)/2 − iτ the entry is S_ij(τ) = iτ⟨vᵢ, (A+B−λ_τ)⁻¹ vⱼ⟩, the
//! Neumann expansion of which gives the terms S⁽ᵏ⁾(τ) = iτ⟨vᵢ, (A−λ_τ)⁻¹[B(λ_τ−A)⁻¹]ᵏ vⱼ⟩.
//! The same value is the Abel average 2τ∫₀^∞ e^{−2τt} ⟨vᵢ, e^{−itA} e^{2it(A+B)} e^{−itA} vⱼ⟩ dt.
//! Eigen-indices follow the basis order of A (natural order if A is diagonal).

mod born;
mod rutherford;

pub use born::{born_demo, BornResult, TorusModel};
pub use rutherford::{rutherford_demo, RutherfordResult, RutherfordSetup};

use crate::error::{Error, Result};
use crate::matcore::{
    c64, eig_hermitian, eigenbasis, ensure_hermitian, ensure_same_shape, inner, is_diagonal,
    op_norm, solve, CMatrix, CVector, SpectralDecomposition, C64,
};
use crate::evolution::TimeGrid;
use crate::resolvent::PATH_GUARD;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringQuery {
    pub i: usize,
    pub j: usize,
    pub tau: f64,
}

impl ScatteringQuery {
    pub fn new(i: usize, j: usize, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid(format!("tau must be positive, got {tau}")));
        }
        Ok(ScatteringQuery { i, j, tau })
    }

    /// λ_τ = (λᵢ+λⱼ)/2 − iτ.
    pub fn lambda_tau(&self, eig: &SpectralDecomposition) -> C64 {
        c64(0.5 * (eig.eigenvalues[self.i] + eig.eigenvalues[self.j]), -self.tau)
    }

    /// iτ / (¼(λᵢ−λⱼ)² + τ²).
    pub fn prefactor(&self, eig: &SpectralDecomposition) -> C64 {
        let d = eig.eigenvalues[self.i] - eig.eigenvalues[self.j];
        c64(0.0, self.tau) / (0.25 * d * d + self.tau * self.tau)
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.i >= n || self.j >= n {
            return Err(Error::invalid(format!(
                "entry ({}, {}) outside dimension {n}",
                self.i, self.j
            )));
        }
        Ok(())
    }
}

fn prepare(a: &CMatrix, b: &CMatrix, q: &ScatteringQuery) -> Result<SpectralDecomposition> {
    let n = ensure_same_shape(a, b)?;
    ensure_hermitian(a)?;
    q.check(n)?;
    eigenbasis(a)
}

/// iτ⟨vᵢ, (A+B−λ_τ)⁻¹vⱼ⟩ by a direct solve.
pub fn s_entry_resolvent(a: &CMatrix, b: &CMatrix, q: &ScatteringQuery) -> Result<C64> {
    let eig = prepare(a, b, q)?;
    let n = eig.dim();
    let shifted = a + b - CMatrix::identity(n, n) * q.lambda_tau(&eig);
    let x = solve(&shifted, &eig.eigenvector(q.j))?;
    Ok(c64(0.0, q.tau) * inner(&eig.eigenvector(q.i), &x))
}

/// 2τ∫₀^T e^{−2τt} e^{−it(λᵢ+λⱼ)} ⟨vᵢ, e^{2it(A+B)} vⱼ⟩ dt by composite Simpson on
/// `g` (T = g.t_end), with e^{2it(A+B)} applied through the eigendecomposition of A+B.
pub fn s_entry_time_average(a: &CMatrix, b: &CMatrix, q: &ScatteringQuery, g: &TimeGrid) -> Result<C64> {
    let eig = prepare(a, b, q)?;
    let h_eig = eig_hermitian(&(a + b))?;
    let ci = h_eig.eigenvectors.adjoint() * eig.eigenvector(q.i);
    let cj = h_eig.eigenvectors.adjoint() * eig.eigenvector(q.j);
    let weights: Vec<C64> = ci.iter().zip(cj.iter()).map(|(x, y)| x.conj() * y).collect();
    let shift = eig.eigenvalues[q.i] + eig.eigenvalues[q.j];
    let rate = 2.0 * q.tau;
    let integrand = |t: f64| -> C64 {
        let s: C64 = weights
            .iter()
            .zip(&h_eig.eigenvalues)
            .map(|(w, &mu)| w * C64::from_polar(1.0, t * (2.0 * mu - shift)))
            .sum();
        s * (-rate * t).exp()
    };
    let h = g.step();
    let mut acc = c64(0.0, 0.0);
    for k in 0..g.steps {
        let t = k as f64 * h;
        acc += (integrand(t) + integrand(t + 0.5 * h) * 4.0 + integrand(t + h)) * (h / 6.0);
    }
    Ok(acc * rate)
}

/// e^{−2τT}, the truncation allowance of the Abel average at horizon T.
pub fn abel_truncation_bound(tau: f64, t_max: f64) -> f64 {
    (-2.0 * tau * t_max).exp()
}

#[derive(Debug, Clone)]
pub struct ScatteringSeries {
    pub terms: Vec<C64>,
    pub query: ScatteringQuery,
    /// ‖(A−λ_τ)⁻¹B‖.
    pub ratio: f64,
    pub convergent: bool,
}

impl ScatteringSeries {
    pub fn partial_sum(&self, k: usize) -> C64 {
        self.terms.iter().take(k + 1).sum()
    }

    /// r^{K+1}/(1−r)·τ·‖(A−λ_τ)⁻¹‖ for the partial sum through order K.
    pub fn tail_bound(&self, k: usize, resolvent_norm: f64) -> f64 {
        if !self.convergent {
            return f64::INFINITY;
        }
        self.ratio.powi(k as i32 + 1) / (1.0 - self.ratio) * self.query.tau * resolvent_norm
    }
}

/// S⁽ᵏ⁾(τ) for k = 0..=K, by repeated application of B(λ_τ−A)⁻¹ in the eigenbasis of A.
pub fn s_series(a: &CMatrix, b: &CMatrix, q: &ScatteringQuery, order: usize) -> Result<ScatteringSeries> {
    let eig = prepare(a, b, q)?;
    let n = eig.dim();
    let bt = if is_diagonal(a) {
        b.clone()
    } else {
        eig.eigenvectors.adjoint() * b * &eig.eigenvectors
    };
    let lt = q.lambda_tau(&eig);
    let inv: Vec<C64> = eig.eigenvalues.iter().map(|&l| 1.0 / (lt - l)).collect();
    let itau = c64(0.0, q.tau);
    let front = -itau * inv[q.i];
    let mut y = CVector::zeros(n);
    y[q.j] = c64(1.0, 0.0);
    let mut terms = Vec::with_capacity(order + 1);
    terms.push(front * y[q.i]);
    for _ in 0..order {
        let scaled = CVector::from_fn(n, |k, _| inv[k] * y[k]);
        y = &bt * scaled;
        terms.push(front * y[q.i]);
    }
    let step = CMatrix::from_fn(n, n, |r, c| -inv[r] * bt[(r, c)]);
    let ratio = op_norm(&step)?;
    Ok(ScatteringSeries {
        terms,
        query: *q,
        ratio,
        convergent: ratio < 1.0,
    })
}

/// ‖(A−λ_τ)⁻¹‖ = 1/min_k |λ_k − λ_τ| for Hermitian A.
pub fn shifted_resolvent_norm(a: &CMatrix, q: &ScatteringQuery) -> Result<f64> {
    let eig = eigenbasis(a)?;
    q.check(eig.dim())?;
    let lt = q.lambda_tau(&eig);
    Ok(eig
        .eigenvalues
        .iter()
        .map(|&l| 1.0 / (c64(l, 0.0) - lt).norm())
        .fold(0.0, f64::max))
}

/// Term ℓ ≥ 1 for diagonal A as an explicit index sum:
///
/// S⁽ˡ⁾ = (−1)^{ℓ+1} · iτ/(¼(λᵢ−λⱼ)²+τ²) · Σ_{k₁..k_{ℓ−1}} B_{ik₁}B_{k₁k₂}⋯B_{k_{ℓ−1}j} / Π_a (λ_{k_a} − λ_τ).
pub fn s_term_index_sum(a: &CMatrix, b: &CMatrix, q: &ScatteringQuery, ell: usize) -> Result<C64> {
    let n = ensure_same_shape(a, b)?;
    if !is_diagonal(a) {
        return Err(Error::invalid("index sums need a diagonal A"));
    }
    q.check(n)?;
    if ell == 0 {
        return Err(Error::invalid("index sums start at order 1"));
    }
    let count = (n as f64).powi(ell as i32 - 1);
    if count > PATH_GUARD {
        return Err(Error::EnumerationGuard {
            count,
            limit: PATH_GUARD,
        });
    }
    let eig = eigenbasis(a)?;
    let lt = q.lambda_tau(&eig);
    let den: Vec<C64> = eig.eigenvalues.iter().map(|&l| 1.0 / (c64(l, 0.0) - lt)).collect();

    fn walk(b: &CMatrix, den: &[C64], from: usize, j: usize, left: usize, weight: C64) -> C64 {
        if left == 0 {
            return weight * b[(from, j)];
        }
        let mut acc = c64(0.0, 0.0);
        for k in 0..den.len() {
            let w = b[(from, k)];
            if w == c64(0.0, 0.0) {
                continue;
            }
            acc += walk(b, den, k, j, left - 1, weight * w * den[k]);
        }
        acc
    }

    let sum = walk(b, &den, q.i, q.j, ell - 1, c64(1.0, 0.0));
    let sign = if ell % 2 == 1 { 1.0 } else { -1.0 };
    Ok(q.prefactor(&eig) * sum * sign)
}
