//! Operators on product spaces.
//!
//! A Kronecker sum A = A₁⊗I⊗⋯ + ⋯ + I⊗⋯⊗A_n has e^{itA} = ⊗ e^{itA_k}, and for two
//! Hermitian factors its shifted resolvent is a convolution along ω₁ + ω₂ = ω:
//!
//! (A − ω + 2iε)⁻¹ = (i/2π) ∫ (A₁ − ω₁ + iε)⁻¹ ⊗ (A₂ − (ω−ω₁) + iε)⁻¹ dω₁,
//! G(A) = (i/π) ∫ G_ε(A₁, ω₁) ⊗ G_ε(A₂, ω−ω₁) dω₁,
//!
//! with G(A) = (A+2iε)((A+2iε)² − ω²)⁻¹ and G_ε(A_k, ν) = (A_k+iε)((A_k+iε)² − ν²)⁻¹.
//! The block inverses of the free Dirac and Klein–Gordon symbols close the module.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matcore::{c64, eig_hermitian, ensure_hermitian, ensure_square, expm, kron, CMatrix, C64};

#[derive(Debug, Clone)]
pub struct KroneckerSum {
    pub factors: Vec<CMatrix>,
}

impl KroneckerSum {
    pub const MAX_DIM: usize = 4096;

    pub fn new(factors: Vec<CMatrix>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("a Kronecker sum needs at least one factor"));
        }
        for f in &factors {
            ensure_square(f)?;
        }
        let dim: f64 = factors.iter().map(|f| f.nrows() as f64).product();
        if dim > Self::MAX_DIM as f64 {
            return Err(Error::EnumerationGuard {
                count: dim,
                limit: Self::MAX_DIM as f64,
            });
        }
        Ok(KroneckerSum { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.nrows()).product()
    }
}

pub fn kron_sum_materialize(k: &KroneckerSum) -> CMatrix {
    let n = k.dim();
    let mut out = CMatrix::zeros(n, n);
    for (pos, f) in k.factors.iter().enumerate() {
        let mut term = CMatrix::identity(1, 1);
        for (q, g) in k.factors.iter().enumerate() {
            let piece = if q == pos {
                f.clone()
            } else {
                CMatrix::identity(g.nrows(), g.nrows())
            };
            term = kron(&term, &piece);
        }
        out += term;
    }
    out
}

/// ‖e^{itA} − ⊗ e^{itA_k}‖ in the Frobenius norm.
pub fn exp_factorization_check(k: &KroneckerSum, t: f64) -> Result<f64> {
    let whole = expm(&(kron_sum_materialize(k) * c64(0.0, t)))?;
    let mut product = CMatrix::identity(1, 1);
    for f in &k.factors {
        product = kron(&product, &expm(&(f * c64(0.0, t)))?);
    }
    Ok((whole - product).norm())
}

/// Composite trapezoid rule on [−cutoff, cutoff] with `nodes` equally spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineQuadrature {
    pub cutoff: f64,
    pub nodes: usize,
}

impl LineQuadrature {
    pub const MIN_CUTOFF: f64 = 10.0;
    pub const MIN_NODES: usize = 200;

    pub fn new(cutoff: f64, nodes: usize) -> Result<Self> {
        if !(cutoff >= Self::MIN_CUTOFF) || !cutoff.is_finite() {
            return Err(Error::invalid(format!(
                "cutoff must be at least {}, got {cutoff}",
                Self::MIN_CUTOFF
            )));
        }
        if nodes < Self::MIN_NODES {
            return Err(Error::invalid(format!(
                "line quadrature needs at least {} nodes, got {nodes}",
                Self::MIN_NODES
            )));
        }
        Ok(LineQuadrature { cutoff, nodes })
    }

    /// Spacing at most ε/4, which resolves poles at distance ε from the real line.
    pub fn resolving(cutoff: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid(format!("eps must be positive, got {eps}")));
        }
        let nodes = (8.0 * cutoff / eps).ceil() as usize + 1;
        Self::new(cutoff, nodes.max(Self::MIN_NODES))
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.cutoff / (self.nodes - 1) as f64
    }

    fn integrate(&self, f: impl Fn(f64) -> C64) -> C64 {
        let h = self.spacing();
        let mut acc = (f(-self.cutoff) + f(self.cutoff)) * 0.5;
        for m in 1..self.nodes - 1 {
            acc += f(-self.cutoff + m as f64 * h);
        }
        acc * h
    }
}

/// A truncated line integral with an estimate of the discarded tails.
#[derive(Debug, Clone)]
pub struct LineIntegral {
    pub value: CMatrix,
    pub tail_estimate: f64,
}

fn check_pair(k: &KroneckerSum, eps: f64) -> Result<()> {
    if k.factors.len() != 2 {
        return Err(Error::invalid(format!(
            "convolution identities take two factors, got {}",
            k.factors.len()
        )));
    }
    for f in &k.factors {
        ensure_hermitian(f)?;
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Evaluates a factorized kernel in the joint eigenbasis of the two factors: the
/// operator integrand is diagonal there, one scalar line integral per eigenpair.
fn convolve(
    k: &KroneckerSum,
    q: &LineQuadrature,
    kernel: impl Fn(f64, f64, f64) -> C64,
    prefactor: C64,
) -> Result<CMatrix> {
    let e1 = eig_hermitian(&k.factors[0])?;
    let e2 = eig_hermitian(&k.factors[1])?;
    let (n1, n2) = (e1.dim(), e2.dim());
    let v = kron(&e1.eigenvectors, &e2.eigenvectors);
    let mut diag = CMatrix::zeros(n1 * n2, n1 * n2);
    for (r, &a) in e1.eigenvalues.iter().enumerate() {
        for (s, &b) in e2.eigenvalues.iter().enumerate() {
            diag[(r * n2 + s, r * n2 + s)] = prefactor * q.integrate(|w1| kernel(a, b, w1));
        }
    }
    Ok(&v * diag * v.adjoint())
}

/// (i/2π)∫_{−L}^{L} (A₁ − ω₁ + iε)⁻¹ ⊗ (A₂ − (ω−ω₁) + iε)⁻¹ dω₁ ≈ (A − ω + 2iε)⁻¹.
/// The integrand decays like ω₁⁻², so the tails carry about 1/(πL).
pub fn convolution_resolvent(k: &KroneckerSum, omega: f64, eps: f64, q: &LineQuadrature) -> Result<LineIntegral> {
    check_pair(k, eps)?;
    let kernel = |a: f64, b: f64, w1: f64| 1.0 / (c64(a - w1, eps) * c64(b - (omega - w1), eps));
    Ok(LineIntegral {
        value: convolve(k, q, kernel, c64(0.0, 0.5 / PI))?,
        tail_estimate: 1.0 / (PI * q.cutoff),
    })
}

fn even_kernel(lambda: f64, nu: f64, eps: f64) -> C64 {
    let s = c64(lambda, eps);
    s / (s * s - nu * nu)
}

/// (i/π)∫_{−L}^{L} G_ε(A₁, ω₁) ⊗ G_ε(A₂, ω−ω₁) dω₁ ≈ (A+2iε)((A+2iε)² − ω²)⁻¹.
/// The integrand decays like ω₁⁻⁴, so the tails carry about 2‖A₁+iε‖‖A₂+iε‖/(3πL³).
pub fn convolution_resolvent_symmetric(
    k: &KroneckerSum,
    omega: f64,
    eps: f64,
    q: &LineQuadrature,
) -> Result<LineIntegral> {
    check_pair(k, eps)?;
    let kernel = |a: f64, b: f64, w1: f64| even_kernel(a, w1, eps) * even_kernel(b, omega - w1, eps);
    let spread = |m: &CMatrix| -> Result<f64> {
        let e = eig_hermitian(m)?;
        Ok(e.eigenvalues.iter().map(|x| c64(*x, eps).norm()).fold(0.0, f64::max))
    };
    let scale = spread(&k.factors[0])? * spread(&k.factors[1])?;
    Ok(LineIntegral {
        value: convolve(k, q, kernel, c64(0.0, 1.0 / PI))?,
        tail_estimate: 2.0 * scale / (3.0 * PI * q.cutoff.powi(3)),
    })
}

fn pauli() -> [CMatrix; 3] {
    let (o, l, i) = (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0));
    [
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

fn sigma_dot(p: [f64; 3]) -> CMatrix {
    let s = pauli();
    &s[0] * c64(p[0], 0.0) + &s[1] * c64(p[1], 0.0) + &s[2] * c64(p[2], 0.0)
}

fn blocks(tl: CMatrix, tr: CMatrix, bl: CMatrix, br: CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&tl);
    m.view_mut((0, 2), (2, 2)).copy_from(&tr);
    m.view_mut((2, 0), (2, 2)).copy_from(&bl);
    m.view_mut((2, 2), (2, 2)).copy_from(&br);
    m
}

/// The Dirac symbol [[(m−z)I, σ·p], [σ·p, (−m−z)I]].
pub fn dirac_operator(p: [f64; 3], m: f64, z: C64) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let sp = sigma_dot(p);
    blocks(&id * (m - z), sp.clone(), sp, &id * (-m - z))
}

fn check_pole(den: C64, scale: f64) -> Result<()> {
    if den.norm() <= 1e-14 * scale.max(1.0) {
        return Err(Error::Singular {
            sigma_min: den.norm(),
            norm: scale,
        });
    }
    Ok(())
}

/// (m² − z² + p²)⁻¹ [[(m+z)I, σ·p], [σ·p, (−m+z)I]], the inverse of [`dirac_operator`].
pub fn dirac_block_inverse(p: [f64; 3], m: f64, z: C64) -> Result<CMatrix> {
    let p2: f64 = p.iter().map(|x| x * x).sum();
    let den = c64(m * m + p2, 0.0) - z * z;
    check_pole(den, m * m + p2 + z.norm_sqr())?;
    let id = CMatrix::identity(2, 2);
    let sp = sigma_dot(p);
    Ok(blocks(&id * (m + z), sp.clone(), sp, &id * (z - m)) / den)
}

/// The Klein–Gordon block [[−z, a], [a, −z]].
pub fn klein_gordon_operator(a: f64, z: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[-z, c64(a, 0.0), c64(a, 0.0), -z])
}

/// (z² − a²)⁻¹ [[−z, −a], [−a, −z]], the inverse of [`klein_gordon_operator`].
pub fn klein_gordon_block_inverse(a: f64, z: C64) -> Result<CMatrix> {
    let den = z * z - a * a;
    check_pole(den, a * a + z.norm_sqr())?;
    Ok(CMatrix::from_row_slice(2, 2, &[-z, c64(-a, 0.0), c64(-a, 0.0), -z]) / den)
}

/// First-order form [[0, ia], [−ia, 0]] of ∂ₜₜf = −a²f; its square is a²I.
pub fn klein_gordon_first_order(a: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, a), c64(0.0, -a), c64(0.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{diag_real, inverse, op_norm, real_matrix};

    #[test]
    fn materialize_and_spectrum() {
        let a = diag_real(&[1.0, 2.0]);
        let one = KroneckerSum::new(vec![a.clone()]).unwrap();
        assert_eq!(kron_sum_materialize(&one), a);
        let b = diag_real(&[10.0, 20.0, 30.0]);
        let two = KroneckerSum::new(vec![a, b]).unwrap();
        let m = kron_sum_materialize(&two);
        let diag: Vec<f64> = (0..6).map(|k| m[(k, k)].re).collect();
        assert_eq!(diag, vec![11.0, 21.0, 31.0, 12.0, 22.0, 32.0]);
        assert!(KroneckerSum::new(vec![CMatrix::identity(64, 64), CMatrix::identity(65, 65)]).is_err());
    }

    #[test]
    fn exponential_factorizes() {
        let a = real_matrix(2, 2, &[0.3, 0.5, 0.5, -0.2]);
        let b = real_matrix(2, 2, &[1.0, 0.1, 0.1, 0.4]);
        let k = KroneckerSum::new(vec![a, b]).unwrap();
        assert!(exp_factorization_check(&k, 0.0).unwrap() < 1e-15);
        assert!(exp_factorization_check(&k, 1.3).unwrap() < 1e-12);
    }

    #[test]
    fn scalar_convolution() {
        let k = KroneckerSum::new(vec![diag_real(&[1.0]), diag_real(&[2.0])]).unwrap();
        let q = LineQuadrature::resolving(400.0, 0.1).unwrap();
        let r = convolution_resolvent(&k, 0.0, 0.1, &q).unwrap();
        let exact = 1.0 / c64(3.0, 0.2);
        assert!((r.value[(0, 0)] - exact).norm() < 2.0 * r.tail_estimate);
        let shifted = KroneckerSum::new(vec![diag_real(&[1.5]), diag_real(&[2.0])]).unwrap();
        let s = convolution_resolvent(&shifted, 0.5, 0.1, &q).unwrap();
        assert!((s.value[(0, 0)] - r.value[(0, 0)]).norm() < 1e-5);
    }

    #[test]
    fn matrix_convolution_and_even_kernel() {
        let a1 = real_matrix(2, 2, &[0.5, 0.2, 0.2, -0.3]);
        let a2 = real_matrix(2, 2, &[1.0, -0.4, -0.4, 0.2]);
        let k = KroneckerSum::new(vec![a1, a2]).unwrap();
        let eps = 0.2;
        let q = LineQuadrature::resolving(200.0, eps).unwrap();
        let a = kron_sum_materialize(&k);
        let eye = CMatrix::identity(4, 4);
        let direct = inverse(&(&a - &eye * c64(0.7, -2.0 * eps))).unwrap();
        let r = convolution_resolvent(&k, 0.7, eps, &q).unwrap();
        assert!(op_norm(&(r.value - direct)).unwrap() < 1.2 * r.tail_estimate);

        let shifted = &a + &eye * c64(0.0, 2.0 * eps);
        let even = &shifted * inverse(&(&shifted * &shifted - &eye * c64(0.49, 0.0))).unwrap();
        let s = convolution_resolvent_symmetric(&k, 0.7, eps, &q).unwrap();
        assert!((&s.value - even).norm() < 1e-6);
        let mirrored = convolution_resolvent_symmetric(&k, -0.7, eps, &q).unwrap();
        assert!((s.value - mirrored.value).norm() < 1e-8);
    }

    #[test]
    fn block_inverses() {
        let z = c64(0.3, 0.7);
        let p = [0.4, -1.1, 0.25];
        let prod = dirac_operator(p, 1.2, z) * dirac_block_inverse(p, 1.2, z).unwrap();
        assert!((prod - CMatrix::identity(4, 4)).norm() < 1e-14);
        let rest = dirac_block_inverse([0.0; 3], 2.0, z).unwrap();
        assert!((rest[(0, 0)] - 1.0 / (2.0 - z)).norm() < 1e-15);
        assert!((rest[(2, 2)] - 1.0 / (-2.0 - z)).norm() < 1e-15);
        assert!(dirac_block_inverse([0.0; 3], 1.0, c64(1.0, 0.0)).is_err());

        let kg = klein_gordon_operator(0.8, z) * klein_gordon_block_inverse(0.8, z).unwrap();
        assert!((kg - CMatrix::identity(2, 2)).norm() < 1e-15);
        let free = klein_gordon_block_inverse(0.0, z).unwrap();
        assert!((free[(0, 0)] + 1.0 / z).norm() < 1e-15 && free[(0, 1)].norm() == 0.0);
        let f = klein_gordon_first_order(1.7);
        assert!((&f * &f - CMatrix::identity(2, 2) * c64(1.7 * 1.7, 0.0)).norm() < 1e-14);
    }
}
