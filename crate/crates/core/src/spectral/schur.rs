use crate::error::{Error, Result};
use crate::matcore::{
    c64, eig_hermitian, eigenbasis, ensure_hermitian, ensure_same_shape, inner, op_norm, solve,
    CMatrix, CVector, C64,
};

use super::eigenvalue::EigenPerturbationSeries;

/// A + B written in the orthonormal basis W = [v | Q], where v is the i-th
/// eigenvector of A and Q spans the remaining eigenvectors:
///
/// W*(A+B)W = [[λ + ⟨v,Bv⟩, b*], [b, A≠ + B≠]],  b = Q*Bv.
///
/// A≠ is diagonal because Q is made of eigenvectors of A.
#[derive(Debug, Clone)]
pub struct SchurData {
    pub lambda0: f64,
    pub diag_coupling: C64,
    pub b: CVector,
    pub a_perp: CMatrix,
    pub b_perp: CMatrix,
    pub v: CVector,
    /// Q, the n×(n−1) isometry onto the orthocomplement of v.
    pub complement: CMatrix,
}

impl SchurData {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn block(&self) -> CMatrix {
        &self.a_perp + &self.b_perp
    }

    /// The (n×n) block matrix [[λ+⟨v,Bv⟩, b*],[b, A≠+B≠]].
    pub fn block_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        m[(0, 0)] = c64(self.lambda0, 0.0) + self.diag_coupling;
        m.view_mut((1, 0), (n - 1, 1)).copy_from(&self.b);
        m.view_mut((0, 1), (1, n - 1)).copy_from(&self.b.adjoint());
        m.view_mut((1, 1), (n - 1, n - 1)).copy_from(&self.block());
        m
    }

    /// W = [v | Q].
    pub fn basis(&self) -> CMatrix {
        let n = self.dim();
        let mut w = CMatrix::zeros(n, n);
        w.column_mut(0).copy_from(&self.v);
        w.view_mut((0, 1), (n, n - 1)).copy_from(&self.complement);
        w
    }

    /// Maps complement coordinates back to the original space.
    pub fn lift(&self, x: &CVector) -> CVector {
        &self.complement * x
    }

    fn shifted_block(&self, z: C64) -> CMatrix {
        let n = self.dim() - 1;
        self.block() - CMatrix::identity(n, n) * z
    }

    /// (A≠+B≠−z)⁻¹b.
    fn resolved_b(&self, z: C64) -> Result<CVector> {
        solve(&self.shifted_block(z), &self.b)
    }
}

pub fn schur_split(a: &CMatrix, b: &CMatrix, i: usize) -> Result<SchurData> {
    let n = ensure_same_shape(a, b)?;
    ensure_hermitian(a)?;
    if i >= n {
        return Err(Error::invalid(format!("index {i} outside dimension {n}")));
    }
    let eig = eigenbasis(a)?;
    let v = eig.eigenvector(i);
    let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let complement = CMatrix::from_fn(n, n - 1, |r, c| eig.eigenvectors[(r, rest[c])]);
    let bv = b * &v;
    let a_perp = CMatrix::from_fn(n - 1, n - 1, |r, c| {
        if r == c {
            c64(eig.eigenvalues[rest[r]], 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    Ok(SchurData {
        lambda0: eig.eigenvalues[i],
        diag_coupling: inner(&v, &bv),
        b: complement.adjoint() * bv,
        b_perp: complement.adjoint() * b * &complement,
        a_perp,
        v,
        complement,
    })
}

/// Σ(z) = ⟨b, (A≠+B≠−z)⁻¹ b⟩.
pub fn self_energy(s: &SchurData, z: C64) -> Result<C64> {
    if s.b.iter().all(|x| *x == c64(0.0, 0.0)) {
        return Ok(c64(0.0, 0.0));
    }
    Ok(inner(&s.b, &s.resolved_b(z)?))
}

pub const FIXED_POINT_MAX_ITER: usize = 100;

/// Solves λ̂ − λ − ⟨v,Bv⟩ + Σ(λ̂) = 0 for the root continuing λ.
///
/// F(x) = x − λ − ⟨v,Bv⟩ + Σ_k |c_k|²/(μ_k − x) is increasing between the poles
/// μ_k of A≠+B≠ (c = eigen-coordinates of b), so the pole interval containing the
/// start λ + ⟨v,Bv⟩ holds exactly one root. Newton steps are kept inside a
/// shrinking bracket.
pub fn fixed_point_eigenvalue(s: &SchurData) -> Result<f64> {
    let start = s.lambda0 + s.diag_coupling.re;
    if s.dim() == 1 || s.b.norm() == 0.0 {
        return Ok(start);
    }
    let block = s.block();
    ensure_hermitian(&block)?;
    let eig = eig_hermitian(&block)?;
    let coords = eig.eigenvectors.adjoint() * &s.b;
    let b2 = s.b.norm_squared();
    let poles: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .zip(coords.iter())
        .map(|(&mu, c)| (mu, c.norm_sqr()))
        .filter(|&(_, w)| w > 1e-24 * b2)
        .collect();

    let f = |x: f64| -> (f64, f64) {
        let mut val = x - start;
        let mut der = 1.0;
        for &(mu, w) in &poles {
            let d = mu - x;
            val += w / d;
            der += w / (d * d);
        }
        (val, der)
    };

    let below = poles.iter().map(|p| p.0).filter(|&mu| mu < start).fold(f64::NEG_INFINITY, f64::max);
    let above = poles.iter().map(|p| p.0).filter(|&mu| mu > start).fold(f64::INFINITY, f64::min);
    if poles.iter().any(|p| p.0 == start) {
        return Err(Error::Convergence {
            iterations: 0,
            what: "starting point sits on a pole of the self-energy".into(),
        });
    }
    // Finite bracket: F(lo) < 0 < F(hi).
    let scale = 1.0 + start.abs() + b2.sqrt();
    let mut lo = if below.is_finite() { below } else { start - scale };
    let mut hi = if above.is_finite() { above } else { start + scale };
    while !below.is_finite() && f(lo).0 >= 0.0 {
        lo = start - 2.0 * (start - lo);
    }
    while !above.is_finite() && f(hi).0 <= 0.0 {
        hi = start + 2.0 * (hi - start);
    }

    let tol = 1e-14 * scale;
    let mut x = start;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let (val, der) = f(x);
        if val.abs() <= tol {
            return Ok(x);
        }
        if val < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - val / der;
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * scale {
            break;
        }
    }
    let (val, _) = f(x);
    if val.abs() <= 1e-12 * scale {
        return Ok(x);
    }
    Err(Error::Convergence {
        iterations: FIXED_POINT_MAX_ITER,
        what: format!("self-energy fixed point (residual {val:.3e})"),
    })
}

/// ṽ(z) = v + Q(z − A≠ − B≠)⁻¹b in the original coordinates.
pub fn eigenvector_tilde(s: &SchurData, z: C64) -> Result<CVector> {
    if s.dim() == 1 {
        return Ok(s.v.clone());
    }
    let x = -s.resolved_b(z)?;
    Ok(&s.v + s.lift(&x))
}

#[derive(Debug, Clone)]
pub struct EigenvectorSeries {
    /// Term ℓ = 1..L in complement coordinates:
    /// (−1)^ℓ [(A≠−λ̂)⁻¹B≠]^{ℓ−1} (A≠−λ̂)⁻¹ b.
    pub terms: Vec<CVector>,
    /// ‖(A≠−λ̂)⁻¹B≠‖.
    pub ratio: f64,
    pub convergent: bool,
}

impl EigenvectorSeries {
    pub fn partial_sum(&self, l: usize) -> CVector {
        let n = self.terms.first().map_or(0, |t| t.len());
        self.terms.iter().take(l).fold(CVector::zeros(n), |acc, t| acc + t)
    }
}

/// Terms whose sum is −(A≠+B≠−λ̂)⁻¹b = v̂≠/⟨v,v̂⟩.
pub fn eigenvector_series(s: &SchurData, lambda_hat: f64, l: usize) -> Result<EigenvectorSeries> {
    let m = s.dim() - 1;
    let dinv: Vec<C64> = (0..m)
        .map(|k| {
            let d = s.a_perp[(k, k)].re - lambda_hat;
            if d == 0.0 {
                Err(Error::Singular {
                    sigma_min: 0.0,
                    norm: s.a_perp.norm(),
                })
            } else {
                Ok(c64(1.0 / d, 0.0))
            }
        })
        .collect::<Result<_>>()?;
    let step = CMatrix::from_fn(m, m, |r, c| dinv[r] * s.b_perp[(r, c)]);
    let ratio = if m == 0 { 0.0 } else { op_norm(&step)? };
    let mut terms = Vec::with_capacity(l);
    let mut cur = CVector::from_fn(m, |k, _| -dinv[k] * s.b[k]);
    for _ in 0..l {
        terms.push(cur.clone());
        cur = -(&step * &cur);
    }
    Ok(EigenvectorSeries {
        terms,
        ratio,
        convergent: ratio < 1.0,
    })
}

/// |⟨v,v̂⟩|² from both normalization routes.
#[derive(Debug, Clone, Copy)]
pub struct OverlapForms {
    /// 1/(1 + ‖(A≠+B≠−λ̂)⁻¹b‖²), by a linear solve.
    pub norm_form: f64,
    /// 1/(1 + Σ'(λ̂)) with Σ'(λ̂) = ⟨b,(A≠+B≠−λ̂)⁻²b⟩ from the eigendecomposition
    /// of A≠+B≠.
    pub derivative_form: f64,
}

pub fn overlap_squared(s: &SchurData, lambda_hat: f64) -> Result<OverlapForms> {
    if s.dim() == 1 || s.b.norm() == 0.0 {
        return Ok(OverlapForms {
            norm_form: 1.0,
            derivative_form: 1.0,
        });
    }
    let x = s.resolved_b(c64(lambda_hat, 0.0))?;
    let eig = eig_hermitian(&s.block())?;
    let coords = eig.eigenvectors.adjoint() * &s.b;
    let mut deriv = 0.0;
    for (&mu, c) in eig.eigenvalues.iter().zip(coords.iter()) {
        let d = mu - lambda_hat;
        if d == 0.0 {
            return Err(Error::Singular {
                sigma_min: 0.0,
                norm: eig.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs())),
            });
        }
        deriv += c.norm_sqr() / (d * d);
    }
    Ok(OverlapForms {
        norm_form: 1.0 / (1.0 + x.norm_squared()),
        derivative_form: 1.0 / (1.0 + deriv),
    })
}

/// ⟨v̂, C ŵ⟩ = ⟨ṽ(λ̂), C w̃(μ̂)⟩ / (‖ṽ(λ̂)‖ ‖w̃(μ̂)‖).
pub fn sandwich(sv: &SchurData, sw: &SchurData, c: &CMatrix) -> Result<C64> {
    let n = sv.dim();
    if sw.dim() != n || c.nrows() != n || c.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "splits of size {} and {} with a {}x{} operator",
            n,
            sw.dim(),
            c.nrows(),
            c.ncols()
        )));
    }
    let vt = eigenvector_tilde(sv, c64(fixed_point_eigenvalue(sv)?, 0.0))?;
    let wt = eigenvector_tilde(sw, c64(fixed_point_eigenvalue(sw)?, 0.0))?;
    Ok(inner(&vt, &(c * &wt)) / (vt.norm() * wt.norm()))
}

/// Order-by-order eigenvector coefficients v̂⁽⁰⁾..v̂⁽ᴷ⁾ of the unit eigenvector of
/// A + εB continuing v, in the gauge ⟨v,v̂⟩ > 0, for a split of (A, B).
///
/// With D₀ = λ − A≠ and E_k = λ⁽ᵏ⁾ − δ_{k1}B≠, the resolvent
/// (λ̂(ε) − A≠ − εB≠)⁻¹ = Σ εᵏ R_k obeys R₀ = D₀⁻¹, R_k = −D₀⁻¹ Σ_{j=1..k} E_j R_{k−j},
/// and the unnormalized vector is ṽ = v + Σ_{ℓ≥1} εˡ Q R_{ℓ−1} b. The normalization
/// ‖ṽ‖⁻¹ is expanded as a power series as well.
pub fn eigenvector_coefficients(
    s: &SchurData,
    lambda_series: &EigenPerturbationSeries,
    order: usize,
) -> Result<Vec<CVector>> {
    if lambda_series.coefficients.len() < order.max(1) {
        return Err(Error::invalid(format!(
            "eigenvector order {order} needs eigenvalue coefficients through order {}",
            order.saturating_sub(1)
        )));
    }
    if (lambda_series.coefficients[0] - s.lambda0).abs() > 1e-9 * (1.0 + s.lambda0.abs()) {
        return Err(Error::invalid(
            "eigenvalue series does not belong to this split",
        ));
    }
    let m = s.dim() - 1;
    let d0: Vec<f64> = (0..m).map(|k| s.lambda0 - s.a_perp[(k, k)].re).collect();
    if d0.contains(&0.0) {
        return Err(Error::invalid("target eigenvalue is degenerate"));
    }
    let lam = &lambda_series.coefficients;

    // Unnormalized coefficients in complement coordinates (index 0 is the v part).
    let mut r: Vec<CMatrix> = Vec::with_capacity(order);
    let mut tilde: Vec<(C64, CVector)> = vec![(c64(1.0, 0.0), CVector::zeros(m))];
    for k in 0..order {
        let mut rk = CMatrix::zeros(m, m);
        if k == 0 {
            for p in 0..m {
                rk[(p, p)] = c64(1.0 / d0[p], 0.0);
            }
        } else {
            let mut acc = CMatrix::zeros(m, m);
            for j in 1..=k {
                let mut ej_r = &r[k - j] * c64(lam[j], 0.0);
                if j == 1 {
                    ej_r -= &s.b_perp * &r[k - 1];
                }
                acc += ej_r;
            }
            for p in 0..m {
                for q in 0..m {
                    rk[(p, q)] = -acc[(p, q)] / d0[p];
                }
            }
        }
        tilde.push((c64(0.0, 0.0), &rk * &s.b));
        r.push(rk);
    }

    let dot = |x: &(C64, CVector), y: &(C64, CVector)| x.0.conj() * y.0 + inner(&x.1, &y.1);
    let norm: Vec<f64> = (0..=order)
        .map(|k| (0..=k).map(|a| dot(&tilde[a], &tilde[k - a]).re).sum())
        .collect();
    // f = norm^{-1/2}
    let alpha = -0.5;
    let mut f = vec![norm[0].powf(alpha)];
    for k in 1..=order {
        let sum: f64 = (1..=k)
            .map(|j| ((alpha + 1.0) * j as f64 - k as f64) * norm[j] * f[k - j])
            .sum();
        f.push(sum / (k as f64 * norm[0]));
    }

    Ok((0..=order)
        .map(|k| {
            let mut head = c64(0.0, 0.0);
            let mut tail = CVector::zeros(m);
            for a in 0..=k {
                head += tilde[k - a].0 * f[a];
                tail += &tilde[k - a].1 * c64(f[a], 0.0);
            }
            &s.v * head + s.lift(&tail)
        })
        .collect())
}

/// σ_k = Σ_{ℓ=0..k} ⟨v̂⁽ℓ⁾, v̂⁽ᵏ⁻ℓ⁾⟩ for k = 1..=K, which vanish because ‖v̂(ε)‖ = 1.
pub fn cancellation_check(
    s: &SchurData,
    lambda_series: &EigenPerturbationSeries,
    order: usize,
) -> Result<Vec<f64>> {
    let coeffs = eigenvector_coefficients(s, lambda_series, order)?;
    Ok((1..=order)
        .map(|k| {
            (0..=k)
                .map(|l| inner(&coeffs[l], &coeffs[k - l]))
                .sum::<C64>()
                .norm()
        })
        .collect())
}
