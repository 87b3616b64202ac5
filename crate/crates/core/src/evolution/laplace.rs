use crate::error::{Error, Result};
use crate::matcore::{c64, contour_integrate, ensure_same_shape, expm, solve_matrix, CMatrix, ContourSpec, C64};

use super::integrate::TimeGrid;

/// −i∫₀^T e^{it(A+B) − τt} dt by composite Simpson on `g` (T = g.t_end). It
/// approaches (A+B+iτ)⁻¹ as T grows; see [`laplace_truncation_bound`].
pub fn laplace_resolvent_bridge(a: &CMatrix, b: &CMatrix, tau: f64, g: &TimeGrid) -> Result<CMatrix> {
    let n = ensure_same_shape(a, b)?;
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let h = g.step();
    let generator = (a + b) * c64(0.0, 0.5 * h) - CMatrix::identity(n, n) * c64(0.5 * h * tau, 0.0);
    let half = expm(&generator)?;
    let mut cur = CMatrix::identity(n, n);
    let mut acc = CMatrix::zeros(n, n);
    for _ in 0..g.steps {
        let mid = &cur * &half;
        let end = &mid * &half;
        acc += (&cur + &mid * c64(4.0, 0.0) + &end) * c64(h / 6.0, 0.0);
        cur = end;
    }
    Ok(acc * c64(0.0, -1.0))
}

/// 2e^{−τT}/τ, the truncation allowance of the bridge at horizon T.
pub fn laplace_truncation_bound(tau: f64, t_max: f64) -> f64 {
    2.0 * (-tau * t_max).exp() / tau
}

/// f(A+B) = (1/2πi)∮ f(z) (z − A − B)⁻¹ dz.
///
/// The contour must enclose the whole spectrum, checked by quadrature of
/// Tr((z − A − B)⁻¹) = n.
pub fn holomorphic_calculus(
    a: &CMatrix,
    b: &CMatrix,
    f: impl Fn(C64) -> C64,
    c: &ContourSpec,
) -> Result<CMatrix> {
    let n = ensure_same_shape(a, b)?;
    let m = a + b;
    let eye = CMatrix::identity(n, n);
    let resolvent = |z: C64| solve_matrix(&(&eye * z - &m), &eye);
    let count = contour_integrate(|z| Ok(resolvent(z)?.trace()), c)?;
    if (count - c64(n as f64, 0.0)).norm() > 1e-6 {
        return Err(Error::ContourEnclosure {
            expected: n,
            found: count.re,
        });
    }
    contour_integrate(|z| Ok(resolvent(z)? * f(z)), c)
}
