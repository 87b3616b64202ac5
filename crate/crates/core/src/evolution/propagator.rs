use crate::error::{Error, Result};
use crate::matcore::{ensure_square, hermitian_defect, CMatrix, HERMITIAN_RTOL};

use super::integrate::magnus_step;

/// U(s, t) solving i∂ₜU = (A + B(t))U, U(s, s) = I, with `steps` unitary
/// fourth-order Magnus steps.
pub fn propagator_time_dependent(
    a: &CMatrix,
    b_of_t: &dyn Fn(f64) -> CMatrix,
    s: f64,
    t: f64,
    steps: usize,
) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    if !(s <= t) {
        return Err(Error::invalid(format!("propagator needs s <= t, got s = {s}, t = {t}")));
    }
    if steps == 0 {
        return Err(Error::invalid("propagator needs at least one step"));
    }
    let probe = b_of_t(s);
    if probe.nrows() != n || probe.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "B(t) is {}x{}, A is {n}x{n}",
            probe.nrows(),
            probe.ncols()
        )));
    }
    let h = a + probe;
    let scale = crate::matcore::spectral_norm(&h).max(1.0);
    let defect = hermitian_defect(&h);
    if defect > HERMITIAN_RTOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let hamiltonian = |tau: f64| a + b_of_t(tau);
    let dt = (t - s) / steps as f64;
    let mut u = CMatrix::identity(n, n);
    for k in 0..steps {
        u = magnus_step(&hamiltonian, s + k as f64 * dt, dt)? * u;
    }
    Ok(u)
}
