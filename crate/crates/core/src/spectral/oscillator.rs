//! Finite-difference anharmonic oscillator −Δ + X² + εX⁴ on [−10, 10] with
//! Dirichlet boundaries, expanded either around −Δ + X² or around the
//! reparameterized −Δ + (1+η)X².

use crate::error::{Error, Result};
use crate::matcore::{c64, eig_hermitian, inner, CMatrix};

use super::eigenvalue::eigenvalue_coefficients;

pub const HALF_WIDTH: f64 = 10.0;

/// Gaussian moment ∫x⁴e^{−x²}dx / ∫e^{−x²}dx.
pub const GAUSSIAN_X4: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct OscillatorGrid {
    pub points: Vec<f64>,
    pub spacing: f64,
}

impl OscillatorGrid {
    pub fn new(grid_size: usize) -> Result<Self> {
        if grid_size < 3 {
            return Err(Error::invalid("grid needs at least 3 interior points"));
        }
        let spacing = 2.0 * HALF_WIDTH / (grid_size + 1) as f64;
        let points = (1..=grid_size).map(|k| -HALF_WIDTH + k as f64 * spacing).collect();
        Ok(OscillatorGrid { points, spacing })
    }

    /// Three-point −Δ.
    pub fn kinetic(&self) -> CMatrix {
        let n = self.points.len();
        let h2 = self.spacing * self.spacing;
        CMatrix::from_fn(n, n, |r, c| match r.abs_diff(c) {
            0 => c64(2.0 / h2, 0.0),
            1 => c64(-1.0 / h2, 0.0),
            _ => c64(0.0, 0.0),
        })
    }

    pub fn power(&self, p: i32) -> CMatrix {
        let diag: Vec<f64> = self.points.iter().map(|x| x.powi(p)).collect();
        crate::matcore::diag_real(&diag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaChoice {
    Fixed(f64),
    /// η chosen so that ⟨v', B'v'⟩ = 0 for the ground state v' of A'.
    Auto,
}

#[derive(Debug, Clone)]
pub struct OscillatorReport {
    pub grid_size: usize,
    pub epsilon: f64,
    pub eta: f64,
    /// Ground-state λ⁽¹⁾ of X⁴ around −Δ + X², to compare with [`GAUSSIAN_X4`].
    pub first_order_x4: f64,
    /// Coefficients of A + εX⁴ in powers of ε around −Δ + X².
    pub plain_coefficients: Vec<f64>,
    /// Coefficients of A' + sB' in powers of s, evaluated at s = 1.
    pub shifted_coefficients: Vec<f64>,
    /// ⟨v', B'v'⟩.
    pub shifted_mean_coupling: f64,
    pub plain_series: f64,
    pub shifted_series: f64,
    /// Ground eigenvalue of the discretized −Δ + X² + εX⁴.
    pub exact: f64,
}

fn ground_mean(grid: &OscillatorGrid, eps: f64, eta: f64) -> Result<f64> {
    let a = grid.kinetic() + grid.power(2) * c64(1.0 + eta, 0.0);
    let b = grid.power(4) * c64(eps, 0.0) - grid.power(2) * c64(eta, 0.0);
    let v = eig_hermitian(&a)?.eigenvector(0);
    Ok(inner(&v, &(&b * &v)).re)
}

/// Root of η ↦ ⟨v'_η, B'_η v'_η⟩ by secant steps from the Gaussian estimate
/// η = 3ε/(2√(1+η)).
fn auto_eta(grid: &OscillatorGrid, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let mut eta = 0.0f64;
    for _ in 0..50 {
        eta = 1.5 * eps / (1.0 + eta).sqrt();
    }
    let mut x0 = eta;
    let mut f0 = ground_mean(grid, eps, x0)?;
    let mut x1 = eta * 1.01;
    let mut f1 = ground_mean(grid, eps, x1)?;
    for _ in 0..30 {
        if f1.abs() < 1e-13 || f1 == f0 {
            return Ok(x1);
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = ground_mean(grid, eps, x1)?;
    }
    if f1.abs() < 1e-10 {
        Ok(x1)
    } else {
        Err(Error::Convergence {
            iterations: 30,
            what: format!("reparameterization eta (mean coupling {f1:.3e})"),
        })
    }
}

pub fn oscillator_demo(
    grid_size: usize,
    epsilon: f64,
    eta: EtaChoice,
    order: usize,
) -> Result<OscillatorReport> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let grid = OscillatorGrid::new(grid_size)?;
    let eta = match eta {
        EtaChoice::Fixed(e) if e > -1.0 => e,
        EtaChoice::Fixed(e) => return Err(Error::invalid(format!("eta must exceed -1, got {e}"))),
        EtaChoice::Auto => auto_eta(&grid, epsilon)?,
    };
    let kinetic = grid.kinetic();
    let x2 = grid.power(2);
    let x4 = grid.power(4);

    let a = &kinetic + &x2;
    let plain = eigenvalue_coefficients(&a, &x4, 0, order, None)?;

    let a_shift = &kinetic + &x2 * c64(1.0 + eta, 0.0);
    let b_shift = &x4 * c64(epsilon, 0.0) - &x2 * c64(eta, 0.0);
    let shifted = eigenvalue_coefficients(&a_shift, &b_shift, 0, order, None)?;

    let exact = eig_hermitian(&(&a + &x4 * c64(epsilon, 0.0)))?.eigenvalues[0];
    let first_order_x4 = plain.coefficients.get(1).copied().unwrap_or(f64::NAN);
    Ok(OscillatorReport {
        grid_size,
        epsilon,
        eta,
        first_order_x4,
        shifted_mean_coupling: shifted.coefficients.get(1).copied().unwrap_or(f64::NAN),
        plain_series: plain.evaluate(epsilon),
        shifted_series: shifted.evaluate(1.0),
        plain_coefficients: plain.coefficients,
        shifted_coefficients: shifted.coefficients,
        exact,
    })
}
