use crate::error::{Error, Result};
use crate::matcore::{c64, expm, CMatrix};

/// Uniform grid on [0, t_end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub const MIN_STEPS: usize = 8;

    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::invalid(format!("time must be finite and nonnegative, got {t_end}")));
        }
        if steps < Self::MIN_STEPS {
            return Err(Error::invalid(format!(
                "time grid needs at least {} steps, got {steps}",
                Self::MIN_STEPS
            )));
        }
        Ok(TimeGrid { t_end, steps })
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn refined(&self) -> TimeGrid {
        TimeGrid {
            t_end: self.t_end,
            steps: 2 * self.steps,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| k as f64 * self.step())
    }
}

/// Classical fourth-order Runge–Kutta for a system of matrices y' = f(t, y).
pub(crate) fn rk4<F>(mut y: Vec<CMatrix>, t0: f64, t1: f64, steps: usize, f: F) -> Vec<CMatrix>
where
    F: Fn(f64, &[CMatrix]) -> Vec<CMatrix>,
{
    let h = (t1 - t0) / steps as f64;
    let axpy = |y: &[CMatrix], k: &[CMatrix], s: f64| -> Vec<CMatrix> {
        y.iter().zip(k).map(|(a, b)| a + b * c64(s, 0.0)).collect()
    };
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for (idx, yi) in y.iter_mut().enumerate() {
            let incr = &k1[idx] + (&k2[idx] + &k3[idx]) * c64(2.0, 0.0) + &k4[idx];
            *yi += incr * c64(h / 6.0, 0.0);
        }
    }
    y
}

/// Runs [`rk4`] with `steps` and `2·steps`, returns the Richardson combination
/// fine + (fine − coarse)/15 and the estimate max‖fine − coarse‖/15 of the
/// error of the fine run.
pub(crate) fn rk4_extrapolated<F>(y: Vec<CMatrix>, t0: f64, t1: f64, steps: usize, f: F) -> (Vec<CMatrix>, f64)
where
    F: Fn(f64, &[CMatrix]) -> Vec<CMatrix>,
{
    let coarse = rk4(y.clone(), t0, t1, steps, &f);
    let fine = rk4(y, t0, t1, 2 * steps, &f);
    let mut err: f64 = 0.0;
    let out = coarse
        .iter()
        .zip(fine)
        .map(|(c, fi)| {
            let diff = &fi - c;
            err = err.max(diff.norm() / 15.0);
            fi + diff * c64(1.0 / 15.0, 0.0)
        })
        .collect();
    (out, err)
}

/// Fourth-order commutator Magnus step for U' = −iH(t)U over [t, t+h]:
/// exp(−i h/2 (H₁+H₂) − (√3/12) h² [H₂, H₁]) with H at the two Gauss nodes.
/// The step is unitary whenever H is Hermitian.
pub(crate) fn magnus_step(hamiltonian: &dyn Fn(f64) -> CMatrix, t: f64, h: f64) -> Result<CMatrix> {
    let d = 3f64.sqrt() / 6.0;
    let h1 = hamiltonian(t + (0.5 - d) * h);
    let h2 = hamiltonian(t + (0.5 + d) * h);
    let comm = &h2 * &h1 - &h1 * &h2;
    let omega = (&h1 + &h2) * c64(0.0, -0.5 * h) - comm * c64(3f64.sqrt() / 12.0 * h * h, 0.0);
    expm(&omega)
}
