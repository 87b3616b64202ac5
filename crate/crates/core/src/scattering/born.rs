use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix, C64};

use super::{s_series, ScatteringQuery};

/// One-dimensional discrete torus of `len` sites with A = F(P) in the plane-wave
/// basis and B = V(X) conjugated into the same basis.
#[derive(Debug, Clone)]
pub struct TorusModel {
    pub len: usize,
    /// Momenta 2πk/L for k = −⌊L/2⌋, …, L−1−⌊L/2⌋, the basis order of A and B.
    pub momenta: Vec<f64>,
    pub a: CMatrix,
    pub b: CMatrix,
    potential: Vec<f64>,
}

impl TorusModel {
    pub fn new(len: usize, dispersion: &dyn Fn(f64) -> f64, potential: &dyn Fn(f64) -> f64) -> Result<Self> {
        if len < 4 {
            return Err(Error::invalid(format!("torus needs at least 4 sites, got {len}")));
        }
        let offset = (len / 2) as i64;
        let momenta: Vec<f64> = (0..len as i64)
            .map(|k| 2.0 * PI * (k - offset) as f64 / len as f64)
            .collect();
        let potential: Vec<f64> = (0..len).map(|x| potential(x as f64)).collect();
        let norm = 1.0 / (len as f64).sqrt();
        // Columns are plane waves in position coordinates.
        let u = CMatrix::from_fn(len, len, |x, k| C64::from_polar(norm, momenta[k] * x as f64));
        let v = CMatrix::from_fn(len, len, |r, c| if r == c { c64(potential[r], 0.0) } else { c64(0.0, 0.0) });
        let b = u.adjoint() * v * &u;
        let a = CMatrix::from_fn(len, len, |r, c| {
            if r == c {
                c64(dispersion(momenta[r]), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        Ok(TorusModel {
            len,
            momenta,
            a,
            b,
            potential,
        })
    }

    /// V̂(m) = Σₓ V(x) e^{imx}.
    pub fn potential_transform(&self, m: f64) -> C64 {
        self.potential
            .iter()
            .enumerate()
            .map(|(x, &v)| C64::from_polar(v, m * x as f64))
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BornResult {
    pub series: C64,
    pub closed_form: C64,
}

impl BornResult {
    pub fn difference(&self) -> f64 {
        (self.series - self.closed_form).norm()
    }
}

/// First-order entry for incoming momentum index `p` and outgoing index `q`,
/// from the series and from iτ/(¼(F(p)−F(q))²+τ²) · V̂(p−q)/L.
pub fn born_demo(
    len: usize,
    dispersion: &dyn Fn(f64) -> f64,
    potential: &dyn Fn(f64) -> f64,
    p: usize,
    q: usize,
    tau: f64,
) -> Result<BornResult> {
    let model = TorusModel::new(len, dispersion, potential)?;
    if p >= len || q >= len {
        return Err(Error::invalid(format!("momentum index outside 0..{len}")));
    }
    let query = ScatteringQuery::new(q, p, tau)?;
    let series = s_series(&model.a, &model.b, &query, 1)?.terms[1];
    let d = dispersion(model.momenta[p]) - dispersion(model.momenta[q]);
    let pref = c64(0.0, tau) / (0.25 * d * d + tau * tau);
    let closed_form = pref * model.potential_transform(model.momenta[p] - model.momenta[q]) / len as f64;
    Ok(BornResult { series, closed_form })
}
