use crate::error::Result;
use crate::matcore::{c64, ensure_same_shape, expm, CMatrix};

use super::integrate::{rk4_extrapolated, TimeGrid};

/// Series terms at the end of a time grid, Richardson-extrapolated from the grid
/// and its 2× refinement, with the estimated step error of the refined run.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    pub terms: Vec<CMatrix>,
    pub step_error: f64,
}

impl SeriesTerms {
    /// Σ_{m≤k} terms[m].
    pub fn partial_sum(&self, k: usize) -> CMatrix {
        let n = self.terms[0].nrows();
        self.terms
            .iter()
            .take(k + 1)
            .fold(CMatrix::zeros(n, n), |acc, t| acc + t)
    }
}

/// (tᵏ/k!) ‖B‖ᵏ e^{t(‖A‖+‖B‖)}.
pub fn remainder_bound(t: f64, norm_a: f64, norm_b: f64, k: usize) -> f64 {
    let mut coeff = 1.0;
    for j in 1..=k {
        coeff *= t * norm_b / j as f64;
    }
    coeff * (t * (norm_a + norm_b)).exp()
}

/// Integrates the cascade Y₀' = K Y₀, Y_m' = K Y_m + L Y_{m−1} (Y₀(0) = I,
/// Y_m(0) = 0).
fn cascade(k: &CMatrix, l: &CMatrix, m_max: usize, g: &TimeGrid) -> (Vec<CMatrix>, f64) {
    let n = k.nrows();
    let mut y0 = vec![CMatrix::zeros(n, n); m_max + 1];
    y0[0] = CMatrix::identity(n, n);
    rk4_extrapolated(y0, 0.0, g.t_end, g.steps, |_, y| {
        (0..y.len())
            .map(|m| {
                let mut d = k * &y[m];
                if m > 0 {
                    d += l * &y[m - 1];
                }
                d
            })
            .collect()
    })
}

/// T_m(t) with e^{t(A+B)} = Σ T_m(t), from T₀' = A T₀, T_m' = A T_m + B T_{m−1}.
pub fn exp_series_terms(a: &CMatrix, b: &CMatrix, m_max: usize, g: &TimeGrid) -> Result<SeriesTerms> {
    ensure_same_shape(a, b)?;
    let (terms, step_error) = cascade(a, b, m_max, g);
    Ok(SeriesTerms { terms, step_error })
}

/// Dyson terms G_m(t) = −i∫₀ᵗ B̃(s) G_{m−1}(s) ds, B̃(s) = e^{isA} B e^{−isA}, whose
/// sum is e^{itA} e^{−it(A+B)}.
///
/// Integrated as W_m = e^{−itA} G_m: W₀' = −iA W₀, W_m' = −iA W_m − iB W_{m−1}.
pub fn dyson_terms(a: &CMatrix, b: &CMatrix, m_max: usize, g: &TimeGrid) -> Result<SeriesTerms> {
    ensure_same_shape(a, b)?;
    let minus_i = c64(0.0, -1.0);
    let (w, step_error) = cascade(&(a * minus_i), &(b * minus_i), m_max, g);
    let back = expm(&(a * c64(0.0, g.t_end)))?;
    Ok(SeriesTerms {
        terms: w.iter().map(|wm| &back * wm).collect(),
        step_error,
    })
}
