use crate::error::{Error, Result};
use crate::matcore::{
    c64, eig_hermitian, eigenbasis, ensure_hermitian, ensure_same_shape, inner, op_norm, CMatrix,
    CVector, C64,
};

use super::integrate::{magnus_step, rk4_extrapolated, TimeGrid};

/// Gaps below this are treated as a crossing.
pub const MIN_GAP: f64 = 1e-3;
/// Largest tolerated deviation of ‖u‖ from one.
pub const MAX_DRIFT: f64 = 1e-6;
/// Smallest overlap ⟨e_i(0), u(t)⟩ the eigenvalue estimator accepts.
pub const MIN_OVERLAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ramp {
    /// f(t) = t.
    Linear,
    /// f(t) = 3t² − 2t³, with f'(0) = f'(1) = 0.
    Smoothstep,
}

impl Ramp {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Ramp::Linear => t,
            Ramp::Smoothstep => t * t * (3.0 - 2.0 * t),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Ramp::Linear => 1.0,
            Ramp::Smoothstep => 6.0 * t * (1.0 - t),
        }
    }

    /// sup_{[0,1]} |f'|.
    pub fn max_slope(self) -> f64 {
        match self {
            Ramp::Linear => 1.0,
            Ramp::Smoothstep => 1.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ramp::Linear => "linear",
            Ramp::Smoothstep => "smoothstep",
        }
    }
}

impl std::str::FromStr for Ramp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Ramp::Linear),
            "smoothstep" => Ok(Ramp::Smoothstep),
            other => Err(Error::invalid(format!("unknown ramp '{other}'"))),
        }
    }
}

/// H(t) = A + f(t)B on [0, 1].
#[derive(Debug, Clone)]
pub struct Schedule {
    pub a: CMatrix,
    pub b: CMatrix,
    pub ramp: Ramp,
}

impl Schedule {
    pub fn new(a: CMatrix, b: CMatrix, ramp: Ramp) -> Result<Self> {
        ensure_same_shape(&a, &b)?;
        ensure_hermitian(&a)?;
        ensure_hermitian(&b)?;
        Ok(Schedule { a, b, ramp })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn at(&self, t: f64) -> CMatrix {
        &self.a + &self.b * c64(self.ramp.value(t), 0.0)
    }
}

/// Instantaneous eigenpair (λᵢ(t), eᵢ(t)) continued from the previous one by
/// maximal overlap, with the gauge ⟨e_prev, e⟩ > 0.
struct EigenPath<'a> {
    sched: &'a Schedule,
    value: f64,
    vector: CVector,
    min_gap: f64,
}

impl<'a> EigenPath<'a> {
    fn start(sched: &'a Schedule, i: usize) -> Result<Self> {
        let n = sched.dim();
        if i >= n {
            return Err(Error::invalid(format!("index {i} outside dimension {n}")));
        }
        let eig = eigenbasis(&sched.at(0.0))?;
        let gap = eig.gap(i);
        if gap < MIN_GAP {
            return Err(Error::GapCollapse { gap, time: 0.0 });
        }
        Ok(EigenPath {
            sched,
            value: eig.eigenvalues[i],
            vector: eig.eigenvector(i),
            min_gap: gap,
        })
    }

    fn advance(&mut self, t: f64) -> Result<()> {
        let eig = eig_hermitian(&self.sched.at(t))?;
        let (k, overlap) = (0..eig.dim())
            .map(|k| (k, inner(&self.vector, &eig.eigenvector(k))))
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .expect("nonempty spectrum");
        let gap = eig.gap(k);
        if gap < MIN_GAP {
            return Err(Error::GapCollapse { gap, time: t });
        }
        self.min_gap = self.min_gap.min(gap);
        self.value = eig.eigenvalues[k];
        self.vector = eig.eigenvector(k) * (overlap.conj() / overlap.norm());
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AdiabaticResult {
    pub final_state: CVector,
    /// φᵢ(1) = ∫₀¹ λᵢ(t) dt.
    pub tracked_phase: f64,
    /// ‖u(1) − eᵢ(1) e^{−iηφᵢ(1)}‖.
    pub error_vs_eigenpath: f64,
    /// sup over grid times of ‖u(t) − eᵢ(t) e^{−iηφᵢ(t)}‖.
    pub sup_error: f64,
    pub min_gap: f64,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("eta must be positive, got {eta}")))
    }
}

/// Integrates i∂ₜu = ηH(t)u on [0, 1] from u(0) = eᵢ(0) with unitary Magnus
/// steps, following the instantaneous eigenpath alongside. φᵢ is accumulated by
/// Simpson's rule from eigenvalues at step ends and midpoints.
pub fn adiabatic_evolve(sched: &Schedule, eta: f64, i: usize, steps: usize) -> Result<AdiabaticResult> {
    check_eta(eta)?;
    let g = TimeGrid::new(1.0, steps)?;
    let h = g.step();
    let mut path = EigenPath::start(sched, i)?;
    let mut u = path.vector.clone();
    let mut phi = 0.0;
    let mut sup_error: f64 = 0.0;
    let scaled = |t: f64| sched.at(t) * c64(eta, 0.0);
    for k in 0..g.steps {
        let t = k as f64 * h;
        let l0 = path.value;
        path.advance(t + 0.5 * h)?;
        let lm = path.value;
        path.advance(t + h)?;
        let l1 = path.value;
        phi += h / 6.0 * (l0 + 4.0 * lm + l1);
        u = magnus_step(&scaled, t, h)? * u;
        let drift = (u.norm() - 1.0).abs();
        if drift > MAX_DRIFT {
            return Err(Error::StepSize { drift });
        }
        let target = &path.vector * C64::from_polar(1.0, -eta * phi);
        sup_error = sup_error.max((&u - target).norm());
    }
    let target = &path.vector * C64::from_polar(1.0, -eta * phi);
    Ok(AdiabaticResult {
        error_vs_eigenpath: (&u - target).norm(),
        final_state: u,
        tracked_phase: phi,
        sup_error,
        min_gap: path.min_gap,
    })
}

#[derive(Debug, Clone)]
pub struct EigenvalueTrack {
    pub times: Vec<f64>,
    /// ⟨eᵢ(0), (H(t)−H(0)) u(t)⟩ / ⟨eᵢ(0), u(t)⟩.
    pub estimator: Vec<C64>,
    /// λᵢ(t) − λᵢ(0) along the continued eigenpath.
    pub reference: Vec<f64>,
    /// sup_t |estimator − reference|.
    pub sup_deviation: f64,
}

impl EigenvalueTrack {
    pub fn values(&self) -> Vec<f64> {
        self.estimator.iter().map(|z| z.re).collect()
    }
}

/// Samples η⁻¹ i∂ₜ log⟨eᵢ(0)e^{−iηtλᵢ(0)}, u(t)⟩ on the grid. With i∂ₜu = ηHu the
/// derivative is explicit and the estimator reduces to the ratio stored in
/// [`EigenvalueTrack::estimator`].
pub fn adiabatic_eigenvalue_track(sched: &Schedule, eta: f64, i: usize, steps: usize) -> Result<EigenvalueTrack> {
    check_eta(eta)?;
    let g = TimeGrid::new(1.0, steps)?;
    let h = g.step();
    let mut path = EigenPath::start(sched, i)?;
    let e0 = path.vector.clone();
    let lambda0 = path.value;
    let h0 = sched.at(0.0);
    let mut u = e0.clone();
    let scaled = |t: f64| sched.at(t) * c64(eta, 0.0);
    let mut track = EigenvalueTrack {
        times: vec![0.0],
        estimator: vec![c64(0.0, 0.0)],
        reference: vec![0.0],
        sup_deviation: 0.0,
    };
    for k in 0..g.steps {
        let t = k as f64 * h;
        u = magnus_step(&scaled, t, h)? * u;
        path.advance(t + h)?;
        let overlap = inner(&e0, &u);
        if overlap.norm() < MIN_OVERLAP {
            return Err(Error::TrackingLoss {
                overlap: overlap.norm(),
                time: t + h,
            });
        }
        let est = inner(&e0, &((sched.at(t + h) - &h0) * &u)) / overlap;
        let reference = path.value - lambda0;
        track.sup_deviation = track.sup_deviation.max((est - reference).norm());
        track.times.push(t + h);
        track.estimator.push(est);
        track.reference.push(reference);
    }
    Ok(track)
}

#[derive(Debug, Clone)]
pub struct AdiabaticSeriesResult {
    /// Approximation of the eigenvector of A + B continuing uᵢ, gauge ⟨uᵢ, ·⟩ ≥ 0.
    pub vector: CVector,
    /// 2 sup|f'| ‖B‖ / (η Δ²) + (η‖B‖)^M / M!.
    pub budget: f64,
    pub truncation: f64,
    pub step_error: f64,
}

/// Truncated time-ordered series for the adiabatic evolution under A + f(t)B:
/// y₀ = e^{−iηtλᵢ}uᵢ, y_m' = −iηA y_m − iη f(t) B y_{m−1}, then the dynamical
/// phase e^{iηφᵢ(1)} is removed from Σ y_m(1).
pub fn adiabatic_eigvec_series(
    a: &CMatrix,
    b: &CMatrix,
    ramp: Ramp,
    i: usize,
    eta: f64,
    order: usize,
    steps: usize,
) -> Result<AdiabaticSeriesResult> {
    check_eta(eta)?;
    let sched = Schedule::new(a.clone(), b.clone(), ramp)?;
    let g = TimeGrid::new(1.0, steps)?;
    let n = sched.dim();
    let norm_b = op_norm(b)?;

    // Gap along the path and φᵢ(1).
    let mut path = EigenPath::start(&sched, i)?;
    let start = path.vector.clone();
    let gap_a = path.min_gap;
    if norm_b > gap_a {
        return Err(Error::BudgetExceeded {
            budget: norm_b / gap_a,
            detail: format!("‖B‖ = {norm_b:.3e} exceeds the spectral gap {gap_a:.3e}"),
        });
    }
    let h = g.step();
    let mut phi = 0.0;
    for k in 0..g.steps {
        let t = k as f64 * h;
        let l0 = path.value;
        path.advance(t + 0.5 * h)?;
        let lm = path.value;
        path.advance(t + h)?;
        phi += h / 6.0 * (l0 + 4.0 * lm + path.value);
    }
    let gap = path.min_gap;
    let mut truncation = 1.0;
    for m in 1..=order {
        truncation *= eta * norm_b / m as f64;
    }
    let budget = 2.0 * ramp.max_slope() * norm_b / (eta * gap * gap) + truncation;
    if truncation >= 0.1 || budget >= 1.0 {
        return Err(Error::BudgetExceeded {
            budget,
            detail: format!("eta·‖B‖ = {:.3e} at order {order}", eta * norm_b),
        });
    }

    let ka = a * c64(0.0, -eta);
    let kb = b * c64(0.0, -eta);
    let mut y0 = vec![CMatrix::zeros(n, 1); order + 1];
    y0[0].set_column(0, &start);
    let (out, step_error) = rk4_extrapolated(y0, 0.0, 1.0, g.steps, |t, y| {
        let f = ramp.value(t);
        (0..y.len())
            .map(|m| {
                let mut d = &ka * &y[m];
                if m > 0 {
                    d += &kb * &y[m - 1] * c64(f, 0.0);
                }
                d
            })
            .collect()
    });
    if step_error > MAX_DRIFT {
        return Err(Error::StepSize { drift: step_error });
    }
    let sum = out.iter().fold(CVector::zeros(n), |acc, y| acc + y.column(0));
    let mut vector = sum * C64::from_polar(1.0, eta * phi);
    let overlap = inner(&start, &vector);
    if overlap.norm() > 0.0 {
        vector *= overlap.conj() / overlap.norm();
    }
    Ok(AdiabaticSeriesResult {
        vector,
        budget,
        truncation,
        step_error,
    })
}
