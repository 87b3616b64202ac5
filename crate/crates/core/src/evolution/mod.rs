//! Time-domain series and evolution.
//!
//! Simplex (time-ordered) integrals are never meshed directly. Each series term
//! obeys a variation-of-constants recursion, so the whole stack of terms is
//! integrated as one linear ODE system with fixed-step fourth-order
//! Runge–Kutta, and the run is repeated on a 2× refined grid to report a step
//! error. Propagators use unitary fourth-order Magnus steps.

mod adiabatic;
mod integrate;
mod laplace;
mod propagator;
mod series;

pub use adiabatic::{
    adiabatic_eigenvalue_track, adiabatic_eigvec_series, adiabatic_evolve, AdiabaticResult,
    AdiabaticSeriesResult, EigenvalueTrack, Ramp, Schedule, MAX_DRIFT, MIN_GAP, MIN_OVERLAP,
};
pub use integrate::TimeGrid;
pub use laplace::{holomorphic_calculus, laplace_resolvent_bridge, laplace_truncation_bound};
pub use propagator::propagator_time_dependent;
pub use series::{dyson_terms, exp_series_terms, remainder_bound, SeriesTerms};
