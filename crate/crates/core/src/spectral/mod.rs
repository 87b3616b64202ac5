//! Eigenvalue, eigenprojection and eigenvector perturbation.
//!
//! Coefficients come from contour integrals of resolvent products evaluated in
//! the eigenbasis of the unperturbed matrix. The Schur-complement split around a
//! single eigenvector gives the non-perturbative counterpart: a scalar
//! fixed-point equation for the perturbed eigenvalue and a closed expression for
//! the perturbed eigenvector.

mod eigenvalue;
mod oscillator;
mod schur;

pub use eigenvalue::{
    default_contour, eigenvalue_coefficients, lambda4_closed_form, projection_coefficients,
    EigenPerturbationSeries, ProjectionSeries,
};
pub use oscillator::{oscillator_demo, EtaChoice, OscillatorGrid, OscillatorReport, GAUSSIAN_X4, HALF_WIDTH};
pub use schur::{
    cancellation_check, eigenvector_coefficients, eigenvector_series, eigenvector_tilde,
    fixed_point_eigenvalue, overlap_squared, sandwich, schur_split, self_energy,
    EigenvectorSeries, OverlapForms, SchurData, FIXED_POINT_MAX_ITER,
};

use crate::error::{Error, Result};
use crate::matcore::{c64, eig_hermitian, ensure_same_shape, inner, CMatrix, CVector, C64};

/// Atoms (λ̂ᵢ, |⟨v̂ᵢ,v⟩|²) of the spectral measure of A+B in the state v.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn first_moment(&self) -> f64 {
        self.atoms.iter().map(|(l, w)| l * w).sum()
    }

    /// Σᵢ wᵢ/(λ̂ᵢ − z).
    pub fn stieltjes(&self, z: C64) -> C64 {
        self.atoms.iter().map(|&(l, w)| w / (c64(l, 0.0) - z)).sum()
    }
}

pub fn spectral_measure(a: &CMatrix, b: &CMatrix, v: &CVector) -> Result<SpectralMeasure> {
    let n = ensure_same_shape(a, b)?;
    if v.len() != n {
        return Err(Error::ShapeMismatch(format!("vector of length {} for dimension {n}", v.len())));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("state must be a unit vector (norm {norm})")));
    }
    let eig = eig_hermitian(&(a + b))?;
    let atoms = (0..n)
        .map(|k| (eig.eigenvalues[k], inner(&eig.eigenvector(k), v).norm_sqr()))
        .collect();
    Ok(SpectralMeasure { atoms })
}

/// The eigenpair of Hermitian `m` with the largest overlap with `v`, phased so
/// that ⟨v, v̂⟩ ≥ 0.
pub fn continue_eigenpair(m: &CMatrix, v: &CVector) -> Result<(f64, CVector)> {
    let eig = eig_hermitian(m)?;
    if v.len() != eig.dim() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for dimension {}",
            v.len(),
            eig.dim()
        )));
    }
    let (k, overlap) = (0..eig.dim())
        .map(|k| (k, inner(v, &eig.eigenvector(k))))
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .ok_or_else(|| Error::invalid("empty matrix"))?;
    let phase = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        c64(1.0, 0.0)
    };
    Ok((eig.eigenvalues[k], eig.eigenvector(k) * phase))
}
