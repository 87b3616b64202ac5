//! Seeded random test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix};
use crate::symdiag::{Model, MultisetState, Particle, SparseInteraction, Species, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Hermitian,
    Diagonal,
    MomentumModel,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(EnsembleKind::Hermitian),
            "diagonal" => Ok(EnsembleKind::Diagonal),
            "momentum-model" => Ok(EnsembleKind::MomentumModel),
            other => Err(Error::invalid(format!("unknown ensemble kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Ensemble {
    Matrix(CMatrix),
    Interaction(SparseInteraction),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// scale·(G + G*)/2 with G a standard complex Gaussian matrix.
pub fn random_hermitian(n: usize, scale: f64, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    (&g + g.adjoint()) * c64(0.5 * scale, 0.0)
}

/// Increasing real entries with consecutive gaps in [scale/n, 2·scale/n), starting near zero.
pub fn random_diagonal(n: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    let step = scale / n as f64;
    let mut x = rng.random_range(-1.0..1.0) * step;
    (0..n)
        .map(|k| {
            if k > 0 {
                x += step * (1.0 + rng.random::<f64>());
            }
            x
        })
        .collect()
}

/// A one-dimensional two-species model with the vertex φ_aφ_aφ_c of coupling `scale`
/// on momenta |p| ≤ `grid_bound`, closed to depth 2 around the state |a:k, a:−k⟩.
pub fn random_momentum_model(grid_bound: i64, scale: f64, rng: &mut impl Rng) -> Result<(Model, SparseInteraction)> {
    let model = Model::new(
        1,
        grid_bound,
        vec![
            Species {
                name: "a".into(),
                mass: rng.random_range(0.5..1.5),
            },
            Species {
                name: "c".into(),
                mass: rng.random_range(1.0..3.0),
            },
        ],
        vec![Vertex {
            legs: vec![0, 0, 1],
            coupling: scale,
            damped_legs: vec![2],
        }],
    )?;
    let k = rng.random_range(0..=grid_bound);
    let seed = MultisetState::new(vec![Particle::new(0, vec![k]), Particle::new(0, vec![-k])]);
    let bop = model.interaction(&[seed], 2)?;
    Ok((model, bop))
}

/// Dispatches on `kind`; for the momentum model `n` is the grid bound.
pub fn random_ensemble(kind: EnsembleKind, n: usize, scale: f64, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    let mut r = rng(seed);
    Ok(match kind {
        EnsembleKind::Hermitian => Ensemble::Matrix(random_hermitian(n, scale, &mut r)),
        EnsembleKind::Diagonal => Ensemble::Matrix(crate::matcore::diag_real(&random_diagonal(n, scale, &mut r))),
        EnsembleKind::MomentumModel => Ensemble::Interaction(random_momentum_model(n as i64, scale, &mut r)?.1),
    })
}
