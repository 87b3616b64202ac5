use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matcore::{c64, C64};

use super::diagram::{group_terms_by_diagram, Diagram};
use super::model::{Model, Species, Vertex};
use super::state::{Momentum, MultisetState, Particle};

/// Species a, b, c with the single vertex φ_aφ_bφ_c of amplitude ω_c^{−1/2}, and the
/// two-particle states i = |p₁⁽ᵃ⁾, p₂⁽ᵇ⁾⟩, j = |p₃⁽ᵃ⁾, p₄⁽ᵇ⁾⟩ on the same energy shell.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeParticleSetup {
    pub grid_bound: i64,
    pub masses: [f64; 3],
    pub p1: Momentum,
    pub p2: Momentum,
    pub p3: Momentum,
    pub p4: Momentum,
    pub tau: f64,
}

impl Default for ThreeParticleSetup {
    fn default() -> Self {
        ThreeParticleSetup {
            grid_bound: 2,
            masses: [1.0, 2.0, 1.5],
            p1: vec![1, 0],
            p2: vec![-1, 0],
            p3: vec![0, 1],
            p4: vec![0, -1],
            tau: 1e-3,
        }
    }
}

impl ThreeParticleSetup {
    pub fn model(&self) -> Result<Model> {
        let names = ["a", "b", "c"];
        let species = names
            .iter()
            .zip(self.masses)
            .map(|(n, m)| Species {
                name: n.to_string(),
                mass: m,
            })
            .collect();
        Model::new(
            self.p1.len(),
            self.grid_bound,
            species,
            vec![Vertex {
                legs: vec![0, 1, 2],
                coupling: 1.0,
                damped_legs: vec![2],
            }],
        )
    }

    pub fn states(&self) -> (MultisetState, MultisetState) {
        (
            MultisetState::new(vec![Particle::new(0, self.p1.clone()), Particle::new(1, self.p2.clone())]),
            MultisetState::new(vec![Particle::new(0, self.p3.clone()), Particle::new(1, self.p4.clone())]),
        )
    }
}

/// One intermediate state k of the second-order sum Σ_k B_{ik}B_{kj}/(λ_k − λ_τ).
#[derive(Debug, Clone)]
pub struct TableRow {
    /// 'a' for |p⁽ᶜ⁾⟩, 'b' for five particles, 'c' for |p₂⁽ᵇ⁾,p′⁽ᶜ⁾,p₄⁽ᵇ⁾⟩, 'd' for |p₁⁽ᵃ⁾,p′⁽ᶜ⁾,p₃⁽ᵃ⁾⟩.
    pub label: char,
    pub diagram: Diagram,
    pub k_state: MultisetState,
    pub product: C64,
    pub expected_product: C64,
    pub denominator: C64,
    pub expected_denominator: C64,
}

#[derive(Debug, Clone)]
pub struct ThreeParticleReport {
    pub rows: Vec<TableRow>,
    pub paths: usize,
    /// λ = ω₁ + ω₂ = ω₃ + ω₄.
    pub lambda: f64,
    pub lambda_tau: C64,
    /// ω of the c-particle at p₁ + p₂ and at p₁ − p₄.
    pub omega: f64,
    pub omega_prime: f64,
    /// ω₄ − ω₁.
    pub delta: f64,
    /// Σ_k B_{ik}B_{kj}/(λ_k − λ_τ) assembled from the rows.
    pub row_sum: C64,
    /// S⁽²⁾_{ij}(τ) = −(iτ/τ²)·row_sum, the finite-τ second-order entry.
    pub s2: C64,
    /// −2πi·row_sum, the normalization in which iτ/(¼Δ²+τ²) is replaced by 2π δ.
    pub delta_normalized: C64,
    /// −2πi[2(ω+iτ)/(ω((ω+iτ)²−λ²)) + 2(ω′+iτ)/(ω′((ω′+iτ)²−Δ²))], the rows paired in closed form.
    pub paired: C64,
    /// The τ → 0 value −2πi[2/(ω²−λ²) + 2/(ω′²−Δ²)].
    pub limit: C64,
    /// −2πi[1/(ω²−λ²) + 1/(ω′²+Δ²)] as commonly displayed; differs from `limit`.
    pub literal_display: C64,
}

pub fn three_particle_demo(setup: &ThreeParticleSetup) -> Result<ThreeParticleReport> {
    if !(setup.tau > 0.0) || !setup.tau.is_finite() {
        return Err(Error::invalid(format!("tau must be positive, got {}", setup.tau)));
    }
    let model = setup.model()?;
    let (i, j) = setup.states();
    let dim = model.dim;
    for p in [&setup.p2, &setup.p3, &setup.p4] {
        if p.len() != dim {
            return Err(Error::invalid("external momenta have inconsistent dimensions"));
        }
    }
    if i.total_momentum(dim) != j.total_momentum(dim) {
        return Err(Error::invalid("p₁ + p₂ must equal p₃ + p₄"));
    }
    let (li, lj) = (model.energy(&i), model.energy(&j));
    if (li - lj).abs() > 1e-12 * li.abs().max(1.0) {
        return Err(Error::invalid(format!("states are off shell: ω₁+ω₂ = {li}, ω₃+ω₄ = {lj}")));
    }
    let bop = model.interaction(&[i.clone(), j.clone()], 1)?;
    let groups = group_terms_by_diagram(&bop, &i, &j, 2)?;

    let tau = setup.tau;
    let lambda = li;
    let lambda_tau = c64(lambda, -tau);
    let w1 = model.omega(0, &setup.p1);
    let w4 = model.omega(1, &setup.p4);
    let delta = w4 - w1;
    let sum_p: Momentum = setup.p1.iter().zip(&setup.p2).map(|(a, b)| a + b).collect();
    let diff_p: Momentum = setup.p1.iter().zip(&setup.p4).map(|(a, b)| a - b).collect();
    let omega = model.omega(2, &sum_p);
    let omega_prime = model.omega(2, &diff_p);

    let (pi, pj) = (bop.position(&i).expect("seed"), bop.position(&j).expect("seed"));
    let mut rows = Vec::new();
    let mut paths = 0;
    for (diagram, group) in groups {
        for path in group {
            paths += 1;
            let k = path[1];
            let k_state = bop.basis[k].clone();
            let count = |s: usize| k_state.particles().iter().filter(|p| p.species == s).count();
            let c_omega = k_state
                .particles()
                .iter()
                .find(|p| p.species == 2)
                .map(|p| model.omega(2, &p.momentum))
                .unwrap_or(f64::NAN);
            let (label, expected_denominator) = match (count(0), count(1), count(2)) {
                (0, 0, 1) => ('a', c_omega - lambda_tau),
                (2, 2, 1) => ('b', c_omega + lambda_tau.conj()),
                (0, 2, 1) => ('c', c64(c_omega + w4 - w1, tau)),
                (2, 0, 1) => ('d', c64(c_omega - w4 + w1, tau)),
                _ => ('?', c64(f64::NAN, f64::NAN)),
            };
            rows.push(TableRow {
                label,
                diagram: diagram.clone(),
                product: bop.entry(pi, k) * bop.entry(k, pj),
                expected_product: c64(1.0 / c_omega, 0.0),
                denominator: bop.energies[k] - lambda_tau,
                expected_denominator,
                k_state,
            });
        }
    }
    rows.sort_by_key(|r| r.label);

    let row_sum: C64 = rows.iter().map(|r| r.product / r.denominator).sum();
    let minus_two_pi_i = c64(0.0, -2.0 * PI);
    let shifted = |w: f64| c64(w, tau);
    let paired = minus_two_pi_i
        * (shifted(omega) * 2.0 / (omega * (shifted(omega).powu(2) - lambda * lambda))
            + shifted(omega_prime) * 2.0 / (omega_prime * (shifted(omega_prime).powu(2) - delta * delta)));
    let limit = minus_two_pi_i
        * (2.0 / (omega * omega - lambda * lambda) + 2.0 / (omega_prime * omega_prime - delta * delta));
    let literal_display = minus_two_pi_i
        * (1.0 / (omega * omega - lambda * lambda) + 1.0 / (omega_prime * omega_prime + delta * delta));
    Ok(ThreeParticleReport {
        rows,
        paths,
        lambda,
        lambda_tau,
        omega,
        omega_prime,
        delta,
        row_sum,
        s2: -c64(0.0, 1.0 / tau) * row_sum,
        delta_normalized: minus_two_pi_i * row_sum,
        paired,
        limit,
        literal_display,
    })
}
