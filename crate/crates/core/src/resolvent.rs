//! Neumann series for (A+B)⁻¹ with its exact finite-order remainder, and the
//! Feynman-parameter (simplex integral) representation of resolvent entries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::matcore::{
    c64, eig_hermitian, ensure_hermitian, ensure_same_shape, gauss_legendre, inverse, is_diagonal,
    op_norm, CMatrix, C64,
};

/// Cap on the number of index paths enumerated by exhaustive sums.
pub const PATH_GUARD: f64 = 1e7;

/// ‖A^{-1/2} B A^{-1/2}‖ for Hermitian positive definite `a`.
pub fn symmetrized_ratio(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_same_shape(a, b)?;
    ensure_hermitian(a)?;
    let eig = eig_hermitian(a)?;
    let min = eig.eigenvalues[0];
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let inv_sqrt = eig.apply_fn(|l| c64(1.0 / l.sqrt(), 0.0));
    op_norm(&(&inv_sqrt * b * &inv_sqrt))
}

#[derive(Debug, Clone)]
pub struct ResolventSeries {
    /// `terms[m] = (−1)^m A⁻¹ (B A⁻¹)^m`.
    pub terms: Vec<CMatrix>,
    /// ‖A^{-1/2} B A^{-1/2}‖ when `A` is Hermitian positive definite.
    pub ratio: Option<f64>,
    pub dim: usize,
}

impl ResolventSeries {
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// Σ_{m<k} terms[m]; `k` is clamped to the available order.
    pub fn partial_sum(&self, k: usize) -> CMatrix {
        let n = self.dim;
        self.terms
            .iter()
            .take(k)
            .fold(CMatrix::zeros(n, n), |acc, t| acc + t)
    }

    /// Only a symmetrized ratio strictly below one certifies convergence.
    pub fn converged(&self) -> bool {
        matches!(self.ratio, Some(r) if r < 1.0)
    }
}

pub fn series_terms(a: &CMatrix, b: &CMatrix, k: usize) -> Result<ResolventSeries> {
    let dim = ensure_same_shape(a, b)?;
    let a_inv = inverse(a)?;
    let b_a_inv = b * &a_inv;
    let mut terms = Vec::with_capacity(k);
    if k > 0 {
        terms.push(a_inv.clone());
    }
    for m in 1..k {
        let next = -(&terms[m - 1] * &b_a_inv);
        terms.push(next);
    }
    let ratio = symmetrized_ratio(a, b).ok();
    Ok(ResolventSeries { terms, ratio, dim })
}

/// (−1)^k (A⁻¹B)^k (A+B)⁻¹, the exact tail after `k` terms.
pub fn exact_remainder(a: &CMatrix, b: &CMatrix, k: usize) -> Result<CMatrix> {
    let n = ensure_same_shape(a, b)?;
    let full = inverse(&(a + b))?;
    if k == 0 {
        return Ok(full);
    }
    let a_inv_b = inverse(a)? * b;
    let mut power = CMatrix::identity(n, n);
    for _ in 0..k {
        power = -(power * &a_inv_b);
    }
    Ok(power * full)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimplexQuadrature {
    /// Uniform (Dirichlet(1,…,1)) sampling of the simplex.
    MonteCarlo { samples: usize, seed: u64 },
    /// Tensor Gauss–Legendre rule with `depth` nodes per axis, mapped to the
    /// simplex by stick breaking.
    RecursiveGrid { depth: usize },
}

impl SimplexQuadrature {
    pub const MIN_SAMPLES: usize = 1000;
}

#[derive(Debug, Clone)]
pub struct FeynmanEstimate {
    pub value: C64,
    /// Monte-Carlo standard error of `value` (zero for the grid rule).
    pub std_error: f64,
    /// Contribution of each order m = 0..=m_max.
    pub per_order: Vec<C64>,
    pub seed: Option<u64>,
}

/// Entry (i, j) of (A + B + iτ)⁻¹ from the Feynman-parameter series truncated
/// at `m_max`, with `a` diagonal.
///
/// Order m contributes (−1)^m m! ∫ Σ_path B_{k₀k₁}⋯B_{k_{m−1}k_m} /
/// (x₀λ_{k₀}+⋯+x_mλ_{k_m}+iτ)^{m+1} over the standard simplex, k₀ = i, k_m = j,
/// with every inner index summed exhaustively.
pub fn feynman_parameter_entry(
    a: &CMatrix,
    b: &CMatrix,
    i: usize,
    j: usize,
    tau: f64,
    m_max: usize,
    quad: SimplexQuadrature,
) -> Result<FeynmanEstimate> {
    let n = ensure_same_shape(a, b)?;
    if !is_diagonal(a) {
        return Err(Error::invalid("Feynman-parameter entries need a diagonal A"));
    }
    if i >= n || j >= n {
        return Err(Error::invalid(format!("entry ({i}, {j}) outside {n}x{n}")));
    }
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let paths = (n as f64).powi(m_max as i32);
    if paths > PATH_GUARD {
        return Err(Error::EnumerationGuard {
            count: paths,
            limit: PATH_GUARD,
        });
    }
    match quad {
        SimplexQuadrature::MonteCarlo { samples, .. } if samples < SimplexQuadrature::MIN_SAMPLES => {
            return Err(Error::invalid(format!(
                "monte-carlo needs at least {} samples",
                SimplexQuadrature::MIN_SAMPLES
            )))
        }
        SimplexQuadrature::RecursiveGrid { depth: 0 } => {
            return Err(Error::invalid("grid depth must be positive"))
        }
        _ => {}
    }

    let lambda: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    let itau = c64(0.0, tau);
    let mut per_order = Vec::with_capacity(m_max + 1);
    let mut var = 0.0;
    for m in 0..=m_max {
        let paths = enumerate_paths(b, &lambda, i, j, m);
        if paths.is_empty() {
            per_order.push(c64(0.0, 0.0));
            continue;
        }
        let integrand = |x: &[f64]| -> C64 {
            paths
                .iter()
                .map(|p| {
                    let s: f64 = p.energies.iter().zip(x).map(|(l, w)| l * w).sum();
                    p.weight / (c64(s, 0.0) + itau).powi(m as i32 + 1)
                })
                .sum()
        };
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let (mean, se) = match quad {
            _ if m == 0 => (integrand(&[1.0]), 0.0),
            SimplexQuadrature::MonteCarlo { samples, seed } => {
                simplex_monte_carlo(m, samples, order_seed(seed, m), integrand)
            }
            SimplexQuadrature::RecursiveGrid { depth } => (simplex_grid(m, depth, integrand), 0.0),
        };
        per_order.push(mean * sign);
        var += se * se;
    }
    Ok(FeynmanEstimate {
        value: per_order.iter().sum(),
        std_error: var.sqrt(),
        per_order,
        seed: match quad {
            SimplexQuadrature::MonteCarlo { seed, .. } => Some(seed),
            SimplexQuadrature::RecursiveGrid { .. } => None,
        },
    })
}

struct WeightedPath {
    weight: C64,
    energies: Vec<f64>,
}

/// All index paths i = k₀ → k₁ → ⋯ → k_m = j with nonzero B-weight.
fn enumerate_paths(b: &CMatrix, lambda: &[f64], i: usize, j: usize, m: usize) -> Vec<WeightedPath> {
    let n = lambda.len();
    if m == 0 {
        return if i == j {
            vec![WeightedPath {
                weight: c64(1.0, 0.0),
                energies: vec![lambda[i]],
            }]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut stack = vec![i];
    fn rec(
        b: &CMatrix,
        lambda: &[f64],
        j: usize,
        m: usize,
        n: usize,
        stack: &mut Vec<usize>,
        weight: C64,
        out: &mut Vec<WeightedPath>,
    ) {
        let last = *stack.last().unwrap();
        if stack.len() == m {
            let w = weight * b[(last, j)];
            if w != c64(0.0, 0.0) {
                let mut energies: Vec<f64> = stack.iter().map(|&k| lambda[k]).collect();
                energies.push(lambda[j]);
                out.push(WeightedPath { weight: w, energies });
            }
            return;
        }
        for k in 0..n {
            let w = weight * b[(last, k)];
            if w == c64(0.0, 0.0) {
                continue;
            }
            stack.push(k);
            rec(b, lambda, j, m, n, stack, w, out);
            stack.pop();
        }
    }
    rec(b, lambda, j, m, n, &mut stack, c64(1.0, 0.0), &mut out);
    out
}

fn order_seed(seed: u64, m: usize) -> u64 {
    seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Mean and standard error of `f` under the uniform law on the m-simplex
/// (which equals m!·∫ f over the simplex).
fn simplex_monte_carlo(m: usize, samples: usize, seed: u64, f: impl Fn(&[f64]) -> C64) -> (C64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; m + 1];
    let mut sum = c64(0.0, 0.0);
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let mut total = 0.0;
        for xi in x.iter_mut() {
            let e: f64 = Exp1.sample(&mut rng);
            *xi = e;
            total += e;
        }
        x.iter_mut().for_each(|xi| *xi /= total);
        let v = f(&x);
        sum += v;
        sum_sq += v.norm_sqr();
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n) - mean.norm_sqr()).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// m!·∫ f over the simplex by a tensor Gauss–Legendre rule after the stick
/// breaking map x₀ = u₁, x₁ = (1−u₁)u₂, …, x_m = Π(1−u_k).
fn simplex_grid(m: usize, depth: usize, f: impl Fn(&[f64]) -> C64) -> C64 {
    if m == 0 {
        return f(&[1.0]);
    }
    let (nodes, weights) = gauss_legendre(depth);
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0; m + 1];
    let mut acc = c64(0.0, 0.0);
    loop {
        let mut rest = 1.0;
        let mut w = 1.0;
        for (k, &q) in idx.iter().enumerate() {
            let u = nodes[q];
            x[k] = rest * u;
            w *= weights[q] * (1.0 - u).powi((m - 1 - k) as i32);
            rest *= 1.0 - u;
        }
        x[m] = rest;
        acc += f(&x) * w;
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == m {
                return acc * factorial;
            }
            idx[pos] += 1;
            if idx[pos] < depth {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{diag_real, real_matrix};

    #[test]
    fn ratio_examples() {
        let b = real_matrix(2, 2, &[0.3, -0.2, -0.2, 0.1]);
        let r = symmetrized_ratio(&CMatrix::identity(2, 2), &b).unwrap();
        assert!((r - op_norm(&b).unwrap()).abs() < 1e-14);

        let r = symmetrized_ratio(&diag_real(&[1.0, 2.0]), &real_matrix(2, 2, &[0.0, 0.1, 0.1, 0.0]))
            .unwrap();
        assert!((r - 0.1 / 2f64.sqrt()).abs() < 1e-14);

        let r = symmetrized_ratio(&diag_real(&[4.0, 4.0]), &CMatrix::identity(2, 2)).unwrap();
        assert!((r - 0.25).abs() < 1e-14);
    }

    #[test]
    fn ratio_rejects_indefinite() {
        let e = symmetrized_ratio(&diag_real(&[1.0, -1.0]), &CMatrix::identity(2, 2));
        assert!(matches!(e, Err(Error::NotPositiveDefinite { .. })));
        let e = symmetrized_ratio(&real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]), &CMatrix::identity(2, 2));
        assert!(matches!(e, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_perturbation_series() {
        let a = diag_real(&[1.0, 3.0]);
        let s = series_terms(&a, &CMatrix::zeros(2, 2), 4).unwrap();
        assert!((&s.terms[0] - diag_real(&[1.0, 1.0 / 3.0])).norm() < 1e-15);
        assert!(s.terms[1..].iter().all(|t| t.norm() == 0.0));
        assert!(s.converged());
    }

    #[test]
    fn scalar_geometric_series() {
        let b = [0.5, -0.25, 0.8];
        let s = series_terms(&CMatrix::identity(3, 3), &diag_real(&b), 6).unwrap();
        for (m, t) in s.terms.iter().enumerate() {
            let expected = diag_real(&b.map(|x| (-x).powi(m as i32)));
            assert!((t - expected).norm() < 1e-15, "order {m}");
        }
    }

    #[test]
    fn diag_fixture_partial_sum_bound() {
        let a = diag_real(&[1.0, 2.0]);
        let b = real_matrix(2, 2, &[0.0, 0.1, 0.1, 0.0]);
        let s = series_terms(&a, &b, 4).unwrap();
        let ratio = s.ratio.unwrap();
        let exact = inverse(&(&a + &b)).unwrap();
        let bound = ratio.powi(4) * op_norm(&exact).unwrap() / (1.0 - ratio);
        assert!(op_norm(&(s.partial_sum(4) - &exact)).unwrap() <= bound);
    }

    #[test]
    fn remainder_examples() {
        let a = diag_real(&[1.0, 2.0]);
        let b = real_matrix(2, 2, &[0.0, 0.1, 0.1, 0.0]);
        let exact = inverse(&(&a + &b)).unwrap();
        assert!((exact_remainder(&a, &b, 0).unwrap() - &exact).norm() < 1e-15);
        assert_eq!(exact_remainder(&a, &CMatrix::zeros(2, 2), 3).unwrap().norm(), 0.0);
        let s = series_terms(&a, &b, 3).unwrap();
        let r = exact_remainder(&a, &b, 3).unwrap();
        assert!((r - (&exact - s.partial_sum(3))).norm() < 1e-12);
    }

    #[test]
    fn remainder_is_exact_when_series_diverges() {
        let a = diag_real(&[1.0, 2.0]);
        let b = real_matrix(2, 2, &[0.0, 3.0, 3.0, 0.5]);
        let s = series_terms(&a, &b, 6).unwrap();
        assert!(!s.converged());
        let exact = inverse(&(&a + &b)).unwrap();
        for k in 0..6 {
            let defect = s.partial_sum(k) + exact_remainder(&a, &b, k).unwrap() - &exact;
            assert!(defect.norm() <= 1e-10 * exact.norm() * 10f64.powi(k as i32), "k = {k}");
        }
    }

    #[test]
    fn feynman_zero_perturbation() {
        let a = diag_real(&[0.5, 1.5, -1.0]);
        let b = CMatrix::zeros(3, 3);
        let q = SimplexQuadrature::MonteCarlo { samples: 1000, seed: 1 };
        let e = feynman_parameter_entry(&a, &b, 1, 1, 0.3, 0, q).unwrap();
        assert!((e.value - 1.0 / c64(1.5, 0.3)).norm() < 1e-15);
        let e = feynman_parameter_entry(&a, &b, 0, 2, 0.3, 3, q).unwrap();
        assert_eq!(e.value, c64(0.0, 0.0));
    }

    #[test]
    fn feynman_grid_first_orders_are_exact() {
        // m = 1 and m = 2 integrands are smooth rational functions; the grid rule
        // reproduces −(A+iτ)⁻¹B(A+iτ)⁻¹ and the second-order term to high accuracy.
        let a = diag_real(&[0.2, 1.1, 2.0]);
        let b = real_matrix(3, 3, &[0.0, 0.1, 0.05, 0.1, 0.02, -0.04, 0.05, -0.04, 0.0]);
        let tau = 0.5;
        let shifted = (&a + CMatrix::identity(3, 3) * c64(0.0, tau)).map(|z| z);
        let r0 = inverse(&shifted).unwrap();
        let t1 = -(&r0 * &b * &r0);
        let t2 = &r0 * &b * &r0 * &b * &r0;
        let e = feynman_parameter_entry(&a, &b, 0, 2, tau, 2, SimplexQuadrature::RecursiveGrid { depth: 24 })
            .unwrap();
        assert!((e.per_order[1] - t1[(0, 2)]).norm() < 1e-12);
        assert!((e.per_order[2] - t2[(0, 2)]).norm() < 1e-12);
    }

    #[test]
    fn feynman_guards() {
        let a = diag_real(&[0.0, 1.0]);
        let b = CMatrix::zeros(2, 2);
        let q = SimplexQuadrature::MonteCarlo { samples: 1000, seed: 0 };
        assert!(feynman_parameter_entry(&a, &b, 0, 0, 0.0, 1, q).is_err());
        assert!(matches!(
            feynman_parameter_entry(&a, &b, 0, 0, 0.1, 30, q),
            Err(Error::EnumerationGuard { .. })
        ));
        let few = SimplexQuadrature::MonteCarlo { samples: 10, seed: 0 };
        assert!(feynman_parameter_entry(&a, &b, 0, 0, 0.1, 1, few).is_err());
        let full = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(feynman_parameter_entry(&full, &b, 0, 0, 0.1, 1, q).is_err());
    }
}
