//! Acceptance suite: one verdict line per criterion, followed by the measured
//! quantities and their tolerances. Exits nonzero when a check fails that is not
//! listed in `KNOWN_DEVIATIONS`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use pertkit::evolution::{
    adiabatic_evolve, dyson_terms, exp_series_terms, laplace_resolvent_bridge, remainder_bound, Ramp, Schedule, TimeGrid,
};
use pertkit::matcore::{diag_real, real_matrix};
use pertkit::resolvent::{exact_remainder, series_terms};
use pertkit::scattering::{
    born_demo, rutherford_demo, s_entry_time_average, s_series, shifted_resolvent_norm, s_term_index_sum, RutherfordSetup,
    ScatteringQuery,
};
use pertkit::spectral::{
    cancellation_check, eigenvalue_coefficients, fixed_point_eigenvalue, lambda4_closed_form, oscillator_demo,
    overlap_squared, schur_split, self_energy, spectral_measure, EtaChoice,
};
use pertkit::symdiag::{
    block_decompose, diagram_values, restricted_inverse, three_particle_demo, tree_solve, Model, MultisetState, Particle,
    Species, ThreeParticleSetup, Vertex,
};
use pertkit::tensor::{
    convolution_resolvent, convolution_resolvent_symmetric, dirac_block_inverse, dirac_operator,
    klein_gordon_block_inverse, klein_gordon_operator, KroneckerSum, LineQuadrature,
};
use pertkit::{c64, CMatrix, CVector, C64};
use rand::Rng;

/// Checks that cannot pass under a faithful implementation, with the reason.
const KNOWN_DEVIATIONS: &[(usize, &str, &str)] = &[(
    7,
    "three-particle literal closed form",
    "the displayed simplification drops a factor 2 and flips the sign of (Δω)²; the unsimplified \
     pairing of rows (a,b) and (c,d) sums to 2/(ω²−λ²) + 2/(ω′²−(Δω)²), which the rows reproduce",
)];

struct Check {
    name: String,
    value: f64,
    bound: String,
    pass: bool,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Criterion {
    /// value ≤ tol.
    fn le(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            bound: format!("<= {tol:.1e}"),
            pass: value <= tol,
        });
    }

    fn within(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            bound: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: "== 1".into(),
            pass: ok,
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn scaled_hermitian(n: usize, norm: f64, rng: &mut impl Rng) -> CMatrix {
    let h = hermitian(n, rng);
    let s = norm2(&h);
    h * c64(norm / s, 0.0)
}

fn resolvent_exactness() -> Criterion {
    let mut c = Criterion::default();
    let (mut worst, mut worst_slope_excess) = (0.0f64, f64::NEG_INFINITY);
    for seed in 0..50u64 {
        let mut r = rng(1000 + seed);
        let n = 2 + (seed as usize * 7) % 31;
        let ratio = r.random_range(0.1..0.5);
        let (a, b) = pd_pair(n, ratio, &mut r);
        let inv = inverse(&(&a + &b));
        let scale = norm2(&inv);
        let series = series_terms(&a, &b, 8).unwrap();
        let mut ks = Vec::new();
        let mut logs = Vec::new();
        for k in 0..=8 {
            let rem = exact_remainder(&a, &b, k).unwrap();
            let partial = series.partial_sum(k);
            worst = worst.max(norm2(&(&partial + rem - &inv)) / scale);
            ks.push(k as f64);
            logs.push(norm2(&(&inv - &partial)).ln());
        }
        worst_slope_excess = worst_slope_excess.max(slope(&ks, &logs) - ratio.ln());
    }
    c.le("max relative ‖S_k + R_k − (A+B)⁻¹‖/‖(A+B)⁻¹‖ over 50 pairs, k = 0..8", worst, 1e-10);
    c.le("max (log-residual slope − log ratio)", worst_slope_excess, 0.1);
    c
}

fn eigenvalue_coefficient_checks() -> Criterion {
    let mut c = Criterion::default();
    let (mut low, mut fourth, mut fit) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let mut r = rng(2000 + seed);
        let n = 2 + (seed as usize * 5) % 15;
        let levels = spaced_levels(n, 1.0, &mut r);
        let d = diag_real(&levels);
        let bd = scaled_hermitian(n, 0.3, &mut r);
        let i = (seed as usize) % n;
        // Half of the instances are posed in a rotated basis.
        let (a, b) = if seed % 2 == 0 {
            (d.clone(), bd.clone())
        } else {
            let u = unitary(n, &mut r);
            (&u * &d * u.adjoint(), &u * &bd * u.adjoint())
        };
        let s = eigenvalue_coefficients(&a, &b, i, 4, None).unwrap();
        let l1 = bd[(i, i)].re;
        let l2: f64 = (0..n).filter(|&j| j != i).map(|j| bd[(i, j)].norm_sqr() / (levels[i] - levels[j])).sum();
        low = low.max((s.coefficients[1] - l1).abs()).max((s.coefficients[2] - l2).abs());
        fourth = fourth.max((s.coefficients[4] - lambda4_closed_form(&d, &bd, i).unwrap()).abs());
        let fitted = poly_fit(
            |eps| sorted_eigenvalues(&(&a + &b * c64(eps, 0.0)))[i],
            6,
            0.05,
            25,
        );
        for k in 1..=4 {
            fit = fit.max((s.coefficients[k] - fitted[k]).abs());
        }
    }
    c.le("max |λ⁽¹⁾, λ⁽²⁾ − diagonal closed forms| over 20 instances", low, 1e-9);
    c.le("max |λ⁽⁴⁾ − fourth-order closed form|", fourth, 1e-7);
    c.le("max |λ⁽ᵏ⁾ − ε-grid polynomial fit|, k ≤ 4", fit, 1e-6);
    let s = eigenvalue_coefficients(
        &diag_real(&[0.0, 1.0]),
        &real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        0,
        4,
        None,
    )
    .unwrap();
    c.le("2×2 fixture |λ⁽²⁾ + 1|", (s.coefficients[2] + 1.0).abs(), 1e-9);
    c.le("2×2 fixture |λ⁽⁴⁾ − 1|", (s.coefficients[4] - 1.0).abs(), 1e-9);
    c
}

fn eigenvector_machinery() -> Criterion {
    let mut c = Criterion::default();
    let (mut schur, mut overlap, mut weight, mut stieltjes, mut sigma) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10u64 {
        let mut r = rng(3000 + seed);
        let n = 8 + (seed as usize % 5);
        let levels = spaced_levels(n, 0.5, &mut r);
        let a = diag_real(&levels);
        let b = scaled_hermitian(n, 0.2, &mut r);
        let i = (seed as usize * 3) % n;
        let s = schur_split(&a, &b, i).unwrap();
        for z in [c64(0.3, 0.7), c64(levels[i], 0.4), c64(-1.0, -0.5)] {
            let direct = inverse(&(&a + &b - CMatrix::identity(n, n) * z))[(i, i)];
            let viaschur = 1.0 / (c64(s.lambda0, 0.0) + s.diag_coupling - z - self_energy(&s, z).unwrap());
            schur = schur.max((direct - viaschur).norm());
        }
        let lambda_hat = fixed_point_eigenvalue(&s).unwrap();
        let m = &a + &b;
        let e = m.clone().symmetric_eigen();
        let (k, _) = (0..n)
            .map(|k| (k, (e.eigenvalues[k] - lambda_hat).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        let exact = e.eigenvectors.column(k)[i].norm_sqr();
        let forms = overlap_squared(&s, lambda_hat).unwrap();
        overlap = overlap
            .max((forms.norm_form - exact).abs())
            .max((forms.derivative_form - exact).abs());

        let g = gaussian(n, &mut r);
        let v: CVector = g.column(0).into_owned();
        let v = &v / c64(v.norm(), 0.0);
        let measure = spectral_measure(&a, &b, &v).unwrap();
        weight = weight.max((measure.total_weight() - 1.0).abs());
        let z = c64(0.1, 0.5);
        let direct = v.dotc(&(inverse(&(&m - CMatrix::identity(n, n) * z)) * &v));
        stieltjes = stieltjes.max((measure.stieltjes(z) - direct).norm());

        let series = eigenvalue_coefficients(&a, &b, i, 3, None).unwrap();
        for sk in cancellation_check(&s, &series, 3).unwrap() {
            sigma = sigma.max(sk);
        }
    }
    c.le("max Schur identity residual", schur, 1e-11);
    c.le("max |overlap² − exact eigensolver| (both routes)", overlap, 1e-9);
    c.le("max |Σ spectral weights − 1|", weight, 1e-12);
    c.le("max Stieltjes identity residual at z = 0.1+0.5i", stieltjes, 1e-10);
    c.le("max cancellation sum σ_k, k ≤ 3", sigma, 1e-8);
    c
}

fn time_series() -> Criterion {
    let mut c = Criterion::default();
    let mut excess = f64::NEG_INFINITY;
    for seed in 0..12u64 {
        let mut r = rng(4000 + seed);
        let n = 2 + (seed as usize) % 7;
        let a = gaussian(n, &mut r) * c64(0.4, 0.0);
        let b = gaussian(n, &mut r) * c64(0.25, 0.0);
        let (na, nb) = (norm2(&a), norm2(&b));
        for t in [0.5, 1.0, 2.0] {
            let terms = exp_series_terms(&a, &b, 10, &TimeGrid::new(t, 400).unwrap()).unwrap();
            let exact = expm_taylor(&((&a + &b) * c64(t, 0.0)));
            for k in 0..=10 {
                let defect = norm2(&(&exact - terms.partial_sum(k)));
                excess = excess.max(defect - remainder_bound(t, na, nb, k + 1) - 1e-7);
            }
        }
    }
    c.le("max (partial-sum defect − remainder bound(k+1) − 1e−7), t ≤ 2, k ≤ 10", excess, 0.0);

    let mut dyson = 0.0f64;
    for seed in 0..10u64 {
        let mut r = rng(4100 + seed);
        let n = 2 + (seed as usize) % 7;
        let alpha: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let beta: Vec<f64> = (0..n).map(|_| r.random_range(-0.8..0.8)).collect();
        let t = 2.0;
        let terms = dyson_terms(&diag_real(&alpha), &diag_real(&beta), 10, &TimeGrid::new(t, 400).unwrap()).unwrap();
        for k in 0..=10 {
            let partial = terms.partial_sum(k);
            for (j, &bj) in beta.iter().enumerate() {
                let mut scalar = c64(0.0, 0.0);
                let mut power = c64(1.0, 0.0);
                for m in 0..=k {
                    if m > 0 {
                        power *= c64(0.0, -t * bj) / m as f64;
                    }
                    scalar += power;
                }
                dyson = dyson.max((partial[(j, j)] - scalar).norm());
            }
        }
    }
    c.le("commuting Dyson partial sums vs Σ (−itβ)ᵐ/m!", dyson, 1e-9);
    c
}

fn laplace_bridge() -> Criterion {
    let mut c = Criterion::default();
    let mut worst = 0.0f64;
    for seed in 0..3u64 {
        let mut r = rng(5000 + seed);
        let n = 4;
        let a = hermitian(n, &mut r);
        let b = hermitian(n, &mut r) * c64(0.3, 0.0);
        let tau = [0.3, 0.5, 0.8][seed as usize];
        let direct = inverse(&(&a + &b + CMatrix::identity(n, n) * c64(0.0, tau)));
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for t_max in [4.0, 6.0, 8.0, 10.0, 12.0] {
            let g = TimeGrid::new(t_max, (200.0 * t_max) as usize).unwrap();
            let bridge = laplace_resolvent_bridge(&a, &b, tau, &g).unwrap();
            xs.push(t_max);
            ys.push(norm2(&(bridge - &direct)).ln());
        }
        let s = slope(&xs, &ys);
        c.note(format!("τ = {tau}: log-defect slope {s:.5}"));
        worst = worst.max((s / -tau - 1.0).abs());
    }
    c.le("max |slope/(−τ) − 1|", worst, 0.1);
    c
}

fn scattering() -> Criterion {
    let mut c = Criterion::default();
    let (mut series_excess, mut convergent, mut abel_excess, mut closed) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY, 0.0f64);
    for seed in 0..30u64 {
        let mut r = rng(6000 + seed);
        let n = 3 + (seed as usize) % 10;
        let levels = spaced_levels(n, 0.5, &mut r);
        let a = diag_real(&levels);
        let b = scaled_hermitian(n, r.random_range(0.02..0.6), &mut r);
        let tau = r.random_range(0.05..1.0);
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        let q = ScatteringQuery::new(i, j, tau).unwrap();
        let lt = c64(0.5 * (levels[i] + levels[j]), -tau);
        let shifted = inverse(&(&a + &b - CMatrix::identity(n, n) * lt));
        let direct = c64(0.0, tau) * shifted[(i, j)];
        let series = s_series(&a, &b, &q, 12).unwrap();
        if series.convergent {
            convergent += 1;
            let bound = series.tail_bound(12, shifted_resolvent_norm(&a, &q).unwrap());
            series_excess = series_excess.max((series.partial_sum(12) - direct).norm() - bound - 1e-12);
        }
        // Low orders from R = (A − λ_τ)⁻¹ written out.
        let rr: Vec<C64> = levels.iter().map(|l| 1.0 / (c64(*l, 0.0) - lt)).collect();
        let it = c64(0.0, tau);
        let s0 = if i == j { it * rr[i] } else { c64(0.0, 0.0) };
        let s1 = -it * rr[i] * b[(i, j)] * rr[j];
        let s2: C64 = (0..n).map(|k| it * rr[i] * b[(i, k)] * rr[k] * b[(k, j)] * rr[j]).sum();
        closed = closed
            .max((series.terms[0] - s0).norm())
            .max((series.terms[1] - s1).norm())
            .max((series.terms[2] - s2).norm());
        if seed < 6 {
            let t_max = 8.0 / tau;
            let g = TimeGrid::new(t_max, (400.0 * t_max) as usize).unwrap();
            let avg = s_entry_time_average(&a, &b, &q, &g).unwrap();
            abel_excess = abel_excess.max((avg - direct).norm() - 2.0 * (-tau * t_max).exp() - 1e-5);
        }
    }
    c.le(
        format!("max (series − direct − geometric bound) over {convergent} convergent instances"),
        series_excess,
        0.0,
    );
    c.flag("at least one convergent instance", convergent > 0);
    c.le("max (|Abel average − direct| − 2e^{−τT} − 1e−5)", abel_excess, 0.0);
    c.le("max |S⁽⁰⁾, S⁽¹⁾, S⁽²⁾ − closed forms|", closed, 1e-10);

    let born = born_demo(
        32,
        &|p: f64| p * p,
        &|x: f64| (-(x - PI).powi(2)).exp(),
        5,
        9,
        0.3,
    )
    .unwrap();
    c.le("Born demo |series − Fourier closed form| at L = 32", born.difference(), 1e-10);

    let linear = |p: f64| p;
    let (p0, q0) = ([-4.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
    let one = RutherfordSetup::new(8, 1.0, 1.0).unwrap();
    let two = RutherfordSetup::new(8, 1.0, 2.0).unwrap();
    let r1 = rutherford_demo(&one, &linear, p0, q0, 3.0, 0.5).unwrap();
    let r2 = rutherford_demo(&two, &linear, p0, q0, 3.0, 0.5).unwrap();
    c.le("Rutherford |total(2Z)/total(Z) − 4|", (r2.total / r1.total - 4.0).abs(), 0.0);
    let half = rutherford_demo(&one, &linear, p0, q0, 3.0, 0.25).unwrap();
    c.note(format!(
        "Rutherford shell: {} modes, {} resonant, totals {:.6e} (τ=0.5), {:.6e} (τ=0.25)",
        r1.shell_size, r1.resonant_modes, r1.total, half.total
    ));
    c.within("Rutherford τ-halving ratio, τ = 0.5 → 0.25", half.total / r1.total, 1.7, 2.3);
    c
}

fn symmetry_and_diagrams() -> Criterion {
    let mut c = Criterion::default();
    let model = Model::new(
        1,
        2,
        vec![
            Species {
                name: "a".into(),
                mass: 1.0,
            },
            Species {
                name: "b".into(),
                mass: 0.5,
            },
        ],
        vec![Vertex {
            legs: vec![0, 0, 1],
            coupling: 0.3,
            damped_legs: vec![2],
        }],
    )
    .unwrap();
    let st = |ps: &[(usize, i64)]| MultisetState::new(ps.iter().map(|&(s, p)| Particle::new(s, vec![p])).collect());
    let seeds = [st(&[(0, 1), (0, -1)]), st(&[(0, 2), (0, 0)]), st(&[(1, 1)])];
    let bop = model.interaction(&seeds, 1).unwrap();
    let (a, b) = bop.dense().unwrap();
    let u = bop.momentum_operator().unwrap();
    let n = bop.len();
    let blocks = block_decompose(&u).unwrap();
    let block_of = |k: usize| blocks.iter().position(|bl| bl.basis_indices.contains(&k)).unwrap();
    let full = inverse(&(&a + &b));
    let mut r = rng(7000);
    let (mut cross_max, mut cross_count, mut same_err) = (0.0f64, 0usize, 0.0f64);
    for _ in 0..300 {
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        let v = restricted_inverse(&a, &b, &u, i, j).unwrap();
        if block_of(i) != block_of(j) {
            cross_count += 1;
            cross_max = cross_max.max(v.norm());
        } else {
            same_err = same_err.max((v - full[(i, j)]).norm());
        }
    }
    c.note(format!("{n} basis states in {} momentum blocks, {cross_count} cross-block entries sampled", blocks.len()));
    c.le("max |cross-block restricted entry| (exact zero)", cross_max, 0.0);
    c.le("max |same-block restricted entry − full inverse|", same_err, 1e-10);

    let i = st(&[(0, 1), (0, -1)]);
    let j = st(&[(0, 2), (0, -2)]);
    let bop = model.interaction(&[i.clone(), j.clone()], 2).unwrap();
    let (a, b) = bop.dense().unwrap();
    let mut partition = 0.0f64;
    for ell in 1..=3 {
        let q = ScatteringQuery::new(bop.position(&i).unwrap(), bop.position(&j).unwrap(), 0.1).unwrap();
        let oracle = s_term_index_sum(&a, &b, &q, ell).unwrap();
        let total: C64 = diagram_values(&bop, &i, &j, 0.1, ell).unwrap().iter().map(|t| t.value).sum();
        partition = partition.max((total - oracle).norm() / oracle.norm().max(1.0));
    }
    c.le("diagram partition identity, ℓ ≤ 3 (relative)", partition, 1e-11);

    let mut r = rng(7100);
    let (mut agree, mut solvable) = (0, 0);
    for _ in 0..100 {
        let inst = random_tree(&mut r);
        let brute = brute_force_tree(&inst.diagram, &inst.momenta, &inst.total);
        let solved = tree_solve(&inst.diagram, &inst.momenta, &inst.total).unwrap();
        let ok = match (brute.as_slice(), &solved) {
            ([], None) => true,
            ([only], Some(s)) => only == s && (inst.perturbed || s == &inst.truth),
            _ => false,
        };
        solvable += usize::from(!brute.is_empty());
        agree += usize::from(ok);
    }
    c.note(format!("{solvable} of 100 random trees admit a conserving assignment"));
    c.flag(format!("tree_solve equals exhaustive search on {agree}/100 instances"), agree == 100);

    let setup = ThreeParticleSetup::default();
    let rep = three_particle_demo(&setup).unwrap();
    let labels: String = rep.rows.iter().map(|row| row.label).collect();
    c.flag(format!("four rows labelled abcd (got {labels})"), labels == "abcd");
    let structure = rep
        .rows
        .iter()
        .map(|row| (row.product - row.expected_product).norm() + (row.denominator - row.expected_denominator).norm())
        .fold(0.0, f64::max);
    c.le("max row deviation from B_ik·B_kj = 1/ω and the tabulated denominators", structure, 1e-12);
    let mut diagrams: Vec<_> = rep.rows.iter().map(|row| &row.diagram).collect();
    diagrams.dedup();
    c.flag("each row draws its own diagram", diagrams.len() == 4);
    c.le(
        "|−2πi Σ rows − paired closed form 2(ω+iτ)/(ω((ω+iτ)²−λ²)) + (ω′, Δω)| at τ = 1e−3",
        (rep.delta_normalized - rep.paired).norm(),
        1e-9,
    );
    c.note(format!(
        "−2πi Σ rows = {:.9}, τ→0 pairing = {:.9}, literal display = {:.9}",
        rep.delta_normalized, rep.limit, rep.literal_display
    ));
    c.le(
        "three-particle literal closed form: |−2πi Σ rows − (−2πi)(1/(ω²−λ²) + 1/(ω′²+(Δω)²))|",
        (rep.delta_normalized - rep.literal_display).norm(),
        1e-9,
    );
    c
}

fn tensor_identities() -> Criterion {
    let mut c = Criterion::default();
    let mut r = rng(8000);
    let a1 = hermitian(3, &mut r);
    let a2 = hermitian(2, &mut r);
    let k = KroneckerSum::new(vec![a1.clone(), a2.clone()]).unwrap();
    let dense = a1.kronecker(&CMatrix::identity(2, 2)) + CMatrix::identity(3, 3).kronecker(&a2);
    let omega = sorted_eigenvalues(&dense)[2];
    let eps = 0.2;
    let direct = inverse(&(&dense - CMatrix::identity(6, 6) * c64(omega, -2.0 * eps)));
    let scale = norm2(&direct);
    let defect = |cutoff: f64| -> f64 {
        let q = LineQuadrature::resolving(cutoff, eps).unwrap();
        norm2(&(convolution_resolvent(&k, omega, eps, &q).unwrap().value - &direct)) / scale
    };
    let (d200, d400) = (defect(200.0), defect(400.0));
    c.note(format!(
        "resonant ω = {omega:.6}, ε = {eps}, ‖(A−ω+2iε)⁻¹‖ = {scale:.3}; absolute defect at cutoff 200: {:.3e}",
        d200 * scale
    ));
    c.le("convolution identity relative defect at cutoff 200", d200, 1e-3);
    c.within("defect ratio cutoff 200 → 400 (halving ± 30%)", d200 / d400, 1.4, 2.6);
    let q = LineQuadrature::resolving(200.0, eps).unwrap();
    let sym = convolution_resolvent_symmetric(&k, omega, eps, &q).unwrap().value;
    let shifted = &dense + CMatrix::identity(6, 6) * c64(0.0, 2.0 * eps);
    let sym_direct =
        &shifted * inverse(&(&shifted * &shifted - CMatrix::identity(6, 6) * c64(omega * omega, 0.0)));
    c.note(format!(
        "even-kernel identity relative defect at cutoff 200: {:.3e}",
        norm2(&(sym - &sym_direct)) / norm2(&sym_direct)
    ));

    let (mut dirac, mut kg) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let p = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        let m = r.random_range(0.0..2.0);
        let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let z = c64(r.random_range(-3.0..3.0), sign * r.random_range(0.5..2.0));
        let prod = dirac_operator(p, m, z) * dirac_block_inverse(p, m, z).unwrap();
        dirac = dirac.max((prod - CMatrix::identity(4, 4)).norm());
        let a = r.random_range(0.0..3.0);
        let prod = klein_gordon_operator(a, z) * klein_gordon_block_inverse(a, z).unwrap();
        kg = kg.max((prod - CMatrix::identity(2, 2)).norm());
    }
    c.le("max Dirac block-inverse product residual over 10⁴ draws", dirac, 1e-13);
    c.le("max Klein–Gordon block-inverse product residual over 10⁴ draws", kg, 1e-13);
    c
}

fn adiabatic_law() -> Criterion {
    let mut c = Criterion::default();
    let sched = Schedule::new(
        diag_real(&[0.0, 1.0]),
        real_matrix(2, 2, &[0.0, 0.2, 0.2, 0.0]),
        Ramp::Smoothstep,
    )
    .unwrap();
    let etas = [50.0, 100.0, 200.0, 400.0];
    let (mut xs, mut ys, mut refine) = (Vec::new(), Vec::new(), 0.0f64);
    for eta in etas {
        let steps = (20.0 * eta) as usize;
        let e1 = adiabatic_evolve(&sched, eta, 0, steps).unwrap().error_vs_eigenpath;
        let e2 = adiabatic_evolve(&sched, eta, 0, 2 * steps).unwrap().error_vs_eigenpath;
        refine = refine.max((e1 - e2).abs() / e2);
        c.note(format!("η = {eta}: error {e2:.4e}"));
        xs.push(eta.ln());
        ys.push(e2.ln());
    }
    c.within("log-error vs log-η slope", slope(&xs, &ys), -1.3, -0.7);
    c.le("max relative change under grid doubling", refine, 0.05);
    c
}

/// ∫x⁴e^{−x²}dx / ∫e^{−x²}dx for the ground state e^{−x²/2} of −Δ + X².
const X4_MOMENT: f64 = 0.75;

fn oscillator() -> Criterion {
    let mut c = Criterion::default();
    let rep = oscillator_demo(400, 0.1, EtaChoice::Fixed(0.0), 2).unwrap();
    c.note(format!("first-order X⁴ coefficient {:.6}", rep.first_order_x4));
    c.le(
        "relative deviation from the Gaussian moment 3/4 at grid size 400",
        (rep.first_order_x4 - X4_MOMENT).abs() / X4_MOMENT,
        0.02,
    );
    c
}

fn main() {
    let criteria: [(usize, &str, u64, fn() -> Criterion); 10] = [
        (1, "resolvent exactness", 10, resolvent_exactness),
        (2, "eigenvalue coefficients", 30, eigenvalue_coefficient_checks),
        (3, "eigenvector machinery", 20, eigenvector_machinery),
        (4, "time series", 30, time_series),
        (5, "Laplace bridge", 10, laplace_bridge),
        (6, "scattering", 60, scattering),
        (7, "symmetry and diagrams", 60, symmetry_and_diagrams),
        (8, "tensor identities", 30, tensor_identities),
        (9, "adiabatic law", 60, adiabatic_law),
        (10, "harmonic-oscillator demo", 10, oscillator),
    ];
    let mut unexpected = 0;
    let mut deviations = Vec::new();
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let failed: Vec<&Check> = result.checks.iter().filter(|ch| !ch.pass).collect();
        let verdict = if failed.is_empty() && in_time { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {verdict} {title} ({:.2} s, budget {budget} s)",
            elapsed.as_secs_f64()
        );
        for ch in &result.checks {
            println!(
                "    [{}] {}: {:.3e} {}",
                if ch.pass { "ok" } else { "FAILED" },
                ch.name,
                ch.value,
                ch.bound
            );
        }
        for note in &result.notes {
            println!("    note: {note}");
        }
        if !in_time {
            unexpected += 1;
        }
        for ch in failed {
            match KNOWN_DEVIATIONS.iter().find(|(k, name, _)| *k == id && ch.name.starts_with(name)) {
                Some((_, _, why)) => deviations.push(format!("criterion {id}: {} ({why})", ch.name)),
                None => unexpected += 1,
            }
        }
    }
    for d in &deviations {
        println!("known deviation: {d}");
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
