//! Oracles and instance generators shared by the integration tests and the
//! acceptance harness. Everything here is computed independently of the library
//! routines it is used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use pertkit::symdiag::{Diagram, Endpoint, Line, Momentum};
use pertkit::{c64, CMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        c64(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, rng);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    gaussian(n, rng).qr().q()
}

/// Largest singular value, straight from nalgebra.
pub fn norm2(m: &CMatrix) -> f64 {
    m.singular_values().max()
}

/// Hermitian `m` raised to a real power through its eigendecomposition.
pub fn hermitian_power(m: &CMatrix, p: f64) -> CMatrix {
    let e = m.clone().symmetric_eigen();
    let d = CMatrix::from_diagonal(&e.eigenvalues.map(|l| c64(l.powf(p), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Positive definite A with spectrum in [1, 4] and Hermitian B with
/// ‖A^{−1/2}BA^{−1/2}‖ = `ratio`.
pub fn pd_pair(n: usize, ratio: f64, rng: &mut impl Rng) -> (CMatrix, CMatrix) {
    let u = unitary(n, rng);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| c64(rng.random_range(1.0..4.0), 0.0)));
    let a = &u * d * u.adjoint();
    let b0 = hermitian(n, rng);
    let s = hermitian_power(&a, -0.5);
    let r0 = norm2(&(&s * &b0 * &s));
    (a, b0 * c64(ratio / r0, 0.0))
}

/// Sorted distinct reals with consecutive gaps of at least `gap`.
pub fn spaced_levels(n: usize, gap: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut x = rng.random_range(-1.0..1.0);
    (0..n)
        .map(|k| {
            if k > 0 {
                x += gap * (1.0 + rng.random::<f64>());
            }
            x
        })
        .collect()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn sorted_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Taylor coefficients c₀..c_deg of f near 0 from a least-squares polynomial fit
/// on `points` Chebyshev nodes of [−h, h].
pub fn poly_fit(f: impl Fn(f64) -> f64, degree: usize, h: f64, points: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (0..points)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / points as f64).cos())
        .collect();
    let v = DMatrix::from_fn(points, degree + 1, |r, c| nodes[r].powi(c as i32));
    let y = DMatrix::from_fn(points, 1, |r, _| f(h * nodes[r]));
    let coef = v.svd(true, true).solve(&y, 1e-14).expect("least squares");
    (0..=degree).map(|k| coef[(k, 0)] / h.powi(k as i32)).collect()
}

/// A random tree diagram with balanced external momenta, aligned with the sorted
/// lines. Internal momenta are drawn from {−2..2}^dim, the box searched by
/// [`brute_force_tree`]. With probability one half one
/// external momentum is shifted, which breaks global balance.
pub struct TreeInstance {
    pub diagram: Diagram,
    pub momenta: Vec<Option<Momentum>>,
    pub truth: Vec<Momentum>,
    pub total: Momentum,
    pub perturbed: bool,
}

pub fn random_tree(rng: &mut impl Rng) -> TreeInstance {
    let dim = rng.random_range(1..=2usize);
    let max_dots = if dim == 1 { 6 } else { 4 };
    let dots = rng.random_range(1..=max_dots);
    let draw = |rng: &mut dyn rand::RngCore, r: i64| -> Momentum { (0..dim).map(|_| rng.random_range(-r..=r)).collect() };
    let mut lines: Vec<(Line, Momentum)> = Vec::new();
    let line = |start, end| Line { species: 0, start, end };
    for b in 2..=dots {
        let a = rng.random_range(1..b);
        lines.push((line(Endpoint::Dot(a), Endpoint::Dot(b)), draw(rng, 2)));
    }
    for x in 1..=dots {
        // net = Σ ending at x − Σ starting at x over the lines so far
        let mut net = vec![0i64; dim];
        for (l, p) in &lines {
            let s = if l.end == Endpoint::Dot(x) {
                1
            } else if l.start == Endpoint::Dot(x) {
                -1
            } else {
                0
            };
            for (n, v) in net.iter_mut().zip(p) {
                *n += s * v;
            }
        }
        if rng.random_bool(0.5) {
            let extra = draw(rng, 1);
            lines.push((line(Endpoint::ExternalIn, Endpoint::Dot(x)), extra.clone()));
            for (n, v) in net.iter_mut().zip(&extra) {
                *n += v;
            }
        }
        let balance: Momentum = net.iter().map(|v| -v).collect();
        if rng.random_bool(0.5) {
            lines.push((line(Endpoint::ExternalIn, Endpoint::Dot(x)), balance));
        } else {
            lines.push((line(Endpoint::Dot(x), Endpoint::ExternalOut), net));
        }
    }
    if rng.random_bool(0.2) {
        let p = draw(rng, 1);
        lines.push((line(Endpoint::ExternalIn, Endpoint::ExternalOut), p));
    }
    lines.sort_by_key(|x| x.0);
    let diagram = Diagram::new(dots, lines.iter().map(|(l, _)| *l).collect()).expect("valid diagram");
    let truth: Vec<Momentum> = lines.iter().map(|(_, p)| p.clone()).collect();
    let mut momenta: Vec<Option<Momentum>> = lines
        .iter()
        .map(|(l, p)| if l.is_internal() { None } else { Some(p.clone()) })
        .collect();
    let mut total = vec![0i64; dim];
    for (l, p) in &lines {
        if l.start == Endpoint::ExternalIn {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
    }
    let perturbed = rng.random_bool(0.5);
    if perturbed {
        let ext: Vec<usize> = (0..lines.len()).filter(|&k| !lines[k].0.is_internal() && !lines[k].0.is_spectator()).collect();
        let k = ext[rng.random_range(0..ext.len())];
        if let Some(p) = momenta[k].as_mut() {
            p[0] += 1;
        }
    }
    TreeInstance {
        diagram,
        momenta,
        truth,
        total,
        perturbed,
    }
}

/// Every assignment of the internal lines from {−2..2}^dim that conserves momentum
/// at each dot and matches `total` on both sides.
pub fn brute_force_tree(d: &Diagram, momenta: &[Option<Momentum>], total: &[i64]) -> Vec<Vec<Momentum>> {
    let dim = total.len();
    let internal: Vec<usize> = (0..d.lines.len()).filter(|&k| d.lines[k].is_internal()).collect();
    let values: Vec<Momentum> = {
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| (-2..=2).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        out
    };
    let sum_side = |assign: &[Momentum], pick: &dyn Fn(&Line) -> bool| -> Momentum {
        let mut s = vec![0i64; dim];
        for (l, p) in d.lines.iter().zip(assign) {
            if pick(l) {
                for (a, v) in s.iter_mut().zip(p) {
                    *a += v;
                }
            }
        }
        s
    };
    let mut found = Vec::new();
    let combos = values.len().pow(internal.len() as u32);
    for mut code in 0..combos {
        let mut assign: Vec<Momentum> = momenta.iter().map(|p| p.clone().unwrap_or_default()).collect();
        for &k in &internal {
            assign[k] = values[code % values.len()].clone();
            code /= values.len();
        }
        let ok_dots = (1..=d.num_dots).all(|x| {
            let ending = sum_side(&assign, &|l: &Line| l.end == Endpoint::Dot(x));
            let starting = sum_side(&assign, &|l: &Line| l.start == Endpoint::Dot(x));
            ending == starting
        });
        let ins = sum_side(&assign, &|l: &Line| l.start == Endpoint::ExternalIn);
        let outs = sum_side(&assign, &|l: &Line| l.end == Endpoint::ExternalOut);
        if ok_dots && ins == total && outs == total {
            found.push(assign);
        }
    }
    found
}

/// e^M by scaling and squaring of a 30-term Taylor polynomial.
pub fn expm_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = m.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = m * c64(0.5f64.powi(s), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 1..30 {
        term = &term * &x * c64(1.0 / j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn inverse(m: &CMatrix) -> CMatrix {
    m.clone().try_inverse().expect("invertible")
}

/// Least-squares slope of y against x.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
