mod common;

use common::*;
use pertkit::evolution::{dyson_terms, exp_series_terms, remainder_bound, TimeGrid};
use pertkit::matcore::{contour_integrate, diag_real, ContourSpec};
use pertkit::resolvent::{feynman_parameter_entry, SimplexQuadrature};
use pertkit::spectral::{eigenvalue_coefficients, eigenvector_coefficients, oscillator_demo, schur_split, EtaChoice};
use pertkit::symdiag::{three_particle_demo, ThreeParticleSetup};
use pertkit::{c64, CMatrix, C64};

#[test]
fn eigenvalue_truncation_error_scales_with_order() {
    let mut r = rng(11);
    let n = 6;
    let levels = spaced_levels(n, 1.0, &mut r);
    let a = diag_real(&levels);
    let b = hermitian(n, &mut r) * c64(0.5, 0.0);
    let exact = |eps: f64| sorted_eigenvalues(&(&a + &b * c64(eps, 0.0)))[2];
    let s = eigenvalue_coefficients(&a, &b, 2, 4, None).unwrap();
    for order in 1..=3 {
        let err = |eps: f64| {
            let partial: f64 = (0..=order).map(|k| s.coefficients[k] * eps.powi(k as i32)).sum();
            (partial - exact(eps)).abs()
        };
        let ratio = err(0.02) / err(0.01);
        let expected = 2f64.powi(order as i32 + 1);
        assert!((ratio / expected - 1.0).abs() < 0.3, "order {order}: ratio {ratio}");
    }
}

#[test]
fn eigenvector_coefficients_match_fitted_eigenvectors() {
    let mut r = rng(12);
    let n = 5;
    let a = diag_real(&spaced_levels(n, 1.0, &mut r));
    let b = hermitian(n, &mut r) * c64(0.3, 0.0);
    let i = 1;
    let s = schur_split(&a, &b, i).unwrap();
    let series = eigenvalue_coefficients(&a, &b, i, 3, None).unwrap();
    let coeffs = eigenvector_coefficients(&s, &series, 3).unwrap();
    // Exact unit eigenvector of A + εB with ⟨eᵢ, v⟩ > 0, one component at a time.
    let component = |eps: f64, row: usize, imag: bool| -> f64 {
        let e = (&a + &b * c64(eps, 0.0)).symmetric_eigen();
        let k = (0..n)
            .max_by(|&x, &y| e.eigenvectors[(i, x)].norm().total_cmp(&e.eigenvectors[(i, y)].norm()))
            .unwrap();
        let v = e.eigenvectors.column(k);
        let phase = v[i].conj() / v[i].norm();
        let z = v[row] * phase;
        if imag {
            z.im
        } else {
            z.re
        }
    };
    for row in 0..n {
        let re = poly_fit(|eps| component(eps, row, false), 6, 0.05, 25);
        let im = poly_fit(|eps| component(eps, row, true), 6, 0.05, 25);
        for k in 0..=3 {
            let fitted = c64(re[k], im[k]);
            assert!((coeffs[k][row] - fitted).norm() < 1e-6, "row {row} order {k}");
        }
    }
}

#[test]
fn feynman_parameters_agree_with_direct_inverse() {
    let a = diag_real(&[0.5, 1.0, 1.7]);
    let mut r = rng(13);
    let b = hermitian(3, &mut r) * c64(0.05, 0.0);
    let tau = 0.8;
    let direct = inverse(&(&a + &b + CMatrix::identity(3, 3) * c64(0.0, tau)));
    let grid = feynman_parameter_entry(&a, &b, 0, 2, tau, 5, SimplexQuadrature::RecursiveGrid { depth: 8 }).unwrap();
    assert!((grid.value - direct[(0, 2)]).norm() < 1e-6);
    let mc = feynman_parameter_entry(
        &a,
        &b,
        0,
        2,
        tau,
        4,
        SimplexQuadrature::MonteCarlo {
            samples: 20_000,
            seed: 5,
        },
    )
    .unwrap();
    assert!((mc.value - direct[(0, 2)]).norm() < (3.0 * mc.std_error).max(1e-6));
}

#[test]
fn series_reconstruct_exponentials() {
    let mut r = rng(14);
    let n = 4;
    let a = gaussian(n, &mut r) * c64(0.3, 0.0);
    let b = gaussian(n, &mut r) * c64(0.2, 0.0);
    let (na, nb) = (norm2(&a), norm2(&b));
    let t = 1.5;
    let g = TimeGrid::new(t, 300).unwrap();
    let exp_terms = exp_series_terms(&a, &b, 8, &g).unwrap();
    let exact = expm_taylor(&((&a + &b) * c64(t, 0.0)));
    let (ha, hb) = (hermitian(n, &mut r), hermitian(n, &mut r) * c64(0.3, 0.0));
    let dyson = dyson_terms(&ha, &hb, 8, &g).unwrap();
    let target = expm_taylor(&(&ha * c64(0.0, t))) * expm_taylor(&((&ha + &hb) * c64(0.0, -t)));
    for k in 0..=8 {
        let step = 10.0 * g.step().powi(4);
        let bound = remainder_bound(t, na, nb, k + 1) + step;
        assert!(norm2(&(&exact - exp_terms.partial_sum(k))) <= bound, "exp order {k}");
        let bound = remainder_bound(t, 0.0, norm2(&hb), k + 1) + step;
        assert!(norm2(&(&target - dyson.partial_sum(k))) <= bound, "dyson order {k}");
    }
}

#[test]
fn contour_quadrature_converges_geometrically() {
    // (1/2πi)∮ e^z/(z − 1.5) dz = e^{1.5} on the circle of radius 2.
    let exact = c64(1.5f64.exp(), 0.0);
    let mut last = f64::INFINITY;
    for points in [16, 32, 64, 128] {
        let c = ContourSpec::new(c64(0.0, 0.0), 2.0, points).unwrap();
        let v: C64 = contour_integrate(|z| Ok(z.exp() / (z - 1.5)), &c).unwrap();
        let err = (v - exact).norm();
        assert!(err <= 1e-13 || err <= 10.0 * last * last, "{points} points: {err} after {last}");
        last = err;
    }
}

#[test]
fn oscillator_reparameterization_helps() {
    let rep = oscillator_demo(150, 0.2, EtaChoice::Auto, 2).unwrap();
    assert!(rep.shifted_mean_coupling.abs() < 1e-10);
    assert!((rep.shifted_series - rep.exact).abs() <= (rep.plain_series - rep.exact).abs());
}

#[test]
fn three_particle_pairing_approaches_its_limit() {
    let mut last = f64::INFINITY;
    for tau in [1e-2, 1e-3, 1e-4] {
        let rep = three_particle_demo(&ThreeParticleSetup {
            tau,
            ..Default::default()
        })
        .unwrap();
        let gap = (rep.delta_normalized - rep.limit).norm();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-3);
}
