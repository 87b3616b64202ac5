use crate::error::{Error, Result};
use crate::matcore::{
    c64, contour_integrate, contour_integrate_estimate, eigenbasis, ensure_hermitian,
    ensure_same_shape, is_diagonal, CMatrix, ContourSpec, SpectralDecomposition, C64,
};

/// Eigenvalue coefficients λ⁽⁰⁾..λ⁽ᴷ⁾ of A + εB around one eigenvalue of A.
#[derive(Debug, Clone)]
pub struct EigenPerturbationSeries {
    pub coefficients: Vec<f64>,
    pub contour: ContourSpec,
    pub target_index: usize,
    /// Distance between the quadrature on `contour` and on its 2× refinement.
    pub quadrature_error: f64,
}

impl EigenPerturbationSeries {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Σ_{k≤K} λ⁽ᵏ⁾ εᵏ.
    pub fn evaluate(&self, eps: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionSeries {
    /// π⁽ᵏ⁾ for k = 0..=K in the original coordinates.
    pub coefficients: Vec<CMatrix>,
}

impl ProjectionSeries {
    pub fn evaluate(&self, eps: f64) -> CMatrix {
        let n = self.coefficients[0].nrows();
        self.coefficients
            .iter()
            .rev()
            .fold(CMatrix::zeros(n, n), |acc, c| acc * c64(eps, 0.0) + c)
    }
}

/// Circle centred on eigenvalue `i` with radius half the gap to the rest of the
/// spectrum (radius 1 for a 1×1 matrix).
pub fn default_contour(eig: &SpectralDecomposition, i: usize) -> Result<ContourSpec> {
    let gap = eig.gap(i);
    if gap == 0.0 {
        return Err(Error::invalid(format!("eigenvalue {i} is not isolated")));
    }
    let radius = if gap.is_finite() { 0.5 * gap } else { 1.0 };
    ContourSpec::circle(eig.eigenvalues[i], radius)
}

/// The contour must enclose eigenvalue `i` and no other eigenvalue. The count
/// is measured by quadrature of Tr((z−A)⁻¹), the same rule the coefficients use.
fn check_enclosure(eig: &SpectralDecomposition, i: usize, c: &ContourSpec) -> Result<()> {
    let count = contour_integrate(
        |z| Ok(eig.eigenvalues.iter().map(|&l| 1.0 / (z - l)).sum::<C64>()),
        c,
    )?;
    let inside = c.contains(c64(eig.eigenvalues[i], 0.0));
    if !inside || (count.re - 1.0).abs() > 1e-6 || count.im.abs() > 1e-6 {
        return Err(Error::ContourEnclosure {
            expected: 1,
            found: count.re,
        });
    }
    Ok(())
}

fn prepare(a: &CMatrix, b: &CMatrix, i: usize) -> Result<(SpectralDecomposition, CMatrix)> {
    let n = ensure_same_shape(a, b)?;
    ensure_hermitian(a)?;
    if i >= n {
        return Err(Error::invalid(format!("index {i} outside dimension {n}")));
    }
    let eig = eigenbasis(a)?;
    let bt = if is_diagonal(a) {
        b.clone()
    } else {
        eig.eigenvectors.adjoint() * b * &eig.eigenvectors
    };
    Ok((eig, bt))
}

/// Tr(Mᵏ) for k = 1..=k_max with M = diag(dinv)·bt, avoiding full products
/// for the first two orders.
fn trace_powers(dinv: &[C64], bt: &CMatrix, k_max: usize) -> Vec<C64> {
    let n = dinv.len();
    let mut out = Vec::with_capacity(k_max);
    if k_max == 0 {
        return out;
    }
    out.push((0..n).map(|i| dinv[i] * bt[(i, i)]).sum());
    if k_max == 1 {
        return out;
    }
    let m = CMatrix::from_fn(n, n, |r, c| dinv[r] * bt[(r, c)]);
    let trace_with = |p: &CMatrix| -> C64 {
        let mut s = c64(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                s += p[(r, c)] * m[(c, r)];
            }
        }
        s
    };
    out.push(trace_with(&m));
    let mut p = m.clone();
    for _ in 3..=k_max {
        p = &p * &m;
        out.push(trace_with(&p));
    }
    out
}

/// λ⁽ᵏ⁾ = (1/2πik)∮ Tr([(z−A)⁻¹B]ᵏ) dz for k = 1..=K; λ⁽⁰⁾ = λᵢ.
///
/// The index `i` refers to the basis order of A: natural order for diagonal A,
/// ascending eigenvalue order otherwise. With `contour = None` the default
/// circle of [`default_contour`] is used.
pub fn eigenvalue_coefficients(
    a: &CMatrix,
    b: &CMatrix,
    i: usize,
    order: usize,
    contour: Option<ContourSpec>,
) -> Result<EigenPerturbationSeries> {
    let (eig, bt) = prepare(a, b, i)?;
    let c = match contour {
        Some(c) => c,
        None => default_contour(&eig, i)?,
    };
    check_enclosure(&eig, i, &c)?;
    let lambda = &eig.eigenvalues;
    let (traces, err) = contour_integrate_estimate(
        |z| {
            let dinv: Vec<C64> = lambda.iter().map(|&l| 1.0 / (z - l)).collect();
            Ok(trace_powers(&dinv, &bt, order))
        },
        &c,
    )?;
    let mut coefficients = Vec::with_capacity(order + 1);
    coefficients.push(lambda[i]);
    coefficients.extend(traces.iter().enumerate().map(|(k, t)| t.re / (k + 1) as f64));
    Ok(EigenPerturbationSeries {
        coefficients,
        contour: c,
        target_index: i,
        quadrature_error: err,
    })
}

/// Fourth-order coefficient for diagonal A with distinct entries, in the
/// three-sum form (Σ* runs over indices different from i):
///
/// λ⁽⁴⁾ = Σ*_{jkl} B_ij B_jk B_kl B_li / (λ_ij λ_ik λ_il)
///      − Σ*_{jk} (2 B_ii B_ij B_jk B_ki + |B_ij|²|B_ik|²) / (λ_ij² λ_ik)
///      + Σ*_j B_ii² |B_ij|² / λ_ij³,     λ_ij = λ_i − λ_j.
pub fn lambda4_closed_form(a: &CMatrix, b: &CMatrix, i: usize) -> Result<f64> {
    let n = ensure_same_shape(a, b)?;
    if !is_diagonal(a) {
        return Err(Error::invalid("closed form needs a diagonal A"));
    }
    if i >= n {
        return Err(Error::invalid(format!("index {i} outside dimension {n}")));
    }
    let lam: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let mut d = vec![0.0; n];
    for &k in &others {
        d[k] = lam[i] - lam[k];
        if d[k] == 0.0 {
            return Err(Error::invalid(format!(
                "diagonal entries {i} and {k} coincide"
            )));
        }
    }
    let bii = b[(i, i)];
    let mut t1 = c64(0.0, 0.0);
    let mut t2 = c64(0.0, 0.0);
    let mut t3 = c64(0.0, 0.0);
    for &j in &others {
        t3 += bii * bii * b[(i, j)] * b[(j, i)] / d[j].powi(3);
        for &k in &others {
            t2 += (2.0 * bii * b[(i, j)] * b[(j, k)] * b[(k, i)]
                + b[(i, j)] * b[(j, i)] * b[(i, k)] * b[(k, i)])
                / (d[j] * d[j] * d[k]);
            let bij_bjk = b[(i, j)] * b[(j, k)];
            if bij_bjk == c64(0.0, 0.0) {
                continue;
            }
            for &l in &others {
                t1 += bij_bjk * b[(k, l)] * b[(l, i)] / (d[j] * d[k] * d[l]);
            }
        }
    }
    Ok((t1 - t2 + t3).re)
}

/// π⁽ᵏ⁾ = (1/2πi)∮ [(z−A)⁻¹B]ᵏ (z−A)⁻¹ dz for k = 0..=K.
pub fn projection_coefficients(
    a: &CMatrix,
    b: &CMatrix,
    i: usize,
    order: usize,
    contour: Option<ContourSpec>,
) -> Result<ProjectionSeries> {
    let (eig, bt) = prepare(a, b, i)?;
    let c = match contour {
        Some(c) => c,
        None => default_contour(&eig, i)?,
    };
    check_enclosure(&eig, i, &c)?;
    let n = eig.dim();
    let lambda = &eig.eigenvalues;
    let stacked = contour_integrate(
        |z| {
            let dinv: Vec<C64> = lambda.iter().map(|&l| 1.0 / (z - l)).collect();
            let m = CMatrix::from_fn(n, n, |r, col| dinv[r] * bt[(r, col)]);
            let mut term = CMatrix::from_diagonal(&crate::CVector::from_vec(dinv.clone()));
            let mut out = CMatrix::zeros(n, n * (order + 1));
            out.columns_mut(0, n).copy_from(&term);
            for k in 1..=order {
                term = &m * term;
                out.columns_mut(k * n, n).copy_from(&term);
            }
            Ok(out)
        },
        &c,
    )?;
    let v = &eig.eigenvectors;
    let coefficients = (0..=order)
        .map(|k| {
            let block = stacked.columns(k * n, n).into_owned();
            v * block * v.adjoint()
        })
        .collect();
    Ok(ProjectionSeries { coefficients })
}
