use crate::error::{Error, Result};
use crate::matcore::{
    c64, eig_hermitian, ensure_same_shape, ensure_square, is_diagonal, is_hermitian, solve, CMatrix, CVector, C64,
};

/// Eigenvalues of U closer than this are treated as one eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;
const COMMUTE_RTOL: f64 = 1e-10;

/// One eigenspace E_μ of U. `vectors` holds an orthonormal basis as columns; for
/// diagonal U these are the unit vectors listed in `basis_indices`, otherwise
/// `basis_indices` numbers the Schur vectors spanning E_μ.
#[derive(Debug, Clone)]
pub struct EigenspaceBlock {
    pub eigenvalue: C64,
    pub basis_indices: Vec<usize>,
    pub vectors: CMatrix,
}

impl EigenspaceBlock {
    pub fn size(&self) -> usize {
        self.basis_indices.len()
    }

    /// ‖P_μ x‖ for a vector x.
    fn weight(&self, x: &CVector) -> f64 {
        (self.vectors.adjoint() * x).norm()
    }
}

/// ‖UM − MU‖ ≤ 1e−10·‖U‖·‖M‖ in the Frobenius norm.
pub fn commute_check(u: &CMatrix, m: &CMatrix) -> Result<bool> {
    ensure_same_shape(u, m)?;
    let defect = (u * m - m * u).norm();
    Ok(defect <= COMMUTE_RTOL * u.norm() * m.norm())
}

fn cluster(values: &[C64]) -> Vec<(C64, Vec<usize>)> {
    let mut groups: Vec<(C64, Vec<usize>)> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match groups.iter_mut().find(|(mu, _)| (mu - v).norm() <= CLUSTER_TOL) {
            Some((_, idx)) => idx.push(k),
            None => groups.push((v, vec![k])),
        }
    }
    groups
}

/// Eigenspaces of a normal U, eigenvalues clustered at [`CLUSTER_TOL`].
pub fn block_decompose(u: &CMatrix) -> Result<Vec<EigenspaceBlock>> {
    let n = ensure_square(u)?;
    if is_diagonal(u) {
        let values: Vec<C64> = (0..n).map(|k| u[(k, k)]).collect();
        return Ok(cluster(&values)
            .into_iter()
            .map(|(mu, idx)| EigenspaceBlock {
                eigenvalue: mu,
                vectors: CMatrix::from_fn(n, idx.len(), |r, c| if r == idx[c] { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
                basis_indices: idx,
            })
            .collect());
    }
    let defect = (u * u.adjoint() - u.adjoint() * u).norm();
    if defect > COMMUTE_RTOL * u.norm().powi(2).max(1.0) {
        return Err(Error::NotNormal { defect });
    }
    let (q, values) = if is_hermitian(u) {
        let e = eig_hermitian(u)?;
        let values = e.eigenvalues.iter().map(|&x| c64(x, 0.0)).collect();
        (e.eigenvectors, values)
    } else {
        // For normal U the Schur form is diagonal and its vectors are eigenvectors.
        let (q, t) = u.clone().schur().unpack();
        let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
        (q, values)
    };
    Ok(cluster(&values)
        .into_iter()
        .map(|(mu, idx)| EigenspaceBlock {
            eigenvalue: mu,
            vectors: CMatrix::from_fn(n, idx.len(), |r, c| q[(r, idx[c])]),
            basis_indices: idx,
        })
        .collect())
}

fn block_of(blocks: &[EigenspaceBlock], k: usize, n: usize) -> Result<usize> {
    let e = CVector::from_fn(n, |r, _| if r == k { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
    blocks
        .iter()
        .position(|b| (b.weight(&e) - 1.0).abs() <= 1e-10)
        .ok_or_else(|| Error::invalid(format!("basis vector {k} is not an eigenvector of U")))
}

/// ((A+B)⁻¹)_{ij} using the U-symmetry: exactly zero when eᵢ and eⱼ lie in different
/// eigenspaces of U, otherwise a solve inside the shared eigenspace.
pub fn restricted_inverse(a: &CMatrix, b: &CMatrix, u: &CMatrix, i: usize, j: usize) -> Result<C64> {
    let n = ensure_same_shape(a, b)?;
    ensure_same_shape(a, u)?;
    if i >= n || j >= n {
        return Err(Error::invalid(format!("entry ({i}, {j}) outside dimension {n}")));
    }
    for m in [a, b] {
        if !commute_check(u, m)? {
            return Err(Error::NotCommuting {
                defect: (u * m - m * u).norm(),
            });
        }
    }
    let blocks = block_decompose(u)?;
    let (bi, bj) = (block_of(&blocks, i, n)?, block_of(&blocks, j, n)?);
    if bi != bj {
        return Ok(c64(0.0, 0.0));
    }
    let q = &blocks[bi].vectors;
    let m = a + b;
    let reduced = q.adjoint() * &m * q;
    let rhs = q.adjoint() * CVector::from_fn(n, |r, _| if r == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
    let x = q * solve(&reduced, &rhs)?;
    Ok(x[i])
}
