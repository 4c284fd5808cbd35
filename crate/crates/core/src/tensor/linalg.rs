//! Dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{SeededRng, TensorError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance accepted by [`hermitian_eigen`], relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// How singular values are compared against zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TolPolicy {
    /// `max(rows, cols) * f64::EPSILON * sigma_max`.
    #[default]
    MachineDefault,
    /// Singular values below `tol * sigma_max` count as zero.
    Relative(f64),
    /// Singular values below `tol` count as zero.
    Absolute(f64),
}

impl TolPolicy {
    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            TolPolicy::MachineDefault => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            TolPolicy::Relative(tol) => tol * sigma_max,
            TolPolicy::Absolute(tol) => tol,
        }
    }
}

/// Numerical rank, kernel and the singular values used to decide them.
#[derive(Debug, Clone)]
pub struct RankInfo {
    pub rank: usize,
    /// Orthonormal columns spanning the numerical kernel.
    pub null_basis: CMatrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl RankInfo {
    pub fn nullity(&self) -> usize {
        self.null_basis.ncols()
    }
}

/// Rank and kernel of a rectangular complex matrix by SVD.
pub fn rank_and_nullspace(matrix: &CMatrix, policy: TolPolicy) -> RankInfo {
    let (rows, cols) = matrix.shape();
    if rows == 0 || cols == 0 {
        return RankInfo {
            rank: 0,
            null_basis: CMatrix::identity(cols, cols),
            singular_values: Vec::new(),
            threshold: 0.0,
        };
    }
    // Zero rows leave the right singular vectors unchanged and make V^H square.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(matrix);
        p
    } else {
        matrix.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = policy.threshold(rows, cols, sigma_max);
    let rank = singular_values
        .iter()
        .take(rows.min(cols))
        .filter(|&&s| s > threshold)
        .count();
    let null_rows: Vec<usize> = order[rank..].to_vec();
    let mut null_basis = CMatrix::zeros(cols, null_rows.len());
    for (c, &r) in null_rows.iter().enumerate() {
        for k in 0..cols {
            null_basis[(k, c)] = v_t[(r, k)].conj();
        }
    }
    RankInfo {
        rank,
        null_basis,
        singular_values: singular_values.into_iter().take(rows.min(cols)).collect(),
        threshold,
    }
}

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (c, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(c).scale_mut(lambda);
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

pub fn hermitian_eigen(matrix: &CMatrix) -> Result<HermitianEigen, TensorError> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(TensorError::NotSquare { rows, cols });
    }
    let scale = max_abs(matrix).max(1.0);
    let asym = hermitian_defect(matrix);
    if asym > HERMITIAN_TOL * scale {
        return Err(TensorError::NotHermitian(asym));
    }
    Ok(hermitian_eigen_unchecked(&hermitian_part(matrix)))
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn hermitian_eigen_unchecked(matrix: &CMatrix) -> HermitianEigen {
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(matrix.nrows(), matrix.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Largest entrywise modulus of `m - m^H`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Real part of `Tr(a^H b)`; the Hilbert-Schmidt inner product on Hermitian matrices.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(hermitian: &CMatrix) -> f64 {
    hermitian_eigen_unchecked(&hermitian_part(hermitian))
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum()
}

pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * trace_norm(&(a - b))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scaling).
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gaussian(), rng.gaussian()));
    hermitian_part(&g)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gaussian(), rng.gaussian()));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}
