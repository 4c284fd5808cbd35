use num_complex::Complex64;

use super::linalg::{hermitian_defect, hermitian_eigen_unchecked, hermitian_part, trace, CMatrix};
use super::{PartySignature, TensorError, EXACT_TOL, RECONSTRUCTION_TOL};

/// Hermitian, unit-trace, positive semidefinite operator on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    signature: PartySignature,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity (min eigenvalue >= -1e-10).
    pub fn new(signature: PartySignature, matrix: CMatrix) -> Result<Self, TensorError> {
        let dim = signature.total_dim();
        if matrix.shape() != (dim, dim) {
            return Err(TensorError::ShapeMismatch {
                expected: dim * dim,
                found: matrix.len(),
            });
        }
        let defect = hermitian_defect(&matrix);
        if defect > EXACT_TOL {
            return Err(TensorError::NotHermitian(defect));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(TensorError::InvalidTrace(tr.re));
        }
        let min_eig = hermitian_eigen_unchecked(&hermitian_part(&matrix)).eigenvalues[0];
        if min_eig < -RECONSTRUCTION_TOL {
            return Err(TensorError::NotPositive(min_eig));
        }
        Ok(Self { signature, matrix })
    }

    pub(crate) fn from_parts_unchecked(signature: PartySignature, matrix: CMatrix) -> Self {
        Self { signature, matrix }
    }

    /// Maximally mixed state `I / D`.
    pub fn maximally_mixed(signature: PartySignature) -> Self {
        let dim = signature.total_dim();
        let matrix = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);
        Self { signature, matrix }
    }

    /// `rho_1 ⊗ rho_2`, parties concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.signature.dims().to_vec();
        dims.extend_from_slice(other.signature.dims());
        let signature = PartySignature::new(dims).expect("product of valid signatures");
        Self {
            signature,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn signature(&self) -> &PartySignature {
        &self.signature
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen_unchecked(&hermitian_part(&self.matrix)).eigenvalues
    }

    /// Reduced state on the parties in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, TensorError> {
        let keep = self.signature.normalize_subset(keep)?;
        let matrix = partial_trace_matrix(&self.matrix, &self.signature, &keep)?;
        Ok(Self {
            signature: self.signature.restrict(&keep)?,
            matrix,
        })
    }
}

/// Partial trace of any square matrix on `signature`, keeping the parties in `keep`.
///
/// The result is indexed by the kept parties in ascending order.
pub fn partial_trace_matrix(
    matrix: &CMatrix,
    signature: &PartySignature,
    keep: &[usize],
) -> Result<CMatrix, TensorError> {
    let dim = signature.total_dim();
    if matrix.shape() != (dim, dim) {
        return Err(TensorError::ShapeMismatch {
            expected: dim * dim,
            found: matrix.len(),
        });
    }
    let keep = signature.normalize_subset(keep)?;
    let dims = signature.dims();
    let mut strides = vec![1usize; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * dims[p + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let keep_offsets = offsets(dims, &strides, &keep);
    let traced_offsets = offsets(dims, &strides, &traced);

    let out_dim = keep_offsets.len();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (r, &kr) in keep_offsets.iter().enumerate() {
        for (c, &kc) in keep_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_offsets {
                acc += matrix[(kr + t, kc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// `op ⊗ I` with `op` acting on the parties in `keep` (ascending) and the identity on
/// the rest; the adjoint of [`partial_trace_matrix`].
pub fn embed_local(op: &CMatrix, signature: &PartySignature, keep: &[usize]) -> Result<CMatrix, TensorError> {
    let keep = signature.normalize_subset(keep)?;
    let dims = signature.dims();
    let mut strides = vec![1usize; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * dims[p + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let keep_offsets = offsets(dims, &strides, &keep);
    let traced_offsets = offsets(dims, &strides, &traced);
    if op.shape() != (keep_offsets.len(), keep_offsets.len()) {
        return Err(TensorError::ShapeMismatch {
            expected: keep_offsets.len() * keep_offsets.len(),
            found: op.len(),
        });
    }
    let dim = signature.total_dim();
    let mut out = CMatrix::zeros(dim, dim);
    for (r, &kr) in keep_offsets.iter().enumerate() {
        for (c, &kc) in keep_offsets.iter().enumerate() {
            let z = op[(r, c)];
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &t in &traced_offsets {
                out[(kr + t, kc + t)] = z;
            }
        }
    }
    Ok(out)
}

/// Flat-index contributions of every multi-index over `parties`, row-major among them.
fn offsets(dims: &[usize], strides: &[usize], parties: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &p in parties {
        out = out
            .iter()
            .flat_map(|&base| (0..dims[p]).map(move |i| base + i * strides[p]))
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::random_hermitian;
    use crate::tensor::{AmplitudeTensor, SeededRng};

    fn real(values: &[f64], n: usize) -> CMatrix {
        CMatrix::from_row_slice(
            n,
            n,
            &values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
        )
    }

    fn bell() -> AmplitudeTensor {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let a = Complex64::new(h, 0.0);
        AmplitudeTensor::new(PartySignature::uniform(2, 2).unwrap(), vec![a, z, z, a]).unwrap()
    }

    #[test]
    fn ket_zero_density() {
        let s = AmplitudeTensor::basis(PartySignature::uniform(1, 2).unwrap(), &[0]).unwrap();
        assert_eq!(s.to_density().matrix(), &real(&[1.0, 0.0, 0.0, 0.0], 2));
    }

    #[test]
    fn bell_density_has_corner_halves() {
        let rho = bell().to_density();
        let mut want = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(r, c)] = Complex64::new(0.5, 0.0);
        }
        assert!((rho.matrix() - want).norm() < 1e-15);
    }

    #[test]
    fn random_pure_density_is_rank_one() {
        let sig = PartySignature::new(vec![3, 2, 2]).unwrap();
        let rho = AmplitudeTensor::haar_random(&sig, &mut SeededRng::new(4)).to_density();
        let eig = rho.eigenvalues();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((eig[eig.len() - 1] - 1.0).abs() < 1e-10);
        assert!(eig[..eig.len() - 1].iter().all(|l| l.abs() < 1e-10));
        assert!(DensityMatrix::new(sig, rho.into_matrix()).is_ok());
    }

    #[test]
    fn product_state_traces_to_factor() {
        let a = DensityMatrix::new(PartySignature::uniform(1, 2).unwrap(), real(&[0.7, 0.1, 0.1, 0.3], 2)).unwrap();
        let b = DensityMatrix::maximally_mixed(PartySignature::uniform(1, 3).unwrap());
        let ab = a.tensor(&b);
        assert!((ab.partial_trace(&[0]).unwrap().matrix() - a.matrix()).norm() < 1e-15);
        assert!((ab.partial_trace(&[1]).unwrap().matrix() - b.matrix()).norm() < 1e-15);
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let rho = bell().to_density();
        for keep in [0, 1] {
            let m = rho.partial_trace(&[keep]).unwrap();
            assert!((m.matrix() - real(&[0.5, 0.0, 0.0, 0.5], 2)).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_pair_marginals() {
        // direct index summation: |000><000|, |111><111| survive with weight 1/2 each;
        // the coherences |000><111| need matching traced indices and vanish.
        let z = Complex64::new(1.0, 0.0);
        let ghz = AmplitudeTensor::ghz(PartySignature::uniform(3, 2).unwrap(), z, z).unwrap();
        let rho = ghz.to_density();
        let mut want = CMatrix::zeros(4, 4);
        want[(0, 0)] = Complex64::new(0.5, 0.0);
        want[(3, 3)] = Complex64::new(0.5, 0.0);
        for keep in [[0, 1], [0, 2], [1, 2]] {
            let m = rho.partial_trace(&keep).unwrap();
            assert!((m.matrix() - &want).norm() < 1e-15, "keep {keep:?}");
        }
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell().to_density();
        assert!(matches!(rho.partial_trace(&[]), Err(TensorError::EmptySubset)));
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(TensorError::PartyOutOfRange { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let sig = PartySignature::uniform(1, 2).unwrap();
        assert!(matches!(
            DensityMatrix::new(sig.clone(), real(&[1.0, 0.0, 0.0, 1.0], 2)),
            Err(TensorError::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(sig.clone(), real(&[1.5, 0.0, 0.0, -0.5], 2)),
            Err(TensorError::NotPositive(_))
        ));
        assert!(matches!(
            DensityMatrix::new(sig, real(&[0.5, 0.2, 0.0, 0.5], 2)),
            Err(TensorError::NotHermitian(_))
        ));
    }

    #[test]
    fn embedding_is_adjoint_of_partial_trace() {
        use crate::tensor::linalg::hs_inner;
        let sig = PartySignature::new(vec![2, 3, 2]).unwrap();
        let mut rng = SeededRng::new(12);
        for keep in [vec![0], vec![1, 2], vec![0, 2]] {
            let x = random_hermitian(12, &mut rng);
            let side = sig.restrict(&keep).unwrap().total_dim();
            let y = random_hermitian(side, &mut rng);
            let lhs = hs_inner(&partial_trace_matrix(&x, &sig, &keep).unwrap(), &y);
            let rhs = hs_inner(&x, &embed_local(&y, &sig, &keep).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_dims_keep_order() {
        let sig = PartySignature::new(vec![2, 3, 4]).unwrap();
        let mut rng = SeededRng::new(8);
        let x = random_hermitian(24, &mut rng);
        let m = partial_trace_matrix(&x, &sig, &[2, 0]).unwrap();
        assert_eq!(m.shape(), (8, 8));
    }
}
