use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::FeasibilityError;
use crate::tensor::linalg::{hermitian_eigen_unchecked, trace_norm};
use crate::tensor::{
    embed_local, partial_trace_matrix, CMatrix, DensityMatrix, PartySignature, RANK_TOL, RECONSTRUCTION_TOL,
};

/// Prescribed reduced states: `(party subset, target)` pairs on one signature.
#[derive(Debug, Clone)]
pub struct MarginalConstraintSet {
    signature: PartySignature,
    constraints: Vec<(Vec<usize>, DensityMatrix)>,
}

impl MarginalConstraintSet {
    pub fn new(
        signature: PartySignature,
        constraints: Vec<(Vec<usize>, DensityMatrix)>,
    ) -> Result<Self, FeasibilityError> {
        let constraints = constraints
            .into_iter()
            .map(|(subset, target)| {
                let subset = signature.normalize_subset(&subset)?;
                let expected = signature.restrict(&subset)?;
                if target.signature() != &expected {
                    return Err(FeasibilityError::TargetMismatch {
                        subset,
                        expected: expected.dims().to_vec(),
                        found: target.signature().dims().to_vec(),
                    });
                }
                Ok((subset, target))
            })
            .collect::<Result<_, FeasibilityError>>()?;
        Ok(Self { signature, constraints })
    }

    /// Marginals of `rho` on each subset.
    pub fn from_state(rho: &DensityMatrix, subsets: &[Vec<usize>]) -> Result<Self, FeasibilityError> {
        let constraints = subsets
            .iter()
            .map(|s| Ok((s.clone(), rho.partial_trace(s)?)))
            .collect::<Result<Vec<_>, FeasibilityError>>()?;
        Self::new(rho.signature().clone(), constraints)
    }

    pub fn signature(&self) -> &PartySignature {
        &self.signature
    }

    pub fn constraints(&self) -> &[(Vec<usize>, DensityMatrix)] {
        &self.constraints
    }

    pub fn subsets(&self) -> Vec<Vec<usize>> {
        self.constraints.iter().map(|(s, _)| s.clone()).collect()
    }

    /// Largest trace-norm mismatch between a marginal of `x` and its target, including
    /// the deviation of `Tr x` from 1.
    pub fn marginal_residual(&self, x: &CMatrix) -> Result<f64, FeasibilityError> {
        let mut worst = (x.trace() - Complex64::new(1.0, 0.0)).norm();
        for (subset, target) in &self.constraints {
            let reduced = partial_trace_matrix(x, &self.signature, subset)?;
            worst = worst.max(trace_norm(&(reduced - target.matrix())));
        }
        Ok(worst)
    }
}

/// Isometry between `D x D` Hermitian matrices (Hilbert-Schmidt) and `R^{D²}`:
/// diagonal entries first, then `√2 Re`, `√2 Im` of each upper entry, row by row.
#[derive(Debug, Clone, Copy)]
pub struct HermitianCoords {
    dim: usize,
}

impl HermitianCoords {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    pub fn to_coords(&self, h: &CMatrix) -> DVector<f64> {
        let d = self.dim;
        let mut x = DVector::zeros(d * d);
        for i in 0..d {
            x[i] = h[(i, i)].re;
        }
        let mut at = d;
        for r in 0..d {
            for c in r + 1..d {
                // average the two triangles so slightly non-Hermitian input maps to its Hermitian part
                let z = (h[(r, c)] + h[(c, r)].conj()) * 0.5;
                x[at] = std::f64::consts::SQRT_2 * z.re;
                x[at + 1] = std::f64::consts::SQRT_2 * z.im;
                at += 2;
            }
        }
        x
    }

    pub fn from_coords(&self, x: &DVector<f64>) -> CMatrix {
        let d = self.dim;
        let mut h = CMatrix::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = Complex64::new(x[i], 0.0);
        }
        let mut at = d;
        for r in 0..d {
            for c in r + 1..d {
                let z = Complex64::new(x[at], x[at + 1]) * std::f64::consts::FRAC_1_SQRT_2;
                h[(r, c)] = z;
                h[(c, r)] = z.conj();
                at += 2;
            }
        }
        h
    }
}

/// Solution set of a real linear system `A v = b`, via an SVD of `A`.
#[derive(Debug, Clone)]
pub(crate) struct AffineSet {
    matrix: DMatrix<f64>,
    /// Orthonormal basis of the row space of `A`, one column each.
    row_space: DMatrix<f64>,
    kernel: DMatrix<f64>,
    /// `(σ, u)` of the retained singular triplets; `row_space` holds the matching `v`.
    left: Vec<(f64, DVector<f64>)>,
}

impl AffineSet {
    pub(crate) fn new(matrix: DMatrix<f64>) -> Self {
        let (rows, cols) = matrix.shape();
        // nalgebra's thin SVD of a wide matrix only returns `rows` right vectors
        let padded = if rows < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(&matrix);
            p
        } else {
            matrix.clone()
        };
        let svd = padded.svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        let threshold = RECONSTRUCTION_TOL * svd.singular_values.max().max(1.0);
        let (mut kept, mut dropped) = (Vec::new(), Vec::new());
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > threshold {
                kept.push(i);
            } else {
                dropped.push(i);
            }
        }
        let columns_of = |idx: &[usize]| DMatrix::from_fn(cols, idx.len(), |r, c| v_t[(idx[c], r)]);
        let left = kept
            .iter()
            .map(|&i| (svd.singular_values[i], u.column(i).rows(0, rows).into_owned()))
            .collect();
        Self {
            row_space: columns_of(&kept),
            kernel: columns_of(&dropped),
            left,
            matrix,
        }
    }

    /// Minimum-norm least-squares solution of `A v = b` and its residual `|A v - b|`.
    pub(crate) fn anchor(&self, b: &DVector<f64>) -> (DVector<f64>, f64) {
        let mut anchor = DVector::zeros(self.matrix.ncols());
        for ((sigma, u), v) in self.left.iter().zip(self.row_space.column_iter()) {
            anchor.axpy(u.dot(b) / sigma, &v, 1.0);
        }
        let residual = (&self.matrix * &anchor - b).norm();
        (anchor, residual)
    }

    /// Orthogonal projection onto `{v : A v = A anchor}`.
    pub(crate) fn project(&self, anchor: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let q = &self.row_space;
        anchor + v - q * (q.transpose() * v)
    }

    pub(crate) fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Real-linear map `X ↦ (Tr X, Tr_{S̄} X for each S)` on Hermitian coordinates.
#[derive(Debug, Clone)]
struct ConstraintMap {
    signature: PartySignature,
    subsets: Vec<Vec<usize>>,
    set: AffineSet,
}

impl ConstraintMap {
    fn new(signature: &PartySignature, subsets: &[Vec<usize>]) -> Result<Self, FeasibilityError> {
        let subsets = subsets
            .iter()
            .map(|s| signature.normalize_subset(s))
            .collect::<Result<Vec<_>, _>>()?;
        let coords = HermitianCoords::new(signature.total_dim());
        let sub_coords: Vec<HermitianCoords> = subsets
            .iter()
            .map(|s| HermitianCoords::new(s.iter().map(|&p| signature.dims()[p]).product()))
            .collect();
        let rows = 1 + sub_coords.iter().map(HermitianCoords::len).sum::<usize>();
        let cols = coords.len();
        let mut matrix = DMatrix::zeros(rows, cols);
        for q in 0..cols {
            let mut e = DVector::zeros(cols);
            e[q] = 1.0;
            let x = coords.from_coords(&e);
            matrix[(0, q)] = x.trace().re;
            let mut at = 1;
            for (subset, sc) in subsets.iter().zip(&sub_coords) {
                let reduced = partial_trace_matrix(&x, signature, subset)?;
                let y = sc.to_coords(&reduced);
                matrix.view_mut((at, q), (sc.len(), 1)).copy_from(&y);
                at += sc.len();
            }
        }
        Ok(Self {
            signature: signature.clone(),
            subsets,
            set: AffineSet::new(matrix),
        })
    }

    fn coords(&self) -> HermitianCoords {
        HermitianCoords::new(self.signature.total_dim())
    }

    fn kernel_matrices(&self) -> Vec<CMatrix> {
        let coords = self.coords();
        self.set
            .kernel
            .column_iter()
            .map(|c| coords.from_coords(&c.into_owned()))
            .collect()
    }
}

/// Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian `Δ` with
/// `Tr_{S̄} Δ = 0` for every constrained subset `S`.
pub fn constraint_nullspace(
    signature: &PartySignature,
    subsets: &[Vec<usize>],
) -> Result<Vec<CMatrix>, FeasibilityError> {
    Ok(ConstraintMap::new(signature, subsets)?.kernel_matrices())
}

/// Orthonormal basis (columns) of `∩_S supp(T_S) ⊗ H_{S̄}`.
///
/// Any PSD `Y` with `Tr_{S̄} Y = T_S` has its support inside `supp(T_S) ⊗ H_{S̄}`, so
/// every feasible state lives on this subspace.
pub fn support_face(constraints: &MarginalConstraintSet) -> Result<CMatrix, FeasibilityError> {
    let sig = constraints.signature();
    let dim = sig.total_dim();
    let mut excluded = CMatrix::zeros(dim, dim);
    for (subset, target) in constraints.constraints() {
        let eig = hermitian_eigen_unchecked(target.matrix());
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let side = target.matrix().nrows();
        let mut outside = CMatrix::zeros(side, side);
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l <= RECONSTRUCTION_TOL * top.max(1.0) {
                let v = eig.eigenvectors.column(i);
                outside += v * v.adjoint();
            }
        }
        excluded += embed_local(&outside, sig, subset)?;
    }
    let eig = hermitian_eigen_unchecked(&excluded);
    let keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] < RANK_TOL).collect();
    Ok(CMatrix::from_fn(dim, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]))
}

/// Orthogonal projector onto `{Y Hermitian : Tr Y = 1, Tr_{S̄} Y = target_S}`.
#[derive(Debug, Clone)]
pub struct AffineProjector {
    map: ConstraintMap,
    /// Minimum-norm point of the affine set, in coordinates.
    anchor: DVector<f64>,
    targets: DVector<f64>,
    residual: f64,
    face: CMatrix,
}

impl AffineProjector {
    pub fn new(constraints: &MarginalConstraintSet) -> Result<Self, FeasibilityError> {
        let map = ConstraintMap::new(constraints.signature(), &constraints.subsets())?;
        let b = Self::target_vector(constraints, map.set.matrix.nrows());
        let (anchor, residual) = map.set.anchor(&b);
        if residual > 1e-9 * b.norm().max(1.0) {
            return Err(FeasibilityError::Inconsistent { residual });
        }
        Ok(Self {
            face: support_face(constraints)?,
            map,
            anchor,
            targets: b,
            residual,
        })
    }

    fn target_vector(constraints: &MarginalConstraintSet, rows: usize) -> DVector<f64> {
        let mut b = DVector::zeros(rows);
        b[0] = 1.0;
        let mut at = 1;
        for (_, target) in constraints.constraints() {
            let y = HermitianCoords::new(target.matrix().nrows()).to_coords(target.matrix());
            b.rows_mut(at, y.len()).copy_from(&y);
            at += y.len();
        }
        b
    }

    /// Stacked `(Tr X, marginals)` in coordinates, and the values they must take.
    pub(crate) fn constraint_system(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        (self.map.set.matrix(), &self.targets)
    }

    pub fn signature(&self) -> &PartySignature {
        &self.map.signature
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.map.subsets
    }

    /// Least-squares residual of the constraint system.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// See [`support_face`].
    pub fn face(&self) -> &CMatrix {
        &self.face
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let coords = self.map.coords();
        coords.from_coords(&self.map.set.project(&self.anchor, &coords.to_coords(x)))
    }

    /// HS-orthonormal kernel directions of the constraint map.
    pub fn kernel(&self) -> Vec<CMatrix> {
        self.map.kernel_matrices()
    }

    pub fn kernel_dim(&self) -> usize {
        self.map.set.kernel.ncols()
    }

    /// Random unit-norm kernel direction; `None` when the affine set is a single point.
    pub(crate) fn kernel_direction(&self, rng: &mut crate::tensor::SeededRng) -> Option<CMatrix> {
        let k = &self.map.set.kernel;
        if k.ncols() == 0 {
            return None;
        }
        let w = DVector::from_fn(k.ncols(), |_, _| rng.gaussian());
        let v = k * w;
        let v = v.unscale(v.norm());
        Some(self.map.coords().from_coords(&v))
    }
}

/// Projection of `x` onto the Hermitian unit-trace matrices matching every marginal.
pub fn project_affine(x: &CMatrix, constraints: &MarginalConstraintSet) -> Result<CMatrix, FeasibilityError> {
    let dim = constraints.signature().total_dim();
    if x.nrows() != dim || x.ncols() != dim {
        return Err(FeasibilityError::SideMismatch {
            expected: dim,
            found: x.nrows(),
        });
    }
    Ok(AffineProjector::new(constraints)?.project(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{hs_inner, random_hermitian};
    use crate::tensor::{AmplitudeTensor, SeededRng};

    fn pairs() -> Vec<Vec<usize>> {
        vec![vec![0, 1], vec![0, 2], vec![1, 2]]
    }

    #[test]
    fn coords_are_an_isometry() {
        let mut rng = SeededRng::new(2);
        let c = HermitianCoords::new(5);
        let a = random_hermitian(5, &mut rng);
        let b = random_hermitian(5, &mut rng);
        assert!((c.from_coords(&c.to_coords(&a)) - &a).norm() < 1e-14);
        assert!((c.to_coords(&a).dot(&c.to_coords(&b)) - hs_inner(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn kernel_dimensions() {
        let q3 = PartySignature::uniform(3, 2).unwrap();
        assert_eq!(constraint_nullspace(&q3, &pairs()).unwrap().len(), 27);
        assert_eq!(constraint_nullspace(&q3, &[vec![0, 1, 2]]).unwrap().len(), 0);
        let q2 = PartySignature::uniform(2, 2).unwrap();
        assert_eq!(constraint_nullspace(&q2, &[vec![0], vec![1]]).unwrap().len(), 9);
    }

    #[test]
    fn kernel_elements_vanish_under_constraints() {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let basis = constraint_nullspace(&sig, &pairs()).unwrap();
        for (i, a) in basis.iter().enumerate() {
            assert!((a - a.adjoint()).norm() < 1e-14);
            assert!(a.trace().norm() < 1e-12);
            for s in pairs() {
                assert!(partial_trace_matrix(a, &sig, &s).unwrap().norm() < 1e-12);
            }
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((hs_inner(a, b) - want).abs() < 1e-12);
            }
        }
    }

    fn random_constraints(seed: u64) -> (DensityMatrix, MarginalConstraintSet) {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let rho = AmplitudeTensor::haar_random(&sig, &mut SeededRng::new(seed)).to_density();
        let set = MarginalConstraintSet::from_state(&rho, &pairs()).unwrap();
        (rho, set)
    }

    #[test]
    fn projection_fixes_members_and_is_idempotent() {
        let (rho, set) = random_constraints(4);
        let proj = AffineProjector::new(&set).unwrap();
        assert!((proj.project(rho.matrix()) - rho.matrix()).norm() < 1e-12);
        let x = random_hermitian(8, &mut SeededRng::new(5));
        let once = proj.project(&x);
        assert!((proj.project(&once) - &once).norm() < 1e-12);
        assert!(set.marginal_residual(&once).unwrap() < 1e-12);
    }

    #[test]
    fn projection_step_is_orthogonal_to_kernel() {
        let (_, set) = random_constraints(6);
        let proj = AffineProjector::new(&set).unwrap();
        let x = random_hermitian(8, &mut SeededRng::new(7));
        let step = proj.project(&x) - &x;
        for k in proj.kernel() {
            assert!(hs_inner(&step, &k).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_part_is_self_adjoint() {
        let (_, set) = random_constraints(8);
        let proj = AffineProjector::new(&set).unwrap();
        let zero = proj.project(&CMatrix::zeros(8, 8));
        let mut rng = SeededRng::new(9);
        for _ in 0..5 {
            let x = random_hermitian(8, &mut rng);
            let y = random_hermitian(8, &mut rng);
            let lx = proj.project(&x) - &zero;
            let ly = proj.project(&y) - &zero;
            assert!((hs_inner(&lx, &y) - hs_inner(&x, &ly)).abs() < 1e-10);
        }
    }

    #[test]
    fn inconsistent_targets_are_reported() {
        let sig = PartySignature::uniform(2, 2).unwrap();
        let one = PartySignature::uniform(1, 2).unwrap();
        let zero_state = AmplitudeTensor::basis(one.clone(), &[0]).unwrap().to_density();
        let one_state = AmplitudeTensor::basis(one, &[1]).unwrap().to_density();
        let pair = zero_state.tensor(&zero_state);
        // AB says party 0 is |0>, A says it is |1>
        let set = MarginalConstraintSet::new(sig, vec![(vec![0, 1], pair), (vec![0], one_state)]).unwrap();
        assert!(matches!(
            AffineProjector::new(&set),
            Err(FeasibilityError::Inconsistent { .. })
        ));
    }

    #[test]
    fn support_face_dimensions() {
        let (rho, set) = random_constraints(10);
        let face = support_face(&set).unwrap();
        assert!(face.ncols() <= 2);
        let overlap = (face.adjoint() * rho.matrix() * &face).trace().re;
        assert!((overlap - 1.0).abs() < 1e-10);

        let sig = PartySignature::uniform(3, 2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let ghz = AmplitudeTensor::ghz(sig, one, one).unwrap().to_density();
        let set = MarginalConstraintSet::from_state(&ghz, &pairs()).unwrap();
        assert_eq!(support_face(&set).unwrap().ncols(), 2);
    }

    #[test]
    fn target_signature_is_checked() {
        let sig = PartySignature::new(vec![2, 3]).unwrap();
        let wrong = DensityMatrix::maximally_mixed(PartySignature::uniform(1, 2).unwrap());
        assert!(matches!(
            MarginalConstraintSet::new(sig, vec![(vec![1], wrong)]),
            Err(FeasibilityError::TargetMismatch { .. })
        ));
    }
}
