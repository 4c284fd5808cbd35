use nalgebra::{DMatrix, DVector};

use super::constraints::AffineSet;
use super::{AffineProjector, FeasibilityError, HermitianCoords, MarginalConstraintSet, ProjectionConfig};
use crate::tensor::linalg::{hermitian_eigen_unchecked, hermitian_part, trace_norm};
use crate::tensor::{CMatrix, DensityMatrix};

/// Nearest PSD matrix in Hilbert-Schmidt norm: negative eigenvalues clamped to zero.
pub fn project_psd(x: &CMatrix) -> CMatrix {
    let mut eig = hermitian_eigen_unchecked(&hermitian_part(x));
    if eig.eigenvalues[0] >= 0.0 {
        return hermitian_part(x);
    }
    for l in eig.eigenvalues.iter_mut() {
        *l = l.max(0.0);
    }
    hermitian_part(&eig.reconstruct())
}

#[derive(Debug, Clone)]
pub struct DykstraResult {
    /// Last PSD iterate, rescaled to unit trace.
    pub fixed_point: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Trace norm of the last step.
    pub last_step: f64,
    /// Marginal mismatch of `fixed_point` (see [`MarginalConstraintSet::marginal_residual`]).
    pub affine_residual: f64,
    /// Negativity of `fixed_point`: `max(0, -λ_min)`.
    pub psd_residual: f64,
}

/// Dykstra's alternating projections between the affine marginal set and the PSD cone.
///
/// Converges to the projection of `start` onto their intersection. Stops once the PSD
/// iterate moves by less than `convergence_tol` in trace norm and its marginals are
/// within `convergence_tol` of the targets, or after `max_iterations` (reported with
/// `converged = false`).
pub fn dykstra_solve(
    start: &CMatrix,
    constraints: &MarginalConstraintSet,
    config: &ProjectionConfig,
) -> Result<DykstraResult, FeasibilityError> {
    config.validate()?;
    let projector = AffineProjector::new(constraints)?;
    dykstra_with(start, &projector, constraints, config)
}

pub(crate) fn dykstra_with(
    start: &CMatrix,
    projector: &AffineProjector,
    constraints: &MarginalConstraintSet,
    config: &ProjectionConfig,
) -> Result<DykstraResult, FeasibilityError> {
    let dim = constraints.signature().total_dim();
    if start.shape() != (dim, dim) {
        return Err(FeasibilityError::SideMismatch {
            expected: dim,
            found: start.nrows(),
        });
    }
    let run = alternate(
        start,
        |y| projector.project(y),
        |x| constraints.marginal_residual(x),
        config.max_iterations,
        config.convergence_tol,
    )?;
    let min_eig = hermitian_eigen_unchecked(&run.x).eigenvalues[0];
    let affine_residual = constraints.marginal_residual(&run.x)?;
    Ok(DykstraResult {
        fixed_point: DensityMatrix::from_parts_unchecked(constraints.signature().clone(), run.x),
        iterations: run.iterations,
        converged: run.converged,
        last_step: run.last_step,
        affine_residual,
        psd_residual: (-min_eig).max(0.0),
    })
}

struct Alternation {
    /// Last PSD iterate, rescaled to unit trace.
    x: CMatrix,
    iterations: usize,
    converged: bool,
    last_step: f64,
}

fn unit_trace(x: &CMatrix) -> CMatrix {
    let tr = x.trace().re;
    if tr > 0.0 {
        x.unscale(tr)
    } else {
        x.clone()
    }
}

fn alternate(
    start: &CMatrix,
    affine: impl Fn(&CMatrix) -> CMatrix,
    residual: impl Fn(&CMatrix) -> Result<f64, FeasibilityError>,
    max_iterations: usize,
    tol: f64,
) -> Result<Alternation, FeasibilityError> {
    let dim = start.nrows();
    let mut x = hermitian_part(start);
    let mut p = CMatrix::zeros(dim, dim);
    let mut q = CMatrix::zeros(dim, dim);
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let xp = &x + &p;
        let y = affine(&xp);
        p = xp - &y;
        let yq = &y + &q;
        let next = project_psd(&yq);
        q = yq - &next;
        let diff = &next - &x;
        x = next;
        // Frobenius norm bounds the trace norm from below
        let frob = diff.norm();
        if frob >= tol {
            last_step = frob;
            continue;
        }
        last_step = trace_norm(&diff);
        if last_step < tol {
            let normalized = unit_trace(&x);
            if residual(&normalized)? < tol {
                return Ok(Alternation {
                    x: normalized,
                    iterations,
                    converged: true,
                    last_step,
                });
            }
        }
    }
    Ok(Alternation {
        x: unit_trace(&x),
        iterations,
        converged: false,
        last_step,
    })
}

/// Re-solves the projection on the support face of the constraints, starting from `x`.
///
/// Where the feasible set sits on a low-rank face tangent to the affine subspace,
/// Dykstra in the full space approaches it only sublinearly. On the face
/// `Y = V Z V^H` of [`super::support_face`] the same alternation runs on small `Z` and
/// typically converges linearly. Returns the lifted state when that run converges to
/// `tol`; `None` when the face is the whole space or the run does not converge.
pub fn polish_on_face(
    x: &CMatrix,
    projector: &AffineProjector,
    constraints: &MarginalConstraintSet,
    config: &ProjectionConfig,
) -> Result<Option<CMatrix>, FeasibilityError> {
    let v = projector.face();
    let (dim, rank) = v.shape();
    if rank == 0 || rank == dim || x.shape() != (dim, dim) {
        return Ok(None);
    }
    let (a, b) = projector.constraint_system();
    let full = HermitianCoords::new(dim);
    let face = HermitianCoords::new(rank);
    let lift = |z: &CMatrix| -> CMatrix { hermitian_part(&(v * z * v.adjoint())) };
    let mut a_face = DMatrix::zeros(a.nrows(), face.len());
    for col in 0..face.len() {
        let mut e = DVector::zeros(face.len());
        e[col] = 1.0;
        a_face.set_column(col, &(a * full.to_coords(&lift(&face.from_coords(&e)))));
    }
    let set = AffineSet::new(a_face);
    let (anchor, residual) = set.anchor(b);
    if residual > 1e-9 * b.norm().max(1.0) {
        return Ok(None);
    }
    let run = alternate(
        &(v.adjoint() * x * v),
        |z| face.from_coords(&set.project(&anchor, &face.to_coords(z))),
        |z| constraints.marginal_residual(&lift(z)),
        config.max_iterations,
        config.convergence_tol,
    )?;
    Ok(run.converged.then(|| lift(&run.x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{random_hermitian, trace_distance};
    use crate::tensor::{AmplitudeTensor, CVector, PartySignature, SeededRng};
    use num_complex::Complex64;

    fn pairs() -> Vec<Vec<usize>> {
        vec![vec![0, 1], vec![0, 2], vec![1, 2]]
    }

    #[test]
    fn psd_projection_basics() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-1.0)]));
        let want = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(0.0)]));
        assert!((project_psd(&d) - want).norm() < 1e-15);

        let rho =
            AmplitudeTensor::haar_random(&PartySignature::uniform(2, 2).unwrap(), &mut SeededRng::new(1)).to_density();
        assert!((project_psd(rho.matrix()) - rho.matrix()).norm() < 1e-12);

        let mut rng = SeededRng::new(2);
        for _ in 0..10 {
            let h = random_hermitian(6, &mut rng);
            let p = project_psd(&h);
            assert!(hermitian_eigen_unchecked(&p).eigenvalues[0] >= -1e-12);
        }
    }

    #[test]
    fn true_state_is_a_fixed_point() {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let rho = AmplitudeTensor::haar_random(&sig, &mut SeededRng::new(3)).to_density();
        let set = MarginalConstraintSet::from_state(&rho, &pairs()).unwrap();
        let out = dykstra_solve(rho.matrix(), &set, &ProjectionConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 2);
        assert!(trace_distance(out.fixed_point.matrix(), rho.matrix()) < 1e-9);
    }

    #[test]
    fn generic_three_qubit_state_is_recovered() {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let mut rng = SeededRng::new(4);
        let rho = AmplitudeTensor::haar_random(&sig, &mut rng).to_density();
        let set = MarginalConstraintSet::from_state(&rho, &pairs()).unwrap();
        let start = rho.matrix() + random_hermitian(8, &mut rng).scale(0.05);
        let out = dykstra_solve(&start, &set, &ProjectionConfig::default()).unwrap();
        assert!(out.converged, "{out:?}");
        assert!(out.psd_residual < 1e-10);
        assert!(out.affine_residual < 1e-9);
        assert!(trace_distance(out.fixed_point.matrix(), rho.matrix()) < 1e-4);
    }

    #[test]
    fn ghz_start_near_mixture_stays_away() {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let rho = AmplitudeTensor::ghz(sig, one, one).unwrap().to_density();
        let set = MarginalConstraintSet::from_state(&rho, &pairs()).unwrap();
        let mut mixture = CMatrix::zeros(8, 8);
        mixture[(0, 0)] = Complex64::new(0.5, 0.0);
        mixture[(7, 7)] = Complex64::new(0.5, 0.0);
        let start = rho.matrix().scale(0.1) + mixture.scale(0.9);
        let out = dykstra_solve(&start, &set, &ProjectionConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.affine_residual < 1e-9);
        assert!(trace_distance(out.fixed_point.matrix(), rho.matrix()) > 0.4);
    }

    #[test]
    fn face_polish_reaches_ghz_mixtures() {
        let sig = PartySignature::uniform(3, 2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let rho = AmplitudeTensor::ghz(sig, one, one).unwrap().to_density();
        let set = MarginalConstraintSet::from_state(&rho, &pairs()).unwrap();
        let projector = AffineProjector::new(&set).unwrap();
        let start = rho.matrix() + random_hermitian(8, &mut SeededRng::new(5)).scale(0.3);
        let config = ProjectionConfig::default();
        let y = polish_on_face(&start, &projector, &set, &config).unwrap().unwrap();
        assert!(set.marginal_residual(&y).unwrap() < 1e-9);
        assert!(hermitian_eigen_unchecked(&y).eigenvalues[0] > -1e-12);
    }
}
