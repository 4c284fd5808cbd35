use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dykstra::{dykstra_with, polish_on_face, DykstraResult};
use super::{AffineProjector, FeasibilityError, MarginalConstraintSet, ProjectionConfig};
use crate::tensor::linalg::{hermitian_eigen_unchecked, trace_distance};
use crate::tensor::{AmplitudeTensor, CMatrix, DensityMatrix, PartySignature, SeededRng, RECONSTRUCTION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleVerdict {
    #[serde(rename = "UNIQUE")]
    Unique,
    #[serde(rename = "NON_UNIQUE")]
    NonUnique,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

/// Outcome of one Dykstra run started from a perturbed copy of the target.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub restart: usize,
    pub converged: bool,
    pub iterations: usize,
    pub distance_to_target: f64,
    pub affine_residual: f64,
    pub psd_residual: f64,
    /// The reported state came from [`polish_on_face`] rather than the raw iterate.
    pub polished: bool,
}

#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub verdict: OracleVerdict,
    /// The target state first, then any distinct marginal-consistent states found.
    pub witnesses: Vec<DensityMatrix>,
    /// Largest marginal mismatch over the witnesses.
    pub max_marginal_residual: f64,
    /// Trace distances between witnesses `(0,1), (0,2), …, (1,2), …`.
    pub pairwise_distances: Vec<f64>,
    pub runs: Vec<RunSummary>,
    pub kernel_dim: usize,
    /// Dimension of the subspace every feasible state is supported on (see
    /// [`super::support_face`]); 1 certifies uniqueness exactly.
    pub face_dim: usize,
    /// Witness built in closed form (a party no constraint covers).
    pub analytic: bool,
}

impl FeasibilityVerdict {
    fn unique(rho: DensityMatrix, runs: Vec<RunSummary>, kernel_dim: usize, face_dim: usize) -> Self {
        Self {
            verdict: OracleVerdict::Unique,
            witnesses: vec![rho],
            max_marginal_residual: 0.0,
            pairwise_distances: Vec::new(),
            runs,
            kernel_dim,
            face_dim,
            analytic: false,
        }
    }
}

/// Decides whether the marginals of `pure_state` on `subsets` pin it down among all
/// density matrices.
///
/// Runs Dykstra from `restarts` starting points `ρ + scale · Δ` with `Δ` a random unit
/// kernel direction of the marginal map. Any run that lands on a marginal-consistent
/// state farther than `distinctness_tol` from `ρ` proves non-uniqueness; the witness is
/// then pushed further along the same direction to separate it clearly.
///
/// With `face_certificate` set, a one-dimensional support face short-circuits to UNIQUE
/// with no runs: every feasible state is then supported on the span of the target.
pub fn uniqueness_probe(
    pure_state: &AmplitudeTensor,
    subsets: &[Vec<usize>],
    config: &ProjectionConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    config.validate()?;
    let signature = pure_state.signature();
    let subsets = subsets
        .iter()
        .map(|s| signature.normalize_subset(s))
        .collect::<Result<Vec<_>, _>>()?;
    let rho = pure_state.to_density();

    if let Some(party) = (0..signature.num_parties()).find(|p| !subsets.iter().any(|s| s.contains(p))) {
        return uncovered_party_witness(pure_state, party, &subsets, config);
    }

    let constraints = MarginalConstraintSet::from_state(&rho, &subsets)?;
    let projector = AffineProjector::new(&constraints)?;
    let kernel_dim = projector.kernel_dim();
    let face_dim = projector.face().ncols();
    if kernel_dim == 0 || (config.face_certificate && face_dim == 1) {
        return Ok(FeasibilityVerdict::unique(rho, Vec::new(), kernel_dim, face_dim));
    }

    let probe = Probe {
        rho: &rho,
        projector: &projector,
        constraints: &constraints,
        config,
    };
    let outcomes: Vec<(RunSummary, Option<DensityMatrix>)> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = SeededRng::stream(config.seed, restart as u64);
            let direction = projector.kernel_direction(&mut rng).expect("kernel is non-trivial");
            probe.run(restart, &(rho.matrix() + direction.scale(config.perturbation_scale)))
        })
        .collect::<Result<_, FeasibilityError>>()?;

    let mut runs: Vec<RunSummary> = outcomes.iter().map(|(s, _)| s.clone()).collect();
    let best = outcomes
        .into_iter()
        .filter_map(|(s, w)| w.map(|w| (s.distance_to_target, w)))
        .max_by(|a, b| a.0.total_cmp(&b.0));

    if let Some((mut distance, mut witness)) = best {
        let direction = witness.matrix() - rho.matrix();
        for (i, stretch) in [2.0, 4.0, 8.0, 16.0].into_iter().enumerate() {
            let (summary, found) = probe.run(config.restarts + i, &(rho.matrix() + direction.scale(stretch)))?;
            if let Some(found) = found {
                if summary.distance_to_target > distance {
                    distance = summary.distance_to_target;
                    witness = found;
                }
            }
            runs.push(summary);
        }
        return Ok(non_unique(
            rho,
            vec![witness],
            &constraints,
            runs,
            (kernel_dim, face_dim),
            false,
        ));
    }

    let all_home = runs
        .iter()
        .all(|s| (s.converged || s.polished) && s.distance_to_target <= config.distinctness_tol);
    if all_home {
        Ok(FeasibilityVerdict::unique(rho, runs, kernel_dim, face_dim))
    } else {
        Ok(FeasibilityVerdict {
            verdict: OracleVerdict::Inconclusive,
            witnesses: vec![rho],
            max_marginal_residual: runs.iter().map(|s| s.affine_residual).fold(0.0, f64::max),
            pairwise_distances: Vec::new(),
            runs,
            kernel_dim,
            face_dim,
            analytic: false,
        })
    }
}

struct Probe<'a> {
    rho: &'a DensityMatrix,
    projector: &'a AffineProjector,
    constraints: &'a MarginalConstraintSet,
    config: &'a ProjectionConfig,
}

impl Probe<'_> {
    /// One Dykstra run from `start` (projected onto the affine set first), returning
    /// a witness when it ends on a valid state distinct from the target.
    fn run(&self, restart: usize, start: &CMatrix) -> Result<(RunSummary, Option<DensityMatrix>), FeasibilityError> {
        let start = self.projector.project(start);
        let out = dykstra_with(&start, self.projector, self.constraints, self.config)?;
        let mut summary = self.summarize(restart, &out);
        if out.converged && summary.distance_to_target <= self.config.distinctness_tol {
            return Ok((summary, None));
        }
        if self.is_witness(&summary) {
            return Ok((summary, Some(out.fixed_point)));
        }
        let polished = polish_on_face(out.fixed_point.matrix(), self.projector, self.constraints, self.config)?;
        let Some(polished) = polished else {
            return Ok((summary, None));
        };
        summary.polished = true;
        summary.distance_to_target = trace_distance(&polished, self.rho.matrix());
        summary.affine_residual = self.constraints.marginal_residual(&polished)?;
        summary.psd_residual = (-hermitian_eigen_unchecked(&polished).eigenvalues[0]).max(0.0);
        let witness = self
            .is_witness(&summary)
            .then(|| DensityMatrix::from_parts_unchecked(self.constraints.signature().clone(), polished));
        Ok((summary, witness))
    }

    fn summarize(&self, restart: usize, out: &DykstraResult) -> RunSummary {
        RunSummary {
            restart,
            converged: out.converged,
            iterations: out.iterations,
            distance_to_target: trace_distance(out.fixed_point.matrix(), self.rho.matrix()),
            affine_residual: out.affine_residual,
            psd_residual: out.psd_residual,
            polished: false,
        }
    }

    /// Valid, marginal-consistent and distinct from the target. A polished state is
    /// exact on its face, so convergence of the raw run is not required for it.
    fn is_witness(&self, s: &RunSummary) -> bool {
        (s.converged || s.polished)
            && s.affine_residual < self.config.convergence_tol
            && s.psd_residual < RECONSTRUCTION_TOL
            && s.distance_to_target > self.config.distinctness_tol
    }
}

fn non_unique(
    rho: DensityMatrix,
    found: Vec<DensityMatrix>,
    constraints: &MarginalConstraintSet,
    runs: Vec<RunSummary>,
    (kernel_dim, face_dim): (usize, usize),
    analytic: bool,
) -> FeasibilityVerdict {
    let mut witnesses = vec![rho];
    witnesses.extend(found);
    let max_marginal_residual = witnesses
        .iter()
        .map(|w| constraints.marginal_residual(w.matrix()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let mut pairwise_distances = Vec::new();
    for i in 0..witnesses.len() {
        for j in i + 1..witnesses.len() {
            pairwise_distances.push(trace_distance(witnesses[i].matrix(), witnesses[j].matrix()));
        }
    }
    FeasibilityVerdict {
        verdict: OracleVerdict::NonUnique,
        witnesses,
        max_marginal_residual,
        pairwise_distances,
        runs,
        kernel_dim,
        face_dim,
        analytic,
    }
}

/// Shift or clock unitary on an unconstrained party; at least one of them moves any
/// pure state, since no vector is a joint eigenvector of both.
fn uncovered_party_witness(
    pure_state: &AmplitudeTensor,
    party: usize,
    subsets: &[Vec<usize>],
    config: &ProjectionConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let rho = pure_state.to_density();
    let constraints = MarginalConstraintSet::from_state(&rho, subsets)?;
    let d = pure_state.signature().dims()[party];
    let shift = CMatrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let clock = CMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, omega * r as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut best: Option<(f64, DensityMatrix)> = None;
    for u in [shift, clock] {
        let moved = pure_state.apply_local(party, &u)?.to_density();
        let dist = trace_distance(moved.matrix(), rho.matrix());
        if best.as_ref().is_none_or(|(b, _)| dist > *b) {
            best = Some((dist, moved));
        }
    }
    let (dist, moved) = best.expect("two candidates");
    let projector = AffineProjector::new(&constraints)?;
    let (kernel_dim, face_dim) = (projector.kernel_dim(), projector.face().ncols());
    if dist <= config.distinctness_tol {
        // unreachable for exact arithmetic; keep the verdict honest if rounding bites
        return Ok(FeasibilityVerdict {
            verdict: OracleVerdict::Inconclusive,
            witnesses: vec![rho],
            max_marginal_residual: 0.0,
            pairwise_distances: Vec::new(),
            runs: Vec::new(),
            kernel_dim,
            face_dim,
            analytic: true,
        });
    }
    Ok(non_unique(
        rho,
        vec![moved],
        &constraints,
        Vec::new(),
        (kernel_dim, face_dim),
        true,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub verdict: OracleVerdict,
    pub kernel_dim: usize,
    pub face_dim: usize,
    pub max_distance_to_target: f64,
    pub max_iterations: usize,
    pub witness_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyStats {
    pub signature: Vec<usize>,
    pub subsets: Vec<Vec<usize>>,
    pub trials: usize,
    pub unique: usize,
    pub non_unique: usize,
    pub inconclusive: usize,
    pub fraction_unique: f64,
    pub fraction_non_unique: f64,
    pub fraction_inconclusive: f64,
    pub records: Vec<TrialRecord>,
    /// Wall-clock milliseconds per trial; not reproducible.
    #[serde(skip)]
    pub runtimes_ms: Vec<f64>,
}

/// Runs [`uniqueness_probe`] on `trials` Haar-random states. Trial `t` draws its state
/// from stream `t` of `config.seed` and its restarts from a seed derived from `t`, so
/// results do not depend on scheduling.
pub fn genericity_survey(
    signature: &PartySignature,
    subsets: &[Vec<usize>],
    trials: usize,
    config: &ProjectionConfig,
) -> Result<SurveyStats, FeasibilityError> {
    if trials == 0 {
        return Err(FeasibilityError::NoTrials);
    }
    config.validate()?;
    let results: Vec<(TrialRecord, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let clock = Instant::now();
            let mut rng = SeededRng::stream(config.seed, t as u64);
            let state = AmplitudeTensor::haar_random(signature, &mut rng);
            let trial_config = ProjectionConfig {
                seed: SeededRng::derive_seed(config.seed, t as u64),
                ..*config
            };
            let v = uniqueness_probe(&state, subsets, &trial_config)?;
            let record = TrialRecord {
                trial: t,
                verdict: v.verdict,
                kernel_dim: v.kernel_dim,
                face_dim: v.face_dim,
                max_distance_to_target: v.runs.iter().map(|r| r.distance_to_target).fold(0.0, f64::max),
                max_iterations: v.runs.iter().map(|r| r.iterations).max().unwrap_or(0),
                witness_distance: v.pairwise_distances.first().copied(),
            };
            Ok((record, clock.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_, FeasibilityError>>()?;
    let (records, runtimes_ms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let count = |v: OracleVerdict| records.iter().filter(|r| r.verdict == v).count();
    let (unique, non_unique, inconclusive) = (
        count(OracleVerdict::Unique),
        count(OracleVerdict::NonUnique),
        count(OracleVerdict::Inconclusive),
    );
    let frac = |c: usize| c as f64 / trials as f64;
    Ok(SurveyStats {
        signature: signature.dims().to_vec(),
        subsets: subsets.to_vec(),
        trials,
        unique,
        non_unique,
        inconclusive,
        fraction_unique: frac(unique),
        fraction_non_unique: frac(non_unique),
        fraction_inconclusive: frac(inconclusive),
        records,
        runtimes_ms,
    })
}
