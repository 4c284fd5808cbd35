//! Classical analogue: the marginals of `n-1` of `n` random variables never pin down
//! the joint distribution.
//!
//! `Δ = v ⊗ v ⊗ … ⊗ v` with `v = (1, -1, 0, …, 0)` sums to zero along every axis, so
//! `p + εΔ` has the same `(n-1)`-variable marginals as `p` for any admissible `ε`.

use serde::Serialize;
use thiserror::Error;

use crate::tensor::{PartySignature, SeededRng, TensorError};

/// Total-mass tolerance of a [`JointDistribution`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("expected {expected} probabilities, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("negative or non-finite probability {value} at index {index}")]
    InvalidEntry { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("epsilon must be positive (got {0}); the pair would coincide")]
    NonPositiveEpsilon(f64),
    #[error("epsilon {epsilon} leaves the simplex; largest admissible value is {max_admissible}")]
    EpsilonTooLarge { epsilon: f64, max_admissible: f64 },
    #[error("at least one variable is required")]
    NoVariables,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    /// Number of values each variable takes.
    arities: PartySignature,
    /// Row-major, first variable slowest.
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(arities: PartySignature, probabilities: Vec<f64>) -> Result<Self, ClassicalError> {
        if probabilities.len() != arities.total_dim() {
            return Err(ClassicalError::LengthMismatch {
                expected: arities.total_dim(),
                found: probabilities.len(),
            });
        }
        if let Some((index, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(ClassicalError::InvalidEntry { index, value });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ClassicalError::NotNormalized(total));
        }
        Ok(Self { arities, probabilities })
    }

    pub fn uniform(arities: PartySignature) -> Self {
        let n = arities.total_dim();
        Self {
            arities,
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    /// Flat Dirichlet sample: normalized i.i.d. exponentials, strictly positive.
    pub fn dirichlet(arities: PartySignature, rng: &mut SeededRng) -> Self {
        let mut probabilities: Vec<f64> = (0..arities.total_dim()).map(|_| rng.exponential()).collect();
        let total: f64 = probabilities.iter().sum();
        probabilities.iter_mut().for_each(|p| *p /= total);
        Self { arities, probabilities }
    }

    /// Joint distribution of independent `self` and `other`.
    pub fn product(&self, other: &Self) -> Self {
        let mut dims = self.arities.dims().to_vec();
        dims.extend_from_slice(other.arities.dims());
        let probabilities = self
            .probabilities
            .iter()
            .flat_map(|p| other.probabilities.iter().map(move |q| p * q))
            .collect();
        Self {
            arities: PartySignature::new(dims).expect("concatenation of valid signatures"),
            probabilities,
        }
    }

    pub fn arities(&self) -> &PartySignature {
        &self.arities
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        l1(&self.probabilities, &other.probabilities)
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Sums `values` (laid out on `signature`) over every variable outside `keep`.
pub fn marginal_sum(values: &[f64], signature: &PartySignature, keep: &[usize]) -> Result<Vec<f64>, ClassicalError> {
    let keep = signature.normalize_subset(keep)?;
    let target = signature.restrict(&keep)?;
    let mut out = vec![0.0; target.total_dim()];
    for (flat, &v) in values.iter().enumerate() {
        let idx = signature.unflatten(flat);
        let kept: Vec<usize> = keep.iter().map(|&p| idx[p]).collect();
        out[target.flatten(&kept)] += v;
    }
    Ok(out)
}

/// Marginal distribution of the variables in `keep`.
pub fn classical_marginal(p: &JointDistribution, keep: &[usize]) -> Result<JointDistribution, ClassicalError> {
    let keep = p.arities.normalize_subset(keep)?;
    Ok(JointDistribution {
        probabilities: marginal_sum(&p.probabilities, &p.arities, &keep)?,
        arities: p.arities.restrict(&keep)?,
    })
}

/// `⊗ⁿ (1, -1, 0, …, 0)` on `n` variables of `d` values each.
pub fn alternating_deviation(n: usize, d: usize) -> Result<(PartySignature, Vec<f64>), ClassicalError> {
    if n == 0 {
        return Err(ClassicalError::NoVariables);
    }
    let signature = PartySignature::uniform(n, d)?;
    let values = (0..signature.total_dim())
        .map(|flat| {
            signature.unflatten(flat).iter().fold(1.0, |acc, &x| match x {
                0 => acc,
                1 => -acc,
                _ => 0.0,
            })
        })
        .collect();
    Ok((signature, values))
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexamplePair {
    pub p: JointDistribution,
    pub q: JointDistribution,
    pub epsilon: f64,
    /// Largest `ε` keeping `p + εΔ` non-negative.
    pub max_admissible_epsilon: f64,
    /// Max-norm of `marginal(p) - marginal(q)` over every `(n-1)`-variable subset.
    pub max_marginal_difference: f64,
    pub l1_distance: f64,
    /// `‖Δ‖₁`.
    pub deviation_l1: f64,
}

/// `p` from a flat Dirichlet, `q = p + εΔ` with `Δ` from [`alternating_deviation`].
pub fn counterexample_pair(
    n: usize,
    d: usize,
    epsilon: f64,
    rng: &mut SeededRng,
) -> Result<CounterexamplePair, ClassicalError> {
    let arities = PartySignature::uniform(n, d)?;
    counterexample_from(JointDistribution::dirichlet(arities, rng), epsilon)
}

/// As [`counterexample_pair`] with a given `p` on uniform arities.
pub fn counterexample_from(p: JointDistribution, epsilon: f64) -> Result<CounterexamplePair, ClassicalError> {
    let n = p.arities.num_parties();
    let d = p
        .arities
        .uniform_dim()
        .ok_or_else(|| TensorError::MixedDimensions(p.arities.dims().to_vec()))?;
    let (_, delta) = alternating_deviation(n, d)?;
    let max_admissible_epsilon = p
        .probabilities
        .iter()
        .zip(&delta)
        .filter(|(_, &dv)| dv < 0.0)
        .map(|(pv, dv)| pv / -dv)
        .fold(f64::INFINITY, f64::min);
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(ClassicalError::NonPositiveEpsilon(epsilon));
    }
    if epsilon > max_admissible_epsilon {
        return Err(ClassicalError::EpsilonTooLarge {
            epsilon,
            max_admissible: max_admissible_epsilon,
        });
    }
    // at epsilon == max some entries land on -0.0 or a rounding hair below
    let q_values = p
        .probabilities
        .iter()
        .zip(&delta)
        .map(|(pv, dv)| (pv + epsilon * dv).max(0.0))
        .collect();
    let q = JointDistribution::new(p.arities.clone(), q_values)?;

    let mut max_marginal_difference: f64 = 0.0;
    for skip in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
        if keep.is_empty() {
            continue;
        }
        let mp = marginal_sum(&p.probabilities, &p.arities, &keep)?;
        let mq = marginal_sum(&q.probabilities, &q.arities, &keep)?;
        let diff = mp.iter().zip(&mq).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_marginal_difference = max_marginal_difference.max(diff);
    }
    Ok(CounterexamplePair {
        l1_distance: p.l1_distance(&q),
        deviation_l1: delta.iter().map(|x| x.abs()).sum(),
        p,
        q,
        epsilon,
        max_admissible_epsilon,
        max_marginal_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(dims: &[usize]) -> PartySignature {
        PartySignature::new(dims.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(JointDistribution::new(sig(&[2]), vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            JointDistribution::new(sig(&[2]), vec![1.5, -0.5]),
            Err(ClassicalError::InvalidEntry { index: 1, .. })
        ));
        assert!(matches!(
            JointDistribution::new(sig(&[2]), vec![0.5, 0.6]),
            Err(ClassicalError::NotNormalized(_))
        ));
        assert!(JointDistribution::new(sig(&[2, 2]), vec![1.0]).is_err());
    }

    #[test]
    fn product_marginals_recover_factors() {
        let a = JointDistribution::new(sig(&[2]), vec![0.3, 0.7]).unwrap();
        let b = JointDistribution::new(sig(&[3]), vec![0.2, 0.5, 0.3]).unwrap();
        let ab = a.product(&b);
        let ma = classical_marginal(&ab, &[0]).unwrap();
        let mb = classical_marginal(&ab, &[1]).unwrap();
        assert!(ma.l1_distance(&a) < 1e-15);
        assert!(mb.l1_distance(&b) < 1e-15);
        let u = classical_marginal(&JointDistribution::uniform(sig(&[2, 3, 4])), &[2]).unwrap();
        assert!(u.probabilities().iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert!(classical_marginal(&ab, &[]).is_err());
    }

    #[test]
    fn deviations() {
        let (_, two) = alternating_deviation(2, 2).unwrap();
        assert_eq!(two, vec![1.0, -1.0, -1.0, 1.0]);
        let (s, three) = alternating_deviation(3, 2).unwrap();
        for (flat, v) in three.iter().enumerate() {
            let parity: usize = s.unflatten(flat).iter().sum();
            assert_eq!(*v, if parity.is_multiple_of(2) { 1.0 } else { -1.0 });
        }
        let (s, nine) = alternating_deviation(2, 3).unwrap();
        for keep in [[0], [1]] {
            assert!(marginal_sum(&nine, &s, &keep).unwrap().iter().all(|&x| x == 0.0));
        }
        assert!(nine.iter().any(|&x| x != 0.0));
    }

    #[test]
    fn uniform_counterexample() {
        let p = JointDistribution::uniform(sig(&[2, 2, 2]));
        let pair = counterexample_from(p, 0.05).unwrap();
        assert!(pair.max_marginal_difference < 1e-14);
        assert!(pair.l1_distance >= 0.05 * pair.deviation_l1 * (1.0 - 1e-12));
        assert_eq!(pair.max_admissible_epsilon, 0.125);
    }

    #[test]
    fn epsilon_rejections() {
        let p = JointDistribution::uniform(sig(&[2, 2, 2]));
        assert_eq!(
            counterexample_from(p.clone(), 0.0).unwrap_err(),
            ClassicalError::NonPositiveEpsilon(0.0)
        );
        assert_eq!(
            counterexample_from(p.clone(), 0.2).unwrap_err(),
            ClassicalError::EpsilonTooLarge {
                epsilon: 0.2,
                max_admissible: 0.125
            }
        );
        // zero where Δ is negative: nothing admissible
        let mut values = vec![1.0 / 7.0; 8];
        values[1] = 0.0;
        let edge = JointDistribution::new(sig(&[2, 2, 2]), values).unwrap();
        assert!(matches!(
            counterexample_from(edge, 1e-6),
            Err(ClassicalError::EpsilonTooLarge { max_admissible, .. }) if max_admissible == 0.0
        ));
    }

    #[test]
    fn seeded_pairs_are_reproducible() {
        let a = counterexample_pair(3, 2, 0.01, &mut SeededRng::new(3)).unwrap();
        let b = counterexample_pair(3, 2, 0.01, &mut SeededRng::new(3)).unwrap();
        assert_eq!(a.p, b.p);
        assert!(a.p.probabilities().iter().all(|&x| x > 0.0));
    }
}
