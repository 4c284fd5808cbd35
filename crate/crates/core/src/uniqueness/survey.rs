use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_linear_uniqueness, party_split, LinearVerdict, TripartiteShape, UniquenessError};
use crate::tensor::{AmplitudeTensor, PartySignature, SeededRng, TolPolicy};

/// Party counts of the `A`, `B`, `C` groups used by the linear test: `[1, 1, 1]` for
/// three parties, the `(m+1, m, m)` split for `3m + 1` parties of equal dimension.
pub fn tripartite_grouping(signature: &PartySignature) -> Result<[usize; 3], UniquenessError> {
    let n = signature.num_parties();
    if n == 3 {
        return Ok([1, 1, 1]);
    }
    match signature.uniform_dim() {
        Some(d) if n >= 4 && (n - 1).is_multiple_of(3) => Ok(party_split((n - 1) / 3, d)?.groups()),
        _ => Err(UniquenessError::NotTripartite(n)),
    }
}

/// Fine-grained party indices of the `AB` and `AC` marginals for a grouping.
pub fn grouped_marginal_subsets(groups: [usize; 3]) -> [Vec<usize>; 2] {
    let [a, b, c] = groups;
    let ab = (0..a + b).collect();
    let ac = (0..a).chain(a + b..a + b + c).collect();
    [ab, ac]
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearTrialRecord {
    pub trial: usize,
    pub verdict: LinearVerdict,
    pub null_dim: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearSurveyStats {
    pub signature: Vec<usize>,
    pub shape: TripartiteShape,
    pub trials: usize,
    pub unique_linear: usize,
    pub degenerate: usize,
    pub fraction_unique_linear: f64,
    pub records: Vec<LinearTrialRecord>,
    #[serde(skip)]
    pub runtimes_ms: Vec<f64>,
}

/// [`check_linear_uniqueness`] on `trials` Haar samples, trial `t` drawn from stream `t`
/// of `seed`, grouped by [`tripartite_grouping`].
pub fn linear_survey(
    signature: &PartySignature,
    trials: usize,
    seed: u64,
    policy: TolPolicy,
) -> Result<LinearSurveyStats, UniquenessError> {
    if trials == 0 {
        return Err(UniquenessError::NoTrials);
    }
    let groups = tripartite_grouping(signature)?;
    let results: Vec<(LinearTrialRecord, TripartiteShape, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let clock = Instant::now();
            let mut rng = SeededRng::stream(seed, t as u64);
            let state = AmplitudeTensor::haar_random(signature, &mut rng).regroup(&groups)?;
            let v = check_linear_uniqueness(&state, policy)?;
            let record = LinearTrialRecord {
                trial: t,
                verdict: v.verdict,
                null_dim: v.null_dim,
                residual: v.residual,
            };
            Ok((record, v.shape, clock.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_, UniquenessError>>()?;
    let shape = results[0].1;
    let mut records = Vec::with_capacity(trials);
    let mut runtimes_ms = Vec::with_capacity(trials);
    for (r, _, ms) in results {
        records.push(r);
        runtimes_ms.push(ms);
    }
    let unique_linear = records
        .iter()
        .filter(|r| r.verdict == LinearVerdict::UniqueLinear)
        .count();
    Ok(LinearSurveyStats {
        signature: signature.dims().to_vec(),
        shape,
        trials,
        unique_linear,
        degenerate: trials - unique_linear,
        fraction_unique_linear: unique_linear as f64 / trials as f64,
        records,
        runtimes_ms,
    })
}
