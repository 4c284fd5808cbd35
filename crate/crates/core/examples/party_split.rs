//! Grouping 3m+1 parties as (d^(m+1), d^m, d^m) and running the linear test on 4 qubits.

use qmarginals::tensor::{AmplitudeTensor, PartySignature, SeededRng};
use qmarginals::uniqueness::{check_linear_uniqueness, party_split, DEFAULT_RANK_POLICY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in 1..=3 {
        let split = party_split(m, 2)?;
        println!(
            "m = {m}: {} parties, marginals on {} each, shape {}, fraction {:.4}",
            split.total_parties,
            split.marginal_party_count,
            split.shape,
            split.fraction()
        );
    }

    let split = party_split(1, 2)?;
    let state = AmplitudeTensor::haar_random(
        &PartySignature::uniform(split.total_parties, 2)?,
        &mut SeededRng::new(11),
    );
    let grouped = state.regroup(&split.groups())?;
    let verdict = check_linear_uniqueness(&grouped, DEFAULT_RANK_POLICY)?;
    let [ab, ac] = split.marginal_subsets();
    println!(
        "marginals {ab:?} and {ac:?} -> {:?} (null dim {})",
        verdict.verdict, verdict.null_dim
    );
    Ok(())
}
