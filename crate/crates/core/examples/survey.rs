//! Genericity statistics: the feasibility oracle on three qubits and the linear test on
//! four qubits.

use qmarginals::feasibility::{genericity_survey, ProjectionConfig};
use qmarginals::tensor::{PartySignature, TolPolicy};
use qmarginals::uniqueness::linear_survey;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ProjectionConfig {
        seed: 42,
        ..ProjectionConfig::default()
    };
    let pairs = [vec![0, 1], vec![0, 2], vec![1, 2]];
    let oracle = genericity_survey(&PartySignature::uniform(3, 2)?, &pairs, 10, &config)?;
    println!(
        "oracle, 3 qubits: {} unique / {} non-unique / {} inconclusive",
        oracle.unique, oracle.non_unique, oracle.inconclusive
    );

    let linear = linear_survey(&PartySignature::uniform(4, 2)?, 200, 42, TolPolicy::Relative(1e-8))?;
    println!(
        "linear, 4 qubits as {}: {}/{} unique",
        linear.shape, linear.unique_linear, linear.trials
    );
    Ok(())
}
