//! Two different joint distributions of three bits with identical two-bit marginals.

use qmarginals::classical::{classical_marginal, counterexample_from, JointDistribution};
use qmarginals::tensor::PartySignature;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = JointDistribution::uniform(PartySignature::uniform(3, 2)?);
    let pair = counterexample_from(p, 0.05)?;
    println!("p = {:?}", pair.p.probabilities());
    println!("q = {:?}", pair.q.probabilities());
    for keep in [[0, 1], [0, 2], [1, 2]] {
        let a = classical_marginal(&pair.p, &keep)?;
        let b = classical_marginal(&pair.q, &keep)?;
        println!("marginal {keep:?}: {:?} vs {:?}", a.probabilities(), b.probabilities());
    }
    println!(
        "largest marginal difference {:.1e}, L1 distance {:.3}, largest admissible epsilon {:.3}",
        pair.max_marginal_difference, pair.l1_distance, pair.max_admissible_epsilon
    );
    Ok(())
}
