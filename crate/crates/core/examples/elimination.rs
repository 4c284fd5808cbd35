//! Step-by-step elimination of the consistency system for a generic (4,2,2) state.

use qmarginals::tensor::{AmplitudeTensor, PartySignature, SeededRng};
use qmarginals::uniqueness::sequential_elimination_trace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signature = PartySignature::new(vec![4, 2, 2])?;
    let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(3));
    let trace = sequential_elimination_trace(&state)?;
    for step in &trace.steps {
        println!(
            "step {} block {:?}: rank {}/{} residual {:.2e} deviation {:.2e} solved {}",
            step.index,
            step.block,
            step.rank,
            step.required_rank,
            step.residual,
            step.max_deviation,
            step.solved.join(" ")
        );
    }
    println!("{:?}", trace.outcome);
    Ok(())
}
