//! Draw a Haar-random three-qubit state and look at its reduced states.

use qmarginals::tensor::{AmplitudeTensor, PartySignature, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signature = PartySignature::uniform(3, 2)?;
    let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(7));
    println!("norm^2 = {:.15}", state.norm_sqr());

    let rho = state.to_density();
    for keep in [vec![0, 1], vec![0, 2], vec![1, 2], vec![0]] {
        let marginal = rho.partial_trace(&keep)?;
        let purity = (marginal.matrix() * marginal.matrix()).trace().re;
        let spectrum: Vec<String> = marginal.eigenvalues().iter().map(|l| format!("{l:.6}")).collect();
        println!(
            "parties {keep:?}: trace {:.12}, purity {purity:.6}, spectrum [{}]",
            marginal.trace().re,
            spectrum.join(", ")
        );
    }
    Ok(())
}
