//! Search for a second state with the same pair marginals: none exists for a generic
//! three-qubit state, while the GHZ state shares its marginals with a classical mixture.

use num_complex::Complex64;
use qmarginals::feasibility::{uniqueness_probe, ProjectionConfig};
use qmarginals::tensor::{AmplitudeTensor, PartySignature, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signature = PartySignature::uniform(3, 2)?;
    let pairs = [vec![0, 1], vec![0, 2], vec![1, 2]];
    let config = ProjectionConfig::default();

    let one = Complex64::new(1.0, 0.0);
    let states = [
        ("haar", AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(5))),
        ("ghz", AmplitudeTensor::ghz(signature.clone(), one, one)?),
    ];
    for (name, state) in states {
        let v = uniqueness_probe(&state, &pairs, &config)?;
        println!(
            "{name}: {:?} (kernel dim {}, face dim {}, {} runs, marginal residual {:.1e})",
            v.verdict,
            v.kernel_dim,
            v.face_dim,
            v.runs.len(),
            v.max_marginal_residual
        );
        if let Some(witness) = v.witnesses.get(1) {
            let spectrum: Vec<String> = witness
                .eigenvalues()
                .iter()
                .filter(|l| l.abs() > 1e-12)
                .map(|l| format!("{l:.4}"))
                .collect();
            println!(
                "  witness at trace distance {:.4}, nonzero spectrum [{}]",
                v.pairwise_distances[0],
                spectrum.join(", ")
            );
        }
    }
    Ok(())
}
