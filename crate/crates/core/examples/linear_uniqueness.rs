//! Rank test of the consistency system on a Haar state and on a GHZ-type state, both
//! of shape (4, 2, 2).

use num_complex::Complex64;
use qmarginals::tensor::{AmplitudeTensor, PartySignature, SeededRng};
use qmarginals::uniqueness::{check_linear_uniqueness, DEFAULT_RANK_POLICY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signature = PartySignature::new(vec![4, 2, 2])?;
    let haar = AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(1));

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut amplitudes = vec![zero; signature.total_dim()];
    amplitudes[signature.flatten(&[0, 0, 0])] = one;
    amplitudes[signature.flatten(&[1, 1, 1])] = one;
    let ghz_like = AmplitudeTensor::normalized(signature.clone(), amplitudes)?;

    for (name, state) in [("haar", &haar), ("ghz-like", &ghz_like)] {
        let v = check_linear_uniqueness(state, DEFAULT_RANK_POLICY)?;
        let smallest: Vec<String> = v
            .singular_values
            .iter()
            .rev()
            .take(3)
            .map(|s| format!("{s:.3e}"))
            .collect();
        println!(
            "{name:>8}: {:?}, null dim {}, pattern residual {:.2e}, smallest singular values [{}]",
            v.verdict,
            v.null_dim,
            v.residual,
            smallest.join(", ")
        );
    }
    Ok(())
}
