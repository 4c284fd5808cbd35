//! Bloch (generalized Pauli) expansion of the GHZ state.

use num_complex::Complex64;
use qmarginals::tensor::{AmplitudeTensor, BlochTable, PartySignature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let one = Complex64::new(1.0, 0.0);
    let ghz = AmplitudeTensor::ghz(PartySignature::uniform(3, 2)?, one, one)?;
    let table = BlochTable::decompose(&ghz.to_density())?;

    // label 0 is the identity, 1..=3 are X, Y, Z
    let names = ["I", "X", "Y", "Z"];
    for (labels, value) in table.nonzero(1e-12) {
        let word: String = labels.iter().map(|&l| names[l]).collect();
        println!("{word}  {value:+.6}");
    }
    let error = (table.reconstruct() - ghz.to_density().matrix()).norm();
    println!("reconstruction error {error:.2e}");
    Ok(())
}
