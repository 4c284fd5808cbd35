use num_complex::Complex64;

use super::linalg::{CMatrix, CVector};
use super::{DensityMatrix, PartySignature, SeededRng, TensorError, EXACT_TOL};

/// Normalized pure state of several parties: one complex amplitude per basis product,
/// stored flat in row-major order (first party slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTensor {
    signature: PartySignature,
    amplitudes: Vec<Complex64>,
}

impl AmplitudeTensor {
    pub fn new(signature: PartySignature, amplitudes: Vec<Complex64>) -> Result<Self, TensorError> {
        if amplitudes.len() != signature.total_dim() {
            return Err(TensorError::ShapeMismatch {
                expected: signature.total_dim(),
                found: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(TensorError::NotNormalized(norm_sqr));
        }
        Ok(Self { signature, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(signature: PartySignature, amplitudes: Vec<Complex64>) -> Result<Self, TensorError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(TensorError::NotNormalized(norm * norm));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Self::new(signature, amplitudes)
    }

    /// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
    pub fn haar_random(signature: &PartySignature, rng: &mut SeededRng) -> Self {
        let amplitudes = (0..signature.total_dim())
            .map(|_| Complex64::new(rng.gaussian(), rng.gaussian()))
            .collect();
        Self::normalized(signature.clone(), amplitudes).expect("Gaussian vector is nonzero")
    }

    /// Computational basis state `|idx>`.
    pub fn basis(signature: PartySignature, idx: &[usize]) -> Result<Self, TensorError> {
        if idx.len() != signature.num_parties() {
            return Err(TensorError::ShapeMismatch {
                expected: signature.num_parties(),
                found: idx.len(),
            });
        }
        if let Some(p) = idx.iter().zip(signature.dims()).position(|(&i, &d)| i >= d) {
            return Err(TensorError::PartyOutOfRange {
                index: idx[p],
                parties: signature.dims()[p],
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); signature.total_dim()];
        amplitudes[signature.flatten(idx)] = Complex64::new(1.0, 0.0);
        Self::new(signature, amplitudes)
    }

    /// `a|0...0> + b|1...1>` over `signature`, normalized.
    pub fn ghz(signature: PartySignature, a: Complex64, b: Complex64) -> Result<Self, TensorError> {
        let n = signature.num_parties();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); signature.total_dim()];
        amplitudes[0] = a;
        amplitudes[signature.flatten(&vec![1; n])] = b;
        Self::normalized(signature, amplitudes)
    }

    pub fn signature(&self) -> &PartySignature {
        &self.signature
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.amplitudes[self.signature.flatten(idx)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }

    /// `|xi><xi|`.
    pub fn to_density(&self) -> DensityMatrix {
        let v = self.to_vector();
        let matrix = &v * v.adjoint();
        DensityMatrix::from_parts_unchecked(self.signature.clone(), matrix)
    }

    /// Applies `unitary` to a single party.
    pub fn apply_local(&self, party: usize, unitary: &CMatrix) -> Result<Self, TensorError> {
        let dims = self.signature.dims();
        if party >= dims.len() {
            return Err(TensorError::PartyOutOfRange {
                index: party,
                parties: dims.len(),
            });
        }
        let d = dims[party];
        if unitary.shape() != (d, d) {
            return Err(TensorError::ShapeMismatch {
                expected: d * d,
                found: unitary.len(),
            });
        }
        let inner: usize = dims[party + 1..].iter().product();
        let outer: usize = dims[..party].iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for o in 0..outer {
            for i in 0..inner {
                for row in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for col in 0..d {
                        acc += unitary[(row, col)] * self.amplitudes[(o * d + col) * inner + i];
                    }
                    out[(o * d + row) * inner + i] = acc;
                }
            }
        }
        Self::normalized(self.signature.clone(), out)
    }

    /// Same amplitudes viewed with coarser parties; `groups` are consecutive party counts.
    pub fn regroup(&self, groups: &[usize]) -> Result<Self, TensorError> {
        let dims = self.signature.dims();
        let total: usize = groups.iter().sum();
        if total != dims.len() || groups.contains(&0) {
            return Err(TensorError::ShapeMismatch {
                expected: dims.len(),
                found: total,
            });
        }
        let mut merged = Vec::with_capacity(groups.len());
        let mut start = 0;
        for &g in groups {
            merged.push(dims[start..start + g].iter().product());
            start += g;
        }
        Ok(Self {
            signature: PartySignature::new(merged)?,
            amplitudes: self.amplitudes.clone(),
        })
    }
}
