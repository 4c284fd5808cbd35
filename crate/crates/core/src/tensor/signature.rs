use serde::{Deserialize, Serialize};

use super::TensorError;

/// Local Hilbert-space dimensions of each party, first party slowest-varying.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartySignature {
    dims: Vec<usize>,
}

impl PartySignature {
    pub fn new(dims: Vec<usize>) -> Result<Self, TensorError> {
        if dims.is_empty() {
            return Err(TensorError::EmptySignature);
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(TensorError::InvalidDimension(d));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(TensorError::DimensionOverflow)?;
        Ok(Self { dims })
    }

    /// `n` parties of local dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self, TensorError> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// The common local dimension, if every party has the same one.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Sub-signature at the given (sorted, distinct) party indices.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, TensorError> {
        let keep = self.normalize_subset(keep)?;
        Ok(Self {
            dims: keep.iter().map(|&p| self.dims[p]).collect(),
        })
    }

    /// Validates a party subset and returns it sorted and deduplicated.
    pub fn normalize_subset(&self, subset: &[usize]) -> Result<Vec<usize>, TensorError> {
        if subset.is_empty() {
            return Err(TensorError::EmptySubset);
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&p) = sorted.iter().find(|&&p| p >= self.dims.len()) {
            return Err(TensorError::PartyOutOfRange {
                index: p,
                parties: self.dims.len(),
            });
        }
        Ok(sorted)
    }

    /// Row-major multi-index of a flat basis index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl TryFrom<Vec<usize>> for PartySignature {
    type Error = TensorError;

    fn try_from(dims: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(dims)
    }
}

impl From<PartySignature> for Vec<usize> {
    fn from(sig: PartySignature) -> Self {
        sig.dims
    }
}
