use serde::Serialize;

use super::{TripartiteShape, UniquenessError};

/// Largest total Hilbert-space dimension a split may describe by default.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Grouping of `3m + 1` parties of dimension `d` into `A = m + 1` parties and
/// `B`, `C` of `m` parties each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartySplit {
    pub m: usize,
    pub d: usize,
    pub shape: TripartiteShape,
    /// Parties in each of the two marginals `AB`, `AC`: `2m + 1`.
    pub marginal_party_count: usize,
    pub total_parties: usize,
}

impl PartySplit {
    /// `(2m + 1) / (3m + 1)`.
    pub fn fraction(&self) -> f64 {
        self.marginal_party_count as f64 / self.total_parties as f64
    }

    /// Consecutive party counts of `A`, `B`, `C`.
    pub fn groups(&self) -> [usize; 3] {
        [self.m + 1, self.m, self.m]
    }

    /// The fine-grained party indices of the `AB` and `AC` marginals.
    pub fn marginal_subsets(&self) -> [Vec<usize>; 2] {
        let a: Vec<usize> = (0..=self.m).collect();
        let b = (self.m + 1)..(2 * self.m + 1);
        let c = (2 * self.m + 1)..self.total_parties;
        let ab = a.iter().copied().chain(b).collect();
        let ac = a.iter().copied().chain(c).collect();
        [ab, ac]
    }
}

pub fn party_split(m: usize, d: usize) -> Result<PartySplit, UniquenessError> {
    party_split_with_cap(m, d, MAX_TOTAL_DIM)
}

pub fn party_split_with_cap(m: usize, d: usize, cap: usize) -> Result<PartySplit, UniquenessError> {
    if m == 0 || d < 2 {
        return Err(UniquenessError::InvalidSplit { m, d });
    }
    let total_parties = 3 * m + 1;
    let cap_err = UniquenessError::DimensionCap {
        d,
        parties: total_parties,
        cap,
    };
    let pow = |e: usize| d.checked_pow(u32::try_from(e).ok()?);
    let total = pow(total_parties).ok_or_else(|| cap_err.clone())?;
    if total > cap {
        return Err(cap_err);
    }
    let side = pow(m).ok_or_else(|| cap_err.clone())?;
    Ok(PartySplit {
        m,
        d,
        shape: TripartiteShape::new(side * d, side, side),
        marginal_party_count: 2 * m + 1,
        total_parties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_qubit_split() {
        let s = party_split(1, 2).unwrap();
        assert_eq!(s.shape, TripartiteShape::new(4, 2, 2));
        assert_eq!((s.marginal_party_count, s.total_parties), (3, 4));
        assert!(s.shape.satisfies_bound());
        assert_eq!(s.marginal_subsets(), [vec![0, 1, 2], vec![0, 1, 3]]);
    }

    #[test]
    fn second_qubit_split() {
        let s = party_split(2, 2).unwrap();
        assert_eq!(s.shape, TripartiteShape::new(8, 4, 4));
        assert_eq!((s.marginal_party_count, s.total_parties), (5, 7));
        assert_eq!(s.groups(), [3, 2, 2]);
    }

    #[test]
    fn fraction_decreases_to_two_thirds() {
        let fractions: Vec<f64> = (1..=50)
            .map(|m| party_split_with_cap(m, 2, usize::MAX).map(|s| s.fraction()))
            .take_while(Result::is_ok)
            .map(Result::unwrap)
            .collect();
        assert!(fractions.windows(2).all(|w| w[1] < w[0]));
        assert!(fractions.iter().all(|&f| f > 2.0 / 3.0));
        // (2m+1)/(3m+1) - 2/3 = 1/(3(3m+1))
        let m = fractions.len();
        assert!((fractions[m - 1] - 2.0 / 3.0 - 1.0 / (3.0 * (3 * m + 1) as f64)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(party_split(0, 2), Err(UniquenessError::InvalidSplit { .. })));
        assert!(matches!(party_split(1, 1), Err(UniquenessError::InvalidSplit { .. })));
        assert!(matches!(party_split(4, 2), Err(UniquenessError::DimensionCap { .. })));
        assert!(matches!(
            party_split_with_cap(30, 10, usize::MAX),
            Err(UniquenessError::DimensionCap { .. })
        ));
    }
}
