//! Parameter-counting bounds on the fraction of parties whose reduced states can fix
//! a generic pure state.
//!
//! Lower side: the reduced states of all `k`-party subsets carry
//! `Σ_{r=1}^{k} C(n,r) (d²-1)^r` real parameters, a normalized pure state modulo phase
//! carries `2 dⁿ - 2`, so `k` must be at least large enough for the first to match the
//! second. At leading order in `n` with `k = αn` this becomes
//! `H(α) + α ln(d²-1) - ln d = 0`. Upper side: the `(3m+1)`-party split shows
//! `(2m+1)`-party marginals suffice, a fraction tending to 2/3.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("local dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),
    #[error("party count must be at least 1")]
    NoParties,
    #[error("marginal order {k} outside 1..={n}")]
    OrderOutOfRange { n: usize, k: usize },
    #[error("alpha = {alpha} outside the geometric-series range (0, {limit})")]
    AlphaOutOfRange { alpha: f64, limit: f64 },
    #[error("entropy argument {0} outside [0, 1]")]
    EntropyDomain(f64),
    #[error("tolerance must be positive (got {0})")]
    InvalidTolerance(f64),
    #[error("m must be at least 1")]
    InvalidM,
}

fn check_d(d: usize) -> Result<(), BoundsError> {
    if d < 2 {
        return Err(BoundsError::InvalidDimension(d));
    }
    Ok(())
}

fn binomial(n: usize, r: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..r {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// `Σ_{r=1}^{k} C(n,r) (d²-1)^r`, the number of real Bloch parameters in all reduced
/// states of up to `k` parties.
pub fn count_reduced_params(n: usize, k: usize, d: usize) -> Result<BigUint, BoundsError> {
    check_d(d)?;
    if k == 0 || k > n {
        return Err(BoundsError::OrderOutOfRange { n, k });
    }
    let q = BigUint::from(d * d - 1);
    let mut term = BigUint::one();
    let mut total = BigUint::zero();
    for r in 1..=k {
        // C(n,r) q^r from C(n,r-1) q^{r-1}
        term = term * (n - r + 1) * &q / r;
        total += &term;
    }
    Ok(total)
}

/// `2 dⁿ - 2`: real parameters of a normalized pure state modulo global phase.
pub fn pure_param_count(n: usize, d: usize) -> Result<BigUint, BoundsError> {
    check_d(d)?;
    if n == 0 {
        return Err(BoundsError::NoParties);
    }
    Ok(BigUint::from(d).pow(n as u32) * 2u32 - 2u32)
}

/// Geometric-series upper estimate of [`count_reduced_params`] at `k = ⌊nα⌋`:
/// `C(n,k) (d²-1)^k · (d²-1)(1-α) / ((d²-1)(1-α) - α)`.
///
/// The term ratio of the sum is at most `α / ((1-α)(d²-1))`, so the series converges
/// only for `α < (d²-1)/d²` (3/4 for qubits). Returns 0 when `k = 0`.
pub fn geometric_bound(n: usize, alpha: f64, d: usize) -> Result<f64, BoundsError> {
    check_d(d)?;
    let q = (d * d - 1) as f64;
    let limit = q / (q + 1.0);
    if !(alpha > 0.0 && alpha < limit) {
        return Err(BoundsError::AlphaOutOfRange { alpha, limit });
    }
    let k = (n as f64 * alpha).floor() as usize;
    if k == 0 {
        return Ok(0.0);
    }
    let lead = binomial(n, k) * BigUint::from(d * d - 1).pow(k as u32);
    let factor = q * (1.0 - alpha) / (q * (1.0 - alpha) - alpha);
    Ok(lead.to_f64().unwrap_or(f64::INFINITY) * factor)
}

/// `H(x) = -x ln x - (1-x) ln(1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::EntropyDomain(x));
    }
    let h = |p: f64| if p == 0.0 { 0.0 } else { -p * p.ln() };
    Ok(h(x) + h(1.0 - x))
}

/// `H(α) + α ln(d²-1) - ln d`.
pub fn lower_condition(alpha: f64, d: usize) -> Result<f64, BoundsError> {
    check_d(d)?;
    let q = (d * d - 1) as f64;
    Ok(binary_entropy(alpha)? + alpha * q.ln() - (d as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSolution {
    pub d: usize,
    pub alpha: f64,
    /// `|f(alpha)|` for the condition of [`lower_condition`].
    pub residual: f64,
    pub bracket: (f64, f64),
}

/// Root of [`lower_condition`] on `(0, 1/2]` by bisection.
///
/// The condition is strictly increasing there (derivative `ln((1-α)/α) + ln(d²-1)`),
/// negative near 0 and positive at 1/2, so the root is unique. Halves the bracket until
/// both its width and `|f|` at the midpoint are below `tol`, or until it can no longer
/// shrink in floating point.
pub fn solve_alpha_lower(d: usize, tol: f64) -> Result<AlphaSolution, BoundsError> {
    check_d(d)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(BoundsError::InvalidTolerance(tol));
    }
    let f = |a: f64| lower_condition(a, d);
    let (mut lo, mut hi) = (f64::EPSILON, 0.5);
    debug_assert!(f(lo)? < 0.0 && f(hi)? > 0.0);
    loop {
        let mid = 0.5 * (lo + hi);
        let value = f(mid)?;
        if (hi - lo < tol && value.abs() < tol) || mid <= lo || mid >= hi {
            return Ok(AlphaSolution {
                d,
                alpha: mid,
                residual: value.abs(),
                bracket: (lo, hi),
            });
        }
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn as_decimal<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

/// Reduced-state versus pure-state parameter counts at one `(n, k, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    #[serde(serialize_with = "as_decimal")]
    pub reduced_param_count: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub pure_param_count: BigUint,
    pub sufficient_by_count: bool,
}

impl BoundsRow {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self, BoundsError> {
        let reduced_param_count = count_reduced_params(n, k, d)?;
        let pure_param_count = pure_param_count(n, d)?;
        Ok(Self {
            n,
            d,
            k,
            sufficient_by_count: reduced_param_count >= pure_param_count,
            reduced_param_count,
            pure_param_count,
        })
    }

    pub fn fraction(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// Smallest `k` whose reduced states carry at least as many parameters as the pure
/// state. Always exists: at `k = n` the count is `d^{2n} - 1 ≥ 2dⁿ - 2`.
pub fn finite_n_lower_fraction(n: usize, d: usize) -> Result<BoundsRow, BoundsError> {
    check_d(d)?;
    if n == 0 {
        return Err(BoundsError::NoParties);
    }
    let pure = pure_param_count(n, d)?;
    let q = BigUint::from(d * d - 1);
    let mut term = BigUint::one();
    let mut total = BigUint::zero();
    for k in 1..=n {
        term = term * (n - k + 1) * &q / k;
        total += &term;
        if total >= pure {
            return Ok(BoundsRow {
                n,
                d,
                k,
                reduced_param_count: total,
                pure_param_count: pure,
                sufficient_by_count: true,
            });
        }
    }
    unreachable!("the full Bloch count exceeds the pure-state count")
}

/// All `(n, k)` rows for `n` in `ns` and `k = 1..=n`.
pub fn bounds_table(ns: impl IntoIterator<Item = usize>, d: usize) -> Result<Vec<BoundsRow>, BoundsError> {
    let mut rows = Vec::new();
    for n in ns {
        for k in 1..=n {
            rows.push(BoundsRow::new(n, k, d)?);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaUpperRow {
    pub m: usize,
    pub d: usize,
    pub total_parties: usize,
    pub marginal_order: usize,
    pub fraction: f64,
}

/// Limit of `(2m+1)/(3m+1)`.
pub const ALPHA_UPPER_LIMIT: f64 = 2.0 / 3.0;

/// `(2m+1)/(3m+1)` for `m = 1..=m_max`: the fraction of parties whose marginals fix a
/// generic state of `3m+1` parties split as `(d^{m+1}, d^m, d^m)`.
pub fn alpha_upper_table(m_max: usize, d: usize) -> Result<Vec<AlphaUpperRow>, BoundsError> {
    check_d(d)?;
    if m_max == 0 {
        return Err(BoundsError::InvalidM);
    }
    Ok((1..=m_max)
        .map(|m| AlphaUpperRow {
            m,
            d,
            total_parties: 3 * m + 1,
            marginal_order: 2 * m + 1,
            fraction: (2 * m + 1) as f64 / (3 * m + 1) as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_counts() {
        assert_eq!(count_reduced_params(3, 2, 2).unwrap(), BigUint::from(36u32));
        assert_eq!(count_reduced_params(3, 3, 2).unwrap(), BigUint::from(63u32));
        assert_eq!(count_reduced_params(1, 1, 2).unwrap(), BigUint::from(3u32));
        assert!(count_reduced_params(3, 0, 2).is_err());
        assert!(count_reduced_params(3, 4, 2).is_err());
        assert!(count_reduced_params(3, 1, 1).is_err());
    }

    #[test]
    fn pure_counts() {
        assert_eq!(pure_param_count(3, 2).unwrap(), BigUint::from(14u32));
        assert_eq!(pure_param_count(1, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(pure_param_count(2, 3).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn counts_do_not_overflow() {
        let big = count_reduced_params(400, 400, 2).unwrap();
        assert_eq!(big + 1u32, BigUint::from(4u32).pow(400));
    }

    #[test]
    fn geometric_bound_range_and_dominance() {
        assert!(geometric_bound(20, 0.75, 2).is_err());
        assert!(geometric_bound(20, 0.0, 2).is_err());
        assert_eq!(geometric_bound(20, 0.01, 2).unwrap(), 0.0);
        let exact = count_reduced_params(20, 4, 2).unwrap().to_f64().unwrap();
        assert!(geometric_bound(20, 0.2, 2).unwrap() >= exact);
        // d = 3 allows alpha up to 8/9
        assert!(geometric_bound(20, 0.8, 3).is_ok());
    }

    #[test]
    fn entropy_values() {
        assert!((binary_entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.189).unwrap() - 0.484_769_701_248).abs() < 1e-12);
        assert!((binary_entropy(0.19).unwrap() - 0.486_222_964_662).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn alpha_roots() {
        let two = solve_alpha_lower(2, 1e-13).unwrap();
        assert!((two.alpha - 0.189).abs() < 5e-4);
        assert!(two.residual < 1e-12);
        assert!(two.bracket.0 < two.alpha && two.alpha < two.bracket.1);
        let three = solve_alpha_lower(3, 1e-13).unwrap();
        assert!(lower_condition(0.25, 3).unwrap() < 0.0 && lower_condition(0.26, 3).unwrap() > 0.0);
        assert!((three.alpha - 0.255).abs() < 1e-3);
        assert!(solve_alpha_lower(2, 0.0).is_err());
    }

    #[test]
    fn finite_n_scan() {
        let three = finite_n_lower_fraction(3, 2).unwrap();
        assert_eq!(three.k, 2);
        assert!(!BoundsRow::new(3, 1, 2).unwrap().sufficient_by_count);
        assert_eq!(finite_n_lower_fraction(1, 2).unwrap().k, 1);
        let thirty = finite_n_lower_fraction(30, 2).unwrap();
        assert!((thirty.fraction() - 0.189).abs() < 0.08);
    }

    #[test]
    fn upper_table() {
        let rows = alpha_upper_table(10, 2).unwrap();
        assert_eq!(rows[0].fraction, 0.75);
        assert!((rows[9].fraction - 21.0 / 31.0).abs() < 1e-15);
        assert!(rows.windows(2).all(|w| w[1].fraction < w[0].fraction));
        assert!(rows.iter().all(|r| r.fraction > ALPHA_UPPER_LIMIT));
        assert!(alpha_upper_table(0, 2).is_err());
    }

    #[test]
    fn rows_serialize_counts_as_strings() {
        let json = serde_json::to_string(&BoundsRow::new(3, 2, 2).unwrap()).unwrap();
        assert!(json.contains("\"reduced_param_count\":\"36\""));
    }
}
