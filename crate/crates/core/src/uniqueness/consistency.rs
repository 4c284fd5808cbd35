use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::UniquenessError;
use crate::tensor::{rank_and_nullspace, AmplitudeTensor, CMatrix, CVector, TolPolicy, RANK_TOL};

/// Singular values below `1e-8 · σ_max` count as zero for verdicts.
pub const DEFAULT_RANK_POLICY: TolPolicy = TolPolicy::Relative(RANK_TOL);

/// Maximum distance between the kernel and the identity pattern for a match.
pub const PATTERN_MATCH_TOL: f64 = 1e-8;

/// Dimensions `(M, N, P)` of parties `A`, `B`, `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripartiteShape {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl TripartiteShape {
    pub fn new(m: usize, n: usize, p: usize) -> Self {
        Self { m, n, p }
    }

    /// `M >= N + P - 1`, the regime where the generic argument applies.
    pub fn satisfies_bound(&self) -> bool {
        self.m + 1 >= self.n + self.p
    }

    pub fn rows(&self) -> usize {
        self.m * self.n * self.p
    }

    pub fn cols(&self) -> usize {
        self.p * self.p + self.n * self.n
    }

    /// Column of `e(l, k)`; `l, k` are zero-based.
    pub fn e_col(&self, l: usize, k: usize) -> usize {
        l * self.p + k
    }

    /// Column of `f(r, j)`; `r, j` are zero-based.
    pub fn f_col(&self, r: usize, j: usize) -> usize {
        self.p * self.p + r * self.n + j
    }

    pub fn row(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.p + k
    }

    pub fn unknown(&self, col: usize) -> Unknown {
        let pp = self.p * self.p;
        if col < pp {
            Unknown::E(col / self.p, col % self.p)
        } else {
            let c = col - pp;
            Unknown::F(c / self.n, c % self.n)
        }
    }
}

impl fmt::Display for TripartiteShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.n, self.p)
    }
}

/// Label of one scalar unknown (zero-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unknown {
    E(usize, usize),
    F(usize, usize),
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::E(l, k) => write!(f, "e{}{}", l + 1, k + 1),
            Unknown::F(r, j) => write!(f, "f{}{}", r + 1, j + 1),
        }
    }
}

/// Coefficients of the equated `AB`/`AC` purification forms.
///
/// Row `(i, j, k)` encodes `Σ_l a_{ijl} e(l,k) − Σ_r a_{irk} f(r,j) = 0`. Columns list
/// every `e(l,k)` in lexicographic order, then every `f(r,j)`.
#[derive(Debug, Clone)]
pub struct ConsistencyMatrix {
    pub shape: TripartiteShape,
    pub matrix: CMatrix,
}

impl ConsistencyMatrix {
    pub fn column_label(&self, col: usize) -> Unknown {
        self.shape.unknown(col)
    }
}

pub(crate) fn tripartite_shape(a: &AmplitudeTensor) -> Result<TripartiteShape, UniquenessError> {
    match a.signature().dims() {
        &[m, n, p] => Ok(TripartiteShape::new(m, n, p)),
        dims => Err(UniquenessError::NotTripartite(dims.len())),
    }
}

pub fn build_consistency_matrix(a: &AmplitudeTensor) -> Result<ConsistencyMatrix, UniquenessError> {
    let shape = tripartite_shape(a)?;
    let TripartiteShape { m, n, p } = shape;
    let mut matrix = CMatrix::zeros(shape.rows(), shape.cols());
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                let row = shape.row(i, j, k);
                for l in 0..p {
                    matrix[(row, shape.e_col(l, k))] += a.get(&[i, j, l]);
                }
                for r in 0..n {
                    matrix[(row, shape.f_col(r, j))] -= a.get(&[i, r, k]);
                }
            }
        }
    }
    Ok(ConsistencyMatrix { shape, matrix })
}

/// Unit vector with `δ_{lk}` on the `e` columns and `δ_{rj}` on the `f` columns.
pub fn identity_pattern_vector(shape: TripartiteShape) -> CVector {
    let mut v = CVector::zeros(shape.cols());
    let scale = 1.0 / ((shape.n + shape.p) as f64).sqrt();
    for l in 0..shape.p {
        v[shape.e_col(l, l)] = Complex64::new(scale, 0.0);
    }
    for r in 0..shape.n {
        v[shape.f_col(r, r)] = Complex64::new(scale, 0.0);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearVerdict {
    #[serde(rename = "UNIQUE_LINEAR")]
    UniqueLinear,
    #[serde(rename = "DEGENERATE")]
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct UniquenessVerdict {
    pub shape: TripartiteShape,
    pub null_dim: usize,
    pub identity_pattern_match: bool,
    /// Distance from the kernel to the identity pattern (both unit-normalized).
    pub residual: f64,
    /// `‖K v_id‖ / ‖K‖`.
    pub pattern_kernel_residual: f64,
    pub singular_values: Vec<f64>,
    pub verdict: LinearVerdict,
    /// Orthonormal kernel basis.
    pub kernel: CMatrix,
}

impl UniquenessVerdict {
    pub fn is_unique(&self) -> bool {
        self.verdict == LinearVerdict::UniqueLinear
    }
}

pub fn check_linear_uniqueness(a: &AmplitudeTensor, policy: TolPolicy) -> Result<UniquenessVerdict, UniquenessError> {
    let k = build_consistency_matrix(a)?;
    let v_id = identity_pattern_vector(k.shape);
    let info = rank_and_nullspace(&k.matrix, policy);
    let kernel = info.null_basis;
    let null_dim = kernel.ncols();

    // component of v_id outside the kernel; zero iff v_id lies in span(kernel)
    let projected = &kernel * (kernel.adjoint() * &v_id);
    let residual = (&v_id - projected).norm();
    let identity_pattern_match = null_dim == 1 && residual < PATTERN_MATCH_TOL;
    let k_norm = k.matrix.norm();
    let pattern_kernel_residual = if k_norm > 0.0 {
        (&k.matrix * &v_id).norm() / k_norm
    } else {
        0.0
    };
    let verdict = if identity_pattern_match {
        LinearVerdict::UniqueLinear
    } else {
        LinearVerdict::Degenerate
    };
    Ok(UniquenessVerdict {
        shape: k.shape,
        null_dim,
        identity_pattern_match,
        residual,
        pattern_kernel_residual,
        singular_values: info.singular_values,
        verdict,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{PartySignature, SeededRng};

    fn haar(dims: Vec<usize>, seed: u64) -> AmplitudeTensor {
        AmplitudeTensor::haar_random(&PartySignature::new(dims).unwrap(), &mut SeededRng::new(seed))
    }

    fn ghz_222() -> AmplitudeTensor {
        let one = Complex64::new(1.0, 0.0);
        AmplitudeTensor::ghz(PartySignature::uniform(3, 2).unwrap(), one, one).unwrap()
    }

    #[test]
    fn matrix_dimensions() {
        let k = build_consistency_matrix(&haar(vec![4, 2, 2], 1)).unwrap();
        assert_eq!(k.matrix.shape(), (16, 8));
        let k = build_consistency_matrix(&haar(vec![5, 3, 2], 1)).unwrap();
        assert_eq!(k.matrix.shape(), (30, 13));
    }

    #[test]
    fn rejects_non_tripartite() {
        let a = haar(vec![2, 2, 2, 2], 1);
        assert_eq!(
            build_consistency_matrix(&a).unwrap_err(),
            UniquenessError::NotTripartite(4)
        );
    }

    #[test]
    fn entries_follow_definition() {
        let a = haar(vec![3, 2, 2], 5);
        let k = build_consistency_matrix(&a).unwrap();
        let s = k.shape;
        // row (i,j,k) = (2,1,0): e(l,0) gets a_{2,1,l}; f(r,1) gets -a_{2,r,0}
        let row = s.row(2, 1, 0);
        assert_eq!(k.matrix[(row, s.e_col(1, 0))], a.get(&[2, 1, 1]));
        assert_eq!(k.matrix[(row, s.f_col(0, 1))], -a.get(&[2, 0, 0]));
        // diagonal unknowns pick up both terms
        assert_eq!(k.matrix[(row, s.f_col(1, 1))], -a.get(&[2, 1, 0]));
        assert_eq!(k.matrix[(row, s.e_col(0, 1))], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identity_pattern_shapes() {
        let v = identity_pattern_vector(TripartiteShape::new(4, 2, 2));
        let s = TripartiteShape::new(4, 2, 2);
        for col in [s.e_col(0, 0), s.e_col(1, 1), s.f_col(0, 0), s.f_col(1, 1)] {
            assert!((v[col].re - 0.5).abs() < 1e-15);
        }
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 4);

        let v = identity_pattern_vector(TripartiteShape::new(7, 1, 1));
        assert_eq!(v.len(), 2);
        for z in v.iter() {
            assert!((z.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_pattern_is_in_kernel() {
        let mut rng = SeededRng::new(17);
        for dims in [vec![4, 2, 2], vec![2, 2, 2], vec![3, 3, 2], vec![5, 2, 3]] {
            let a = AmplitudeTensor::haar_random(&PartySignature::new(dims).unwrap(), &mut rng);
            let k = build_consistency_matrix(&a).unwrap();
            let v = identity_pattern_vector(k.shape);
            assert!((&k.matrix * v).norm() <= 1e-12 * k.matrix.norm());
        }
    }

    #[test]
    fn haar_422_is_unique_linear() {
        let verdict = check_linear_uniqueness(&haar(vec![4, 2, 2], 3), DEFAULT_RANK_POLICY).unwrap();
        assert_eq!(verdict.verdict, LinearVerdict::UniqueLinear);
        assert_eq!(verdict.null_dim, 1);
        assert!(verdict.residual < 1e-8);
    }

    #[test]
    fn ghz_is_degenerate() {
        let verdict = check_linear_uniqueness(&ghz_222(), DEFAULT_RANK_POLICY).unwrap();
        assert_eq!(verdict.verdict, LinearVerdict::Degenerate);
        assert!(verdict.null_dim > 1);
        assert_eq!(verdict.kernel.ncols(), verdict.null_dim);
    }

    #[test]
    fn bound_flag() {
        assert!(TripartiteShape::new(4, 2, 2).satisfies_bound());
        assert!(TripartiteShape::new(3, 2, 2).satisfies_bound());
        assert!(!TripartiteShape::new(2, 2, 2).satisfies_bound());
        assert!(TripartiteShape::new(1, 1, 1).satisfies_bound());
    }

    #[test]
    fn column_labels() {
        let s = TripartiteShape::new(4, 2, 2);
        assert_eq!(s.unknown(0), Unknown::E(0, 0));
        assert_eq!(s.unknown(3), Unknown::E(1, 1));
        assert_eq!(s.unknown(4), Unknown::F(0, 0));
        assert_eq!(s.unknown(6), Unknown::F(1, 0));
        assert_eq!(Unknown::F(1, 0).to_string(), "f21");
    }
}
