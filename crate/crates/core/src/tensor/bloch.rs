use num_complex::Complex64;

use super::linalg::CMatrix;
use super::{DensityMatrix, PartySignature, TensorError};

/// Generalized Gell-Mann matrices for dimension `d`: the `d(d-1)/2` symmetric ones,
/// then the `d(d-1)/2` antisymmetric ones (both over `j < k` lexicographically),
/// then the `d-1` diagonal ones. Each satisfies `Tr(B_i B_j) = 2 δ_ij`; at `d = 2`
/// this is `(σx, σy, σz)`.
pub fn gell_mann_basis(d: usize) -> Vec<CMatrix> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut basis = Vec::with_capacity(d * d - 1);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut m = CMatrix::from_element(d, d, zero);
        m[(j, k)] = one;
        m[(k, j)] = one;
        basis.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = CMatrix::from_element(d, d, zero);
        m[(j, k)] = -i;
        m[(k, j)] = i;
        basis.push(m);
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::from_element(d, d, zero);
        for j in 0..l {
            m[(j, j)] = Complex64::new(scale, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        basis.push(m);
    }
    basis
}

/// Real coefficients of `ρ = d^{-n} Σ_μ c_μ B_{μ1} ⊗ … ⊗ B_{μn}` with `B_0 = I`.
///
/// Labels are `0` for the identity and `1..d²-1` for the Gell-Mann elements. For a
/// density matrix `c_{0…0} = 1`, and for qubits `c_μ = Tr(ρ σ_μ1 ⊗ … ⊗ σ_μn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTable {
    signature: PartySignature,
    local_dim: usize,
    coefficients: Vec<f64>,
}

impl BlochTable {
    pub fn decompose(rho: &DensityMatrix) -> Result<Self, TensorError> {
        Self::from_hermitian(rho.signature(), rho.matrix())
    }

    /// Decomposes any Hermitian matrix; the identity coefficient is then its trace.
    pub fn from_hermitian(signature: &PartySignature, matrix: &CMatrix) -> Result<Self, TensorError> {
        let d = signature
            .uniform_dim()
            .ok_or_else(|| TensorError::MixedDimensions(signature.dims().to_vec()))?;
        let dim = signature.total_dim();
        if matrix.shape() != (dim, dim) {
            return Err(TensorError::ShapeMismatch {
                expected: dim * dim,
                found: matrix.len(),
            });
        }
        let n = signature.num_parties();
        let ops = local_operators(d);
        // (r_p, c_p) pairs -> labels; Tr(ρ B) = Σ ρ[r,c] B[c,r]
        let forward: Vec<Vec<Complex64>> = ops
            .iter()
            .map(|b| (0..d * d).map(|rc| b[(rc % d, rc / d)]).collect())
            .collect();
        let mut tensor = to_pair_tensor(matrix, d, n);
        for p in 0..n {
            tensor = contract_axis(&tensor, d * d, n, p, &forward);
        }
        let total = (d as f64).powi(n as i32);
        let coefficients = tensor
            .iter()
            .enumerate()
            .map(|(flat, z)| {
                let identities = labels_of(flat, d, n).iter().filter(|&&l| l == 0).count();
                // d^n / (d^#id · 2^#non-id)
                let norm = (d as f64).powi(identities as i32) * 2f64.powi((n - identities) as i32);
                z.re * total / norm
            })
            .collect();
        Ok(Self {
            signature: signature.clone(),
            local_dim: d,
            coefficients,
        })
    }

    pub fn signature(&self) -> &PartySignature {
        &self.signature
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Coefficient for one label per party.
    pub fn get(&self, labels: &[usize]) -> f64 {
        let d2 = self.local_dim * self.local_dim;
        let flat = labels.iter().fold(0, |acc, &l| acc * d2 + l);
        self.coefficients[flat]
    }

    /// All `(labels, coefficient)` pairs with `|coefficient| > tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(Vec<usize>, f64)> {
        let n = self.signature.num_parties();
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(flat, &c)| (labels_of(flat, self.local_dim, n), c))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.local_dim;
        let n = self.signature.num_parties();
        let ops = local_operators(d);
        // labels -> (r, c) pairs
        let backward: Vec<Vec<Complex64>> = (0..d * d)
            .map(|rc| ops.iter().map(|b| b[(rc / d, rc % d)]).collect())
            .collect();
        let mut tensor: Vec<Complex64> = self.coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        for p in 0..n {
            tensor = contract_axis(&tensor, d * d, n, p, &backward);
        }
        let scale = 1.0 / (d as f64).powi(n as i32);
        from_pair_tensor(&tensor, d, n).scale(scale)
    }
}

/// Identity followed by the Gell-Mann basis.
fn local_operators(d: usize) -> Vec<CMatrix> {
    let mut ops = vec![CMatrix::identity(d, d)];
    ops.extend(gell_mann_basis(d));
    ops
}

fn labels_of(mut flat: usize, d: usize, n: usize) -> Vec<usize> {
    let d2 = d * d;
    let mut labels = vec![0; n];
    for slot in labels.iter_mut().rev() {
        *slot = flat % d2;
        flat /= d2;
    }
    labels
}

/// Reindexes `M[(r1..rn), (c1..cn)]` as `T[(r1 c1), …, (rn cn)]`, each pair flattened `r*d + c`.
fn to_pair_tensor(m: &CMatrix, d: usize, n: usize) -> Vec<Complex64> {
    let dim = m.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[pair_index(r, c, d, n)] = m[(r, c)];
        }
    }
    out
}

fn from_pair_tensor(t: &[Complex64], d: usize, n: usize) -> CMatrix {
    let dim = d.pow(n as u32);
    CMatrix::from_fn(dim, dim, |r, c| t[pair_index(r, c, d, n)])
}

fn pair_index(mut r: usize, mut c: usize, d: usize, n: usize) -> usize {
    let mut flat = 0;
    let mut weight = 1;
    for _ in 0..n {
        flat += ((r % d) * d + (c % d)) * weight;
        weight *= d * d;
        r /= d;
        c /= d;
    }
    flat
}

/// Applies `map[out][in]` along axis `axis` of an `n`-axis tensor with extent `k` per axis.
fn contract_axis(t: &[Complex64], k: usize, n: usize, axis: usize, map: &[Vec<Complex64>]) -> Vec<Complex64> {
    let inner = k.pow((n - 1 - axis) as u32);
    let outer = k.pow(axis as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
    for o in 0..outer {
        for i in 0..inner {
            for (a, row) in map.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (b, &w) in row.iter().enumerate() {
                    if w != Complex64::new(0.0, 0.0) {
                        acc += w * t[(o * k + b) * inner + i];
                    }
                }
                out[(o * k + a) * inner + i] = acc;
            }
        }
    }
    out
}
