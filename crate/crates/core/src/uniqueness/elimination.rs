use num_complex::Complex64;
use serde::Serialize;

use super::consistency::{
    build_consistency_matrix, identity_pattern_vector, tripartite_shape, TripartiteShape, Unknown, DEFAULT_RANK_POLICY,
};
use super::UniquenessError;
use crate::tensor::{rank_and_nullspace, AmplitudeTensor, CMatrix, CVector};

/// One solved block of the elimination.
#[derive(Debug, Clone, Serialize)]
pub struct EliminationStep {
    pub index: usize,
    /// Basis products `|i j k>` (zero-based `j`, `k`; all `i`) whose equations were used.
    pub block: (usize, usize),
    /// Unknowns solved in this step.
    pub solved: Vec<String>,
    pub rank: usize,
    pub required_rank: usize,
    /// `‖A x − b‖` of the least-squares solve.
    pub residual: f64,
    /// Largest deviation of the solved values from the identity pattern.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EliminationOutcome {
    /// Every block had full rank; the kernel is the identity pattern alone.
    Completed {
        /// Distance of the assembled solution from the unit identity pattern.
        pattern_deviation: f64,
        /// `‖K x‖ / (‖K‖ ‖x‖)` for the assembled solution.
        full_residual: f64,
    },
    /// A block was rank-deficient; the input is not generic.
    RankDeficient { step: usize, rank: usize, required: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct EliminationTrace {
    pub shape: TripartiteShape,
    pub steps: Vec<EliminationStep>,
    pub outcome: EliminationOutcome,
}

impl EliminationTrace {
    pub fn completed(&self) -> bool {
        matches!(self.outcome, EliminationOutcome::Completed { .. })
    }
}

/// Replays the block-by-block elimination of the consistency system.
///
/// Step 0 uses the `|i11>` equations to fix `e(·,1)` and `f(·,1)` up to the free scale
/// `e11 = f11 = t` (set to 1). Steps `k = 2..P` use `|i1k>` to solve `e(·,k)`, and the
/// final steps use `|ij1>` for `j = 2..N` to solve `f(·,j)`. Each block is solved by
/// least squares from the previously solved values, so deviations from the ideal
/// pattern are measured rather than assumed away.
#[allow(clippy::needless_range_loop)] // k and j are equation indices, not just positions
pub fn sequential_elimination_trace(a: &AmplitudeTensor) -> Result<EliminationTrace, UniquenessError> {
    let shape = tripartite_shape(a)?;
    if !shape.satisfies_bound() {
        return Err(UniquenessError::BelowBound(shape));
    }
    let TripartiteShape { m, n, p } = shape;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut e = vec![vec![zero; p]; p]; // e[l][k]
    let mut f = vec![vec![zero; n]; n]; // f[r][j]
    let mut steps = Vec::new();

    // step 0: Σ_l a_{i0l} e(l,0) − Σ_r a_{ir0} f(r,0) = 0 with e(0,0) = 1
    // unknowns: e(1..P,0), f(0..N,0)
    let mut cols: Vec<Unknown> = (1..p).map(|l| Unknown::E(l, 0)).collect();
    cols.extend((0..n).map(|r| Unknown::F(r, 0)));
    let block = CMatrix::from_fn(m, cols.len(), |i, c| match cols[c] {
        Unknown::E(l, _) => a.get(&[i, 0, l]),
        Unknown::F(r, _) => -a.get(&[i, r, 0]),
    });
    let rhs = CVector::from_fn(m, |i, _| -a.get(&[i, 0, 0]));
    let solved = solve_block(&block, &rhs);
    let step = record(0, (0, 0), &cols, &solved, n + p - 1, |u| match u {
        Unknown::F(0, 0) => one,
        _ => zero,
    });
    if let Some(trace) = abort(shape, &mut steps, step) {
        return Ok(trace);
    }
    e[0][0] = one;
    for (u, x) in cols.iter().zip(solved.x.iter()) {
        match *u {
            Unknown::E(l, k) => e[l][k] = *x,
            Unknown::F(r, j) => f[r][j] = *x,
        }
    }

    // steps for k = 1..P: Σ_l a_{i0l} e(l,k) = Σ_r a_{irk} f(r,0)
    let e_block = CMatrix::from_fn(m, p, |i, l| a.get(&[i, 0, l]));
    for k in 1..p {
        let cols: Vec<Unknown> = (0..p).map(|l| Unknown::E(l, k)).collect();
        let rhs = CVector::from_fn(m, |i, _| (0..n).map(|r| a.get(&[i, r, k]) * f[r][0]).sum());
        let solved = solve_block(&e_block, &rhs);
        let step = record(steps.len(), (0, k), &cols, &solved, p, |u| match u {
            Unknown::E(l, k) if l == k => one,
            _ => zero,
        });
        if let Some(trace) = abort(shape, &mut steps, step) {
            return Ok(trace);
        }
        for (l, x) in solved.x.iter().enumerate() {
            e[l][k] = *x;
        }
    }

    // steps for j = 1..N: Σ_l a_{ijl} e(l,0) = Σ_r a_{ir0} f(r,j)
    let f_block = CMatrix::from_fn(m, n, |i, r| a.get(&[i, r, 0]));
    for j in 1..n {
        let cols: Vec<Unknown> = (0..n).map(|r| Unknown::F(r, j)).collect();
        let rhs = CVector::from_fn(m, |i, _| (0..p).map(|l| a.get(&[i, j, l]) * e[l][0]).sum());
        let solved = solve_block(&f_block, &rhs);
        let step = record(steps.len(), (j, 0), &cols, &solved, n, |u| match u {
            Unknown::F(r, j) if r == j => one,
            _ => zero,
        });
        if let Some(trace) = abort(shape, &mut steps, step) {
            return Ok(trace);
        }
        for (r, x) in solved.x.iter().enumerate() {
            f[r][j] = *x;
        }
    }

    let mut x = CVector::zeros(shape.cols());
    for l in 0..p {
        for k in 0..p {
            x[shape.e_col(l, k)] = e[l][k];
        }
    }
    for r in 0..n {
        for j in 0..n {
            x[shape.f_col(r, j)] = f[r][j];
        }
    }
    let k_matrix = build_consistency_matrix(a)?.matrix;
    let full_residual = (&k_matrix * &x).norm() / (k_matrix.norm() * x.norm());
    let unit = x.unscale(x.norm());
    let pattern_deviation = (unit - identity_pattern_vector(shape)).norm();
    Ok(EliminationTrace {
        shape,
        steps,
        outcome: EliminationOutcome::Completed {
            pattern_deviation,
            full_residual,
        },
    })
}

struct BlockSolution {
    x: CVector,
    rank: usize,
    residual: f64,
}

fn solve_block(block: &CMatrix, rhs: &CVector) -> BlockSolution {
    let info = rank_and_nullspace(block, DEFAULT_RANK_POLICY);
    let svd = block.clone().svd(true, true);
    let x = svd
        .solve(rhs, info.threshold)
        .expect("both singular vector sets were computed");
    let residual = (block * &x - rhs).norm();
    BlockSolution {
        x,
        rank: info.rank,
        residual,
    }
}

fn record(
    index: usize,
    block: (usize, usize),
    cols: &[Unknown],
    solved: &BlockSolution,
    required_rank: usize,
    ideal: impl Fn(Unknown) -> Complex64,
) -> EliminationStep {
    let max_deviation = cols
        .iter()
        .zip(solved.x.iter())
        .map(|(&u, x)| (x - ideal(u)).norm())
        .fold(0.0, f64::max);
    EliminationStep {
        index,
        block,
        solved: cols.iter().map(ToString::to_string).collect(),
        rank: solved.rank,
        required_rank,
        residual: solved.residual,
        max_deviation,
    }
}

fn abort(shape: TripartiteShape, steps: &mut Vec<EliminationStep>, step: EliminationStep) -> Option<EliminationTrace> {
    let deficient = step.rank < step.required_rank;
    let (index, rank, required) = (step.index, step.rank, step.required_rank);
    steps.push(step);
    deficient.then(|| EliminationTrace {
        shape,
        steps: std::mem::take(steps),
        outcome: EliminationOutcome::RankDeficient {
            step: index,
            rank,
            required,
        },
    })
}
