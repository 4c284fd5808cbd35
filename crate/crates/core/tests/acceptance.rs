//! One test per acceptance criterion. Each prints a `[PASS]`/`[FAIL]` line (visible
//! with `--nocapture`) before asserting.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use qmarginals::bounds::{count_reduced_params, finite_n_lower_fraction, pure_param_count, solve_alpha_lower};
use qmarginals::classical::{classical_marginal, counterexample_pair, ClassicalError, CounterexamplePair};
use qmarginals::feasibility::{
    constraint_nullspace, uniqueness_probe, MarginalConstraintSet, OracleVerdict, ProjectionConfig,
};
use qmarginals::tensor::{AmplitudeTensor, CMatrix, DensityMatrix, PartySignature, SeededRng};
use qmarginals::uniqueness::{
    build_consistency_matrix, check_linear_uniqueness, identity_pattern_vector, LinearVerdict, DEFAULT_RANK_POLICY,
};

fn report(id: usize, name: &str, pass: bool, detail: String) {
    println!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn pairs() -> Vec<Vec<usize>> {
    vec![vec![0, 1], vec![0, 2], vec![1, 2]]
}

#[test]
fn criterion_01_lower_root_for_qubits() {
    let clock = Instant::now();
    let s = solve_alpha_lower(2, 1e-13).unwrap();
    let elapsed = clock.elapsed().as_secs_f64();
    let pass = (0.1885..=0.1895).contains(&s.alpha) && s.residual < 1e-12 && elapsed < 1.0;
    report(
        1,
        "alpha_L(2)",
        pass,
        format!("{:.10}, residual {:.1e}, {elapsed:.3} s", s.alpha, s.residual),
    );
}

#[test]
fn criterion_02_lower_root_limit() {
    let roots: Vec<f64> = (2..=50).map(|d| solve_alpha_lower(d, 1e-13).unwrap().alpha).collect();
    let monotone = roots.windows(2).all(|w| w[1] >= w[0]);
    let large = solve_alpha_lower(1000, 1e-13).unwrap().alpha;
    report(
        2,
        "alpha_L monotone and > 0.49 at d = 1000",
        monotone && large > 0.49,
        format!("monotone over 2..50: {monotone}; alpha_L(1000) = {large:.6}"),
    );
}

#[test]
fn criterion_03_counting_identity() {
    let mut failures = Vec::new();
    for d in 2..=5usize {
        for n in 1..=20usize {
            // the count omits the r = 0 identity term
            let lhs = count_reduced_params(n, n, d).unwrap() + 1u32;
            if lhs != BigUint::from(d).pow(2 * n as u32) {
                failures.push((n, d));
            }
        }
    }
    report(
        3,
        "binomial counting identity",
        failures.is_empty(),
        format!("mismatches {failures:?}"),
    );
}

#[test]
fn criterion_04_finite_n_comparison() {
    let k2 = count_reduced_params(3, 2, 2).unwrap();
    let k1 = count_reduced_params(3, 1, 2).unwrap();
    let pure = pure_param_count(3, 2).unwrap();
    let row = finite_n_lower_fraction(3, 2).unwrap();
    let pass = k2 == BigUint::from(36u32) && pure == BigUint::from(14u32) && k1 == BigUint::from(9u32) && row.k == 2;
    report(
        4,
        "finite-n comparison",
        pass,
        format!("k=2: {k2} >= {pure}; k=1: {k1} < {pure}; smallest k = {}", row.k),
    );
}

#[test]
fn criterion_05_linear_genericity() {
    let signature = PartySignature::new(vec![4, 2, 2]).unwrap();
    let clock = Instant::now();
    let good = (0..200u64)
        .filter(|&t| {
            let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::stream(5, t));
            let v = check_linear_uniqueness(&state, DEFAULT_RANK_POLICY).unwrap();
            v.verdict == LinearVerdict::UniqueLinear && v.null_dim == 1 && v.residual < 1e-8
        })
        .count();
    let elapsed = clock.elapsed().as_secs_f64();
    report(
        5,
        "UNIQUE_LINEAR at (4,2,2)",
        good >= 199 && elapsed < 10.0,
        format!("{good}/200 in {elapsed:.2} s"),
    );
}

#[test]
fn criterion_06_identity_pattern_in_kernel() {
    let shapes = [
        [2, 2, 2],
        [3, 2, 2],
        [4, 2, 2],
        [3, 3, 2],
        [5, 3, 2],
        [2, 3, 4],
        [6, 3, 3],
        [3, 2, 3],
    ];
    let mut worst = 0.0f64;
    for t in 0..1000u64 {
        let dims = shapes[t as usize % shapes.len()].to_vec();
        let signature = PartySignature::new(dims).unwrap();
        let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::stream(6, t));
        let k = build_consistency_matrix(&state).unwrap();
        let v = identity_pattern_vector(k.shape);
        worst = worst.max((&k.matrix * &v).norm() / k.matrix.norm());
    }
    report(
        6,
        "K v_id = 0",
        worst <= 1e-12,
        format!("max |K v|/|K| = {worst:.2e} over 1000 tensors"),
    );
}

#[test]
fn criterion_07_oracle_positive_control() {
    let signature = PartySignature::uniform(3, 2).unwrap();
    let clock = Instant::now();
    let mut good = 0;
    for t in 0..20u64 {
        let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::stream(7, t));
        let config = ProjectionConfig {
            seed: t,
            ..ProjectionConfig::default()
        };
        let v = uniqueness_probe(&state, &pairs(), &config).unwrap();
        let all_home = v.runs.iter().all(|r| r.distance_to_target <= 1e-4);
        if v.verdict == OracleVerdict::Unique && all_home {
            good += 1;
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();
    report(
        7,
        "oracle UNIQUE on 3 qubits",
        good >= 19 && elapsed < 60.0,
        format!("{good}/20 in {elapsed:.1} s"),
    );
}

#[test]
fn criterion_08_oracle_negative_control() {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let signature = PartySignature::uniform(3, 2).unwrap();
    let ghz = AmplitudeTensor::ghz(signature.clone(), h, h).unwrap();
    let constraints = MarginalConstraintSet::from_state(&ghz.to_density(), &pairs()).unwrap();
    let v = uniqueness_probe(&ghz, &pairs(), &ProjectionConfig::default()).unwrap();
    let witness = v.witnesses.get(1).map(|w| w.matrix().clone());
    let witness_residual = witness
        .as_ref()
        .map_or(f64::INFINITY, |w| constraints.marginal_residual(w).unwrap());
    let distance = v.pairwise_distances.first().copied().unwrap_or(0.0);

    let mut mixture = CMatrix::zeros(8, 8);
    mixture[(0, 0)] = Complex64::new(0.5, 0.0);
    mixture[(7, 7)] = Complex64::new(0.5, 0.0);
    let mixture = DensityMatrix::new(signature, mixture).unwrap();
    let mixture_residual = constraints.marginal_residual(mixture.matrix()).unwrap();

    let pass =
        v.verdict == OracleVerdict::NonUnique && witness_residual < 1e-9 && distance >= 0.2 && mixture_residual < 1e-12;
    report(
        8,
        "GHZ is not fixed by its pair marginals",
        pass,
        format!(
            "{:?}, witness residual {witness_residual:.1e}, distance {distance:.3}, mixture residual {mixture_residual:.1e}",
            v.verdict
        ),
    );
}

#[test]
fn criterion_09_kernel_dimensions() {
    let three = constraint_nullspace(&PartySignature::uniform(3, 2).unwrap(), &pairs())
        .unwrap()
        .len();
    let two = constraint_nullspace(&PartySignature::uniform(2, 2).unwrap(), &[vec![0], vec![1]])
        .unwrap()
        .len();
    report(
        9,
        "constraint kernel dimensions",
        three == 27 && two == 9,
        format!("3 qubits/pairs {three}, 2 qubits/singletons {two}"),
    );
}

#[test]
fn criterion_10_linear_and_oracle_agree() {
    let signature = PartySignature::new(vec![4, 2, 2]).unwrap();
    let subsets = [vec![0, 1], vec![0, 2]];
    let mut conflicts = Vec::new();
    for t in 0..50u64 {
        let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::stream(10, t));
        let linear = check_linear_uniqueness(&state, DEFAULT_RANK_POLICY).unwrap();
        let config = ProjectionConfig {
            seed: t,
            ..ProjectionConfig::default()
        };
        let oracle = uniqueness_probe(&state, &subsets, &config).unwrap();
        if linear.is_unique() && oracle.verdict == OracleVerdict::NonUnique {
            conflicts.push(t);
        }
    }
    report(
        10,
        "no UNIQUE_LINEAR / NON_UNIQUE conflict",
        conflicts.is_empty(),
        format!("conflicting trials {conflicts:?}"),
    );
}

#[test]
fn criterion_11_classical_counterexample() {
    // first seeded flat-Dirichlet p for which epsilon = 0.05 stays inside the simplex
    let pair: CounterexamplePair = (0..1000u64)
        .find_map(
            |s| match counterexample_pair(3, 2, 0.05, &mut SeededRng::stream(11, s)) {
                Ok(pair) => Some(pair),
                Err(ClassicalError::EpsilonTooLarge { .. }) => None,
                Err(e) => panic!("{e}"),
            },
        )
        .expect("an admissible draw");
    let mut worst = 0.0f64;
    for keep in [[0, 1], [0, 2], [1, 2]] {
        let a = classical_marginal(&pair.p, &keep).unwrap();
        let b = classical_marginal(&pair.q, &keep).unwrap();
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            worst = worst.max((x - y).abs());
        }
    }
    let l1 = pair.p.l1_distance(&pair.q);
    // |Δ|_1 = 2^3 for the alternating ±1 deviation
    let floor = 0.05 * 8.0 * (1.0 - 1e-12);
    report(
        11,
        "classical counterexample",
        worst < 1e-14 && l1 >= floor,
        format!("marginal difference {worst:.1e}, L1 {l1:.6} >= {floor:.6}"),
    );
}

#[test]
fn criterion_12_reproduce_is_deterministic() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_qmarginals"))
            .args(["reproduce", "--seed", "12"])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        report.as_object_mut().unwrap().remove("timings_ms");
        serde_json::to_string(&report).unwrap()
    };
    let (first, second) = (run(), run());
    report(
        12,
        "reproduce payload is deterministic",
        first == second,
        format!("{} bytes", first.len()),
    );
}
