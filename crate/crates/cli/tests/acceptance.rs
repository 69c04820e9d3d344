//! Acceptance suite: one test per criterion. Each test prints a
//! `criterion N (...): PASS` line with its measured quantities (run with
//! `--nocapture` to see them) and enforces the stated tolerances — all
//! symbolic comparisons are exact, zero-tolerance coefficient equality.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srlnc_core::analysis::{
    full_rank_prob, full_rank_prob_at, p_in, partial_fraction_identity_check, rank_dist_nested,
    rank_dist_partial_fraction, rlnc_full, rlnc_step, BkwBound,
};
use srlnc_core::field::FieldSpec;
use srlnc_core::linalg::{enumerate_full_rank, FqMatrix, DEFAULT_ENUM_BUDGET};
use srlnc_core::oracle::{oracle_full_rank_poly, DEFAULT_ORACLE_BUDGET};
use srlnc_core::sim::{run_trials, ReceptionMode, SimConfig};
use srlnc_core::symbolic::{rat, RationalFn, RationalPoly};

fn field(q: u64) -> Arc<FieldSpec> {
    FieldSpec::new(q).unwrap()
}

/// The oracle-equivalence grid: q in {2,3}, 1 <= n <= 3, n <= m <= n+2,
/// restricted to q^(mn) <= 2^20.
fn equivalence_grid() -> Vec<(u64, usize, usize)> {
    let mut grid = Vec::new();
    for q in [2u64, 3] {
        for n in 1..=3usize {
            for m in n..=n + 2 {
                let domain = (q as u128).pow((m * n) as u32);
                if domain <= 1 << 20 {
                    grid.push((q, n, m));
                }
            }
        }
    }
    grid
}

#[test]
fn criterion_01_worked_example_polynomial_exact() {
    let start = Instant::now();
    let prob = full_rank_prob(3, 3, &field(2), DEFAULT_ENUM_BUDGET).unwrap();
    let expected = RationalPoly::from_coeffs(
        [0i64, 0, 18, -90, 234, -414, 492, -360, 144, -24]
            .iter()
            .map(|&c| rat(c, 1))
            .collect(),
    );
    assert!(prob.expr.is_polynomial());
    assert_eq!(prob.expr.num(), &expected, "coefficient-for-coefficient");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1 (worked-example polynomial, exact coefficients): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_02_worked_example_census() {
    let start = Instant::now();
    let census = oracle_full_rank_poly(&field(2), 3, 3, DEFAULT_ORACLE_BUDGET).unwrap();
    assert_eq!(census.census, vec![0, 0, 0, 6, 36, 72, 36, 18, 0, 0]);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 2 (full-rank weight census 6/36/72/36/18): PASS in {elapsed:?}");
}

#[test]
fn criterion_03_oracle_equivalence_grid() {
    let start = Instant::now();
    let grid = equivalence_grid();
    assert_eq!(grid.len(), 17, "9 cases for q=2 plus 8 for q=3");
    for &(q, n, m) in &grid {
        let f = field(q);
        let formula = full_rank_prob(m, n, &f, DEFAULT_ENUM_BUDGET).unwrap();
        let oracle = oracle_full_rank_poly(&f, m, n, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(
            formula.expr,
            RationalFn::from_poly(oracle.poly),
            "q={q} n={n} m={m}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!(
        "criterion 3 (formula == brute force on {} grid cases, zero tolerance): PASS in {elapsed:?}",
        grid.len()
    );
}

#[test]
fn criterion_04_uniform_sparsity_collapse() {
    let start = Instant::now();
    let mut checked = 0;
    for &(q, n, m) in &equivalence_grid() {
        let f = field(q);
        let p0 = rat(1, q as i64);
        // Every dependency probability computed for this grid case, in
        // both the column (ambient m) and row (ambient n) dimensions.
        for i in 0..n {
            assert_eq!(
                p_in(i, m, &f, DEFAULT_ENUM_BUDGET).unwrap().eval(&p0).unwrap(),
                rlnc_step(f.q(), i, m),
                "p({i},{m}) at 1/{q}"
            );
            assert_eq!(
                p_in(i, n, &f, DEFAULT_ENUM_BUDGET).unwrap().eval(&p0).unwrap(),
                rlnc_step(f.q(), i, n),
                "p({i},{n}) at 1/{q}"
            );
            checked += 2;
        }
        assert_eq!(
            full_rank_prob(m, n, &f, DEFAULT_ENUM_BUDGET)
                .unwrap()
                .eval(&p0)
                .unwrap(),
            rlnc_full(f.q(), m, n),
            "P {m}x{n} at 1/{q}"
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 4 (uniform-coefficient collapse, {checked} exact equalities): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_05_upper_bound_dominates() {
    let start = Instant::now();
    let mut checked = 0;
    for &(q, n, m) in &equivalence_grid() {
        let f = field(q);
        for i in 0..n {
            for ambient in [m, n] {
                if i >= ambient {
                    continue;
                }
                let p = p_in(i, ambient, &f, DEFAULT_ENUM_BUDGET).unwrap();
                let bound = BkwBound::new(f.q(), i, ambient).unwrap();
                for k in 1..=19 {
                    let p0 = rat(k, 20);
                    let exact = p.eval(&p0).unwrap();
                    let cap = bound.eval(&p0);
                    assert!(
                        exact <= cap,
                        "p({i},{ambient}) over F_{q} at {k}/20: {exact} > {cap}"
                    );
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 5 (classical bound dominates at {checked} grid points, exact comparison): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_06_closed_forms_agree() {
    let start = Instant::now();
    let f2 = field(2);
    let points = [rat(1, 4), rat(1, 2), rat(3, 4)];
    for m in 3..=5usize {
        let nested = rank_dist_nested(m, 3, &f2, DEFAULT_ENUM_BUDGET).unwrap();
        for p0 in &points {
            let nested_values = nested.eval(p0).unwrap();
            let pf = rank_dist_partial_fraction(m, 3, &f2, DEFAULT_ENUM_BUDGET, p0).unwrap();
            assert_eq!(nested_values, pf.probs, "m={m} p0={p0}");
            let total_nested: BigRational = nested_values.iter().cloned().sum();
            let total_pf: BigRational = pf.probs.iter().cloned().sum();
            assert!(total_nested.is_one(), "nested sum at m={m} p0={p0}");
            assert!(total_pf.is_one(), "pf sum at m={m} p0={p0}");
        }
    }

    // The alternant identity on 100 random tuples of distinct rationals.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..100u64 {
        let len = 2 + (round as usize % 6); // tuple sizes 2..=7, exponents n = 1..=6
        let mut points = std::collections::BTreeSet::new();
        while points.len() < len {
            points.insert(rat(rng.gen_range(-60i64..=60), rng.gen_range(1i64..=9)));
        }
        let xs: Vec<BigRational> = points.into_iter().collect();
        let n = xs.len() - 1;
        let expected = if n.is_multiple_of(2) { rat(1, 1) } else { rat(-1, 1) };
        assert_eq!(
            partial_fraction_identity_check(&xs).unwrap(),
            expected,
            "round {round}"
        );
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 6 (nested == partial-fraction at 9 (m,p0) pairs; sums exactly 1; alternant identity on 100 tuples): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_07_membership_criterion_exhaustive_and_random() {
    let start = Instant::now();
    let f2 = field(2);
    let mut exhaustive_checked = 0u64;
    for n in 1..=5usize {
        for i in 1..=3.min(n) {
            for a in enumerate_full_rank(f2.clone(), i, n, DEFAULT_ENUM_BUDGET).unwrap() {
                let d = a.column_basis_decompose().unwrap();
                for h_bits in 0..(1u32 << n) {
                    let h: Vec<_> = (0..n)
                        .map(|c| f2.element(((h_bits >> c) & 1) as u64).unwrap())
                        .collect();
                    let h_row = FqMatrix::from_rows(
                        f2.clone(),
                        &[h.iter().map(|e| e.value() as u64).collect()],
                    )
                    .unwrap();
                    let by_rank = a.stack(&h_row).unwrap().rank() == i;
                    let by_criterion = d.membership_criterion(&h).unwrap();
                    assert_eq!(by_criterion, by_rank, "A={a:?} h_bits={h_bits:#b}");
                    exhaustive_checked += 1;
                }
            }
        }
    }

    let f3 = field(3);
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut random_checked = 0u64;
    while random_checked < 10_000 {
        let i = rng.gen_range(1..=3usize);
        let n = rng.gen_range(i.max(2)..=5usize);
        let rows: Vec<Vec<u64>> = (0..i)
            .map(|_| (0..n).map(|_| rng.gen_range(0..3u64)).collect())
            .collect();
        let a = FqMatrix::from_rows(f3.clone(), &rows).unwrap();
        if a.rank() != i {
            continue;
        }
        let d = a.column_basis_decompose().unwrap();
        let h_values: Vec<u64> = (0..n).map(|_| rng.gen_range(0..3u64)).collect();
        let h: Vec<_> = h_values.iter().map(|&v| f3.element(v).unwrap()).collect();
        let h_row = FqMatrix::from_rows(f3.clone(), &[h_values]).unwrap();
        let by_rank = a.stack(&h_row).unwrap().rank() == i;
        assert_eq!(d.membership_criterion(&h).unwrap(), by_rank);
        random_checked += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 7 (membership criterion: {exhaustive_checked} exhaustive F_2 pairs + {random_checked} random F_3 instances, zero mismatches): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_08_monte_carlo_within_four_sigma() {
    let start = Instant::now();
    let f2 = field(2);
    for (p0, seed) in [(rat(1, 2), 20240801u64), (rat(7, 10), 20240802u64)] {
        let exact = full_rank_prob_at(6, 4, &f2, DEFAULT_ENUM_BUDGET, &p0)
            .unwrap()
            .to_f64()
            .unwrap();
        let cfg = SimConfig {
            q: 2,
            n: 4,
            l: 4,
            p0: p0.clone(),
            mode: ReceptionMode::FixedM { m: 6 },
            trials: 100_000,
            seed,
            include_zero_vectors: true,
        };
        let report = run_trials(&cfg).unwrap();
        let sigma = (exact * (1.0 - exact) / cfg.trials as f64).sqrt();
        let deviation = (report.empirical_success_rate - exact).abs();
        assert!(
            deviation <= 4.0 * sigma,
            "p0={p0}: empirical {} vs exact {exact}, |diff| {deviation} > 4 sigma {}",
            report.empirical_success_rate,
            4.0 * sigma
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 8 (100k-trial Monte Carlo within 4 standard errors at p0 = 1/2 and 7/10): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_09_product_telescopes_to_polynomial() {
    let start = Instant::now();
    let grid = equivalence_grid();
    for &(q, n, m) in &grid {
        let prob = full_rank_prob(m, n, &field(q), DEFAULT_ENUM_BUDGET).unwrap();
        assert!(
            prob.expr.is_polynomial(),
            "q={q} n={n} m={m}: denominator {:?}",
            prob.expr.den()
        );
        assert_eq!(prob.expr.den(), &RationalPoly::one());
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 9 (rational-factor product normalizes to denominator 1 on {} cases): PASS in {elapsed:?}",
        grid.len()
    );
}

#[test]
fn criterion_10_cli_invocations_are_byte_identical() {
    let start = Instant::now();
    let invocations: [&[&str]; 6] = [
        &["exact", "--q", "2", "--n", "3", "--m", "3", "--symbolic"],
        &["exact", "--q", "2", "--n", "3", "--m", "4", "--p0", "7/10", "--format", "json"],
        &["rankdist", "--q", "2", "--n", "3", "--m", "4", "--p0", "1/2", "--form", "pf", "--format", "json"],
        &["simulate", "--q", "2", "--n", "3", "--m", "4", "--p0", "7/10", "--trials", "3000", "--seed", "9", "--format", "json"],
        &["sweep", "--q", "2", "--n", "2", "--m-max", "4"],
        &["oracle", "--q", "2", "--n", "2", "--m", "3", "--format", "json"],
    ];
    for args in invocations {
        let run = || {
            let out = Command::new(env!("CARGO_BIN_EXE_srlnc"))
                .args(args)
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "{args:?}");
            out.stdout
        };
        assert_eq!(run(), run(), "outputs differ for {args:?}");
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 10 (byte-identical repeated CLI runs across {} invocations): PASS in {elapsed:?}",
        invocations.len()
    );
}
