//! Independent brute-force ground truth: exhaustive enumeration of all
//! matrices over `F_q` with their sparse weight measures, yielding exact
//! full-rank probabilities, rank distributions, and the dependency
//! probability `p(i,n)` straight from its definition.
//!
//! This module deliberately has its own rank routine and its own weight
//! measure construction; it shares nothing with the formula engine beyond
//! the finite-field primitives, so agreement between the two is evidence,
//! not tautology.

use std::sync::Arc;

use thiserror::Error;

use crate::field::FieldSpec;
use crate::linalg::{decode_lex_index, enumeration_domain_size};
use crate::symbolic::{rat, RationalFn, RationalPoly, SymbolicError};

/// Default cap on `q^(rows*cols)`, the number of matrices the oracle scans.
pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 24;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: needs {required} matrices, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Row echelon elimination working right-to-left across columns, with no
/// pivot normalization and no back substitution. Same rank as any other
/// elimination order, but structurally unrelated to the engine under test.
fn oracle_rank(field: &FieldSpec, data: &mut [u16], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in (0..cols).rev() {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                data.swap(rank * cols + j, pivot * cols + j);
            }
        }
        let pivot_val = data[rank * cols + col];
        for r in rank + 1..rows {
            let val = data[r * cols + col];
            if val == 0 {
                continue;
            }
            let factor = field
                .div_raw(val, pivot_val)
                .expect("pivot entry is nonzero");
            for j in 0..cols {
                let delta = field.mul_raw(factor, data[rank * cols + j]);
                data[r * cols + j] = field.sub_raw(data[r * cols + j], delta);
            }
        }
        rank += 1;
    }
    rank
}

/// The oracle's own weight measure: `p0^(total-w) * ((1-p0)/(q-1))^w` as a
/// polynomial in `p0`.
fn measure_poly(q: u16, total: usize, weight: usize) -> RationalPoly {
    let one_minus_p0 = RationalPoly::from_coeffs(vec![rat(1, 1), rat(-1, 1)]);
    one_minus_p0
        .pow(weight)
        .scale(&rat(1, (q as i64 - 1).max(1)).pow(weight as i32))
        .shift_up(total - weight)
}

/// Measure polynomials for every weight `0..=total`, indexed by weight.
fn measure_table(q: u16, total: usize) -> Vec<RationalPoly> {
    (0..=total).map(|w| measure_poly(q, total, w)).collect()
}

fn check_budget(q: u16, rows: usize, cols: usize, budget: u128) -> Result<u128, OracleError> {
    let domain = enumeration_domain_size(q, rows, cols).unwrap_or(u128::MAX);
    if domain > budget {
        return Err(OracleError::BudgetExceeded {
            required: domain,
            budget,
        });
    }
    Ok(domain)
}

/// Exact full-column-rank probability of a random `m x n` matrix with
/// i.i.d. sparse entries, together with the per-weight census of
/// full-rank matrices.
#[derive(Debug, Clone)]
pub struct FullRankCensus {
    /// `census[w]` counts the full-rank matrices of weight `w`.
    pub census: Vec<u64>,
    /// The probability polynomial: sum of measures over the census.
    pub poly: RationalPoly,
}

/// Enumerate every `m x n` matrix over `F_q` and sum the weight measures of
/// those with rank `n` (full column rank; callers use `m >= n`).
pub fn oracle_full_rank_poly(
    field: &Arc<FieldSpec>,
    m: usize,
    n: usize,
    budget: u128,
) -> Result<FullRankCensus, OracleError> {
    let domain = check_budget(field.q(), m, n, budget)?;
    let total = m * n;
    let mut census = vec![0u64; total + 1];
    let mut entries = vec![0u16; total];
    let mut scratch = vec![0u16; total];
    for idx in 0..domain {
        decode_lex_index(field.q(), idx, &mut entries);
        scratch.copy_from_slice(&entries);
        if oracle_rank(field, &mut scratch, m, n) == n {
            let weight = entries.iter().filter(|&&v| v != 0).count();
            census[weight] += 1;
        }
    }
    let measures = measure_table(field.q(), total);
    let mut poly = RationalPoly::zero();
    for (w, &count) in census.iter().enumerate() {
        if count > 0 {
            poly = poly.add(&measures[w].scale(&rat(count as i64, 1)));
        }
    }
    Ok(FullRankCensus { census, poly })
}

/// Exact rank distribution of a random `m x n` matrix: one probability
/// polynomial per rank `0..=n`. The polynomials sum to 1 identically and
/// the rank-`n` entry equals [`oracle_full_rank_poly`].
pub fn oracle_rank_census(
    field: &Arc<FieldSpec>,
    m: usize,
    n: usize,
    budget: u128,
) -> Result<Vec<RationalPoly>, OracleError> {
    let domain = check_budget(field.q(), m, n, budget)?;
    let total = m * n;
    let mut counts = vec![vec![0u64; total + 1]; n + 1];
    let mut entries = vec![0u16; total];
    let mut scratch = vec![0u16; total];
    for idx in 0..domain {
        decode_lex_index(field.q(), idx, &mut entries);
        scratch.copy_from_slice(&entries);
        let rank = oracle_rank(field, &mut scratch, m, n);
        let weight = entries.iter().filter(|&&v| v != 0).count();
        counts[rank][weight] += 1;
    }
    let measures = measure_table(field.q(), total);
    Ok(counts
        .into_iter()
        .map(|per_weight| {
            let mut poly = RationalPoly::zero();
            for (w, &count) in per_weight.iter().enumerate() {
                if count > 0 {
                    poly = poly.add(&measures[w].scale(&rat(count as i64, 1)));
                }
            }
            poly
        })
        .collect())
}

/// The dependency probability `p(i,n)` by definition: the measure-weighted
/// fraction of pairs (full-row-rank `A`, vector `h` in the row space of
/// `A`), with membership decided by an independent rank computation rather
/// than the basis-change criterion.
pub fn oracle_p_in(
    field: &Arc<FieldSpec>,
    i: usize,
    n: usize,
    budget: u128,
) -> Result<RationalFn, OracleError> {
    if i == 0 {
        // The row space of an empty matrix is {0}, and Pr{h = 0} = p0^n.
        return Ok(RationalFn::from_poly(measure_poly(field.q(), n, 0)));
    }
    let domain = check_budget(field.q(), i, n, budget)?;
    let vector_domain = enumeration_domain_size(field.q(), 1, n).expect("small power");
    let total = i * n;
    // Joint census over (weight of A, weight of member h); denominators
    // only need the marginal over A.
    let mut joint = vec![vec![0u64; n + 1]; total + 1];
    let mut marginal = vec![0u64; total + 1];
    let mut a_entries = vec![0u16; total];
    let mut scratch = vec![0u16; total];
    let mut stacked = vec![0u16; total + n];
    for idx in 0..domain {
        decode_lex_index(field.q(), idx, &mut a_entries);
        scratch.copy_from_slice(&a_entries);
        if oracle_rank(field, &mut scratch, i, n) != i {
            continue;
        }
        let weight_a = a_entries.iter().filter(|&&v| v != 0).count();
        marginal[weight_a] += 1;
        for h_idx in 0..vector_domain {
            stacked[..total].copy_from_slice(&a_entries);
            decode_lex_index(field.q(), h_idx, &mut stacked[total..]);
            let weight_h = stacked[total..].iter().filter(|&&v| v != 0).count();
            if oracle_rank(field, &mut stacked, i + 1, n) == i {
                joint[weight_a][weight_h] += 1;
            }
        }
    }
    let measures_a = measure_table(field.q(), total);
    let measures_h = measure_table(field.q(), n);
    let mut num = RationalPoly::zero();
    let mut den = RationalPoly::zero();
    for (wa, row) in joint.iter().enumerate() {
        if marginal[wa] > 0 {
            den = den.add(&measures_a[wa].scale(&rat(marginal[wa] as i64, 1)));
        }
        for (wh, &count) in row.iter().enumerate() {
            if count > 0 {
                let term = measures_a[wa].mul(&measures_h[wh]);
                num = num.add(&term.scale(&rat(count as i64, 1)));
            }
        }
    }
    Ok(RationalFn::new(num, den)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Arc<FieldSpec> {
        FieldSpec::new(q).unwrap()
    }

    fn int_poly(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::from_coeffs(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    /// p(1,3) over F_2 in the closed form worked out by hand:
    /// p0^3 + (3p0^4(1-p0)^2 + 3p0^2(1-p0)^4 + (1-p0)^6) / (1 - p0^3).
    fn p13_reference() -> RationalFn {
        let p0 = RationalPoly::p0();
        let omp = int_poly(&[1, -1]);
        let num = p0
            .pow(4)
            .scale(&rat(3, 1))
            .mul(&omp.pow(2))
            .add(&p0.pow(2).scale(&rat(3, 1)).mul(&omp.pow(4)))
            .add(&omp.pow(6));
        let den = int_poly(&[1, 0, 0, -1]);
        RationalFn::from_poly(p0.pow(3)).add(&RationalFn::new(num, den).unwrap())
    }

    /// p(2,3) over F_2: p0^3 plus a degree-9 numerator over
    /// -6p0^6 + 24p0^5 - 36p0^4 + 30p0^3 - 18p0^2 + 6p0.
    fn p23_reference() -> RationalFn {
        let p0 = RationalPoly::p0();
        let omp = int_poly(&[1, -1]);
        let terms: [(i64, usize, usize); 6] = [
            (12, 6, 3),
            (36, 5, 4),
            (24, 4, 5),
            (36, 3, 6),
            (12, 2, 7),
            (6, 1, 8),
        ];
        let mut num = RationalPoly::zero();
        for (c, dp, dq) in terms {
            num = num.add(&p0.pow(dp).scale(&rat(c, 1)).mul(&omp.pow(dq)));
        }
        let den = int_poly(&[0, 6, -18, 30, -36, 24, -6]);
        RationalFn::from_poly(p0.pow(3)).add(&RationalFn::new(num, den).unwrap())
    }

    #[test]
    fn full_rank_census_matches_hand_counts() {
        let f2 = f(2);
        let result = oracle_full_rank_poly(&f2, 3, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(result.census, vec![0, 0, 0, 6, 36, 72, 36, 18, 0, 0]);

        let single = oracle_full_rank_poly(&f2, 1, 1, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(single.poly, int_poly(&[1, -1])); // 1 - p0

        let tall = oracle_full_rank_poly(&f2, 2, 1, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(tall.poly, int_poly(&[1, 0, -1])); // 1 - p0^2
    }

    #[test]
    fn full_rank_poly_value_at_one_half() {
        // Every 3x3 binary matrix has measure 2^-9 at p0 = 1/2, and 168 of
        // the 512 are invertible.
        let f2 = f(2);
        let result = oracle_full_rank_poly(&f2, 3, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(result.census.iter().sum::<u64>(), 168);
        assert_eq!(result.poly.eval(&rat(1, 2)), rat(21, 64));
    }

    #[test]
    fn measure_sums_to_one_over_all_matrices() {
        // The measure is a probability mass function over all matrices.
        for q in [2u64, 3] {
            let field = f(q);
            let n = 2;
            let m = 2;
            let domain = enumeration_domain_size(field.q(), m, n).unwrap();
            let measures = measure_table(field.q(), m * n);
            let mut entries = vec![0u16; m * n];
            let mut sum = RationalPoly::zero();
            for idx in 0..domain {
                decode_lex_index(field.q(), idx, &mut entries);
                let w = entries.iter().filter(|&&v| v != 0).count();
                sum = sum.add(&measures[w]);
            }
            assert_eq!(sum, RationalPoly::one(), "q = {q}");
        }
    }

    #[test]
    fn rank_census_trivial_and_small() {
        let f2 = f(2);
        let census = oracle_rank_census(&f2, 1, 1, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(census.len(), 2);
        assert_eq!(census[0], int_poly(&[0, 1])); // p0
        assert_eq!(census[1], int_poly(&[1, -1])); // 1 - p0

        let census = oracle_rank_census(&f2, 2, 2, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(census.len(), 3);
        let sum = census
            .iter()
            .fold(RationalPoly::zero(), |acc, p| acc.add(p));
        assert_eq!(sum, RationalPoly::one());

        let full = oracle_full_rank_poly(&f2, 2, 2, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(census[2], full.poly);
    }

    #[test]
    fn rank_census_sums_to_one_q3() {
        let f3 = f(3);
        let census = oracle_rank_census(&f3, 2, 2, DEFAULT_ORACLE_BUDGET).unwrap();
        let sum = census
            .iter()
            .fold(RationalPoly::zero(), |acc, p| acc.add(p));
        assert_eq!(sum, RationalPoly::one());
    }

    #[test]
    fn p_in_base_case_is_p0_to_the_n() {
        for q in [2u64, 3] {
            let field = f(q);
            let p = oracle_p_in(&field, 0, 3, DEFAULT_ORACLE_BUDGET).unwrap();
            assert_eq!(p, RationalFn::from_poly(RationalPoly::p0().pow(3)));
        }
    }

    #[test]
    fn p_in_matches_worked_example_i1() {
        let f2 = f(2);
        let p = oracle_p_in(&f2, 1, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(p, p13_reference());
    }

    #[test]
    fn p_in_matches_worked_example_i2() {
        let f2 = f(2);
        let p = oracle_p_in(&f2, 2, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(p, p23_reference());
    }

    #[test]
    fn telescoping_consistency_on_tiny_instances() {
        // The full-rank polynomial of an m x n matrix equals the product of
        // (1 - p(i,m)) over i < n, column by column.
        let f2 = f(2);
        for (m, n) in [(2usize, 1usize), (2, 2), (3, 2)] {
            let direct = oracle_full_rank_poly(&f2, m, n, DEFAULT_ORACLE_BUDGET).unwrap();
            let mut product = RationalFn::one();
            for i in 0..n {
                let p = oracle_p_in(&f2, i, m, DEFAULT_ORACLE_BUDGET).unwrap();
                product = product.mul(&p.one_minus());
            }
            assert_eq!(product, RationalFn::from_poly(direct.poly), "m={m} n={n}");
        }
    }

    #[test]
    fn budget_errors_report_required_count() {
        let f2 = f(2);
        match oracle_full_rank_poly(&f2, 5, 5, DEFAULT_ORACLE_BUDGET) {
            Err(OracleError::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 1 << 25);
                assert_eq!(budget, DEFAULT_ORACLE_BUDGET);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
