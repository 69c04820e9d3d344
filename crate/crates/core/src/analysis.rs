//! The exact probability formulas for sparse random matrices over `F_q`:
//! the weight measure of a realization, the dependency probability `p(i,n)`
//! of a fresh sparse vector against `i` independent sparse rows, the
//! full-column-rank probability as the product of `(1 - p(i,m))`, rank
//! distributions in nested-sum and partial-fraction closed forms, and the
//! RLNC / BKW reference expressions they collapse to.
//!
//! Everything here is symbolic-first: expressions are exact rational
//! functions in the sparsity `p0`, and evaluation is a separate step.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::FieldSpec;
use crate::linalg::{
    decode_lex_index, enumeration_domain_size, row_times_matrix, rref_in_place, FqMatrix,
    LinalgError,
};
use crate::symbolic::{rat, RationalFn, RationalPoly, SymbolicError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("enumeration budget exceeded: needs {required} candidate matrices, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("coincident dependency probabilities: {0}; use the nested-sum form instead")]
    CoincidentValues(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Which formula produced a probability expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaTag {
    Eq2,
    Eq3,
    Rlnc,
    Bkw,
    PartialFraction,
    NestedSum,
    Oracle,
}

impl FormulaTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaTag::Eq2 => "eq2",
            FormulaTag::Eq3 => "eq3",
            FormulaTag::Rlnc => "rlnc",
            FormulaTag::Bkw => "bkw",
            FormulaTag::PartialFraction => "partial_fraction",
            FormulaTag::NestedSum => "nested_sum",
            FormulaTag::Oracle => "oracle",
        }
    }
}

impl fmt::Display for FormulaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A probability as an exact rational function in `p0`, tagged with its
/// provenance and field order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbExpr {
    pub expr: RationalFn,
    pub q: u16,
    pub meta: FormulaTag,
}

impl ProbExpr {
    pub fn eval(&self, p0: &BigRational) -> Result<BigRational, AnalysisError> {
        Ok(self.expr.eval(p0)?)
    }
}

/// A full rank distribution: `probs[r]` is the probability that a random
/// `m x n` matrix has rank `r`.
#[derive(Debug, Clone)]
pub struct RankDistribution {
    pub q: u16,
    pub m: usize,
    pub n: usize,
    pub probs: Vec<ProbExpr>,
}

impl RankDistribution {
    pub fn eval(&self, p0: &BigRational) -> Result<Vec<BigRational>, AnalysisError> {
        self.probs.iter().map(|p| p.eval(p0)).collect()
    }
}

/// `p0^(total-w) * ((1-p0)/(q-1))^w`: the probability that i.i.d. sparse
/// entries realize a fixed value of weight `w` among `total` entries.
/// The constant `1/(q-1)^w` is folded into the coefficients, so the result
/// is a plain polynomial.
pub fn weight_measure(q: u16, total_entries: usize, weight: usize) -> RationalPoly {
    debug_assert!(weight <= total_entries);
    let one_minus_p0 = RationalPoly::from_coeffs(vec![rat(1, 1), rat(-1, 1)]);
    one_minus_p0
        .pow(weight)
        .scale(&rat(1, (q as i64 - 1).max(1)).pow(weight as i32))
        .shift_up(total_entries - weight)
}

/// Weight measure of a concrete matrix realization.
pub fn matrix_weight_measure(m: &FqMatrix) -> RationalPoly {
    weight_measure(m.field().q(), m.rows() * m.cols(), m.weight())
}

fn measure_table(q: u16, total: usize) -> Vec<RationalPoly> {
    (0..=total).map(|w| weight_measure(q, total, w)).collect()
}

/// The inner sum of the dependency probability for a fixed full-row-rank
/// matrix `C`, evaluated through the basis-change criterion: sum over all
/// coordinate vectors `z` of `wtm(z) * wtm(z * S)` with `S = C1^-1 C2`.
///
/// The value depends on `C` only through its row space, which is what makes
/// [`SpanSumCache`] sound; this direct route exists so tests can verify
/// that claim against the cached route.
pub fn span_weight_sum_direct(c: &FqMatrix) -> Result<RationalPoly, AnalysisError> {
    let field = c.field().clone();
    let i = c.rows();
    let n = c.cols();
    let decomposition = c.column_basis_decompose()?;
    let s = decomposition.s();
    let z_domain = enumeration_domain_size(field.q(), 1, i).expect("small power");
    let mut weight_counts = vec![0u64; n + 1];
    let mut z = vec![0u16; i];
    for idx in 0..z_domain {
        decode_lex_index(field.q(), idx, &mut z);
        let weight_z = z.iter().filter(|&&v| v != 0).count();
        let tail = row_times_matrix(&field, &z, s);
        let weight_tail = tail.iter().filter(|&&v| v != 0).count();
        // wtm_i(z) * wtm_{n-i}(zS) collapses to the full n-entry measure of
        // the row-space member with those coordinates.
        weight_counts[weight_z + weight_tail] += 1;
    }
    let measures = measure_table(field.q(), n);
    let mut sum = RationalPoly::zero();
    for (w, &count) in weight_counts.iter().enumerate() {
        if count > 0 {
            sum = sum.add(&measures[w].scale(&rat(count as i64, 1)));
        }
    }
    Ok(sum)
}

/// Memoized row-space weight sums, keyed by the reduced row echelon form
/// (the canonical representative of a row space). A hit returns the exact
/// same polynomial the direct computation would produce.
pub struct SpanSumCache {
    field: Arc<FieldSpec>,
    cols: usize,
    measures: Vec<RationalPoly>,
    map: HashMap<Vec<u16>, RationalPoly>,
}

impl SpanSumCache {
    pub fn new(field: Arc<FieldSpec>, cols: usize) -> SpanSumCache {
        SpanSumCache {
            measures: measure_table(field.q(), cols),
            field,
            cols,
            map: HashMap::new(),
        }
    }

    /// Number of distinct row spaces inserted so far.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Inner sum for a full-row-rank matrix `C`, memoized by `rref(C)`.
    pub fn span_weight_sum(&mut self, c: &FqMatrix) -> Result<RationalPoly, AnalysisError> {
        if c.cols() != self.cols || c.field().q() != self.field.q() {
            return Err(AnalysisError::InvalidParameters(
                "matrix does not match the cache's field or column count".into(),
            ));
        }
        let (rref, pivots) = c.rref();
        if pivots.len() != c.rows() {
            return Err(AnalysisError::Linalg(LinalgError::NotFullRowRank));
        }
        Ok(self.sum_for_rref(rref.data().to_vec(), c.rows()))
    }

    /// Row-space sum given an already-reduced basis: enumerate all
    /// `q^rows` combinations of the rref rows and add their measures.
    fn sum_for_rref(&mut self, key: Vec<u16>, rows: usize) -> RationalPoly {
        if let Some(hit) = self.map.get(&key) {
            return hit.clone();
        }
        let q = self.field.q();
        let z_domain = enumeration_domain_size(q, 1, rows).expect("small power");
        let mut weight_counts = vec![0u64; self.cols + 1];
        let mut z = vec![0u16; rows];
        let mut member = vec![0u16; self.cols];
        for idx in 0..z_domain {
            decode_lex_index(q, idx, &mut z);
            member.iter_mut().for_each(|v| *v = 0);
            for (row, &coeff) in z.iter().enumerate() {
                if coeff == 0 {
                    continue;
                }
                for (slot, &entry) in member
                    .iter_mut()
                    .zip(&key[row * self.cols..(row + 1) * self.cols])
                {
                    *slot = self.field.add_raw(*slot, self.field.mul_raw(coeff, entry));
                }
            }
            let weight = member.iter().filter(|&&v| v != 0).count();
            weight_counts[weight] += 1;
        }
        let mut sum = RationalPoly::zero();
        for (w, &count) in weight_counts.iter().enumerate() {
            if count > 0 {
                sum = sum.add(&self.measures[w].scale(&rat(count as i64, 1)));
            }
        }
        self.map.insert(key, sum.clone());
        sum
    }
}

/// Everything the dependency-probability computation learned along the way.
#[derive(Debug, Clone)]
pub struct PinDetail {
    pub expr: ProbExpr,
    /// Number of full-row-rank `i x n` matrices summed over.
    pub full_rank_matrices: u128,
    /// Number of distinct row spaces (inner sums actually computed).
    pub distinct_row_spaces: usize,
}

/// Exact probability that a fresh sparse random `n`-vector lies in the span
/// of `i` given linearly independent sparse rows, conditioned on their
/// independence. Requires `0 <= i <= n-1`.
pub fn p_in(
    i: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
) -> Result<ProbExpr, AnalysisError> {
    Ok(p_in_detailed(i, n, field, budget)?.expr)
}

/// As [`p_in`], also reporting enumeration and cache statistics.
pub fn p_in_detailed(
    i: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
) -> Result<PinDetail, AnalysisError> {
    if i >= n {
        return Err(AnalysisError::InvalidParameters(format!(
            "p(i,n) requires 0 <= i <= n-1, got i={i}, n={n}"
        )));
    }
    p_in_extended(i, n, field, budget)
}

/// The same computation extended to `i == n`, where the span is the whole
/// space and the probability is identically 1. The closed-form rank
/// distributions need that endpoint.
fn p_in_extended(
    i: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
) -> Result<PinDetail, AnalysisError> {
    let q = field.q();
    if i == 0 {
        // The condition is h = 0, which has probability p0^n.
        return Ok(PinDetail {
            expr: ProbExpr {
                expr: RationalFn::from_poly(weight_measure(q, n, 0)),
                q,
                meta: FormulaTag::Eq2,
            },
            full_rank_matrices: 1,
            distinct_row_spaces: 1,
        });
    }
    if i == n {
        return Ok(PinDetail {
            expr: ProbExpr {
                expr: RationalFn::one(),
                q,
                meta: FormulaTag::Eq2,
            },
            full_rank_matrices: 0,
            distinct_row_spaces: 0,
        });
    }
    let domain = enumeration_domain_size(q, i, n).unwrap_or(u128::MAX);
    if domain > budget {
        return Err(AnalysisError::BudgetExceeded {
            required: domain,
            budget,
        });
    }

    // One pass over all i x n matrices: group the full-row-rank ones by
    // their rref key and record a per-weight census for each group. The
    // numerator then needs one polynomial multiplication per distinct row
    // space instead of one per matrix.
    let total = i * n;
    let mut groups: HashMap<Vec<u16>, Vec<u64>> = HashMap::new();
    let mut entries = vec![0u16; total];
    let mut scratch = vec![0u16; total];
    let mut pivots = Vec::new();
    let mut full_rank_matrices = 0u128;
    for idx in 0..domain {
        decode_lex_index(q, idx, &mut entries);
        scratch.copy_from_slice(&entries);
        let rank = rref_in_place(field, &mut scratch, i, n, &mut pivots);
        if rank != i {
            continue;
        }
        full_rank_matrices += 1;
        let weight = entries.iter().filter(|&&v| v != 0).count();
        groups
            .entry(scratch.clone())
            .or_insert_with(|| vec![0u64; total + 1])[weight] += 1;
    }

    let measures = measure_table(q, total);
    let mut cache = SpanSumCache::new(field.clone(), n);
    let mut num = RationalPoly::zero();
    let mut den = RationalPoly::zero();
    for (key, weight_counts) in groups {
        let mut group_measure = RationalPoly::zero();
        for (w, &count) in weight_counts.iter().enumerate() {
            if count > 0 {
                group_measure = group_measure.add(&measures[w].scale(&rat(count as i64, 1)));
            }
        }
        let inner = cache.sum_for_rref(key, i);
        num = num.add(&group_measure.mul(&inner));
        den = den.add(&group_measure);
    }
    Ok(PinDetail {
        expr: ProbExpr {
            expr: RationalFn::new(num, den)?,
            q,
            meta: FormulaTag::Eq2,
        },
        full_rank_matrices,
        distinct_row_spaces: cache.len(),
    })
}

/// Exact probability that a random `m x n` sparse matrix has full column
/// rank: the product of `(1 - p(i,m))` over `i < n`. The product telescopes
/// exactly, so the canonical result is a polynomial.
pub fn full_rank_prob(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
) -> Result<ProbExpr, AnalysisError> {
    if m < n {
        return Err(AnalysisError::InvalidParameters(format!(
            "full rank probability requires m >= n, got m={m}, n={n}"
        )));
    }
    let mut product = RationalFn::one();
    for i in 0..n {
        let factor = p_in(i, m, field, budget)?.expr.one_minus();
        product = product.mul(&factor);
    }
    Ok(ProbExpr {
        expr: product,
        q: field.q(),
        meta: FormulaTag::Eq3,
    })
}

/// Point evaluation of the full-rank probability, computing factors in
/// ascending `i` and short-circuiting to 0 as soon as a factor vanishes.
/// At the degenerate sparsity endpoints the later factors condition on
/// events of probability zero; short-circuiting means those undefined
/// conditionals are never evaluated.
pub fn full_rank_prob_at(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
    p0: &BigRational,
) -> Result<BigRational, AnalysisError> {
    if m < n {
        return Err(AnalysisError::InvalidParameters(format!(
            "full rank probability requires m >= n, got m={m}, n={n}"
        )));
    }
    let mut product = BigRational::one();
    for i in 0..n {
        let factor = BigRational::one() - p_in(i, m, field, budget)?.eval(p0)?;
        if factor.is_zero() {
            return Ok(BigRational::zero());
        }
        product *= factor;
    }
    Ok(product)
}

/// Rank distribution in incremental rank steps, nested-sum closed form: the probability
/// of rank `r` is the product of the `r` rank-increasing steps times the
/// sum over all placements of the `m - r` rank-maintaining steps, each
/// maintain at current rank `i` weighted `p(i,n)`. The notationally
/// (m-r)-deep nested sum is evaluated by a suffix-sum dynamic program over
/// (remaining steps, current floor index).
///
/// This treats the received-row rank process as a Markov chain on the
/// current rank. The chain is genuinely memoryless for uniform
/// coefficients, so at `p0 = 1/q` the distribution is exact (it then also
/// matches brute-force enumeration); for sparser coefficients the history
/// of rank-maintaining rows tilts the row-space posterior and intermediate
/// ranks become a close approximation. The full-rank probability itself
/// should always be taken from [`full_rank_prob`], which is exact at every
/// sparsity.
pub fn rank_dist_nested(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
) -> Result<RankDistribution, AnalysisError> {
    if m < n {
        return Err(AnalysisError::InvalidParameters(format!(
            "rank distribution requires m >= n, got m={m}, n={n}"
        )));
    }
    let p: Vec<RationalFn> = (0..=n)
        .map(|i| Ok(p_in_extended(i, n, field, budget)?.expr.expr))
        .collect::<Result<_, AnalysisError>>()?;
    let mut probs = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut prefix = RationalFn::one();
        for pi in p.iter().take(r) {
            prefix = prefix.mul(&pi.one_minus());
        }
        // f_s(j) = sum over non-decreasing index sequences of length s,
        // starting at or above j and capped at r, of the product of p(i,n).
        let mut f: Vec<RationalFn> = vec![RationalFn::one(); r + 1];
        for _step in 0..m - r {
            let mut next = vec![RationalFn::zero(); r + 1];
            for j in (0..=r).rev() {
                let own = p[j].mul(&f[j]);
                next[j] = if j < r {
                    own.add(&next[j + 1])
                } else {
                    own
                };
            }
            f = next;
        }
        probs.push(ProbExpr {
            expr: prefix.mul(&f[0]),
            q: field.q(),
            meta: FormulaTag::NestedSum,
        });
    }
    Ok(RankDistribution {
        q: field.q(),
        m,
        n,
        probs,
    })
}

/// A rank distribution evaluated at one sparsity point.
#[derive(Debug, Clone)]
pub struct EvaluatedRankDistribution {
    pub q: u16,
    pub m: usize,
    pub n: usize,
    pub p0: BigRational,
    pub probs: Vec<BigRational>,
    pub meta: FormulaTag,
}

/// Rank distribution at one point via the partial-fraction closed form
/// (the eigendecomposition of the same rank-Markov chain that
/// [`rank_dist_nested`] walks), with `a_t = p(t-1, n)` evaluated at `p0`.
/// Agrees with the nested form exactly wherever it is defined; requires the
/// `a_t` to be pairwise distinct at the point, and coincidences are
/// detected and reported so the caller can fall back to the nested form.
pub fn rank_dist_partial_fraction(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: u128,
    p0: &BigRational,
) -> Result<EvaluatedRankDistribution, AnalysisError> {
    if m < n {
        return Err(AnalysisError::InvalidParameters(format!(
            "rank distribution requires m >= n, got m={m}, n={n}"
        )));
    }
    // a[t] = p(t, n) at p0 for t = 0..=n (so a[n] = 1).
    let a: Vec<BigRational> = (0..=n)
        .map(|i| p_in_extended(i, n, field, budget)?.expr.eval(p0))
        .collect::<Result<_, AnalysisError>>()?;
    for s in 0..a.len() {
        for t in s + 1..a.len() {
            if a[s] == a[t] {
                return Err(AnalysisError::CoincidentValues(format!(
                    "p({s},{n}) = p({t},{n}) = {} at p0 = {p0}",
                    a[s]
                )));
            }
        }
    }
    let mut probs = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut leading = BigRational::one();
        for at in a.iter().take(r) {
            leading *= at - BigRational::one();
        }
        let mut sum = BigRational::zero();
        for k in 0..=r {
            let mut denom = BigRational::one();
            for t in 0..=r {
                if t != k {
                    denom *= &a[t] - &a[k];
                }
            }
            sum += a[k].pow(m as i32) / denom;
        }
        probs.push(leading * sum);
    }
    Ok(EvaluatedRankDistribution {
        q: field.q(),
        m,
        n,
        p0: p0.clone(),
        probs,
        meta: FormulaTag::PartialFraction,
    })
}

/// The alternant identity behind the partial-fraction form: for pairwise
/// distinct `x_1..x_{n+1}`, the sum of `x_k^n / prod_{t != k} (x_t - x_k)`
/// equals `(-1)^n`.
pub fn partial_fraction_identity_check(
    xs: &[BigRational],
) -> Result<BigRational, AnalysisError> {
    if xs.is_empty() {
        return Err(AnalysisError::InvalidParameters(
            "need at least one point".into(),
        ));
    }
    for s in 0..xs.len() {
        for t in s + 1..xs.len() {
            if xs[s] == xs[t] {
                return Err(AnalysisError::CoincidentValues(format!(
                    "repeated point {}",
                    xs[s]
                )));
            }
        }
    }
    let n = xs.len() - 1;
    let mut sum = BigRational::zero();
    for k in 0..xs.len() {
        let mut denom = BigRational::one();
        for t in 0..xs.len() {
            if t != k {
                denom *= &xs[t] - &xs[k];
            }
        }
        sum += xs[k].pow(n as i32) / denom;
    }
    Ok(sum)
}

/// The classical upper bound on `p(i,n)`:
/// `max(p0, (1-p0)/(q-1))^(n-i)`. Piecewise in `p0`, so it is exposed as an
/// evaluation-only bound rather than a single polynomial.
#[derive(Debug, Clone, Copy)]
pub struct BkwBound {
    pub q: u16,
    pub i: usize,
    pub n: usize,
}

impl BkwBound {
    pub fn new(q: u16, i: usize, n: usize) -> Result<BkwBound, AnalysisError> {
        if i >= n {
            return Err(AnalysisError::InvalidParameters(format!(
                "bound requires 0 <= i <= n-1, got i={i}, n={n}"
            )));
        }
        Ok(BkwBound { q, i, n })
    }

    pub fn eval(&self, p0: &BigRational) -> BigRational {
        let alt = (BigRational::one() - p0) / rat(self.q as i64 - 1, 1);
        let base = if *p0 >= alt { p0.clone() } else { alt };
        base.pow((self.n - self.i) as i32)
    }
}

/// Uniform-coefficient (RLNC) reference values: the dependency probability
/// collapses to `(1/q)^(n-i)` at `p0 = 1/q`.
pub fn rlnc_step(q: u16, i: usize, n: usize) -> BigRational {
    rat(1, q as i64).pow((n - i) as i32)
}

/// Full-matrix RLNC reference: product of `(1 - (1/q)^(m-i))` over `i < n`.
pub fn rlnc_full(q: u16, m: usize, n: usize) -> BigRational {
    let mut product = BigRational::one();
    for i in 0..n {
        product *= BigRational::one() - rat(1, q as i64).pow((m - i) as i32);
    }
    product
}

/// Stable CSV schema for evaluated results.
pub const CSV_HEADER: &str = "q,n,m,i_or_r,p0,value,formula";

/// One evaluated probability, exportable as a CSV row. All numeric fields
/// are exact rational strings.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub q: u16,
    pub n: usize,
    pub m: Option<usize>,
    pub i_or_r: Option<usize>,
    pub p0: BigRational,
    pub value: BigRational,
    pub formula: FormulaTag,
}

impl EvalRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.q,
            self.n,
            self.m.map_or(String::new(), |m| m.to_string()),
            self.i_or_r.map_or(String::new(), |i| i.to_string()),
            self.p0,
            self.value,
            self.formula
        )
    }
}
