//! Dense matrices over `F_q`: rank, reduced row echelon form, inversion,
//! weight, lexicographic enumeration of full-row-rank matrices, and the
//! column-basis decomposition `AQ = (A1, A2)` with `S = A1^-1 A2` that
//! yields the subspace-membership criterion.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};

/// Default cap on the number of candidate matrices an enumeration may scan.
pub const DEFAULT_ENUM_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not have full row rank")]
    NotFullRowRank,
    #[error("enumeration budget exceeded: needs {required} candidate matrices, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("cannot parse matrix literal: {0}")]
    Parse(String),
}

/// Dense row-major matrix over `F_q`. Immutable in all public operations;
/// every operation returns a fresh matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u16>,
    field: Arc<FieldSpec>,
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqMatrix[F_{}, {}x{}: {}]", self.field.q(), self.rows, self.cols, self.render())
    }
}

impl FqMatrix {
    pub fn zero(field: Arc<FieldSpec>, rows: usize, cols: usize) -> FqMatrix {
        FqMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(field: Arc<FieldSpec>, n: usize) -> FqMatrix {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from row-major element values, validating range.
    pub fn from_rows(field: Arc<FieldSpec>, rows: &[Vec<u64>]) -> Result<FqMatrix, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "ragged rows: expected {ncols} entries, found {}",
                    row.len()
                )));
            }
            for &v in row {
                data.push(field.element(v)?.value());
            }
        }
        Ok(FqMatrix {
            rows: nrows,
            cols: ncols,
            data,
            field,
        })
    }

    /// Parse the matrix literal format: rows separated by `;`, entries by
    /// whitespace, e.g. `"1 0 1; 0 1 1"`.
    pub fn parse(field: Arc<FieldSpec>, text: &str) -> Result<FqMatrix, LinalgError> {
        let mut rows = Vec::new();
        for row_text in text.split(';') {
            let row: Vec<u64> = row_text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>()
                        .map_err(|_| LinalgError::Parse(format!("bad entry {tok:?}")))
                })
                .collect::<Result<_, _>>()?;
            if row.is_empty() {
                return Err(LinalgError::Parse("empty row".into()));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(LinalgError::Parse("empty literal".into()));
        }
        Self::from_rows(field, &rows)
    }

    /// Render in the same literal format that [`FqMatrix::parse`] accepts.
    pub fn render(&self) -> String {
        (0..self.rows)
            .map(|r| {
                self.row_slice(r)
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.field
            .element(self.data[r * self.cols + c] as u64)
            .expect("stored entries are in range")
    }

    pub fn set(&mut self, r: usize, c: usize, value: FieldElement) -> Result<(), LinalgError> {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        if value.field_order() != self.field.q() {
            return Err(FieldError::MismatchedFields(value.field_order(), self.field.q()).into());
        }
        self.data[r * self.cols + c] = value.value();
        Ok(())
    }

    pub(crate) fn row_slice(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub(crate) fn data(&self) -> &[u16] {
        &self.data
    }

    pub(crate) fn from_raw(field: Arc<FieldSpec>, rows: usize, cols: usize, data: Vec<u16>) -> FqMatrix {
        debug_assert_eq!(data.len(), rows * cols);
        FqMatrix {
            rows,
            cols,
            data,
            field,
        }
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut data = vec![0u16; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        FqMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
            field: self.field.clone(),
        }
    }

    fn check_same_field(&self, other: &FqMatrix) -> Result<(), LinalgError> {
        if self.field.q() != other.field.q() {
            return Err(FieldError::MismatchedFields(self.field.q(), other.field.q()).into());
        }
        Ok(())
    }

    pub fn mul(&self, other: &FqMatrix) -> Result<FqMatrix, LinalgError> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut data = vec![0u16; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0 {
                    continue;
                }
                let other_row = other.row_slice(k);
                let out = &mut data[r * other.cols..(r + 1) * other.cols];
                for (o, &b) in out.iter_mut().zip(other_row) {
                    *o = f.add_raw(*o, f.mul_raw(a, b));
                }
            }
        }
        Ok(FqMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
            field: self.field.clone(),
        })
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &FqMatrix) -> Result<FqMatrix, LinalgError> {
        self.check_same_field(below)?;
        if self.cols != below.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "stacking {} columns onto {}",
                below.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(FqMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
            field: self.field.clone(),
        })
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        rref_in_place(&self.field, &mut work, self.rows, self.cols, &mut Vec::new())
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows
    }

    /// Reduced row echelon form together with the strictly increasing list
    /// of pivot columns. The row space is preserved; the result is the
    /// canonical representative of that row space.
    pub fn rref(&self) -> (FqMatrix, Vec<usize>) {
        let mut work = self.data.clone();
        let mut pivots = Vec::new();
        rref_in_place(&self.field, &mut work, self.rows, self.cols, &mut pivots);
        (
            FqMatrix {
                rows: self.rows,
                cols: self.cols,
                data: work,
                field: self.field.clone(),
            },
            pivots,
        )
    }

    pub fn invert(&self) -> Result<FqMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot invert {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        // Row-reduce the augmented matrix (self | I).
        let mut work = vec![0u16; n * 2 * n];
        for r in 0..n {
            work[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row_slice(r));
            work[r * 2 * n + n + r] = 1;
        }
        let mut pivots = Vec::new();
        rref_in_place(&self.field, &mut work, n, 2 * n, &mut pivots);
        if pivots.iter().take_while(|&&c| c < n).count() != n {
            return Err(LinalgError::Singular);
        }
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            data.extend_from_slice(&work[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(FqMatrix {
            rows: n,
            cols: n,
            data,
            field: self.field.clone(),
        })
    }

    /// Select the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> FqMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            let row = self.row_slice(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        FqMatrix {
            rows: self.rows,
            cols: cols.len(),
            data,
            field: self.field.clone(),
        }
    }

    /// Decompose onto a maximal linearly independent set of columns:
    /// the permutation `perm` moves the greedy-leftmost pivot columns to the
    /// front (preserving the relative order of both groups), `a1` is the
    /// resulting invertible leading block, `a2` the remainder, and
    /// `s = a1^-1 a2`.
    pub fn column_basis_decompose(&self) -> Result<ColumnBasisDecomposition, LinalgError> {
        if self.rows == 0 {
            return Err(LinalgError::NotFullRowRank);
        }
        let (_, pivot_cols) = self.rref();
        if pivot_cols.len() != self.rows {
            return Err(LinalgError::NotFullRowRank);
        }
        let non_pivots: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut perm = pivot_cols.clone();
        perm.extend_from_slice(&non_pivots);
        let a1 = self.select_cols(&pivot_cols);
        let a2 = self.select_cols(&non_pivots);
        let s = a1.invert()?.mul(&a2)?;
        Ok(ColumnBasisDecomposition {
            perm,
            pivot_cols,
            a1,
            a2,
            s,
        })
    }
}

/// The decomposition `AQ = (A1, A2)` of a full-row-rank matrix, where `Q`
/// permutes a maximal linearly independent set of columns to the front.
#[derive(Debug, Clone)]
pub struct ColumnBasisDecomposition {
    perm: Vec<usize>,
    pivot_cols: Vec<usize>,
    a1: FqMatrix,
    a2: FqMatrix,
    s: FqMatrix,
}

impl ColumnBasisDecomposition {
    /// Column permutation: position `j` of the permuted matrix holds
    /// original column `perm[j]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn a1(&self) -> &FqMatrix {
        &self.a1
    }

    pub fn a2(&self) -> &FqMatrix {
        &self.a2
    }

    pub fn s(&self) -> &FqMatrix {
        &self.s
    }

    /// True iff `h` lies in the row space of the decomposed matrix:
    /// after permuting `h` the same way, its trailing coordinates must equal
    /// its leading coordinates times `S`.
    pub fn membership_criterion(&self, h: &[FieldElement]) -> Result<bool, LinalgError> {
        let n = self.perm.len();
        let i = self.a1.rows();
        if h.len() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector length {} does not match {} columns",
                h.len(),
                n
            )));
        }
        let field = self.a1.field();
        let mut hq = Vec::with_capacity(n);
        for &col in &self.perm {
            if h[col].field_order() != field.q() {
                return Err(FieldError::MismatchedFields(h[col].field_order(), field.q()).into());
            }
            hq.push(h[col].value());
        }
        let head_times_s = row_times_matrix(field, &hq[..i], &self.s);
        Ok(hq[i..] == head_times_s[..])
    }
}

/// `row * M` for a raw row vector; row length must equal `M.rows()`.
pub(crate) fn row_times_matrix(field: &FieldSpec, row: &[u16], m: &FqMatrix) -> Vec<u16> {
    debug_assert_eq!(row.len(), m.rows());
    let mut out = vec![0u16; m.cols()];
    for (k, &a) in row.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (o, &b) in out.iter_mut().zip(m.row_slice(k)) {
            *o = field.add_raw(*o, field.mul_raw(a, b));
        }
    }
    out
}

/// In-place Gauss-Jordan elimination to reduced row echelon form.
/// Returns the rank; appends the pivot columns (strictly increasing).
pub(crate) fn rref_in_place(
    field: &FieldSpec,
    data: &mut [u16],
    rows: usize,
    cols: usize,
    pivots: &mut Vec<usize>,
) -> usize {
    pivots.clear();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Greedy leftmost pivot, scanning rows top-down.
        let Some(pivot_row) = (r..rows).find(|&pr| data[pr * cols + c] != 0) else {
            continue;
        };
        if pivot_row != r {
            for j in 0..cols {
                data.swap(r * cols + j, pivot_row * cols + j);
            }
        }
        let inv = field
            .inv_raw(data[r * cols + c])
            .expect("pivot entry is nonzero");
        if inv != 1 {
            for j in c..cols {
                data[r * cols + j] = field.mul_raw(data[r * cols + j], inv);
            }
        }
        for other in 0..rows {
            if other == r {
                continue;
            }
            let factor = data[other * cols + c];
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let delta = field.mul_raw(factor, data[r * cols + j]);
                data[other * cols + j] = field.sub_raw(data[other * cols + j], delta);
            }
        }
        pivots.push(c);
        r += 1;
    }
    r
}

/// Write the base-`q` digits of `idx` into `out`, most significant digit
/// first, so that numeric index order equals lexicographic order over
/// row-major entries.
pub(crate) fn decode_lex_index(q: u16, idx: u128, out: &mut [u16]) {
    let mut rest = idx;
    for slot in out.iter_mut().rev() {
        *slot = (rest % q as u128) as u16;
        rest /= q as u128;
    }
    debug_assert_eq!(rest, 0);
}

/// Total number of candidate matrices in the lexicographic enumeration
/// domain, `q^(rows*cols)`; `None` if it does not fit in a `u128`.
pub fn enumeration_domain_size(q: u16, rows: usize, cols: usize) -> Option<u128> {
    let exp = u32::try_from(rows.checked_mul(cols)?).ok()?;
    (q as u128).checked_pow(exp)
}

/// Number of full-row-rank `rows x cols` matrices over `F_q`:
/// the product of `(q^cols - q^j)` for `j < rows`.
pub fn full_rank_count(q: u16, rows: usize, cols: usize) -> Option<u128> {
    if rows > cols {
        return Some(0);
    }
    let qn = (q as u128).checked_pow(u32::try_from(cols).ok()?)?;
    let mut count: u128 = 1;
    let mut qj: u128 = 1;
    for _ in 0..rows {
        count = count.checked_mul(qn - qj)?;
        qj = qj.checked_mul(q as u128)?;
    }
    Some(count)
}

/// Iterator over every full-row-rank `rows x cols` matrix over `F_q` within
/// a lexicographic index range. Disjoint ranges partition the full
/// enumeration, so independent workers can consume them and combine
/// partial results associatively.
pub struct FullRankIter {
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    range: Range<u128>,
    buf: Vec<u16>,
    scratch: Vec<u16>,
}

impl FullRankIter {
    /// Current lexicographic position (start of the unconsumed range).
    pub fn position(&self) -> u128 {
        self.range.start
    }
}

impl Iterator for FullRankIter {
    type Item = FqMatrix;

    fn next(&mut self) -> Option<FqMatrix> {
        while self.range.start < self.range.end {
            let idx = self.range.start;
            self.range.start += 1;
            decode_lex_index(self.field.q(), idx, &mut self.buf);
            self.scratch.copy_from_slice(&self.buf);
            let rank = rref_in_place(
                &self.field,
                &mut self.scratch,
                self.rows,
                self.cols,
                &mut Vec::new(),
            );
            if rank == self.rows {
                return Some(FqMatrix::from_raw(
                    self.field.clone(),
                    self.rows,
                    self.cols,
                    self.buf.clone(),
                ));
            }
        }
        None
    }
}

/// Enumerate every full-row-rank `rows x cols` matrix over `F_q` exactly
/// once, in lexicographic order over row-major entry values. Fails upfront
/// if the scan domain `q^(rows*cols)` exceeds `budget`.
pub fn enumerate_full_rank(
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    budget: u128,
) -> Result<FullRankIter, LinalgError> {
    let domain = enumeration_domain_size(field.q(), rows, cols).unwrap_or(u128::MAX);
    if domain > budget {
        return Err(LinalgError::BudgetExceeded {
            required: domain,
            budget,
        });
    }
    Ok(FullRankIter {
        buf: vec![0; rows * cols],
        scratch: vec![0; rows * cols],
        field,
        rows,
        cols,
        range: 0..domain,
    })
}

/// The range-restricted enumeration used for partitioned consumption;
/// `range` indexes the lexicographic domain `[0, q^(rows*cols))`.
pub fn enumerate_full_rank_range(
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    range: Range<u128>,
) -> FullRankIter {
    FullRankIter {
        buf: vec![0; rows * cols],
        scratch: vec![0; rows * cols],
        field,
        rows,
        cols,
        range,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;

    fn f(q: u64) -> Arc<FieldSpec> {
        FieldSpec::new(q).unwrap()
    }

    fn random_matrix(field: &Arc<FieldSpec>, rows: usize, cols: usize, rng: &mut impl Rng) -> FqMatrix {
        let data: Vec<u16> = (0..rows * cols).map(|_| rng.gen_range(0..field.q())).collect();
        FqMatrix::from_raw(field.clone(), rows, cols, data)
    }

    #[test]
    fn rank_examples() {
        let f2 = f(2);
        assert_eq!(FqMatrix::zero(f2.clone(), 3, 3).rank(), 0);
        assert_eq!(FqMatrix::identity(f2, 3).rank(), 3);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let m = random_matrix(&f3, 4, 6, &mut rng);
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn rank_invariant_under_permutation_and_invertible_multiplication() {
        let f5 = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = random_matrix(&f5, 3, 4, &mut rng);
            let rank = m.rank();

            let mut rows: Vec<Vec<u64>> = (0..3)
                .map(|r| (0..4).map(|c| m.get(r, c).value() as u64).collect())
                .collect();
            // Rotate rows and swap two columns.
            rows.rotate_left(1);
            for row in &mut rows {
                row.swap(0, 3);
            }
            let shuffled = FqMatrix::from_rows(f5.clone(), &rows).unwrap();
            assert_eq!(shuffled.rank(), rank);

            let e = loop {
                let candidate = random_matrix(&f5, 3, 3, &mut rng);
                if candidate.rank() == 3 {
                    break candidate;
                }
            };
            assert_eq!(e.mul(&m).unwrap().rank(), rank);
        }
    }

    #[test]
    fn rref_examples() {
        let f2 = f(2);
        let id = FqMatrix::identity(f2.clone(), 3);
        let (r, pivots) = id.rref();
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1, 2]);

        let m = FqMatrix::parse(f2.clone(), "1 1; 1 1").unwrap();
        let (r, pivots) = m.rref();
        assert_eq!(r, FqMatrix::parse(f2, "1 1; 0 0").unwrap());
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_invariant_under_row_shuffle() {
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let m = random_matrix(&f3, 3, 5, &mut rng);
            let mut rows: Vec<Vec<u64>> = (0..3)
                .map(|r| (0..5).map(|c| m.get(r, c).value() as u64).collect())
                .collect();
            rows.rotate_right(1);
            rows.swap(0, 1);
            let shuffled = FqMatrix::from_rows(f3.clone(), &rows).unwrap();
            assert_eq!(m.rref(), shuffled.rref());
        }
    }

    #[test]
    fn invert_examples() {
        let f2 = f(2);
        let id = FqMatrix::identity(f2.clone(), 4);
        assert_eq!(id.invert().unwrap(), id);

        let m = FqMatrix::parse(f2.clone(), "1 1; 0 1").unwrap();
        assert_eq!(m.invert().unwrap(), m);

        assert!(matches!(
            FqMatrix::parse(f2, "1 1; 1 1").unwrap().invert(),
            Err(LinalgError::Singular)
        ));
    }

    #[test]
    fn invert_round_trip_random() {
        let f5 = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let id = FqMatrix::identity(f5.clone(), 3);
        let mut checked = 0;
        while checked < 1000 {
            let m = random_matrix(&f5, 3, 3, &mut rng);
            if m.rank() < 3 {
                continue;
            }
            assert_eq!(m.mul(&m.invert().unwrap()).unwrap(), id);
            checked += 1;
        }
    }

    #[test]
    fn weight_examples() {
        let f3 = f(3);
        assert_eq!(FqMatrix::zero(f3.clone(), 2, 5).weight(), 0);
        assert_eq!(FqMatrix::identity(f3.clone(), 4).weight(), 4);
        let all_ones = FqMatrix::from_rows(f3, &vec![vec![1; 3]; 3]).unwrap();
        assert_eq!(all_ones.weight(), 9);
    }

    #[test]
    fn decompose_identity_leading_block() {
        let f5 = f(5);
        let a = FqMatrix::parse(f5.clone(), "1 0 3 4; 0 1 2 2").unwrap();
        let d = a.column_basis_decompose().unwrap();
        assert_eq!(d.perm(), &[0, 1, 2, 3]);
        assert_eq!(d.pivot_cols(), &[0, 1]);
        // Leading block is the identity, so S is just the trailing block.
        assert_eq!(d.s(), &FqMatrix::parse(f5, "3 4; 2 2").unwrap());
    }

    #[test]
    fn decompose_skips_zero_column() {
        let f2 = f(2);
        let a = FqMatrix::parse(f2.clone(), "0 1 1").unwrap();
        let d = a.column_basis_decompose().unwrap();
        assert_eq!(d.pivot_cols(), &[1]);
        assert_eq!(d.perm(), &[1, 0, 2]);
        assert_eq!(d.s(), &FqMatrix::parse(f2, "0 1").unwrap());
    }

    #[test]
    fn decompose_rejects_rank_deficient() {
        let f2 = f(2);
        let a = FqMatrix::parse(f2, "1 1 0; 1 1 0").unwrap();
        assert!(matches!(
            a.column_basis_decompose(),
            Err(LinalgError::NotFullRowRank)
        ));
    }

    #[test]
    fn decompose_round_trip_reproduces_input() {
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 300 {
            let a = random_matrix(&f3, 2, 4, &mut rng);
            if a.rank() < 2 {
                continue;
            }
            let d = a.column_basis_decompose().unwrap();
            // a1 * s == a2, and un-permuting (a1 | a2) reproduces A.
            assert_eq!(&d.a1().mul(d.s()).unwrap(), d.a2());
            let mut rebuilt = FqMatrix::zero(f3.clone(), 2, 4);
            for (pos, &orig_col) in d.perm().iter().enumerate() {
                let source = if pos < 2 { d.a1() } else { d.a2() };
                let source_col = if pos < 2 { pos } else { pos - 2 };
                for r in 0..2 {
                    rebuilt.set(r, orig_col, source.get(r, source_col)).unwrap();
                }
            }
            assert_eq!(rebuilt, a);
            checked += 1;
        }
    }

    #[test]
    fn membership_trivial_cases() {
        let f2 = f(2);
        let a = FqMatrix::parse(f2.clone(), "1 0 1 1; 0 1 1 0").unwrap();
        let d = a.column_basis_decompose().unwrap();
        for r in 0..2 {
            let row: Vec<_> = (0..4).map(|c| a.get(r, c)).collect();
            assert!(d.membership_criterion(&row).unwrap());
        }
        let zero: Vec<_> = (0..4).map(|_| f2.zero()).collect();
        assert!(d.membership_criterion(&zero).unwrap());

        let short: Vec<_> = (0..3).map(|_| f2.one()).collect();
        assert!(d.membership_criterion(&short).is_err());
    }

    #[test]
    fn membership_matches_rank_oracle_exhaustively() {
        // Every full-row-rank 2x5 matrix over F_2, every vector h.
        let f2 = f(2);
        for a in enumerate_full_rank(f2.clone(), 2, 5, 1 << 20).unwrap() {
            let d = a.column_basis_decompose().unwrap();
            let rank_a = a.rank();
            for h_idx in 0..(1u128 << 5) {
                let mut h_raw = vec![0u16; 5];
                decode_lex_index(2, h_idx, &mut h_raw);
                let h_mat = FqMatrix::from_raw(f2.clone(), 1, 5, h_raw.clone());
                let h: Vec<_> = (0..5).map(|c| h_mat.get(0, c)).collect();
                let in_span = a.stack(&h_mat).unwrap().rank() == rank_a;
                assert_eq!(d.membership_criterion(&h).unwrap(), in_span);
            }
        }
    }

    #[test]
    fn enumerate_full_rank_small_cases() {
        let f2 = f(2);
        let all: Vec<_> = enumerate_full_rank(f2.clone(), 1, 1, 100).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].get(0, 0).value(), 1);

        let vectors: Vec<_> = enumerate_full_rank(f2.clone(), 1, 3, 100).unwrap().collect();
        assert_eq!(vectors.len(), 7);

        assert_eq!(enumerate_full_rank(f2, 3, 3, 1000).unwrap().count(), 168);
    }

    #[test]
    fn enumerate_full_rank_counts_match_formula() {
        for q in [2u64, 3] {
            let field = f(q);
            for cols in 1..=4usize {
                for rows in 1..=cols {
                    let expected = full_rank_count(field.q(), rows, cols).unwrap();
                    let domain = enumeration_domain_size(field.q(), rows, cols).unwrap();
                    // Consume in parallel partitions; counts combine associatively.
                    let chunk = (domain / 16).max(1);
                    let starts: Vec<u128> = (0..domain).step_by(chunk as usize).collect();
                    let counted: u128 = starts
                        .par_iter()
                        .map(|&start| {
                            enumerate_full_rank_range(
                                field.clone(),
                                rows,
                                cols,
                                start..domain.min(start + chunk),
                            )
                            .count() as u128
                        })
                        .sum();
                    assert_eq!(counted, expected, "q={q} rows={rows} cols={cols}");
                }
            }
        }
    }

    #[test]
    fn enumerate_order_is_lexicographic_and_duplicate_free() {
        let f3 = f(3);
        let matrices: Vec<_> = enumerate_full_rank(f3, 2, 2, 100).unwrap().collect();
        let mut keys: Vec<Vec<u16>> = matrices.iter().map(|m| m.data().to_vec()).collect();
        let sorted = {
            let mut s = keys.clone();
            s.sort();
            s
        };
        assert_eq!(keys, sorted, "lexicographic order");
        keys.dedup();
        assert_eq!(keys.len(), matrices.len(), "no duplicates");
    }

    #[test]
    fn enumerate_budget_exceeded() {
        let f2 = f(2);
        let err = match enumerate_full_rank(f2, 4, 7, DEFAULT_ENUM_BUDGET) {
            Err(e) => e,
            Ok(_) => panic!("expected budget error"),
        };
        match err {
            LinalgError::BudgetExceeded { required, budget } => {
                assert_eq!(required, 1 << 28);
                assert_eq!(budget, DEFAULT_ENUM_BUDGET);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn parse_render_round_trip() {
        let f7 = f(7);
        let m = FqMatrix::parse(f7.clone(), "1 0 6; 2 5 3").unwrap();
        assert_eq!(m.render(), "1 0 6; 2 5 3");
        assert_eq!(FqMatrix::parse(f7.clone(), &m.render()).unwrap(), m);

        assert!(FqMatrix::parse(f7.clone(), "1 0; 2").is_err());
        assert!(FqMatrix::parse(f7.clone(), "1 x").is_err());
        assert!(FqMatrix::parse(f7, "7 0").is_err());
    }

    #[test]
    fn mul_rejects_mismatched_shapes_and_fields() {
        let f2 = f(2);
        let f3 = f(3);
        let a = FqMatrix::identity(f2.clone(), 2);
        let b = FqMatrix::identity(f2, 3);
        assert!(matches!(a.mul(&b), Err(LinalgError::DimensionMismatch(_))));
        let c = FqMatrix::identity(f3, 2);
        assert!(a.mul(&c).is_err());
    }
}
