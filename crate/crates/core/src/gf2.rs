//! Vectors and sparse matrices over GF(2).
//!
//! [`BitVector`] keeps a sorted support list. [`SparseBitMatrix`] keeps sorted
//! row supports and lazily builds two derived views on first use: the column
//! adjacency (for multiplying sparse vectors) and a packed reduced row echelon
//! form (for rank, row-space membership and kernels). Matrices are immutable
//! once built, so the cached views never go stale.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

pub(crate) fn support_of_words(words: &[u64], len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let i = w * WORD_BITS + bits.trailing_zeros() as usize;
            if i < len {
                out.push(i);
            }
            bits &= bits - 1;
        }
    }
    out
}

/// A vector over GF(2) stored as the sorted list of its nonzero coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    support: Vec<usize>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            support: Vec::new(),
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            len,
            support: (0..len).collect(),
        }
    }

    /// Builds a vector from a strictly increasing support list.
    pub fn new(len: usize, support: Vec<usize>) -> Result<Self> {
        for pair in support.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::UnsortedSupport {
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::IndexOutOfRange { index: last, len });
            }
        }
        Ok(Self { len, support })
    }

    /// Builds a vector from arbitrary indices; repeated indices cancel in pairs.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        let mut support = Vec::with_capacity(idx.len());
        for i in idx {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
            if support.last() == Some(&i) {
                support.pop();
            } else {
                support.push(i);
            }
        }
        Ok(Self { len, support })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            len: bits.len(),
            support: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    pub(crate) fn from_words(words: &[u64], len: usize) -> Self {
        Self {
            len,
            support: support_of_words(words, len),
        }
    }

    pub(crate) fn from_sorted_unchecked(len: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|p| p[0] < p[1]));
        debug_assert!(support.last().is_none_or(|&l| l < len));
        Self { len, support }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn into_support(self) -> Vec<usize> {
        self.support
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        let mut out = vec![false; self.len];
        for &i in &self.support {
            out[i] = true;
        }
        out
    }

    pub fn to_words(&self) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.len)];
        for &i in &self.support {
            flip_bit(&mut out, i);
        }
        out
    }

    /// Sum over GF(2).
    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        let (a, b) = (&self.support, &other.support);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(BitVector {
            len: self.len,
            support: out,
        })
    }

    /// Size of the intersection of the two supports.
    pub fn overlap(&self, other: &BitVector) -> usize {
        let (a, b) = (&self.support, &other.support);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// Reduced row echelon form of a matrix, packed into 64-bit words.
#[derive(Clone, Debug)]
struct Echelon {
    words_per_row: usize,
    /// `rank` rows, row-major.
    rows: Vec<u64>,
    pivots: Vec<usize>,
    pivot_row_of_col: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl Echelon {
    fn row(&self, r: usize) -> &[u64] {
        &self.rows[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gaussian elimination over packed rows, in place. Returns the pivot
/// columns; afterwards the first `pivots.len()` rows are the echelon rows.
/// With `full` the form is fully reduced (zeros above every pivot too).
fn eliminate(words: &mut [u64], n_rows: usize, wpr: usize, n_cols: usize, full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    let mut scratch = vec![0u64; wpr];
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let w = col / WORD_BITS;
        let bit = 1u64 << (col % WORD_BITS);
        let Some(pr) = (rank..n_rows).find(|&r| words[r * wpr + w] & bit != 0) else {
            continue;
        };
        if pr != rank {
            for k in 0..wpr {
                words.swap(pr * wpr + k, rank * wpr + k);
            }
        }
        // Rows at or below `rank` vanish left of `col`, so XOR from word `w` on.
        scratch[w..].copy_from_slice(&words[rank * wpr + w..(rank + 1) * wpr]);
        let start = if full { 0 } else { rank + 1 };
        for r in start..n_rows {
            if r != rank && words[r * wpr + w] & bit != 0 {
                xor_into(&mut words[r * wpr + w..(r + 1) * wpr], &scratch[w..]);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// A sparse matrix over GF(2), stored by rows.
pub struct SparseBitMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
    columns: OnceLock<Vec<Vec<usize>>>,
    echelon: OnceLock<Echelon>,
}

impl Clone for SparseBitMatrix {
    fn clone(&self) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            rows: self.rows.clone(),
            columns: self.columns.clone(),
            echelon: self.echelon.clone(),
        }
    }
}

impl PartialEq for SparseBitMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.n_cols == other.n_cols && self.rows == other.rows
    }
}

impl Eq for SparseBitMatrix {}

impl fmt::Debug for SparseBitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseBitMatrix")
            .field("n_rows", &self.n_rows)
            .field("n_cols", &self.n_cols)
            .field("rows", &self.rows)
            .finish()
    }
}

impl SparseBitMatrix {
    /// Builds a matrix from row supports. Each row is sorted; a repeated
    /// index within a row is rejected.
    pub fn new(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut checked = Vec::with_capacity(rows.len());
        for mut row in rows {
            row.sort_unstable();
            let v = BitVector::new(n_cols, row)?;
            checked.push(v.into_support());
        }
        Ok(Self::from_rows_unchecked(n_cols, checked))
    }

    pub(crate) fn from_rows_unchecked(n_cols: usize, rows: Vec<Vec<usize>>) -> Self {
        Self {
            n_rows: rows.len(),
            n_cols,
            rows,
            columns: OnceLock::new(),
            echelon: OnceLock::new(),
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_rows_unchecked(n_cols, vec![Vec::new(); n_rows])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows_unchecked(n, (0..n).map(|i| vec![i]).collect())
    }

    pub fn from_dense(dense: &[Vec<bool>], n_cols: usize) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|r| {
                if r.len() != n_cols {
                    return Err(Error::DimensionMismatch {
                        expected: n_cols,
                        found: r.len(),
                    });
                }
                Ok(BitVector::from_bools(r).into_support())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows_unchecked(n_cols, rows))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector::from_sorted_unchecked(self.n_cols, self.rows[i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.columns().iter().map(Vec::len).collect()
    }

    /// Row indices holding a 1 in column `j`, ascending.
    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns()[j]
    }

    fn columns(&self) -> &Vec<Vec<usize>> {
        self.columns.get_or_init(|| {
            let mut cols = vec![Vec::new(); self.n_cols];
            for (i, row) in self.rows.iter().enumerate() {
                for &j in row {
                    cols[j].push(i);
                }
            }
            cols
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![false; self.n_cols];
                for &j in r {
                    d[j] = true;
                }
                d
            })
            .collect()
    }

    fn packed_rows(&self) -> (Vec<u64>, usize) {
        let wpr = words_for(self.n_cols).max(1);
        let mut words = vec![0u64; self.n_rows * wpr];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                flip_bit(&mut words[i * wpr..(i + 1) * wpr], j);
            }
        }
        (words, wpr)
    }

    /// Matrix-vector product `M v` over GF(2).
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        Ok(self.mul_support(v.support()))
    }

    /// `M v` where `v` is given by its support. Each index is assumed
    /// to be a valid column; repeated indices cancel.
    pub fn mul_support(&self, support: &[usize]) -> BitVector {
        let cols = self.columns();
        let mut acc = vec![0u64; words_for(self.n_rows)];
        for &j in support {
            for &i in &cols[j] {
                flip_bit(&mut acc, i);
            }
        }
        BitVector::from_words(&acc, self.n_rows)
    }

    pub fn transpose(&self) -> SparseBitMatrix {
        SparseBitMatrix::from_rows_unchecked(self.n_rows, self.columns().clone())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseBitMatrix) -> SparseBitMatrix {
        let mut rows = Vec::with_capacity(self.n_rows * other.n_rows);
        for a in &self.rows {
            for b in &other.rows {
                let mut row = Vec::with_capacity(a.len() * b.len());
                for &j in a {
                    for &l in b {
                        row.push(j * other.n_cols + l);
                    }
                }
                rows.push(row);
            }
        }
        SparseBitMatrix::from_rows_unchecked(self.n_cols * other.n_cols, rows)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &SparseBitMatrix) -> Result<SparseBitMatrix> {
        if self.n_rows != other.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: other.n_rows,
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|&j| j + self.n_cols));
                r
            })
            .collect();
        Ok(SparseBitMatrix::from_rows_unchecked(
            self.n_cols + other.n_cols,
            rows,
        ))
    }

    fn echelon(&self) -> &Echelon {
        self.echelon.get_or_init(|| {
            let (mut words, wpr) = self.packed_rows();
            let pivots = eliminate(&mut words, self.n_rows, wpr, self.n_cols, true);
            words.truncate(pivots.len() * wpr);
            let mut pivot_row_of_col = vec![NO_PIVOT; self.n_cols];
            for (r, &c) in pivots.iter().enumerate() {
                pivot_row_of_col[c] = r as u32;
            }
            Echelon {
                words_per_row: wpr,
                rows: words,
                pivots,
                pivot_row_of_col,
            }
        })
    }

    /// Row rank over GF(2).
    ///
    /// Uses the cached echelon form if present, otherwise a forward-only
    /// elimination that is not cached.
    pub fn rank(&self) -> usize {
        if let Some(e) = self.echelon.get() {
            return e.rank();
        }
        let (mut words, wpr) = self.packed_rows();
        eliminate(&mut words, self.n_rows, wpr, self.n_cols, false).len()
    }

    /// Whether `v` is a GF(2) combination of the rows.
    pub fn in_row_space(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        Ok(self.support_in_row_space(v.support()))
    }

    /// Row-space membership for a sorted, duplicate-free support list.
    pub fn support_in_row_space(&self, support: &[usize]) -> bool {
        if support.is_empty() {
            return true;
        }
        let e = self.echelon();
        // In reduced form the coefficient of each echelon row equals the
        // entry of `v` at that row's pivot.
        let mut acc = vec![0u64; e.words_per_row];
        for &j in support {
            let r = e.pivot_row_of_col[j];
            if r != NO_PIVOT {
                xor_into(&mut acc, e.row(r as usize));
            }
        }
        for &j in support {
            flip_bit(&mut acc, j);
        }
        acc.iter().all(|&w| w == 0)
    }

    /// A basis of the right kernel `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let e = self.echelon();
        let mut basis = Vec::new();
        for free in 0..self.n_cols {
            if e.pivot_row_of_col[free] != NO_PIVOT {
                continue;
            }
            let mut support = vec![free];
            for (r, &p) in e.pivots.iter().enumerate() {
                if get_bit(e.row(r), free) {
                    support.push(p);
                }
            }
            support.sort_unstable();
            basis.push(BitVector::from_sorted_unchecked(self.n_cols, support));
        }
        basis
    }

    /// Serializes to the matrix text format: a `n_rows n_cols` header and
    /// one line of space-separated column indices per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n_rows, self.n_cols);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|j| j.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let dims = parse_usizes(header, 1)?;
        let [n_rows, n_cols] = dims[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `n_rows n_cols`, got {header:?}"),
            });
        };
        let mut rows = Vec::with_capacity(n_rows);
        for (ln, line) in lines {
            if rows.len() == n_rows {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("more than {n_rows} rows"),
                });
            }
            let mut row = parse_usizes(line, ln + 1)?;
            row.sort_unstable();
            let row = BitVector::new(n_cols, row).map_err(|e| Error::Parse {
                line: ln + 1,
                msg: e.to_string(),
            })?;
            rows.push(row.into_support());
        }
        // Trailing zero rows may be dropped by editors.
        rows.resize(n_rows, Vec::new());
        Ok(Self::from_rows_unchecked(n_cols, rows))
    }
}

pub(crate) fn parse_usizes(line: &str, line_no: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

/// Incrementally grown row space, kept in reduced echelon form.
///
/// Used to pick coset representatives: a candidate is kept only if it is
/// independent of everything inserted so far.
pub struct RowSpaceBuilder {
    n_cols: usize,
    wpr: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowSpaceBuilder {
    pub fn new(n_cols: usize) -> Self {
        Self {
            n_cols,
            wpr: words_for(n_cols).max(1),
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        debug_assert_eq!(v.len(), self.n_cols);
        let mut w = vec![0u64; self.wpr];
        for &i in v.support() {
            flip_bit(&mut w, i);
        }
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if get_bit(&w, p) {
                xor_into(&mut w, row);
            }
        }
        let Some(p) = w
            .iter()
            .enumerate()
            .find(|(_, &x)| x != 0)
            .map(|(i, &x)| i * WORD_BITS + x.trailing_zeros() as usize)
        else {
            return false;
        };
        for row in &mut self.rows {
            if get_bit(row, p) {
                xor_into(row, &w);
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut w = v.to_words();
        w.resize(self.wpr, 0);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if get_bit(&w, p) {
                xor_into(&mut w, row);
            }
        }
        w.iter().all(|&x| x == 0)
    }
}
