//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored row-major, each row padded to a whole number of 64-bit
//! words. Padding bits past `cols` are kept at zero by every mutating
//! operation, so row weights are plain popcounts.

use std::fmt;

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
}

/// Parity of the bitwise AND of two word slices.
#[inline]
pub(crate) fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

/// Iterator over set bit positions of a word slice.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + b)
            }
        })
    })
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            assert!(i < len, "support index {i} out of range for length {len}");
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.flip(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        get_bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        flip_bit(&mut self.words, i);
    }

    pub fn weight(&self) -> usize {
        popcount(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Sorted indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        ones(&self.words).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        xor_into(&mut self.words, &other.words);
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        dot(&self.words, &other.words)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}; {:?}]", self.len, self.support())
    }
}

/// Dense GF(2) matrix, row-major and word padded.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must share a length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "row {i} has length {} not {cols}", r.len());
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_bitvecs(rows: &[BitVec], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix from per-row sorted or unsorted column index lists.
    pub fn from_row_supports(rows: usize, cols: usize, supports: &[Vec<usize>]) -> Self {
        assert_eq!(supports.len(), rows);
        let mut m = Self::zeros(rows, cols);
        for (i, s) in supports.iter().enumerate() {
            for &j in s {
                m.toggle(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        get_bit(self.row_words(i), j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if self.get(i, j) != value {
            self.toggle(i, j);
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        let s = self.stride;
        flip_bit(&mut self.data[i * s..(i + 1) * s], j);
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        let s = self.stride;
        &mut self.data[i * s..(i + 1) * s]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        ones(self.row_words(i)).collect()
    }

    pub fn col_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        popcount(self.row_words(i))
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|i| self.row_weight(i)).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for i in 0..self.rows {
            for j in ones(self.row_words(i)) {
                w[j] += 1;
            }
        }
        w
    }

    pub fn count_ones(&self) -> usize {
        popcount(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// row[dst] ^= row[src]
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            xor_into(&mut tail[..s], &head[src * s..(src + 1) * s]);
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            xor_into(&mut head[dst * s..(dst + 1) * s], &tail[..s]);
        }
    }

    /// Entrywise sum mod 2.
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = self.clone();
        xor_into(&mut out.data, &other.data);
        Ok(out)
    }

    /// Matrix product mod 2.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        let s = out.stride;
        for i in 0..self.rows {
            let dst = &mut out.data[i * s..(i + 1) * s];
            for k in ones(&self.data[i * self.stride..(i + 1) * self.stride]) {
                xor_into(dst, other.row_words(k));
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if dot(self.row_words(i), v.words()) {
                out.flip(i);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in ones(self.row_words(i)) {
                out.toggle(j, i);
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        Ok(out)
    }

    /// XORs `block` into the submatrix whose top-left corner is (`r0`, `c0`).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in ones(block.row_words(i)) {
                self.toggle(r0 + i, c0 + j);
            }
        }
    }

    /// Gauss-Jordan elimination.
    pub fn rref(&self) -> RrefCache {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    /// Gauss-Jordan elimination choosing pivot columns in the given order.
    /// Pivot columns are reported in the order they were selected.
    pub(crate) fn rref_with_order(&self, order: &[usize]) -> RrefCache {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        let s = m.stride;
        for &c in order {
            if r == m.rows {
                break;
            }
            let (wi, bit) = (c / WORD_BITS, 1u64 << (c % WORD_BITS));
            let Some(p) = (r..m.rows).find(|&i| m.data[i * s + wi] & bit != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let (head, rest) = m.data.split_at_mut(r * s);
            let (pivot, tail) = rest.split_at_mut(s);
            for row in head.chunks_exact_mut(s).chain(tail.chunks_exact_mut(s)) {
                if row[wi] & bit != 0 {
                    xor_into(row, pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.rows = r;
        m.data.truncate(r * s);
        RrefCache { rref: m, pivot_cols: pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of the right null space `{v : self * v = 0}`, one vector per row.
    pub fn kernel_basis(&self) -> BitMatrix {
        self.rref().kernel_basis()
    }

    /// Columns of the matrix as packed vectors.
    pub fn columns(&self) -> Vec<BitVec> {
        let t = self.transpose();
        (0..t.rows).map(|i| t.row(i)).collect()
    }

    /// Applies a column permutation: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let row = self.row_words(i);
            for (j, &p) in perm.iter().enumerate() {
                if get_bit(row, p) {
                    out.toggle(i, j);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(64) {
            let line: String = (0..self.cols.min(128))
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form with its pivot columns.
///
/// `rref` holds only the nonzero rows, so `rref.rows() == rank`.
#[derive(Clone, Debug)]
pub struct RrefCache {
    rref: BitMatrix,
    pivot_cols: Vec<usize>,
}

impl RrefCache {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Pivot columns, one per row of the reduced form.
    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.rref
    }

    pub fn cols(&self) -> usize {
        self.rref.cols
    }

    /// Reduces `v` against the pivot rows, returning the remainder.
    pub fn reduce(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.rref.cols {
            return Err(Error::LengthMismatch {
                expected: self.rref.cols,
                found: v.len(),
            });
        }
        let mut r = v.clone();
        self.reduce_words(&mut r.words);
        Ok(r)
    }

    pub(crate) fn reduce_words(&self, w: &mut [u64]) {
        for (i, &p) in self.pivot_cols.iter().enumerate() {
            if get_bit(w, p) {
                xor_into(w, self.rref.row_words(i));
            }
        }
    }

    /// True iff `v` lies in the row space of the original matrix.
    pub fn in_rowspace(&self, v: &BitVec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn kernel_basis(&self) -> BitMatrix {
        let n = self.rref.cols;
        let mut is_pivot = vec![false; n];
        for &p in &self.pivot_cols {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut k = BitMatrix::zeros(free.len(), n);
        for (r, &f) in free.iter().enumerate() {
            k.toggle(r, f);
            for (i, &p) in self.pivot_cols.iter().enumerate() {
                if self.rref.get(i, f) {
                    k.toggle(r, p);
                }
            }
        }
        k
    }
}

/// Row-echelon basis built by incremental insertion.
///
/// Each stored row is reduced against all earlier rows and its pivot is its
/// lowest set bit, so reduction in insertion order is exact.
#[derive(Clone, Debug)]
pub(crate) struct IncrementalBasis {
    len: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, w: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if get_bit(w, p) {
                xor_into(w, row);
            }
        }
    }

    /// Inserts `v`, returning true when it was independent of the basis.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        debug_assert_eq!(v.len(), words_for(self.len));
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let lowest = ones(&w).next();
        match lowest {
            Some(p) => {
                self.rows.push(w);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
        let mut c = vec![vec![0u8; p]; n];
        for i in 0..n {
            for j in 0..p {
                let mut s = 0;
                for k in 0..m {
                    s ^= a[i][k] & b[k][j];
                }
                c[i][j] = s;
            }
        }
        c
    }

    fn naive_rank(mut a: Vec<Vec<u8>>) -> usize {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..rows).find(|&i| a[i][c] == 1) {
                a.swap(rank, p);
                for i in 0..rows {
                    if i != rank && a[i][c] == 1 {
                        let pr = a[rank].clone();
                        for (x, y) in a[i].iter_mut().zip(pr) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn dense(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        proptest::collection::vec(proptest::collection::vec(0u8..2, cols), rows)
    }

    fn matrix_strategy(max: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        (0..=max, 1..=max).prop_flat_map(|(r, c)| dense(r, c))
    }

    #[test]
    fn identity_times_matrix() {
        let m = BitMatrix::from_rows(&[[1u8, 0, 1, 1], [0, 1, 1, 0], [1, 1, 1, 1]], 4);
        assert_eq!(BitMatrix::identity(3).mul(&m).unwrap(), m);
    }

    #[test]
    fn shift_squared_is_identity() {
        let s = BitMatrix::from_rows(&[[0u8, 1], [1, 0]], 2);
        assert_eq!(s.mul(&s).unwrap(), BitMatrix::identity(2));
    }

    #[test]
    fn mul_shape_error_names_shapes() {
        let err = BitMatrix::zeros(2, 3).mul(&BitMatrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3"), "{msg}");
    }

    #[test]
    fn rref_small_cases() {
        let z = BitMatrix::zeros(4, 5).rref();
        assert_eq!(z.rank(), 0);
        assert!(z.pivot_cols().is_empty());
        let i = BitMatrix::identity(6).rref();
        assert_eq!(i.rank(), 6);
        assert_eq!(i.pivot_cols(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        let m = BitMatrix::from_rows(&[[1u8, 1, 0, 1], [1, 1, 0, 1]], 4);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_of_one_plus_shift_over_z4() {
        // circulant of 1 + x over Z_4, built by hand
        let mut m = BitMatrix::identity(4);
        for i in 0..4 {
            m.toggle((i + 1) % 4, i);
        }
        assert_eq!(naive_rank(m.to_dense()), 3);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn kernel_small_cases() {
        assert_eq!(BitMatrix::identity(5).kernel_basis().shape(), (0, 5));
        let k = BitMatrix::from_rows(&[[1u8, 1]], 2).kernel_basis();
        assert_eq!(k.to_dense(), vec![vec![1, 1]]);
    }

    #[test]
    fn rowspace_membership_small_cases() {
        let m = BitMatrix::from_rows(&[[1u8, 1, 0]], 3);
        let c = m.rref();
        assert!(c.in_rowspace(&BitVec::zeros(3)).unwrap());
        assert!(c.in_rowspace(&m.row(0)).unwrap());
        assert!(!c.in_rowspace(&BitVec::from_support(3, &[1, 2])).unwrap());
        assert!(c.in_rowspace(&BitVec::zeros(4)).is_err());
    }

    #[test]
    fn transpose_small_cases() {
        assert_eq!(BitMatrix::identity(7).transpose(), BitMatrix::identity(7));
        let r = BitMatrix::from_rows(&[[1u8, 0, 1]], 3);
        assert_eq!(r.transpose().to_dense(), vec![vec![1], vec![0], vec![1]]);
    }

    #[test]
    fn empty_shapes_are_legal() {
        let a = BitMatrix::zeros(0, 5);
        let b = BitMatrix::zeros(5, 0);
        assert_eq!(a.mul(&BitMatrix::zeros(5, 3)).unwrap().shape(), (0, 3));
        assert_eq!(b.mul(&a).unwrap().shape(), (5, 5));
        assert_eq!(a.rank(), 0);
        assert_eq!(a.kernel_basis().shape(), (5, 5));
        assert_eq!(b.kernel_basis().shape(), (0, 0));
    }

    #[test]
    fn padding_stays_zero() {
        let mut m = BitMatrix::zeros(3, 70);
        m.set(0, 69, true);
        m.set(1, 0, true);
        let t = m.transpose().transpose();
        assert_eq!(t, m);
        let r = m.rref();
        assert_eq!(r.matrix().count_ones(), 2);
        assert_eq!(m.row_weights(), vec![1, 1, 0]);
    }

    #[test]
    fn mul_random_64_matches_naive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(64);
        let a: Vec<Vec<u8>> = (0..64).map(|_| (0..64).map(|_| rng.gen_range(0..2)).collect()).collect();
        let b: Vec<Vec<u8>> = (0..64).map(|_| (0..64).map(|_| rng.gen_range(0..2)).collect()).collect();
        let got = BitMatrix::from_rows(&a, 64).mul(&BitMatrix::from_rows(&b, 64)).unwrap();
        assert_eq!(got.to_dense(), naive_mul(&a, &b));
    }

    #[test]
    fn rank_random_40x60_matches_naive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4060);
        for _ in 0..20 {
            let a: Vec<Vec<u8>> = (0..40).map(|_| (0..60).map(|_| rng.gen_range(0..2) & rng.gen_range(0..2)).collect()).collect();
            assert_eq!(BitMatrix::from_rows(&a, 60).rank(), naive_rank(a));
        }
    }

    proptest! {
        #[test]
        fn mul_matches_naive(a in matrix_strategy(40), extra in 1usize..40, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let inner = a.first().map_or(0, |r| r.len());
            let b: Vec<Vec<u8>> = (0..inner).map(|_| (0..extra).map(|_| rng.gen_range(0..2)).collect()).collect();
            let am = BitMatrix::from_rows(&a, inner);
            let bm = BitMatrix::from_rows(&b, extra);
            prop_assert_eq!(am.mul(&bm).unwrap().to_dense(), naive_mul(&a, &b));
        }

        #[test]
        fn mul_is_associative(seed in any::<u64>(), d in proptest::array::uniform4(1usize..128)) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_m = |r: usize, c: usize| {
                let mut m = BitMatrix::zeros(r, c);
                for i in 0..r { for j in 0..c { if rng.gen_bool(0.3) { m.toggle(i, j); } } }
                m
            };
            let a = rand_m(d[0], d[1]);
            let b = rand_m(d[1], d[2]);
            let c = rand_m(d[2], d[3]);
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn rank_transpose_and_nullity(a in matrix_strategy(64)) {
            let cols = a.first().map_or(1, |r| r.len());
            let m = BitMatrix::from_rows(&a, cols);
            let r = m.rank();
            prop_assert_eq!(r, naive_rank(a.clone()));
            prop_assert_eq!(r, m.transpose().rank());
            let k = m.kernel_basis();
            prop_assert_eq!(r + k.rows(), m.cols());
            prop_assert!(m.mul(&k.transpose()).unwrap().is_zero());
            prop_assert_eq!(k.rank(), k.rows());
        }

        #[test]
        fn membership_matches_rank(a in matrix_strategy(48), v in proptest::collection::vec(0u8..2, 48)) {
            let cols = a.first().map_or(1, |r| r.len());
            let m = BitMatrix::from_rows(&a, cols);
            let cache = m.rref();
            for i in 0..m.rows() {
                prop_assert!(cache.in_rowspace(&m.row(i)).unwrap());
            }
            let bits: Vec<bool> = v[..cols].iter().map(|&b| b == 1).collect();
            let vec = BitVec::from_bools(&bits);
            let stacked = m.vstack(&BitMatrix::from_bitvecs(&[vec.clone()], cols)).unwrap();
            prop_assert_eq!(cache.in_rowspace(&vec).unwrap(), stacked.rank() == cache.rank());
        }

        #[test]
        fn double_transpose(a in matrix_strategy(80)) {
            let cols = a.first().map_or(1, |r| r.len());
            let m = BitMatrix::from_rows(&a, cols);
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn rref_invariants(a in matrix_strategy(50)) {
            let cols = a.first().map_or(1, |r| r.len());
            let m = BitMatrix::from_rows(&a, cols);
            let c = m.rref();
            prop_assert!(c.pivot_cols().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(c.matrix().rows(), c.rank());
            for i in 0..c.rank() {
                prop_assert!(c.matrix().row_weight(i) > 0);
                for (k, &p) in c.pivot_cols().iter().enumerate() {
                    prop_assert_eq!(c.matrix().get(i, p), i == k);
                }
            }
            // row-equivalent: same row space both ways
            for i in 0..m.rows() {
                prop_assert!(c.in_rowspace(&m.row(i)).unwrap());
            }
            let back = m.rref();
            for i in 0..c.rank() {
                prop_assert!(back.in_rowspace(&c.matrix().row(i)).unwrap());
            }
        }

        #[test]
        fn incremental_basis_rank(a in matrix_strategy(40)) {
            let cols = a.first().map_or(1, |r| r.len());
            let m = BitMatrix::from_rows(&a, cols);
            let mut b = IncrementalBasis::new(cols);
            for i in 0..m.rows() {
                b.insert(m.row_words(i));
            }
            prop_assert_eq!(b.rank(), m.rank());
        }
    }
}
