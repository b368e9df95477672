//! Bit-packed GF(2) vectors and matrices.
//!
//! Indices in the public API are 1-based, matching the qubit and row
//! subscripts used throughout the rest of the crate. Out-of-range access
//! panics.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid character {found:?} at position {pos} (expected '0' or '1')")]
    InvalidChar { pos: usize, found: char },
}

/// A fixed-length GF(2) vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// All-ones vector of the given length.
    pub fn ones_vec(len: usize) -> Self {
        let mut bits = Bits::zeros(len);
        for i in 1..=len {
            bits.set(i, true);
        }
        bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn word_bit(&self, index: usize) -> (usize, u32) {
        assert!(
            index >= 1 && index <= self.len,
            "bit index {index} out of range 1..={}",
            self.len
        );
        ((index - 1) / 64, ((index - 1) % 64) as u32)
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        let (w, b) = self.word_bit(index);
        (self.words[w] >> b) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        let (w, b) = self.word_bit(index);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        let (w, b) = self.word_bit(index);
        self.words[w] ^= 1 << b;
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "length mismatch in xor_assign");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the bitwise AND with `other`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// 1-based positions of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * 64 + b + 1)
                }
            })
        })
    }

    /// Position of the lowest set bit, if any (1-based).
    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    /// Lexicographic comparison reading bits from position 1 upward,
    /// with 0 ordered before 1.
    pub fn lex_cmp(&self, other: &Bits) -> Ordering {
        assert_eq!(self.len, other.len, "length mismatch in lex_cmp");
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                let a_bit = (a >> bit) & 1;
                return if a_bit == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Parse a string of '0'/'1' characters, position 1 first.
    pub fn from_bit_str(s: &str) -> Result<Bits, BitsError> {
        let mut bits = Bits::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits.set(i + 1, true),
                _ => {
                    return Err(BitsError::InvalidChar {
                        pos: i + 1,
                        found: c,
                    })
                }
            }
        }
        Ok(bits)
    }

    /// Pack into a `usize` key; requires `len <= usize::BITS`.
    pub fn to_usize(&self) -> usize {
        assert!(
            self.len <= usize::BITS as usize,
            "vector too long for usize key"
        );
        match self.words.first() {
            Some(&w) => w as usize,
            None => 0,
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

/// A dense GF(2) matrix stored as a list of equal-length rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![Bits::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from rows; all rows must share the same length.
    pub fn from_rows(rows: Vec<Bits>, cols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        BitMatrix { cols, rows }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    /// 1-based row access.
    pub fn row(&self, index: usize) -> &Bits {
        assert!(
            index >= 1 && index <= self.rows.len(),
            "row index {index} out of range 1..={}",
            self.rows.len()
        );
        &self.rows[index - 1]
    }

    pub fn rows(&self) -> impl Iterator<Item = &Bits> {
        self.rows.iter()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.row(row).get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row >= 1 && row <= self.rows.len(), "row index out of range");
        self.rows[row - 1].set(col, value);
    }

    pub fn push_row(&mut self, row: Bits) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    /// Matrix-vector product over GF(2): bit i of the result is the inner
    /// product of row i with `v`.
    pub fn mul_vec(&self, v: &Bits) -> Bits {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = Bits::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i + 1, true);
            }
        }
        out
    }

    /// True iff every row of `self` is orthogonal to every row of `other`.
    pub fn orthogonal_to(&self, other: &BitMatrix) -> bool {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        self.rows
            .iter()
            .all(|a| other.rows.iter().all(|b| !a.dot(b)))
    }

    pub fn row_space(&self) -> RowSpace {
        RowSpace::from_rows(self.cols, self.rows.iter().cloned())
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    /// True iff `v` is a GF(2) linear combination of the rows.
    pub fn in_row_space(&self, v: &Bits) -> bool {
        assert_eq!(v.len(), self.cols, "dimension mismatch in in_row_space");
        self.row_space().contains(v)
    }

    /// Basis of the right kernel: all v with M v = 0, echelonized with
    /// deterministic pivot order.
    pub fn kernel_basis(&self) -> Vec<Bits> {
        let space = self.row_space();
        let pivots: Vec<usize> = space.basis.iter().map(|(p, _)| *p).collect();
        let free: Vec<usize> = (1..=self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = Bits::zeros(self.cols);
            v.set(f, true);
            // back-substitute so every pivot row has even overlap with v
            for (p, row) in &space.basis {
                if row.dot(&v) {
                    v.flip(*p);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Rows cyclically shifted left by `l` columns.
    pub fn shift_rows_left(&self, l: usize) -> BitMatrix {
        let n = self.cols;
        assert!(l < n.max(1), "shift out of range");
        let mut out = BitMatrix::zeros(self.rows.len(), n);
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones() {
                // column j moves to position j - l (cyclically)
                let new = (j + n - 1 - l) % n + 1;
                out.rows[i].set(new, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Row space of a GF(2) matrix in reduced echelon form, supporting fast
/// repeated membership queries. Pivots are chosen leftmost-first so the
/// reduction of any vector is reproducible.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    /// (pivot column, row) pairs sorted by pivot column.
    basis: Vec<(usize, Bits)>,
}

impl RowSpace {
    pub fn from_rows(cols: usize, rows: impl Iterator<Item = Bits>) -> Self {
        let mut space = RowSpace {
            cols,
            basis: Vec::new(),
        };
        for row in rows {
            space.insert(row);
        }
        space
    }

    fn insert(&mut self, mut row: Bits) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        for (p, b) in &self.basis {
            if row.get(*p) {
                row.xor_assign(b);
            }
        }
        if let Some(pivot) = row.first_one() {
            // reduce existing rows so the form stays fully reduced
            for (_, b) in self.basis.iter_mut() {
                if b.get(pivot) {
                    b.xor_assign(&row);
                }
            }
            let pos = self.basis.partition_point(|(p, _)| *p < pivot);
            self.basis.insert(pos, (pivot, row));
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Remainder of `v` after reduction by the basis.
    pub fn reduce(&self, v: &Bits) -> Bits {
        assert_eq!(v.len(), self.cols, "dimension mismatch in reduce");
        let mut r = v.clone();
        for (p, b) in &self.basis {
            if r.get(*p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Invert a square GF(2) matrix; returns None when singular.
pub fn invert(m: &BitMatrix) -> Option<BitMatrix> {
    let n = m.row_count();
    assert_eq!(n, m.col_count(), "invert requires a square matrix");
    // augmented rows [m | I]
    let mut aug: Vec<Bits> = m
        .rows()
        .enumerate()
        .map(|(i, r)| {
            let mut id = Bits::zeros(n);
            id.set(i + 1, true);
            r.concat(&id)
        })
        .collect();
    for (pivot_row, col) in (1..=n).enumerate() {
        let found = (pivot_row..n).find(|&r| aug[r].get(col))?;
        aug.swap(pivot_row, found);
        let pivot = aug[pivot_row].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != pivot_row && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
    }
    let mut inv = BitMatrix::zeros(n, n);
    for (i, row) in aug.iter().enumerate() {
        for j in 1..=n {
            inv.set(i + 1, j, row.get(n + j));
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut b = Bits::zeros(70);
        b.set(1, true);
        b.set(64, true);
        b.set(65, true);
        assert!(b.get(1) && b.get(64) && b.get(65));
        assert!(!b.get(2));
        assert_eq!(b.weight(), 3);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![1, 64, 65]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn zero_index_rejected() {
        let b = Bits::zeros(4);
        b.get(0);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn index_past_end_rejected() {
        let b = Bits::zeros(4);
        b.get(5);
    }

    #[test]
    fn bit_str_roundtrip() {
        let b = Bits::from_bit_str("1110100").unwrap();
        assert_eq!(b.to_string(), "1110100");
        assert_eq!(b.weight(), 4);
        assert!(Bits::from_bit_str("01x").is_err());
    }

    #[test]
    fn lex_cmp_orders_from_first_position() {
        let a = Bits::from_bit_str("010").unwrap();
        let b = Bits::from_bit_str("001").unwrap();
        // first differing position is 2; a has 1 there, so a > b
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(b.lex_cmp(&a), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn dot_products() {
        let a = Bits::from_bit_str("1101").unwrap();
        let b = Bits::from_bit_str("1011").unwrap();
        // overlap at positions 1 and 4 -> even
        assert!(!a.dot(&b));
        let c = Bits::from_bit_str("0100").unwrap();
        assert!(a.dot(&c));
    }

    #[test]
    fn row_space_membership_matches_enumeration() {
        // exhaustive oracle over all 2^rows combinations
        let rows: Vec<Bits> = ["110010", "011001", "000110", "101101"]
            .iter()
            .map(|s| Bits::from_bit_str(s).unwrap())
            .collect();
        let m = BitMatrix::from_rows(rows.clone(), 6);
        let space = m.row_space();
        let mut members = std::collections::HashSet::new();
        for mask in 0..(1u32 << rows.len()) {
            let mut v = Bits::zeros(6);
            for (i, r) in rows.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v.xor_assign(r);
                }
            }
            members.insert(v.to_string());
        }
        for value in 0..(1u32 << 6) {
            let mut v = Bits::zeros(6);
            for i in 0..6 {
                if (value >> i) & 1 == 1 {
                    v.set(i + 1, true);
                }
            }
            assert_eq!(space.contains(&v), members.contains(&v.to_string()));
        }
    }

    #[test]
    fn row_space_membership_matches_enumeration_many_rows() {
        // 12 rows: membership must agree with brute force over all 2^12
        // row combinations
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let cols = 9;
        let rows: Vec<Bits> = (0..12)
            .map(|_| {
                let mut b = Bits::zeros(cols);
                for i in 1..=cols {
                    b.set(i, rng.gen());
                }
                b
            })
            .collect();
        let m = BitMatrix::from_rows(rows.clone(), cols);
        let space = m.row_space();
        let mut members = std::collections::HashSet::new();
        for mask in 0..(1u32 << rows.len()) {
            let mut v = Bits::zeros(cols);
            for (i, r) in rows.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v.xor_assign(r);
                }
            }
            members.insert(v.to_string());
        }
        for value in 0..(1u32 << cols) {
            let mut v = Bits::zeros(cols);
            for i in 0..cols {
                if (value >> i) & 1 == 1 {
                    v.set(i + 1, true);
                }
            }
            assert_eq!(space.contains(&v), members.contains(&v.to_string()));
        }
    }

    #[test]
    fn zero_vector_always_in_row_space() {
        let m = BitMatrix::zeros(3, 5);
        assert!(m.in_row_space(&Bits::zeros(5)));
    }

    #[test]
    fn identity_rows_span_everything() {
        let m = BitMatrix::identity(4);
        let v = Bits::from_bit_str("1011").unwrap();
        assert!(m.in_row_space(&v));
    }

    #[test]
    fn sum_of_rows_with_flipped_bit_outside_space() {
        let rows: Vec<Bits> = ["100000", "001000", "000010"]
            .iter()
            .map(|s| Bits::from_bit_str(s).unwrap())
            .collect();
        let m = BitMatrix::from_rows(rows, 6);
        let good = Bits::from_bit_str("101000").unwrap();
        assert!(m.in_row_space(&good));
        let mut bad = good.clone();
        bad.flip(2);
        assert!(!m.in_row_space(&bad));
    }

    #[test]
    fn kernel_is_orthogonal_complement() {
        let rows: Vec<Bits> = ["1110100", "0111010", "0011101"]
            .iter()
            .map(|s| Bits::from_bit_str(s).unwrap())
            .collect();
        let m = BitMatrix::from_rows(rows, 7);
        let kernel = m.kernel_basis();
        assert_eq!(kernel.len(), 4);
        for v in &kernel {
            assert!(m.mul_vec(v).is_zero());
        }
        // kernel vectors are independent
        let rank = RowSpace::from_rows(7, kernel.into_iter()).rank();
        assert_eq!(rank, 4);
    }

    #[test]
    fn invert_roundtrip() {
        let mut m = BitMatrix::identity(3);
        m.set(1, 2, true);
        m.set(2, 3, true);
        let inv = invert(&m).unwrap();
        // m * inv = I
        for i in 1..=3 {
            for j in 1..=3 {
                let mut acc = false;
                for k in 1..=3 {
                    acc ^= m.get(i, k) & inv.get(k, j);
                }
                assert_eq!(acc, i == j);
            }
        }
        let singular = BitMatrix::zeros(2, 2);
        assert!(invert(&singular).is_none());
    }

    #[test]
    fn shift_rows_left_rotates_columns() {
        let m = BitMatrix::from_rows(vec![Bits::from_bit_str("10010").unwrap()], 5);
        let s = m.shift_rows_left(1);
        assert_eq!(s.row(1).to_string(), "00101");
        let s0 = m.shift_rows_left(0);
        assert_eq!(s0.row(1).to_string(), "10010");
    }
}
