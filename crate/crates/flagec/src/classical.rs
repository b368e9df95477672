//! Classical binary linear codes, with the cyclic construction from
//! generator/check polynomials.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{BitMatrix, Bits};
use crate::poly::BinaryPolynomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("{poly} does not divide x^{n} - 1")]
    NotADivisor { poly: String, n: usize },
    #[error("polynomial defines a zero-dimensional code for n = {n}")]
    ZeroDimensional { n: usize },
    #[error("check matrix rows are linearly dependent (rank {rank} < {rows} rows)")]
    DependentRows { rank: usize, rows: usize },
    #[error("check matrix has no columns")]
    EmptyMatrix,
}

/// Distance computation result under a search cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Distance {
    Exact(usize),
    ExceedsCap { cap: usize },
}

impl Distance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(*d),
            Distance::ExceedsCap { .. } => None,
        }
    }
}

/// Parity-check matrix built from a check polynomial h: row i is the
/// reversed coefficient vector (h_β … h_0) placed at column offset i−1,
/// giving an (n − deg h) × n matrix.
pub fn check_matrix_from_h(h: &BinaryPolynomial, n: usize) -> Result<BitMatrix, CodeError> {
    if !h.divides_x_pow_plus_one(n) {
        return Err(CodeError::NotADivisor {
            poly: h.to_string(),
            n,
        });
    }
    let beta = h.degree().expect("divisor of x^n-1 is nonzero");
    let rows = n - beta;
    let mut m = BitMatrix::zeros(rows, n);
    for i in 1..=rows {
        for e in 0..=beta {
            if h.coeff(e) {
                // reversed coefficients: h_β lands first
                m.set(i, (i - 1) + (beta - e) + 1, true);
            }
        }
    }
    Ok(m)
}

/// Generator matrix from a generator polynomial g: row i is
/// (g_0 … g_α) placed at column offset i−1, an (n − deg g) × n matrix.
pub fn generator_matrix_from_g(g: &BinaryPolynomial, n: usize) -> Result<BitMatrix, CodeError> {
    if !g.divides_x_pow_plus_one(n) {
        return Err(CodeError::NotADivisor {
            poly: g.to_string(),
            n,
        });
    }
    let alpha = g.degree().expect("divisor of x^n-1 is nonzero");
    if alpha == n {
        // g = x^n - 1 generates only the zero codeword
        return Err(CodeError::ZeroDimensional { n });
    }
    let rows = n - alpha;
    let mut m = BitMatrix::zeros(rows, n);
    for i in 1..=rows {
        for e in 0..=alpha {
            if g.coeff(e) {
                m.set(i, (i - 1) + e + 1, true);
            }
        }
    }
    Ok(m)
}

/// True iff every row of `hx` is orthogonal (GF(2)) to every row of `hz`.
pub fn dual_containment(hx: &BitMatrix, hz: &BitMatrix) -> bool {
    hx.orthogonal_to(hz)
}

/// An [n, k] classical linear code with both parity-check and generator
/// matrices in hand. Validation of "h divides x^n − 1" happens at
/// construction; downstream operations assume it.
#[derive(Clone, Debug)]
pub struct ClassicalCode {
    n: usize,
    k: usize,
    check: BitMatrix,
    gen: BitMatrix,
    check_poly: Option<BinaryPolynomial>,
}

impl ClassicalCode {
    /// Cyclic construction: H from h, G from g = (x^n − 1)/h.
    pub fn from_check_polynomial(h: &BinaryPolynomial, n: usize) -> Result<Self, CodeError> {
        let check = check_matrix_from_h(h, n)?;
        let (g, _) = BinaryPolynomial::x_pow_plus_one(n)
            .div_rem(h)
            .expect("h was validated nonzero");
        let gen = generator_matrix_from_g(&g, n)?;
        let k = n - g.degree().expect("g nonzero");
        debug_assert!(gen.orthogonal_to(&check));
        Ok(ClassicalCode {
            n,
            k,
            check,
            gen,
            check_poly: Some(h.clone()),
        })
    }

    /// Build from an explicit parity-check matrix; rows must be independent.
    /// The generator matrix is a kernel basis of H.
    pub fn from_check_matrix(check: BitMatrix) -> Result<Self, CodeError> {
        let n = check.col_count();
        if n == 0 {
            return Err(CodeError::EmptyMatrix);
        }
        let rank = check.rank();
        if rank < check.row_count() {
            return Err(CodeError::DependentRows {
                rank,
                rows: check.row_count(),
            });
        }
        let kernel = check.kernel_basis();
        let k = kernel.len();
        let gen = BitMatrix::from_rows(kernel, n);
        Ok(ClassicalCode {
            n,
            k,
            check,
            gen,
            check_poly: None,
        })
    }

    /// The trivial [n, n] full-space code (no checks).
    pub fn full_space(n: usize) -> Self {
        ClassicalCode {
            n,
            k: n,
            check: BitMatrix::zeros(0, n),
            gen: BitMatrix::identity(n),
            check_poly: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn check_matrix(&self) -> &BitMatrix {
        &self.check
    }

    pub fn generator_matrix(&self) -> &BitMatrix {
        &self.gen
    }

    pub fn check_poly(&self) -> Option<&BinaryPolynomial> {
        self.check_poly.as_ref()
    }

    /// Minimum Hamming weight over nonzero codewords, if ≤ cap.
    ///
    /// Strategy switch: enumerate the message space when 2^k is small
    /// (Gray-code order, one row XOR per step), otherwise search error
    /// patterns of weight ≤ cap against H.
    pub fn distance(&self, cap: usize) -> Distance {
        assert!(cap >= 1, "cap must be at least 1");
        if self.k == 0 {
            // no nonzero codewords; conventionally unbounded
            return Distance::ExceedsCap { cap };
        }
        if self.k <= 24 {
            self.distance_by_message_enumeration(cap)
        } else {
            self.distance_by_pattern_search(cap)
        }
    }

    fn distance_by_message_enumeration(&self, cap: usize) -> Distance {
        let mut best = usize::MAX;
        let mut word = Bits::zeros(self.n);
        let total: u64 = 1u64 << self.k;
        let mut gray_prev: u64 = 0;
        for m in 1..total {
            let gray = m ^ (m >> 1);
            let changed = (gray ^ gray_prev).trailing_zeros() as usize;
            gray_prev = gray;
            word.xor_assign(self.gen.row(changed + 1));
            let w = word.weight();
            if w > 0 && w < best {
                best = w;
                if best == 1 {
                    break;
                }
            }
        }
        if best <= cap {
            Distance::Exact(best)
        } else {
            Distance::ExceedsCap { cap }
        }
    }

    fn distance_by_pattern_search(&self, cap: usize) -> Distance {
        // a weight-w codeword exists iff some weight-w vector lies in ker(H)
        let mut support = Vec::new();
        for w in 1..=cap.min(self.n) {
            if self.any_codeword_of_weight(w, 0, &mut support) {
                return Distance::Exact(w);
            }
        }
        Distance::ExceedsCap { cap }
    }

    fn any_codeword_of_weight(&self, w: usize, from: usize, support: &mut Vec<usize>) -> bool {
        if support.len() == w {
            let mut v = Bits::zeros(self.n);
            for &q in support.iter() {
                v.set(q, true);
            }
            return self.check.mul_vec(&v).is_zero();
        }
        for q in (from + 1)..=(self.n - (w - support.len() - 1)) {
            support.push(q);
            if self.any_codeword_of_weight(w, q, support) {
                support.pop();
                return true;
            }
            support.pop();
        }
        false
    }

    /// True iff the one-step cyclic shift of every generator row lies in
    /// the row space of G.
    pub fn is_cyclic(&self) -> bool {
        if self.k == 0 {
            return true;
        }
        let space = self.gen.row_space();
        self.gen
            .shift_rows_left(1)
            .rows()
            .all(|r| space.contains(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BinaryPolynomial;

    fn poly(exps: &[usize]) -> BinaryPolynomial {
        BinaryPolynomial::from_exponents(exps).unwrap()
    }

    #[test]
    fn steane_check_matrix_rows() {
        let h = poly(&[0, 2, 3, 4]);
        let m = check_matrix_from_h(&h, 7).unwrap();
        assert_eq!(m.row_count(), 3);
        assert_eq!(m.row(1).to_string(), "1110100");
        assert_eq!(m.row(2).to_string(), "0111010");
        assert_eq!(m.row(3).to_string(), "0011101");
    }

    #[test]
    fn degenerate_h_one() {
        let m = check_matrix_from_h(&BinaryPolynomial::one(), 3).unwrap();
        assert_eq!(m.row_count(), 3);
        assert_eq!(m.row(1).to_string(), "100");
        assert_eq!(m.row(2).to_string(), "010");
        assert_eq!(m.row(3).to_string(), "001");
    }

    #[test]
    fn non_divisor_rejected() {
        let h = poly(&[0, 1]);
        // x+1 divides x^4 - 1
        assert!(check_matrix_from_h(&h, 4).is_ok());
        let bad = poly(&[0, 1, 2]);
        assert!(matches!(
            check_matrix_from_h(&bad, 4),
            Err(CodeError::NotADivisor { .. })
        ));
    }

    #[test]
    fn code30_check_matrix_shape() {
        let h = poly(&[0, 2, 4, 6, 10, 14, 16, 22]);
        let m = check_matrix_from_h(&h, 30).unwrap();
        assert_eq!(m.row_count(), 8);
        assert_eq!(m.col_count(), 30);
        // row 1: reversed degree-22 coefficient string, zero-padded
        let mut expected = String::new();
        for e in (0..=22).rev() {
            expected.push(if h.coeff(e) { '1' } else { '0' });
        }
        expected.push_str("0000000");
        assert_eq!(m.row(1).to_string(), expected);
    }

    #[test]
    fn hamming_generator_orthogonal() {
        let h = poly(&[0, 2, 3, 4]);
        let g = poly(&[0, 2, 3]);
        let gm = generator_matrix_from_g(&g, 7).unwrap();
        let hm = check_matrix_from_h(&h, 7).unwrap();
        assert_eq!(gm.row_count(), 4);
        assert!(gm.orthogonal_to(&hm));
    }

    #[test]
    fn generator_g_one_is_identity_shifts() {
        let gm = generator_matrix_from_g(&BinaryPolynomial::one(), 3).unwrap();
        assert_eq!(gm.row_count(), 3);
        assert_eq!(gm.row(1).to_string(), "100");
    }

    #[test]
    fn generator_x_pow_n_rejected() {
        let g = BinaryPolynomial::x_pow_plus_one(4);
        assert!(matches!(
            generator_matrix_from_g(&g, 4),
            Err(CodeError::ZeroDimensional { n: 4 })
        ));
    }

    #[test]
    fn hamming_distance_is_3() {
        let code = ClassicalCode::from_check_polynomial(&poly(&[0, 2, 3, 4]), 7).unwrap();
        assert_eq!(code.n(), 7);
        assert_eq!(code.k(), 4);
        assert_eq!(code.distance(7), Distance::Exact(3));
    }

    #[test]
    fn repetition_check_distance() {
        let h = BitMatrix::from_rows(vec![Bits::from_bit_str("11").unwrap()], 2);
        let code = ClassicalCode::from_check_matrix(h).unwrap();
        assert_eq!(code.k(), 1);
        assert_eq!(code.distance(2), Distance::Exact(2));
    }

    #[test]
    fn distance_strategies_agree() {
        // pattern search against H must match message enumeration
        let h = poly(&[0, 2, 3, 4]);
        let code = ClassicalCode::from_check_polynomial(&h, 7).unwrap();
        assert_eq!(code.distance_by_pattern_search(4), Distance::Exact(3));
        assert_eq!(code.distance_by_message_enumeration(4), Distance::Exact(3));
    }

    #[test]
    fn cyclic_constructions_are_cyclic() {
        let code = ClassicalCode::from_check_polynomial(&poly(&[0, 2, 3, 4]), 7).unwrap();
        assert!(code.is_cyclic());
    }

    #[test]
    fn non_cyclic_span_detected() {
        // a code whose generator spans only {110}: any cyclic shift escapes
        let g = BitMatrix::from_rows(vec![Bits::from_bit_str("110").unwrap()], 3);
        let check = BitMatrix::from_rows(g.kernel_basis(), 3);
        let code = ClassicalCode::from_check_matrix(check).unwrap();
        assert_eq!(code.k(), 1);
        assert!(!code.is_cyclic());
    }

    #[test]
    fn check_and_generator_matrices_are_dual_descriptions() {
        // for every divisor: row spaces orthogonal, ranks summing to n
        for (exps, n) in [
            (vec![0usize, 2, 3, 4], 7usize),
            (vec![0, 1], 4),
            (vec![0, 3], 6),
            (vec![0, 2, 4, 6, 10, 14, 16, 22], 30),
        ] {
            let h = poly(&exps);
            let hm = check_matrix_from_h(&h, n).unwrap();
            let g = BinaryPolynomial::x_pow_plus_one(n).div_rem(&h).unwrap().0;
            let gm = generator_matrix_from_g(&g, n).unwrap();
            assert!(gm.orthogonal_to(&hm), "h = {h}, n = {n}");
            assert_eq!(hm.rank() + gm.rank(), n, "h = {h}, n = {n}");
        }
    }

    #[test]
    fn dual_containment_cases() {
        let h = poly(&[0, 2, 3, 4]);
        let m = check_matrix_from_h(&h, 7).unwrap();
        assert!(dual_containment(&m, &m));
        let one = BitMatrix::from_rows(vec![Bits::from_bit_str("10").unwrap()], 2);
        assert!(!dual_containment(&one, &one));
        let empty = BitMatrix::zeros(0, 2);
        assert!(dual_containment(&one, &empty));
    }

    #[test]
    fn dependent_rows_rejected() {
        let rows = vec![
            Bits::from_bit_str("110").unwrap(),
            Bits::from_bit_str("110").unwrap(),
        ];
        assert!(matches!(
            ClassicalCode::from_check_matrix(BitMatrix::from_rows(rows, 3)),
            Err(CodeError::DependentRows { rank: 1, rows: 2 })
        ));
    }
}
