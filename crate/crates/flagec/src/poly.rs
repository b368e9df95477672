//! Binary polynomials over GF(2), the inputs to cyclic code construction.

use std::fmt;

use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid exponent entry {entry:?}")]
    BadExponent { entry: String },
    #[error("duplicate exponent {exp}")]
    DuplicateExponent { exp: usize },
    #[error("empty exponent list")]
    Empty,
}

/// A polynomial over GF(2); coefficient of x^j is bit j.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryPolynomial {
    /// Packed coefficients, lowest exponent first. Normalized so the top
    /// word carries the leading coefficient; the zero polynomial is empty.
    coeffs: Vec<u64>,
}

impl BinaryPolynomial {
    pub fn zero() -> Self {
        BinaryPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        BinaryPolynomial { coeffs: vec![1] }
    }

    /// x^n + 1 (equal to x^n − 1 over GF(2)).
    pub fn x_pow_plus_one(n: usize) -> Self {
        let mut p = BinaryPolynomial::zero();
        p.set_coeff(0, true);
        p.set_coeff(n, true);
        p
    }

    pub fn from_exponents(exps: &[usize]) -> Result<Self, PolyError> {
        if exps.is_empty() {
            return Err(PolyError::Empty);
        }
        let mut p = BinaryPolynomial::zero();
        for &e in exps {
            if p.coeff(e) {
                return Err(PolyError::DuplicateExponent { exp: e });
            }
            p.set_coeff(e, true);
        }
        Ok(p)
    }

    /// Largest exponent the text parser accepts; keeps hostile inputs
    /// from forcing huge allocations.
    pub const MAX_PARSED_EXPONENT: usize = 4096;

    /// Parse an ascending exponent list such as "0,2,3,4".
    pub fn parse_exponent_list(s: &str) -> Result<Self, PolyError> {
        let mut exps = Vec::new();
        for entry in s.split(',') {
            let trimmed = entry.trim();
            if trimmed.is_empty() {
                return Err(PolyError::BadExponent {
                    entry: entry.to_string(),
                });
            }
            let e: usize = trimmed.parse().map_err(|_| PolyError::BadExponent {
                entry: trimmed.to_string(),
            })?;
            if e > Self::MAX_PARSED_EXPONENT {
                return Err(PolyError::BadExponent {
                    entry: trimmed.to_string(),
                });
            }
            exps.push(e);
        }
        Self::from_exponents(&exps)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = self.coeffs.last()?;
        Some((self.coeffs.len() - 1) * 64 + (63 - last.leading_zeros() as usize))
    }

    pub fn coeff(&self, exp: usize) -> bool {
        let (w, b) = (exp / 64, exp % 64);
        self.coeffs.get(w).is_some_and(|word| (word >> b) & 1 == 1)
    }

    pub fn set_coeff(&mut self, exp: usize, value: bool) {
        let (w, b) = (exp / 64, exp % 64);
        if w >= self.coeffs.len() {
            if !value {
                return;
            }
            self.coeffs.resize(w + 1, 0);
        }
        if value {
            self.coeffs[w] |= 1 << b;
        } else {
            self.coeffs[w] &= !(1 << b);
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn exponents(&self) -> Vec<usize> {
        let deg = match self.degree() {
            Some(d) => d,
            None => return Vec::new(),
        };
        (0..=deg).filter(|&e| self.coeff(e)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = vec![0u64; self.coeffs.len().max(other.coeffs.len())];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0)
                ^ other.coeffs.get(i).copied().unwrap_or(0);
        }
        let mut p = BinaryPolynomial { coeffs };
        p.normalize();
        p
    }

    /// Multiply by x^k.
    fn shift(&self, k: usize) -> Self {
        let mut out = BinaryPolynomial::zero();
        if let Some(deg) = self.degree() {
            for e in 0..=deg {
                if self.coeff(e) {
                    out.set_coeff(e + k, true);
                }
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut acc = BinaryPolynomial::zero();
        if let Some(deg) = self.degree() {
            for e in 0..=deg {
                if self.coeff(e) {
                    acc = acc.add(&other.shift(e));
                }
            }
        }
        acc
    }

    /// Long division over GF(2): self = q·b + r with deg r < deg b.
    pub fn div_rem(&self, b: &Self) -> Result<(Self, Self), PolyError> {
        let db = b.degree().ok_or(PolyError::DivisionByZero)?;
        let mut r = self.clone();
        let mut q = BinaryPolynomial::zero();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let k = dr - db;
            q.set_coeff(k, true);
            r = r.add(&b.shift(k));
        }
        Ok((q, r))
    }

    pub fn divides(&self, other: &Self) -> bool {
        match other.div_rem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// True iff this polynomial divides x^n − 1.
    pub fn divides_x_pow_plus_one(&self, n: usize) -> bool {
        self.divides(&BinaryPolynomial::x_pow_plus_one(n))
    }

    /// Coefficient vector (c_0, …, c_deg) as Bits of length deg+1.
    pub fn coefficient_bits(&self) -> Bits {
        let deg = match self.degree() {
            Some(d) => d,
            None => return Bits::zeros(0),
        };
        let mut bits = Bits::zeros(deg + 1);
        for e in 0..=deg {
            if self.coeff(e) {
                bits.set(e + 1, true);
            }
        }
        bits
    }
}

impl fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exponents()
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPolynomial({self})")
    }
}
