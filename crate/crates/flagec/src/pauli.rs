//! Phaseless n-qubit Pauli operators in symplectic (X|Z) bit representation.
//!
//! Phases are deliberately not tracked: the protocols in this crate only
//! consume commutation relations and bit patterns, so Y is the x=z=1 bit
//! pair and products are component-wise XOR. Qubit indices are 1-based.

use std::fmt;

use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliParseError {
    #[error("empty operator string")]
    Empty,
    #[error("invalid character {found:?} at position {pos} (expected I, X, Y or Z)")]
    InvalidChar { pos: usize, found: char },
    #[error("token {token:?} is not of the form X<index>")]
    BadToken { token: String },
    #[error("qubit index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate qubit index {index}")]
    DuplicateIndex { index: usize },
    #[error("dense operator has length {found}, expected {expected}")]
    LengthMismatch { found: usize, expected: usize },
}

/// Single-qubit Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub const NONTRIVIAL: [PauliKind; 3] = [PauliKind::X, PauliKind::Y, PauliKind::Z];

    /// (x bit, z bit) of the symplectic representation.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
            PauliKind::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliKind::I,
            (true, false) => PauliKind::X,
            (true, true) => PauliKind::Y,
            (false, true) => PauliKind::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliKind::I => 'I',
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliKind::I),
            'X' => Some(PauliKind::X),
            'Y' => Some(PauliKind::Y),
            'Z' => Some(PauliKind::Z),
            _ => None,
        }
    }

    /// True iff the two single-qubit Paulis anticommute.
    pub fn anticommutes(self, other: PauliKind) -> bool {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        (x1 & z2) ^ (z1 & x2)
    }
}

impl fmt::Display for PauliKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// An n-qubit Pauli operator as paired X/Z bit vectors (phase ignored).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pauli {
    x: Bits,
    z: Bits,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        Pauli {
            x: Bits::zeros(n),
            z: Bits::zeros(n),
        }
    }

    pub fn from_parts(x: Bits, z: Bits) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts must have equal length");
        Pauli { x, z }
    }

    /// X-type operator with the given support bits.
    pub fn x_type(support: &Bits) -> Self {
        Pauli {
            x: support.clone(),
            z: Bits::zeros(support.len()),
        }
    }

    /// Z-type operator with the given support bits.
    pub fn z_type(support: &Bits) -> Self {
        Pauli {
            x: Bits::zeros(support.len()),
            z: support.clone(),
        }
    }

    pub fn single(n: usize, qubit: usize, kind: PauliKind) -> Self {
        let mut p = Pauli::identity(n);
        p.set(qubit, kind);
        p
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> PauliKind {
        PauliKind::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, kind: PauliKind) {
        let (x, z) = kind.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    /// Compose `kind` onto qubit `qubit` (phaseless product).
    pub fn mul_at(&mut self, qubit: usize, kind: PauliKind) {
        let (x, z) = kind.bits();
        if x {
            self.x.flip(qubit);
        }
        if z {
            self.z.flip(qubit);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// The 2n-bit string (x_1..x_n | z_1..z_n).
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    /// Phaseless group product: component-wise XOR of the x and z parts.
    pub fn multiply(&self, other: &Pauli) -> Pauli {
        assert_eq!(self.n(), other.n(), "length mismatch in multiply");
        Pauli {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        }
    }

    pub fn mul_assign(&mut self, other: &Pauli) {
        assert_eq!(self.n(), other.n(), "length mismatch in multiply");
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// True iff Σ_j (x_j·z'_j ⊕ z_j·x'_j) = 0 over GF(2).
    pub fn commutes(&self, other: &Pauli) -> bool {
        assert_eq!(self.n(), other.n(), "length mismatch in commutes");
        !(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// Number of qubits with a non-identity tensor factor (Y counts once).
    pub fn weight(&self) -> usize {
        let mut count = 0;
        let mut seen = self.x.clone();
        seen.xor_assign(&self.z);
        // positions set in exactly one of x, z
        count += seen.weight();
        // positions set in both (Y) were cancelled by the xor; add overlap
        let overlap = self.x.ones().filter(|&q| self.z.get(q)).count();
        count + overlap
    }

    /// 1-based positions carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|&q| self.get(q) != PauliKind::I)
            .collect()
    }

    /// The l-qubit left cyclic shift: P_{l+1}…P_n P_1…P_l.
    pub fn left_cyclic_shift(&self, l: usize) -> Pauli {
        let n = self.n();
        assert!(
            l < n.max(1),
            "shift {l} out of range 0..={}",
            n.saturating_sub(1)
        );
        if l == 0 {
            return self.clone();
        }
        let mut out = Pauli::identity(n);
        for q in 1..=n {
            let src = (q + l - 1) % n + 1;
            out.set(q, self.get(src));
        }
        out
    }

    /// Parse the dense form "IXZYI".
    pub fn from_dense_str(s: &str) -> Result<Pauli, PauliParseError> {
        if s.is_empty() {
            return Err(PauliParseError::Empty);
        }
        let n = s.chars().count();
        let mut p = Pauli::identity(n);
        for (i, c) in s.chars().enumerate() {
            match PauliKind::from_letter(c) {
                Some(kind) => p.set(i + 1, kind),
                None => {
                    return Err(PauliParseError::InvalidChar {
                        pos: i + 1,
                        found: c,
                    })
                }
            }
        }
        Ok(p)
    }

    /// Parse the sparse form "X1 Z3 Y5" (order-insensitive, duplicate
    /// indices rejected). An empty or all-whitespace string is the identity.
    pub fn from_sparse_str(s: &str, n: usize) -> Result<Pauli, PauliParseError> {
        let mut p = Pauli::identity(n);
        let mut seen = Bits::zeros(n);
        for token in s.split_whitespace() {
            let mut chars = token.chars();
            let letter = chars.next().ok_or_else(|| PauliParseError::BadToken {
                token: token.to_string(),
            })?;
            let kind = PauliKind::from_letter(letter)
                .filter(|k| *k != PauliKind::I)
                .ok_or_else(|| PauliParseError::BadToken {
                    token: token.to_string(),
                })?;
            let index: usize = chars
                .as_str()
                .parse()
                .map_err(|_| PauliParseError::BadToken {
                    token: token.to_string(),
                })?;
            if index == 0 || index > n {
                return Err(PauliParseError::IndexOutOfRange { index, n });
            }
            if seen.get(index) {
                return Err(PauliParseError::DuplicateIndex { index });
            }
            seen.set(index, true);
            p.set(index, kind);
        }
        Ok(p)
    }

    /// Parse either form; strings containing digits are treated as sparse.
    pub fn parse(s: &str, n: usize) -> Result<Pauli, PauliParseError> {
        let trimmed = s.trim();
        if trimmed.chars().any(|c| c.is_ascii_digit()) || trimmed.is_empty() {
            Pauli::from_sparse_str(trimmed, n)
        } else {
            let p = Pauli::from_dense_str(trimmed)?;
            if p.n() != n {
                return Err(PauliParseError::LengthMismatch {
                    found: p.n(),
                    expected: n,
                });
            }
            Ok(p)
        }
    }

    pub fn dense_string(&self) -> String {
        (1..=self.n()).map(|q| self.get(q).letter()).collect()
    }

    /// Sparse form; the identity renders as an empty string.
    pub fn sparse_string(&self) -> String {
        let mut parts = Vec::new();
        for q in 1..=self.n() {
            let kind = self.get(q);
            if kind != PauliKind::I {
                parts.push(format!("{}{}", kind.letter(), q));
            }
        }
        parts.join(" ")
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dense_string())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({})", self.dense_string())
    }
}
