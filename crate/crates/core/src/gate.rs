//! Clifford gates as phase-free column updates on check-matrix rows.
//!
//! Conjugation by a Clifford gate is linear over the binary-symplectic
//! representation, so a gate is a 2n×2n bit matrix acting on rows from the
//! right. The matrices are never materialized in the hot path: every
//! supported gate touches at most four bits per row, and
//! [`GateAction::apply_to_row`] performs exactly that update. The full
//! matrix is available via [`GateAction::matrix`] for property checks
//! (symplecticity M·Ω·Mᵀ = Ω).
//!
//! Phase-free conjugation rules:
//!   H(i):        X ↔ Z
//!   S(i):        X ↔ Y, Z fixed
//!   √X(i):       Z ↔ Y, X fixed
//!   CNOT(c, t):  X_c → X_c X_t, Z_t → Z_c Z_t, X_t and Z_c fixed
//!   √XX(i, j):   X_i, X_j fixed, Z_i → Y_i X_j, Z_j → X_i Y_j

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2;
use crate::pauli::{symplectic_product_words, words_for, PauliString};

/// The supported gate alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    SqrtX,
    Cnot,
    SqrtXx,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::S | GateKind::SqrtX => 1,
            GateKind::Cnot | GateKind::SqrtXx => 2,
        }
    }

    /// True for two-qubit gates that act symmetrically on their operands.
    pub fn is_symmetric(self) -> bool {
        matches!(self, GateKind::SqrtXx)
    }

    pub const ALL: [GateKind; 5] =
        [GateKind::H, GateKind::S, GateKind::SqrtX, GateKind::Cnot, GateKind::SqrtXx];
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::SqrtX => "SqrtX",
            GateKind::Cnot => "CNOT",
            GateKind::SqrtXx => "SqrtXX",
        };
        write!(f, "{s}")
    }
}

/// A gate bound to concrete qubit indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateAction {
    kind: GateKind,
    a: usize,
    b: usize, // == a for single-qubit gates
}

impl GateAction {
    pub fn single(kind: GateKind, qubit: usize) -> Result<Self> {
        if kind.arity() != 1 {
            return Err(Error::Config(format!("{kind} takes two qubits")));
        }
        Ok(Self { kind, a: qubit, b: qubit })
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Result<Self> {
        if kind.arity() != 2 {
            return Err(Error::Config(format!("{kind} takes one qubit")));
        }
        if a == b {
            return Err(Error::DuplicateQubit(a));
        }
        Ok(Self { kind, a, b })
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, a: q, b: q }
    }

    pub fn s(q: usize) -> Self {
        Self { kind: GateKind::S, a: q, b: q }
    }

    pub fn sqrt_x(q: usize) -> Self {
        Self { kind: GateKind::SqrtX, a: q, b: q }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT requires distinct qubits");
        Self { kind: GateKind::Cnot, a: control, b: target }
    }

    pub fn sqrt_xx(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "SqrtXX requires distinct qubits");
        Self { kind: GateKind::SqrtXx, a, b }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// The touched qubit indices (one entry for single-qubit gates).
    pub fn qubits(&self) -> Vec<usize> {
        if self.kind.arity() == 1 {
            vec![self.a]
        } else {
            vec![self.a, self.b]
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if self.kind.arity() == 2 && self.a == self.b {
            return Err(Error::DuplicateQubit(self.a));
        }
        Ok(())
    }

    /// Apply the column-update rule to one check-matrix row given as packed
    /// x and z blocks.
    #[inline]
    pub(crate) fn apply_to_row(&self, x: &mut [u64], z: &mut [u64]) {
        match self.kind {
            GateKind::H => {
                let (w, b) = (self.a / 64, self.a % 64);
                let diff = (x[w] ^ z[w]) & (1 << b);
                x[w] ^= diff;
                z[w] ^= diff;
            }
            GateKind::S => {
                let (w, b) = (self.a / 64, self.a % 64);
                z[w] ^= x[w] & (1 << b);
            }
            GateKind::SqrtX => {
                let (w, b) = (self.a / 64, self.a % 64);
                x[w] ^= z[w] & (1 << b);
            }
            GateKind::Cnot => {
                let (cw, cb) = (self.a / 64, self.a % 64);
                let (tw, tb) = (self.b / 64, self.b % 64);
                x[tw] ^= ((x[cw] >> cb) & 1) << tb;
                z[cw] ^= ((z[tw] >> tb) & 1) << cb;
            }
            GateKind::SqrtXx => {
                let (iw, ib) = (self.a / 64, self.a % 64);
                let (jw, jb) = (self.b / 64, self.b % 64);
                let t = ((z[iw] >> ib) & 1) ^ ((z[jw] >> jb) & 1);
                x[iw] ^= t << ib;
                x[jw] ^= t << jb;
            }
        }
    }

    /// Materialize the induced 2n×2n bit matrix M with rows packed as
    /// (x-block | z-block); row c is the image of the c-th basis Pauli, so
    /// applying the gate equals right multiplication G' = G·M.
    pub fn matrix(&self, n: usize) -> Result<Vec<Vec<u64>>> {
        self.validate(n)?;
        let words = words_for(n);
        let mut rows = Vec::with_capacity(2 * n);
        for c in 0..2 * n {
            let mut x = vec![0u64; words];
            let mut z = vec![0u64; words];
            if c < n {
                x[c / 64] |= 1 << (c % 64);
            } else {
                let q = c - n;
                z[q / 64] |= 1 << (q % 64);
            }
            self.apply_to_row(&mut x, &mut z);
            let mut row = x;
            row.extend_from_slice(&z);
            rows.push(row);
        }
        Ok(rows)
    }
}

impl std::fmt::Display for GateAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.kind.arity() == 1 {
            write!(f, "{}({})", self.kind, self.a)
        } else {
            write!(f, "{}({},{})", self.kind, self.a, self.b)
        }
    }
}

/// The 2n×2n symplectic metric with off-diagonal identity blocks.
#[derive(Clone, Copy, Debug)]
pub struct SymplecticMetric {
    n: usize,
}

impl SymplecticMetric {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn entry(&self, r: usize, c: usize) -> bool {
        r + self.n == c || c + self.n == r
    }

    /// Rows of Ω packed like gate matrices.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let words = 2 * words_for(self.n);
        (0..2 * self.n)
            .map(|r| {
                let mut row = vec![0u64; words];
                let c = if r < self.n { r + self.n } else { r - self.n };
                // Column index in packed (x | z) layout.
                let bit = if c < self.n { c } else { words_for(self.n) * 64 + (c - self.n) };
                gf2::set_bit(&mut row, bit);
                row
            })
            .collect()
    }
}

/// a·Ω·bᵀ over GF(2), the commutation bilinear used everywhere.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<u8> {
    a.symplectic_product(b)
}

/// Phase-free Pauli product (XOR of representations).
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

/// Check M·Ω·Mᵀ = Ω for a materialized gate matrix: rows interpreted as
/// Pauli vectors must reproduce the metric pattern pairwise.
pub fn is_symplectic(matrix: &[Vec<u64>], n: usize) -> bool {
    let words = words_for(n);
    if matrix.len() != 2 * n {
        return false;
    }
    let metric = SymplecticMetric::new(n);
    for r in 0..2 * n {
        for c in r..2 * n {
            let (rx, rz) = matrix[r].split_at(words);
            let (cx, cz) = matrix[c].split_at(words);
            let prod = symplectic_product_words(rx, rz, cx, cz);
            if (prod == 1) != metric.entry(r, c) {
                return false;
            }
        }
    }
    true
}
