//! Phase-free Pauli strings in the binary-symplectic representation.
//!
//! An n-qubit Pauli string is stored as 2n bits split into an x-block and a
//! z-block, with qubit i owning bit i of each block: I = (0,0), X = (1,0),
//! Y = (1,1), Z = (0,1). Global phases are discarded throughout, so operator
//! multiplication is a plain XOR of representations and two strings commute
//! iff their binary symplectic product vanishes.
//!
//! Bits are packed little-endian into `u64` words (qubit i lives in word
//! i / 64, bit i % 64). The byte serialization follows the same order:
//! x-block first, then z-block, each padded to whole bytes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

/// Number of `u64` words needed for `n` bits.
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of an `n`-bit block.
pub(crate) fn tail_mask(n: usize) -> u64 {
    let rem = n % WORD_BITS;
    if rem == 0 {
        u64::MAX
    } else {
        (1u64 << rem) - 1
    }
}

/// A phase-free n-qubit Pauli operator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w] }
    }

    /// Build from per-qubit (x, z) bit pairs.
    pub fn from_bits(n: usize, xz: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut p = Self::identity(n);
        for (i, (x, z)) in xz.into_iter().enumerate().take(n) {
            p.set(i, x, z);
        }
        p
    }

    /// A single X on qubit `i`.
    pub fn single_x(n: usize, i: usize) -> Self {
        let mut p = Self::identity(n);
        p.set(i, true, false);
        p
    }

    /// A single Z on qubit `i`.
    pub fn single_z(n: usize, i: usize) -> Self {
        let mut p = Self::identity(n);
        p.set(i, false, true);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        Self { n, x, z }
    }

    /// The (x, z) bit pair of qubit `i`.
    pub fn get(&self, i: usize) -> (bool, bool) {
        let (w, b) = (i / WORD_BITS, i % WORD_BITS);
        ((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, i: usize, x: bool, z: bool) {
        assert!(i < self.n, "qubit {i} out of range for {} qubits", self.n);
        let (w, b) = (i / WORD_BITS, i % WORD_BITS);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Symmetric weight: the number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// (w_X, w_Y, w_Z) occupation counts.
    pub fn letter_counts(&self) -> (usize, usize, usize) {
        let mut wx = 0;
        let mut wy = 0;
        let mut wz = 0;
        for (&x, &z) in self.x.iter().zip(&self.z) {
            wy += (x & z).count_ones() as usize;
            wx += (x & !z).count_ones() as usize;
            wz += (!x & z).count_ones() as usize;
        }
        (wx, wy, wz)
    }

    /// True if the string contains no Z or Y factor (x-block only).
    pub fn is_pure_x(&self) -> bool {
        self.z.iter().all(|&w| w == 0)
    }

    /// True if the string contains no X or Y factor (z-block only).
    pub fn is_pure_z(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Phase-free product: componentwise XOR of the representations.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    pub(crate) fn mul_assign(&mut self, other: &Self) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Binary symplectic product: 0 if the operators commute, 1 if they
    /// anticommute. Equals a·Ω·bᵀ over GF(2) for the block-off-diagonal
    /// symplectic metric Ω.
    pub fn symplectic_product(&self, other: &Self) -> Result<u8> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        Ok(symplectic_product_words(&self.x, &self.z, &other.x, &other.z))
    }

    /// Serialize as x-block then z-block, little-endian bit packing, each
    /// block padded to whole bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nb = self.n.div_ceil(8);
        let mut out = Vec::with_capacity(2 * nb);
        for block in [&self.x, &self.z] {
            let mut bytes: Vec<u8> = block.iter().flat_map(|w| w.to_le_bytes()).collect();
            bytes.truncate(nb);
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn from_bytes(n: usize, bytes: &[u8]) -> Result<Self> {
        let nb = n.div_ceil(8);
        if bytes.len() != 2 * nb {
            return Err(Error::LengthMismatch(bytes.len(), 2 * nb));
        }
        let unpack = |chunk: &[u8]| -> Vec<u64> {
            let mut words = vec![0u64; words_for(n)];
            for (i, &b) in chunk.iter().enumerate() {
                words[i / 8] |= (b as u64) << (8 * (i % 8));
            }
            if let Some(last) = words.last_mut() {
                *last &= tail_mask(n);
            }
            words
        };
        Ok(Self { n, x: unpack(&bytes[..nb]), z: unpack(&bytes[nb..]) })
    }
}

pub(crate) fn symplectic_product_words(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> u8 {
    let mut acc = 0u64;
    for i in 0..ax.len() {
        acc ^= ax[i] & bz[i];
        acc ^= az[i] & bx[i];
    }
    (acc.count_ones() & 1) as u8
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let c = match self.get(i) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString(\"{self}\")")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = PauliString::identity(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            let (x, z) = match c {
                'I' | 'i' => (false, false),
                'X' | 'x' => (true, false),
                'Y' | 'y' => (true, true),
                'Z' | 'z' => (false, true),
                other => return Err(Error::InvalidPauliChar(other)),
            };
            p.set(i, x, z);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn binary_representation_of_xyzi() {
        // XYZI <-> (1,1,0,0, 0,1,1,0)
        let op = p("XYZI");
        let bits: Vec<u8> = (0..4).map(|i| op.get(i).0 as u8).chain((0..4).map(|i| op.get(i).1 as u8)).collect();
        assert_eq!(bits, vec![1, 1, 0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn single_qubit_anticommutation() {
        assert_eq!(p("X").symplectic_product(&p("Z")).unwrap(), 1);
        assert_eq!(p("XYZI").symplectic_product(&p("XYZI")).unwrap(), 0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(p("XX").symplectic_product(&p("X")).is_err());
        assert!(p("XX").mul(&p("X")).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(p("X").mul(&p("Y")).unwrap(), p("Z"));
        assert_eq!(p("ZZI").mul(&p("ZIZ")).unwrap(), p("IZZ"));
        let a = p("XYZXYZ");
        assert!(a.mul(&a).unwrap().is_identity());
    }

    #[test]
    fn weights_and_letter_counts() {
        let op = p("IXYZZ");
        assert_eq!(op.weight(), 4);
        assert_eq!(op.letter_counts(), (1, 1, 2));
        assert!(p("XXIIX").is_pure_x());
        assert!(p("ZIZ").is_pure_z());
        assert!(!p("XZ").is_pure_x());
    }

    #[test]
    fn text_round_trip() {
        for s in ["I", "XYZ", "ZZIIXY", "IIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIZ"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn byte_round_trip_spans_word_boundary() {
        let s: String = (0..70).map(|i| ['I', 'X', 'Y', 'Z'][i % 4]).collect();
        let op = p(&s);
        let back = PauliString::from_bytes(70, &op.to_bytes()).unwrap();
        assert_eq!(op, back);
    }
}
