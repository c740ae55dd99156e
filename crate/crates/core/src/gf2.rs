//! Small GF(2) linear-algebra kit for packed bit rows.
//!
//! Rows are `Vec<u64>` with a fixed bit width; all arithmetic is XOR. Used
//! for rank and membership tests on tableaus, kernel (centralizer) bases and
//! circuit pruning. Row widths here are tiny (≤ 2n bits, n ≲ 100), so plain
//! Gaussian elimination is the right tool.

pub(crate) fn get_bit(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

pub(crate) fn set_bit(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (w, &word) in row.iter().enumerate() {
        if word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

/// An incrementally built row-echelon basis over GF(2).
#[derive(Clone, Debug)]
pub(crate) struct RowBasis {
    /// Echelon rows keyed by pivot position (sorted ascending).
    rows: Vec<(usize, Vec<u64>)>,
}

impl RowBasis {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the basis in place; returns its leading bit if
    /// the residue is nonzero.
    fn reduce(&self, row: &mut [u64]) -> Option<usize> {
        for (pivot, basis_row) in &self.rows {
            if get_bit(row, *pivot) {
                xor_into(row, basis_row);
            }
        }
        leading_bit(row)
    }

    /// Insert a row; returns true if it was independent of the basis.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut r = row.to_vec();
        match self.reduce(&mut r) {
            None => false,
            Some(pivot) => {
                // Back-substitute to keep rows fully reduced.
                for (_, existing) in self.rows.iter_mut() {
                    if get_bit(existing, pivot) {
                        xor_into(existing, &r);
                    }
                }
                let at = self.rows.partition_point(|(p, _)| *p < pivot);
                self.rows.insert(at, (pivot, r));
                true
            }
        }
    }

    /// Membership in the row span.
    pub fn contains(&self, row: &[u64]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r).is_none()
    }

    /// The reduced rows, in pivot order.
    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }
}

/// Two row sets span the same subspace iff the spans contain each other and
/// the ranks agree.
pub(crate) fn same_row_space(a: &[Vec<u64>], b: &[Vec<u64>]) -> bool {
    let mut basis = RowBasis::new();
    for row in a {
        basis.insert(row);
    }
    let rank_a = basis.rank();
    if b.iter().any(|row| !basis.contains(row)) {
        return false;
    }
    let mut basis_b = RowBasis::new();
    for row in b {
        basis_b.insert(row);
    }
    basis_b.rank() == rank_a
}

/// Basis of the right kernel {v : A·vᵀ = 0} of a bit matrix given by rows.
///
/// `columns` lists the valid bit positions (rows may carry padding words
/// whose bits are always zero and must not count as free variables);
/// `words` is the row storage width.
pub(crate) fn kernel_basis(rows: &[Vec<u64>], columns: &[usize], words: usize) -> Vec<Vec<u64>> {
    let mut basis = RowBasis::new();
    for row in rows {
        basis.insert(row);
    }
    let pivots: Vec<usize> = basis.pivots().collect();
    let reduced: Vec<&[u64]> = basis.rows().collect();

    let mut kernel = Vec::with_capacity(columns.len() - pivots.len());
    for &free in columns.iter().filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; words];
        set_bit(&mut v, free);
        // Each pivot row with a 1 in the free column forces its pivot bit.
        for (row, &p) in reduced.iter().zip(&pivots) {
            if get_bit(row, free) {
                set_bit(&mut v, p);
            }
        }
        kernel.push(v);
    }
    kernel
}
