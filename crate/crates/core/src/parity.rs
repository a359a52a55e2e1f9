//! Joint phase/output parity matrix.
//!
//! Rows are qubits, columns are parities expressed in the basis of the values
//! the qubits currently hold. A circuit CNOT(c, t) sets `t ← c ⊕ t`; in this
//! basis that is the row operation `row_c ^= row_t` (the control row receives
//! the XOR).

use crate::angle::Angle;
use crate::bits::{word_count, BitMatrix, BitVec};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("control and target rows are the same ({0})")]
    SameQubit(usize),
    #[error("column {0} does not have exactly one 1")]
    NotCompletable(usize),
    #[error("output matrix is singular")]
    SingularMatrix,
}

/// `[phase | aux | output]` columns over `rows` qubits, packed row-major.
///
/// Aux columns carry values a merged block must present at a barrier.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JointParityMatrix {
    rows: usize,
    phase: usize,
    aux: usize,
    words: usize,
    bits: Vec<u64>,
    live: Vec<u64>,
    angles: Arc<[Angle]>,
}

impl JointParityMatrix {
    /// Phase columns with their angles plus one output column per row.
    pub fn new(rows: usize, phase_cols: &[(BitVec, Angle)], output_cols: &[BitVec]) -> Self {
        Self::with_aux(rows, phase_cols, &[], output_cols)
    }

    pub fn with_aux(rows: usize, phase_cols: &[(BitVec, Angle)], aux_cols: &[BitVec], output_cols: &[BitVec]) -> Self {
        assert_eq!(output_cols.len(), rows, "one output column per row");
        let phase = phase_cols.len();
        let aux = aux_cols.len();
        let ncols = phase + aux + rows;
        let words = word_count(ncols);
        let mut m = JointParityMatrix {
            rows,
            phase,
            aux,
            words,
            bits: vec![0; rows * words],
            live: vec![0; words],
            angles: phase_cols.iter().map(|(_, a)| *a).collect(),
        };
        let all = phase_cols.iter().map(|(c, _)| c).chain(aux_cols).chain(output_cols);
        for (j, col) in all.enumerate() {
            assert_eq!(col.len(), rows);
            for i in col.iter_ones() {
                m.bits[i * words + j / 64] |= 1 << (j % 64);
            }
            m.live[j / 64] |= 1 << (j % 64);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn phase_width(&self) -> usize {
        self.phase
    }

    pub fn aux_width(&self) -> usize {
        self.aux
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn raw_bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn live_mask(&self) -> &[u64] {
        &self.live
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn angle(&self, col: usize) -> Angle {
        self.angles[col]
    }

    pub fn output_col(&self, q: usize) -> usize {
        self.phase + self.aux + q
    }

    pub fn is_live(&self, col: usize) -> bool {
        (self.live[col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn get(&self, r: usize, col: usize) -> bool {
        (self.bits[r * self.words + col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, col: usize, b: bool) {
        let w = &mut self.bits[r * self.words + col / 64];
        if b {
            *w |= 1 << (col % 64);
        } else {
            *w &= !(1 << (col % 64));
        }
    }

    pub fn column(&self, col: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, col) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn column_weight(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col)).count()
    }

    /// Live phase columns, ascending.
    pub fn phase_columns(&self) -> Vec<usize> {
        (0..self.phase).filter(|&c| self.is_live(c)).collect()
    }

    pub fn phase_column_count(&self) -> usize {
        self.phase_columns().len()
    }

    /// `row_control ^= row_target` across every column.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), MatrixError> {
        if control == target {
            return Err(MatrixError::SameQubit(control));
        }
        let w = self.words;
        for k in 0..w {
            let t = self.bits[target * w + k];
            self.bits[control * w + k] ^= t;
        }
        Ok(())
    }

    /// Per-word masks of columns with at least one and at least two 1s.
    pub fn weight_masks(&self) -> (Vec<u64>, Vec<u64>) {
        let w = self.words;
        let mut ones = vec![0u64; w];
        let mut twos = vec![0u64; w];
        for r in 0..self.rows {
            for k in 0..w {
                let b = self.bits[r * w + k];
                twos[k] |= ones[k] & b;
                ones[k] |= b;
            }
        }
        (ones, twos)
    }

    /// Live phase columns of weight one, each with the row holding the 1.
    pub fn completable_columns(&self) -> Vec<(usize, usize)> {
        let (ones, twos) = self.weight_masks();
        (0..self.phase)
            .filter(|&c| self.is_live(c) && (ones[c / 64] >> (c % 64)) & 1 == 1 && (twos[c / 64] >> (c % 64)) & 1 == 0)
            .map(|c| (c, (0..self.rows).find(|&r| self.get(r, c)).unwrap_or(0)))
            .collect()
    }

    /// Retires a weight-one phase column (after its Rz was emitted).
    pub fn remove_column(&mut self, col: usize) -> Result<(), MatrixError> {
        if col >= self.phase || !self.is_live(col) || self.column_weight(col) != 1 {
            return Err(MatrixError::NotCompletable(col));
        }
        self.kill_column(col);
        Ok(())
    }

    /// Clears and retires any column.
    pub fn kill_column(&mut self, col: usize) {
        for r in 0..self.rows {
            self.set(r, col, false);
        }
        self.live[col / 64] &= !(1 << (col % 64));
    }

    pub fn output_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.rows);
        let base = self.phase + self.aux;
        for r in 0..self.rows {
            for q in 0..self.rows {
                if self.get(r, base + q) {
                    m.rows[r].set(q, true);
                }
            }
        }
        m
    }

    /// Sum of Hamming weights of the live phase columns.
    pub fn h1(&self) -> usize {
        let w = self.words;
        let mut mask = vec![0u64; w];
        for c in 0..self.phase {
            mask[c / 64] |= 1 << (c % 64);
        }
        (0..self.rows).map(|r| (0..w).map(|k| (self.bits[r * w + k] & mask[k] & self.live[k]).count_ones() as usize).sum::<usize>()).sum()
    }

    /// CNOTs that reduce the output part to the identity; phase columns are ignored.
    pub fn gaussian_finish(&self) -> Result<Vec<(usize, usize)>, MatrixError> {
        gaussian_elimination(&self.output_matrix())
    }

    /// Length of [`gaussian_finish`](Self::gaussian_finish).
    pub fn h2(&self) -> usize {
        self.gaussian_finish().map(|v| v.len()).unwrap_or(usize::MAX)
    }
}

impl fmt::Display for JointParityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in (0..self.phase).filter(|&c| self.is_live(c)) {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            if self.aux > 0 {
                f.write_str("|")?;
                for c in (self.phase..self.phase + self.aux).filter(|&c| self.is_live(c)) {
                    f.write_str(if self.get(r, c) { "1" } else { "0" })?;
                }
            }
            f.write_str("|")?;
            for q in 0..self.rows {
                f.write_str(if self.get(r, self.output_col(q)) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for JointParityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Minimum-degree Gaussian elimination on a square matrix of columns-in-rows-basis.
///
/// Each returned `(c, t)` is the row operation `row_c ^= row_t`, i.e. the
/// circuit gate CNOT(c, t). Replaying the list on `m` yields the identity.
pub fn gaussian_elimination(m: &BitMatrix) -> Result<Vec<(usize, usize)>, MatrixError> {
    let n = m.nrows();
    if m.cols != n {
        return Err(MatrixError::SingularMatrix);
    }
    let mut a = m.clone();
    let mut finished = vec![false; n];
    let mut ops = Vec::new();
    for _ in 0..n {
        let k = (0..n)
            .filter(|&k| !finished[k])
            .min_by_key(|&k| ((0..n).filter(|&r| a.get(r, k)).count(), k))
            .ok_or(MatrixError::SingularMatrix)?;
        if !a.get(k, k) {
            let base = a.total_weight() - a.rows[k].count_ones();
            let r = (0..n)
                .filter(|&r| r != k && !finished[r] && a.get(r, k))
                .min_by_key(|&r| {
                    let mut row = a.rows[k].clone();
                    row.xor_assign(&a.rows[r]);
                    (base + row.count_ones(), r)
                })
                .ok_or(MatrixError::SingularMatrix)?;
            a.add_row(k, r);
            ops.push((k, r));
        }
        for r in 0..n {
            if r != k && a.get(r, k) {
                a.add_row(r, k);
                ops.push((r, k));
            }
        }
        finished[k] = true;
    }
    debug_assert!(a.is_identity());
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq5_left() -> JointParityMatrix {
        let cols = |s: &str| BitVec::from_str01(s);
        JointParityMatrix::new(
            3,
            &[(cols("110"), Angle::pi_frac(1, 2)), (cols("011"), Angle::pi_frac(1, 4))],
            &[cols("100"), cols("101"), cols("111")],
        )
    }

    #[test]
    fn dump_layout() {
        assert_eq!(eq5_left().to_string(), "10|111\n11|001\n01|011\n");
    }

    #[test]
    fn cnot_is_involution() {
        let m0 = eq5_left();
        let mut m = m0.clone();
        m.apply_cnot(1, 0).unwrap();
        assert_ne!(m, m0);
        m.apply_cnot(1, 0).unwrap();
        assert_eq!(m, m0);
        assert_eq!(m.apply_cnot(2, 2), Err(MatrixError::SameQubit(2)));
    }

    #[test]
    fn completion_and_removal() {
        let mut m = eq5_left();
        assert!(m.completable_columns().is_empty());
        m.apply_cnot(1, 0).unwrap();
        assert_eq!(m.completable_columns(), vec![(0, 0)]);
        m.remove_column(0).unwrap();
        assert_eq!(m.phase_column_count(), 1);
        assert_eq!(m.remove_column(1), Err(MatrixError::NotCompletable(1)));
    }

    #[test]
    fn identity_needs_no_cnots() {
        let m = JointParityMatrix::new(3, &[], &[BitVec::unit(3, 0), BitVec::unit(3, 1), BitVec::unit(3, 2)]);
        assert_eq!(m.gaussian_finish().unwrap(), vec![]);
        assert_eq!(m.h1(), 0);
        assert_eq!(m.h2(), 0);
    }
}
