//! Packed GF(2) vectors and small dense matrices.

use std::fmt;

/// A fixed-length vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; word_count(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn from_str01(s: &str) -> Self {
        let bits: Vec<bool> = s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect();
        Self::from_bools(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec { len: self.len, words }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Square-or-rectangular GF(2) matrix stored as bit rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitMatrix {
    pub rows: Vec<BitVec>,
    pub cols: usize,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        BitMatrix { rows: (0..n).map(|i| BitVec::unit(n, i)).collect(), cols: n }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows: vec![BitVec::zeros(cols); rows], cols }
    }

    /// Builds a matrix whose column `j` is `columns[j]`.
    pub fn from_columns(nrows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in c.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(c) {
                v.set(i, true);
            }
        }
        v
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, dst: usize, src: usize) {
        let s = self.rows[src].clone();
        self.rows[dst].xor_assign(&s);
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.cols && self.rows.iter().enumerate().all(|(i, r)| r.count_ones() == 1 && r.get(i))
    }

    pub fn rank(&self) -> usize {
        let mut basis = Basis::new(self.cols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.cols && self.rank() == self.cols
    }

    pub fn total_weight(&self) -> usize {
        self.rows.iter().map(BitVec::count_ones).sum()
    }
}

/// Incremental echelon basis used for span and independence queries.
#[derive(Clone, Debug)]
pub struct Basis {
    len: usize,
    /// (pivot, vector) with each vector's pivot cleared from every later vector.
    vecs: Vec<(usize, BitVec)>,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Basis { len, vecs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (p, b) in &self.vecs {
            if r.get(*p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                self.vecs.push((p, r));
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_iteration_crosses_words() {
        let mut v = BitVec::zeros(130);
        for i in [0, 63, 64, 129] {
            v.set(i, true);
        }
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.count_ones(), 4);
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = BitMatrix { rows: vec![BitVec::from_str01("110"), BitVec::from_str01("011"), BitVec::from_str01("101")], cols: 3 };
        assert_eq!(m.rank(), 2);
        assert!(!m.is_invertible());
        assert!(BitMatrix::identity(5).is_invertible());
    }
}
