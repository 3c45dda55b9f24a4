//! Dense GF(2) matrices: the materialised Kronecker generator used as the
//! reference against which the streaming encoder is checked.

use crate::error::{Error, Result};

pub const MAX_DENSE_LOG2: u32 = 12;

/// Row-major bit matrix, each row packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        ((self.data[r * self.words_per_row + c / 64] >> (c % 64)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        let w = &mut self.data[r * self.words_per_row + c / 64];
        let mask = 1u64 << (c % 64);
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if self.get(r1, c1) == 0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        if other.get(r2, c2) == 1 {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, 1);
                        }
                    }
                }
            }
        }
        out
    }

    /// GF(2) product.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    let dst = r * out.words_per_row;
                    for (i, w) in other.row_words(k).iter().enumerate() {
                        out.data[dst + i] ^= w;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut acc = vec![0u64; self.words_per_row];
        for (r, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= w;
                }
            }
        }
        (0..self.cols).map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8).collect()
    }
}

/// `F^{⊗n}` built by repeated Kronecker products of the 2×2 kernel.
pub fn kronecker_generator(n_log2: u32) -> Result<BitMatrix> {
    if n_log2 > MAX_DENSE_LOG2 {
        return Err(Error::Config(format!(
            "dense generator limited to N <= {}",
            1 << MAX_DENSE_LOG2
        )));
    }
    let kernel = BitMatrix::from_rows(&[&[1, 0], &[1, 1]]);
    let mut g = BitMatrix::identity(1);
    for _ in 0..n_log2 {
        g = kernel.kron(&g);
    }
    Ok(g)
}

/// Reference encoder `x = u · G_N` with the generator materialised.
pub fn encode_dense_oracle(u: &[u8], n_log2: u32) -> Result<Vec<u8>> {
    let g = kronecker_generator(n_log2)?;
    if u.len() != g.rows() {
        return Err(Error::LengthMismatch { expected: g.rows(), got: u.len() });
    }
    Ok(g.vec_mul(u))
}
