#![allow(dead_code)]
//! Test-side oracles, written independently of the library code paths.

use polarscatter::construct::CodeSpec;
use polarscatter::dense::{encode_dense_oracle, kronecker_generator};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Packed GF(2) row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Row(pub Vec<u64>);

impl Row {
    pub fn zeros(n: usize) -> Self {
        Row(vec![0; n.div_ceil(64)])
    }
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    pub fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    pub fn xor(&mut self, other: &Row) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Inverse of a square GF(2) matrix by Gauss-Jordan elimination, `None`
/// when singular.
pub fn gf2_inverse(m: &[Row], n: usize) -> Option<Vec<Row>> {
    let mut a: Vec<Row> = m.to_vec();
    let mut inv: Vec<Row> = (0..n)
        .map(|i| {
            let mut r = Row::zeros(n);
            r.flip(i);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r].get(col))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r].get(col) {
                let (pa, pi) = (a[col].clone(), inv[col].clone());
                a[r].xor(&pa);
                inv[r].xor(&pi);
            }
        }
    }
    Some(inv)
}

/// `G_AA`: rows and columns of the Kronecker generator restricted to the
/// info set.
pub fn g_aa(spec: &CodeSpec) -> Vec<Row> {
    let g = kronecker_generator(spec.n_log2()).unwrap();
    let a = spec.info_set();
    a.iter()
        .map(|&r| {
            let mut row = Row::zeros(a.len());
            for (j, &c) in a.iter().enumerate() {
                if g.get(r, c) == 1 {
                    row.flip(j);
                }
            }
            row
        })
        .collect()
}

/// Systematic codeword through the dense oracle: solve `u_A G_AA = info`
/// with `inv = G_AA^{-1}`, then encode `u` densely.
pub fn systematic_via_dense(info: &[u8], spec: &CodeSpec, inv: &[Row]) -> Vec<u8> {
    let k = spec.k();
    let mut u_a = Row::zeros(k);
    for (i, &b) in info.iter().enumerate() {
        if b == 1 {
            u_a.xor(&inv[i]);
        }
    }
    let mut u = vec![0u8; spec.n()];
    for (j, &pos) in spec.info_set().iter().enumerate() {
        u[pos] = u_a.get(j) as u8;
    }
    encode_dense_oracle(&u, spec.n_log2()).unwrap()
}

pub fn random_bits<R: Rng>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..=1u8)).collect()
}

/// BPSK over AWGN at the given Es/N0, returned as channel LLRs.
pub fn bpsk_llrs<R: Rng>(bits: &[u8], esn0_db: f64, rng: &mut R) -> Vec<f64> {
    let sigma2 = 1.0 / (2.0 * 10f64.powf(esn0_db / 10.0));
    let noise = Normal::new(0.0, sigma2.sqrt()).unwrap();
    bits.iter()
        .map(|&b| 2.0 * ((1.0 - 2.0 * f64::from(b)) + noise.sample(rng)) / sigma2)
        .collect()
}

/// CRC-16/CCITT-FALSE by polynomial long division: the 0xFFFF init is
/// XORed into the first 16 positions of the zero-extended message.
pub fn crc16_long_division(bits: &[u8]) -> u16 {
    const POLY: u32 = 0x1_1021;
    let mut padded: Vec<u8> = bits.iter().copied().chain(std::iter::repeat_n(0, 16)).collect();
    for b in &mut padded[..16] {
        *b ^= 1;
    }
    for i in 0..bits.len() {
        if padded[i] == 1 {
            for j in 0..17 {
                padded[i + j] ^= (POLY >> (16 - j)) as u8 & 1;
            }
        }
    }
    padded[bits.len()..].iter().fold(0u16, |acc, &b| (acc << 1) | u16::from(b))
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let cdf = |v: &[f64], x: f64| v.partition_point(|&y| y <= x) as f64 / v.len() as f64;
    a.iter()
        .chain(&b)
        .map(|&x| (cdf(&a, x) - cdf(&b, x)).abs())
        .fold(0.0, f64::max)
}
