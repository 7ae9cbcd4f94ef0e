//! Exact truncated convolution of big-integer sequences.
//!
//! Three routes compute the same thing:
//!
//! - **sparse**: iterate over the nonzero entries of the sparser operand
//!   (theta-like series have `O(sqrt N)` nonzeros);
//! - **schoolbook**: direct `O(N^2)` sum, on `i128` when the output provably
//!   fits and on `BigInt` otherwise;
//! - **multi-modular**: number-theoretic transforms modulo a few 62-bit primes,
//!   recombined with Garner's algorithm into signed big integers.
//!
//! [`Strategy::Auto`] picks a route from operand sparsity, length and a
//! coefficient-size bound. All routes are exact and deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::par;

/// Primes `p = c * 2^32 + 1 < 2^62` with a primitive root.
const NTT_PRIMES: [(u64, u64); 8] = [
    (4611685941117976577, 3),
    (4611685692009873409, 19),
    (4611685606110527489, 3),
    (4611685318347718657, 5),
    (4611685232448372737, 3),
    (4611685219563470849, 3),
    (4611685125074190337, 5),
    (4611685090714451969, 3),
];
const PRIME_BITS: u64 = 61;

const SCHOOLBOOK_MAX_LEN: usize = 96;
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Sparse,
    Schoolbook,
    MultiModular,
}

/// First `len` coefficients of the product of `a` and `b`.
pub fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    convolve_with(a, b, len, Strategy::Auto)
}

pub fn convolve_with(a: &[BigInt], b: &[BigInt], len: usize, strategy: Strategy) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if len == 0 {
        return Vec::new();
    }
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let strategy = match strategy {
        Strategy::Auto => choose(a, b, len),
        s => s,
    };
    match strategy {
        Strategy::Sparse => sparse(a, b, len),
        Strategy::Schoolbook => schoolbook(a, b, len),
        Strategy::MultiModular => {
            multi_modular(a, b, len).unwrap_or_else(|| schoolbook(a, b, len))
        }
        Strategy::Auto => unreachable!(),
    }
}

fn choose(a: &[BigInt], b: &[BigInt], len: usize) -> Strategy {
    let nnz = nonzeros(a).min(nonzeros(b));
    // Sparse work is nnz * len; a transform costs roughly 3 * 64 * len * log(len).
    let log = usize::BITS - len.leading_zeros();
    if nnz <= 8 || nnz <= 24 * log as usize {
        Strategy::Sparse
    } else if len <= SCHOOLBOOK_MAX_LEN {
        Strategy::Schoolbook
    } else {
        Strategy::MultiModular
    }
}

fn nonzeros(a: &[BigInt]) -> usize {
    a.iter().filter(|x| !x.is_zero()).count()
}

fn max_bits(a: &[BigInt]) -> u64 {
    a.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn bits_of(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

/// Bit bound on every output coefficient: `|c_i| < 2^bound`.
fn output_bits(a: &[BigInt], b: &[BigInt]) -> u64 {
    max_bits(a) + max_bits(b) + bits_of(a.len().min(b.len()))
}

fn to_i128(a: &[BigInt]) -> Vec<i128> {
    a.iter().map(|x| x.to_i128().expect("checked by bit bound")).collect()
}

fn sparse(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let (sp, dense) = if nonzeros(a) <= nonzeros(b) { (a, b) } else { (b, a) };
    let terms: Vec<(usize, &BigInt)> = sp
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .collect();
    let mut out = vec![BigInt::zero(); len];
    if output_bits(a, b) <= 126 {
        let dense = to_i128(dense);
        let terms: Vec<(usize, i128)> = terms
            .iter()
            .map(|&(j, x)| (j, x.to_i128().expect("checked by bit bound")))
            .collect();
        par::fill_chunks(&mut out, CHUNK, |start, chunk| {
            for (off, slot) in chunk.iter_mut().enumerate() {
                let i = start + off;
                let mut acc = 0i128;
                for &(j, x) in &terms {
                    if j > i {
                        break;
                    }
                    if let Some(y) = dense.get(i - j) {
                        acc += x * y;
                    }
                }
                *slot = BigInt::from(acc);
            }
        });
    } else {
        par::fill_chunks(&mut out, CHUNK, |start, chunk| {
            for (off, slot) in chunk.iter_mut().enumerate() {
                let i = start + off;
                let mut acc = BigInt::zero();
                for &(j, x) in &terms {
                    if j > i {
                        break;
                    }
                    if let Some(y) = dense.get(i - j) {
                        if !y.is_zero() {
                            acc += x * y;
                        }
                    }
                }
                *slot = acc;
            }
        });
    }
    out
}

fn schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if output_bits(a, b) <= 126 {
        let (a, b) = (to_i128(a), to_i128(b));
        par::fill_chunks(&mut out, CHUNK, |start, chunk| {
            for (off, slot) in chunk.iter_mut().enumerate() {
                let i = start + off;
                let lo = i.saturating_sub(b.len() - 1);
                let hi = i.min(a.len() - 1);
                let mut acc = 0i128;
                if lo <= hi {
                    for j in lo..=hi {
                        acc += a[j] * b[i - j];
                    }
                }
                *slot = BigInt::from(acc);
            }
        });
    } else {
        par::fill_chunks(&mut out, CHUNK, |start, chunk| {
            for (off, slot) in chunk.iter_mut().enumerate() {
                let i = start + off;
                let mut acc = BigInt::zero();
                for (j, x) in a.iter().enumerate().take(i + 1) {
                    if x.is_zero() {
                        continue;
                    }
                    if let Some(y) = b.get(i - j) {
                        acc += x * y;
                    }
                }
                *slot = acc;
            }
        });
    }
    out
}

/// `None` when the coefficient bound needs more primes than available.
fn multi_modular(a: &[BigInt], b: &[BigInt], len: usize) -> Option<Vec<BigInt>> {
    let needed = output_bits(a, b) + 1;
    let count = needed.div_ceil(PRIME_BITS).max(1) as usize;
    if count > NTT_PRIMES.len() {
        return None;
    }
    let primes = &NTT_PRIMES[..count];
    let size = (a.len() + b.len() - 1).next_power_of_two();
    let residues: Vec<Vec<u64>> = par::map_slice(primes, |&(p, g)| {
        let field = Field::new(p, g);
        let mut fa = field.reduce_all(a, size);
        let mut fb = field.reduce_all(b, size);
        field.ntt(&mut fa, false);
        field.ntt(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = field.mul(*x, *y);
        }
        field.ntt(&mut fa, true);
        fa.truncate(len);
        fa.resize(len, 0);
        fa
    });
    let garner = Garner::new(primes.iter().map(|&(p, _)| p).collect());
    let mut out = vec![BigInt::zero(); len];
    par::fill_chunks(&mut out, CHUNK, |start, chunk| {
        let mut r = vec![0u64; count];
        for (off, slot) in chunk.iter_mut().enumerate() {
            for (t, res) in residues.iter().enumerate() {
                r[t] = res[start + off];
            }
            *slot = garner.reconstruct(&r);
        }
    });
    Some(out)
}

struct Field {
    p: u64,
    g: u64,
}

impl Field {
    fn new(p: u64, g: u64) -> Self {
        Self { p, g }
    }

    #[inline]
    fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.p as u128) as u64
    }

    #[inline]
    fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    fn pow(&self, mut x: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, x: u64) -> u64 {
        self.pow(x, self.p - 2)
    }

    fn reduce(&self, x: &BigInt) -> u64 {
        match x.to_i64() {
            Some(v) => v.rem_euclid(self.p as i64) as u64,
            None => x
                .mod_floor(&BigInt::from(self.p))
                .to_u64()
                .expect("residue below p"),
        }
    }

    fn reduce_all(&self, a: &[BigInt], size: usize) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|x| self.reduce(x)).collect();
        out.resize(size, 0);
        out
    }

    /// In-place iterative radix-2 transform; `size` must be a power of two.
    fn ntt(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let step = (half * 2) as u64;
            let mut w = self.pow(self.g, (self.p - 1) / step);
            if inverse {
                w = self.inv(w);
            }
            let mut twiddles = Vec::with_capacity(half);
            let mut t = 1u64;
            for _ in 0..half {
                twiddles.push(t);
                t = self.mul(t, w);
            }
            for block in a.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for ((x, y), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                    let u = *x;
                    let v = self.mul(*y, tw);
                    *x = self.add(u, v);
                    *y = self.sub(u, v);
                }
            }
            half *= 2;
        }
        if inverse {
            let n_inv = self.inv(n as u64 % self.p);
            for x in a.iter_mut() {
                *x = self.mul(*x, n_inv);
            }
        }
    }
}

/// Mixed-radix CRT reconstruction into the symmetric range `(-P/2, P/2]`.
struct Garner {
    primes: Vec<u64>,
    /// `inv[i][j] = p_j^{-1} mod p_i` for `j < i`.
    inv: Vec<Vec<u64>>,
    modulus: BigInt,
    half: BigInt,
}

impl Garner {
    fn new(primes: Vec<u64>) -> Self {
        let inv = primes
            .iter()
            .enumerate()
            .map(|(i, &pi)| {
                let f = Field::new(pi, 0);
                primes[..i].iter().map(|&pj| f.inv(pj % pi)).collect()
            })
            .collect();
        let modulus: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
        let half = &modulus >> 1;
        Self {
            primes,
            inv,
            modulus,
            half,
        }
    }

    fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let t = self.primes.len();
        let mut digits = vec![0u64; t];
        for i in 0..t {
            let f = Field::new(self.primes[i], 0);
            let mut x = residues[i];
            for (d, inv) in digits[..i].iter().zip(&self.inv[i]) {
                x = f.mul(f.sub(x, d % self.primes[i]), *inv);
            }
            digits[i] = x;
        }
        let mut value = BigInt::from(digits[t - 1]);
        for i in (0..t - 1).rev() {
            value = value * self.primes[i] + digits[i];
        }
        if value > self.half {
            value -= &self.modulus;
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop, prop_assert_eq, prop_oneof, proptest, Just, ProptestConfig, Strategy};
    use super::Strategy as Route;

    fn oracle(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    const ALL: [Route; 4] = [
        Route::Auto,
        Route::Sparse,
        Route::Schoolbook,
        Route::MultiModular,
    ];

    #[test]
    fn small_product() {
        let a = big(&[1, 1]);
        let b = big(&[1, -1]);
        for s in ALL {
            assert_eq!(convolve_with(&a, &b, 3, s), big(&[1, 0, -1]), "{s:?}");
        }
    }

    #[test]
    fn truncates_and_pads() {
        let a = big(&[1, 2, 3]);
        let b = big(&[4, 5]);
        for s in ALL {
            assert_eq!(convolve_with(&a, &b, 2, s), big(&[4, 13]));
            assert_eq!(convolve_with(&a, &b, 6, s), big(&[4, 13, 22, 15, 0, 0]));
        }
        assert!(convolve(&a, &b, 0).is_empty());
    }

    #[test]
    fn huge_coefficients_use_several_primes() {
        let x: BigInt = BigInt::from(3).pow(150u32);
        let a: Vec<BigInt> = (0..200).map(|i| &x * (i % 7 - 3)).collect();
        let b: Vec<BigInt> = (0..200).map(|i| -&x + i).collect();
        let want = oracle(&a, &b, 300);
        assert_eq!(convolve_with(&a, &b, 300, Route::MultiModular), want);
        assert_eq!(convolve_with(&a, &b, 300, Route::Schoolbook), want);
        assert_eq!(convolve_with(&a, &b, 300, Route::Sparse), want);
    }

    #[test]
    fn beyond_prime_budget_falls_back() {
        let x: BigInt = BigInt::from(7).pow(700u32);
        let a = vec![x.clone(), -x.clone(), x.clone()];
        let want = oracle(&a, &a, 5);
        assert_eq!(convolve_with(&a, &a, 5, Route::MultiModular), want);
    }

    fn seq() -> impl proptest::strategy::Strategy<Value = Vec<BigInt>> {
        prop::collection::vec(
            prop_oneof![
                3 => Just(0i64),
                5 => -1_000_000i64..1_000_000,
                1 => any::<i64>(),
            ],
            1..160,
        )
        .prop_map(|v: Vec<i64>| big(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn every_route_matches_oracle(a in seq(), b in seq(), extra in 0usize..40) {
            let len = (a.len() + b.len()).saturating_sub(extra).max(1);
            let want = oracle(&a, &b, len);
            for s in ALL {
                prop_assert_eq!(&convolve_with(&a, &b, len, s), &want);
            }
        }
    }
}
