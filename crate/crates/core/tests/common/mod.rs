//! Reference implementations that share no code with the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rankin_cohen::qseries::QSeries;

/// `q^shift * prod_{n >= 1} (1 - q^(d n))^e` by repeated multiplication.
pub fn naive_eta_power(d: usize, e: u32, shift: usize, len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    if shift < len {
        s[shift] = BigInt::one();
    }
    let mut n = 1;
    while d * n < len {
        let step = d * n;
        for _ in 0..e {
            for i in (step..len).rev() {
                let prev = s[i - step].clone();
                s[i] -= prev;
            }
        }
        n += 1;
    }
    s
}

/// Number of `(x, y)` in `Z^2` with `x^2 + y^2 = n`.
pub fn lattice_count(n: i64) -> i64 {
    let mut count = 0;
    let r = (n as f64).sqrt() as i64 + 1;
    for x in -r..=r {
        for y in -r..=r {
            if x * x + y * y == n {
                count += 1;
            }
        }
    }
    count
}

fn half(twice: i64) -> BigRational {
    BigRational::new(BigInt::from(twice), BigInt::from(2))
}

/// Generalized binomial `x (x-1) ... (x-j+1) / j!`.
pub fn binom(x: &BigRational, j: u32) -> BigRational {
    let mut out = BigRational::one();
    for i in 0..j {
        out *= x - BigRational::from_integer(BigInt::from(i));
        out /= BigRational::from_integer(BigInt::from(i + 1));
    }
    out
}

/// `sum_r (-1)^(nu-r) nu! binom(k+nu-1, nu-r) binom(l+nu-1, r) n^r m^(nu-r)`.
pub fn alpha_oracle(k2: i64, l2: i64, nu: u32, n: i64, m: i64) -> BigRational {
    let nu_r = BigRational::from_integer(BigInt::from(nu));
    let one = BigRational::one();
    let kk = half(k2) + &nu_r - &one;
    let ll = half(l2) + &nu_r - &one;
    let fact: BigInt = (1..=nu).map(BigInt::from).product();
    let mut total = BigRational::zero();
    for r in 0..=nu {
        let sign = if (nu - r).is_multiple_of(2) { 1 } else { -1 };
        let c = binom(&kk, nu - r) * binom(&ll, r) * BigRational::from_integer(&fact * sign);
        total += c * BigRational::from_integer(BigInt::from(n).pow(r) * BigInt::from(m).pow(nu - r));
    }
    total
}

pub fn rational_series(max_len: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec((-60i64..60, 1i64..9), 1..max_len).prop_map(|v| {
        QSeries::new(
            v.into_iter()
                .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
                .collect(),
        )
        .unwrap()
    })
}
