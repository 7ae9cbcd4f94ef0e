//! High-precision floating point helpers.
//!
//! Every quantity the adjoint formula needs reduces to rationals, square
//! roots and powers of pi: `Gamma` at half-integers is a rational multiple of
//! `sqrt(pi)` or an integer factorial, and `x^s` for half-integral `s` is an
//! integer power times `sqrt(x)`.

use dashu_base::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_traits::One;

use crate::qseries::Rational;
use crate::{Error, HalfInt, Result};

pub type Float = FBig<HalfEven>;

pub const PRECISION_ENV: &str = "RC_ADJOINT_PRECISION_DIGITS";
pub const DEFAULT_DIGITS: usize = 50;
const GUARD_BITS: usize = 32;

/// Working precision in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision(usize);

impl Precision {
    pub fn from_digits(digits: usize) -> Self {
        let digits = digits.max(17);
        Self((digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS)
    }

    /// Reads [`PRECISION_ENV`]; unset or unparsable values give 50 digits.
    pub fn from_env() -> Self {
        let digits = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_DIGITS);
        Self::from_digits(digits)
    }

    pub fn bits(self) -> usize {
        self.0
    }

    pub fn int(self, x: &BigInt) -> Float {
        Float::from(to_ibig(x)).with_precision(self.0).value()
    }

    pub fn uint(self, x: u64) -> Float {
        Float::from(x).with_precision(self.0).value()
    }

    pub fn rational(self, r: &Rational) -> Float {
        let num = self.int(r.numer());
        if r.denom().is_one() {
            num
        } else {
            num / self.int(r.denom())
        }
    }

    /// `pi = 16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi(self) -> Float {
        let wide = Precision(self.0 + GUARD_BITS);
        let pi = wide.uint(16) * wide.atan_inv(5) - wide.uint(4) * wide.atan_inv(239);
        pi.with_precision(self.0).value()
    }

    fn atan_inv(self, x: u64) -> Float {
        let x2 = self.uint(x * x);
        let mut power = self.uint(1) / self.uint(x);
        let mut sum = power.clone();
        let steps = self.0 as f64 / (2.0 * (x as f64).log2()) + 2.0;
        for k in 1..=steps as u64 {
            power /= &x2;
            let term = power.clone() / self.uint(2 * k + 1);
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
        }
        sum
    }

    /// `x^e` for `x > 0` and half-integral `e`.
    pub fn half_pow(self, x: &Float, e: HalfInt) -> Float {
        let whole = e.floor();
        let mut out = powi(self, x, whole);
        if !e.is_integral() {
            out *= x.sqrt();
        }
        out
    }

    /// `Gamma(x)` for `x > 0` in `(1/2)Z`.
    pub fn gamma(self, x: HalfInt) -> Result<Float> {
        let (r, sqrt_pi) = gamma_half(x)?;
        let v = self.rational(&r);
        Ok(if sqrt_pi { v * self.pi().sqrt() } else { v })
    }
}

fn powi(p: Precision, x: &Float, e: i64) -> Float {
    let mut acc = p.uint(1);
    let mut base = x.clone();
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    if e < 0 {
        p.uint(1) / acc
    } else {
        acc
    }
}

/// `Gamma(x) = r` or `r * sqrt(pi)` for `x > 0` in `(1/2)Z`; the flag says
/// whether the `sqrt(pi)` factor is present.
pub fn gamma_half(x: HalfInt) -> Result<(Rational, bool)> {
    if x.twice() <= 0 {
        return Err(Error::Precondition(format!("Gamma({x}) is not finite and positive")));
    }
    // Gamma(1) = 1, Gamma(1/2) = sqrt(pi); then Gamma(y + 1) = y Gamma(y).
    let start = if x.is_integral() { 2 } else { 1 };
    let mut r = Rational::one();
    let mut y = start;
    while y < x.twice() {
        r *= Rational::new(BigInt::from(y), BigInt::from(2));
        y += 2;
    }
    Ok((r, !x.is_integral()))
}

pub fn to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

pub fn to_ibig(x: &BigInt) -> IBig {
    let (sign, bytes) = x.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

pub fn is_zero(x: &Float) -> bool {
    x.repr().is_zero()
}
