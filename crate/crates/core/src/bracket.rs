//! The Rankin-Cohen bracket
//!
//! ```text
//! [f, g]_nu = sum_{r=0}^{nu} C_r(k, l; nu) D^r f D^(nu-r) g,
//! C_r(k, l; nu) = (-1)^(nu-r) binom(nu, r) Gamma(k+nu) Gamma(l+nu) / (Gamma(k+r) Gamma(l+nu-r))
//! ```
//!
//! for weights `k, l` in `(1/2)Z`. All Gamma quotients are telescoping
//! products, so every coefficient is an exact rational.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};

use crate::qseries::{from_integers, product_meta, to_integers, QSeries, Rational};
use crate::{conv, Error, Result, TwiceWeight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BracketParams {
    pub k: TwiceWeight,
    pub l: TwiceWeight,
    pub nu: u32,
}

impl BracketParams {
    pub fn new(k: TwiceWeight, l: TwiceWeight, nu: u32) -> Self {
        Self { k, l, nu }
    }

    /// All `C_0, ..., C_nu`.
    pub fn coefficients(&self) -> Vec<Rational> {
        (0..=self.nu).map(|r| rc_coefficient(self, r)).collect()
    }
}

/// `Gamma(x + hi) / Gamma(x + lo)` as a telescoping product.
pub fn gamma_ratio(x: TwiceWeight, hi: u32, lo: u32) -> Rational {
    let factor = |j: u32| Rational::new(BigInt::from(x.twice() + 2 * j as i64), BigInt::from(2));
    if hi >= lo {
        (lo..hi).map(factor).fold(Rational::one(), |acc, f| acc * f)
    } else {
        (hi..lo).map(factor).fold(Rational::one(), |acc, f| acc / f)
    }
}

/// `C_r(k, l; nu)`; panics if `r > nu`.
pub fn rc_coefficient(p: &BracketParams, r: u32) -> Rational {
    assert!(r <= p.nu, "r = {r} exceeds nu = {}", p.nu);
    let sign = if (p.nu - r).is_multiple_of(2) { 1 } else { -1 };
    let binom = binomial(BigInt::from(p.nu), BigInt::from(r));
    Rational::from_integer(binom * sign)
        * gamma_ratio(p.k, p.nu, r)
        * gamma_ratio(p.l, p.nu, p.nu - r)
}

/// `alpha(k, l, nu, n, m) = sum_r C_r(k, l; nu) n^r m^(nu-r)`, the
/// coefficient of `q^(n+m)` in `[q^n, q^m]_nu`.
pub fn alpha_coeff(p: &BracketParams, n: u64, m: u64) -> Rational {
    alpha_with(&p.coefficients(), n, m)
}

/// `alpha` from precomputed `C_r`.
pub fn alpha_with(coefficients: &[Rational], n: u64, m: u64) -> Rational {
    let nu = coefficients.len() as u32 - 1;
    let (n, m) = (BigInt::from(n), BigInt::from(m));
    coefficients
        .iter()
        .enumerate()
        .map(|(r, c)| {
            let r = r as u32;
            c * (n.pow(r) * m.pow(nu - r))
        })
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// `[f, g]_nu` to the common precision of `f` and `g`.
pub fn rc_bracket(f: &QSeries, g: &QSeries, p: &BracketParams) -> Result<QSeries> {
    for (name, series, want) in [("f", f, p.k), ("g", g, p.l)] {
        if let Some(w) = series.twice_weight() {
            if w != want {
                return Err(Error::WeightMismatch(format!(
                    "{name} has weight {w} but the bracket expects {want}"
                )));
            }
        }
    }
    let precision = f.precision().min(g.precision());
    let (fi, fd) = to_integers(&f.coeffs()[..precision]);
    let (gi, gd) = to_integers(&g.coeffs()[..precision]);
    let coefficients = p.coefficients();
    let common = coefficients
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));

    let mut total = vec![BigInt::zero(); precision];
    for (r, c) in coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let r = r as u32;
        let scale = c.numer() * (&common / c.denom());
        let df = d_integers(&fi, r);
        let dg = d_integers(&gi, p.nu - r);
        for (t, x) in total.iter_mut().zip(conv::convolve(&df, &dg, precision)) {
            if !x.is_zero() {
                *t += x * &scale;
            }
        }
    }
    let den = common * fd * gd;
    let series = QSeries::new(from_integers(total, &den))?;
    Ok(match product_meta(f.meta(), g.meta(), p.nu) {
        Some(m) => series.with_meta(m),
        None => series,
    })
}

fn d_integers(a: &[BigInt], r: u32) -> Vec<BigInt> {
    if r == 0 {
        return a.to_vec();
    }
    a.iter()
        .enumerate()
        .map(|(n, x)| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x * BigInt::from(n).pow(r)
            }
        })
        .collect()
}
