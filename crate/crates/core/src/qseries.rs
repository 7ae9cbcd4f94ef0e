//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] knows the coefficients of `q^0 .. q^(precision-1)` and
//! nothing beyond: every operation reports the minimum precision of its
//! inputs and never pads with invented zeros.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::conv;
use crate::{Error, Result, TwiceWeight};

pub type Rational = BigRational;

/// Characters modulo 4; the only ones the catalog forms carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterMod4 {
    Trivial,
    ChiMinus4,
}

impl std::ops::Mul for CharacterMod4 {
    type Output = CharacterMod4;

    fn mul(self, other: CharacterMod4) -> CharacterMod4 {
        if self == other {
            CharacterMod4::Trivial
        } else {
            CharacterMod4::ChiMinus4
        }
    }
}

impl CharacterMod4 {
    pub fn eval(self, d: i64) -> i64 {
        match self {
            CharacterMod4::Trivial => 1,
            CharacterMod4::ChiMinus4 => match d.rem_euclid(4) {
                1 => 1,
                3 => -1,
                _ => 0,
            },
        }
    }

    /// `chi_{-4}^e`.
    pub fn chi_minus4_pow(e: i64) -> CharacterMod4 {
        if e.rem_euclid(2) == 1 {
            CharacterMod4::ChiMinus4
        } else {
            CharacterMod4::Trivial
        }
    }

    /// The extra character `chi` picked up by `[f, g]_nu` for weights `k`, `l`:
    /// trivial when both are integral, `chi_{-4}^k` when only `l` is
    /// half-integral, `chi_{-4}^l` when only `k` is, `chi_{-4}^(k+l)` when both are.
    pub fn bracket_factor(k: TwiceWeight, l: TwiceWeight) -> CharacterMod4 {
        match (k.is_integral(), l.is_integral()) {
            (true, true) => CharacterMod4::Trivial,
            (true, false) => Self::chi_minus4_pow(k.twice() / 2),
            (false, true) => Self::chi_minus4_pow(l.twice() / 2),
            (false, false) => Self::chi_minus4_pow((k + l).twice() / 2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CharacterMod4::Trivial => "trivial",
            CharacterMod4::ChiMinus4 => "chi_minus4",
        }
    }
}

/// Weight, level and character bookkeeping attached to a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormMeta {
    pub twice_weight: TwiceWeight,
    pub level: u64,
    pub character: CharacterMod4,
    pub is_cusp_at_infinity: bool,
}

impl FormMeta {
    pub fn new(
        twice_weight: TwiceWeight,
        level: u64,
        character: CharacterMod4,
        is_cusp_at_infinity: bool,
    ) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidMeta("level must be positive".into()));
        }
        if !twice_weight.is_integral() && !level.is_multiple_of(4) {
            return Err(Error::InvalidMeta(format!(
                "half-integral weight {twice_weight} needs level divisible by 4, got {level}"
            )));
        }
        Ok(Self {
            twice_weight,
            level,
            character,
            is_cusp_at_infinity,
        })
    }

    fn same_space(&self, other: &FormMeta) -> bool {
        self.twice_weight == other.twice_weight
            && self.level == other.level
            && self.character == other.character
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
    meta: Option<FormMeta>,
}

impl QSeries {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self { coeffs, meta: None })
    }

    pub fn from_integers<I, T>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(
            coeffs
                .into_iter()
                .map(|c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero(precision: usize) -> Result<Self> {
        Self::new(vec![Rational::zero(); precision])
    }

    /// `q^n` known to `precision` coefficients.
    pub fn monomial(n: usize, precision: usize) -> Result<Self> {
        let mut s = Self::zero(precision)?;
        if n < precision {
            s.coeffs[n] = Rational::one();
        }
        Ok(s)
    }

    /// Attaches metadata; the cusp flag is replaced by whether `a(0) = 0`.
    pub fn with_meta(mut self, meta: FormMeta) -> Self {
        self.meta = Some(FormMeta {
            is_cusp_at_infinity: self.coeffs[0].is_zero(),
            ..meta
        });
        self
    }

    pub fn without_meta(mut self) -> Self {
        self.meta = None;
        self
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn meta(&self) -> Option<&FormMeta> {
        self.meta.as_ref()
    }

    pub fn twice_weight(&self) -> Option<TwiceWeight> {
        self.meta.map(|m| m.twice_weight)
    }

    /// The first `precision` coefficients; errors when more are requested
    /// than are known.
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if precision > self.precision() {
            return Err(Error::InsufficientPrecision {
                what: "truncation".into(),
                required: precision,
                available: self.precision(),
            });
        }
        Ok(Self {
            coeffs: self.coeffs[..precision].to_vec(),
            meta: self.meta,
        })
    }

    /// Index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> QSeries {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect::<Vec<_>>();
        let s = Self {
            coeffs,
            meta: None,
        };
        match self.meta {
            Some(m) => s.with_meta(m),
            None => s,
        }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        series_mul(self, other)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            twice_weight: self.meta.map(|m| m.twice_weight.twice()),
            level: self.meta.map(|m| m.level),
            character: self.meta.map(|m| m.character),
            precision: self.precision(),
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        if json.precision != json.coeffs.len() {
            return Err(Error::Parse(format!(
                "precision {} disagrees with {} coefficients",
                json.precision,
                json.coeffs.len()
            )));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        let series = Self::new(coeffs)?;
        match (json.twice_weight, json.level, json.character) {
            (None, None, None) => Ok(series),
            (Some(w), Some(level), Some(chi)) => {
                let meta = FormMeta::new(TwiceWeight::from_twice(w), level, chi, false)?;
                Ok(series.with_meta(meta))
            }
            _ => Err(Error::InvalidMeta(
                "twice_weight, level and character must be all null or all set".into(),
            )),
        }
    }
}

/// On-disk series format; coefficients are `"p/q"` strings in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub twice_weight: Option<i64>,
    pub level: Option<u64>,
    pub character: Option<CharacterMod4>,
    pub precision: usize,
    pub coeffs: Vec<String>,
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match n {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "q^{n}")?,
                _ => write!(f, "{a}*q^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.precision())
    }
}

/// `ca * a + cb * b`; metadata survives only when both sides describe the
/// same space.
pub fn series_add(a: &QSeries, b: &QSeries, ca: &Rational, cb: &Rational) -> QSeries {
    let precision = a.precision().min(b.precision());
    let coeffs = a.coeffs[..precision]
        .iter()
        .zip(&b.coeffs[..precision])
        .map(|(x, y)| ca * x + cb * y)
        .collect();
    let s = QSeries { coeffs, meta: None };
    match (a.meta, b.meta) {
        (Some(ma), Some(mb)) if ma.same_space(&mb) => s.with_meta(ma),
        _ => s,
    }
}

/// Cauchy product to the common precision. Weights add, levels take the
/// lcm and characters multiply together with the bracket character factor
/// (the product is the `nu = 0` bracket).
pub fn series_mul(a: &QSeries, b: &QSeries) -> QSeries {
    let precision = a.precision().min(b.precision());
    let (ia, da) = to_integers(&a.coeffs[..precision]);
    let (ib, db) = to_integers(&b.coeffs[..precision]);
    let prod = conv::convolve(&ia, &ib, precision);
    let den = da * db;
    let coeffs = from_integers(prod, &den);
    let s = QSeries { coeffs, meta: None };
    match product_meta(a.meta.as_ref(), b.meta.as_ref(), 0) {
        Some(m) => s.with_meta(m),
        None => s,
    }
}

/// Metadata of `[f, g]_nu` from the metadata of `f` and `g`.
pub(crate) fn product_meta(
    a: Option<&FormMeta>,
    b: Option<&FormMeta>,
    nu: u32,
) -> Option<FormMeta> {
    let (a, b) = (a?, b?);
    let character = a
        .character
        * b.character
        * CharacterMod4::bracket_factor(a.twice_weight, b.twice_weight);
    Some(FormMeta {
        twice_weight: TwiceWeight::from_twice(
            a.twice_weight.twice() + b.twice_weight.twice() + 4 * nu as i64,
        ),
        level: a.level.lcm(&b.level),
        character,
        is_cusp_at_infinity: false,
    })
}

/// `D^r = (q d/dq)^r`: multiplies the n-th coefficient by `n^r`.
pub fn apply_d(a: &QSeries, r: u32) -> QSeries {
    if r == 0 {
        return a.clone();
    }
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if c.is_zero() {
                c.clone()
            } else {
                c * BigInt::from(n).pow(r)
            }
        })
        .collect();
    QSeries { coeffs, meta: None }
}

/// Clears denominators: returns `(c * den, den)` with `den` the lcm.
pub(crate) fn to_integers(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coeffs
        .iter()
        .map(|c| {
            if c.denom() == &den {
                c.numer().clone()
            } else {
                c.numer() * (&den / c.denom())
            }
        })
        .collect();
    (ints, den)
}

pub(crate) fn from_integers(ints: Vec<BigInt>, den: &BigInt) -> Vec<Rational> {
    if den.is_one() {
        ints.into_iter().map(Rational::from_integer).collect()
    } else {
        ints.into_iter()
            .map(|c| Rational::new(c, den.clone()))
            .collect()
    }
}

/// The classical theta series `sum_{n in Z} q^(n^2)` of weight 1/2 on
/// `Gamma_0(4)`.
pub fn make_theta(precision: usize) -> Result<QSeries> {
    let mut s = QSeries::zero(precision)?;
    s.coeffs[0] = Rational::one();
    let two = Rational::from_integer(BigInt::from(2));
    let mut n = 1usize;
    while n * n < precision {
        s.coeffs[n * n] = two.clone();
        n += 1;
    }
    let meta = FormMeta::new(TwiceWeight::from_twice(1), 4, CharacterMod4::Trivial, false)?;
    Ok(s.with_meta(meta))
}

/// One factor `eta(multiplier * z)^exponent` of an eta quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EtaFactor {
    pub multiplier: u64,
    pub exponent: i64,
}

impl EtaFactor {
    pub fn new(multiplier: u64, exponent: i64) -> Self {
        Self {
            multiplier,
            exponent,
        }
    }
}

/// Expansion of `prod eta(d z)^e`, using Euler's pentagonal number theorem
/// for `prod (1 - q^n)` and a power recurrence for each exponent. The
/// result carries no metadata.
pub fn make_eta_product(factors: &[EtaFactor], precision: usize) -> Result<QSeries> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    if factors.iter().any(|f| f.multiplier == 0) {
        return Err(Error::Precondition("eta multiplier must be positive".into()));
    }
    let order24: i64 = factors
        .iter()
        .map(|f| f.multiplier as i64 * f.exponent)
        .sum();
    if order24 % 24 != 0 {
        let g = order24.gcd(&24);
        return Err(Error::NonIntegralOrder(format!(
            "{}/{}",
            order24 / g,
            24 / g
        )));
    }
    let order = order24 / 24;
    if order < 0 {
        return Err(Error::NegativeOrder(order));
    }
    let order = order as usize;
    let mut coeffs = vec![BigInt::zero(); precision];
    if order < precision {
        let len = precision - order;
        let mut acc = vec![BigInt::zero(); len];
        acc[0] = BigInt::one();
        for f in factors.iter().filter(|f| f.exponent != 0) {
            // eta(d z)^e is a series in q^d: expand in q and spread.
            let d = f.multiplier as usize;
            let short = len.div_ceil(d);
            let base = pentagonal(1, short);
            let mut power = vec![BigInt::zero(); len];
            for (i, c) in sparse_power(&base, f.exponent, short).into_iter().enumerate() {
                power[i * d] = c;
            }
            acc = conv::convolve(&acc, &power, len);
        }
        for (i, c) in acc.into_iter().enumerate() {
            coeffs[order + i] = c;
        }
    }
    QSeries::from_integers(coeffs)
}

/// Nonzero terms of `prod_{n >= 1} (1 - q^(d n))` below `len`.
fn pentagonal(d: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0usize, 1i64)];
    for k in 1usize.. {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let lo = d * (k * (3 * k - 1) / 2);
        let hi = d * (k * (3 * k + 1) / 2);
        if lo >= len {
            break;
        }
        terms.push((lo, sign));
        if hi < len {
            terms.push((hi, sign));
        }
    }
    terms.sort_unstable();
    terms
}

/// `f^e` for a sparse integer series with `f(0) = 1`, from the identity
/// `n g_n = sum_j ((e + 1) j - n) f_j g_(n-j)`.
fn sparse_power(f: &[(usize, i64)], e: i64, len: usize) -> Vec<BigInt> {
    debug_assert_eq!(f.first(), Some(&(0, 1)));
    let tail = &f[1..];
    if let Some(small) = sparse_power_i128(tail, e, len) {
        return small.into_iter().map(BigInt::from).collect();
    }
    let mut g = vec![BigInt::zero(); len];
    g[0] = BigInt::one();
    for n in 1..len {
        let mut acc = BigInt::zero();
        for &(j, fj) in tail {
            if j > n {
                break;
            }
            let w = (e + 1) * j as i64 - n as i64;
            if w != 0 && !g[n - j].is_zero() {
                acc += &g[n - j] * (w * fj);
            }
        }
        g[n] = acc / n as i64;
    }
    g
}

fn sparse_power_i128(tail: &[(usize, i64)], e: i64, len: usize) -> Option<Vec<i128>> {
    let mut g = vec![0i128; len];
    g[0] = 1;
    for n in 1..len {
        let mut acc = 0i128;
        for &(j, fj) in tail {
            if j > n {
                break;
            }
            let w = ((e + 1) * j as i64 - n as i64) as i128 * fj as i128;
            acc = acc.checked_add(g[n - j].checked_mul(w)?)?;
        }
        g[n] = acc / n as i128;
    }
    Some(g)
}

/// Bernoulli number `B_k` (with `B_1 = +1/2`), by the Akiyama-Tanigawa
/// algorithm.
pub fn bernoulli(k: usize) -> Rational {
    let mut a: Vec<Rational> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        a.push(Rational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * BigInt::from(j);
        }
    }
    a.swap_remove(0)
}

/// `E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n` on `SL_2(Z)`.
pub fn make_eisenstein(weight_k: u32, precision: usize) -> Result<QSeries> {
    if weight_k < 4 || weight_k % 2 == 1 {
        return Err(Error::InvalidWeight(format!(
            "Eisenstein series need even weight >= 4, got {weight_k}"
        )));
    }
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let factor = -Rational::from_integer(BigInt::from(2 * weight_k)) / bernoulli(weight_k as usize);
    let mut sigma = vec![BigInt::zero(); precision];
    for d in 1..precision {
        let p = BigInt::from(d).pow(weight_k - 1);
        for m in (d..precision).step_by(d) {
            sigma[m] += &p;
        }
    }
    let mut coeffs: Vec<Rational> = sigma
        .into_iter()
        .map(|s| &factor * Rational::from_integer(s))
        .collect();
    coeffs[0] = Rational::one();
    let meta = FormMeta::new(
        TwiceWeight::from_int(weight_k as i64),
        1,
        CharacterMod4::Trivial,
        false,
    )?;
    Ok(QSeries::new(coeffs)?.with_meta(meta))
}

/// Lossy view of a coefficient, for numerics.
pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
