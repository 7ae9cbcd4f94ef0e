//! Fourier coefficients of the adjoint of `T_{g,nu}: h -> [h, g]_nu`.
//!
//! For a cusp form `f` of weight `k + l + 2nu`, the adjoint image has
//! coefficients
//!
//! ```text
//! c(n) = beta(n) * L_{f,g,nu,n}(gamma),
//! L_{f,g,nu,n}(s) = sum_m a(n+m) b(m) alpha(k, l, nu, n, m) / (n+m)^s.
//! ```
//!
//! The evaluation point `gamma` and the shape of `beta` depend on which of
//! `k` (the weight of `h`) and `l` (the weight of `g`) are half-integral;
//! see [`case_params`].
//!
//! Partial sums stop at `m = M`. The remainder is bounded with empirical
//! growth constants `|a(n)| <= C_f n^(e_f)`, `|b(m)| <= C_g m^(e_g)` certified
//! over the known coefficients, `|alpha| <= sum_r |C_r| (n+m)^nu`, and an
//! integral comparison of the resulting power sum.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bracket::{alpha_with, BracketParams};
use crate::hp::{self, Float, Precision};
use crate::par;
use crate::qseries::{rational_to_f64, QSeries, Rational};
use crate::{Error, HalfInt, Result, TwiceWeight};

pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// `h` and `g` of integral weight.
    Integral,
    /// Case 1: `h` and `g` both of half-integral weight.
    HalfHalf,
    /// Case 2: `h` integral, `g` half-integral.
    IntFromHalfG,
    /// Case 3: `h` half-integral, `g` integral.
    HalfFromIntG,
}

impl CaseId {
    pub fn from_weights(k: TwiceWeight, l: TwiceWeight) -> CaseId {
        match (k.is_integral(), l.is_integral()) {
            (true, true) => CaseId::Integral,
            (false, false) => CaseId::HalfHalf,
            (true, false) => CaseId::IntFromHalfG,
            (false, true) => CaseId::HalfFromIntG,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseId::Integral => "integral",
            CaseId::HalfHalf => "1",
            CaseId::IntFromHalfG => "2",
            CaseId::HalfFromIntG => "3",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integral" | "0" => Ok(CaseId::Integral),
            "1" | "half_half" => Ok(CaseId::HalfHalf),
            "2" | "int_from_half_g" => Ok(CaseId::IntFromHalfG),
            "3" | "half_from_int_g" => Ok(CaseId::HalfFromIntG),
            _ => Err(Error::Parse(format!(
                "unknown case `{s}`; expected integral, 1, 2 or 3"
            ))),
        }
    }
}

/// A weight configuration: `k` is the weight of the domain forms `h`, `l`
/// the weight of `g`, both as actual (possibly half-integral) weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointCase {
    pub case_id: CaseId,
    #[serde(serialize_with = "ser_half")]
    pub k: TwiceWeight,
    #[serde(serialize_with = "ser_half")]
    pub l: TwiceWeight,
    pub nu: u32,
}

fn ser_half<S: serde::Serializer>(v: &HalfInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl AdjointCase {
    pub fn new(case_id: CaseId, k: TwiceWeight, l: TwiceWeight, nu: u32) -> Result<Self> {
        let actual = CaseId::from_weights(k, l);
        if actual != case_id {
            return Err(Error::CaseMismatch(format!(
                "weights k = {k}, l = {l} belong to case {actual}, not case {case_id}"
            )));
        }
        Ok(Self { case_id, k, l, nu })
    }

    pub fn bracket_params(&self) -> BracketParams {
        BracketParams::new(self.k, self.l, self.nu)
    }

    /// Weight `k + l + 2 nu` of the forms `f` the adjoint acts on.
    pub fn target_weight(&self) -> TwiceWeight {
        self.k + self.l + HalfInt::from_int(2 * self.nu as i64)
    }

    /// Integer parts: the weight `k` or `k + 1/2` is written with integer `k`.
    fn integer_parts(&self) -> (i64, i64) {
        (self.k.floor(), self.l.floor())
    }
}

/// The row of the parameter table for one case:
/// `beta(n) = Gamma(beta_gamma_num) n^(n_exponent) / (Gamma(beta_gamma_den) (4 pi)^(four_pi_exponent))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseParams {
    pub gamma_s: HalfInt,
    pub beta_gamma_num: HalfInt,
    pub beta_gamma_den: HalfInt,
    pub n_exponent: HalfInt,
    pub four_pi_exponent: HalfInt,
}

pub fn case_params(c: &AdjointCase) -> Result<CaseParams> {
    let c = AdjointCase::new(c.case_id, c.k, c.l, c.nu)?;
    let (k, l) = c.integer_parts();
    let nu2 = 2 * c.nu as i64;
    let int = HalfInt::from_int;
    let half = HalfInt::from_twice(1);
    let row = match c.case_id {
        CaseId::Integral => {
            let s = int(k + l + nu2 - 1);
            CaseParams {
                gamma_s: s,
                beta_gamma_num: s,
                beta_gamma_den: int(k - 1),
                n_exponent: int(k - 1),
                four_pi_exponent: int(l + nu2),
            }
        }
        CaseId::HalfHalf => {
            let s = int(k + l + nu2);
            CaseParams {
                gamma_s: s,
                beta_gamma_num: s,
                beta_gamma_den: int(k) - half,
                n_exponent: int(k) - half,
                four_pi_exponent: int(l + nu2) + half,
            }
        }
        CaseId::IntFromHalfG => {
            let s = int(k + l + nu2) - half;
            CaseParams {
                gamma_s: s,
                beta_gamma_num: s,
                beta_gamma_den: int(k - 1),
                n_exponent: int(k - 1),
                four_pi_exponent: int(l + nu2) + half,
            }
        }
        CaseId::HalfFromIntG => {
            let s = int(k + l + nu2) - half;
            CaseParams {
                gamma_s: s,
                beta_gamma_num: s,
                beta_gamma_den: int(k) - half,
                n_exponent: int(k) - half,
                four_pi_exponent: int(l + nu2),
            }
        }
    };
    Ok(row)
}

/// `beta(n)` for a parameter row.
pub fn beta(params: &CaseParams, n: u64, prec: Precision) -> Result<Float> {
    let num = prec.gamma(params.beta_gamma_num)?;
    let den = prec.gamma(params.beta_gamma_den)?;
    let four_pi = prec.uint(4) * prec.pi();
    Ok(num * prec.half_pow(&prec.uint(n), params.n_exponent)
        / (den * prec.half_pow(&four_pi, params.four_pi_exponent)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypotheses {
    Satisfied,
    /// The formula is still evaluated; the message names the failed condition.
    Violated(String),
}

impl Hypotheses {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Hypotheses::Satisfied)
    }
}

/// Checks the growth hypotheses under which the coefficient formula holds.
pub fn validate_hypotheses(c: &AdjointCase, g_is_cusp: bool) -> Hypotheses {
    let (k, l) = c.integer_parts();
    let mut failed = Vec::new();
    match c.case_id {
        CaseId::Integral => {
            if k < 6 {
                failed.push(format!("k >= 6 (k = {k})"));
            }
            if !g_is_cusp && l >= k - 3 {
                failed.push(format!("l < k - 3 for non-cusp g (l = {l}, k = {k})"));
            }
        }
        CaseId::HalfHalf => {
            if g_is_cusp && k <= 2 {
                failed.push(format!("k > 2 for cusp g (k = {k})"));
            }
            if !g_is_cusp && 2 * l >= 2 * k - 3 {
                failed.push(format!("l < k - 3/2 for non-cusp g (l = {l}, k = {k})"));
            }
        }
        CaseId::IntFromHalfG | CaseId::HalfFromIntG => {
            if g_is_cusp && k <= 3 {
                failed.push(format!("k > 3 for cusp g (k = {k})"));
            }
            if !g_is_cusp && l >= k - 2 {
                failed.push(format!("l < k - 2 for non-cusp g (l = {l}, k = {k})"));
            }
        }
    }
    if failed.is_empty() {
        Hypotheses::Satisfied
    } else {
        Hypotheses::Violated(format!("case {} needs {}", c.case_id, failed.join(" and ")))
    }
}

/// `|a(n)| <= constant * n^exponent` over the known range `1 <= n < precision`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthBound {
    pub exponent: f64,
    pub constant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailProfile {
    pub f: GrowthBound,
    pub g: GrowthBound,
}

/// Exponent from the coefficient growth lemmas: `w/2 - 1/4` for cusp forms
/// and `w - 1` otherwise, never below 0 (theta has coefficients 0 or 2).
pub fn lemma_exponent(weight: TwiceWeight, cusp: bool) -> f64 {
    let w = weight.to_f64();
    let e = if cusp { w / 2.0 - 0.25 } else { w - 1.0 };
    e.max(0.0)
}

const ROUND_UP: f64 = 1.0 + 1e-9;

pub fn fit_tail_profile(series: &QSeries, lemma_exponent: f64, epsilon: f64) -> Result<GrowthBound> {
    if series.precision() < 10 {
        return Err(Error::InsufficientPrecision {
            what: "growth fit".into(),
            required: 10,
            available: series.precision(),
        });
    }
    let exponent = lemma_exponent + epsilon;
    let constant = series.coeffs()[1..]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| rational_to_f64(&c.abs()) / ((i + 1) as f64).powf(exponent))
        .fold(0.0, f64::max);
    Ok(GrowthBound {
        exponent,
        constant: constant * ROUND_UP,
    })
}

/// Where the sum over `m` starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SumStart {
    /// Include `m = 0`, the `b(0)` term of a non-cusp `g`.
    #[default]
    Zero,
    /// Start at `m = 1`, dropping the constant term of `g`.
    One,
}

impl SumStart {
    fn first(self) -> usize {
        match self {
            SumStart::Zero => 0,
            SumStart::One => 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LOptions {
    pub sum_from: SumStart,
    pub epsilon: f64,
    pub precision: Precision,
}

impl Default for LOptions {
    fn default() -> Self {
        Self {
            sum_from: SumStart::Zero,
            epsilon: DEFAULT_EPSILON,
            precision: Precision::from_env(),
        }
    }
}

/// A truncated value of `L_{f,g,nu,n}(s)`.
#[derive(Clone, Debug)]
pub struct LValue {
    pub value: Float,
    /// The partial sum runs over `m <= terms_used`.
    pub terms_used: usize,
    pub tail_bound: f64,
    pub s: HalfInt,
}

impl LValue {
    pub fn value_f64(&self) -> f64 {
        hp::to_f64(&self.value)
    }
}

/// Shared precomputation for evaluating `L_{f,g,nu,n}(s)` at many `n`.
pub struct LSeries<'a> {
    f: &'a QSeries,
    g: &'a QSeries,
    coefficients: Vec<Rational>,
    alpha_weight: f64,
    s: HalfInt,
    terms: usize,
    options: LOptions,
    profile: TailProfile,
    /// `(m, b(m))` for nonzero `b(m)` with `start <= m <= terms`.
    g_terms: Vec<(usize, Float)>,
}

impl<'a> LSeries<'a> {
    pub fn new(
        f: &'a QSeries,
        g: &'a QSeries,
        p: &BracketParams,
        s: HalfInt,
        terms: usize,
        options: LOptions,
    ) -> Result<Self> {
        if g.precision() < terms + 1 {
            return Err(Error::InsufficientPrecision {
                what: "g".into(),
                required: terms + 1,
                available: g.precision(),
            });
        }
        let f_weight = p.k + p.l + HalfInt::from_int(2 * p.nu as i64);
        let f_cusp = f.coeffs()[0].is_zero();
        let g_cusp = g.coeffs()[0].is_zero();
        let profile = TailProfile {
            f: fit_tail_profile(f, lemma_exponent(f_weight, f_cusp), options.epsilon)?,
            g: fit_tail_profile(g, lemma_exponent(p.l, g_cusp), options.epsilon)?,
        };
        let coefficients = p.coefficients();
        let alpha_weight = coefficients
            .iter()
            .map(|c| rational_to_f64(&c.abs()))
            .sum::<f64>()
            * ROUND_UP;
        let prec = options.precision;
        let g_terms = g.coeffs()[..=terms]
            .iter()
            .enumerate()
            .skip(options.sum_from.first())
            .filter(|(_, b)| !b.is_zero())
            .map(|(m, b)| (m, prec.rational(b)))
            .collect();
        Ok(Self {
            f,
            g,
            coefficients,
            alpha_weight,
            s,
            terms,
            options,
            profile,
            g_terms,
        })
    }

    pub fn profile(&self) -> &TailProfile {
        &self.profile
    }

    fn require_f(&self, n: usize) -> Result<()> {
        let required = n + self.terms + 1;
        if self.f.precision() < required {
            return Err(Error::InsufficientPrecision {
                what: format!("f at n = {n}"),
                required,
                available: self.f.precision(),
            });
        }
        Ok(())
    }

    /// `a(N) N^(-s)` for `lo <= N < hi`.
    fn weighted_f(&self, lo: usize, hi: usize) -> Vec<Option<Float>> {
        let prec = self.options.precision;
        let neg_s = HalfInt::from_twice(-self.s.twice());
        let coeffs = self.f.coeffs();
        par::map_range(hi - lo, |i| {
            let big_n = lo + i;
            let a = &coeffs[big_n];
            if a.is_zero() || big_n == 0 {
                None
            } else {
                Some(prec.rational(a) * prec.half_pow(&prec.uint(big_n as u64), neg_s))
            }
        })
    }

    fn sum_at(&self, n: usize, weighted: &[Option<Float>], offset: usize) -> Float {
        let prec = self.options.precision;
        let nu0 = self.coefficients.len() == 1;
        let mut acc = prec.uint(0);
        for (m, b) in &self.g_terms {
            let Some(w) = &weighted[n + m - offset] else {
                continue;
            };
            let mut term = w * b;
            if !nu0 {
                let alpha = alpha_with(&self.coefficients, n as u64, *m as u64);
                if alpha.is_zero() {
                    continue;
                }
                term *= prec.rational(&alpha);
            } else if !self.coefficients[0].numer().eq(&BigInt::from(1))
                || !self.coefficients[0].denom().eq(&BigInt::from(1))
            {
                term *= prec.rational(&self.coefficients[0]);
            }
            acc += term;
        }
        acc
    }

    /// Bound on `sum_{m > M} |a(n+m) b(m) alpha(n, m)| (n+m)^(-s)`.
    pub fn tail_bound(&self, n: usize, terms: usize) -> Result<f64> {
        let TailProfile { f, g } = self.profile;
        let scale = f.constant * g.constant * self.alpha_weight;
        if scale == 0.0 {
            return Ok(0.0);
        }
        let t = f.exponent + self.coefficients.len() as f64 - 1.0 - self.s.to_f64();
        let shift = if t > 0.0 { ((n + 1) as f64).powf(t) } else { 1.0 };
        let decay = -(t + g.exponent);
        if decay <= 1.0 {
            return Err(Error::Divergent(decay));
        }
        let sum = if terms == 0 {
            1.0 + 1.0 / (decay - 1.0)
        } else {
            (terms as f64).powf(1.0 - decay) / (decay - 1.0)
        };
        Ok(scale * shift * sum * ROUND_UP)
    }

    pub fn value(&self, n: usize) -> Result<LValue> {
        Ok(self.values(&[n])?.remove(0))
    }

    /// `L_{f,g,nu,n}(s)` for every `n` in `ns`, in order.
    pub fn values(&self, ns: &[usize]) -> Result<Vec<LValue>> {
        if ns.is_empty() {
            return Ok(Vec::new());
        }
        if ns.contains(&0) {
            return Err(Error::Precondition("n must be positive".into()));
        }
        let lo = *ns.iter().min().expect("nonempty");
        let hi = *ns.iter().max().expect("nonempty");
        self.require_f(hi)?;
        let first = self.options.sum_from.first();
        let weighted = self.weighted_f(lo + first, hi + self.terms + 1);
        let sums = par::map_slice(ns, |&n| self.sum_at(n, &weighted, lo + first));
        ns.iter()
            .zip(sums)
            .map(|(&n, value)| {
                Ok(LValue {
                    value,
                    terms_used: self.terms,
                    tail_bound: self.tail_bound(n, self.terms)?,
                    s: self.s,
                })
            })
            .collect()
    }

    pub fn g(&self) -> &QSeries {
        self.g
    }
}

/// Truncated `L_{f,g,nu,n}(s)` over `m <= terms`.
pub fn l_series_value(
    f: &QSeries,
    g: &QSeries,
    p: &BracketParams,
    n: usize,
    s: HalfInt,
    terms: usize,
    options: LOptions,
) -> Result<LValue> {
    LSeries::new(f, g, p, s, terms, options)?.value(n)
}

#[derive(Clone, Debug)]
pub struct AdjointCoefficient {
    pub n: usize,
    pub c_n: f64,
    pub err: f64,
    pub l_value: LValue,
}

#[derive(Clone, Debug)]
pub struct AdjointReport {
    pub case: AdjointCase,
    pub params: CaseParams,
    pub hypotheses: Hypotheses,
    pub profile: TailProfile,
    pub coefficients: Vec<AdjointCoefficient>,
}

/// `c(n)` for `n = 1..=n_max`.
pub fn adjoint_coefficients(
    f: &QSeries,
    g: &QSeries,
    c: &AdjointCase,
    n_max: usize,
    terms: usize,
    options: LOptions,
) -> Result<AdjointReport> {
    let ns: Vec<usize> = (1..=n_max).collect();
    adjoint_coefficients_at(f, g, c, &ns, terms, options)
}

/// `c(n)` for each requested `n`, in the given order.
pub fn adjoint_coefficients_at(
    f: &QSeries,
    g: &QSeries,
    c: &AdjointCase,
    ns: &[usize],
    terms: usize,
    options: LOptions,
) -> Result<AdjointReport> {
    let params = case_params(c)?;
    if let Some(w) = f.twice_weight() {
        if w != c.target_weight() {
            return Err(Error::WeightMismatch(format!(
                "f has weight {w}, case needs {}",
                c.target_weight()
            )));
        }
    }
    if let Some(w) = g.twice_weight() {
        if w != c.l {
            return Err(Error::WeightMismatch(format!("g has weight {w}, case needs {}", c.l)));
        }
    }
    if !f.coeffs()[0].is_zero() {
        return Err(Error::Precondition("f must vanish at infinity".into()));
    }
    let hypotheses = validate_hypotheses(c, g.coeffs()[0].is_zero());
    let series = LSeries::new(f, g, &c.bracket_params(), params.gamma_s, terms, options)?;
    let values = series.values(ns)?;
    let prec = options.precision;
    let coefficients = par::map_slice(&values.into_iter().zip(ns).collect::<Vec<_>>(), |(l, &n)| {
        let b = beta(&params, n as u64, prec)?;
        let c_n = hp::to_f64(&(b.clone() * &l.value));
        let err = hp::to_f64(&b) * l.tail_bound * ROUND_UP;
        Ok(AdjointCoefficient {
            n,
            c_n,
            err,
            l_value: l.clone(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(AdjointReport {
        case: *c,
        params,
        hypotheses,
        profile: *series.profile(),
        coefficients,
    })
}
