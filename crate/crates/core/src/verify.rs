//! Checkable consequences of the adjoint formula.
//!
//! When the cusp forms of the target weight form a one-dimensional space
//! spanned by `f`, the adjoint image of `[f, g]_nu` is `lambda f`. So the
//! computed `c(n)` must be proportional to the basis coefficients, and the
//! constant `lambda` must be nonnegative.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::adjoint::{adjoint_coefficients_at, AdjointCase, AdjointCoefficient, LOptions};
use crate::forms::catalog_get;
use crate::hp::{self, Precision};
use crate::qseries::{rational_to_f64, series_mul, QSeries};
use crate::{Error, HalfInt, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_TERMS: usize = 20_000;

/// A coefficient estimate with its absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub n: usize,
    pub value: f64,
    pub err: f64,
}

impl From<&AdjointCoefficient> for Estimate {
    fn from(c: &AdjointCoefficient) -> Self {
        Self {
            n: c.n,
            value: c.c_n,
            err: c.err,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    /// `(n, c_n / a(n))` over the `n` with `a(n) != 0`.
    pub ratios: Vec<(usize, f64)>,
    /// Mean ratio.
    pub lambda: f64,
    /// Largest relative deviation from the mean.
    pub spread: f64,
    /// Largest ratio error `err / |a(n)|`, relative to `lambda`.
    pub error_budget: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn ratio_test(c_list: &[Estimate], basis: &QSeries, tolerance: f64) -> Result<RatioReport> {
    if !basis.coeffs()[0].is_zero() {
        return Err(Error::Precondition("basis form must vanish at infinity".into()));
    }
    let mut ratios = Vec::new();
    let mut ratio_errs = Vec::new();
    for e in c_list {
        let a = basis.coeff(e.n).ok_or_else(|| Error::InsufficientPrecision {
            what: "basis form".into(),
            required: e.n + 1,
            available: basis.precision(),
        })?;
        if a.is_zero() {
            continue;
        }
        let a = rational_to_f64(a);
        ratios.push((e.n, e.value / a));
        ratio_errs.push(e.err / a.abs());
    }
    if ratios.is_empty() {
        return Err(Error::Precondition(
            "basis coefficients vanish at every requested n".into(),
        ));
    }
    let lambda = ratios.iter().map(|r| r.1).sum::<f64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|&(_, r)| {
            if r == lambda {
                0.0
            } else {
                (r - lambda).abs() / lambda.abs()
            }
        })
        .fold(0.0, f64::max);
    // Each ratio is known to within err / |a(n)|; relative to lambda this is
    // err / |c_n| when the data are proportional, without blowing up where
    // c_n happens to be near zero.
    let error_budget = ratio_errs
        .iter()
        .map(|&e| if e == 0.0 { 0.0 } else { e / lambda.abs() })
        .fold(0.0, f64::max);
    Ok(RatioReport {
        ratios,
        lambda,
        spread,
        error_budget,
        tolerance,
        pass: spread <= tolerance + error_budget,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaReport {
    pub lambda: f64,
    pub err: f64,
    pub m0: usize,
}

/// `lambda = c(m0) / a(m0)` at the first index `m0` where the basis form is
/// nonzero.
pub fn lambda_from_first_coefficient(
    c: &AdjointCase,
    f: &QSeries,
    g: &QSeries,
    basis: &QSeries,
    terms: usize,
    options: LOptions,
) -> Result<LambdaReport> {
    let m0 = basis
        .order()
        .ok_or_else(|| Error::Precondition("basis form is zero".into()))?;
    if m0 == 0 {
        return Err(Error::Precondition("basis form must vanish at infinity".into()));
    }
    let report = adjoint_coefficients_at(f, g, c, &[m0], terms, options)?;
    let a = rational_to_f64(&basis.coeffs()[m0]);
    let row = &report.coefficients[0];
    Ok(LambdaReport {
        lambda: row.c_n / a,
        err: row.err / a.abs(),
        m0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RewrittenSums {
    /// `sum_{m=1}^M a(m+1) b(m) / (m+1)^(11/2)` with `a` from `theta * delta_4_6`, `b` from theta.
    pub faithful: f64,
    /// `sum_{m=1}^M (sum_{r=1}^{m^2+1} tau(m^2+1-r^2)) / (m^2+1)^(11/2)`.
    pub rewritten: f64,
    pub terms: usize,
}

/// Both partial sums behind the positivity of `lambda` in the
/// `theta`, `delta_4_6` configuration. Only the first is claimed positive.
pub fn rewritten_sum_report(terms: usize) -> Result<RewrittenSums> {
    let prec = Precision::from_env();
    if terms == 0 {
        return Ok(RewrittenSums {
            faithful: 0.0,
            rewritten: 0.0,
            terms,
        });
    }
    let s = HalfInt::from_twice(-11);
    let theta = catalog_get("theta", terms + 2)?;
    let f = series_mul(&theta, &catalog_get("delta_4_6", terms + 2)?);
    let mut faithful = prec.uint(0);
    for m in 1..=terms {
        let b = &theta.coeffs()[m];
        let a = &f.coeffs()[m + 1];
        if b.is_zero() || a.is_zero() {
            continue;
        }
        faithful += prec.rational(&(a * b)) * prec.half_pow(&prec.uint(m as u64 + 1), s);
    }

    let top = terms * terms + 1;
    let tau = catalog_get("delta_4_6", top + 1)?;
    let tau = tau.coeffs();
    let mut rewritten = prec.uint(0);
    for m in 1..=terms {
        let big = m * m + 1;
        let mut inner = BigInt::zero();
        let mut r = 1;
        while r * r <= big {
            inner += tau[big - r * r].numer();
            r += 1;
        }
        if !inner.is_zero() {
            rewritten += prec.int(&inner) * prec.half_pow(&prec.uint(big as u64), s);
        }
    }
    Ok(RewrittenSums {
        faithful: hp::to_f64(&faithful),
        rewritten: hp::to_f64(&rewritten),
        terms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub config: String,
    pub lambda: f64,
    pub spread: f64,
    pub error_budget: f64,
    pub pass: bool,
    #[serde(rename = "M")]
    pub terms: usize,
    pub tolerance: f64,
}

impl Verdict {
    pub fn new(config: impl Into<String>, report: &RatioReport, terms: usize) -> Self {
        Self {
            config: config.into(),
            lambda: report.lambda,
            spread: report.spread,
            error_budget: report.error_budget,
            pass: report.pass,
            terms,
            tolerance: report.tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjoint::{adjoint_coefficients, CaseId};
    use crate::TwiceWeight;

    fn estimates(basis: &QSeries, scale: f64, n_max: usize) -> Vec<Estimate> {
        (1..=n_max)
            .map(|n| Estimate {
                n,
                value: scale * rational_to_f64(&basis.coeffs()[n]),
                err: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_multiples_have_zero_spread() {
        let d46 = catalog_get("delta_4_6", 12).unwrap();
        let r = ratio_test(&estimates(&d46, 3.0, 11), &d46, 1e-3).unwrap();
        assert_eq!(r.spread, 0.0);
        assert_eq!(r.lambda, 3.0);
        assert!(r.pass);
        // only odd n have nonzero coefficients
        assert_eq!(r.ratios.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9, 11]);
    }

    #[test]
    fn corrupted_entry_fails() {
        let d46 = catalog_get("delta_4_6", 12).unwrap();
        let mut c = estimates(&d46, 3.0, 11);
        c[4].value *= 1.01;
        let r = ratio_test(&c, &d46, 1e-3).unwrap();
        assert!(r.spread > 1e-3);
        assert!(!r.pass);
    }

    #[test]
    fn ratio_test_errors() {
        let d46 = catalog_get("delta_4_6", 12).unwrap();
        let only_even: Vec<_> = estimates(&d46, 1.0, 11).into_iter().filter(|e| e.n % 2 == 0).collect();
        assert!(ratio_test(&only_even, &d46, 1e-3).is_err());
        assert!(ratio_test(&estimates(&d46, 1.0, 11), &catalog_get("theta", 12).unwrap(), 1e-3).is_err());
        let short = d46.truncate(5).unwrap();
        assert!(matches!(
            ratio_test(&estimates(&d46, 1.0, 11), &short, 1e-3),
            Err(Error::InsufficientPrecision { required: 6, .. })
        ));
    }

    #[test]
    fn error_budget_widens_the_pass_band() {
        let d46 = catalog_get("delta_4_6", 12).unwrap();
        let mut c = estimates(&d46, 2.0, 11);
        c[2].value *= 1.002;
        for e in &mut c {
            e.err = 0.01 * e.value.abs();
        }
        let r = ratio_test(&c, &d46, 1e-3).unwrap();
        assert!(r.spread > 1e-3 && r.pass);
        assert!((r.error_budget - 0.01).abs() < 1e-4);
    }

    #[test]
    fn rewritten_sums_small_cases() {
        let zero = rewritten_sum_report(0).unwrap();
        assert_eq!((zero.faithful, zero.rewritten), (0.0, 0.0));
        // theta * delta_4_6 = q + 2q^2 + ..., so the m = 1 term is 2 * 2 / 2^(11/2)
        let one = rewritten_sum_report(1).unwrap();
        assert!((one.faithful - 4.0 / 2f64.powf(5.5)).abs() < 1e-15);
        // m = 1: r = 1 only, tau(1) = 1 over 2^(11/2)
        assert!((one.rewritten - 1.0 / 2f64.powf(5.5)).abs() < 1e-15);
    }

    #[test]
    fn faithful_sum_is_positive() {
        assert!(rewritten_sum_report(200).unwrap().faithful > 0.0);
    }

    #[test]
    fn lambda_agrees_with_ratio_mean() {
        let theta = catalog_get("theta", 2200).unwrap();
        let d46 = catalog_get("delta_4_6", 2200).unwrap();
        let f = series_mul(&theta, &d46);
        let c = AdjointCase::new(
            CaseId::IntFromHalfG,
            TwiceWeight::from_int(6),
            TwiceWeight::from_twice(1),
            0,
        )
        .unwrap();
        let opts = LOptions {
            precision: Precision::from_digits(30),
            ..LOptions::default()
        };
        let rows = adjoint_coefficients(&f, &theta, &c, 10, 2000, opts).unwrap();
        let est: Vec<Estimate> = rows.coefficients.iter().map(Estimate::from).collect();
        let r = ratio_test(&est, &d46, 1e-3).unwrap();
        let l = lambda_from_first_coefficient(&c, &f, &theta, &d46, 2000, opts).unwrap();
        assert_eq!(l.m0, 1);
        assert!(l.lambda > 0.0);
        assert!((l.lambda - r.lambda).abs() <= r.lambda.abs() * (r.spread + r.error_budget) + l.err);
        assert!(matches!(
            lambda_from_first_coefficient(&c, &f, &theta, &QSeries::zero(10).unwrap(), 20, opts),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verdict_json_keys() {
        let d46 = catalog_get("delta_4_6", 4).unwrap();
        let r = ratio_test(&estimates(&d46, 1.0, 3), &d46, 1e-3).unwrap();
        let v = serde_json::to_value(Verdict::new("x", &r, 10)).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["M", "config", "error_budget", "lambda", "pass", "spread", "tolerance"]);
    }
}
