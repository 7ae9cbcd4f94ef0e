//! Named forms and light sanity checks on them.
//!
//! | name        | form                  | weight | level |
//! |-------------|-----------------------|--------|-------|
//! | `theta`     | `sum_{n in Z} q^(n^2)` | 1/2    | 4     |
//! | `delta`     | `eta(z)^24`           | 12     | 1     |
//! | `delta_4_6` | `eta(2z)^12`          | 6      | 4     |
//! | `E4`, `E6`  | Eisenstein series     | 4, 6   | 1     |
//!
//! A name may also be a linear combination such as `E4 - 3/2*delta`.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::qseries::{
    make_eisenstein, make_eta_product, make_theta, parse_rational, series_add, CharacterMod4,
    EtaFactor, FormMeta, QSeries, Rational,
};
use crate::{Error, Result, TwiceWeight};

pub const CATALOG: [&str; 5] = ["theta", "delta", "delta_4_6", "E4", "E6"];

/// Looks up a catalog name or evaluates a linear combination of names.
pub fn catalog_get(name: &str, precision: usize) -> Result<QSeries> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let name = name.trim();
    if let Some(series) = atom(name, precision)? {
        return Ok(series);
    }
    let terms = split_terms(name)?;
    let mut acc: Option<QSeries> = None;
    for (coef, atom_name) in terms {
        let s = atom(&atom_name, precision)?.ok_or_else(|| Error::UnknownForm(atom_name.clone()))?;
        acc = Some(match acc {
            None => s.scale(&coef),
            Some(a) => series_add(&a, &s, &Rational::one(), &coef),
        });
    }
    acc.ok_or_else(|| Error::UnknownForm(name.to_string()))
}

fn atom(name: &str, precision: usize) -> Result<Option<QSeries>> {
    let series = match name {
        "theta" => make_theta(precision)?,
        "delta" => make_eta_product(&[EtaFactor::new(1, 24)], precision)?.with_meta(FormMeta::new(
            TwiceWeight::from_int(12),
            1,
            CharacterMod4::Trivial,
            true,
        )?),
        "delta_4_6" => make_eta_product(&[EtaFactor::new(2, 12)], precision)?.with_meta(
            FormMeta::new(TwiceWeight::from_int(6), 4, CharacterMod4::Trivial, true)?,
        ),
        "E4" => make_eisenstein(4, precision)?,
        "E6" => make_eisenstein(6, precision)?,
        _ => return Ok(None),
    };
    Ok(Some(series))
}

/// Splits `a*x + b*y - z` into `(coef, name)` pairs.
fn split_terms(expr: &str) -> Result<Vec<(Rational, String)>> {
    let unknown = || Error::UnknownForm(expr.to_string());
    let mut terms = Vec::new();
    let mut sign = Rational::one();
    let mut current = String::new();
    let flush = |current: &mut String, sign: &Rational, terms: &mut Vec<(Rational, String)>| {
        let t = current.trim();
        if t.is_empty() {
            return Err(unknown());
        }
        let (coef, name) = match t.split_once('*') {
            Some((c, n)) => (parse_rational(c.trim()).map_err(|_| unknown())?, n.trim()),
            None => (Rational::one(), t),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(unknown());
        }
        terms.push((sign * coef, name.to_string()));
        current.clear();
        Ok(())
    };
    for (i, ch) in expr.char_indices() {
        match ch {
            '+' | '-' if i == 0 || !current.trim().is_empty() => {
                if !current.trim().is_empty() {
                    flush(&mut current, &sign, &mut terms)?;
                }
                sign = if ch == '-' { -Rational::one() } else { Rational::one() };
            }
            _ => current.push(ch),
        }
    }
    flush(&mut current, &sign, &mut terms)?;
    Ok(terms)
}

/// Only the cusp at infinity is checked: `a(0) = 0`.
pub fn check_cusp_at_infinity(f: &QSeries) -> bool {
    f.coeffs()[0].is_zero()
}

/// For each coprime pair `(m, n)`, whether `a(m) a(n) = a(mn)` exactly.
pub fn check_hecke_multiplicativity(f: &QSeries, pairs: &[(usize, usize)]) -> Result<Vec<bool>> {
    match f.coeff(1) {
        Some(a1) if a1.is_one() => {}
        Some(a1) => {
            return Err(Error::Precondition(format!(
                "series is not normalized: a(1) = {a1}"
            )))
        }
        None => {
            return Err(Error::InsufficientPrecision {
                what: "a(1)".into(),
                required: 2,
                available: f.precision(),
            })
        }
    }
    pairs
        .iter()
        .map(|&(m, n)| {
            if m.gcd(&n) != 1 {
                return Err(Error::Precondition(format!("({m}, {n}) is not coprime")));
            }
            let mn = m * n;
            let a = |i: usize| {
                f.coeff(i).ok_or(Error::InsufficientPrecision {
                    what: format!("a({i})"),
                    required: i + 1,
                    available: f.precision(),
                })
            };
            let (am, an, amn) = (a(m)?, a(n)?, a(mn)?);
            Ok(am * an == *amn)
        })
        .collect()
}
