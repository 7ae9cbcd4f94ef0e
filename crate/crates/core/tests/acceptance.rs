//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

use rankin_cohen::adjoint::{
    adjoint_coefficients, beta, case_params, l_series_value, AdjointCase, CaseId, LOptions,
};
use rankin_cohen::bracket::{alpha_coeff, rc_bracket, BracketParams};
use rankin_cohen::forms::{catalog_get, check_hecke_multiplicativity};
use rankin_cohen::hp::{self, Precision};
use rankin_cohen::qseries::{apply_d, series_add, series_mul, QSeries};
use rankin_cohen::verify::{ratio_test, Estimate};
use rankin_cohen::{HalfInt, TwiceWeight};

use common::{alpha_oracle, lattice_count, naive_eta_power, rational_series};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for k2 in 1..=13i64 {
        for l2 in 1..=13i64 {
            for nu in 0..=4u32 {
                let p = BracketParams::new(TwiceWeight::from_twice(k2), TwiceWeight::from_twice(l2), nu);
                for n in 1..=10usize {
                    for m in 1..=10usize {
                        let len = n + m + 1;
                        let b = rc_bracket(&QSeries::monomial(n, len).unwrap(), &QSeries::monomial(m, len).unwrap(), &p)
                            .map_err(|e| e.to_string())?;
                        let want = alpha_oracle(k2, l2, nu, n as i64, m as i64);
                        if b.coeffs()[n + m] != want || alpha_coeff(&p, n as u64, m as u64) != want {
                            return Err(format!("k2={k2} l2={l2} nu={nu} n={n} m={m}"));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} cases exact"))
}

fn criterion_2() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config::with_cases(100),
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let pair = (rational_series(25), rational_series(25), 1i64..14, 1i64..14);
    for i in 0..100 {
        let (f, g, k2, l2) = pair.new_tree(&mut runner).unwrap().current();
        let p = BracketParams::new(TwiceWeight::from_twice(k2), TwiceWeight::from_twice(l2), 0);
        let b = rc_bracket(&f, &g, &p).map_err(|e| e.to_string())?;
        if b.coeffs() != series_mul(&f, &g).coeffs() {
            return Err(format!("pair {i} differs"));
        }
    }
    Ok("100 random pairs exact".into())
}

fn section5_case() -> AdjointCase {
    AdjointCase::new(CaseId::IntFromHalfG, TwiceWeight::from_int(6), TwiceWeight::from_twice(1), 0).unwrap()
}

fn ratio_run(f_names: (&str, &str), g_name: &str, basis: &str, case: AdjointCase, terms: usize) -> Result<(f64, f64, f64), String> {
    let n_max = 10;
    let len = n_max + terms + 1;
    let f = series_mul(&catalog_get(f_names.0, len).unwrap(), &catalog_get(f_names.1, len).unwrap());
    let g = catalog_get(g_name, terms + 1).unwrap();
    let basis = catalog_get(basis, n_max + 1).unwrap();
    let report = adjoint_coefficients(&f, &g, &case, n_max, terms, LOptions::default()).map_err(|e| e.to_string())?;
    if !report.hypotheses.is_satisfied() {
        return Err(format!("{:?}", report.hypotheses));
    }
    let est: Vec<Estimate> = report.coefficients.iter().map(Estimate::from).collect();
    let r = ratio_test(&est, &basis, 1e-3).map_err(|e| e.to_string())?;
    Ok((r.lambda, r.spread, r.error_budget))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let (lambda, spread, budget) = ratio_run(("theta", "delta_4_6"), "theta", "delta_4_6", section5_case(), 20_000)?;
    check(
        spread <= 1e-3 && lambda > budget && budget > 0.0,
        format!(
            "lambda = {lambda:.12}, spread = {spread:.2e}, error_budget = {budget:.2e}, {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let case = AdjointCase::new(CaseId::Integral, TwiceWeight::from_int(12), TwiceWeight::from_int(4), 0).unwrap();
    let (lambda, spread, budget) = ratio_run(("E4", "delta"), "E4", "delta", case, 20_000)?;
    check(
        spread <= 1e-3 && lambda > 0.0,
        format!("lambda = {lambda:.12}, spread = {spread:.2e}, error_budget = {budget:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let p = case_params(&section5_case()).map_err(|e| e.to_string())?;
    let got = hp::to_f64(&beta(&p, 1, Precision::from_env()).map_err(|e| e.to_string())?);
    let gamma = statrs::function::gamma::gamma;
    let want = gamma(5.5) / (gamma(5.0) * 2.0 * std::f64::consts::PI.sqrt());
    let rel = ((got - want) / want).abs();
    check(rel < 1e-12, format!("beta = {got:.15}, reference = {want:.15}, rel = {rel:.1e}"))
}

fn criterion_6() -> Outcome {
    let f_len = 2 * 10_000 + 2;
    let theta = catalog_get("theta", f_len).unwrap();
    let f = series_mul(&theta, &catalog_get("delta_4_6", f_len).unwrap());
    let p = section5_case().bracket_params();
    let s = HalfInt::from_twice(11);
    let mut last = f64::INFINITY;
    let mut detail = Vec::new();
    let mut ok = true;
    for m in [100usize, 1_000, 10_000] {
        let a = l_series_value(&f, &theta, &p, 1, s, m, LOptions::default()).map_err(|e| e.to_string())?;
        let b = l_series_value(&f, &theta, &p, 1, s, 2 * m, LOptions::default()).map_err(|e| e.to_string())?;
        let diff = (a.value_f64() - b.value_f64()).abs();
        ok &= diff <= a.tail_bound && a.tail_bound <= last;
        last = a.tail_bound;
        detail.push(format!("M={m}: {diff:.1e} <= {:.1e}", a.tail_bound));
    }
    check(ok, detail.join("; "))
}

fn criterion_7() -> Outcome {
    let delta = catalog_get("delta", 50).unwrap();
    let oracle = naive_eta_power(1, 24, 1, 50);
    let ints: Vec<BigInt> = delta.coeffs().iter().map(|c| c.to_integer()).collect();
    if ints != oracle || oracle[2] != BigInt::from(-24) || oracle[3] != BigInt::from(252) {
        return Err("eta^24 differs from the naive expansion".into());
    }
    let theta = catalog_get("theta", 50).unwrap();
    let sq = series_mul(&theta, &theta);
    for n in 0..50 {
        if sq.coeffs()[n] != BigRational::from_integer(BigInt::from(lattice_count(n as i64))) {
            return Err(format!("theta^2 differs from r_2 at n = {n}"));
        }
    }
    let mut runner = TestRunner::new_with_rng(
        Config::with_cases(100),
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let input = (rational_series(20), rational_series(20), rational_series(20), 0u32..4, -5i64..5);
    for i in 0..100 {
        let (f, g, h, nu, c) = input.new_tree(&mut runner).unwrap().current();
        let lhs = apply_d(&series_mul(&f, &g), 1);
        let rhs = series_add(&series_mul(&apply_d(&f, 1), &g), &series_mul(&f, &apply_d(&g, 1)), &BigRational::one(), &BigRational::one());
        if lhs.coeffs() != rhs.coeffs() {
            return Err(format!("Leibniz fails on case {i}"));
        }
        let p = BracketParams::new(TwiceWeight::from_twice(3), TwiceWeight::from_twice(8), nu);
        let c = BigRational::from_integer(BigInt::from(c));
        let one = BigRational::one();
        let left = rc_bracket(&series_add(&f, &h, &one, &c), &g, &p).unwrap();
        let right = series_add(&rc_bracket(&f, &g, &p).unwrap(), &rc_bracket(&h, &g, &p).unwrap(), &one, &c);
        let left2 = rc_bracket(&g, &series_add(&f, &h, &one, &c), &p).unwrap();
        let right2 = series_add(&rc_bracket(&g, &f, &p).unwrap(), &rc_bracket(&g, &h, &p).unwrap(), &one, &c);
        if left.coeffs() != right.coeffs() || left2.coeffs() != right2.coeffs() {
            return Err(format!("bilinearity fails on case {i}"));
        }
    }
    Ok("eta^24 and theta^2 match oracles over 50 terms; Leibniz and bilinearity exact on 100 cases".into())
}

fn criterion_8() -> Outcome {
    let d46 = catalog_get("delta_4_6", 51).unwrap();
    let oracle = naive_eta_power(2, 12, 1, 51);
    let ints: Vec<BigInt> = d46.coeffs().iter().map(|c| c.to_integer()).collect();
    if ints != oracle {
        return Err("eta(2z)^12 differs from the naive expansion".into());
    }
    if !oracle[1].is_one() {
        return Err("a(1) != 1".into());
    }
    let mut pairs = Vec::new();
    for m in (1..=50usize).step_by(2) {
        for n in (m + 2..=50).step_by(2) {
            if m * n <= 50 && num_integer::gcd(m, n) == 1 {
                pairs.push((m, n));
            }
        }
    }
    for &(m, n) in &pairs {
        if &oracle[m] * &oracle[n] != oracle[m * n] {
            return Err(format!("oracle fails at ({m}, {n})"));
        }
    }
    let lib = check_hecke_multiplicativity(&d46, &pairs).map_err(|e| e.to_string())?;
    check(lib.iter().all(|&b| b), format!("{} coprime odd pairs", pairs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("alpha/bracket oracle", criterion_1),
        ("nu = 0 reduction", criterion_2),
        ("theta * delta_4_6 ratio test, M = 20000", criterion_3),
        ("E4 * delta ratio test, M = 20000", criterion_4),
        ("beta anchor", criterion_5),
        ("truncation soundness", criterion_6),
        ("series-engine oracles", criterion_7),
        ("Hecke multiplicativity of delta_4_6", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {}: PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {d}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
