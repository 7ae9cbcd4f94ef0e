//! The `rc-adjoint` command line.
//!
//! Data goes to stdout or `--output`; warnings and tail-bound notes go to
//! stderr. Exit status is 0 on success, 1 when a verification fails and 2
//! on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adjoint::{
    adjoint_coefficients, AdjointCase, AdjointReport, CaseId, Hypotheses, LOptions, SumStart,
    DEFAULT_EPSILON,
};
use crate::bracket::{rc_bracket, BracketParams};
use crate::forms::catalog_get;
use crate::hp::Precision;
use crate::qseries::{series_mul, QSeries, SeriesJson};
use crate::verify::{
    lambda_from_first_coefficient, ratio_test, rewritten_sum_report, Estimate, Verdict,
    DEFAULT_TERMS, DEFAULT_TOLERANCE,
};
use crate::{Error, HalfInt, Result, TwiceWeight};

#[derive(Parser, Debug)]
#[command(name = "rc-adjoint", version, about = "Rankin-Cohen brackets and adjoint Fourier coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the q-expansion of a catalog form or linear combination.
    Expand {
        #[arg(long)]
        form: String,
        #[arg(long)]
        precision: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print `[f, g]_nu`.
    Bracket {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        nu: u32,
        #[arg(long, default_value_t = 20)]
        precision: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fourier coefficients `c(n)`, `n = 1..=n_max`, of the adjoint image of `f`.
    Adjoint {
        #[command(flatten)]
        run: AdjointArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Check that `c(n) / a(n)` is constant for the basis form `a`.
    Ratio {
        #[command(flatten)]
        run: AdjointArgs,
        /// Basis of the one-dimensional cusp space; defaults to the factor of
        /// `--f-product` that is not `--g`.
        #[arg(long)]
        basis: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// `lambda = c(m0) / a(m0)` at the first nonzero basis coefficient.
    Lambda {
        #[command(flatten)]
        run: AdjointArgs,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Partial sums of the theta, delta_4_6 positivity series in both forms.
    Rewritten {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct AdjointArgs {
    #[arg(long = "case")]
    pub case_id: String,
    /// Catalog name, linear combination, or path to a series JSON file.
    #[arg(long, required_unless_present = "f_product", conflicts_with = "f_product")]
    pub f: Option<String>,
    /// Build `f` as the product of two forms.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub f_product: Option<Vec<String>>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub nu: u32,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Weight of the domain forms; inferred from the inputs when omitted.
    #[arg(long)]
    pub k: Option<HalfInt>,
    /// Weight of `g`; inferred when omitted.
    #[arg(long)]
    pub l: Option<HalfInt>,
    /// First index of the sum over `m`.
    #[arg(long, value_enum, default_value_t = SumFrom::Zero)]
    pub sum_from: SumFrom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SumFrom {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

pub fn main() -> ExitCode {
    main_from(std::env::args_os())
}

pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::InsufficientPrecision { required, .. } = e {
                eprintln!("hint: the input needs --precision {required} or more");
            }
            ExitCode::from(2)
        }
    }
}

/// Runs one command; `Ok(false)` means a verification failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Expand {
            form,
            precision,
            output,
        } => {
            let s = load_form(&form, precision)?;
            emit_json(&s.to_json(), output.as_deref())?;
            Ok(true)
        }
        Command::Bracket {
            f,
            g,
            nu,
            precision,
            output,
        } => {
            let f = load_form(&f, precision)?;
            let g = load_form(&g, precision)?;
            let (k, l) = match (f.twice_weight(), g.twice_weight()) {
                (Some(k), Some(l)) => (k, l),
                _ => {
                    return Err(Error::InvalidMeta(
                        "bracket inputs need weights; use catalog forms or series files with twice_weight"
                            .into(),
                    ))
                }
            };
            let b = rc_bracket(&f, &g, &BracketParams::new(k, l, nu))?;
            emit_json(&b.to_json(), output.as_deref())?;
            Ok(true)
        }
        Command::Adjoint {
            run,
            format,
            output,
        } => {
            let inputs = Inputs::load(&run, 0)?;
            let report = inputs.adjoint(&run)?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => write_csv(&report, &mut buf)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut buf, &json_rows(&report))?;
                    buf.push(b'\n');
                }
            }
            emit_bytes(&buf, output.as_deref())?;
            Ok(true)
        }
        Command::Verify(VerifyCommand::Ratio {
            run,
            basis,
            tolerance,
            output,
        }) => {
            let inputs = Inputs::load(&run, run.n_max + 1)?;
            let basis = inputs.basis(basis.as_deref(), &run, run.n_max + 1)?;
            let report = inputs.adjoint(&run)?;
            let estimates: Vec<Estimate> = report.coefficients.iter().map(Estimate::from).collect();
            let ratios = ratio_test(&estimates, &basis, tolerance)?;
            let verdict = Verdict::new(inputs.describe(&run), &ratios, run.terms);
            emit_json(&verdict, output.as_deref())?;
            Ok(verdict.pass)
        }
        Command::Verify(VerifyCommand::Lambda { run, basis, output }) => {
            let inputs = Inputs::load(&run, 0)?;
            let basis = inputs.basis(basis.as_deref(), &run, run.n_max + 1)?;
            let case = inputs.case(&run)?;
            warn_hypotheses(&case, &inputs.g);
            let l = lambda_from_first_coefficient(
                &case,
                &inputs.f,
                &inputs.g,
                &basis,
                run.terms,
                options(&run),
            )?;
            #[derive(Serialize)]
            struct Out {
                config: String,
                lambda: f64,
                err: f64,
                m0: usize,
                #[serde(rename = "M")]
                terms: usize,
                pass: bool,
            }
            let out = Out {
                config: inputs.describe(&run),
                lambda: l.lambda,
                err: l.err,
                m0: l.m0,
                terms: run.terms,
                pass: l.lambda > -l.err,
            };
            emit_json(&out, output.as_deref())?;
            Ok(out.pass)
        }
        Command::Verify(VerifyCommand::Rewritten { terms, output }) => {
            let sums = rewritten_sum_report(terms)?;
            #[derive(Serialize)]
            struct Out {
                faithful_sum: f64,
                rewritten_sum: f64,
                #[serde(rename = "M")]
                terms: usize,
                faithful_positive: bool,
            }
            let out = Out {
                faithful_sum: sums.faithful,
                rewritten_sum: sums.rewritten,
                terms,
                faithful_positive: sums.faithful > 0.0,
            };
            emit_json(&out, output.as_deref())?;
            Ok(terms == 0 || out.faithful_positive)
        }
    }
}

fn options(run: &AdjointArgs) -> LOptions {
    LOptions {
        sum_from: match run.sum_from {
            SumFrom::Zero => SumStart::Zero,
            SumFrom::One => SumStart::One,
        },
        epsilon: run.epsilon,
        precision: Precision::from_env(),
    }
}

struct Inputs {
    f: QSeries,
    g: QSeries,
}

impl Inputs {
    fn load(run: &AdjointArgs, extra: usize) -> Result<Self> {
        if !(run.epsilon > 0.0 && run.epsilon.is_finite()) {
            return Err(Error::Parse(format!("--epsilon must be positive, got {}", run.epsilon)));
        }
        let f_len = (run.n_max + run.terms + 1).max(extra).max(10);
        let g_len = (run.terms + 1).max(10);
        let f = match (&run.f, &run.f_product) {
            (Some(f), _) => load_form(f, f_len)?,
            (None, Some(ab)) => series_mul(&load_form(&ab[0], f_len)?, &load_form(&ab[1], f_len)?),
            (None, None) => unreachable!("clap requires --f or --f-product"),
        };
        let g = load_form(&run.g, g_len)?;
        Ok(Self { f, g })
    }

    fn case(&self, run: &AdjointArgs) -> Result<AdjointCase> {
        let case_id: CaseId = run.case_id.parse()?;
        let nu2 = TwiceWeight::from_int(2 * run.nu as i64);
        let l = run.l.or(self.g.twice_weight()).ok_or_else(|| {
            Error::InvalidMeta("cannot infer the weight of g; pass --l".into())
        })?;
        let k = match (run.k, self.f.twice_weight()) {
            (Some(k), _) => k,
            (None, Some(w)) => w - l - nu2,
            (None, None) => {
                return Err(Error::InvalidMeta("cannot infer k from f; pass --k".into()))
            }
        };
        AdjointCase::new(case_id, k, l, run.nu)
    }

    fn adjoint(&self, run: &AdjointArgs) -> Result<AdjointReport> {
        let case = self.case(run)?;
        warn_hypotheses(&case, &self.g);
        let report = adjoint_coefficients(&self.f, &self.g, &case, run.n_max, run.terms, options(run))?;
        let worst = report.coefficients.iter().map(|c| c.l_value.tail_bound).fold(0.0, f64::max);
        eprintln!(
            "note: case {}, k = {}, l = {}, nu = {}, M = {}, max tail bound {:.3e}",
            case.case_id, case.k, case.l, case.nu, run.terms, worst
        );
        Ok(report)
    }

    fn basis(&self, name: Option<&str>, run: &AdjointArgs, len: usize) -> Result<QSeries> {
        let name = match name {
            Some(n) => n.to_string(),
            None => match &run.f_product {
                Some(ab) if ab[1] == run.g => ab[0].clone(),
                Some(ab) if ab[0] == run.g => ab[1].clone(),
                _ => {
                    return Err(Error::Parse(
                        "--basis is required unless --f-product contains --g".into(),
                    ))
                }
            },
        };
        load_form(&name, len)
    }

    fn describe(&self, run: &AdjointArgs) -> String {
        let f = match (&run.f, &run.f_product) {
            (Some(f), _) => f.clone(),
            (None, Some(ab)) => format!("{}*{}", ab[0], ab[1]),
            _ => String::new(),
        };
        format!("case={} f={} g={} nu={}", run.case_id, f, run.g, run.nu)
    }
}

fn warn_hypotheses(case: &AdjointCase, g: &QSeries) {
    if let Hypotheses::Violated(msg) = crate::adjoint::validate_hypotheses(case, crate::forms::check_cusp_at_infinity(g)) {
        eprintln!("warning: hypotheses not met: {msg}");
    }
}

/// A catalog expression, or a series JSON file truncated to `precision`.
pub fn load_form(spec: &str, precision: usize) -> Result<QSeries> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let json: SeriesJson = serde_json::from_str(&fs::read_to_string(path)?)?;
        let s = QSeries::from_json(&json)?;
        return if s.precision() > precision { s.truncate(precision) } else { Ok(s) };
    }
    catalog_get(spec, precision)
}

fn write_csv<W: Write>(report: &AdjointReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "c_n", "err_bound"])?;
    for c in &report.coefficients {
        w.write_record([c.n.to_string(), format!("{:.16e}", c.c_n), format!("{:.16e}", c.err)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow {
    n: usize,
    c_n: f64,
    err_bound: f64,
    value: f64,
    terms_used: usize,
    tail_bound: f64,
    s: String,
}

fn json_rows(report: &AdjointReport) -> Vec<JsonRow> {
    report
        .coefficients
        .iter()
        .map(|c| JsonRow {
            n: c.n,
            c_n: c.c_n,
            err_bound: c.err,
            value: c.l_value.value_f64(),
            terms_used: c.l_value.terms_used,
            tail_bound: c.l_value.tail_bound,
            s: c.l_value.s.to_string(),
        })
        .collect()
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    emit_bytes(&buf, output)
}

fn emit_bytes(buf: &[u8], output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, buf)?,
        None => std::io::stdout().write_all(buf)?,
    }
    Ok(())
}
