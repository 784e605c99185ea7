use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use qorder_core::ordering::{parameters, StrategyRegistry};
use qorder_core::verify::{order_scan, OrderScanRow};
use qorder_core::{
    bessel_j, detect_ambiguity, fourier_reconstruct, hermitize, normal_order_with, parse_operator,
    Convention, IdentityRegistry, MomentumEigenfunction, OperatorWord, ParamSymbol, QuadratureSpec,
    ScalarExpr, VerifyError,
};

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qorder",
    version,
    about = "Operator ordering in the Heisenberg algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rep {
    Coordinate,
    Momentum,
}

impl From<Rep> for Convention {
    fn from(r: Rep) -> Self {
        match r {
            Rep::Coordinate => Convention::CoordinateNormal,
            Rep::Momentum => Convention::MomentumNormal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normal-order an operator expression.
    NormalOrder {
        expr: String,
        #[arg(long, value_enum, default_value = "coordinate")]
        rep: Rep,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Replace the input by (e + e†)/2 before ordering.
        #[arg(long)]
        hermitize: bool,
        /// Multiply the input by 1/2, for inputs already written as A + A†.
        #[arg(long)]
        hermitize_scale: bool,
        #[arg(long, default_value = "leftmost")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named identity check, or `all`.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Reconstruct the coordinate wave function on a grid of x.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long = "E")]
        energy: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// start:stop:count
        #[arg(long, default_value = "0:4:17")]
        x_grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Fit the Bessel order of the coordinate equation for each alpha*gamma.
    #[command(allow_negative_numbers = true)]
    OrderScan {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha_gamma: Vec<f64>,
        #[arg(long = "E", default_value_t = 1.0)]
        energy: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn word_text(w: &OperatorWord) -> String {
    if w.factors.is_empty() {
        return "1".into();
    }
    w.factors
        .iter()
        .map(|f| f.text())
        .collect::<Vec<_>>()
        .join(" * ")
}

#[derive(Serialize)]
struct TermRow {
    coefficient: String,
    word: String,
}

#[derive(Serialize)]
struct NormalOrderDoc {
    input: String,
    convention: &'static str,
    normal_form: String,
    terms: Vec<TermRow>,
    parameters: Vec<String>,
    ambiguous: bool,
    surviving_terms: Vec<TermRow>,
}

fn term_rows<'a>(words: impl IntoIterator<Item = &'a OperatorWord>) -> Vec<TermRow> {
    words
        .into_iter()
        .map(|w| TermRow {
            coefficient: w.coefficient.to_string(),
            word: word_text(w),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_normal_order(
    expr: &str,
    rep: Rep,
    format: Format,
    herm: bool,
    halve: bool,
    strategy: &str,
    seed: u64,
) -> Result<String, Failure> {
    let mut e = parse_operator(expr).map_err(|err| fail(EXIT_USAGE, err.render(expr)))?;
    if halve {
        e = e.scale(&ScalarExpr::ratio(1, 2));
    }
    if herm {
        e = hermitize(&e);
    }
    let registry = StrategyRegistry::default();
    let mut s = registry.create(strategy, seed).ok_or_else(|| {
        let known: Vec<_> = registry.names().collect();
        fail(
            EXIT_USAGE,
            format!(
                "unknown strategy `{strategy}` (known: {})",
                known.join(", ")
            ),
        )
    })?;
    let c = Convention::from(rep);
    let n =
        normal_order_with(&e, c, s.as_mut()).map_err(|err| fail(EXIT_DOMAIN, err.to_string()))?;
    Ok(match format {
        Format::Human => format!("{n}\n"),
        Format::Csv => csv_text(
            &["coefficient", "word"],
            n.words()
                .iter()
                .map(|w| vec![w.coefficient.to_string(), word_text(w)]),
        ),
        Format::Json => {
            let hbar = ParamSymbol::hbar();
            let free: Vec<ParamSymbol> =
                parameters(&n).into_iter().filter(|p| *p != hbar).collect();
            let report = detect_ambiguity(&n, &free);
            let words = n.words();
            json_text(&NormalOrderDoc {
                input: expr.to_string(),
                convention: c.name(),
                normal_form: n.to_string(),
                terms: term_rows(&words),
                parameters: free.iter().map(|p| p.to_string()).collect(),
                ambiguous: report.ambiguous,
                surviving_terms: term_rows(&report.surviving_terms),
            })
        }
    })
}

fn cmd_verify(identity: &str, format: Format) -> Result<(String, bool), Failure> {
    let registry = IdentityRegistry::default();
    let outcomes = registry.run(identity).ok_or_else(|| {
        let known: Vec<_> = registry.ids().collect();
        fail(
            EXIT_USAGE,
            format!(
                "unknown identity `{identity}` (known: {}, all)",
                known.join(", ")
            ),
        )
    })?;
    let all_pass = outcomes.iter().all(|o| o.pass);
    let text = match format {
        Format::Human => outcomes
            .iter()
            .map(|o| {
                format!(
                    "{}: {} ({})\n",
                    o.id,
                    if o.pass { "PASS" } else { "FAIL" },
                    o.detail
                )
            })
            .collect(),
        Format::Json => json_text(&outcomes),
        Format::Csv => csv_text(
            &["id", "pass", "detail"],
            outcomes
                .iter()
                .map(|o| vec![o.id.clone(), o.pass.to_string(), o.detail.clone()]),
        ),
    };
    Ok((text, all_pass))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || {
        fail(
            EXIT_USAGE,
            format!("invalid grid `{spec}`, expected start:stop:count"),
        )
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|k| start + step * k as f64).collect())
}

#[derive(Serialize)]
struct SolveRow {
    x: f64,
    re: f64,
    im: f64,
    j0_target: f64,
    ratio_re: f64,
    ratio_im: f64,
    abs_error: f64,
    converged: bool,
}

fn cmd_solve(
    energy: f64,
    hbar: f64,
    grid: &str,
    format: Format,
) -> Result<(String, bool), Failure> {
    if !(energy > 0.0) {
        return Err(fail(EXIT_USAGE, "E must be positive"));
    }
    if !(hbar > 0.0) {
        return Err(fail(EXIT_USAGE, "hbar must be positive"));
    }
    let xs = parse_grid(grid)?;
    let psi =
        MomentumEigenfunction::new(energy, hbar).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let q = QuadratureSpec::default().with_env_override();
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let (value, abs_error, converged) = match fourier_reconstruct(&psi, x, &q) {
            Ok(r) => (r.value, r.abs_error, true),
            Err(VerifyError::NoConvergence { estimate, error }) => (estimate, error, false),
            Err(e) => return Err(fail(EXIT_DOMAIN, e.to_string())),
        };
        let z = 2.0 * (energy * x.abs()).sqrt() / hbar;
        let j0 = bessel_j(0.0, z)
            .map_err(|e| fail(EXIT_DOMAIN, e.to_string()))?
            .value;
        let ratio = value / Complex64::new(j0, 0.0);
        rows.push(SolveRow {
            x,
            re: value.re + 0.0,
            im: value.im + 0.0,
            j0_target: j0,
            ratio_re: ratio.re + 0.0,
            ratio_im: ratio.im + 0.0,
            abs_error,
            converged,
        });
    }
    let ok = rows.iter().all(|r| r.converged);
    let header = [
        "x",
        "re",
        "im",
        "j0_target",
        "ratio_re",
        "ratio_im",
        "abs_error",
        "converged",
    ];
    // `+ 0.0` folds negative zero
    let num = |v: f64| (v + 0.0).to_string();
    let cells = |r: &SolveRow| {
        vec![
            num(r.x),
            num(r.re),
            num(r.im),
            num(r.j0_target),
            num(r.ratio_re),
            num(r.ratio_im),
            format!("{:e}", r.abs_error),
            r.converged.to_string(),
        ]
    };
    let text = match format {
        Format::Csv => csv_text(&header, rows.iter().map(cells)),
        Format::Json => json_text(&rows),
        Format::Human => {
            let mut s = header
                .iter()
                .map(|h| format!("{h:>22}"))
                .collect::<String>();
            s.push('\n');
            for r in &rows {
                s.extend(cells(r).iter().map(|c| format!("{c:>22}")));
                s.push('\n');
            }
            s
        }
    };
    Ok((text, ok))
}

fn cmd_order_scan(
    values: &[f64],
    energy: f64,
    hbar: f64,
    format: Format,
) -> Result<String, Failure> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(fail(
            EXIT_USAGE,
            format!("alpha*gamma = {v} outside [0, 1]"),
        ));
    }
    if !(energy > 0.0 && hbar > 0.0) {
        return Err(fail(EXIT_USAGE, "E and hbar must be positive"));
    }
    let rows: Vec<OrderScanRow> = values
        .iter()
        .map(|&s| order_scan(s, energy, hbar))
        .collect::<Result<_, _>>()
        .map_err(|e| fail(EXIT_DOMAIN, e.to_string()))?;
    let header = [
        "alpha_gamma",
        "fitted_order",
        "derived_order",
        "printed_order",
        "fitted_residual",
        "derived_residual",
        "printed_residual",
    ];
    // fitted orders are reported to the scan's 1e-9 resolution
    let cells = |r: &OrderScanRow| {
        vec![
            r.alpha_gamma.to_string(),
            format!("{:.9}", r.fitted_order),
            r.derived_order.to_string(),
            r.printed_order.to_string(),
            format!("{:.3e}", r.fitted_residual),
            format!("{:.3e}", r.derived_residual),
            format!("{:.3e}", r.printed_residual),
        ]
    };
    Ok(match format {
        Format::Csv => csv_text(&header, rows.iter().map(cells)),
        Format::Json => {
            let docs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let c = cells(r);
                    serde_json::json!({
                        "alpha_gamma": r.alpha_gamma,
                        "fitted_order": c[1].parse::<f64>().unwrap_or(r.fitted_order),
                        "derived_order": r.derived_order,
                        "printed_order": r.printed_order,
                        "fitted_residual": r.fitted_residual,
                        "derived_residual": r.derived_residual,
                        "printed_residual": r.printed_residual,
                    })
                })
                .collect();
            json_text(&docs)
        }
        Format::Human => {
            let mut s = header
                .iter()
                .map(|h| format!("{h:>18}"))
                .collect::<String>();
            s.push('\n');
            for r in &rows {
                s.extend(cells(r).iter().map(|c| format!("{c:>18}")));
                s.push('\n');
            }
            s
        }
    })
}

fn emit(text: &str, out: Option<&str>) -> Result<(), Failure> {
    match out {
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {path}: {e}"))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_USAGE, e.to_string())),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::NormalOrder {
            expr,
            rep,
            format,
            hermitize,
            hermitize_scale,
            strategy,
            seed,
        } => {
            let text = cmd_normal_order(
                &expr,
                rep,
                format,
                hermitize,
                hermitize_scale,
                &strategy,
                seed,
            )?;
            emit(&text, None)?;
            Ok(0)
        }
        Command::Verify { identity, format } => {
            let (text, pass) = cmd_verify(&identity, format)?;
            emit(&text, None)?;
            Ok(if pass { 0 } else { EXIT_FAILED_CHECK })
        }
        Command::Solve {
            energy,
            hbar,
            x_grid,
            format,
            out,
        } => {
            let (text, converged) = cmd_solve(energy, hbar, &x_grid, format)?;
            emit(&text, out.as_deref())?;
            if converged {
                Ok(0)
            } else {
                Err(fail(
                    EXIT_NUMERIC,
                    "quadrature failed to converge at one or more grid points",
                ))
            }
        }
        Command::OrderScan {
            alpha_gamma,
            energy,
            hbar,
            format,
        } => {
            let text = cmd_order_scan(&alpha_gamma, energy, hbar, format)?;
            emit(&text, None)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            // parse diagnostics arrive already labelled
            if f.message.starts_with("error") {
                eprintln!("{}", f.message);
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
