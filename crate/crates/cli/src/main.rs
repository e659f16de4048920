//! Command-line surface for the operator toolkit.
//!
//! Point data is emitted as CSV with 17-significant-digit values; reports
//! and summaries as deterministic JSON. Exit codes: 0 success, 1 at least
//! one verification check failed, 2 configuration or domain error,
//! 3 numeric failure (series truncation or quadrature).
//!
//! Unit-side evaluation is restricted to `x ≤ 1 - 2⁻¹⁰`: near 1 the series
//! mass escapes to infinite indices and any finite evaluation scheme
//! truncates. Ray-side operators act on the transformed counterpart
//! `(1+ξ) f(ξ/(1+ξ))` of the selected unit-interval function.

use clap::{Parser, Subcommand, ValueEnum};
use mkz_ops::analysis::{
    convergence_experiment, k_bound, run_suite, AnalysisConfig, Suite,
};
use mkz_ops::engine::{apply_grid, OperatorConfig, OperatorKind};
use mkz_ops::registry::{lookup, registry};
use mkz_ops::report::{fmt_float, reports_to_json};
use mkz_ops::transform::to_ray;
use mkz_ops::{Domain, Error, RealFunction};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mkz",
    version,
    about = "MKZ/Baskakov operator family: evaluation, verification, convergence and K-functional experiments"
)]
struct Cli {
    /// Worker threads (default: all cores; also honors MKZ_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an operator applied to a registry function at given points.
    Eval {
        /// Operator kind: mkz-classical | mkz-gs | mkz-gs-mod | baskakov |
        /// baskakov-gs | baskakov-gs-mod.
        #[arg(long)]
        op: String,
        /// Operator order (n >= 1).
        #[arg(long)]
        n: u32,
        /// Registry function identifier (see `list-functions`).
        #[arg(long, short = 'f')]
        function: String,
        /// Comma-separated evaluation points.
        #[arg(long)]
        points: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Override the series tail tolerance.
        #[arg(long)]
        tail_tol: Option<f64>,
        /// Override the quadrature relative tolerance.
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Sup-norm error of `Op_n f - f` over a list of orders, with the
    /// fitted log-log slope.
    Converge {
        #[arg(long)]
        op: String,
        #[arg(long, short = 'f')]
        function: String,
        /// Comma-separated list of at least four orders.
        #[arg(long)]
        n_list: String,
        #[arg(long)]
        tail_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Run a verification suite and emit the JSON reports.
    Verify {
        /// identities | norms | jackson | voronovskaya | bernstein |
        /// direct | converse | all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the randomized extra check points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tail_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Two-sided K-functional bounds at t = 1/n².
    Kfunc {
        #[arg(long, short = 'f')]
        function: String,
        /// Comma-separated list of orders.
        #[arg(long)]
        n_list: String,
        #[arg(long)]
        tail_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// List the registry functions.
    ListFunctions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("MKZ_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        // A failure here means a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::TruncationFailure { .. }
        | Error::QuadratureFailure { .. }
        | Error::DivergentIntegrand(_) => 3,
        _ => 2,
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse {what} entry `{p}`")))
        })
        .collect()
}

fn resolve_function(id: &str, domain: Domain) -> Result<RealFunction, Error> {
    let entry = lookup(id)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown function id `{id}`")))?;
    match domain {
        Domain::Unit => Ok(entry.func),
        Domain::Ray => to_ray(&entry.func),
    }
}

fn build_config(n: u32, tail_tol: Option<f64>, rel_tol: Option<f64>) -> OperatorConfig {
    let mut cfg = OperatorConfig::new(n);
    if let Some(t) = tail_tol {
        cfg.trunc.tail_tol = t;
    }
    if let Some(r) = rel_tol {
        cfg.quad.rel_tol = r;
    }
    cfg
}

fn analysis_config(seed: u64, tail_tol: Option<f64>, rel_tol: Option<f64>) -> AnalysisConfig {
    let mut acfg = AnalysisConfig::default().with_seed(seed);
    if let Some(t) = tail_tol {
        acfg.trunc.tail_tol = t;
    }
    if let Some(r) = rel_tol {
        acfg.quad.rel_tol = r;
    }
    acfg
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Eval {
            op,
            n,
            function,
            points,
            format,
            tail_tol,
            rel_tol,
        } => {
            let kind: OperatorKind = op.parse()?;
            let f = resolve_function(&function, kind.domain())?;
            let pts: Vec<f64> = parse_list(&points, "point")?;
            if pts.is_empty() {
                return Err(Error::InvalidConfig("no evaluation points given".into()));
            }
            if kind.domain() == Domain::Unit {
                let limit = 1.0 - mkz_ops::analysis::NORM_WINDOW_DELTA;
                if let Some(&bad) = pts.iter().find(|&&x| !(0.0..=limit).contains(&x)) {
                    return Err(Error::OutOfDomain {
                        domain: Domain::Unit,
                        value: bad,
                    });
                }
            }
            let cfg = build_config(n, tail_tol, rel_tol);
            let vals = apply_grid(kind, &cfg, &f, &pts)?;
            let var = match kind.domain() {
                Domain::Unit => "x",
                Domain::Ray => "xi",
            };
            match format {
                Format::Csv => {
                    println!("{var},value");
                    for (x, v) in pts.iter().zip(&vals) {
                        println!("{},{}", fmt_float(*x), fmt_float(*v));
                    }
                }
                Format::Json => {
                    let rows: Vec<String> = pts
                        .iter()
                        .zip(&vals)
                        .map(|(x, v)| {
                            format!(
                                "{{\"{var}\":{},\"value\":{}}}",
                                fmt_float(*x),
                                fmt_float(*v)
                            )
                        })
                        .collect();
                    println!("[{}]", rows.join(","));
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Converge {
            op,
            function,
            n_list,
            tail_tol,
            rel_tol,
        } => {
            let kind: OperatorKind = op.parse()?;
            if kind.domain() != Domain::Unit {
                return Err(Error::InvalidConfig(
                    "convergence experiments run on the unit-side operators".into(),
                ));
            }
            let f = resolve_function(&function, Domain::Unit)?;
            let ns: Vec<u32> = parse_list(&n_list, "order")?;
            let acfg = analysis_config(0, tail_tol, rel_tol);
            let rep = convergence_experiment(kind, &f, &ns, &acfg)?;
            println!("n,error");
            for (n, e) in rep.n_list.iter().zip(&rep.errors) {
                println!("{n},{}", fmt_float(*e));
            }
            println!(
                "{{\"operator\":\"{}\",\"function\":\"{}\",\"slope\":{},\"reliable\":{}}}",
                kind,
                rep.label,
                fmt_float(rep.slope),
                rep.reliable
            );
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Verify {
            suite,
            seed,
            tail_tol,
            rel_tol,
        } => {
            let suite: Suite = suite.parse()?;
            let acfg = analysis_config(seed, tail_tol, rel_tol);
            let reports = run_suite(suite, &acfg);
            println!("{}", reports_to_json(&reports));
            if reports.iter().all(|r| r.pass) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }

        Cmd::Kfunc {
            function,
            n_list,
            tail_tol,
            rel_tol,
        } => {
            let f = resolve_function(&function, Domain::Unit)?;
            let ns: Vec<u32> = parse_list(&n_list, "order")?;
            let acfg = analysis_config(0, tail_tol, rel_tol);
            let mut rows = Vec::new();
            for &n in &ns {
                if n < 2 {
                    return Err(Error::InvalidConfig("kfunc needs n >= 2".into()));
                }
                let b = k_bound(&f, n, &acfg)?;
                rows.push(format!(
                    "{{\"function\":\"{}\",\"n\":{n},\"t\":{},\"lower\":{},\"upper\":{},\"witness\":\"{}\"}}",
                    function,
                    fmt_float(b.t),
                    fmt_float(b.lower),
                    fmt_float(b.upper),
                    b.witness
                ));
            }
            println!("[{}]", rows.join(","));
            Ok(ExitCode::SUCCESS)
        }

        Cmd::ListFunctions => {
            println!("id,smoothness_class,boundary_class");
            for e in registry() {
                println!(
                    "{},{},{}",
                    e.func.label(),
                    if e.in_w2 { "W2" } else { "-" },
                    if e.in_w20 { "W2_0" } else { "-" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
