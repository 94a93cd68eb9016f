//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit code.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::expr::expand;
use crate::identities::{density, density_csv, IdentityReport, Registry, Settings, Statistic};
use crate::partitions::{build_stat_table, StatMethod, DEFAULT_ENUM_CAP};
use crate::ring::RingTag;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub default_order: usize,
    pub enum_cap: usize,
    pub dp_cap: usize,
    pub gf2_cap: usize,
    pub output: Option<Output>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            default_order: 300,
            enum_cap: DEFAULT_ENUM_CAP,
            dp_cap: 1000,
            gf2_cap: 5000,
            output: None,
        }
    }
}

impl Config {
    /// Defaults overridden by `QBECK_ENUM_CAP`, `QBECK_DP_CAP`, `QBECK_GF2_CAP`.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Config::default();
        for (var, slot) in [
            ("QBECK_ENUM_CAP", &mut cfg.enum_cap),
            ("QBECK_DP_CAP", &mut cfg.dp_cap),
            ("QBECK_GF2_CAP", &mut cfg.gf2_cap),
        ] {
            if let Ok(text) = std::env::var(var) {
                *slot = text
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&v: &usize| v > 0)
                    .ok_or_else(|| Error::InvalidArgument(format!("{var} must be a positive integer")))?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qbeck", version, about = "Exact q-series expansion and verification of Beck-type partition identities")]
struct Cli {
    /// Truncation order (default 300).
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// Seed for the randomized Lambert instances.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand a series expression, e.g. "quot([poch(5,5)^4],[poch(1,1)])".
    Expand {
        expr: String,
        #[arg(long, default_value = "rational")]
        ring: RingTag,
    },
    /// Run registry checks (all of them unless --id is given).
    Verify {
        #[arg(long = "id")]
        ids: Vec<String>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Print the registry ids and exit.
        #[arg(long)]
        list: bool,
    },
    /// Residue tables of p, N, NT and M_ω as CSV.
    Stats {
        #[arg(long)]
        n: usize,
        #[arg(long = "mod")]
        modulus: usize,
        #[arg(long, default_value = "enum")]
        method: StatMethod,
    },
    /// Running parity-match densities for a residue pair.
    Density {
        #[arg(long)]
        stat: Statistic,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 1000)]
        upto: usize,
        #[arg(long, default_value_t = 100)]
        stride: usize,
        #[arg(long, default_value_t = 2)]
        modulus: usize,
        #[arg(long)]
        csv: bool,
        /// Fail unless the last density is within --tolerance of the target.
        #[arg(long)]
        assert_conjectures: bool,
        #[arg(long, default_value_t = 0.08)]
        tolerance: f64,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::UnknownIdentity(_)
        | Error::InvalidArgument(_)
        | Error::BudgetExceeded { .. }
        | Error::RingMismatch { .. } => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut config = match Config::from_env() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    config.output = cli.output;
    let order = cli.order.unwrap_or(config.default_order);
    let result = match cli.command {
        Command::Expand { expr, ring } => cmd_expand(&expr, order, ring, &config, out),
        Command::Verify { ids, json, csv, list } => {
            if list {
                Registry::ids().iter().try_for_each(|id| writeln!(out, "{id}")).map(|_| EXIT_OK).map_err(io)
            } else {
                let fmt = match (json, csv) {
                    (true, _) => Output::Json,
                    (_, true) => Output::Csv,
                    _ => config.output.unwrap_or(Output::Text),
                };
                cmd_verify(&ids, order, cli.seed, fmt, out)
            }
        }
        Command::Stats { n, modulus, method } => cmd_stats(n, modulus, method, &config, out),
        Command::Density {
            stat,
            i,
            j,
            upto,
            stride,
            modulus,
            csv,
            assert_conjectures,
            tolerance,
        } => {
            let fmt = if csv { Output::Csv } else { config.output.unwrap_or(Output::Text) };
            cmd_density(
                DensityArgs {
                    stat,
                    i,
                    j,
                    modulus,
                    upto,
                    stride,
                    assert_conjectures,
                    tolerance,
                },
                fmt,
                &config,
                out,
                err,
            )
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

pub fn cmd_expand(expr: &str, order: usize, ring: RingTag, config: &Config, out: &mut dyn Write) -> Result<i32> {
    let series = expand(expr, order, ring)?;
    match config.output.unwrap_or(Output::Json) {
        Output::Json => writeln!(out, "{}", series.to_json()).map_err(io)?,
        Output::Csv => {
            writeln!(out, "n,coeff").map_err(io)?;
            for (n, c) in series.coeff_strings().iter().enumerate() {
                writeln!(out, "{n},\"{c}\"").map_err(io)?;
            }
        }
        Output::Text => writeln!(out, "{}", series.coeff_strings().join(" ")).map_err(io)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(ids: &[String], order: usize, seed: Option<u64>, fmt: Output, out: &mut dyn Write) -> Result<i32> {
    let mut settings = Settings::default();
    if let Some(seed) = seed {
        settings.seed = seed;
    }
    let selected: Vec<&str> = ids.iter().map(String::as_str).collect();
    let reports = Registry::new(settings).run_many(&selected, order)?;
    write_reports(&reports, fmt, out)?;
    Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAILED })
}

fn write_reports(reports: &[IdentityReport], fmt: Output, out: &mut dyn Write) -> Result<()> {
    match fmt {
        Output::Json => {
            let text = serde_json::to_string_pretty(reports).expect("reports serialize");
            writeln!(out, "{text}").map_err(io)
        }
        Output::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
            w.write_record(["id", "order", "passed", "first_mismatch", "elapsed_ms", "error"])
                .map_err(csv_err)?;
            for r in reports {
                w.write_record([
                    r.id.clone(),
                    r.order.to_string(),
                    r.passed.to_string(),
                    r.first_mismatch.map(|n| n.to_string()).unwrap_or_default(),
                    format!("{:.1}", r.elapsed.as_secs_f64() * 1e3),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            out.write_all(&bytes).map_err(io)
        }
        Output::Text => {
            for r in reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let detail = match (&r.error, r.first_mismatch) {
                    (Some(e), _) => format!("  error: {e}"),
                    (None, Some(n)) => format!("  first mismatch at q^{n}"),
                    _ => String::new(),
                };
                writeln!(
                    out,
                    "{status} {:<14} order {:<4} {:>8.1} ms{detail}",
                    r.id,
                    r.order,
                    r.elapsed.as_secs_f64() * 1e3
                )
                .map_err(io)?;
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} checks, {failed} failed", reports.len()).map_err(io)
        }
    }
}

pub fn cmd_stats(n: usize, modulus: usize, method: StatMethod, config: &Config, out: &mut dyn Write) -> Result<i32> {
    if method != StatMethod::Enumerate && n > config.dp_cap {
        return Err(Error::BudgetExceeded {
            what: "stats n",
            requested: n,
            cap: config.dp_cap,
        });
    }
    let table = build_stat_table(n, modulus, method, config.enum_cap)?;
    table.write_csv(out)?;
    Ok(EXIT_OK)
}

pub struct DensityArgs {
    pub stat: Statistic,
    pub i: usize,
    pub j: usize,
    pub modulus: usize,
    pub upto: usize,
    pub stride: usize,
    pub assert_conjectures: bool,
    pub tolerance: f64,
}

pub fn cmd_density(
    args: DensityArgs,
    fmt: Output,
    config: &Config,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let rows = density(args.stat, args.i, args.j, args.modulus, args.upto, args.stride, config.gf2_cap)?;
    match fmt {
        Output::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize")).map_err(io)?
        }
        Output::Csv => write!(out, "{}", density_csv(&rows)).map_err(io)?,
        Output::Text => {
            for r in &rows {
                writeln!(
                    out,
                    "n={:<6} matches={:<6} density={:.6} target={:.6}{}",
                    r.upto,
                    r.matches,
                    r.density_f64(),
                    r.target_f64(),
                    if r.forced_ok { "" } else { "  forced matches violated" }
                )
                .map_err(io)?;
            }
        }
    }
    let mut code = EXIT_OK;
    if rows.iter().any(|r| !r.forced_ok) {
        let _ = writeln!(err, "a match forced by a proved congruence is missing");
        code = EXIT_FAILED;
    }
    if args.assert_conjectures {
        if let Some(last) = rows.last() {
            let gap = (last.density_f64() - last.target_f64()).abs();
            if gap > args.tolerance {
                let _ = writeln!(
                    err,
                    "density {:.6} is {gap:.6} from target {:.6} (tolerance {})",
                    last.density_f64(),
                    last.target_f64(),
                    args.tolerance
                );
                code = EXIT_FAILED;
            }
        }
    }
    Ok(code)
}
