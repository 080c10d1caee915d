use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use diagforms::arith::{primes_1mod4, SubsetKind};
use diagforms::forms::{class_group_info, write_forms_csv};
use diagforms::harness::{
    bernays_scan, char_sum_diagnostics, density_run, load_or_build, render_bernays, render_density,
    render_diagnostics, render_prop13, verify_prop13, ExperimentConfig, OutputFormat, ZPolicy,
};
use diagforms::lfunc::{l_value, ProductCharacter};
use diagforms::moments::moment_report_with;
use diagforms::sieve::{union_count, SieveOptions};
use diagforms::{Error, ShapeZ};

const EXIT_USAGE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "diagforms", version, about = "Representation counts of x^2 + z y^2 and related experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Number of sieve shards.
    #[arg(long, global = true, default_value_t = 1)]
    shards: usize,
    /// Directory for cached representation tables.
    #[arg(long, global = true, env = "DIAGFORMS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    /// Z = ln X ln ln X.
    #[value(name = "paper", alias = "loglog")]
    LogLog,
    /// Z given by --z.
    Explicit,
}

#[derive(Subcommand)]
enum Command {
    /// Table of r(n, z) for n <= X.
    Sieve {
        #[arg(long)]
        z: u64,
        #[arg(long, value_parser = parse_count)]
        x: u64,
        /// Also write the binary table to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Number of n <= X represented by at least one of the forms.
    Union {
        #[arg(long, value_parser = parse_count)]
        x: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<u64>,
    },
    /// First and second moments of the weighted sums over a prime subset.
    Moments {
        #[arg(long, value_parser = parse_count)]
        x: u64,
        /// Prime cutoff.
        #[arg(long)]
        z: u64,
        /// `p`, `q:<stride>` or a comma-separated prime list.
        #[arg(long, default_value = "p", value_parser = parse_subset)]
        subset: SubsetKind,
    },
    /// Exact cross sum of r(n, z1) r(n, z2) against its main term.
    Prop13 {
        #[arg(long)]
        z1: u64,
        #[arg(long)]
        z2: u64,
        /// One or more X, ascending.
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        x: Vec<u64>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// Count of n <= X represented by a single form, scaled by sqrt(ln X) / X.
    Bernays {
        #[arg(long)]
        z: u64,
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        x: Vec<u64>,
    },
    /// Density of the union over primes p = 1 (mod 4) below Z, with its lower bound.
    Density {
        #[arg(long, value_parser = parse_count)]
        x: u64,
        #[arg(long, value_enum, default_value_t = Policy::LogLog)]
        policy: Policy,
        /// Cutoff for the explicit policy.
        #[arg(long, required_if_eq("policy", "explicit"))]
        z: Option<u64>,
        #[arg(long, default_value = "p", value_parser = parse_subset)]
        subset: SubsetKind,
    },
    /// Character sums T(n) over primes p = 1 (mod 4) below Z.
    Diagnostics {
        #[arg(long)]
        z: u64,
        /// Largest modulus; defaults to Z ln Z.
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
    },
    /// Reduced forms of discriminant -4z and the genus pairs.
    Forms {
        #[arg(long)]
        z: u64,
    },
    /// L(s, chi) for a product of Kronecker characters.
    Lvalue {
        /// Discriminants whose characters are multiplied.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        chi: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
}

/// Accepts plain integers and scientific notation such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("{s:?} is not a nonnegative integer"))
    }
}

fn parse_subset(s: &str) -> Result<SubsetKind, String> {
    if s == "p" {
        return Ok(SubsetKind::P);
    }
    if let Some(stride) = s.strip_prefix("q:") {
        return stride
            .parse()
            .map(|stride| SubsetKind::Q { stride })
            .map_err(|_| format!("bad stride in {s:?}"));
    }
    s.split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map(SubsetKind::Explicit)
        .map_err(|_| format!("{s:?} is not p, q:<stride> or a prime list"))
}

fn render<T: Serialize>(rows: &[T], format: OutputFormat) -> anyhow::Result<String> {
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows)? + "\n",
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    })
}

#[derive(Serialize)]
struct UnionRow {
    #[serde(rename = "X")]
    x: u64,
    #[serde(rename = "N")]
    n: u64,
}

#[derive(Serialize)]
struct MomentRow {
    #[serde(rename = "X")]
    x: u64,
    #[serde(rename = "Z")]
    z: u64,
    subset_size: usize,
    first_moment: f64,
    diagonal: f64,
    off_diagonal: f64,
    cs_lower_bound: f64,
    union_count: u64,
    regime_violation: bool,
}

#[derive(Serialize)]
struct LValueRow {
    chi: String,
    s: u32,
    value: f64,
    tail_bound: f64,
    terms_used: u64,
}

#[derive(Serialize)]
struct SieveJson<'a> {
    #[serde(rename = "X")]
    x: u64,
    z: u64,
    r: &'a [u16],
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let format = OutputFormat::from(cli.common.format);
    let config = |xs: Vec<u64>, z_cap: Option<u64>, subset: SubsetKind, eps: f64| {
        let c = ExperimentConfig {
            xs,
            z_cap,
            subset,
            eps,
            format,
            cache_dir: cli.common.cache_dir.clone(),
            shards: cli.common.shards,
        };
        c.validate().map(|_| c)
    };
    if cli.common.shards == 0 {
        return Err(Error::invalid("shard count must be at least 1").into());
    }
    let opts = SieveOptions::with_shards(cli.common.shards);
    let cache = cli.common.cache_dir.as_deref();

    let text = match cli.command {
        Command::Sieve { z, x, out } => {
            let table = load_or_build(x, ShapeZ::new(z)?, opts, cache)?;
            if let Some(path) = out {
                table.save(&path).with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    table.write_csv(&mut buf)?;
                    String::from_utf8(buf)?
                }
                OutputFormat::Json => {
                    serde_json::to_string(&SieveJson {
                        x,
                        z,
                        r: table.counts(),
                    })? + "\n"
                }
            }
        }
        Command::Union { x, z } => {
            let shapes = z.into_iter().map(ShapeZ::new).collect::<Result<Vec<_>, _>>()?;
            render(&[UnionRow { x, n: union_count(x, &shapes) }], format)?
        }
        Command::Moments { x, z, subset } => {
            let c = config(vec![x], Some(z), subset, 1e-10)?;
            let primes = primes_1mod4(z, c.subset.clone())?;
            let m = moment_report_with(x, &primes, c.sieve_options())?;
            if !m.cauchy_schwarz_holds() {
                return Err(Error::invariant("Cauchy-Schwarz bound violated").into());
            }
            match format {
                OutputFormat::Json => serde_json::to_string_pretty(&m)? + "\n",
                OutputFormat::Csv => render(
                    &[MomentRow {
                        x: m.x,
                        z: m.z,
                        subset_size: m.subset_size,
                        first_moment: m.first_moment,
                        diagonal: m.diagonal,
                        off_diagonal: m.off_diagonal,
                        cs_lower_bound: m.cs_lower_bound,
                        union_count: m.union_count,
                        regime_violation: m.regime_violation,
                    }],
                    format,
                )?,
            }
        }
        Command::Prop13 { z1, z2, x, eps } => {
            let c = config(x, None, SubsetKind::P, eps)?;
            let r = verify_prop13(ShapeZ::new(z1)?, ShapeZ::new(z2)?, &c.xs, c.eps, opts, cache)?;
            render_prop13(&r, format)?
        }
        Command::Bernays { z, x } => {
            let c = config(x, None, SubsetKind::P, 1e-10)?;
            render_bernays(&bernays_scan(ShapeZ::new(z)?, &c.xs, opts, cache)?, format)?
        }
        Command::Density { x, policy, z, subset } => {
            let c = config(vec![x], z, subset, 1e-10)?;
            let policy = match policy {
                Policy::LogLog => ZPolicy::LogLog,
                Policy::Explicit => ZPolicy::Explicit(z.expect("required by clap")),
            };
            render_density(&density_run(x, policy, c.subset, opts)?, format)?
        }
        Command::Diagnostics { z, n } => {
            let n = n.unwrap_or_else(|| (z as f64 * (z.max(1) as f64).ln()) as u64);
            render_diagnostics(&char_sum_diagnostics(z, n)?, format)?
        }
        Command::Forms { z } => {
            let info = class_group_info(ShapeZ::new(z)?);
            match format {
                OutputFormat::Json => serde_json::to_string_pretty(&info)? + "\n",
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    write_forms_csv(&info.forms, &mut buf)?;
                    String::from_utf8(buf)?
                }
            }
        }
        Command::Lvalue { chi, s, eps } => {
            let character = ProductCharacter::new(&chi)?;
            let v = l_value(&character, s, eps)?;
            let label = chi.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            render(
                &[LValueRow {
                    chi: label,
                    s,
                    value: v.value,
                    tail_bound: v.tail_bound,
                    terms_used: v.terms_used,
                }],
                format,
            )?
        }
    };
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_invariant_violation() => EXIT_INVARIANT,
        Some(Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Cache(_)) => 1,
        Some(_) => EXIT_USAGE,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invariant("odd count").into()), EXIT_INVARIANT);
        assert_eq!(exit_code(&Error::NotInW(6).into()), EXIT_USAGE);
        assert_eq!(exit_code(&Error::PrincipalCharacter.into()), EXIT_USAGE);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn subsets() {
        assert_eq!(parse_subset("p"), Ok(SubsetKind::P));
        assert_eq!(parse_subset("q:3"), Ok(SubsetKind::Q { stride: 3 }));
        assert_eq!(parse_subset("5,13"), Ok(SubsetKind::Explicit(vec![5, 13])));
        assert!(parse_subset("x").is_err());
    }
}
