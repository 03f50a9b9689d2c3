use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mscasimir::cli::{self, BimoduleSpec, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "mscasimir", version, about = "Root data, Cartan subsets and radial Casimir operators for so(p+1,q+1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    q: usize,
    /// Use the defect pair of this dimension instead of the four-point pair.
    #[arg(long)]
    defect: Option<usize>,
    /// Cartan subset label: euclid, empty, 0, 1, 1', 2, 01, 02, 12, fund, C_i, C'_i.
    #[arg(long)]
    cartan: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override KEY=VALUE (keys: cluster_gap, verify); repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BimoduleKind {
    Scalar,
    Trivial,
    Spinor,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Restricted root decomposition of a Cartan subset.
    Rootdata(Common),
    /// Catalog of Cartan subsets with their ε tables.
    Cartan(Common),
    /// Radial part of the Casimir for a bimodule.
    Radial {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BimoduleKind::Scalar)]
        bimodule: BimoduleKind,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        /// JSON file {dim, left: {F_mu_nu: matrix}, right: {...}} for --bimodule custom.
        #[arg(long)]
        matrices: Option<PathBuf>,
    },
    /// Verification suites (all when --suite is omitted).
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(mscasimir::verify::SUITES))]
        suite: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Cross-ratio and causal-region utilities.
    Coords {
        #[command(subcommand)]
        action: CoordsCmd,
    },
}

#[derive(Subcommand)]
enum CoordsCmd {
    /// Causal region of (χ₁, χ₂).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        chi1: String,
        #[arg(long, allow_hyphen_values = true)]
        chi2: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Cross-ratios (u, v) of a group element given as a JSON matrix.
    Uv {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    Ok((k.to_string(), v.parse().map_err(|_| format!("bad value {v:?}"))?))
}

fn fmt(f: Format) -> OutputFormat {
    match f {
        Format::Json => OutputFormat::Json,
        Format::Text => OutputFormat::Text,
    }
}

fn config(c: &Common) -> RunConfig {
    RunConfig {
        p: c.p,
        q: c.q,
        defect: c.defect,
        cartan: c.cartan.clone(),
        bimodule: None,
        seed: c.seed,
        tolerances: c.tol.iter().cloned().collect::<BTreeMap<_, _>>(),
        format: fmt(c.format),
    }
}

fn main() -> ExitCode {
    let out = match Cli::parse().command {
        Command::Rootdata(c) => cli::cmd_rootdata(&config(&c)),
        Command::Cartan(c) => cli::cmd_cartan(&config(&c)),
        Command::Radial { common, bimodule, alpha, beta, matrices } => {
            let mut cfg = config(&common);
            cfg.bimodule = Some(match bimodule {
                BimoduleKind::Scalar => BimoduleSpec::Scalar { alpha, beta },
                BimoduleKind::Trivial => BimoduleSpec::Trivial,
                BimoduleKind::Spinor => BimoduleSpec::Spinor { alpha, beta },
                BimoduleKind::Custom => match matrices {
                    Some(path) => BimoduleSpec::Custom { path },
                    None => {
                        eprintln!("--bimodule custom needs --matrices FILE");
                        return ExitCode::from(2);
                    }
                },
            });
            cli::cmd_radial(&cfg)
        }
        Command::Verify { suite, seed, format } => {
            let cfg = RunConfig { seed, format: fmt(format), ..RunConfig::default() };
            cli::cmd_verify(&cfg, &suite)
        }
        Command::Coords { action } => match action {
            CoordsCmd::Classify { chi1, chi2, format } => {
                let cfg = RunConfig { format: fmt(format), ..RunConfig::default() };
                match (cli::parse_complex(&chi1), cli::parse_complex(&chi2)) {
                    (Ok(a), Ok(b)) => cli::cmd_coords_classify(&cfg, a, b),
                    (Err(e), _) | (_, Err(e)) => cli::execute("coords.classify", &cfg, || Err(e)),
                }
            }
            CoordsCmd::Uv { matrix, q, format } => {
                let cfg = RunConfig { q, format: fmt(format), ..RunConfig::default() };
                cli::cmd_coords_uv(&cfg, &matrix)
            }
        },
    };
    print!("{}", out.output);
    ExitCode::from(out.code as u8)
}
