//! `amcert`: covering, norm and trace-class certificates from the command line.

mod config;
mod output;
mod runner;

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alphamod::covering::{build_bapu, build_covering};
use alphamod::families::SymbolFamily;
use alphamod::grid::Grid1D;
use alphamod::quantize::quantize_kn;
use alphamod::schatten::{certify_schatten_p, hs_prediction, CertOptions};
use alphamod::spaces::{besov_modulation_probe, product_alpha_mod_norm, sobolev_besov_probe, NormSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{CertSpec, Config, CoveringConfig, GridConfig, CORPUS};
use runner::{Abort, Entry};

/// Overrides the rayon thread count.
const THREADS_VAR: &str = "AMCERT_THREADS";

#[derive(Parser)]
#[command(name = "amcert", version, about = "Alpha-modulation coverings, norms and Schatten class certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Number of grid nodes (even).
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Half-width L of the spatial grid; defaults to 3π.
    #[arg(long, conflicts_with = "half_width_pi")]
    half_width: Option<f64>,
    /// Half-width as a multiple of π.
    #[arg(long)]
    half_width_pi: Option<f64>,
}

impl GridArgs {
    fn config(&self) -> GridConfig {
        let half_width_pi = match (self.half_width, self.half_width_pi) {
            (None, None) => Some(3.0),
            (_, k) => k,
        };
        GridConfig { half_width: self.half_width, half_width_pi, len: self.n }
    }

    fn build(&self) -> Result<Grid1D<f64>, Abort> {
        self.config().build().map_err(Abort::Config)
    }
}

#[derive(Args, Clone)]
struct CoveringArgs {
    /// Covered frequency band [-Ω, Ω].
    #[arg(long, default_value_t = 5.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Transition width of the partition windows, in (0, 1/2).
    #[arg(long, default_value_t = 0.25)]
    rho: f64,
}

impl CoveringArgs {
    fn config(&self) -> CoveringConfig {
        CoveringConfig { omega: self.omega, delta: self.delta, c: self.c, rho: self.rho }
    }
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Symbol generator with default parameters.
    #[arg(long, default_value = "gaussian")]
    family: String,
    /// Seed for random-bandlimited.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FamilyArgs {
    fn build(&self) -> Result<SymbolFamily, Abort> {
        SymbolFamily::by_name(&self.family, self.seed).map_err(|e| Abort::Config(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeKind {
    /// Modulation and Besov norms of dilated Gaussians on the line.
    Line,
    /// Product Besov norm against weighted L² norms on the phase plane.
    Plane,
}

#[derive(Subcommand)]
enum Command {
    /// Print an α-covering as JSON.
    Covering {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Product α-modulation norm of each family member.
    Norm {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        s1: f64,
        #[arg(long, default_value_t = 0.0)]
        s2: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        covering: CoveringArgs,
    },
    /// Kohn–Nirenberg matrix of one family member as CSV (re,im pairs).
    Quantize {
        #[command(flatten)]
        family: FamilyArgs,
        /// Which member of the family.
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// I_p norm against the covering norm, with the Hilbert–Schmidt identity.
    Schatten {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "gaussian")]
        symbol: String,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        covering: CoveringArgs,
    },
    /// Trace-norm certificates for every member of a family.
    VerifyThm1 {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        family: FamilyArgs,
        /// Synthesize every piece and record the chain.
        #[arg(long)]
        chain: bool,
        #[arg(long)]
        cap: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        covering: CoveringArgs,
    },
    /// Commutator certificates over the Lipschitz corpus.
    VerifyThm2 {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated corpus members.
        #[arg(long, value_delimiter = ',', default_values_t = CORPUS.map(String::from))]
        corpus: Vec<String>,
        #[arg(long)]
        cap: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        covering: CoveringArgs,
    },
    /// I_p certificates for 1 ≤ p ≤ 2.
    VerifyIp {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        cap: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        covering: CoveringArgs,
    },
    /// Ratio tables between norms over a fixed family.
    ProbeEmbeddings {
        #[arg(long, value_enum)]
        kind: ProbeKind,
        /// Grid nodes; 2048 on the line, 256 on the plane by default.
        #[arg(long)]
        n: Option<usize>,
        /// Half-width; 8π on the line, 6.4π on the plane by default.
        #[arg(long)]
        half_width: Option<f64>,
        /// Covering band; 30 on the line, 4 on the plane by default.
        #[arg(long)]
        omega: Option<f64>,
        /// Weight exponent of the L²_s and H^s norms (plane only).
        #[arg(long, default_value_t = 2.5)]
        s: f64,
        /// Dilation factors of the Gaussian family.
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
    },
    /// Run a configuration file and write a report directory.
    Run {
        config: PathBuf,
        /// Report directory.
        #[arg(long, default_value = "amcert-out")]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Hard(Vec<String>),
    Io(std::io::Error),
}

impl From<Abort> for Failure {
    fn from(a: Abort) -> Self {
        match a {
            Abort::Config(m) => Failure::Config(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn lib(e: alphamod::Error) -> Failure {
    Failure::Config(e.to_string())
}

/// Writes to standard output; a closed pipe downstream is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(value: &T) {
    emit(&(serde_json::to_string_pretty(value).expect("value serializes") + "\n"));
}

fn hard_failures(entries: &[Entry]) -> Result<(), Failure> {
    let failing: Vec<String> =
        entries.iter().filter(|e| !e.pass()).map(|e| format!("{}: {}", e.id, e.failures().join(", "))).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Hard(failing))
    }
}

fn run_spec(grid: &GridArgs, covering: &CoveringArgs, spec: CertSpec) -> Result<(), Failure> {
    let cfg = Config { grid: grid.config(), covering: covering.config(), certificates: vec![spec] };
    let entries = runner::run(&cfg)?;
    emit(&(output::certificates_json(&entries) + "\n"));
    hard_failures(&entries)
}

fn first_member(family: &SymbolFamily, grid: Grid1D<f64>, k: usize) -> Result<alphamod::families::Member<f64>, Failure> {
    let mut members = family.generate(grid).map_err(lib)?;
    if k >= members.len() {
        return Err(Failure::Config(format!("member {k} out of range, family has {}", members.len())));
    }
    Ok(members.swap_remove(k))
}

#[derive(Serialize)]
struct NormRow {
    label: String,
    value: f64,
    leakage: f64,
}

#[derive(Serialize)]
struct SchattenReport {
    label: String,
    p: f64,
    alpha: f64,
    lhs: f64,
    rhs: f64,
    ratio: Option<f64>,
    hs_frobenius: f64,
    hs_prediction: f64,
    hs_rel_error: f64,
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Covering { alpha, omega, delta, c } => {
            print_json(&build_covering(alpha, omega, delta, c).map_err(lib)?);
            Ok(())
        }
        Command::Norm { alpha, s1, s2, p, q, family, grid, covering } => {
            let g = grid.build()?;
            let cov = build_covering(alpha, covering.omega, covering.delta, covering.c).map_err(lib)?;
            let bx = build_bapu(&cov, g, covering.rho).map_err(lib)?;
            let bxi = build_bapu(&cov, g.dual(), covering.rho).map_err(lib)?;
            let spec = NormSpec::product(s1, s2, p, q, alpha).map_err(lib)?;
            let rows = family
                .build()?
                .generate(g)
                .map_err(lib)?
                .into_iter()
                .map(|m| {
                    let (value, table) = product_alpha_mod_norm(&m.symbol, &bx, &bxi, &spec).map_err(lib)?;
                    Ok(NormRow { label: m.label, value, leakage: table.leakage })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            print_json(&rows);
            Ok(())
        }
        Command::Quantize { family, member, grid, out } => {
            let g = grid.build()?;
            let m = first_member(&family.build()?, g, member)?;
            let csv = quantize_kn(&m.symbol).map_err(lib)?.to_csv();
            match out {
                Some(path) => output::write_atomic(&path, csv.as_bytes())?,
                None => emit(&csv),
            }
            Ok(())
        }
        Command::Schatten { p, symbol, alpha, seed, grid, covering } => {
            let g = grid.build()?;
            let family = SymbolFamily::by_name(&symbol, seed).map_err(lib)?;
            let m = first_member(&family, g, 0)?;
            let cov = build_covering(alpha, covering.omega, covering.delta, covering.c).map_err(lib)?;
            let bx = build_bapu(&cov, g, covering.rho).map_err(lib)?;
            let bxi = build_bapu(&cov, g.dual(), covering.rho).map_err(lib)?;
            let cert = certify_schatten_p(&m.symbol, p, &bx, &bxi, &CertOptions::default()).map_err(lib)?;
            let frob = quantize_kn(&m.symbol).map_err(lib)?.frobenius();
            let pred = hs_prediction(&m.symbol);
            let report = SchattenReport {
                label: m.label,
                p,
                alpha,
                lhs: cert.lhs,
                rhs: cert.rhs,
                ratio: cert.ratio.value(),
                hs_frobenius: frob,
                hs_prediction: pred,
                hs_rel_error: if pred > 0.0 { (frob - pred).abs() / pred } else { frob },
            };
            print_json(&report);
            if cert.pass {
                Ok(())
            } else {
                Err(Failure::Hard(vec![format!("schatten_p {}: {}", report.label, cert.failures().join(", "))]))
            }
        }
        Command::VerifyThm1 { alpha, family, chain, cap, grid, covering } => {
            run_spec(&grid, &covering, CertSpec::Thm1 { alphas: vec![alpha], family: family.build()?, chain, cap })
        }
        Command::VerifyThm2 { alpha, family, corpus, cap, grid, covering } => run_spec(
            &grid,
            &covering,
            CertSpec::Thm2 { alphas: vec![alpha], symbol: family.build()?, corpus, cap },
        ),
        Command::VerifyIp { p, alpha, family, cap, grid, covering } => {
            run_spec(&grid, &covering, CertSpec::SchattenP { p, alphas: vec![alpha], family: family.build()?, cap })
        }
        Command::ProbeEmbeddings { kind, n, half_width, omega, s, scales } => {
            let table = match kind {
                ProbeKind::Line => {
                    let g = Grid1D::new(half_width.unwrap_or(8.0 * PI), n.unwrap_or(2048)).map_err(lib)?;
                    let scales = scales.unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
                    besov_modulation_probe(g, omega.unwrap_or(30.0), &scales).map_err(lib)?
                }
                ProbeKind::Plane => {
                    let g = Grid1D::new(half_width.unwrap_or(6.4 * PI), n.unwrap_or(256)).map_err(lib)?;
                    let scales = scales.unwrap_or_else(|| vec![0.75, 1.0, 1.5]);
                    sobolev_besov_probe(g, omega.unwrap_or(4.0), s, &scales).map_err(lib)?
                }
            };
            print_json(&table);
            Ok(())
        }
        Command::Run { config, out } => run_config(&config, &out),
    }
}

fn run_config(path: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = Config::load(path).map_err(Failure::Config)?;
    let entries = runner::run(&cfg)?;
    output::write_report(out, &cfg, &entries)?;
    hard_failures(&entries)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        format!("{THREADS_VAR} = '{raw}' is not a positive integer")
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).format_timestamp(None).init();
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("config error: {msg}");
        return ExitCode::from(2);
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Hard(failing)) => {
            for f in failing {
                eprintln!("hard fail: {f}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}
