mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use pertkit::Error;

#[derive(Parser, Debug)]
#[command(name = "pertkit", version, about = "Perturbation series for finite matrices, checked against exact oracles")]
struct Cli {
    /// Seed for random instances and Monte-Carlo quadrature.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the summary line on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

/// A pair (A, B) read from JSON matrix files or drawn from the seeded ensemble:
/// A diagonal with levels from 1 upward and gaps in [1, 2), B Hermitian of size `scale`.
#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("input").required(true).args(["a", "random"])))]
pub struct PairInput {
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    /// Draw a random pair of this dimension instead of reading files.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub scale: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Neumann series of (A+B)⁻¹ with exact remainders.
    Resolvent(ResolventArgs),
    /// Eigenvalue coefficients of A + εB from contour integrals.
    EigPerturb(EigArgs),
    /// Exponential and Dyson series at time t.
    Dyson(DysonArgs),
    /// Adiabatic evolution errors over a list of η.
    Adiabatic(AdiabaticArgs),
    /// Series for one regularized scattering entry.
    Scatter(ScatterArgs),
    /// Second- and higher-order scattering terms grouped by diagram.
    Diagrams(DiagramArgs),
    /// Kronecker-sum convolution identities and block inverses.
    #[command(subcommand)]
    Tensor(TensorCommand),
    /// Worked examples.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Args, Debug)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub order: usize,
    /// Shift A by iτ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Also evaluate entry i,j through Feynman parameters (needs --tau and diagonal A).
    #[arg(long, value_parser = parse_pair)]
    pub entry: Option<(usize, usize)>,
    /// Monte-Carlo samples for the Feynman integrals; the tensor grid is used otherwise.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub grid_depth: usize,
}

#[derive(Args, Debug)]
pub struct EigArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub index: usize,
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub contour_points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DysonArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub orders: usize,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
}

#[derive(Args, Debug)]
pub struct AdiabaticArgs {
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    pub eta_list: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Magnus steps per unit of η.
    #[arg(long, default_value_t = 20.0)]
    pub steps_per_eta: f64,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub order: usize,
    /// Geometric τ grid lo:hi:n.
    #[arg(long, value_parser = parse_sweep)]
    pub tau_sweep: Option<(f64, f64, usize)>,
}

#[derive(Args, Debug)]
pub struct DiagramArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Incoming state, e.g. "a:1 b:-1".
    #[arg(long)]
    pub i: String,
    #[arg(long)]
    pub j: String,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub tau: f64,
}

#[derive(Subcommand, Debug)]
pub enum TensorCommand {
    /// Line-integral representation of the resolvent of A₁⊗1 + 1⊗A₂.
    Conv(ConvArgs),
    /// Closed-form inverse of the Dirac block.
    Dirac(DiracArgs),
}

#[derive(Args, Debug)]
pub struct ConvArgs {
    #[arg(long)]
    pub a1: PathBuf,
    #[arg(long)]
    pub a2: PathBuf,
    #[arg(long)]
    pub omega: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub cutoff: f64,
}

#[derive(Args, Debug)]
pub struct DiracArgs {
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub p: [f64; 3],
    #[arg(long)]
    pub m: f64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: (f64, f64),
}

#[derive(Subcommand, Debug)]
pub enum DemoCommand {
    /// −Δ + X² + εX⁴ on a finite-difference grid, with and without a shifted split.
    HarmonicOscillator(OscillatorArgs),
    /// First-order scattering on a periodic chain against the Fourier closed form.
    Born(BornArgs),
    /// Summed first-order cross section on a shell of a cubic momentum grid.
    Rutherford(RutherfordArgs),
    /// Second-order two-particle scattering through a third species.
    ThreeParticle(ThreeParticleArgs),
}

#[derive(Args, Debug)]
pub struct OscillatorArgs {
    #[arg(long, default_value_t = 200)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// A number or "auto".
    #[arg(long, default_value = "0")]
    pub eta: String,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
}

#[derive(Args, Debug)]
pub struct BornArgs {
    #[arg(long, default_value_t = 32)]
    pub len: usize,
    #[arg(long, default_value_t = 5)]
    pub p: usize,
    #[arg(long, default_value_t = 9)]
    pub q: usize,
    #[arg(long, default_value_t = 0.3)]
    pub tau: f64,
}

#[derive(Args, Debug)]
pub struct RutherfordArgs {
    #[arg(long, default_value_t = 8)]
    pub half_extent: i32,
    #[arg(long, default_value_t = 1.0)]
    pub charge: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Radius of the outgoing shell around q₀.
    #[arg(long, default_value_t = 3.0)]
    pub shell: f64,
}

#[derive(Args, Debug)]
pub struct ThreeParticleArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub tau: f64,
    #[arg(long, default_value_t = 2)]
    pub grid_bound: i64,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_floats(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected lo:hi:n".into());
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("{e}"))?;
    let n: usize = parts[2].parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err("need 0 < lo ≤ hi and n ≥ 1".into());
    }
    Ok((lo, hi, n))
}

/// Exit status for each library error; 1 is a failed contract check, 2 a usage error.
fn exit_status(e: &Error) -> u8 {
    match e.code() {
        "parse" => 3,
        "invalid_argument" => 4,
        "non_square" => 5,
        "shape_mismatch" => 6,
        "singular" => 7,
        "not_hermitian" => 8,
        "not_normal" => 9,
        "not_positive_definite" => 10,
        "contour_enclosure" => 11,
        "convergence" => 12,
        "gap_collapse" => 13,
        "step_size" => 14,
        "tracking_loss" => 15,
        "budget_exceeded" => 16,
        "enumeration_guard" => 17,
        "not_a_tree" => 18,
        "not_commuting" => 19,
        _ => 20,
    }
}

const WRITE_FAILED: u8 = 21;

fn run(cli: &Cli) -> pertkit::Result<report::Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Resolvent(a) => commands::resolvent(a, seed),
        Command::EigPerturb(a) => commands::eig_perturb(a, seed),
        Command::Dyson(a) => commands::dyson(a, seed),
        Command::Adiabatic(a) => commands::adiabatic(a, seed),
        Command::Scatter(a) => commands::scatter(a, seed),
        Command::Diagrams(a) => commands::diagrams(a, seed),
        Command::Tensor(TensorCommand::Conv(a)) => commands::tensor_conv(a, seed),
        Command::Tensor(TensorCommand::Dirac(a)) => commands::tensor_dirac(a, seed),
        Command::Demo(DemoCommand::HarmonicOscillator(a)) => commands::demo_oscillator(a, seed),
        Command::Demo(DemoCommand::Born(a)) => commands::demo_born(a, seed),
        Command::Demo(DemoCommand::Rutherford(a)) => commands::demo_rutherford(a, seed),
        Command::Demo(DemoCommand::ThreeParticle(a)) => commands::demo_three_particle(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            let status = exit_status(&e);
            let msg = serde_json::json!({ "error": e.code(), "exit": status, "message": e.to_string() });
            eprintln!("{msg}");
            return ExitCode::from(status);
        }
    };
    let text = report.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let msg = serde_json::json!({ "error": "write", "exit": WRITE_FAILED, "message": format!("{}: {e}", path.display()) });
                eprintln!("{msg}");
                return ExitCode::from(WRITE_FAILED);
            }
        }
        None => print!("{text}"),
    }
    let failed = report.failed_contracts();
    if !cli.quiet {
        eprintln!(
            "{}: {} checks, {} failed contract(s)",
            report.command,
            report.checks.len(),
            failed.len()
        );
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        let msg = serde_json::json!({ "error": "contract", "exit": 1, "failed": failed });
        eprintln!("{msg}");
        ExitCode::from(1)
    }
}
