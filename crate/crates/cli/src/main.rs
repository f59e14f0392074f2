use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fock_cli::config::RunConfig;
use fock_cli::{dispatch, CliError, Command};
use fock_core::cplx::ReIm;

/// Toeplitz operators on Fock spaces, in batch.
#[derive(Parser, Debug)]
#[command(name = "fock", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output directory for the JSON summary and CSV payloads.
    #[arg(long, global = true)]
    out: Option<String>,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Truncated Toeplitz matrix of the symbol.
    Assemble,
    /// Essential spectrum of a vanishing-oscillation symbol.
    EssSpec,
    /// Essential norm bounds.
    EssNorm,
    /// Fredholm test for T_f - lambda.
    Fredholm,
    /// Band decay profile D(t) on a uniform grid.
    BandProfile,
    /// Oscillation curve on expanding spheres.
    Osc,
    /// Berezin-route oscillation statistics.
    Vmo,
    /// Runs the invariant battery; exits 1 on any failure.
    Verify,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// hermite-tensor, polar or uniform.
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long, global = true)]
    size: Option<usize>,
    #[arg(long, global = true)]
    extent: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    breaks: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    symbol: Option<String>,
    /// Truncation degree N.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    t_values: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, global = true)]
    window_radius: Option<f64>,
    #[arg(long, global = true)]
    angular_samples: Option<usize>,
    #[arg(long, global = true)]
    cluster_tol: Option<f64>,
    #[arg(long, global = true)]
    vo_radius: Option<f64>,
    #[arg(long, global = true)]
    vo_threshold: Option<f64>,
    /// Spectral parameter as `re,im`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long, global = true)]
    margin: Option<f64>,
    #[arg(long, global = true)]
    projection_norm: Option<f64>,
    /// projection or multiplication.
    #[arg(long, global = true)]
    band_operator: Option<String>,
    #[arg(long, global = true)]
    lattice_extent: Option<f64>,
}

macro_rules! apply {
    ($src:expr => $($dst:expr),+ ; $($field:ident),+) => {
        $( if let Some(v) = $src.$field.clone() { $dst = v; } )+
    };
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        apply!(self => cfg.params.n, cfg.params.p, cfg.params.alpha; n, p, alpha);
        apply!(self => cfg.grid.scheme, cfg.grid.size, cfg.grid.breaks; scheme, size, breaks);
        apply!(self => cfg.symbol; symbol);
        let o = &mut cfg.options;
        apply!(self => o.degree, o.t_values, o.radii; degree, t_values, radii);
        apply!(self => o.window_radius, o.angular_samples, o.cluster_tol; window_radius, angular_samples, cluster_tol);
        apply!(self => o.vo_radius, o.vo_threshold, o.band_operator; vo_radius, vo_threshold, band_operator);
        if self.extent.is_some() {
            cfg.grid.extent = self.extent;
        }
        if self.margin.is_some() {
            o.margin = self.margin;
        }
        if self.projection_norm.is_some() {
            o.projection_norm = self.projection_norm;
        }
        if self.lattice_extent.is_some() {
            o.lattice_extent = self.lattice_extent;
        }
        if let Some(l) = &self.lambda {
            let [re, im] = l[..] else {
                return Err(CliError::Parse(format!("--lambda takes re,im, got {} values", l.len())));
            };
            o.lambda = ReIm { re, im };
        }
        Ok(())
    }
}

fn command(c: Cmd) -> Command {
    match c {
        Cmd::Assemble => Command::Assemble,
        Cmd::EssSpec => Command::EssSpec,
        Cmd::EssNorm => Command::EssNorm,
        Cmd::Fredholm => Command::Fredholm,
        Cmd::BandProfile => Command::BandProfile,
        Cmd::Osc => Command::Osc,
        Cmd::Vmo => Command::Vmo,
        Cmd::Verify => Command::Verify,
    }
}

/// `FOCK_THREADS` must be a positive integer when set. The library runs
/// sequentially, so the value only caps future parallel sections.
fn check_threads() -> Result<(), CliError> {
    match std::env::var("FOCK_THREADS") {
        Ok(v) if v.parse::<usize>().map_or(true, |k| k == 0) => {
            Err(CliError::Parse(format!("FOCK_THREADS must be a positive integer, got {v:?}")))
        }
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    check_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    for path in dispatch(command(cli.command), &cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fock: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
