//! Flags, subcommands and list/grid syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use renyi_core::props::PropertyId;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "renyi", version, about = "Two-parameter Rényi measures, variational certificates, strong-converse exponents and protocol simulations")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report values (and read rates) in nats instead of bits.
    #[arg(long, global = true)]
    pub nats: bool,
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Worker threads for sweeps; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate measures on a grid of orders.
    Measure(MeasureArgs),
    /// Strong-converse exponent curves.
    Exponent(ExponentArgs),
    /// Solve the variational forms and compare with the closed forms.
    Variational(VariationalArgs),
    /// Exact or Monte-Carlo protocol simulation.
    Simulate(SimulateArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
    /// H~ / I~ over several inputs and a dense order grid, in parallel.
    Sweep(SweepArgs),
}

/// A list of reals: `0.5,1,2,inf` or ranges `start:stop:step`, mixed freely.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "+inf" | "∞" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")),
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_real(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_real(a)?, parse_real(b)?, parse_real(step)?);
                if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite() && b >= a) {
                    return Err(format!("bad range `{item}`: need finite start <= stop and step > 0"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                if n > 1_000_000 {
                    return Err(format!("range `{item}` has more than 10^6 points"));
                }
                out.extend((0..=n).map(|k| a + k as f64 * step));
            }
            _ => return Err(format!("cannot parse `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    if out.iter().any(|v| v.is_nan()) {
        return Err("NaN in list".into());
    }
    Ok(Grid(out))
}

fn parse_prop(s: &str) -> Result<PropertyId, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// D_alpha(p||q) between two marginals.
    D,
    /// H_alpha of a marginal, or of the joint as a single variable.
    Entropy,
    H,
    HStar,
    HBar,
    HBarStar,
    I,
    IStar,
    IBar,
    IBarStar,
    HTilde,
    ITilde,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::D => "d",
            Quantity::Entropy => "entropy",
            Quantity::H => "h",
            Quantity::HStar => "h-star",
            Quantity::HBar => "h-bar",
            Quantity::HBarStar => "h-bar-star",
            Quantity::I => "i",
            Quantity::IStar => "i-star",
            Quantity::IBar => "i-bar",
            Quantity::IBarStar => "i-bar-star",
            Quantity::HTilde => "h-tilde",
            Quantity::ITilde => "i-tilde",
        }
    }

    pub fn two_parameter(self) -> bool {
        matches!(self, Quantity::HTilde | Quantity::ITilde)
    }

    pub const JOINT: [Quantity; 10] = [
        Quantity::H,
        Quantity::HStar,
        Quantity::HBar,
        Quantity::HBarStar,
        Quantity::I,
        Quantity::IStar,
        Quantity::IBar,
        Quantity::IBarStar,
        Quantity::HTilde,
        Quantity::ITilde,
    ];
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Input JSON; give two marginals for D.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Quantities to report; every applicable one when absent.
    #[arg(long, value_delimiter = ',')]
    pub quantity: Vec<Quantity>,
    #[arg(long, value_parser = parse_grid, default_value = "0,0.25,0.5,0.75,1,1.5,2,4,inf")]
    pub alpha: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "0,0.5,1,2,inf")]
    pub beta: Grid,
    /// Reject the (0, 0) corner instead of using the iterated limit.
    #[arg(long)]
    pub strict_corner: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Pa,
    Sc,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[arg(value_enum)]
    pub task: Task,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_grid, default_value = "0.3,0.5,0.8,2")]
    pub beta: Grid,
    /// Rates, in bits unless --nats.
    #[arg(long, value_parser = parse_grid)]
    pub rate: Grid,
    /// Spacing of the alpha grid before golden-section refinement.
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    /// Golden-section tolerance on alpha.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Skip the dual optimization for beta < 1.
    #[arg(long)]
    pub no_dual: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    H,
    I,
}

#[derive(Debug, Clone, Args)]
pub struct VariationalArgs {
    #[arg(value_enum)]
    pub form: Form,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_grid, default_value = "0.5,1.5,2")]
    pub alpha: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "0.5,1,2")]
    pub beta: Grid,
    /// Step-length tolerance of the mirror-descent refinement.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Subdivisions per simplex edge of the initial grid.
    #[arg(long, default_value_t = 8)]
    pub grid_resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Exact,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Exhaustive,
    Affine,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub task: Task,
    /// Single-letter joint; for sc the input distribution and channel are read off it.
    #[arg(long)]
    pub input: PathBuf,
    /// Block lengths.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n: Vec<usize>,
    /// Range or codebook sizes; overrides --rate.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Rates giving M = max(1, round(2^(nR))).
    #[arg(long, value_parser = parse_grid)]
    pub rate: Option<Grid>,
    #[arg(long, value_parser = parse_grid, default_value = "0.5,2")]
    pub beta: Grid,
    /// Soft-covering estimator.
    #[arg(long, value_enum, default_value = "exact")]
    pub estimator: Estimator,
    /// Hash family for privacy amplification.
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub family: Family,
    /// Monte-Carlo codebooks or sampled hashes.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Limit on enumerated hash tables or codebooks.
    #[arg(long, default_value_t = renyi_core::protocol::DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Property ids; all when absent.
    #[arg(long, value_delimiter = ',', value_parser = parse_prop)]
    pub props: Option<Vec<PropertyId>>,
    /// Random instances per property.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Slack allowed on each inequality.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "h-tilde,i-tilde")]
    pub quantity: Vec<Quantity>,
    #[arg(long, value_parser = parse_grid, default_value = "0:4:0.05")]
    pub alpha: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "0:4:0.05")]
    pub beta: Grid,
    #[arg(long)]
    pub strict_corner: bool,
}

/// Validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub nats: bool,
    pub threads: Option<usize>,
}

fn check_orders(name: &str, g: &Grid) -> Result<(), CliError> {
    match g.0.iter().find(|v| **v < 0.0) {
        Some(v) => Err(CliError::config(format!("--{name}: orders must be non-negative, got {v}"))),
        None => Ok(()),
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("--{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn new(cli: Cli) -> Result<Self, CliError> {
        match &cli.command {
            Command::Measure(a) => {
                check_orders("alpha", &a.alpha)?;
                check_orders("beta", &a.beta)?;
            }
            Command::Sweep(a) => {
                check_orders("alpha", &a.alpha)?;
                check_orders("beta", &a.beta)?;
            }
            Command::Exponent(a) => {
                check_orders("beta", &a.beta)?;
                check_positive("grid-step", a.grid_step)?;
                check_positive("tol", a.tol)?;
                if let Some(r) = a.rate.0.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
                    return Err(CliError::config(format!("--rate: rates must be finite and non-negative, got {r}")));
                }
            }
            Command::Variational(a) => {
                check_orders("alpha", &a.alpha)?;
                check_orders("beta", &a.beta)?;
                check_positive("tol", a.tol)?;
                if a.grid_resolution == 0 {
                    return Err(CliError::config("--grid-resolution must be at least 1"));
                }
            }
            Command::Simulate(a) => {
                check_orders("beta", &a.beta)?;
                if a.m.is_none() && a.rate.is_none() {
                    return Err(CliError::config("simulate needs --m or --rate"));
                }
                if a.n.contains(&0) {
                    return Err(CliError::config("--n: block lengths must be at least 1"));
                }
                if a.m.as_ref().is_some_and(|m| m.contains(&0)) {
                    return Err(CliError::config("--m: sizes must be at least 1"));
                }
            }
            Command::Verify(a) => {
                check_positive("tol", a.tol)?;
                if a.samples == 0 {
                    return Err(CliError::config("--samples must be at least 1"));
                }
            }
        }
        if cli.common.threads == Some(0) {
            return Err(CliError::config("--threads must be at least 1"));
        }
        Ok(RunConfig {
            command: cli.command,
            out: cli.common.out,
            seed: cli.common.seed,
            nats: cli.common.nats,
            threads: cli.common.threads,
        })
    }

    /// Multiplier from bits to the output unit.
    pub fn unit(&self) -> f64 {
        if self.nats { std::f64::consts::LN_2 } else { 1.0 }
    }

    pub fn unit_name(&self) -> &'static str {
        if self.nats { "nats" } else { "bits" }
    }

    /// `# …` comment line shared by every CSV.
    pub fn comment(&self, command: &str, extra: &str) -> String {
        format!(
            "renyi {} {command} seed={} units={}{}{extra}",
            env!("CARGO_PKG_VERSION"),
            self.seed,
            self.unit_name(),
            if extra.is_empty() { "" } else { " " }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5, 1,inf").unwrap().0, vec![0.5, 1.0, f64::INFINITY]);
        assert_eq!(parse_grid("0:1:0.25").unwrap().0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().0.len(), 4);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn rate_is_required_and_nonempty() {
        assert!(Cli::try_parse_from(["renyi", "exponent", "pa", "--input", "j.json"]).is_err());
        assert!(Cli::try_parse_from(["renyi", "exponent", "pa", "--input", "j.json", "--rate", ""]).is_err());
        let cli = Cli::try_parse_from(["renyi", "exponent", "sc", "--input", "j.json", "--rate", "0:1:0.5", "--nats"]).unwrap();
        let cfg = RunConfig::new(cli).unwrap();
        assert!(cfg.nats);
    }

    #[test]
    fn props_and_quantities_parse() {
        let cli = Cli::try_parse_from(["renyi", "verify", "--props", "mono-alpha,additivity"]).unwrap();
        let Command::Verify(v) = cli.command else { panic!() };
        assert_eq!(v.props.unwrap(), vec![PropertyId::MonoAlpha, PropertyId::Additivity]);
        assert!(Cli::try_parse_from(["renyi", "verify", "--props", "nope"]).is_err());
        let cli = Cli::try_parse_from(["renyi", "measure", "--input", "a", "--quantity", "h-tilde,i-bar-star"]).unwrap();
        let Command::Measure(m) = cli.command else { panic!() };
        assert_eq!(m.quantity, vec![Quantity::HTilde, Quantity::IBarStar]);
        assert_eq!(Quantity::IBarStar.name(), "i-bar-star");
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["renyi", "simulate", "sc", "--input", "j", "--n", "1,2", "--m", "3"]).unwrap();
        let Command::Simulate(s) = cli.command else { panic!() };
        assert_eq!((s.n, s.m), (vec![1, 2], Some(vec![3])));
    }
}
