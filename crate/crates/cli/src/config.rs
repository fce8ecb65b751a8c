//! Command-line surface and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug, Clone)]
#[command(name = "cubic-hodge", version, about = "Special cubic Hodge free energies from the loop equation")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory holding one JSON file per solved genus.
    #[arg(long, global = true, env = "HODGE_LOOP_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Solve H_1..H_G and print H_G.
    Compute(GenusArgs),
    /// Print the gap polynomial R_G (the log x coefficient at genus 1).
    Rg(GenusArgs),
    /// Print the t-expansion of H_G.
    Hodge(HodgeArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
    /// Commutators and rational-case identities.
    Virasoro(VirasoroArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GenusArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub genus: u32,
    /// Override the jet cutoff (default 3G+2).
    #[arg(long)]
    pub jet_cutoff: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct HodgeArgs {
    #[command(flatten)]
    pub genus: GenusArgs,
    /// Highest time variable t_n.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Highest total t-degree.
    #[arg(long, default_value_t = 4)]
    pub d_max: u32,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum, num_args = 1.., default_values_t = [Suite::All])]
    pub suite: Vec<Suite>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub genus: u32,
    #[arg(long)]
    pub jet_cutoff: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long, default_value_t = 4)]
    pub d_max: u32,
}

#[derive(Args, Debug, Clone)]
pub struct VirasoroArgs {
    #[arg(long, default_value_t = 2)]
    pub k1: i64,
    #[arg(long, default_value_t = 3)]
    pub k2: i64,
    /// Check [L_m, L_n] for 0 <= m, n <= mmax.
    #[arg(long, default_value_t = 3)]
    pub mmax: i64,
    /// Degree of the monomial basis.
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// Also check the c-product, B-tilde and integral identities.
    #[arg(long)]
    pub integrals: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    LoopResidual,
    Closure,
    Grading,
    XiOracle,
    QOracle,
    Bell,
    PowerSum,
    HodgeDimension,
    FirstFlow,
    Gap,
    Faber,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::LoopResidual,
        Suite::Closure,
        Suite::Grading,
        Suite::XiOracle,
        Suite::QOracle,
        Suite::Bell,
        Suite::PowerSum,
        Suite::HodgeDimension,
        Suite::FirstFlow,
        Suite::Gap,
        Suite::Faber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LoopResidual => "loop-residual",
            Suite::Closure => "closure",
            Suite::Grading => "grading",
            Suite::XiOracle => "xi-oracle",
            Suite::QOracle => "q-oracle",
            Suite::Bell => "bell",
            Suite::PowerSum => "power-sum",
            Suite::HodgeDimension => "hodge-dimension",
            Suite::FirstFlow => "first-flow",
            Suite::Gap => "gap",
            Suite::Faber => "faber",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Compute,
    Rg,
    Hodge,
    Verify,
    Virasoro,
}

/// Everything a command needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub genus: u32,
    pub jet_cutoff: Option<usize>,
    pub n_max: usize,
    pub d_max: u32,
    pub pairs: Vec<(i64, i64)>,
    pub m_max: i64,
    pub basis_degree: u32,
    pub integrals: bool,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub suites: Vec<Suite>,
}

impl RunConfig {
    pub fn for_command(command: CommandKind, genus: u32) -> Self {
        RunConfig {
            command,
            genus,
            jet_cutoff: None,
            n_max: 3,
            d_max: 4,
            pairs: vec![(2, 3)],
            m_max: 3,
            basis_degree: 3,
            integrals: false,
            format: Format::Text,
            cache_dir: None,
            threads: None,
            suites: Suite::EACH.to_vec(),
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let mut cfg = match cli.command {
            Command::Compute(a) => {
                let mut c = RunConfig::for_command(CommandKind::Compute, a.genus);
                c.jet_cutoff = a.jet_cutoff;
                c
            }
            Command::Rg(a) => {
                let mut c = RunConfig::for_command(CommandKind::Rg, a.genus);
                c.jet_cutoff = a.jet_cutoff;
                c
            }
            Command::Hodge(a) => {
                let mut c = RunConfig::for_command(CommandKind::Hodge, a.genus.genus);
                c.jet_cutoff = a.genus.jet_cutoff;
                c.n_max = a.n_max;
                c.d_max = a.d_max;
                c
            }
            Command::Verify(a) => {
                let mut c = RunConfig::for_command(CommandKind::Verify, a.genus);
                c.jet_cutoff = a.jet_cutoff;
                c.n_max = a.n_max;
                c.d_max = a.d_max;
                let mut suites: Vec<Suite> = if a.suite.contains(&Suite::All) { Suite::EACH.to_vec() } else { a.suite };
                suites.sort();
                suites.dedup();
                c.suites = suites;
                c
            }
            Command::Virasoro(a) => {
                let mut c = RunConfig::for_command(CommandKind::Virasoro, 1);
                c.pairs = vec![(a.k1, a.k2)];
                c.m_max = a.mmax;
                c.basis_degree = a.degree;
                c.integrals = a.integrals;
                c
            }
        };
        cfg.format = cli.format;
        cfg.cache_dir = cli.cache_dir;
        cfg.threads = cli.threads.map(|t| t as usize);
        cfg
    }
}
