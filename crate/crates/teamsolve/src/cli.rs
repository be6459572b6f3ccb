use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::TraceFormat;

/// Approximate Nash equilibria of adversarial team games.
///
/// Exit status: 0 success or certified, 1 input error, 2 iteration budget
/// exhausted (best profile still written), 3 verification failed.
/// Set TEAMSOLVE_LOG (error, warn, info, debug, trace) for diagnostics.
#[derive(Debug, Parser)]
#[command(name = "teamsolve", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run gradient-descent-max on a single-adversary game.
    Solve(SolveArgs),
    /// Certify a profile by enumerating unilateral deviations.
    Verify(VerifyArgs),
    /// Write a generated game.
    Gen(GenArgs),
    /// Approximate proximal point of the team's max-value function.
    Prox(ProxArgs),
    /// Run GDmm on a two-team game.
    Gdmm(GdmmArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum InitArg {
    #[default]
    Uniform,
    /// Dirichlet(1) draws from --seed.
    Dirichlet,
}

impl From<InitArg> for teamsolve_core::dynamics::Init {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Uniform => teamsolve_core::dynamics::Init::Uniform,
            InitArg::Dirichlet => teamsolve_core::dynamics::Init::Dirichlet,
        }
    }
}

/// Options shared by `solve` and `gdmm`.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step size; derived from the game's smoothness bounds when omitted.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Solution file (for a batch of `solve --game` files, an existing directory).
    #[arg(long)]
    pub out: PathBuf,
    /// Trace format; the trace goes next to the output as `<stem>.trace.<format>`.
    #[arg(long, value_enum, default_value_t = TraceFormat::Json)]
    pub format: TraceFormat,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
}

impl RunArgs {
    pub fn new(epsilon: f64, out: PathBuf) -> Self {
        RunArgs {
            epsilon,
            seed: 0,
            eta: None,
            max_iters: None,
            out,
            format: TraceFormat::Json,
            init: InitArg::Uniform,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Game file; repeat to solve a batch.
    #[arg(long = "game", required = true)]
    pub games: Vec<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Certificate check spacing in iterations.
    #[arg(long, default_value_t = 1)]
    pub check_every: usize,
    /// Potential recording spacing in iterations; 0 records only the ends.
    #[arg(long, default_value_t = teamsolve_core::dynamics::DEFAULT_POTENTIAL_EVERY)]
    pub potential_every: usize,
    /// Proximal tolerance for potential evaluations (default ε⁴/64).
    #[arg(long)]
    pub prox_tol: Option<f64>,
    /// Override the Lipschitz bound; requires --smoothness.
    #[arg(long, requires = "smoothness")]
    pub lipschitz: Option<f64>,
    #[arg(long, requires = "lipschitz")]
    pub smoothness: Option<f64>,
    /// Parallel workers for a batch of games.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl SolveArgs {
    pub fn new(game: PathBuf, epsilon: f64, out: PathBuf) -> Self {
        SolveArgs {
            games: vec![game],
            run: RunArgs::new(epsilon, out),
            check_every: 1,
            potential_every: teamsolve_core::dynamics::DEFAULT_POTENTIAL_EVERY,
            prox_tol: None,
            lipschitz: None,
            smoothness: None,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Profile file, or a solution written by solve or gdmm.
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Congestion,
    Potential,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ProxArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Profile file whose `team` is the center.
    #[arg(long)]
    pub center: PathBuf,
    #[arg(long)]
    pub ell: f64,
    #[arg(long)]
    pub tol: f64,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    /// Pick from the team size.
    Auto,
    Grid,
    Nested,
}

#[derive(Debug, Clone, Args)]
pub struct GdmmArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
    /// Minimizers and maximizers, e.g. `2,2`; overrides the file's `teams`.
    #[arg(long, value_parser = parse_team_sizes)]
    pub team_sizes: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = OracleArg::Auto)]
    pub oracle: OracleArg,
    /// Grid oracle spacing.
    #[arg(long, default_value_t = 0.02)]
    pub grid_step: f64,
    /// Nested oracle restarts.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Report stationarity diagnostics for the returned profile.
    #[arg(long)]
    pub diagnostics: bool,
}

impl GdmmArgs {
    pub fn new(game: PathBuf, epsilon: f64, out: PathBuf) -> Self {
        GdmmArgs {
            game,
            run: RunArgs::new(epsilon, out),
            team_sizes: None,
            oracle: OracleArg::Auto,
            grid_step: 0.02,
            restarts: 1,
            diagnostics: false,
        }
    }
}

fn parse_team_sizes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected N,M")?;
    let n = a.trim().parse().map_err(|_| format!("bad minimizer count `{a}`"))?;
    let m = b.trim().parse().map_err(|_| format!("bad maximizer count `{b}`"))?;
    Ok((n, m))
}
