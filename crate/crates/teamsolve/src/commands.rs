use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use teamsolve_core::dynamics::{gradient_descent_max, GdConfig, Outcome};
use teamsolve_core::extension::ne_gap;
use teamsolve_core::game::SmoothnessBounds;
use teamsolve_core::generators::{
    congestion_to_team_game_with_cap, potential_game_embed, random_game, random_potential_tables,
    random_two_team_game, CongestionSpec, DEFAULT_ADVERSARY_CAP,
};
use teamsolve_core::moreau::{proximal_point, ProxConfig, ProxMethod};
use teamsolve_core::two_team::{self, gd_mm, Candidate, GdmmConfig, OracleStrategy, TwoTeamProfile};
use teamsolve_core::MixedProfile;

use crate::cli::{Command, GdmmArgs, GenArgs, GenKind, OracleArg, ProxArgs, SolveArgs, VerifyArgs};
use crate::error::{CliError, Status};
use crate::output::{trace_path, write_gdmm_trace, write_solve_trace};
use crate::schema::{
    self, load_game, load_json, load_profile, CertificateOut, GameFile, ProfileFile, Provenance, SolutionFile,
    SOLUTION_FORMAT, SOLUTION_VERSION,
};

/// What a command prints and how the process exits.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub status: Status,
    pub message: String,
}

impl Report {
    fn new(status: Status, message: String) -> Self {
        Report { status, message }
    }
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Prox(a) => cmd_prox(a),
        Command::Gdmm(a) => cmd_gdmm(a),
    }
}

fn check_epsilon(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage("epsilon must be positive".into()))
    }
}

fn check_out_file(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ if path.is_dir() => Err(CliError::Usage(format!("output path {} is a directory", path.display()))),
        _ => Ok(()),
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::BudgetExhausted => "budget_exhausted",
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[k] } else { 0.5 * (v[k - 1] + v[k]) })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Report, CliError> {
    check_epsilon(args.run.epsilon)?;
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if args.games.len() == 1 {
        check_out_file(&args.run.out)?;
        let (status, msg) = solve_one(&args.games[0], &args.run.out, args)?;
        return Ok(Report::new(status, msg));
    }
    if !args.run.out.is_dir() {
        return Err(CliError::Usage(format!(
            "with several --game files, --out must be an existing directory ({})",
            args.run.out.display()
        )));
    }
    let mut outs: Vec<PathBuf> = Vec::with_capacity(args.games.len());
    for g in &args.games {
        let stem = g.file_stem().ok_or_else(|| CliError::Usage(format!("{} has no file name", g.display())))?;
        let out = args.run.out.join(format!("{}.solution.json", stem.to_string_lossy()));
        if outs.contains(&out) {
            return Err(CliError::Usage(format!("two games would both write {}", out.display())));
        }
        outs.push(out);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", args.jobs)))?;
    let results: Vec<Result<(Status, String), CliError>> = pool.install(|| {
        args.games
            .par_iter()
            .zip(outs.par_iter())
            .map(|(g, o)| solve_one(g, o, args))
            .collect()
    });
    // input errors dominate, then unfinished runs
    let mut status = Status::Success;
    let mut message = String::new();
    for (g, r) in args.games.iter().zip(results) {
        match r {
            Ok((s, msg)) => {
                if status != Status::InputError && s == Status::BudgetExhausted {
                    status = s;
                }
                let _ = writeln!(message, "{}: {msg}", g.display());
            }
            Err(e) => {
                status = Status::InputError;
                let _ = writeln!(message, "{}: error: {e}", g.display());
            }
        }
    }
    Ok(Report::new(status, message.trim_end().to_string()))
}

fn solve_one(game_path: &Path, out_path: &Path, args: &SolveArgs) -> Result<(Status, String), CliError> {
    let source = game_path.display().to_string();
    let doc = load_game(game_path)?;
    if doc.m > 1 {
        return Err(CliError::Usage(format!("{source}: {} maximizers; use `gdmm` for two-team games", doc.m)));
    }
    let game = doc.team_game(&source)?;
    let run = &args.run;
    let bounds = match (args.lipschitz, args.smoothness) {
        (Some(l), Some(s)) => Some(SmoothnessBounds::user(l, s)?),
        _ => None,
    };
    let cfg = GdConfig {
        epsilon: run.epsilon,
        eta: run.eta,
        max_iters: run.max_iters,
        seed: run.seed,
        init: run.init.into(),
        check_every: args.check_every,
        potential_every: args.potential_every,
        bounds,
        prox_tol: args.prox_tol,
    };
    cfg.resolve(&game)?;
    let out = gradient_descent_max(&game, &cfg)?;
    let resolved = &out.trace.config;
    write_solve_trace(&trace_path(out_path, run.format), &out.trace, run.format)?;

    let allowance = 2.0 * resolved.prox_tol + 1e-9;
    let violations = out.trace.potential_violations(allowance);
    let status = match out.trace.outcome {
        Outcome::Converged => Status::Success,
        Outcome::BudgetExhausted => Status::BudgetExhausted,
    };
    let solution = SolutionFile {
        format: SOLUTION_FORMAT.into(),
        version: SOLUTION_VERSION,
        command: "solve".into(),
        epsilon: run.epsilon,
        seed: run.seed,
        outcome: outcome_name(out.trace.outcome).into(),
        iterations: out.trace.iterations,
        profile: ProfileFile::from_mixed(&out.profile),
        certificate: CertificateOut::new(&out.certificate, run.epsilon),
        solver: json!({
            "algorithm": "gradient-descent-max",
            "eta": resolved.eta,
            "max_iters": resolved.max_iters,
            "check_every": resolved.check_every,
            "potential_every": resolved.potential_every,
            "prox_tol": resolved.prox_tol,
            "lipschitz": resolved.bounds.lipschitz,
            "smoothness": resolved.bounds.smoothness,
            "ell": resolved.ell,
            "potential": {
                "recorded": out.trace.potentials().len(),
                "allowance": allowance,
                "violations": violations.len(),
                "median_decrease_per_iteration": median(out.trace.per_iteration_decreases()),
                "epsilon_pow4": run.epsilon.powi(4),
            },
        }),
    };
    schema::write_json(out_path, &solution)?;
    let msg = format!(
        "{} after {} iterations, gap {} (team {}, adversary {})",
        solution.outcome, solution.iterations, out.certificate.gap(), out.certificate.gap_team, out.certificate.gap_adversary
    );
    Ok((status, msg))
}

/// Congestion specs as they appear in generator input and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongestionSpecFile {
    pub n_players: usize,
    pub edges: Vec<EdgeFile>,
    /// Per player, per strategy: the edges it uses.
    pub strategies: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    /// Cost tables `c(0..=n_players)`, one per menu entry.
    pub menu: Vec<Vec<f64>>,
}

impl CongestionSpecFile {
    pub fn to_spec(&self) -> CongestionSpec {
        CongestionSpec {
            n_players: self.n_players,
            menus: self.edges.iter().map(|e| e.menu.clone()).collect(),
            strategies: self.strategies.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpecFile {
    /// Team action counts; with `maximizer_actions`, the minimizers'.
    pub actions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary_actions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximizer_actions: Option<Vec<usize>>,
    #[serde(default = "default_range")]
    pub value_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpecFile {
    /// Action counts of all players, minimizers first.
    pub actions: Vec<usize>,
    pub minimizers: usize,
    #[serde(default = "default_range")]
    pub value_range: [f64; 2],
}

fn default_range() -> [f64; 2] {
    [-1.0, 1.0]
}

fn provenance<T: Serialize>(generator: &str, seed: u64, spec: &T) -> Provenance {
    Provenance {
        generator: generator.into(),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        spec: serde_json::to_value(spec).expect("serializable"),
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<Report, CliError> {
    check_out_file(&args.out)?;
    let spec_src = args.spec.display().to_string();
    let file = match args.kind {
        GenKind::Random => {
            let spec: RandomSpecFile = load_json(&args.spec)?;
            let range = (spec.value_range[0], spec.value_range[1]);
            let prov = Some(provenance("random", args.seed, &spec));
            match (&spec.maximizer_actions, spec.adversary_actions) {
                (Some(max), None) => {
                    GameFile::from_two_team_game(&random_two_team_game(&spec.actions, max, args.seed, range)?, prov)?
                }
                (None, Some(b)) => {
                    GameFile::from_team_game(&random_game(spec.actions.len(), &spec.actions, b, args.seed, range)?, prov)?
                }
                _ => {
                    return Err(CliError::schema(
                        &spec_src,
                        "",
                        "give exactly one of `adversary_actions` and `maximizer_actions`",
                    ))
                }
            }
        }
        GenKind::Congestion => {
            let spec: CongestionSpecFile = load_json(&args.spec)?;
            let cap = spec.adversary_cap.unwrap_or(DEFAULT_ADVERSARY_CAP);
            let cg = congestion_to_team_game_with_cap(&spec.to_spec(), cap)?;
            GameFile::from_team_game(&cg.game, Some(provenance("congestion", args.seed, &spec)))?
        }
        GenKind::Potential => {
            let spec: PotentialSpecFile = load_json(&args.spec)?;
            let range = (spec.value_range[0], spec.value_range[1]);
            let tables = random_potential_tables(&spec.actions, spec.minimizers, args.seed, range)?;
            let game = potential_game_embed(&tables)?;
            GameFile::from_two_team_game(&game, Some(provenance("potential", args.seed, &spec)))?
        }
    };
    schema::write_json(&args.out, &file)?;
    let shape = match file.teams {
        Some(t) => format!("{} minimizers, {} maximizers", t.minimizers, t.maximizers),
        None => format!("{} team players, one adversary", file.n),
    };
    Ok(Report::new(Status::Success, format!("wrote {} ({shape})", args.out.display())))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    check_epsilon(args.epsilon)?;
    let source = args.game.display().to_string();
    let profile_src = args.profile.display().to_string();
    let doc = load_game(&args.game)?;
    let pf = load_profile(&args.profile)?;
    let maximizers = pf.maximizer_list(&profile_src)?;
    let mut message = String::new();
    let cert = if doc.m == 1 {
        let game = doc.team_game(&source)?;
        let [adversary]: [Vec<f64>; 1] = maximizers
            .try_into()
            .map_err(|v: Vec<Vec<f64>>| CliError::schema(&profile_src, "maximizers", format!("{} maximizers, the game has 1", v.len())))?;
        let profile = MixedProfile::new(pf.team.clone(), adversary);
        let cert = ne_gap(&game, &profile)?;
        if let Some(prov) = doc.file.provenance.as_ref().filter(|p| p.generator == "congestion") {
            let spec: CongestionSpecFile = serde_json::from_value(prov.spec.clone())
                .map_err(|e| CliError::schema(&source, "provenance.spec", e.to_string()))?;
            let cap = spec.adversary_cap.unwrap_or(DEFAULT_ADVERSARY_CAP);
            let cg = congestion_to_team_game_with_cap(&spec.to_spec(), cap)?;
            if cg.game.payoff() == game.payoff() {
                let gains = cg.player_cost_gains(&profile)?;
                let _ = writeln!(message, "original cost gains = {gains:?}");
            } else {
                log::warn!("{source}: payoff differs from its congestion provenance; skipping original-cost check");
            }
        }
        cert
    } else {
        let game = doc.two_team_game()?;
        two_team::ne_gap(&game, &TwoTeamProfile { team: pf.team.clone(), maximizers })?
    };
    let verdict = cert.gap() <= args.epsilon;
    let _ = write!(
        message,
        "gap_team = {}\ngap_adversary = {}\ngap = {}\n{}",
        cert.gap_team,
        cert.gap_adversary,
        cert.gap(),
        if verdict {
            format!("{}-NE: yes", args.epsilon)
        } else {
            format!("{}-NE: no", args.epsilon)
        }
    );
    let status = if verdict { Status::Success } else { Status::VerificationFailed };
    Ok(Report::new(status, message))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxOutput {
    pub ell: f64,
    pub tol: f64,
    pub method: String,
    pub center: Vec<Vec<f64>>,
    pub prox_point: Vec<Vec<f64>>,
    /// `max_b U(x̂, b) + ℓ‖center - x̂‖²`, the potential at the center.
    pub objective_value: f64,
    pub certified_gap: f64,
    pub lower_bound: f64,
    pub prox_distance: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn cmd_prox(args: &ProxArgs) -> Result<Report, CliError> {
    if !(args.ell > 0.0 && args.ell.is_finite()) {
        return Err(CliError::Usage("ell must be positive".into()));
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Usage("tol must be positive".into()));
    }
    if let Some(out) = &args.out {
        check_out_file(out)?;
    }
    let source = args.game.display().to_string();
    let game = load_game(&args.game)?.team_game(&source)?;
    let center = load_profile(&args.center)?.team;
    game.validate_team(&center)?;
    let r = proximal_point(&game, &center, &ProxConfig::new(args.ell, args.tol))?;
    let out = ProxOutput {
        ell: args.ell,
        tol: args.tol,
        method: match r.method {
            ProxMethod::ProxLinear => "prox-linear".into(),
            ProxMethod::Subgradient => "subgradient".into(),
        },
        prox_distance: r.prox_distance(),
        center: r.center,
        prox_point: r.prox_point,
        objective_value: r.objective_value,
        certified_gap: r.certified_gap,
        lower_bound: r.lower_bound,
        converged: r.converged,
        iterations: r.iterations,
    };
    let status = if out.converged { Status::Success } else { Status::BudgetExhausted };
    let message = match &args.out {
        Some(path) => {
            schema::write_json(path, &out)?;
            format!(
                "prox distance {}, objective {}, certified gap {}",
                out.prox_distance, out.objective_value, out.certified_gap
            )
        }
        None => serde_json::to_string_pretty(&out).expect("serializable"),
    };
    Ok(Report::new(status, message))
}

pub fn cmd_gdmm(args: &GdmmArgs) -> Result<Report, CliError> {
    let run = &args.run;
    check_epsilon(run.epsilon)?;
    check_out_file(&run.out)?;
    let source = args.game.display().to_string();
    let mut doc = load_game(&args.game)?;
    if let Some((n, m)) = args.team_sizes {
        doc = doc.with_team_sizes(n, m, &source)?;
    }
    let game = doc.two_team_game()?;
    let mut cfg = GdmmConfig::new(&game, run.epsilon);
    cfg.seed = run.seed;
    cfg.init = run.init.into();
    cfg.diagnostics = args.diagnostics;
    let nested = |restarts: usize| {
        let mut inner = GdConfig::new(run.epsilon);
        inner.seed = run.seed;
        inner.init = run.init.into();
        OracleStrategy::Nested { config: inner, restarts }
    };
    cfg.oracle = match args.oracle {
        OracleArg::Grid => OracleStrategy::Grid { step: args.grid_step },
        OracleArg::Nested => nested(args.restarts),
        OracleArg::Auto => match cfg.oracle {
            OracleStrategy::Grid { .. } => OracleStrategy::Grid { step: args.grid_step },
            OracleStrategy::Nested { .. } => nested(args.restarts),
        },
    };
    // one maximizer: the whole run is one nested solve, so the step and
    // budget flags configure it and the result matches `solve`
    if game.m() == 1 {
        if let OracleStrategy::Nested { config, .. } = &mut cfg.oracle {
            config.eta = run.eta;
            config.max_iters = run.max_iters;
        }
    } else {
        cfg.eta = run.eta;
        if let Some(t) = run.max_iters {
            cfg.max_iters = t;
        }
    }
    if !game.hypothesis_holds() {
        log::warn!(
            "{source}: {} minimizers against {} maximizers; convergence guarantees need more minimizers than maximizers minus one",
            game.n(),
            game.m()
        );
    }
    let out = gd_mm(&game, &cfg)?;
    write_gdmm_trace(&trace_path(&run.out, run.format), &out.trace, run.format)?;
    let status = match out.trace.outcome {
        Outcome::Converged => Status::Success,
        Outcome::BudgetExhausted => Status::BudgetExhausted,
    };
    let oracle = match &cfg.oracle {
        OracleStrategy::Grid { step } => json!({"kind": "grid", "step": step}),
        OracleStrategy::Nested { restarts, .. } => json!({"kind": "nested", "restarts": restarts}),
    };
    let stationarity = out.stationarity.as_ref().map(|s| {
        json!({
            "x_measure": s.x_measure,
            "x_slack": s.x_slack,
            "y_measure": s.y_measure,
            "y_slack": s.y_slack,
        })
    });
    let profile = if game.m() == 1 {
        ProfileFile::from_mixed(&MixedProfile::new(out.profile.team.clone(), out.profile.maximizers[0].clone()))
    } else {
        ProfileFile::from_two_team(&out.profile)
    };
    let solution = SolutionFile {
        format: SOLUTION_FORMAT.into(),
        version: SOLUTION_VERSION,
        command: "gdmm".into(),
        epsilon: run.epsilon,
        seed: run.seed,
        outcome: outcome_name(out.trace.outcome).into(),
        iterations: out.trace.iterations,
        profile,
        certificate: CertificateOut::new(&out.certificate, run.epsilon),
        solver: json!({
            "algorithm": "gdmm",
            "minimizers": game.n(),
            "maximizers": game.m(),
            "eta": out.trace.eta,
            "max_iters": cfg.max_iters,
            "oracle": oracle,
            "hypothesis_holds": out.trace.hypothesis_holds,
            "candidate": match out.trace.source {
                Candidate::Iterate => "iterate",
                Candidate::WindowAverage => "window_average",
            },
            "stationarity": stationarity,
        }),
    };
    schema::write_json(&run.out, &solution)?;
    let mut message = format!(
        "{} after {} iterations, gap {} (team {}, maximizers {})",
        solution.outcome, solution.iterations, out.certificate.gap(), out.certificate.gap_team, out.certificate.gap_adversary
    );
    if !out.trace.hypothesis_holds {
        message.push_str("\nwarning: the minimizer team is not larger than the maximizer team minus one");
    }
    Ok(Report::new(status, message))
}
