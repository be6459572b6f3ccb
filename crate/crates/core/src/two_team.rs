//! Games between a team of `n` minimizers and a team of `m` maximizers, and
//! the GDmm loop.
//!
//! Players are ordered minimizers first, then maximizers; the last maximizer
//! (index `m - 1` among maximizers) is the one completed by the extension LPs.
//! With `m = 1` every operation here reduces to its single-adversary
//! counterpart and produces identical numbers.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{dirichlet, gradient_descent_max, project_simplex, GdConfig, Init};
use crate::extension::{extend_blocks, extend_ne, Block, ExtensionAudit, NeCertificate};
use crate::game::{analytic_bounds, check_distribution, increment, uniform, Payoff, TeamGame};
use crate::linalg::{dist_sq, sqrt};
use crate::moreau::{stationarity, ProxConfig};
use crate::{Error, Result};

/// Largest free dimension `sum (|A_i| - 1)` the grid oracle accepts.
pub const GRID_MAX_FREE_DIM: usize = 3;
/// Largest dense tensor materialized for an induced single-adversary game.
pub const INDUCED_TENSOR_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoTeamGame {
    payoff: Payoff,
    n: usize,
    v_max: f64,
}

impl TwoTeamGame {
    /// The first `n` players of `payoff` minimize, the rest maximize.
    pub fn new(payoff: Payoff, n: usize) -> Result<Self> {
        let players = payoff.players();
        if n == 0 || n >= players {
            return Err(Error::InvalidGame(alloc::format!(
                "need at least one player per team, got {n} minimizers of {players} players"
            )));
        }
        let v_max = payoff.max_abs_bound();
        let game = TwoTeamGame { payoff, n, v_max };
        if !game.hypothesis_holds() {
            log::warn!(
                "n = {} minimizers and m = {} maximizers violate n > m - 1; the extension has no guarantee",
                game.n(),
                game.m()
            );
        }
        Ok(game)
    }

    pub fn from_team_game(game: &TeamGame) -> Self {
        TwoTeamGame {
            payoff: game.payoff().clone(),
            n: game.n(),
            v_max: game.v_max(),
        }
    }

    /// Same checks as [`TeamGame::with_v_max`].
    pub fn with_v_max(self, v_max: f64) -> Result<Self> {
        let checked = TeamGame::new(self.payoff)?.with_v_max(v_max)?;
        Ok(TwoTeamGame {
            payoff: checked.payoff().clone(),
            n: self.n,
            v_max,
        })
    }

    pub fn payoff(&self) -> &Payoff {
        &self.payoff
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.payoff.players() - self.n
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn minimizer_actions(&self) -> &[usize] {
        &self.payoff.dims()[..self.n]
    }

    pub fn maximizer_actions(&self) -> &[usize] {
        &self.payoff.dims()[self.n..]
    }

    /// The extendibility hypothesis `n > m - 1`.
    pub fn hypothesis_holds(&self) -> bool {
        self.n + 1 > self.m()
    }

    fn last(&self) -> usize {
        self.payoff.players() - 1
    }

    pub fn validate(&self, profile: &TwoTeamProfile) -> Result<()> {
        if profile.team.len() != self.n {
            return Err(Error::PlayerCount {
                expected: self.n,
                found: profile.team.len(),
            });
        }
        if profile.maximizers.len() != self.m() {
            return Err(Error::PlayerCount {
                expected: self.m(),
                found: profile.maximizers.len(),
            });
        }
        self.validate_partial(&profile.team, &profile.maximizers)
    }

    /// Validates team strategies and the leading maximizers' strategies.
    fn validate_partial(&self, team: &[Vec<f64>], maximizers: &[Vec<f64>]) -> Result<()> {
        if team.len() != self.n {
            return Err(Error::PlayerCount {
                expected: self.n,
                found: team.len(),
            });
        }
        for (p, (v, &k)) in team.iter().chain(maximizers).zip(self.payoff.dims()).enumerate() {
            check_distribution(p, v, k)?;
        }
        Ok(())
    }

    fn check_others(&self, y_minus_m: &[Vec<f64>]) -> Result<()> {
        if y_minus_m.len() + 1 != self.m() {
            return Err(Error::PlayerCount {
                expected: self.m() - 1,
                found: y_minus_m.len(),
            });
        }
        for (j, v) in y_minus_m.iter().enumerate() {
            check_distribution(self.n + j, v, self.payoff.dims()[self.n + j])?;
        }
        Ok(())
    }

    /// The single-adversary game `U'(x, b) = U(x, y_{-m}, b)`.
    pub fn induced_game(&self, y_minus_m: &[Vec<f64>]) -> Result<TeamGame> {
        self.check_others(y_minus_m)?;
        if self.m() == 1 {
            return TeamGame::new(self.payoff.clone())?.with_v_max(self.v_max);
        }
        let mut dims: Vec<usize> = self.minimizer_actions().to_vec();
        dims.push(self.payoff.dims()[self.last()]);
        let size = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
        if size > INDUCED_TENSOR_LIMIT {
            return Err(Error::Capacity {
                what: "induced game tensor",
                requested: size,
                limit: INDUCED_TENSOR_LIMIT,
            });
        }
        let dummy: Vec<Vec<f64>> = self.minimizer_actions().iter().map(|&k| vec![0.0; k]).collect();
        let last = vec![0.0; self.payoff.dims()[self.last()]];
        let mut dists: Vec<&[f64]> = dummy.iter().map(|v| v.as_slice()).collect();
        dists.extend(y_minus_m.iter().map(|v| v.as_slice()));
        dists.push(&last);
        let keep: Vec<usize> = (0..self.n).chain(core::iter::once(self.last())).collect();
        let values = self.payoff.contract_keep(&dists, &keep);
        TeamGame::new(Payoff::dense(dims, values)?)
    }
}

/// Mixed strategies of both teams.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTeamProfile {
    pub team: Vec<Vec<f64>>,
    pub maximizers: Vec<Vec<f64>>,
}

impl TwoTeamProfile {
    fn dists(&self) -> Vec<&[f64]> {
        self.team.iter().chain(&self.maximizers).map(|v| v.as_slice()).collect()
    }
}

/// Expected utility of a two-team profile.
pub fn expected_utility(game: &TwoTeamGame, profile: &TwoTeamProfile) -> Result<f64> {
    game.validate(profile)?;
    Ok(game.payoff.expectation(&profile.dists()))
}

/// NE gaps over both teams: `gap_team` over minimizers, `gap_adversary` over
/// all maximizers.
pub fn ne_gap(game: &TwoTeamGame, profile: &TwoTeamProfile) -> Result<NeCertificate> {
    game.validate(profile)?;
    let dists = profile.dists();
    let u = game.payoff.expectation(&dists);
    let mut gap_team = f64::NEG_INFINITY;
    let mut gap_adversary = f64::NEG_INFINITY;
    for p in 0..game.payoff.players() {
        let g = game.payoff.marginal(&dists, p);
        if p < game.n {
            gap_team = gap_team.max(u - g.iter().fold(f64::INFINITY, |a, &v| a.min(v)));
        } else {
            gap_adversary = gap_adversary.max(g.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v)) - u);
        }
    }
    Ok(NeCertificate {
        gap_team,
        gap_adversary,
        epsilon_claimed: None,
    })
}

/// Extension LPs for the last maximizer, with audit values. The deviation
/// program has weight `n - m + 1`.
pub fn extend_ne_multi_audited(
    game: &TwoTeamGame,
    x_star: &[Vec<f64>],
    y_minus_m: &[Vec<f64>],
) -> Result<ExtensionAudit> {
    game.check_others(y_minus_m)?;
    game.validate_partial(x_star, y_minus_m)?;
    let last = game.last();
    let nb = game.payoff.dims()[last];
    let dummy = vec![0.0; nb];
    let mut dists: Vec<&[f64]> = x_star.iter().chain(y_minus_m).map(|v| v.as_slice()).collect();
    dists.push(&dummy);
    let mut blocks = Vec::with_capacity(last);
    for p in 0..last {
        blocks.push(Block {
            table: game.payoff.pair_marginal(&dists, p, last),
            rows: game.payoff.dims()[p],
            sign: if p < game.n { 1.0 } else { -1.0 },
        });
    }
    let values = game.payoff.marginal(&dists, last);
    let weight = game.n as f64 - game.m() as f64 + 1.0;
    extend_blocks(&blocks, &values, weight)
}

/// Strategy of the last maximizer completing `(x_star, y_minus_m)`.
pub fn extend_ne_multi(game: &TwoTeamGame, x_star: &[Vec<f64>], y_minus_m: &[Vec<f64>]) -> Result<Vec<f64>> {
    Ok(extend_ne_multi_audited(game, x_star, y_minus_m)?.adversary)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleStrategy {
    /// Exhaustive search over a grid of the team polytope with this spacing.
    Grid { step: f64 },
    /// Gradient-descent-max on the induced single-adversary game; the first
    /// run uses `config` as given, each further restart a Dirichlet start
    /// with seed `config.seed + k`. The lowest `max_b` value wins.
    Nested { config: GdConfig, restarts: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinmaxResult {
    pub team: Vec<Vec<f64>>,
    /// Strategy of the last maximizer paired with `team`.
    pub adversary: Vec<f64>,
    /// `max_b U(team, y_{-m}, b)`.
    pub value: f64,
    /// Certified enclosure of `min_x max_b U(x, y_{-m}, b)` (grid strategy only).
    pub bracket: Option<(f64, f64)>,
}

/// Grid points of the simplex over `k` actions with spacing `1 / steps`.
fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut parts = vec![0usize; k];
    fn rec(i: usize, left: usize, parts: &mut Vec<usize>, steps: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == parts.len() {
            parts[i] = left;
            out.push(parts.iter().map(|&p| p as f64 / steps as f64).collect());
            return;
        }
        for take in (0..=left).rev() {
            parts[i] = take;
            rec(i + 1, left - take, parts, steps, out);
        }
    }
    rec(0, steps, &mut parts, steps, &mut out);
    out
}

fn grid_minmax(game: &TeamGame, step: f64) -> Result<MinmaxResult> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(alloc::format!("grid step must be in (0, 1], got {step}")));
    }
    let free: usize = game.action_sets().iter().map(|k| k - 1).sum();
    if free > GRID_MAX_FREE_DIM {
        return Err(Error::Capacity {
            what: "grid oracle free dimension (use the nested strategy)",
            requested: free,
            limit: GRID_MAX_FREE_DIM,
        });
    }
    let steps = libm::round(1.0 / step).max(1.0) as usize;
    let grids: Vec<Vec<Vec<f64>>> = game.action_sets().iter().map(|&k| simplex_grid(k, steps)).collect();
    let sizes: Vec<usize> = grids.iter().map(|g| g.len()).collect();
    let mut idx = vec![0usize; grids.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let team: Vec<Vec<f64>> = idx.iter().zip(&grids).map(|(&i, g)| g[i].clone()).collect();
        let v = game
            .adversary_values_unchecked(&team)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, idx.clone()));
        }
        if !increment(&mut idx, &sizes) {
            break;
        }
    }
    let (value, at) = best.expect("grid is nonempty");
    let team: Vec<Vec<f64>> = at.iter().zip(&grids).map(|(&i, g)| g[i].clone()).collect();
    // every point of a simplex is within sqrt(k)/steps of the grid (per
    // coordinate rounding error below 1/steps)
    let radius = sqrt(game.team_dim() as f64) / steps as f64;
    let lip = analytic_bounds(game).lipschitz;
    let adversary = extend_ne(game, &team)?;
    Ok(MinmaxResult {
        team,
        adversary,
        value,
        bracket: Some((value - lip * radius, value)),
    })
}

/// Approximate `argmin_x max_{y_m} U(x, y_{-m}, y_m)` with the paired
/// strategy of the last maximizer.
pub fn minmax_oracle(game: &TwoTeamGame, y_minus_m: &[Vec<f64>], strategy: &OracleStrategy) -> Result<MinmaxResult> {
    let induced = game.induced_game(y_minus_m)?;
    minmax_induced(&induced, strategy)
}

fn minmax_induced(induced: &TeamGame, strategy: &OracleStrategy) -> Result<MinmaxResult> {
    match strategy {
        OracleStrategy::Grid { step } => grid_minmax(induced, *step),
        OracleStrategy::Nested { config, restarts } => {
            let mut best: Option<MinmaxResult> = None;
            for k in 0..(*restarts).max(1) {
                let cfg = if k == 0 {
                    config.clone()
                } else {
                    GdConfig {
                        init: Init::Dirichlet,
                        seed: config.seed.wrapping_add(k as u64),
                        ..config.clone()
                    }
                };
                let out = gradient_descent_max(induced, &cfg)?;
                let value = induced
                    .adversary_values_unchecked(&out.profile.team)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                if best.as_ref().map_or(true, |b| value < b.value) {
                    best = Some(MinmaxResult {
                        team: out.profile.team,
                        adversary: out.profile.adversary,
                        value,
                        bracket: None,
                    });
                }
            }
            Ok(best.expect("at least one run"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdmmConfig {
    pub epsilon: f64,
    /// Ascent step of the maximizers other than the last; defaults to
    /// `ε² / (ℓ L² max(1, m - 1))` with the analytic bounds of the full game.
    pub eta: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Init,
    pub oracle: OracleStrategy,
    /// Compute [`TwoTeamStationarity`] for the final profile.
    pub diagnostics: bool,
}

/// Default GDmm iteration budget.
pub const GDMM_DEFAULT_ITERS: usize = 20_000;

impl GdmmConfig {
    /// Grid oracle (step 0.02) when the team is small enough and `m > 1`,
    /// nested gradient-descent-max otherwise. With `m = 1` the nested oracle
    /// makes `gd_mm` reproduce `gradient_descent_max`.
    pub fn new(game: &TwoTeamGame, epsilon: f64) -> Self {
        let free: usize = game.minimizer_actions().iter().map(|k| k - 1).sum();
        let oracle = if game.m() > 1 && free <= GRID_MAX_FREE_DIM {
            OracleStrategy::Grid { step: 0.02 }
        } else {
            OracleStrategy::Nested {
                config: GdConfig::new(epsilon),
                restarts: 1,
            }
        };
        GdmmConfig {
            epsilon,
            eta: None,
            max_iters: GDMM_DEFAULT_ITERS,
            seed: 0,
            init: Init::Uniform,
            oracle,
            diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdmmRecord {
    pub t: usize,
    pub ne_gap: f64,
    /// Gap of the window-averaged profile, on iterations where it was checked.
    pub average_gap: Option<f64>,
    pub oracle_value: f64,
    /// `‖y_{-m}^t - y_{-m}^{t-1}‖₂`.
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdmmTrace {
    pub records: Vec<GdmmRecord>,
    pub outcome: crate::dynamics::Outcome,
    pub iterations: usize,
    pub eta: f64,
    pub hypothesis_holds: bool,
    /// Which candidate the returned profile is.
    pub source: Candidate,
}

/// Candidates examined by the GDmm certificate check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// `(x^t, y_{-m}^t, y_m^t)` itself.
    Iterate,
    /// Per-player average of the last [`AVERAGE_WINDOW`] team and leading
    /// maximizer strategies, completed by a fresh extension LP.
    WindowAverage,
}

/// Length of the averaging window.
pub const AVERAGE_WINDOW: usize = 64;
/// The averaged candidate is checked every this many iterations.
pub const AVERAGE_EVERY: usize = 16;

// Near a kink of the minmax value the oracle alternates between team
// strategies and no single iterate is stationary in y_{-m}; the window
// average mixes them.
fn window_average(
    game: &TwoTeamGame,
    window: &VecDeque<(Vec<Vec<f64>>, Vec<Vec<f64>>)>,
) -> Result<TwoTeamProfile> {
    let k = window.len() as f64;
    let (first_team, first_others) = &window[0];
    let mut team: Vec<Vec<f64>> = first_team.iter().map(|v| vec![0.0; v.len()]).collect();
    let mut others: Vec<Vec<f64>> = first_others.iter().map(|v| vec![0.0; v.len()]).collect();
    for (x, y) in window {
        for (acc, v) in team.iter_mut().chain(others.iter_mut()).zip(x.iter().chain(y)) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b / k;
            }
        }
    }
    for v in team.iter_mut().chain(others.iter_mut()) {
        *v = project_simplex(v);
    }
    let y_m = extend_ne_multi(game, &team, &others)?;
    others.push(y_m);
    Ok(TwoTeamProfile {
        team,
        maximizers: others,
    })
}

/// Stationarity diagnostics of a two-team profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTeamStationarity {
    /// Stationarity measure of `x*` for `max_{y_m} U(x, y*_{-m}, y_m)`.
    pub x_measure: f64,
    pub x_slack: f64,
    /// `2ℓ ‖y*_{-m} - ŷ‖` where `ŷ` maximizes the grid surrogate of `ψ_ℓ`;
    /// `None` when the grids would be too large.
    pub y_measure: Option<f64>,
    /// Grid resolution term `2ℓ · radius` of the `y` surrogate.
    pub y_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdmmOutput {
    /// Final profile when converged, best-seen otherwise.
    pub profile: TwoTeamProfile,
    pub certificate: NeCertificate,
    pub trace: GdmmTrace,
    pub stationarity: Option<TwoTeamStationarity>,
}

/// GDmm: minmax oracle for the team, projected gradient ascent for the
/// maximizers other than the last, extension LP for the last maximizer.
pub fn gd_mm(game: &TwoTeamGame, config: &GdmmConfig) -> Result<GdmmOutput> {
    let eps = config.epsilon;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if config.max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
    }
    let d: usize = game.payoff.dims().iter().sum();
    let (lip, ell) = (game.v_max * sqrt(d as f64), game.v_max * d as f64);
    let eta = match config.eta {
        Some(e) => e,
        None if ell > 0.0 => eps * eps / (ell * lip * lip * (game.m() - 1).max(1) as f64),
        None => 1.0,
    };
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(alloc::format!("eta must be positive, got {eta}")));
    }

    let m = game.m();
    let last = game.last();
    let mut y_others: Vec<Vec<f64>> = match config.init {
        Init::Uniform => game.maximizer_actions()[..m - 1].iter().map(|&k| uniform(k)).collect(),
        Init::Dirichlet => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            game.maximizer_actions()[..m - 1].iter().map(|&k| dirichlet(&mut rng, k)).collect()
        }
    };
    let mut records = Vec::new();
    let mut best: Option<(NeCertificate, TwoTeamProfile, Candidate)> = None;
    let mut converged: Option<(NeCertificate, TwoTeamProfile, Candidate)> = None;
    let mut window: VecDeque<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = VecDeque::with_capacity(AVERAGE_WINDOW);
    let mut steps = 0;

    for t in 1..=config.max_iters {
        steps = t;
        let oracle = minmax_oracle(game, &y_others, &config.oracle)?;
        // ascent for maximizers j != m against (x^t, y_{-m}^{t-1}, y'_m)
        let mut next = Vec::with_capacity(m - 1);
        if m > 1 {
            let mut dists: Vec<&[f64]> = oracle.team.iter().chain(&y_others).map(|v| v.as_slice()).collect();
            dists.push(&oracle.adversary);
            for (j, y) in y_others.iter().enumerate() {
                let g = game.payoff.marginal(&dists, game.n + j);
                let moved: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a + eta * b).collect();
                next.push(project_simplex(&moved));
            }
        }
        let step: f64 = next.iter().zip(&y_others).map(|(a, b)| dist_sq(a, b)).sum();
        y_others = next;
        let y_m = extend_ne_multi(game, &oracle.team, &y_others)?;
        let mut maximizers = y_others.clone();
        maximizers.push(y_m);
        let profile = TwoTeamProfile {
            team: oracle.team,
            maximizers,
        };
        let cert = ne_gap(game, &profile)?;
        if window.len() == AVERAGE_WINDOW {
            window.pop_front();
        }
        window.push_back((profile.team.clone(), y_others.clone()));
        let mut candidates = vec![(cert, profile, Candidate::Iterate)];
        if t % AVERAGE_EVERY == 0 && window.len() == AVERAGE_WINDOW {
            let avg = window_average(game, &window)?;
            candidates.push((ne_gap(game, &avg)?, avg, Candidate::WindowAverage));
        }
        records.push(GdmmRecord {
            t,
            ne_gap: candidates[0].0.gap(),
            average_gap: candidates.get(1).map(|c| c.0.gap()),
            oracle_value: oracle.value,
            step_norm: sqrt(step),
        });
        for (cert, profile, source) in candidates {
            if cert.is_epsilon_ne(eps) {
                converged = Some((cert, profile, source));
                break;
            }
            if best.as_ref().map_or(true, |(c, _, _)| cert.gap() < c.gap()) {
                best = Some((cert, profile, source));
            }
        }
        // with m = 1 nothing moves between iterations
        if converged.is_some() || m == 1 {
            break;
        }
    }
    debug_assert_eq!(last, game.n + m - 1);

    let (outcome, (certificate, profile, source)) = match converged {
        Some(c) => (crate::dynamics::Outcome::Converged, c),
        None => (crate::dynamics::Outcome::BudgetExhausted, best.expect("one iteration ran")),
    };
    let stationarity = if config.diagnostics {
        Some(two_team_stationarity(game, &profile, ell.max(f64::MIN_POSITIVE), eps)?)
    } else {
        None
    };
    Ok(GdmmOutput {
        profile,
        certificate: certificate.with_claim(eps),
        trace: GdmmTrace {
            records,
            outcome,
            iterations: steps,
            eta,
            hypothesis_holds: game.hypothesis_holds(),
            source,
        },
        stationarity,
    })
}

/// Largest grid the `ψ` surrogate evaluates (team points times `Y_{-m}` points).
pub const PSI_GRID_LIMIT: usize = 2_000_000;

/// Stationarity diagnostics for both conditions of the two-team extension
/// theorem. The `x` side is the certified proximal measure on the induced
/// game; the `y` side maximizes a grid surrogate of `ψ_ℓ` (grid step 0.05 on
/// `Y_{-m}`, minmax values from the grid oracle) and is indicative only.
pub fn two_team_stationarity(
    game: &TwoTeamGame,
    profile: &TwoTeamProfile,
    ell: f64,
    epsilon: f64,
) -> Result<TwoTeamStationarity> {
    game.validate(profile)?;
    let m = game.m();
    let y_others = &profile.maximizers[..m - 1];
    let induced = game.induced_game(y_others)?;
    let ell_x = ell.max(crate::game::team_curvature_bound(&induced));
    let tol = (epsilon * epsilon * epsilon * epsilon / 64.0).max(1e-12);
    let x = stationarity(&induced, &profile.team, &ProxConfig::new(ell_x, tol))?;

    let y_steps = 20usize;
    let team_free: usize = game.minimizer_actions().iter().map(|k| k - 1).sum();
    let y_grids: Vec<Vec<Vec<f64>>> = game.maximizer_actions()[..m - 1]
        .iter()
        .map(|&k| simplex_grid(k, y_steps))
        .collect();
    let y_points: usize = y_grids.iter().map(|g| g.len()).product();
    let team_points: usize = game
        .minimizer_actions()
        .iter()
        .map(|&k| simplex_grid(k, 50).len())
        .product();
    let (y_measure, y_slack) = if m == 1 {
        (Some(0.0), Some(0.0))
    } else if team_free <= GRID_MAX_FREE_DIM && y_points.saturating_mul(team_points) <= PSI_GRID_LIMIT {
        let sizes: Vec<usize> = y_grids.iter().map(|g| g.len()).collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
        loop {
            let yp: Vec<Vec<f64>> = idx.iter().zip(&y_grids).map(|(&i, g)| g[i].clone()).collect();
            let value = grid_minmax(&game.induced_game(&yp)?, 0.02)?.value;
            let dist: f64 = yp.iter().zip(y_others).map(|(a, b)| dist_sq(a, b)).sum();
            let score = value - ell * dist;
            if best.as_ref().map_or(true, |(s, _)| score > *s) {
                best = Some((score, yp));
            }
            if !increment(&mut idx, &sizes) {
                break;
            }
        }
        let (_, yhat) = best.expect("grid is nonempty");
        let dist = sqrt(yhat.iter().zip(y_others).map(|(a, b)| dist_sq(a, b)).sum());
        let dim: usize = game.maximizer_actions()[..m - 1].iter().sum();
        let radius = sqrt(dim as f64) / y_steps as f64;
        (Some(2.0 * ell * dist), Some(2.0 * ell * radius))
    } else {
        (None, None)
    };
    Ok(TwoTeamStationarity {
        x_measure: x.measure,
        x_slack: x.slack,
        y_measure,
        y_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> TwoTeamGame {
        TwoTeamGame::new(Payoff::dense(vec![2, 2], vec![1.0, -1.0, -1.0, 1.0]).unwrap(), 1).unwrap()
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(2, 50).len(), 51);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        for p in simplex_grid(3, 7) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pennies_grid_oracle() {
        let r = minmax_oracle(&pennies(), &[], &OracleStrategy::Grid { step: 0.02 }).unwrap();
        assert_eq!(r.team, vec![vec![0.5, 0.5]]);
        assert_eq!(r.value, 0.0);
        let (lo, hi) = r.bracket.unwrap();
        assert!(lo <= 0.0 && hi >= 0.0);
    }

    #[test]
    fn constant_game_oracle_and_gdmm() {
        let g = TwoTeamGame::new(Payoff::dense(vec![2, 2, 2, 2], vec![0.4; 16]).unwrap(), 2).unwrap();
        let r = minmax_oracle(&g, &[vec![0.5, 0.5]], &OracleStrategy::Grid { step: 0.1 }).unwrap();
        assert!((r.value - 0.4).abs() < 1e-12);
        let out = gd_mm(&g, &GdmmConfig::new(&g, 0.1)).unwrap();
        assert_eq!(out.trace.iterations, 1);
        assert!(out.certificate.gap().abs() < 1e-12);
    }

    #[test]
    fn grid_refuses_large_teams() {
        let g = TwoTeamGame::new(Payoff::dense(vec![3, 3, 2], vec![0.0; 18]).unwrap(), 2).unwrap();
        assert!(matches!(
            minmax_oracle(&g, &[], &OracleStrategy::Grid { step: 0.1 }),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn single_maximizer_extension_matches() {
        let tg = TeamGame::dense(&[2, 3], 2, (0..12).map(|k| (k as f64 * 0.37).sin()).collect()).unwrap();
        let g = TwoTeamGame::from_team_game(&tg);
        let x = vec![vec![0.3, 0.7], vec![0.2, 0.5, 0.3]];
        let a = crate::extension::extend_ne_audited(&tg, &x).unwrap();
        let b = extend_ne_multi_audited(&g, &x, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_maximizer_gdmm_matches_gradient_descent_max() {
        let tg = TeamGame::dense(&[2, 2], 2, (0..8).map(|k| (k as f64 * 1.3).cos()).collect()).unwrap();
        let g = TwoTeamGame::from_team_game(&tg);
        let cfg = GdmmConfig::new(&g, 0.1);
        let OracleStrategy::Nested { config: inner, .. } = &cfg.oracle else {
            panic!("m = 1 defaults to the nested oracle");
        };
        let single = gradient_descent_max(&tg, inner).unwrap();
        let out = gd_mm(&g, &cfg).unwrap();
        assert_eq!(out.trace.iterations, 1);
        assert_eq!(out.profile.team, single.profile.team);
        assert_eq!(out.profile.maximizers, vec![single.profile.adversary]);
        assert_eq!(out.certificate.gap(), single.certificate.gap());
    }
}
