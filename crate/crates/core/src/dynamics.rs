//! Simplex projection and the gradient-descent-max loop.
//!
//! Each iteration checks whether the current profile is an ε-NE, lets the
//! adversary best-respond to the current team strategies, moves every team
//! player simultaneously by one projected gradient step against that pure best
//! response, and recomputes the adversary strategy with
//! [`extend_ne`](crate::extension::extend_ne). The check at iteration `t`
//! inspects the profile produced by iteration `t - 1`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extension::{extend_ne, ne_gap, NeCertificate};
use crate::game::{analytic_bounds, argmax_lowest, indicator, MixedProfile, SmoothnessBounds, TeamGame};
use crate::linalg::{dist_sq, sqrt};
use crate::moreau::{potential_g, ProxConfig};
use crate::{Error, Result};

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project onto an empty simplex");
    // points already in the simplex (to 1e-12) are returned unchanged
    if v.iter().all(|x| *x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= 1e-12 {
        return v.to_vec();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // absorb round-off so the sum is 1 to machine precision
    let s: f64 = out.iter().sum();
    if s > 0.0 && s != 1.0 {
        for x in &mut out {
            *x /= s;
        }
    }
    out
}

/// One simultaneous projected gradient step of every team player against the
/// adversary's pure best response. Returns the new strategies and that action.
pub(crate) fn gd_step_with_response(game: &TeamGame, team: &[Vec<f64>], eta: f64) -> (Vec<Vec<f64>>, usize) {
    let values = game.adversary_values_unchecked(team);
    let (b, _) = argmax_lowest(&values);
    let y = indicator(game.adversary_actions(), b);
    let mut dists: Vec<&[f64]> = team.iter().map(|v| v.as_slice()).collect();
    dists.push(&y);
    let next = (0..game.n())
        .map(|i| {
            // the projection ignores constant shifts, so the mean is removed first
            let g = game.payoff().marginal(&dists, i);
            if g.iter().all(|v| *v == g[0]) {
                return team[i].clone();
            }
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let moved: Vec<f64> = team[i].iter().zip(&g).map(|(x, gi)| x - eta * (gi - mean)).collect();
            project_simplex(&moved)
        })
        .collect();
    (next, b)
}

/// Team strategies after one step of size `eta`; see [`gd_step_with_response`].
pub fn gd_step(game: &TeamGame, team: &[Vec<f64>], eta: f64) -> Result<Vec<Vec<f64>>> {
    game.validate_team(team)?;
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(alloc::format!("step size must be finite and >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Ok(team.to_vec());
    }
    Ok(gd_step_with_response(game, team, eta).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Uniform,
    /// Independent Dirichlet(1, ..., 1) draws seeded from the config.
    Dirichlet,
}

/// Multiplier `K` of the default budget `ceil(K · n (sum |A_i| + |B|) / ε⁴)`.
pub const BUDGET_FACTOR: f64 = 1.0;
/// Default spacing of potential recordings.
pub const DEFAULT_POTENTIAL_EVERY: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct GdConfig {
    pub epsilon: f64,
    /// Defaults to `ε² / (ℓ L² n)`.
    pub eta: Option<f64>,
    /// Defaults to `ceil(K · n (sum |A_i| + |B|) / ε⁴)` with `K = BUDGET_FACTOR`.
    pub max_iters: Option<usize>,
    pub seed: u64,
    pub init: Init,
    /// NE certificate every this many iterations.
    pub check_every: usize,
    /// Potential recorded every this many iterations, plus at the first and
    /// last profile. `0` disables intermediate recordings.
    pub potential_every: usize,
    /// Defaults to [`analytic_bounds`].
    pub bounds: Option<SmoothnessBounds>,
    /// Proximal tolerance for potential evaluations; defaults to `ε⁴ / 64`.
    pub prox_tol: Option<f64>,
}

impl GdConfig {
    pub fn new(epsilon: f64) -> Self {
        GdConfig {
            epsilon,
            eta: None,
            max_iters: None,
            seed: 0,
            init: Init::Uniform,
            check_every: 1,
            potential_every: DEFAULT_POTENTIAL_EVERY,
            bounds: None,
            prox_tol: None,
        }
    }

    /// Fills every default for `game` and validates the result.
    pub fn resolve(&self, game: &TeamGame) -> Result<ResolvedConfig> {
        let eps = self.epsilon;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        if self.check_every == 0 {
            return Err(Error::InvalidConfig("check_every must be at least 1".into()));
        }
        let bounds = self.bounds.unwrap_or_else(|| analytic_bounds(game));
        let n = game.n() as f64;
        let eta = match self.eta {
            Some(e) => e,
            None => {
                let denom = bounds.smoothness * bounds.lipschitz * bounds.lipschitz * n;
                if denom > 0.0 {
                    eps * eps / denom
                } else {
                    // constant game: any step is a fixed point
                    1.0
                }
            }
        };
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("eta must be positive, got {eta}")));
        }
        let max_iters = match self.max_iters {
            Some(t) => t,
            None => {
                let poly = n * (game.team_dim() + game.adversary_actions()) as f64;
                let t = libm::ceil(BUDGET_FACTOR * poly / (eps * eps * eps * eps));
                if t >= usize::MAX as f64 {
                    usize::MAX
                } else {
                    t as usize
                }
            }
        };
        if max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        let prox_tol = self.prox_tol.unwrap_or(eps * eps * eps * eps / 64.0);
        if !(prox_tol > 0.0) {
            return Err(Error::InvalidConfig("prox_tol must be positive".into()));
        }
        // the potential needs a positive smoothness constant
        let ell = if bounds.smoothness > 0.0 { bounds.smoothness } else { 1.0 };
        Ok(ResolvedConfig {
            epsilon: eps,
            eta,
            max_iters,
            seed: self.seed,
            init: self.init,
            check_every: self.check_every,
            potential_every: self.potential_every,
            bounds,
            ell,
            prox_tol,
        })
    }
}

/// [`GdConfig`] with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub epsilon: f64,
    pub eta: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Init,
    pub check_every: usize,
    pub potential_every: usize,
    pub bounds: SmoothnessBounds,
    /// Smoothness used for the potential; equals `bounds.smoothness` unless
    /// that is zero, in which case it is 1.
    pub ell: f64,
    pub prox_tol: f64,
}

impl ResolvedConfig {
    pub(crate) fn initial_team(&self, game: &TeamGame) -> Vec<Vec<f64>> {
        match self.init {
            Init::Uniform => MixedProfile::uniform(game).team,
            Init::Dirichlet => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                game.action_sets().iter().map(|&k| dirichlet(&mut rng, k)).collect()
            }
        }
    }
}

pub(crate) fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| -libm::log(1.0 - rng.gen::<f64>())).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// State of one profile `(x^t, y^t)` of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub potential_g: Option<f64>,
    /// Certified gap of `(x^t, y^t)` when it was checked.
    pub ne_gap: Option<f64>,
    /// `‖x^t - x^{t-1}‖₂`; zero for the initial profile.
    pub step_norm: f64,
    /// Adversary best response that produced `x^t`; `None` at `t = 0`.
    pub br_action: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub outcome: Outcome,
    pub final_profile: MixedProfile,
    /// Gradient steps taken.
    pub iterations: usize,
    pub config: ResolvedConfig,
}

/// A pair of consecutive potential recordings where the potential rose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialIncrease {
    pub from_t: usize,
    pub to_t: usize,
    pub increase: f64,
}

impl RunTrace {
    /// `(t, g)` for every record with a potential value.
    pub fn potentials(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.potential_g.map(|g| (r.t, g)))
            .collect()
    }

    /// Consecutive recordings where `g` grew by more than `allowance`.
    pub fn potential_violations(&self, allowance: f64) -> Vec<PotentialIncrease> {
        self.potentials()
            .windows(2)
            .filter(|w| w[1].1 - w[0].1 > allowance)
            .map(|w| PotentialIncrease {
                from_t: w[0].0,
                to_t: w[1].0,
                increase: w[1].1 - w[0].1,
            })
            .collect()
    }

    /// Per-iteration decrease `(g_prev - g_next) / (t_next - t_prev)` for each
    /// consecutive pair of recordings.
    pub fn per_iteration_decreases(&self) -> Vec<f64> {
        self.potentials()
            .windows(2)
            .map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0) as f64)
            .collect()
    }
}

/// Result of [`gradient_descent_max`].
#[derive(Debug, Clone, PartialEq)]
pub struct GdOutput {
    /// Final profile when converged, best-seen profile otherwise.
    pub profile: MixedProfile,
    pub certificate: NeCertificate,
    pub trace: RunTrace,
}

/// Runs gradient-descent-max until the current profile is a certified ε-NE or
/// the iteration budget is spent.
pub fn gradient_descent_max(game: &TeamGame, config: &GdConfig) -> Result<GdOutput> {
    let cfg = config.resolve(game)?;
    let prox = ProxConfig::new(cfg.ell, cfg.prox_tol);
    let potential = |team: &[Vec<f64>]| potential_g(game, team, &prox);

    let mut x = cfg.initial_team(game);
    let mut y = crate::game::uniform(game.adversary_actions());
    let mut records = vec![TraceRecord {
        t: 0,
        potential_g: Some(potential(&x)?),
        ne_gap: None,
        step_norm: 0.0,
        br_action: None,
    }];
    let mut best: Option<(NeCertificate, MixedProfile)> = None;
    let mut converged: Option<(NeCertificate, MixedProfile)> = None;
    let mut steps = 0;

    for t in 1..=cfg.max_iters + 1 {
        let prev = t - 1;
        if prev % cfg.check_every == 0 || t == cfg.max_iters + 1 {
            let profile = MixedProfile::new(x.clone(), y.clone());
            let cert = ne_gap(game, &profile)?;
            records[prev].ne_gap = Some(cert.gap());
            if cert.is_epsilon_ne(cfg.epsilon) {
                converged = Some((cert, profile));
                break;
            }
            if best.as_ref().map_or(true, |(c, _)| cert.gap() < c.gap()) {
                best = Some((cert, profile));
            }
        }
        if t == cfg.max_iters + 1 {
            break;
        }
        let (next, b) = gd_step_with_response(game, &x, cfg.eta);
        let step: f64 = next.iter().zip(&x).map(|(a, c)| dist_sq(a, c)).sum();
        x = next;
        y = extend_ne(game, &x)?;
        steps = t;
        let record_potential = cfg.potential_every > 0 && t % cfg.potential_every == 0;
        records.push(TraceRecord {
            t,
            potential_g: if record_potential { Some(potential(&x)?) } else { None },
            ne_gap: None,
            step_norm: sqrt(step),
            br_action: Some(b),
        });
    }

    let last = records.len() - 1;
    if records[last].potential_g.is_none() {
        records[last].potential_g = Some(potential(&x)?);
    }
    let (outcome, (certificate, profile)) = match converged {
        Some(c) => (Outcome::Converged, c),
        None => (Outcome::BudgetExhausted, best.expect("at least one check ran")),
    };
    log::info!(
        "gradient-descent-max: {:?} after {steps} steps, gap {:.3e}",
        outcome,
        certificate.gap()
    );
    let final_profile = MixedProfile::new(x, y);
    Ok(GdOutput {
        profile,
        certificate: certificate.with_claim(cfg.epsilon),
        trace: RunTrace {
            records,
            outcome,
            final_profile,
            iterations: steps,
            config: cfg,
        },
    })
}
