//! Extending a team strategy to a full profile through LP duality, and
//! certifying how close a profile is to a Nash equilibrium.
//!
//! Given team strategies `x*`, [`extend_ne`] solves three programs:
//!
//! * the *value program* `u* = min u` s.t. `u >= U_b(x*)` for every `b`;
//! * the *deviation program* `min n·u` s.t. `n·u >= sum_i U_b(x_i, x*_{-i})`
//!   for every `b`, over `x` in the product of simplices, with optimum
//!   `n·u_opt`;
//! * its dual, `max sum_i z_i` s.t. `z_i <= sum_b y(b) U_b(a, x*_{-i})` for
//!   every player `i` and action `a`, `y` a distribution.
//!
//! The `y` part of the dual optimum is the adversary strategy. Every call
//! checks `u* >= u_opt` and `sum_i z_i = n·u_opt` within [`AUDIT_TOL`] and
//! fails with [`Error::DualityViolation`] otherwise. The returned profile is
//! never trusted on its own: callers certify it with [`ne_gap`].

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::game::{argmax_lowest, MixedProfile, TeamGame};
use crate::lp::{clean_distribution, expect_optimal, solve_lp, LinearProgram};
use crate::{Error, Result};

/// Tolerance of both duality assertions.
pub const AUDIT_TOL: f64 = 1e-7;

static AUDITED_CALLS: AtomicUsize = AtomicUsize::new(0);
static AUDIT_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Process-wide `(audited extension calls, failed audits)`.
pub fn audit_counts() -> (usize, usize) {
    (
        AUDITED_CALLS.load(Ordering::Relaxed),
        AUDIT_FAILURES.load(Ordering::Relaxed),
    )
}

/// Everything the extension LPs produced, for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionAudit {
    /// Optimal strategy of the extended player.
    pub adversary: Vec<f64>,
    /// Value of the value program: the best-response value against `x*`.
    pub u_star: f64,
    /// `u_opt`; `None` when the deviation program's weight `n - m + 1` is zero
    /// or negative.
    pub u_opt: Option<f64>,
    /// Weight `n - m + 1` of `u` in the deviation program (`n` with one adversary).
    pub weight: f64,
    /// Optimum of the deviation program, `weight · u_opt`.
    pub primal_value: f64,
    /// Optimum of the dual, `sum z_i (+ sum w_j)`.
    pub dual_value: f64,
    /// Optimal `z_i` per team player, then `w_j` per other maximizer.
    pub block_values: Vec<f64>,
    /// Whether `u* >= u_opt` applies; false when the weight is negative.
    pub chain_checked: bool,
}

/// One group of dual rows: `z <= sign · sum_b y(b) table[r][b]` for every row `r`.
#[derive(Debug)]
pub(crate) struct Block {
    /// Row-major `rows x |B|`.
    pub table: Vec<f64>,
    pub rows: usize,
    pub sign: f64,
}

/// Shared builder for the single- and multi-adversary extensions.
/// `values[b]` is the utility at the current profile when the extended player
/// plays `b`.
pub(crate) fn extend_blocks(blocks: &[Block], values: &[f64], weight: f64) -> Result<ExtensionAudit> {
    let nb = values.len();

    // value program
    let mut lp = LinearProgram::new(vec![1.0]);
    lp.free(0);
    for &v in values {
        lp.add_ge(vec![1.0], v);
    }
    let u_star = expect_optimal(solve_lp(&lp)?)?.value;

    // deviation program: block distributions, then w = weight·u
    let nvars: usize = blocks.iter().map(|b| b.rows).sum::<usize>() + 1;
    let mut obj = vec![0.0; nvars];
    obj[nvars - 1] = 1.0;
    let mut lp = LinearProgram::new(obj);
    lp.free(nvars - 1);
    for b in 0..nb {
        let mut row = vec![0.0; nvars];
        let mut off = 0;
        for blk in blocks {
            for r in 0..blk.rows {
                row[off + r] = -blk.sign * blk.table[r * nb + b];
            }
            off += blk.rows;
        }
        row[nvars - 1] = 1.0;
        lp.add_ge(row, 0.0);
    }
    let mut off = 0;
    for blk in blocks {
        let mut row = vec![0.0; nvars];
        for r in 0..blk.rows {
            row[off + r] = 1.0;
        }
        lp.add_eq(row, 1.0);
        off += blk.rows;
    }
    let primal_value = expect_optimal(solve_lp(&lp)?)?.value;

    // dual: y, then one free z per block; minimize -sum z
    let nz = blocks.len();
    let mut obj = vec![0.0; nb + nz];
    for c in obj.iter_mut().skip(nb) {
        *c = -1.0;
    }
    let mut lp = LinearProgram::new(obj);
    for k in 0..nz {
        lp.free(nb + k);
    }
    for (k, blk) in blocks.iter().enumerate() {
        for r in 0..blk.rows {
            let mut row = vec![0.0; nb + nz];
            for b in 0..nb {
                row[b] = blk.sign * blk.table[r * nb + b];
            }
            row[nb + k] = -1.0;
            lp.add_ge(row, 0.0);
        }
    }
    let mut simplex = vec![1.0; nb];
    simplex.extend(core::iter::repeat(0.0).take(nz));
    lp.add_eq(simplex, 1.0);
    let dual = expect_optimal(solve_lp(&lp)?)?;
    let dual_value = -dual.value;

    let u_opt = (weight > 0.0).then(|| primal_value / weight);
    let chain_checked = weight >= 0.0;
    AUDITED_CALLS.fetch_add(1, Ordering::Relaxed);
    let chain_ok = match u_opt {
        Some(u) => u_star >= u - AUDIT_TOL,
        None if chain_checked => primal_value <= AUDIT_TOL,
        None => {
            log::warn!("extension weight {weight} < 0: u* >= u_opt does not apply");
            true
        }
    };
    if !chain_ok {
        AUDIT_FAILURES.fetch_add(1, Ordering::Relaxed);
        return Err(Error::DualityViolation(alloc::format!(
            "u* = {u_star} < u_opt = {:?}",
            u_opt
        )));
    }
    if !((dual_value - primal_value).abs() <= AUDIT_TOL) {
        AUDIT_FAILURES.fetch_add(1, Ordering::Relaxed);
        return Err(Error::DualityViolation(alloc::format!(
            "dual optimum {dual_value} differs from primal optimum {primal_value}"
        )));
    }
    Ok(ExtensionAudit {
        adversary: clean_distribution(&dual.primal[..nb]),
        u_star,
        u_opt,
        weight,
        primal_value,
        dual_value,
        block_values: dual.primal[nb..].to_vec(),
        chain_checked,
    })
}

/// Extension LPs for a single adversary, with all audit values.
pub fn extend_ne_audited(game: &TeamGame, team: &[Vec<f64>]) -> Result<ExtensionAudit> {
    game.validate_team(team)?;
    let nb = game.adversary_actions();
    let blocks: Vec<Block> = (0..game.n())
        .map(|i| Block {
            table: game.deviation_table(team, i),
            rows: game.action_sets()[i],
            sign: 1.0,
        })
        .collect();
    let values = game.adversary_values_unchecked(team);
    debug_assert_eq!(values.len(), nb);
    extend_blocks(&blocks, &values, game.n() as f64)
}

/// Adversary strategy completing `team`; see the module documentation.
pub fn extend_ne(game: &TeamGame, team: &[Vec<f64>]) -> Result<Vec<f64>> {
    Ok(extend_ne_audited(game, team)?.adversary)
}

/// Largest gains from unilateral pure deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeCertificate {
    /// Largest decrease of `U` any single team player can achieve.
    pub gap_team: f64,
    /// Largest increase of `U` the adversary side can achieve.
    pub gap_adversary: f64,
    pub epsilon_claimed: Option<f64>,
}

impl NeCertificate {
    pub fn gap(&self) -> f64 {
        self.gap_team.max(self.gap_adversary)
    }

    pub fn is_epsilon_ne(&self, epsilon: f64) -> bool {
        self.gap() <= epsilon
    }

    pub fn with_claim(mut self, epsilon: f64) -> Self {
        self.epsilon_claimed = Some(epsilon);
        self
    }
}

/// Per-player deviation gains: `U - min_a U(a, x_{-i}, y)` for each team
/// player, and `max_b U(x, b) - U` for the adversary, with `U` itself.
fn deviation_gains(game: &TeamGame, profile: &MixedProfile) -> (Vec<f64>, f64, f64) {
    let dists = profile.dists();
    let payoff = game.payoff();
    let u = payoff.expectation(&dists);
    let team: Vec<f64> = (0..game.n())
        .map(|i| {
            let g = payoff.marginal(&dists, i);
            u - g.iter().fold(f64::INFINITY, |a, &v| a.min(v))
        })
        .collect();
    let (_, best) = argmax_lowest(&payoff.marginal(&dists, game.n()));
    (team, best - u, u)
}

/// Exact NE gaps by enumerating pure deviations (pure deviations suffice by
/// multilinearity).
pub fn ne_gap(game: &TeamGame, profile: &MixedProfile) -> Result<NeCertificate> {
    game.validate(profile)?;
    let (team, adv, _) = deviation_gains(game, profile);
    Ok(NeCertificate {
        gap_team: team.iter().fold(f64::NEG_INFINITY, |a, &g| a.max(g)),
        gap_adversary: adv,
        epsilon_claimed: None,
    })
}

/// Largest violation of the variational inequality: the team condition
/// `max_{x'} <grad_x U, x - x'>` (summed over team players) and the adversary
/// condition `max_{y'} <grad_y U, y' - y>`. Always at least the NE gap.
pub fn vi_residual(game: &TeamGame, profile: &MixedProfile) -> Result<f64> {
    game.validate(profile)?;
    let (team, adv, _) = deviation_gains(game, profile);
    Ok(team.iter().sum::<f64>().max(adv))
}
