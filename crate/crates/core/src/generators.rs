//! Game families: seeded random games, congestion games with an adversary
//! choosing edge cost functions, and embeddings of adversarial potential
//! games.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{flat_index, increment, Payoff, TeamGame};
use crate::two_team::TwoTeamGame;
use crate::{Error, Result};

/// Resolution of random entries: values are `lo + (hi - lo) * k / RANDOM_GRID`.
pub const RANDOM_GRID: u32 = 1000;
/// Default cap on the adversary's product action space in congestion games.
pub const DEFAULT_ADVERSARY_CAP: usize = 64;
/// Tolerance of the potential difference identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Largest pure-profile count a dense generator will materialize.
pub const DENSE_PROFILE_LIMIT: usize = 1 << 22;

fn profile_count(dims: &[usize]) -> Result<usize> {
    let count = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
    if count > DENSE_PROFILE_LIMIT {
        return Err(Error::Capacity {
            what: "dense payoff tensor",
            requested: count,
            limit: DENSE_PROFILE_LIMIT,
        });
    }
    Ok(count)
}

fn random_values(count: usize, seed: u64, range: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidConfig(format!("value range [{lo}, {hi}] is not a finite interval")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| lo + (hi - lo) * f64::from(rng.gen_range(0..=RANDOM_GRID)) / f64::from(RANDOM_GRID))
        .collect())
}

/// Dense team game with i.i.d. entries uniform on the grid
/// `lo + (hi - lo) * k / 1000`, `k = 0..=1000`. `sizes` holds the `n` team
/// action counts.
pub fn random_game(
    n: usize,
    sizes: &[usize],
    adversary_size: usize,
    seed: u64,
    value_range: (f64, f64),
) -> Result<TeamGame> {
    if n == 0 || sizes.len() != n {
        return Err(Error::InvalidConfig(format!(
            "expected {n} team action counts (n >= 1), got {}",
            sizes.len()
        )));
    }
    let mut dims = sizes.to_vec();
    dims.push(adversary_size);
    if dims.contains(&0) {
        return Err(Error::InvalidConfig("action counts must be positive".into()));
    }
    let values = random_values(profile_count(&dims)?, seed, value_range)?;
    TeamGame::new(Payoff::dense(dims, values)?)
}

/// Dense two-team game; minimizers first.
pub fn random_two_team_game(
    minimizer_sizes: &[usize],
    maximizer_sizes: &[usize],
    seed: u64,
    value_range: (f64, f64),
) -> Result<TwoTeamGame> {
    if minimizer_sizes.is_empty() || maximizer_sizes.is_empty() {
        return Err(Error::InvalidConfig("both teams need at least one player".into()));
    }
    let dims: Vec<usize> = minimizer_sizes.iter().chain(maximizer_sizes).copied().collect();
    if dims.contains(&0) {
        return Err(Error::InvalidConfig("action counts must be positive".into()));
    }
    let values = random_values(profile_count(&dims)?, seed, value_range)?;
    TwoTeamGame::new(Payoff::dense(dims, values)?, minimizer_sizes.len())
}

/// Congestion game whose edge cost functions are picked by an adversary.
///
/// `menus[e][k][j]` is the cost of edge `e` under menu entry `k` at load `j`,
/// for `j = 0..=n_players`. `strategies[i]` lists the edge subsets player `i`
/// may use.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionSpec {
    pub n_players: usize,
    pub menus: Vec<Vec<Vec<f64>>>,
    pub strategies: Vec<Vec<Vec<usize>>>,
}

impl CongestionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidGame(msg));
        if self.n_players == 0 {
            return bad("a congestion game needs at least one player".into());
        }
        if self.strategies.len() != self.n_players {
            return bad(format!(
                "{} strategy sets for {} players",
                self.strategies.len(),
                self.n_players
            ));
        }
        for (e, menu) in self.menus.iter().enumerate() {
            if menu.is_empty() {
                return bad(format!("edge {e} has an empty cost menu"));
            }
            for (k, table) in menu.iter().enumerate() {
                if table.len() != self.n_players + 1 {
                    return bad(format!(
                        "edge {e} menu entry {k} has {} loads, expected {}",
                        table.len(),
                        self.n_players + 1
                    ));
                }
                if table.iter().any(|c| !c.is_finite()) {
                    return bad(format!("edge {e} menu entry {k} has a non-finite cost"));
                }
            }
        }
        for (i, set) in self.strategies.iter().enumerate() {
            if set.is_empty() {
                return bad(format!("player {i} has no strategies"));
            }
            for (s, edges) in set.iter().enumerate() {
                if edges.is_empty() {
                    return bad(format!("player {i} strategy {s} uses no edge"));
                }
                for (k, &e) in edges.iter().enumerate() {
                    if e >= self.menus.len() {
                        return bad(format!("player {i} strategy {s} names edge {e}, only {} exist", self.menus.len()));
                    }
                    if edges[..k].contains(&e) {
                        return bad(format!("player {i} strategy {s} repeats edge {e}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn menu_sizes(&self) -> Vec<usize> {
        self.menus.iter().map(|m| m.len()).collect()
    }

    /// Per-edge menu choices of adversary action `b`; the last edge varies fastest.
    pub fn menu_choice(&self, b: usize) -> Vec<usize> {
        let sizes = self.menu_sizes();
        let mut out = vec![0; sizes.len()];
        let mut rest = b;
        for (slot, &s) in out.iter_mut().zip(&sizes).rev() {
            *slot = rest % s;
            rest /= s;
        }
        out
    }

    /// Number of players using each edge.
    pub fn loads(&self, actions: &[usize]) -> Vec<usize> {
        let mut loads = vec![0; self.menus.len()];
        for (i, &a) in actions.iter().enumerate() {
            for &e in &self.strategies[i][a] {
                loads[e] += 1;
            }
        }
        loads
    }

    /// `Φ(a, b) = Σ_e Σ_{j=0}^{load_e(a)} c_{e, b_e}(j)`; the `j = 0` term is included.
    pub fn potential(&self, actions: &[usize], b: usize) -> f64 {
        let choice = self.menu_choice(b);
        self.loads(actions)
            .iter()
            .enumerate()
            .map(|(e, &l)| self.menus[e][choice[e]][..=l].iter().sum::<f64>())
            .sum()
    }

    /// Cost of player `i`: `Σ_{e ∈ a_i} c_{e, b_e}(load_e(a))`.
    pub fn player_cost(&self, i: usize, actions: &[usize], b: usize) -> f64 {
        let choice = self.menu_choice(b);
        let loads = self.loads(actions);
        self.strategies[i][actions[i]]
            .iter()
            .map(|&e| self.menus[e][choice[e]][loads[e]])
            .sum()
    }
}

/// A congestion game as a team game over `Φ`, with the original player costs
/// kept for certification.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionGame {
    pub spec: CongestionSpec,
    pub game: TeamGame,
}

impl CongestionGame {
    /// Dense tensor of player `i`'s original cost over `(a, b)`.
    pub fn cost_payoff(&self, i: usize) -> Result<Payoff> {
        let dims = self.game.payoff().dims().to_vec();
        let mut values = Vec::with_capacity(self.game.payoff().num_profiles());
        let mut idx = vec![0usize; dims.len()];
        loop {
            let (b, actions) = idx.split_last().expect("at least two players");
            values.push(self.spec.player_cost(i, actions, *b));
            if !increment(&mut idx, &dims) {
                break;
            }
        }
        Payoff::dense(dims, values)
    }

    /// For each player, expected original cost minus the best pure deviation's
    /// expected cost.
    pub fn player_cost_gains(&self, profile: &crate::MixedProfile) -> Result<Vec<f64>> {
        self.game.validate(profile)?;
        let dists = profile.dists();
        (0..self.game.n())
            .map(|i| {
                let cost = self.cost_payoff(i)?;
                let now = cost.expectation(&dists);
                let best = cost.marginal(&dists, i).into_iter().fold(f64::INFINITY, f64::min);
                Ok(now - best)
            })
            .collect()
    }
}

/// Builds the team game with utility `Φ`; the adversary's actions are the
/// product of the edge menus, refused beyond `adversary_cap`.
pub fn congestion_to_team_game(spec: &CongestionSpec) -> Result<CongestionGame> {
    congestion_to_team_game_with_cap(spec, DEFAULT_ADVERSARY_CAP)
}

pub fn congestion_to_team_game_with_cap(spec: &CongestionSpec, adversary_cap: usize) -> Result<CongestionGame> {
    spec.validate()?;
    let nb = spec
        .menu_sizes()
        .iter()
        .try_fold(1usize, |a, &s| a.checked_mul(s))
        .unwrap_or(usize::MAX);
    if nb > adversary_cap {
        return Err(Error::Capacity {
            what: "adversary menu product",
            requested: nb,
            limit: adversary_cap,
        });
    }
    let mut dims: Vec<usize> = spec.strategies.iter().map(|s| s.len()).collect();
    dims.push(nb);
    let mut values = Vec::with_capacity(profile_count(&dims)?);
    let mut idx = vec![0usize; dims.len()];
    loop {
        let (b, actions) = idx.split_last().expect("at least two players");
        values.push(spec.potential(actions, *b));
        if !increment(&mut idx, &dims) {
            break;
        }
    }
    Ok(CongestionGame {
        spec: spec.clone(),
        game: TeamGame::new(Payoff::dense(dims, values)?)?,
    })
}

/// Dense tables of an adversarial potential game: `n` cost-minimizing players
/// followed by `m` utility-maximizing players.
///
/// Costs move with `Φ` under a minimizer's unilateral deviation, utilities
/// move with `Φ` under a maximizer's. VI points of the embedded game
/// `Γ(n, m, Φ)` are then approximate equilibria of the original game; this
/// is checked by enumeration in the test suite rather than assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTables {
    pub dims: Vec<usize>,
    pub n: usize,
    pub costs: Vec<Vec<f64>>,
    pub utils: Vec<Vec<f64>>,
    pub potential: Vec<f64>,
}

impl PotentialTables {
    pub fn m(&self) -> usize {
        self.dims.len() - self.n
    }

    /// Exhaustive check of both difference identities.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidGame(msg));
        if self.n == 0 || self.n > self.dims.len() || self.dims.contains(&0) {
            return bad(format!("need n >= 1 minimizers among {} players with positive action counts", self.dims.len()));
        }
        let count = profile_count(&self.dims)?;
        if self.costs.len() != self.n || self.utils.len() != self.m() {
            return bad(format!(
                "{} cost and {} utility tables for {} minimizers and {} maximizers",
                self.costs.len(),
                self.utils.len(),
                self.n,
                self.m()
            ));
        }
        for t in self.costs.iter().chain(&self.utils).chain(core::iter::once(&self.potential)) {
            if t.len() != count {
                return bad(format!("table has {} entries, expected {count}", t.len()));
            }
        }
        let mut idx = vec![0usize; self.dims.len()];
        loop {
            let here = flat_index(&self.dims, &idx);
            for p in 0..self.dims.len() {
                let table = if p < self.n { &self.costs[p] } else { &self.utils[p - self.n] };
                // each unordered pair of actions is visited once
                for alt in idx[p] + 1..self.dims[p] {
                    let mut to = idx.clone();
                    to[p] = alt;
                    let there = flat_index(&self.dims, &to);
                    let lhs = table[there] - table[here];
                    let rhs = self.potential[there] - self.potential[here];
                    if (lhs - rhs).abs() > IDENTITY_TOL {
                        return Err(Error::PotentialIdentity {
                            player: p,
                            from: idx.clone(),
                            to,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
            if !increment(&mut idx, &self.dims) {
                break;
            }
        }
        Ok(())
    }

    /// Largest gain any player gets from a pure deviation in its original
    /// table, at a profile of the embedded game. A dummy adversary added for
    /// `m = 0` is ignored.
    pub fn max_deviation_gain(&self, team: &[Vec<f64>], maximizers: &[Vec<f64>]) -> Result<f64> {
        let mut dists: Vec<&[f64]> = team.iter().map(|v| v.as_slice()).collect();
        dists.extend(maximizers.iter().take(self.m()).map(|v| v.as_slice()));
        if dists.len() != self.dims.len() {
            return Err(Error::PlayerCount {
                expected: self.dims.len(),
                found: dists.len(),
            });
        }
        for (p, (v, &k)) in dists.iter().zip(&self.dims).enumerate() {
            crate::game::check_distribution(p, v, k)?;
        }
        let mut worst = 0.0f64;
        for p in 0..self.dims.len() {
            let (table, sign) = if p < self.n {
                (&self.costs[p], 1.0)
            } else {
                (&self.utils[p - self.n], -1.0)
            };
            let payoff = Payoff::dense(self.dims.clone(), table.iter().map(|v| sign * v).collect())?;
            let now = payoff.expectation(&dists);
            let best = payoff.marginal(&dists, p).into_iter().fold(f64::INFINITY, f64::min);
            worst = worst.max(now - best);
        }
        Ok(worst)
    }
}

/// Validates the tables and returns `Γ(n, m, Φ)`; with `m = 0` a one-action
/// adversary is appended.
pub fn potential_game_embed(tables: &PotentialTables) -> Result<TwoTeamGame> {
    tables.validate()?;
    if tables.m() == 0 {
        let mut dims = tables.dims.clone();
        dims.push(1);
        return TwoTeamGame::new(Payoff::dense(dims, tables.potential.clone())?, tables.n);
    }
    TwoTeamGame::new(Payoff::dense(tables.dims.clone(), tables.potential.clone())?, tables.n)
}

/// Valid tables by construction: `Φ` random, each player's table is `Φ`
/// plus a random term that does not depend on the player's own action.
pub fn random_potential_tables(dims: &[usize], n: usize, seed: u64, value_range: (f64, f64)) -> Result<PotentialTables> {
    if n == 0 || n > dims.len() || dims.contains(&0) {
        return Err(Error::InvalidConfig("need n >= 1 minimizers and positive action counts".into()));
    }
    let count = profile_count(dims)?;
    let potential = random_values(count, seed, value_range)?;
    let mut tables = Vec::with_capacity(dims.len());
    for p in 0..dims.len() {
        // noise over the other players' actions, broadcast along axis p
        let mut other = dims.to_vec();
        other[p] = 1;
        let noise = random_values(count / dims[p], seed.wrapping_add(1 + p as u64), value_range)?;
        let mut idx = vec![0usize; dims.len()];
        let mut t = Vec::with_capacity(count);
        loop {
            let mut o = idx.clone();
            o[p] = 0;
            t.push(potential[flat_index(dims, &idx)] + noise[flat_index(&other, &o)]);
            if !increment(&mut idx, dims) {
                break;
            }
        }
        tables.push(t);
    }
    let utils = tables.split_off(n);
    Ok(PotentialTables {
        dims: dims.to_vec(),
        n,
        costs: tables,
        utils,
        potential,
    })
}
