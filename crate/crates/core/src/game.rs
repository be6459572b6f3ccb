//! Game representations and expected-utility evaluation.
//!
//! A [`Payoff`] maps pure joint profiles of all players to a real utility.
//! Players are indexed team first; in a [`TeamGame`] the single adversary is
//! player `n`. Utilities of mixed profiles are computed by contracting the
//! payoff tensor one axis at a time against the players' strategies, which is
//! linear in the tensor size (dense) or in the sum of local tensor sizes
//! (polytensor).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::sqrt;
use crate::{Error, Result};

/// Tolerance on `sum == 1` for strategy vectors.
pub const DISTRIBUTION_TOL: f64 = 1e-9;
/// Pure profiles sampled when auditing a polytensor `v_max`.
pub const V_MAX_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    DenseTensor,
    Polytensor,
}

/// A small dense tensor over a subset of players, used by polytensor games.
///
/// `players` must be strictly increasing. `values` is row-major over the
/// listed players with the last one varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    players: Vec<usize>,
    values: Vec<f64>,
}

impl LocalTerm {
    pub fn new(players: Vec<usize>, values: Vec<f64>) -> Self {
        LocalTerm { players, values }
    }

    pub fn players(&self) -> &[usize] {
        &self.players
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(Vec<f64>),
    Poly(Vec<LocalTerm>),
}

/// Utility of every pure joint profile, in one of two encodings.
#[derive(Debug, Clone, PartialEq)]
pub struct Payoff {
    dims: Vec<usize>,
    repr: Repr,
}

fn product(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

impl Payoff {
    /// Dense tensor, row-major with the last player varying fastest.
    pub fn dense(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_dims(&dims)?;
        let size = product(&dims).ok_or(Error::Capacity {
            what: "payoff tensor size",
            requested: usize::MAX,
            limit: usize::MAX,
        })?;
        if values.len() != size {
            return Err(Error::InvalidGame(alloc::format!(
                "dense payoff has {} entries, expected {}",
                values.len(),
                size
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGame(alloc::format!("payoff entry {i} is not finite")));
        }
        Ok(Payoff {
            dims,
            repr: Repr::Dense(values),
        })
    }

    /// Sum of local tensors; the utility of a pure profile is the sum of each
    /// term evaluated at the actions of its players.
    pub fn polytensor(dims: Vec<usize>, terms: Vec<LocalTerm>) -> Result<Self> {
        check_dims(&dims)?;
        for (t, term) in terms.iter().enumerate() {
            if term.players.is_empty() {
                return Err(Error::InvalidGame(alloc::format!("local term {t} has no players")));
            }
            if term.players.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGame(alloc::format!(
                    "local term {t}: players must be strictly increasing"
                )));
            }
            if let Some(&p) = term.players.iter().find(|&&p| p >= dims.len()) {
                return Err(Error::PlayerOutOfRange {
                    player: p,
                    players: dims.len(),
                });
            }
            let local: Vec<usize> = term.players.iter().map(|&p| dims[p]).collect();
            let size = product(&local).unwrap_or(usize::MAX);
            if term.values.len() != size {
                return Err(Error::InvalidGame(alloc::format!(
                    "local term {t} has {} entries, expected {size}",
                    term.values.len()
                )));
            }
            if term.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(alloc::format!("local term {t} has a non-finite entry")));
            }
        }
        Ok(Payoff {
            dims,
            repr: Repr::Poly(terms),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn representation(&self) -> Representation {
        match self.repr {
            Repr::Dense(_) => Representation::DenseTensor,
            Repr::Poly(_) => Representation::Polytensor,
        }
    }

    pub fn dense_values(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense(v) => Some(v),
            Repr::Poly(_) => None,
        }
    }

    pub fn local_terms(&self) -> Option<&[LocalTerm]> {
        match &self.repr {
            Repr::Dense(_) => None,
            Repr::Poly(t) => Some(t),
        }
    }

    /// Number of pure joint profiles, saturating at `usize::MAX`.
    pub fn num_profiles(&self) -> usize {
        product(&self.dims).unwrap_or(usize::MAX)
    }

    /// Utility of a pure joint profile.
    pub fn value(&self, pure: &[usize]) -> f64 {
        assert_eq!(pure.len(), self.dims.len());
        match &self.repr {
            Repr::Dense(v) => v[flat_index(&self.dims, pure)],
            Repr::Poly(terms) => terms
                .iter()
                .map(|t| {
                    let mut idx = 0;
                    for &p in &t.players {
                        idx = idx * self.dims[p] + pure[p];
                    }
                    t.values[idx]
                })
                .sum(),
        }
    }

    /// Expected utility under independent mixed strategies, one per player.
    pub fn expectation(&self, dists: &[&[f64]]) -> f64 {
        self.contract_keep(dists, &[])[0]
    }

    /// `out[a] = E[U | player plays a]`, the other players mixing per `dists`.
    pub fn marginal(&self, dists: &[&[f64]], player: usize) -> Vec<f64> {
        self.contract_keep(dists, &[player])
    }

    /// Row-major `|A_p| x |A_q|` table of `E[U | p plays a, q plays b]`.
    pub fn pair_marginal(&self, dists: &[&[f64]], p: usize, q: usize) -> Vec<f64> {
        assert_ne!(p, q);
        if p < q {
            self.contract_keep(dists, &[p, q])
        } else {
            let t = self.contract_keep(dists, &[q, p]);
            let (dq, dp) = (self.dims[q], self.dims[p]);
            let mut out = vec![0.0; dp * dq];
            for a in 0..dp {
                for b in 0..dq {
                    out[a * dq + b] = t[b * dp + a];
                }
            }
            out
        }
    }

    /// Upper bound on `|U(a)|` over pure profiles: exact for dense tensors,
    /// the sum of local maxima for polytensors.
    pub fn max_abs_bound(&self) -> f64 {
        let m = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        match &self.repr {
            Repr::Dense(v) => m(v),
            Repr::Poly(terms) => terms.iter().map(|t| m(&t.values)).sum(),
        }
    }

    /// Contracts every player not in `keep` (sorted) against its strategy and
    /// returns the tensor over the kept players, row-major.
    pub(crate) fn contract_keep(&self, dists: &[&[f64]], keep: &[usize]) -> Vec<f64> {
        assert_eq!(dists.len(), self.dims.len(), "one strategy per player");
        for (p, d) in dists.iter().enumerate() {
            if !keep.contains(&p) {
                assert_eq!(d.len(), self.dims[p], "strategy length for player {p}");
            }
        }
        match &self.repr {
            Repr::Dense(values) => {
                let axes: Vec<usize> = (0..self.dims.len()).collect();
                contract(values, &self.dims, &axes, dists, keep)
            }
            Repr::Poly(terms) => {
                let out_dims: Vec<usize> = keep.iter().map(|&p| self.dims[p]).collect();
                let mut out = vec![0.0; out_dims.iter().product()];
                for term in terms {
                    let local_dims: Vec<usize> = term.players.iter().map(|&p| self.dims[p]).collect();
                    let local = contract(&term.values, &local_dims, &term.players, dists, keep);
                    // kept players present in this term, in `keep` order
                    let present: Vec<bool> = keep.iter().map(|p| term.players.contains(p)).collect();
                    let mut idx = vec![0usize; keep.len()];
                    for slot in out.iter_mut() {
                        let mut li = 0;
                        for (k, &on) in present.iter().enumerate() {
                            if on {
                                li = li * out_dims[k] + idx[k];
                            }
                        }
                        *slot += local[li];
                        increment(&mut idx, &out_dims);
                    }
                }
                out
            }
        }
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidGame("game has no players".into()));
    }
    if let Some(p) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidGame(alloc::format!("player {p} has no actions")));
    }
    Ok(())
}

pub(crate) fn flat_index(dims: &[usize], pure: &[usize]) -> usize {
    let mut idx = 0;
    for (d, a) in dims.iter().zip(pure) {
        debug_assert!(a < d);
        idx = idx * d + a;
    }
    idx
}

/// Odometer increment, last position fastest. Returns `false` after wrapping.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Contracts the axes of a row-major tensor whose axes belong to the global
/// players `axes`. Players listed in `keep` are left uncontracted.
fn contract(values: &[f64], dims: &[usize], axes: &[usize], dists: &[&[f64]], keep: &[usize]) -> Vec<f64> {
    let mut cur: Option<Vec<f64>> = None;
    let mut cur_dims: Vec<usize> = dims.to_vec();
    for pos in (0..axes.len()).rev() {
        let player = axes[pos];
        if keep.contains(&player) {
            continue;
        }
        let src: &[f64] = cur.as_deref().unwrap_or(values);
        let d = cur_dims[pos];
        let post: usize = cur_dims[pos + 1..].iter().product();
        let pre = src.len() / (d * post);
        let w = dists[player];
        let mut out = vec![0.0; pre * post];
        for p in 0..pre {
            let row = &mut out[p * post..(p + 1) * post];
            for (a, &wa) in w.iter().enumerate() {
                if wa == 0.0 {
                    continue;
                }
                let base = (p * d + a) * post;
                for (o, s) in row.iter_mut().zip(&src[base..base + post]) {
                    *o += wa * s;
                }
            }
        }
        cur = Some(out);
        cur_dims.remove(pos);
    }
    cur.unwrap_or_else(|| values.to_vec())
}

/// Mixed strategies of the team players and the adversary.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    pub team: Vec<Vec<f64>>,
    pub adversary: Vec<f64>,
}

impl MixedProfile {
    pub fn new(team: Vec<Vec<f64>>, adversary: Vec<f64>) -> Self {
        MixedProfile { team, adversary }
    }

    pub fn uniform(game: &TeamGame) -> Self {
        MixedProfile {
            team: game.action_sets().iter().map(|&k| uniform(k)).collect(),
            adversary: uniform(game.adversary_actions()),
        }
    }

    /// Pure profile: team actions `actions`, adversary action `b`.
    pub fn pure(game: &TeamGame, actions: &[usize], b: usize) -> Self {
        MixedProfile {
            team: game
                .action_sets()
                .iter()
                .zip(actions)
                .map(|(&k, &a)| indicator(k, a))
                .collect(),
            adversary: indicator(game.adversary_actions(), b),
        }
    }

    pub(crate) fn dists(&self) -> Vec<&[f64]> {
        let mut d: Vec<&[f64]> = self.team.iter().map(|v| v.as_slice()).collect();
        d.push(&self.adversary);
        d
    }

    /// Euclidean distance between the stacked strategy vectors.
    pub fn distance(&self, other: &MixedProfile) -> f64 {
        let mut s = crate::linalg::dist_sq(&self.adversary, &other.adversary);
        for (a, b) in self.team.iter().zip(&other.team) {
            s += crate::linalg::dist_sq(a, b);
        }
        sqrt(s)
    }
}

pub(crate) fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

pub(crate) fn indicator(k: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[a] = 1.0;
    v
}

pub(crate) fn check_distribution(player: usize, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            player,
            expected,
            found: v.len(),
        });
    }
    let sum: f64 = v.iter().sum();
    if v.iter().any(|x| !x.is_finite() || *x < -1e-12) || (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(Error::NotADistribution { player, sum });
    }
    Ok(())
}

/// Adversarial team game: `n` minimizing team players against one maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamGame {
    payoff: Payoff,
    v_max: f64,
}

impl TeamGame {
    /// Wraps a payoff over `n + 1` players; the last player is the adversary.
    /// `v_max` defaults to [`Payoff::max_abs_bound`].
    pub fn new(payoff: Payoff) -> Result<Self> {
        if payoff.players() < 2 {
            return Err(Error::InvalidGame(
                "a team game needs at least one team player and an adversary".into(),
            ));
        }
        let v_max = payoff.max_abs_bound();
        Ok(TeamGame { payoff, v_max })
    }

    pub fn dense(action_sets: &[usize], adversary_actions: usize, values: Vec<f64>) -> Result<Self> {
        let mut dims = action_sets.to_vec();
        dims.push(adversary_actions);
        TeamGame::new(Payoff::dense(dims, values)?)
    }

    /// Replaces the payoff bound, checking `|U| <= v_max` exhaustively on
    /// dense games and on [`V_MAX_SAMPLES`] sampled profiles otherwise.
    pub fn with_v_max(mut self, v_max: f64) -> Result<Self> {
        if !v_max.is_finite() || v_max < 0.0 {
            return Err(Error::InvalidGame(alloc::format!("v_max must be finite and >= 0, got {v_max}")));
        }
        match &self.payoff.repr {
            Repr::Dense(values) => {
                if let Some(i) = values.iter().position(|v| v.abs() > v_max) {
                    return Err(Error::InvalidGame(alloc::format!(
                        "|payoff| = {} at entry {i} exceeds v_max = {v_max}",
                        values[i].abs()
                    )));
                }
            }
            Repr::Poly(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let mut pure = vec![0usize; self.payoff.players()];
                for _ in 0..V_MAX_SAMPLES {
                    for (a, &d) in pure.iter_mut().zip(&self.payoff.dims) {
                        *a = rng.gen_range(0..d);
                    }
                    let u = self.payoff.value(&pure);
                    if u.abs() > v_max {
                        return Err(Error::InvalidGame(alloc::format!(
                            "|payoff| = {} at profile {pure:?} exceeds v_max = {v_max}",
                            u.abs()
                        )));
                    }
                }
            }
        }
        self.v_max = v_max;
        Ok(self)
    }

    pub fn payoff(&self) -> &Payoff {
        &self.payoff
    }

    /// Number of team players.
    pub fn n(&self) -> usize {
        self.payoff.players() - 1
    }

    pub fn action_sets(&self) -> &[usize] {
        &self.payoff.dims[..self.n()]
    }

    pub fn adversary_actions(&self) -> usize {
        self.payoff.dims[self.n()]
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn representation(&self) -> Representation {
        self.payoff.representation()
    }

    /// Total number of team strategy coordinates, `sum |A_i|`.
    pub fn team_dim(&self) -> usize {
        self.action_sets().iter().sum()
    }

    pub fn validate_team(&self, team: &[Vec<f64>]) -> Result<()> {
        if team.len() != self.n() {
            return Err(Error::PlayerCount {
                expected: self.n(),
                found: team.len(),
            });
        }
        for (i, (x, &k)) in team.iter().zip(self.action_sets()).enumerate() {
            check_distribution(i, x, k)?;
        }
        Ok(())
    }

    pub fn validate(&self, profile: &MixedProfile) -> Result<()> {
        self.validate_team(&profile.team)?;
        check_distribution(self.n(), &profile.adversary, self.adversary_actions())
    }

    /// `U_b(x)` for every adversary action `b`.
    pub fn adversary_values(&self, team: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.validate_team(team)?;
        Ok(self.adversary_values_unchecked(team))
    }

    pub(crate) fn adversary_values_unchecked(&self, team: &[Vec<f64>]) -> Vec<f64> {
        let k = self.adversary_actions();
        let dummy = vec![0.0; k];
        let mut dists: Vec<&[f64]> = team.iter().map(|v| v.as_slice()).collect();
        dists.push(&dummy);
        self.payoff.marginal(&dists, self.n())
    }

    /// `|A_i| x |B|` table of `U_b(a, x_{-i})` for team player `i`.
    pub(crate) fn deviation_table(&self, team: &[Vec<f64>], i: usize) -> Vec<f64> {
        let dummy = vec![0.0; self.adversary_actions()];
        let mut dists: Vec<&[f64]> = team.iter().map(|v| v.as_slice()).collect();
        dists.push(&dummy);
        self.payoff.pair_marginal(&dists, i, self.n())
    }
}

/// Lipschitz and smoothness constants of the mixed extension `U(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessBounds {
    pub lipschitz: f64,
    pub smoothness: f64,
    pub source: BoundSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    Analytic,
    UserOverride,
}

impl SmoothnessBounds {
    pub fn user(lipschitz: f64, smoothness: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz >= 0.0 && smoothness.is_finite() && smoothness >= 0.0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "bounds must be finite and nonnegative (L = {lipschitz}, ell = {smoothness})"
            )));
        }
        Ok(SmoothnessBounds {
            lipschitz,
            smoothness,
            source: BoundSource::UserOverride,
        })
    }
}

/// Expected utility of a mixed profile.
pub fn expected_utility(game: &TeamGame, profile: &MixedProfile) -> Result<f64> {
    game.validate(profile)?;
    Ok(game.payoff.expectation(&profile.dists()))
}

/// Gradient of `U` with respect to team player `player`'s strategy:
/// component `a` is the expected utility when that player plays `a`.
/// Team players are numbered from 0.
pub fn partial_gradient(game: &TeamGame, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
    if player >= game.n() {
        return Err(Error::PlayerOutOfRange {
            player,
            players: game.n(),
        });
    }
    game.validate(profile)?;
    Ok(game.payoff.marginal(&profile.dists(), player))
}

/// Pure best response of the adversary, lowest index on ties, with its value.
pub fn adversary_best_response(game: &TeamGame, team: &[Vec<f64>]) -> Result<(usize, f64)> {
    let values = game.adversary_values(team)?;
    Ok(argmax_lowest(&values))
}

pub(crate) fn argmax_lowest(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (b, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = b;
        }
    }
    (best, values[best])
}

/// `L = V sqrt(sum |A_i| + |B|)` and the smoothness bound `V (sum |A_i| + |B|)`.
///
/// The smoothness constant is a conservative bound: every entry of the
/// Hessian of the multilinear extension is bounded by `V`, and the Frobenius
/// norm of a `d x d` matrix with such entries is at most `V d`.
pub fn analytic_bounds(game: &TeamGame) -> SmoothnessBounds {
    let d = (game.team_dim() + game.adversary_actions()) as f64;
    let v = game.v_max();
    SmoothnessBounds {
        lipschitz: v * sqrt(d),
        smoothness: v * d,
        source: BoundSource::Analytic,
    }
}

/// Spectral-norm bound on the Hessian of `x -> U(x, b)` over team coordinates.
///
/// Diagonal blocks vanish by multilinearity and off-diagonal entries are
/// bounded by `V`, so the Frobenius norm gives `V sqrt((sum A)^2 - sum A^2)`.
pub fn team_curvature_bound(game: &TeamGame) -> f64 {
    let s: usize = game.team_dim();
    let sq: usize = game.action_sets().iter().map(|a| a * a).sum();
    game.v_max() * sqrt((s * s - sq) as f64)
}
