//! Proximal points of the best-response value `φ(x) = max_b U_b(x)` over the
//! team polytope, the potential `g` and stationarity measures.
//!
//! The proximal objective is `P(x') = φ(x') + ℓ‖x' - x‖²`. It is a maximum of
//! the pieces `h_b(x') = U_b(x') + ℓ‖x' - x‖²`, each of which is
//! `μ = 2ℓ - h`-strongly convex and `M = 2ℓ + h`-smooth, where `h` bounds the
//! curvature of `U_b` over team coordinates (zero for a single team player).
//!
//! The default solver ([`ProxMethod::ProxLinear`]) repeatedly minimizes the
//! `M`-quadratic upper model of every piece around the iterate (a small QP)
//! and certifies its answer with two bounds:
//!
//! * upper: the exact objective at the best point seen, the center included;
//! * lower: for the QP's cut multipliers `λ` (a distribution), the
//!   `μ`-quadratic lower model `sum_b λ_b h_b` minimized in closed form by a
//!   projection.
//!
//! It stops once the bounds are within the requested tolerance. The
//! projected subgradient method with the a priori strongly convex rate is
//! available as [`ProxMethod::Subgradient`].

use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::project_simplex;
use crate::game::{team_curvature_bound, TeamGame};
use crate::linalg::{dist_sq, dot, sqrt};
use crate::qp::{solve_qp, Qp};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxMethod {
    ProxLinear,
    Subgradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxConfig {
    pub ell: f64,
    pub tol: f64,
    pub method: ProxMethod,
    /// Iteration cap; the result is flagged unconverged when it binds.
    pub max_iters: usize,
}

pub const PROX_LINEAR_CAP: usize = 200;
pub const SUBGRADIENT_CAP: usize = 20_000_000;

impl ProxConfig {
    pub fn new(ell: f64, tol: f64) -> Self {
        ProxConfig {
            ell,
            tol,
            method: ProxMethod::ProxLinear,
            max_iters: PROX_LINEAR_CAP,
        }
    }

    pub fn subgradient(ell: f64, tol: f64) -> Self {
        ProxConfig {
            ell,
            tol,
            method: ProxMethod::Subgradient,
            max_iters: SUBGRADIENT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximalResult {
    pub center: Vec<Vec<f64>>,
    pub prox_point: Vec<Vec<f64>>,
    /// `φ(prox_point) + ℓ‖center - prox_point‖²`; this is the potential `g`.
    pub objective_value: f64,
    /// Requested value accuracy.
    pub tolerance: f64,
    /// Certified bound on `objective_value - min P`.
    pub certified_gap: f64,
    /// Certified lower bound on `min P`.
    pub lower_bound: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Strong convexity modulus `μ` of `P` used by the certificates.
    pub strong_convexity: f64,
    pub method: ProxMethod,
}

impl ProximalResult {
    pub fn potential_g(&self) -> f64 {
        self.objective_value
    }

    /// `‖center - prox_point‖₂`.
    pub fn prox_distance(&self) -> f64 {
        sqrt(
            self.center
                .iter()
                .zip(&self.prox_point)
                .map(|(a, b)| dist_sq(a, b))
                .sum(),
        )
    }
}

/// Max-of-pieces oracle over the flattened team coordinates.
trait Pieces {
    /// `(values[b], gradients[b * d + k])` at `x`.
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);
}

struct GamePieces<'a> {
    game: &'a TeamGame,
}

impl Pieces for GamePieces<'_> {
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let team = unflatten(x, self.game.action_sets());
        let values = self.game.adversary_values_unchecked(&team);
        let nb = values.len();
        let d = x.len();
        let mut grads = vec![0.0; nb * d];
        let mut off = 0;
        for (i, &k) in self.game.action_sets().iter().enumerate() {
            let table = self.game.deviation_table(&team, i);
            for a in 0..k {
                for b in 0..nb {
                    grads[b * d + off + a] = table[a * nb + b];
                }
            }
            off += k;
        }
        (values, grads)
    }
}

/// `values[b] = constants[b] + slopes[b]·x`.
struct AffinePieces {
    constants: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pieces for AffinePieces {
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = x.len();
        let values = self
            .constants
            .iter()
            .enumerate()
            .map(|(b, c)| c + dot(&self.slopes[b * d..(b + 1) * d], x))
            .collect();
        (values, self.slopes.clone())
    }
}

fn flatten(team: &[Vec<f64>]) -> Vec<f64> {
    team.iter().flatten().copied().collect()
}

fn unflatten(x: &[f64], blocks: &[usize]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut off = 0;
    for &k in blocks {
        out.push(x[off..off + k].to_vec());
        off += k;
    }
    out
}

fn project_blocks(x: &[f64], blocks: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut off = 0;
    for &k in blocks {
        out.extend(project_simplex(&x[off..off + k]));
        off += k;
    }
    out
}

struct Problem<'a> {
    pieces: &'a dyn Pieces,
    blocks: &'a [usize],
    center: Vec<f64>,
    ell: f64,
    /// curvature bound of the pieces
    curvature: f64,
}

impl Problem<'_> {
    fn objective(&self, x: &[f64]) -> f64 {
        let (values, _) = self.pieces.eval(x);
        values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v)) + self.ell * dist_sq(x, &self.center)
    }

    /// Values and gradients of `h_b` at `x`.
    fn pieces_at(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut values, mut grads) = self.pieces.eval(x);
        let d = x.len();
        let q = self.ell * dist_sq(x, &self.center);
        for (b, v) in values.iter_mut().enumerate() {
            *v += q;
            for k in 0..d {
                grads[b * d + k] += 2.0 * self.ell * (x[k] - self.center[k]);
            }
        }
        (values, grads)
    }
}

struct Solved {
    x: Vec<f64>,
    value: f64,
    lower: f64,
    converged: bool,
    iterations: usize,
}

fn prox_linear(p: &Problem, tol: f64, cap: usize) -> Solved {
    let d = p.center.len();
    let mu = 2.0 * p.ell - p.curvature;
    let big_m = 2.0 * p.ell + p.curvature;
    let mut best_x = p.center.clone();
    let mut best = p.objective(&p.center);
    let mut lower = f64::NEG_INFINITY;
    let mut xk = p.center.clone();
    let mut iterations = 0;

    // equality rows: one simplex per block; t has coefficient 0
    let mut eq_rows = Vec::new();
    let mut off = 0;
    for &k in p.blocks {
        let mut row = vec![0.0; d + 1];
        for v in &mut row[off..off + k] {
            *v = 1.0;
        }
        eq_rows.push(row);
        off += k;
    }

    while iterations < cap && best - lower > tol {
        iterations += 1;
        let (h, grads) = p.pieces_at(&xk);
        let nb = h.len();

        // min t + (M/2)‖x - xk‖² s.t. grad_b·x - t <= grad_b·xk - h_b, x >= 0
        let mut hess = vec![big_m; d + 1];
        hess[d] = 0.0;
        let mut linear: Vec<f64> = xk.iter().map(|v| -big_m * v).collect();
        linear.push(1.0);
        let mut ineq_rows = Vec::with_capacity(nb + d);
        let mut ineq_rhs = Vec::with_capacity(nb + d);
        for b in 0..nb {
            let g = &grads[b * d..(b + 1) * d];
            let mut row = g.to_vec();
            row.push(-1.0);
            ineq_rows.push(row);
            ineq_rhs.push(dot(g, &xk) - h[b]);
        }
        for k in 0..d {
            let mut row = vec![0.0; d + 1];
            row[k] = -1.0;
            ineq_rows.push(row);
            ineq_rhs.push(0.0);
        }
        let qp = Qp {
            hess_diag: hess,
            linear,
            eq_rows: eq_rows.clone(),
            eq_rhs: vec![1.0; p.blocks.len()],
            ineq_rows,
            ineq_rhs,
        };
        let mut z0 = xk.clone();
        z0.push(h.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v)) + 1.0);
        let sol = solve_qp(&qp, &z0);

        // lower bound from the cut multipliers
        let mut lam: Vec<f64> = sol.ineq_dual[..nb].iter().map(|v| v.max(0.0)).collect();
        let s: f64 = lam.iter().sum();
        if s > 0.0 && s.is_finite() {
            for v in &mut lam {
                *v /= s;
            }
            let mut g = vec![0.0; d];
            let mut base = 0.0;
            for b in 0..nb {
                base += lam[b] * h[b];
                for k in 0..d {
                    g[k] += lam[b] * grads[b * d + k];
                }
            }
            let target: Vec<f64> = xk.iter().zip(&g).map(|(x, gk)| x - gk / mu).collect();
            let xl = project_blocks(&target, p.blocks);
            let step: Vec<f64> = xl.iter().zip(&xk).map(|(a, b)| a - b).collect();
            let lb = base + dot(&g, &step) + 0.5 * mu * dot(&step, &step);
            if lb > lower {
                lower = lb;
            }
        }

        let next = project_blocks(&sol.z[..d], p.blocks);
        let v = p.objective(&next);
        if v < best {
            best = v;
            best_x = next.clone();
        }
        if dist_sq(&next, &xk) == 0.0 && !sol.converged {
            break;
        }
        xk = next;
    }
    Solved {
        converged: best - lower <= tol,
        x: best_x,
        value: best,
        lower,
        iterations,
    }
}

/// A priori iteration count of the subgradient method for accuracy `tol`.
pub fn subgradient_iterations(subgradient_bound: f64, modulus: f64, tol: f64) -> usize {
    let k = libm::ceil(2.0 * subgradient_bound * subgradient_bound / (modulus * tol));
    if k >= usize::MAX as f64 {
        usize::MAX
    } else {
        (k as usize).max(1)
    }
}

fn subgradient(p: &Problem, tol: f64, cap: usize, grad_bound: f64, modulus: f64) -> Solved {
    let d = p.center.len();
    let planned = subgradient_iterations(grad_bound, modulus, tol);
    let k = planned.min(cap);
    let mut x = p.center.clone();
    let mut avg = vec![0.0; d];
    let mut weight = 0.0;
    for step in 0..k {
        let (h, grads) = p.pieces_at(&x);
        let (b, _) = crate::game::argmax_lowest(&h);
        let g = &grads[b * d..(b + 1) * d];
        // weights 2(j+1)/(k(k+1)) realized as a running average with weight j+1
        let w = (step + 1) as f64;
        weight += w;
        for c in 0..d {
            avg[c] += (w / weight) * (x[c] - avg[c]);
        }
        let eta = 2.0 / (modulus * (step + 2) as f64);
        let moved: Vec<f64> = x.iter().zip(g).map(|(v, gv)| v - eta * gv).collect();
        x = project_blocks(&moved, p.blocks);
    }
    let avg = project_blocks(&avg, p.blocks);
    let bound = 2.0 * grad_bound * grad_bound / (modulus * (k + 1) as f64);
    let (mut value, mut best_x) = (p.objective(&avg), avg);
    let at_center = p.objective(&p.center);
    if at_center < value {
        value = at_center;
        best_x = p.center.clone();
    }
    Solved {
        x: best_x,
        value,
        lower: value - bound,
        converged: k == planned,
        iterations: k,
    }
}

fn check_config(cfg: &ProxConfig, curvature: f64) -> Result<f64> {
    if !(cfg.ell > 0.0 && cfg.ell.is_finite()) {
        return Err(Error::InvalidConfig(alloc::format!("ell must be positive, got {}", cfg.ell)));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::InvalidConfig(alloc::format!("tol must be positive, got {}", cfg.tol)));
    }
    let mu = 2.0 * cfg.ell - curvature;
    if mu <= 0.0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "ell = {} is below half the curvature bound {curvature}; the proximal problem is not convex",
            cfg.ell
        )));
    }
    Ok(mu)
}

fn solve(p: &Problem, cfg: &ProxConfig, mu: f64, grad_bound: f64) -> Solved {
    match cfg.method {
        ProxMethod::ProxLinear => prox_linear(p, cfg.tol, cfg.max_iters),
        ProxMethod::Subgradient => {
            // spec rate uses modulus ℓ; valid whenever it does not exceed μ
            let modulus = cfg.ell.min(mu);
            subgradient(p, cfg.tol, cfg.max_iters, grad_bound, modulus)
        }
    }
}

fn result(p: &Problem, s: Solved, cfg: &ProxConfig, mu: f64, center: &[Vec<f64>]) -> ProximalResult {
    if !s.converged {
        log::warn!(
            "proximal solve stopped after {} iterations with gap {:.3e} > tol {:.3e}",
            s.iterations,
            s.value - s.lower,
            cfg.tol
        );
    }
    ProximalResult {
        center: center.to_vec(),
        prox_point: unflatten(&s.x, p.blocks),
        objective_value: s.value,
        tolerance: cfg.tol,
        certified_gap: (s.value - s.lower).max(0.0),
        lower_bound: s.lower,
        converged: s.converged,
        iterations: s.iterations,
        strong_convexity: mu,
        method: cfg.method,
    }
}

/// Approximate minimizer of `φ(x') + ℓ‖center - x'‖²` over the team polytope.
pub fn proximal_point(game: &TeamGame, center: &[Vec<f64>], cfg: &ProxConfig) -> Result<ProximalResult> {
    game.validate_team(center)?;
    let curvature = team_curvature_bound(game);
    let mu = check_config(cfg, curvature)?;
    let pieces = GamePieces { game };
    let p = Problem {
        pieces: &pieces,
        blocks: game.action_sets(),
        center: flatten(center),
        ell: cfg.ell,
        curvature,
    };
    // ‖∇U_b‖ <= V sqrt(sum |A_i|); ‖2ℓ(x' - x)‖ <= 2ℓ sqrt(2n)
    let grad_bound =
        game.v_max() * sqrt(game.team_dim() as f64) + 2.0 * cfg.ell * sqrt(2.0 * game.n() as f64);
    let s = solve(&p, cfg, mu, grad_bound);
    Ok(result(&p, s, cfg, mu, center))
}

/// The potential `g(x) = min_{x'} φ(x') + ℓ‖x - x'‖²`, to within `cfg.tol` above.
pub fn potential_g(game: &TeamGame, x: &[Vec<f64>], cfg: &ProxConfig) -> Result<f64> {
    Ok(proximal_point(game, x, cfg)?.objective_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// `2ℓ · prox_distance + slack`; an upper bound on `2ℓ` times the distance
    /// to the exact proximal point.
    pub measure: f64,
    pub prox_distance: f64,
    /// `2ℓ sqrt(2 · certified_gap / μ)`: distance uncertainty from inexact solves.
    pub slack: f64,
    pub prox: ProximalResult,
}

/// Proximal-distance stationarity measure of `x`.
pub fn stationarity(game: &TeamGame, x: &[Vec<f64>], cfg: &ProxConfig) -> Result<StationarityReport> {
    let prox = proximal_point(game, x, cfg)?;
    Ok(report(prox, cfg.ell))
}

fn report(prox: ProximalResult, ell: f64) -> StationarityReport {
    let dist = prox.prox_distance();
    let slack = 2.0 * ell * sqrt(2.0 * prox.certified_gap / prox.strong_convexity);
    StationarityReport {
        measure: 2.0 * ell * dist + slack,
        prox_distance: dist,
        slack,
        prox,
    }
}

/// Proximal point, centered at `anchor`, of the summed-deviation function
/// `w(x) = max_b sum_i U_b(x_i, anchor_{-i})`.
pub fn deviation_sum_stationarity(
    game: &TeamGame,
    anchor: &[Vec<f64>],
    cfg: &ProxConfig,
) -> Result<StationarityReport> {
    game.validate_team(anchor)?;
    let mu = check_config(cfg, 0.0)?;
    let nb = game.adversary_actions();
    let d = game.team_dim();
    let mut slopes = vec![0.0; nb * d];
    let mut off = 0;
    for (i, &k) in game.action_sets().iter().enumerate() {
        let table = game.deviation_table(anchor, i);
        for a in 0..k {
            for b in 0..nb {
                slopes[b * d + off + a] = table[a * nb + b];
            }
        }
        off += k;
    }
    let pieces = AffinePieces {
        constants: vec![0.0; nb],
        slopes,
    };
    let p = Problem {
        pieces: &pieces,
        blocks: game.action_sets(),
        center: flatten(anchor),
        ell: cfg.ell,
        curvature: 0.0,
    };
    let grad_bound = game.v_max() * sqrt(d as f64) + 2.0 * cfg.ell * sqrt(2.0 * game.n() as f64);
    let s = solve(&p, cfg, mu, grad_bound);
    Ok(report(result(&p, s, cfg, mu, anchor), cfg.ell))
}
