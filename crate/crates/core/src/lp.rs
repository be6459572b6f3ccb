//! Dense two-phase simplex with Bland's rule.
//!
//! Programs are stated as `minimize c·v` subject to `A v >= b`, `E v = f` and
//! per-variable bounds. Every optimal answer is re-certified against the
//! original data: the primal residual must be at most [`FEASIBILITY_TOL`] and
//! the Lagrangian dual bound must match the primal value within
//! [`DUALITY_GAP_TOL`]. A run that fails either check, meets a numerically tiny
//! pivot, or exceeds the iteration cap is restarted once with the right-hand
//! side perturbed by `RESTART_PERTURBATION * (1 + i/m)` on row `i`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const DUALITY_GAP_TOL: f64 = 1e-7;
pub const RESTART_PERTURBATION: f64 = 1e-10;

const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_PIVOT: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-10;
const HARRIS_TOL: f64 = 1e-9;
const STALL_LIMIT: usize = 50;

/// Closed interval of admissible values; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const NONNEGATIVE: VarBounds = VarBounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const FREE: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
}

impl Default for VarBounds {
    fn default() -> Self {
        VarBounds::NONNEGATIVE
    }
}

/// `minimize objective·v` s.t. `ge_rows v >= ge_rhs`, `eq_rows v = eq_rhs`,
/// `bounds[j].lower <= v_j <= bounds[j].upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ge_rows: Vec<Vec<f64>>,
    pub ge_rhs: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables with no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            ge_rows: Vec::new(),
            ge_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            bounds: vec![VarBounds::NONNEGATIVE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ge_rows.push(row);
        self.ge_rhs.push(rhs);
        self
    }

    /// Stored as the `>=` row `-row·v >= -rhs`.
    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.add_ge(row.into_iter().map(|a| -a).collect(), -rhs)
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn bound(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = VarBounds { lower, upper };
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bounds[var] = VarBounds::FREE;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.bounds.len() != n {
            return bad(alloc::format!("{} bounds for {n} variables", self.bounds.len()));
        }
        if self.ge_rows.len() != self.ge_rhs.len() || self.eq_rows.len() != self.eq_rhs.len() {
            return bad("row and right-hand side counts differ".into());
        }
        for row in self.ge_rows.iter().chain(&self.eq_rows) {
            if row.len() != n {
                return bad(alloc::format!("row of length {} for {n} variables", row.len()));
            }
            if row.iter().any(|a| !a.is_finite()) {
                return bad("non-finite constraint coefficient".into());
            }
        }
        let finite = |v: &[f64]| v.iter().all(|a| a.is_finite());
        if !finite(&self.objective) || !finite(&self.ge_rhs) || !finite(&self.eq_rhs) {
            return bad("non-finite objective or right-hand side".into());
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper || b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return bad(alloc::format!("variable {j} has empty bounds [{}, {}]", b.lower, b.upper));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `v`.
    pub fn primal_residual(&self, v: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (row, &b) in self.ge_rows.iter().zip(&self.ge_rhs) {
            worst = worst.max(b - crate::linalg::dot(row, v));
        }
        for (row, &f) in self.eq_rows.iter().zip(&self.eq_rhs) {
            worst = worst.max((crate::linalg::dot(row, v) - f).abs());
        }
        for (x, b) in v.iter().zip(&self.bounds) {
            worst = worst.max(b.lower - x).max(x - b.upper);
        }
        worst
    }

    /// Lagrangian lower bound `min_{v in bounds} c·v - y·(rows v - rhs)` for
    /// multipliers `dual` (`>=` rows first, then equalities). Returns `-inf`
    /// when the inner minimization is unbounded. Weak duality: this never
    /// exceeds the optimum when the `>=` multipliers are nonnegative.
    pub fn lagrangian_bound(&self, dual: &[f64]) -> f64 {
        let (y_ge, y_eq) = dual.split_at(self.ge_rows.len());
        let mut value = crate::linalg::dot(y_ge, &self.ge_rhs) + crate::linalg::dot(y_eq, &self.eq_rhs);
        let scale = 1.0 + self.objective.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for j in 0..self.num_vars() {
            let mut r = self.objective[j];
            for (row, y) in self.ge_rows.iter().zip(y_ge).chain(self.eq_rows.iter().zip(y_eq)) {
                r -= y * row[j];
            }
            let b = self.bounds[j];
            if r.abs() <= REDUCED_COST_TOL * scale && !(b.lower.is_finite() && b.upper.is_finite()) {
                continue;
            }
            let end = if r > 0.0 { b.lower } else { b.upper };
            if !end.is_finite() {
                return f64::NEG_INFINITY;
            }
            value += r * end;
        }
        value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. For non-optimal statuses `primal` and `dual` are
/// empty, `value` is `+inf` (infeasible) or `-inf` (unbounded) and
/// `duality_gap` is infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub primal: Vec<f64>,
    /// Multipliers of the `>=` rows (nonnegative) followed by the equalities.
    pub dual: Vec<f64>,
    pub value: f64,
    pub status: LpStatus,
    pub duality_gap: f64,
    /// Sorted basic columns of the internal standard form; identifies the vertex.
    pub basis: Vec<usize>,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            primal: Vec::new(),
            dual: Vec::new(),
            value: if status == LpStatus::Infeasible {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            status,
            duality_gap: f64::INFINITY,
            basis: Vec::new(),
        }
    }
}

/// How an original variable is expressed through standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `v = lower + s`
    Shift(f64, usize),
    /// `v = upper - s`
    Reflect(f64, usize),
    /// `v = s_plus - s_minus`
    Split(usize, usize),
}

/// `min c·s` s.t. `rows s = rhs`, `s >= 0`.
#[derive(Debug)]
struct StandardForm {
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    map: Vec<VarMap>,
    /// Index of the standard-form row holding each original row (ge then eq).
    row_of: Vec<usize>,
}

fn standard_form(lp: &LinearProgram) -> StandardForm {
    let mut ncols = 0;
    let mut map = Vec::with_capacity(lp.num_vars());
    let mut upper_rows = Vec::new();
    for b in &lp.bounds {
        let m = if b.lower.is_finite() {
            if b.upper.is_finite() {
                upper_rows.push((ncols, b.upper - b.lower));
            }
            VarMap::Shift(b.lower, ncols)
        } else if b.upper.is_finite() {
            VarMap::Reflect(b.upper, ncols)
        } else {
            ncols += 1;
            VarMap::Split(ncols - 1, ncols)
        };
        ncols += 1;
        map.push(m);
    }
    let n_surplus = lp.ge_rows.len() + upper_rows.len();
    let total = ncols + n_surplus;

    // substitutes the variable map into an original row: returns (coeffs, constant)
    let expand = |row: &[f64]| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; total];
        let mut constant = 0.0;
        for (a, m) in row.iter().zip(&map) {
            match *m {
                VarMap::Shift(lo, c) => {
                    out[c] += a;
                    constant += a * lo;
                }
                VarMap::Reflect(hi, c) => {
                    out[c] -= a;
                    constant += a * hi;
                }
                VarMap::Split(p, q) => {
                    out[p] += a;
                    out[q] -= a;
                }
            }
        }
        (out, constant)
    };

    let mut cost = vec![0.0; total];
    {
        let (c, _) = expand(&lp.objective);
        cost[..ncols].copy_from_slice(&c[..ncols]);
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut row_of = Vec::new();
    let mut surplus = ncols;
    for (row, &b) in lp.ge_rows.iter().zip(&lp.ge_rhs) {
        let (mut r, k) = expand(row);
        r[surplus] = -1.0;
        surplus += 1;
        row_of.push(rows.len());
        rows.push(r);
        rhs.push(b - k);
    }
    for (col, width) in upper_rows {
        let mut r = vec![0.0; total];
        r[col] = 1.0;
        r[surplus] = 1.0;
        surplus += 1;
        rows.push(r);
        rhs.push(width);
    }
    for (row, &f) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
        let (r, k) = expand(row);
        row_of.push(rows.len());
        rows.push(r);
        rhs.push(f - k);
    }
    StandardForm {
        cost,
        rows,
        rhs,
        map,
        row_of,
    }
}

#[derive(Debug)]
enum Stop {
    Unbounded,
    Numerical,
}

#[derive(Debug)]
struct Tableau {
    m: usize,
    n_struct: usize,
    width: usize,
    t: Vec<f64>,
    // constraint rows as loaded; the current rows are B^{-1} times these
    initial: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    cap: usize,
    strict_pivots: bool,
}

impl Tableau {
    fn new(sf: &StandardForm, rhs: &[f64], strict_pivots: bool) -> Self {
        let m = sf.rows.len();
        let n_struct = sf.cost.len();
        let width = n_struct + m + 1;
        let mut t = vec![0.0; (m + 1) * width];
        for i in 0..m {
            let sign = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n_struct {
                t[i * width + j] = sign * sf.rows[i][j];
            }
            t[i * width + n_struct + i] = 1.0;
            t[i * width + width - 1] = sign * rhs[i];
        }
        Tableau {
            m,
            n_struct,
            width,
            initial: t[..m * width].to_vec(),
            t,
            basis: (n_struct..n_struct + m).collect(),
            iterations: 0,
            cap: 50 * (m + n_struct) + 1000,
            strict_pivots,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Sets the objective row to the reduced costs of `cost` (length `width - 1`).
    fn load_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let m = self.m;
        for j in 0..w {
            let mut d = if j < w - 1 { cost[j] } else { 0.0 };
            for i in 0..m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    d -= cb * self.t[i * w + j];
                }
            }
            self.t[m * w + j] = d;
        }
    }

    /// Recomputes every row from a fresh inverse of the current basis and
    /// reloads the reduced costs of `cost`. Returns `false` if the basis is
    /// numerically singular, leaving the tableau untouched.
    fn reinvert(&mut self, cost: &[f64]) -> bool {
        let (m, w) = (self.m, self.width);
        let mut b = vec![0.0; m * m];
        for i in 0..m {
            for (k, &col) in self.basis.iter().enumerate() {
                b[i * m + k] = self.initial[i * w + col];
            }
        }
        let Some(inv) = crate::linalg::invert(&b, m) else {
            return false;
        };
        for i in 0..m {
            for j in 0..w {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += inv[i * m + k] * self.initial[k * w + j];
                }
                self.t[i * w + j] = acc;
            }
        }
        for (i, &col) in self.basis.iter().enumerate() {
            for k in 0..m {
                self.t[k * w + col] = if k == i { 1.0 } else { 0.0 };
            }
        }
        self.load_objective(cost);
        true
    }

    /// Primal simplex over entering columns `< limit`: largest reduced cost
    /// with a Harris ratio test, switching to Bland's rule after
    /// `STALL_LIMIT` consecutive degenerate pivots. Before declaring optimal
    /// or unbounded the basis is reinverted once and the test repeated, so
    /// rounding from small pivots cannot end the search.
    fn optimize(&mut self, limit: usize, cost_scale: f64, cost: &[f64], phase_one: bool) -> core::result::Result<(), Stop> {
        let w = self.width;
        let m = self.m;
        let tol = REDUCED_COST_TOL * cost_scale;
        let mut stalled = 0usize;
        let mut fresh = false;
        loop {
            // no basic artificial: phase 1 is at its lower bound 0, and any
            // negative reduced cost left is rounding from an ill-conditioned basis
            if phase_one && self.basis.iter().all(|&b| b < limit) {
                return Ok(());
            }
            let bland = stalled >= STALL_LIMIT;
            let candidates = (0..limit).filter(|&j| self.t[m * w + j] < -tol && !self.basis.contains(&j));
            let entering = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| self.t[m * w + a].total_cmp(&self.t[m * w + b]))
            };
            let Some(c) = entering else {
                if !fresh && self.reinvert(cost) {
                    fresh = true;
                    continue;
                }
                return Ok(());
            };
            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(Stop::Numerical);
            }
            let r = if bland { self.ratio_bland(c) } else { self.ratio_harris(c) };
            let Some(r) = r else {
                if !fresh && self.reinvert(cost) {
                    fresh = true;
                    continue;
                }
                return Err(Stop::Unbounded);
            };
            if self.strict_pivots && self.at(r, c) < DEGENERATE_PIVOT {
                return Err(Stop::Numerical);
            }
            if self.rhs(r).max(0.0) / self.at(r, c) <= HARRIS_TOL {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(r, c);
            fresh = false;
        }
    }

    /// Minimum ratio, ties to the lowest basic index.
    fn ratio_bland(&self, c: usize) -> Option<usize> {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, c);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((k, best)) => {
                    let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best);
                    if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                        Some((i, ratio))
                    } else {
                        Some((k, best))
                    }
                }
            };
        }
        leave.map(|(i, _)| i)
    }

    /// Two-pass ratio test: bound the step with relaxed rhs, then take the
    /// largest pivot among rows within the bound.
    fn ratio_harris(&self, c: usize) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            let a = self.at(i, c);
            if a > PIVOT_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + HARRIS_TOL) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, c);
            if a > PIVOT_TOL && self.rhs(i).max(0.0) / a <= bound && best.map_or(true, |(_, b)| a > b) {
                best = Some((i, a));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Solves `B x_B = b` and `Bᵀ y = c_B` for the basis `basis` of the standard
/// form. Artificial columns are signed unit vectors matching the tableau's
/// row normalization under `norm_rhs`. Returns `(structural values, y)`.
fn refactor(
    sf: &StandardForm,
    basis: &[usize],
    ns: usize,
    norm_rhs: &[f64],
    cost: &[f64],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = basis.len();
    let column = |j: usize, i: usize| -> f64 {
        if j < ns {
            sf.rows[i][j]
        } else if j - ns == i {
            if norm_rhs[i] < 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    };
    let mut b = vec![0.0; m * m];
    let mut bt = vec![0.0; m * m];
    for (k, &j) in basis.iter().enumerate() {
        for i in 0..m {
            b[i * m + k] = column(j, i);
            bt[k * m + i] = column(j, i);
        }
    }
    let mut x = sf.rhs.clone();
    let mut y: Vec<f64> = basis.iter().map(|&j| cost[j]).collect();
    if !crate::linalg::solve_in_place(&mut b, m, &mut x) || !crate::linalg::solve_in_place(&mut bt, m, &mut y) {
        return None;
    }
    let mut s = vec![0.0; ns];
    for (k, &j) in basis.iter().enumerate() {
        if j < ns {
            s[j] = x[k].max(0.0);
        }
    }
    Some((s, y))
}

enum Attempt {
    Done(LpSolution),
    Retry,
}

/// Solves `lp`. Infeasible and unbounded programs are reported through
/// [`LpStatus`]; `Err` means malformed input or a numerical failure that
/// survived the perturbed restart.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sf = standard_form(lp);
    match attempt(lp, &sf, &sf.rhs, true) {
        Attempt::Done(s) => return Ok(s),
        Attempt::Retry => log::debug!("simplex: perturbed restart"),
    }
    let m = sf.rhs.len().max(1) as f64;
    let perturbed: Vec<f64> = sf
        .rhs
        .iter()
        .enumerate()
        .map(|(i, b)| b + RESTART_PERTURBATION * (1.0 + i as f64 / m))
        .collect();
    match attempt(lp, &sf, &perturbed, false) {
        Attempt::Done(s) => Ok(s),
        Attempt::Retry => {
            log::debug!("simplex: giving up on {lp:?}");
            Err(Error::SolverFault("simplex failed to certify after perturbed restart".into()))
        }
    }
}

fn attempt(lp: &LinearProgram, sf: &StandardForm, rhs: &[f64], strict: bool) -> Attempt {
    let mut tab = Tableau::new(sf, rhs, strict);
    let m = tab.m;
    let ns = tab.n_struct;
    let w = tab.width;

    // phase 1: minimize the sum of artificials
    let mut phase1 = vec![0.0; w - 1];
    for c in phase1.iter_mut().skip(ns) {
        *c = 1.0;
    }
    tab.load_objective(&phase1);
    match tab.optimize(ns, 1.0, &phase1, true) {
        Ok(()) => {}
        Err(_) => return Attempt::Retry,
    }
    let rhs_scale = 1.0 + rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= ns).map(|i| tab.rhs(i)).sum();
    if infeasibility > 1e-9 * rhs_scale {
        return Attempt::Done(LpSolution::non_optimal(LpStatus::Infeasible));
    }
    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] < ns {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..ns {
            let a = tab.at(r, j).abs();
            if a > 1e-9 && !tab.basis.contains(&j) && best.map_or(true, |(_, b)| a > b) {
                best = Some((j, a));
            }
        }
        if let Some((j, _)) = best {
            tab.pivot(r, j);
        }
    }

    // phase 2
    let mut cost = vec![0.0; w - 1];
    cost[..ns].copy_from_slice(&sf.cost);
    let cost_scale = 1.0 + sf.cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    tab.load_objective(&cost);
    match tab.optimize(ns, cost_scale, &cost, false) {
        Ok(()) => {}
        Err(Stop::Unbounded) => return Attempt::Done(LpSolution::non_optimal(LpStatus::Unbounded)),
        Err(Stop::Numerical) => return Attempt::Retry,
    }

    // basic values and multipliers from a fresh factorization of the final
    // basis on the unperturbed data; the tableau accumulates rounding
    let (s, y_std) = match refactor(sf, &tab.basis, ns, rhs, &cost) {
        Some(v) => v,
        None => {
            let mut s = vec![0.0; ns];
            for i in 0..m {
                if tab.basis[i] < ns {
                    s[tab.basis[i]] = tab.rhs(i).max(0.0);
                }
            }
            // y = c_B B^{-1}; B^{-1} sits in the artificial columns, with row
            // signs from the initial rhs normalization
            let y = (0..m)
                .map(|i| {
                    let sign = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += cost[tab.basis[k]] * tab.at(k, ns + i);
                    }
                    sign * acc
                })
                .collect();
            (s, y)
        }
    };
    let primal: Vec<f64> = sf
        .map
        .iter()
        .zip(&lp.bounds)
        .map(|(m, b)| {
            let v = match *m {
                VarMap::Shift(lo, c) => lo + s[c],
                VarMap::Reflect(hi, c) => hi - s[c],
                VarMap::Split(p, q) => s[p] - s[q],
            };
            v.clamp(b.lower, b.upper)
        })
        .collect();

    let n_ge = lp.ge_rows.len();
    let dual: Vec<f64> = sf
        .row_of
        .iter()
        .enumerate()
        .map(|(k, &i)| if k < n_ge { y_std[i].max(0.0) } else { y_std[i] })
        .collect();

    let value = crate::linalg::dot(&lp.objective, &primal);
    let residual = lp.primal_residual(&primal);
    let dual_value = lp.lagrangian_bound(&dual);
    let gap = (value - dual_value).abs();
    if residual > FEASIBILITY_TOL || !(gap <= DUALITY_GAP_TOL) {
        log::debug!("simplex certificate failed: residual {residual:e}, gap {gap:e}");
        return Attempt::Retry;
    }
    let mut basis: Vec<usize> = tab.basis.iter().copied().filter(|&j| j < ns).collect();
    basis.sort_unstable();
    Attempt::Done(LpSolution {
        primal,
        dual,
        value,
        status: LpStatus::Optimal,
        duality_gap: gap,
        basis,
    })
}

/// Value and optimal strategies of the zero-sum matrix game in which the row
/// player minimizes and the column player maximizes `rows[r][c]`.
pub fn zero_sum_value(matrix: &[Vec<f64>]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let r = matrix.len();
    let c = matrix.first().map_or(0, |row| row.len());
    if r == 0 || c == 0 || matrix.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidConfig("payoff matrix must be nonempty and rectangular".into()));
    }
    // rows: min v s.t. v >= sum_r x_r M[r][col] for every col
    let mut obj = vec![0.0; r + 1];
    obj[r] = 1.0;
    let mut lp = LinearProgram::new(obj);
    lp.free(r);
    for col in 0..c {
        let mut row: Vec<f64> = (0..r).map(|i| -matrix[i][col]).collect();
        row.push(1.0);
        lp.add_ge(row, 0.0);
    }
    let mut simplex = vec![1.0; r];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0);
    let row_sol = expect_optimal(solve_lp(&lp)?)?;

    // columns: max w s.t. w <= sum_c M[r][c] y_c for every row
    let mut obj = vec![0.0; c + 1];
    obj[c] = -1.0;
    let mut lp = LinearProgram::new(obj);
    lp.free(c);
    for row in matrix {
        let mut coeffs = row.clone();
        coeffs.push(-1.0);
        lp.add_ge(coeffs, 0.0);
    }
    let mut simplex = vec![1.0; c];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0);
    let col_sol = expect_optimal(solve_lp(&lp)?)?;

    let x = clean_distribution(&row_sol.primal[..r]);
    let y = clean_distribution(&col_sol.primal[..c]);
    Ok((row_sol.value, x, y))
}

pub(crate) fn expect_optimal(sol: LpSolution) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        s => Err(Error::SolverFault(alloc::format!("feasible bounded LP reported {s:?}"))),
    }
}

/// Clamps simplex round-off and renormalizes onto the probability simplex.
pub(crate) fn clean_distribution(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        for x in &mut out {
            *x /= s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.free(0).add_ge(vec![1.0], 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!((s.dual[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn box_corner() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_le(vec![1.0, 0.0], 1.0).add_le(vec![0.0, 1.0], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 2.0).abs() < 1e-12);
        assert_eq!(s.primal, vec![1.0, 1.0]);
    }

    #[test]
    fn finite_and_reflected_bounds() {
        // min x - y, x in [-2, 5], y <= 3
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.bound(0, -2.0, 5.0).bound(1, f64::NEG_INFINITY, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.primal, vec![-2.0, 3.0]);
        assert!((s.value + 5.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_le(vec![1.0], -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.add_ge(vec![1.0], 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0).add_eq(vec![2.0, 2.0], 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(s.duality_gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn malformed_program_is_an_error() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_ge(vec![1.0], 0.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn tiny_degenerate_pivot_in_phase_one() {
        // a 3e-6 pivot in phase 1 left reduced-cost noise that read as an unbounded ray
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        lp.add_ge(vec![-0.054601259527620016, 0.014476830515692068, 0.05525856014748948, -0.09943214981448201, 1.0], 0.0);
        lp.add_ge(vec![0.0919231300660226, 0.14872846981994386, -0.40567012869098995, 0.7300062933321543, 1.0], 0.0);
        lp.add_eq(vec![1.0, 1.0, 0.0, 0.0, 0.0], 1.0);
        lp.add_eq(vec![0.0, 0.0, 1.0, 1.0, 0.0], 1.0);
        lp.free(4);
        let sol = expect_optimal(solve_lp(&lp).unwrap()).unwrap();
        assert!(sol.duality_gap <= DUALITY_GAP_TOL);
        // w must cover both rows at every vertex pair; check against the four vertices
        let rows = [&lp.ge_rows[0], &lp.ge_rows[1]];
        let mut best = f64::INFINITY;
        for a in 0..2 {
            for b in 2..4 {
                let w = rows.iter().map(|r| -(r[a] + r[b])).fold(f64::NEG_INFINITY, f64::max);
                best = best.min(w);
            }
        }
        assert!(sol.value <= best + 1e-9);
    }

    #[test]
    fn extension_duals_with_tiny_entries() {
        // both failed to certify after the perturbed restart
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0, -1.0, -1.0]);
        lp.add_ge(vec![0.22276095746181176, 0.07711656874267156, -0.33007646909519345, -1.0, 0.0], 0.0);
        lp.add_ge(vec![0.07093938425381106, -0.2114902082256163, 0.6007348460634545, -1.0, 0.0], 0.0);
        lp.add_ge(vec![0.5305769353701648, 0.1631240291422029, 0.08157911022324404, -1.0, 0.0], 0.0);
        lp.add_ge(vec![0.06293597585845258, 0.12927627419513615, 5.739048834496607e-7, 0.0, -1.0], 0.0);
        lp.add_ge(vec![0.2824682031435575, -0.4029785789104726, 0.3874045616052658, 0.0, -1.0], 0.0);
        lp.add_eq(vec![1.0, 1.0, 1.0, 0.0, 0.0], 1.0);
        lp.free(3);
        lp.free(4);
        let sol = expect_optimal(solve_lp(&lp).unwrap()).unwrap();
        assert!(sol.duality_gap <= DUALITY_GAP_TOL);

        let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0]);
        let rows: [([f64; 4], usize); 7] = [
            ([-0.20015379949293619, -0.19415748295293772, -0.5606560570292487, -0.23554768846029647], 0),
            ([-0.21297447783831988, -0.043622355830462416, -0.015078628897517724, 0.29287322400132465], 0),
            ([0.10643569945280404, 0.3663032921560038, 0.312425891823493, -0.6703824763370191], 1),
            ([-0.3210578884501866, -0.3940187903128696, -0.8299452842685854, 0.008980969175685957], 1),
            ([-0.5117380154270256, -0.34952894584556304, -0.3620610637535726, 0.6396884057570907], 1),
            ([-0.266686434720564, -0.49486488573984366, -0.5565262625840496, 0.33210414074025985], 2),
            ([-0.15303342851832, 0.05866097474724172, -0.45945233771015803, -0.5574816958584563], 2),
        ];
        for (r, block) in rows {
            let mut row = r.to_vec();
            row.extend((0..3).map(|k| if k == block { -1.0 } else { 0.0 }));
            lp.add_ge(row, 0.0);
        }
        lp.add_eq(vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0], 1.0);
        for j in 4..7 {
            lp.free(j);
        }
        let sol = expect_optimal(solve_lp(&lp).unwrap()).unwrap();
        assert!(sol.duality_gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn duals_survive_ill_conditioned_basis() {
        // tableau duals were off by 4e-10 here, enough to break the free-variable certificate
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0, -1.0, -1.0]);
        lp.add_ge(vec![-0.6924799464599867, -0.5749369267849438, -0.7794974220300745, -1.0, 0.0], 0.0);
        lp.add_ge(vec![0.536560160620043, -0.5749365921598556, -0.15084640074518108, -1.0, 0.0], 0.0);
        lp.add_ge(vec![-0.24920263929666764, -0.7549754225221228, -0.2999453251538393, 0.0, -1.0], 0.0);
        lp.add_ge(vec![-0.14828841067761042, -0.38861845808756934, -0.7627798018656102, 0.0, -1.0], 0.0);
        lp.add_eq(vec![1.0, 1.0, 1.0, 0.0, 0.0], 1.0);
        lp.free(3);
        lp.free(4);
        let sol = expect_optimal(solve_lp(&lp).unwrap()).unwrap();
        assert_eq!(sol.primal[..3], [1.0, 0.0, 0.0]);
        assert!(sol.duality_gap <= 1e-12);
    }

    #[test]
    fn nearly_parallel_rows() {
        // Bland's rule alone pivots on a 6e-6 element here and loses the certificate
        let mut lp = LinearProgram::new(vec![0.0, 0.0, -1.0, -1.0]);
        lp.add_ge(vec![-0.6938413259854153, 0.21994248206006997, -1.0, 0.0], 0.0);
        lp.add_ge(vec![0.5114095597243226, 0.5745093289700147, -1.0, 0.0], 0.0);
        lp.add_ge(vec![-0.6938413259854153, 0.21994248206006997, 0.0, -1.0], 0.0);
        lp.add_ge(vec![-0.24557686929444067, 0.2199430997080068, 0.0, -1.0], 0.0);
        lp.add_eq(vec![1.0, 1.0, 0.0, 0.0], 1.0);
        lp.free(2);
        lp.free(3);
        let sol = expect_optimal(solve_lp(&lp).unwrap()).unwrap();
        // y = (0, 1), both blocks bound by 0.21994...
        assert!((sol.value + 0.21994248206006997 * 2.0).abs() < 1e-9);
    }

    #[test]
    fn pennies_value() {
        let (v, x, y) = zero_sum_value(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(v.abs() < 1e-12);
        for p in x.iter().chain(&y) {
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_matrix_prefers_first_actions() {
        let (v, x, y) = zero_sum_value(&[vec![2.0, 2.0], vec![2.0, 2.0]]).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert_eq!(x, vec![1.0, 0.0]);
        assert_eq!(y, vec![1.0, 0.0]);
    }
}
