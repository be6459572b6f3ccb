//! Independent oracles: full enumeration over pure profiles and dense linear
//! algebra. Nothing here calls the solver code under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Row-major odometer, last coordinate fastest.
pub fn profiles(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..total {
        out.push(idx.clone());
        for p in (0..dims.len()).rev() {
            idx[p] += 1;
            if idx[p] < dims[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    out
}

/// `E[U]` by summing probability times payoff over every pure profile.
pub fn expectation(values: &[f64], dims: &[usize], dists: &[Vec<f64>]) -> f64 {
    profiles(dims)
        .iter()
        .zip(values)
        .map(|(pure, v)| v * pure.iter().enumerate().map(|(p, &a)| dists[p][a]).product::<f64>())
        .sum()
}

fn with_pure(dists: &[Vec<f64>], p: usize, a: usize, k: usize) -> Vec<Vec<f64>> {
    let mut d = dists.to_vec();
    d[p] = (0..k).map(|j| if j == a { 1.0 } else { 0.0 }).collect();
    d
}

/// Expected payoff of each pure action of player `p` against the others.
pub fn deviation_values(values: &[f64], dims: &[usize], dists: &[Vec<f64>], p: usize) -> Vec<f64> {
    (0..dims[p])
        .map(|a| expectation(values, dims, &with_pure(dists, p, a, dims[p])))
        .collect()
}

/// `(minimizer gap, maximizer gap)`: the first `n_min` players minimize.
pub fn ne_gaps(values: &[f64], dims: &[usize], n_min: usize, dists: &[Vec<f64>]) -> (f64, f64) {
    let u = expectation(values, dims, dists);
    let mut team = f64::NEG_INFINITY;
    let mut adv = f64::NEG_INFINITY;
    for p in 0..dims.len() {
        let dev = deviation_values(values, dims, dists, p);
        if p < n_min {
            team = team.max(u - dev.iter().cloned().fold(f64::INFINITY, f64::min));
        } else {
            adv = adv.max(dev.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - u);
        }
    }
    (team, adv)
}

/// `min c·x` over `x >= 0`, `ge_rows x >= ge_rhs`, `eq_rows x = eq_rhs` by
/// enumerating every basic solution. `None` if infeasible. Only valid when the
/// LP is bounded.
pub fn vertex_min(
    c: &[f64],
    ge_rows: &[Vec<f64>],
    ge_rhs: &[f64],
    eq_rows: &[Vec<f64>],
    eq_rhs: &[f64],
) -> Option<f64> {
    let n = c.len();
    // candidate tight constraints: ge rows, then x_j = 0
    let mut rows: Vec<(Vec<f64>, f64)> = ge_rows.iter().cloned().zip(ge_rhs.iter().cloned()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, 0.0));
    }
    let need = n - eq_rows.len();
    let mut best: Option<f64> = None;
    for subset in combinations(rows.len(), need) {
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        for (r, (row, rhs)) in eq_rows.iter().zip(eq_rhs).enumerate() {
            for j in 0..n {
                a[(r, j)] = row[j];
            }
            b[r] = *rhs;
        }
        for (k, &s) in subset.iter().enumerate() {
            let r = eq_rows.len() + k;
            for j in 0..n {
                a[(r, j)] = rows[s].0[j];
            }
            b[r] = rows[s].1;
        }
        let Some(x) = a.lu().solve(&b) else { continue };
        let feasible = x.iter().all(|&v| v >= -1e-9)
            && ge_rows
                .iter()
                .zip(ge_rhs)
                .all(|(row, &rhs)| row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() >= rhs - 1e-9)
            && eq_rows
                .iter()
                .zip(eq_rhs)
                .all(|(row, &rhs)| (row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() - rhs).abs() <= 1e-9);
        if feasible {
            let v: f64 = c.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Value of the zero-sum game where rows minimize `m[r][c]`, by support
/// enumeration over equal-size supports (valid for nondegenerate games; the
/// equilibrium found is checked before it is accepted).
pub fn support_enum_value(m: &[Vec<f64>]) -> Option<f64> {
    let (r, c) = (m.len(), m[0].len());
    for k in 1..=r.min(c) {
        for rs in combinations(r, k) {
            for cs in combinations(c, k) {
                // column strategy y on cs making the rows in rs indifferent at v
                let solve = |rows: &[usize], cols: &[usize], transpose: bool| -> Option<Vec<f64>> {
                    let mut a = DMatrix::zeros(k + 1, k + 1);
                    let mut b = DVector::zeros(k + 1);
                    for (i, &ri) in rows.iter().enumerate() {
                        for (j, &cj) in cols.iter().enumerate() {
                            a[(i, j)] = if transpose { m[cj][ri] } else { m[ri][cj] };
                        }
                        a[(i, k)] = -1.0;
                    }
                    for j in 0..k {
                        a[(k, j)] = 1.0;
                    }
                    b[k] = 1.0;
                    let s = a.lu().solve(&b)?;
                    Some(s.iter().cloned().collect())
                };
                let Some(ys) = solve(&rs, &cs, false) else { continue };
                let Some(xs) = solve(&cs, &rs, true) else { continue };
                if ys[..k].iter().chain(&xs[..k]).any(|&p| p < -1e-12) {
                    continue;
                }
                let mut x = vec![0.0; r];
                let mut y = vec![0.0; c];
                for (i, &ri) in rs.iter().enumerate() {
                    x[ri] = xs[i];
                }
                for (j, &cj) in cs.iter().enumerate() {
                    y[cj] = ys[j];
                }
                let v = ys[k];
                let row_vals: Vec<f64> = (0..r).map(|i| (0..c).map(|j| m[i][j] * y[j]).sum()).collect();
                let col_vals: Vec<f64> = (0..c).map(|j| (0..r).map(|i| m[i][j] * x[i]).sum()).collect();
                // rows minimize: no row below v; columns maximize: no column above v
                if row_vals.iter().all(|&u| u >= v - 1e-9) && col_vals.iter().all(|&u| u <= v + 1e-9) {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Points of the simplex over `k` actions on the grid with spacing `1/steps`.
pub fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, steps: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            return;
        }
        for take in 0..=left {
            cur[i] = take;
            rec(i + 1, left - take, cur, steps, out);
        }
    }
    rec(0, steps, &mut cur, steps, &mut out);
    out
}

/// Points of the simplex grid with spacing `1 / steps` within `radius`
/// (max-norm) of `center`, enumerated without building the full grid.
pub fn local_simplex_grid(center: &[f64], radius: f64, steps: usize) -> Vec<Vec<f64>> {
    let k = center.len();
    let s = steps as f64;
    let range = |c: f64| {
        let lo = ((c - radius) * s).ceil().max(0.0) as usize;
        let hi = ((c + radius) * s).floor().min(s) as usize;
        (lo, hi)
    };
    let mut out = Vec::new();
    fn rec(i: usize, used: usize, cur: &mut Vec<usize>, steps: usize, ranges: &[(usize, usize)], out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            let last = steps - used;
            if (ranges[i].0..=ranges[i].1).contains(&last) {
                cur[i] = last;
                out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            }
            return;
        }
        let (lo, hi) = ranges[i];
        for take in lo..=hi.min(steps - used) {
            cur[i] = take;
            rec(i + 1, used + take, cur, steps, ranges, out);
        }
    }
    let ranges: Vec<(usize, usize)> = center.iter().map(|&c| range(c)).collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return out;
    }
    rec(0, 0, &mut vec![0; k], steps, &ranges, &mut out);
    out
}

/// Minimum of `f` over the product of simplex grids, optionally restricted
/// to points within `box_radius` (max-norm) of `around`.
pub fn product_grid_min(
    sizes: &[usize],
    steps: usize,
    around: Option<(&[Vec<f64>], f64)>,
    f: &dyn Fn(&[Vec<f64>]) -> f64,
) -> (f64, Vec<Vec<f64>>) {
    let grids: Vec<Vec<Vec<f64>>> = sizes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            match around {
                Some((c, r)) => local_simplex_grid(&c[i], r, steps),
                None => simplex_grid(k, steps),
            }
        })
        .collect();
    let lens: Vec<usize> = grids.iter().map(|g| g.len()).collect();
    let mut best = (f64::INFINITY, Vec::new());
    if lens.contains(&0) {
        return best;
    }
    for idx in profiles(&lens) {
        let x: Vec<Vec<f64>> = idx.iter().zip(&grids).map(|(&i, g)| g[i].clone()).collect();
        let v = f(&x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

/// `max_b U(x, b) + ell ‖x - center‖²` by enumeration.
pub fn prox_objective(values: &[f64], dims: &[usize], center: &[Vec<f64>], ell: f64, x: &[Vec<f64>]) -> f64 {
    let nb = *dims.last().unwrap();
    let mut best = f64::NEG_INFINITY;
    for b in 0..nb {
        let mut d = x.to_vec();
        d.push((0..nb).map(|c| if c == b { 1.0 } else { 0.0 }).collect());
        best = best.max(expectation(values, dims, &d));
    }
    let dist: f64 = x
        .iter()
        .zip(center)
        .map(|(a, c)| a.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
        .sum();
    best + ell * dist
}
