//! Mehrotra predictor-corrector interior-point method for small dense QPs
//!
//! ```text
//! minimize    ½ zᵀ diag(h) z + c·z
//! subject to  A z = b,  G z <= g
//! ```
//!
//! Used only by the proximal solver, whose certificates never depend on the
//! accuracy of this routine: a loose solve slows convergence but cannot
//! produce a wrong bound.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, solve_in_place};

#[derive(Debug, Clone)]
pub(crate) struct Qp {
    pub hess_diag: Vec<f64>,
    pub linear: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ineq_rows: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct QpSolution {
    pub z: Vec<f64>,
    pub ineq_dual: Vec<f64>,
    pub converged: bool,
}

const MAX_ITERS: usize = 80;
const TOL: f64 = 1e-11;

/// `z0` is a starting point; it need not satisfy any constraint.
pub(crate) fn solve_qp(qp: &Qp, z0: &[f64]) -> QpSolution {
    let nz = qp.linear.len();
    let ne = qp.eq_rows.len();
    let ni = qp.ineq_rows.len();
    let scale = 1.0
        + qp.linear.iter().chain(&qp.ineq_rhs).chain(&qp.eq_rhs).fold(0.0f64, |a, v| a.max(v.abs()))
        + qp.hess_diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut z = z0.to_vec();
    let mut nu = vec![0.0; ne];
    let mut s: Vec<f64> = (0..ni)
        .map(|k| (qp.ineq_rhs[k] - dot(&qp.ineq_rows[k], &z)).max(1.0))
        .collect();
    let mut lam = vec![1.0; ni];

    let mut converged = false;
    for _ in 0..MAX_ITERS {
        // residuals
        let mut r_d: Vec<f64> = (0..nz).map(|j| qp.hess_diag[j] * z[j] + qp.linear[j]).collect();
        for (row, v) in qp.eq_rows.iter().zip(&nu) {
            for j in 0..nz {
                r_d[j] += row[j] * v;
            }
        }
        for (row, l) in qp.ineq_rows.iter().zip(&lam) {
            for j in 0..nz {
                r_d[j] += row[j] * l;
            }
        }
        let r_e: Vec<f64> = (0..ne).map(|k| dot(&qp.eq_rows[k], &z) - qp.eq_rhs[k]).collect();
        let r_i: Vec<f64> = (0..ni)
            .map(|k| dot(&qp.ineq_rows[k], &z) + s[k] - qp.ineq_rhs[k])
            .collect();
        let mu = if ni > 0 { dot(&s, &lam) / ni as f64 } else { 0.0 };
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if inf(&r_d).max(inf(&r_e)).max(inf(&r_i)) <= TOL * scale && mu <= TOL * scale {
            converged = true;
            break;
        }

        // reduced matrix K = H + Gᵀ (Λ/S) G, assembled once per iteration
        let dim = nz + ne;
        let mut kkt = vec![0.0; dim * dim];
        for j in 0..nz {
            kkt[j * dim + j] = qp.hess_diag[j];
        }
        for k in 0..ni {
            let w = lam[k] / s[k];
            let row = &qp.ineq_rows[k];
            for a in 0..nz {
                if row[a] == 0.0 {
                    continue;
                }
                for b in 0..nz {
                    kkt[a * dim + b] += w * row[a] * row[b];
                }
            }
        }
        for (e, row) in qp.eq_rows.iter().enumerate() {
            for j in 0..nz {
                kkt[(nz + e) * dim + j] = row[j];
                kkt[j * dim + nz + e] = row[j];
            }
        }

        let direction = |r_c: &[f64]| -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
            let mut rhs = vec![0.0; dim];
            for j in 0..nz {
                rhs[j] = -r_d[j];
            }
            for k in 0..ni {
                // -Gᵀ S⁻¹ (-r_c + Λ r_i)
                let t = (-r_c[k] + lam[k] * r_i[k]) / s[k];
                for j in 0..nz {
                    rhs[j] -= qp.ineq_rows[k][j] * t;
                }
            }
            for e in 0..ne {
                rhs[nz + e] = -r_e[e];
            }
            let mut m = kkt.clone();
            if !solve_in_place(&mut m, dim, &mut rhs) {
                return None;
            }
            let dz = rhs[..nz].to_vec();
            let dnu = rhs[nz..].to_vec();
            let ds: Vec<f64> = (0..ni).map(|k| -r_i[k] - dot(&qp.ineq_rows[k], &dz)).collect();
            let dl: Vec<f64> = (0..ni).map(|k| (-r_c[k] - lam[k] * ds[k]) / s[k]).collect();
            Some((dz, dnu, ds, dl))
        };
        let max_step = |v: &[f64], dv: &[f64]| -> f64 {
            v.iter()
                .zip(dv)
                .filter(|(_, d)| **d < 0.0)
                .fold(1.0f64, |a, (x, d)| a.min(-x / d))
        };

        // predictor
        let r_c: Vec<f64> = (0..ni).map(|k| s[k] * lam[k]).collect();
        let Some((_, _, ds_a, dl_a)) = direction(&r_c) else {
            break;
        };
        let a_p = max_step(&s, &ds_a);
        let a_d = max_step(&lam, &dl_a);
        let mu_aff = if ni > 0 {
            (0..ni)
                .map(|k| (s[k] + a_p * ds_a[k]) * (lam[k] + a_d * dl_a[k]))
                .sum::<f64>()
                / ni as f64
        } else {
            0.0
        };
        let sigma = if mu > 0.0 { (mu_aff / mu).powi(3).min(1.0) } else { 0.0 };

        // corrector
        let r_c: Vec<f64> = (0..ni)
            .map(|k| s[k] * lam[k] + ds_a[k] * dl_a[k] - sigma * mu)
            .collect();
        let Some((dz, dnu, ds, dl)) = direction(&r_c) else {
            break;
        };
        let a_p = (0.99 * max_step(&s, &ds)).min(1.0);
        let a_d = (0.99 * max_step(&lam, &dl)).min(1.0);
        let a = a_p.min(a_d);
        for j in 0..nz {
            z[j] += a * dz[j];
        }
        for e in 0..ne {
            nu[e] += a * dnu[e];
        }
        for k in 0..ni {
            s[k] += a * ds[k];
            lam[k] += a * dl[k];
        }
    }
    QpSolution {
        z,
        ineq_dual: lam,
        converged,
    }
}
