//! Operator-splitting solver for the moment programs.
//!
//! Scaled ADMM on the split `X = V` with `X` in the affine set of moment
//! matrices (plus the linear objective) and `V` in the PSD cone. The affine
//! step is an exact weighted projection: averaging over the entries that
//! share a key, then Dykstra's method over the few linear side constraints.
//! The cone step is an eigendecomposition.

use serde::{Deserialize, Serialize};

use super::system::Layout;
use crate::linalg;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveParams {
    pub max_iters: usize,
    /// Target Frobenius distance between the affine iterate and the PSD
    /// cone; also the tolerance on the dual residual.
    pub tol: f64,
    /// Seeds the small perturbation of a cold start.
    pub seed: u64,
    pub mode: SolveMode,
}

/// What the solver does with the objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Maximize the objective, then check it against the floor.
    #[default]
    Maximize,
    /// Find any point meeting the floor; the objective becomes a constraint.
    Feasibility,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams { max_iters: 50_000, tol: 1e-6, seed: 0, mode: SolveMode::Maximize }
    }
}

const RELAX: f64 = 1.5;
const BALANCE_EVERY: usize = 25;
const STALL_WINDOW: usize = 500;
const INFEASIBLE_GAP: f64 = 1e-3;
const FEASIBILITY_CHECK_EVERY: usize = 25;

pub(crate) struct Cons {
    pub terms: Vec<(u32, f64)>,
    pub rhs: f64,
    pub equality: bool,
}

pub(crate) struct Problem<'a> {
    pub layout: &'a Layout,
    /// Per-key objective coefficients (maximized).
    pub objective: Vec<f64>,
    pub pinned: Vec<Option<f64>>,
    pub constraints: Vec<Cons>,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub y: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub infeasible: bool,
    pub min_eigenvalue: f64,
    pub objective: f64,
    pub violation: f64,
}

impl Problem<'_> {
    fn has_objective(&self) -> bool {
        self.objective.iter().any(|&c| c != 0.0)
    }

    /// Weighted projection of the key averages `y` onto pins and side
    /// constraints.
    fn project_keys(&self, y: &mut [f64], corr: &mut [Vec<f64>]) {
        for (k, p) in self.pinned.iter().enumerate() {
            if let Some(v) = p {
                y[k] = *v;
            }
        }
        if self.constraints.is_empty() {
            return;
        }
        let m = &self.layout.mult;
        corr.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v = 0.0));
        let sweeps = if self.constraints.len() == 1 { 1 } else { 200 };
        for _ in 0..sweeps {
            let mut moved = 0.0f64;
            for (c, cr) in self.constraints.iter().zip(corr.iter_mut()) {
                for ((k, _), d) in c.terms.iter().zip(cr.iter()) {
                    y[*k as usize] += d;
                }
                let lhs: f64 = c.terms.iter().map(|&(k, a)| a * y[k as usize]).sum();
                let viol = lhs - c.rhs;
                let lam = if c.equality || viol > 0.0 {
                    let norm: f64 = c.terms.iter().map(|&(k, a)| a * a / m[k as usize]).sum();
                    if norm > 0.0 { viol / norm } else { 0.0 }
                } else {
                    0.0
                };
                for ((k, a), d) in c.terms.iter().zip(cr.iter_mut()) {
                    let step = lam * a / m[*k as usize];
                    y[*k as usize] -= step;
                    moved = moved.max((step - *d).abs());
                    *d = step;
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
    }

    pub fn violation(&self, y: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let v = c.terms.iter().map(|&(k, a)| a * y[k as usize]).sum::<f64>() - c.rhs;
                if c.equality { v.abs() } else { v.max(0.0) }
            })
            .fold(0.0, f64::max)
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// Runs ADMM from the key values `y0`.
    pub fn solve(&self, y0: &[f64], params: &SolveParams) -> Result<Outcome> {
        let lay = self.layout;
        let side = lay.side();
        let nk = lay.table.keys.len();
        if y0.len() != nk {
            return Err(Error::param("warm start has the wrong number of moments"));
        }
        let m = &lay.mult;
        let with_obj = self.has_objective();
        let cmax = self.objective.iter().zip(m).map(|(c, mk)| c.abs() / mk).fold(0.0, f64::max);
        let mut t = if with_obj { 0.05 / cmax } else { 1.0 };

        let mut y = y0.to_vec();
        let mut corr: Vec<Vec<f64>> = self.constraints.iter().map(|c| vec![0.0; c.terms.len()]).collect();
        self.project_keys(&mut y, &mut corr);
        let mut x = vec![0.0; side * side];
        let mut v = vec![0.0; side * side];
        lay.assemble(&y, &mut v);
        let mut u = vec![0.0; side * side];
        let mut w = vec![0.0; side * side];
        let mut sums = vec![0.0; nk];

        let (mut r, mut s) = (f64::INFINITY, f64::INFINITY);
        let mut converged = false;
        let mut infeasible = false;
        let (mut window_best, mut prev_window_best) = (f64::INFINITY, f64::INFINITY);
        let mut iters = 0;
        for k in 1..=params.max_iters.max(1) {
            iters = k;
            for i in 0..side * side {
                w[i] = v[i] - u[i];
            }
            lay.key_sums(&w, &mut sums);
            for key in 0..nk {
                y[key] = (sums[key] + t * self.objective[key]) / m[key];
            }
            self.project_keys(&mut y, &mut corr);
            lay.assemble(&y, &mut x);
            // v <- Π(x̂ + u), u <- u + x̂ - v, with x̂ = α x + (1 - α) v
            let mut dv = 0.0;
            let mut rr = 0.0;
            for i in 0..side * side {
                let xh = RELAX * x[i] + (1.0 - RELAX) * v[i];
                w[i] = xh + u[i];
                u[i] += xh;
            }
            linalg::psd_project(side, &mut w)?;
            for i in 0..side * side {
                u[i] -= w[i];
                dv += (w[i] - v[i]) * (w[i] - v[i]);
                rr += (x[i] - w[i]) * (x[i] - w[i]);
            }
            std::mem::swap(&mut v, &mut w);
            r = rr.sqrt();
            s = dv.sqrt() / t;
            if r <= params.tol && (!with_obj || s <= params.tol) {
                converged = true;
                break;
            }
            // without an objective any feasible point will do, so test the
            // affine iterate directly
            if !with_obj && k % FEASIBILITY_CHECK_EVERY == 0 && self.violation(&y) <= params.tol {
                let mut mat = vec![0.0; side * side];
                lay.assemble(&y, &mut mat);
                if linalg::min_eigenvalue(side, &mat)? >= -params.tol {
                    converged = true;
                    break;
                }
            }
            window_best = window_best.min(r);
            // a flat primal residual only signals a stall when there is no
            // objective still moving the iterate
            if !with_obj && k % STALL_WINDOW == 0 {
                // no progress over a whole window: stop, and call it infeasible
                // only when the gap to the cone is far above tolerance
                if k >= 2 * STALL_WINDOW && window_best > 0.98 * prev_window_best {
                    infeasible = window_best > INFEASIBLE_GAP;
                    break;
                }
                prev_window_best = window_best;
                window_best = f64::INFINITY;
            }
            if with_obj && k % BALANCE_EVERY == 0 {
                let scale = if r > 10.0 * s {
                    0.5
                } else if s > 10.0 * r {
                    2.0
                } else {
                    1.0
                };
                if scale != 1.0 {
                    t *= scale;
                    u.iter_mut().for_each(|e| *e *= scale);
                }
            }
        }
        let mut mat = vec![0.0; side * side];
        lay.assemble(&y, &mut mat);
        let min_eigenvalue = linalg::min_eigenvalue(side, &mat)?;
        log::debug!("admm: {iters} iterations, primal {r:.3e}, dual {s:.3e}, converged {converged}");
        Ok(Outcome {
            objective: self.objective_value(&y),
            violation: self.violation(&y),
            y,
            iterations: iters,
            converged,
            infeasible,
            min_eigenvalue,
        })
    }
}
