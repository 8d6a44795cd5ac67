//! A small dense linear-programming solver: two-phase primal simplex on
//! equality-form problems `min c'x  s.t.  Ax = b, x >= 0`.
//!
//! Pivoting follows Bland's rule (lowest eligible entering index; leaving
//! row by minimum ratio with ties broken by lowest basic-variable index),
//! which rules out cycling and makes every solve bit-reproducible. Built for
//! the moderate instances produced by the robustness module (hundreds of
//! rows, tens of thousands of columns at the largest), where a dense tableau
//! is simpler and fast enough.

use crate::error::{Error, Result};

/// Feasibility/optimality tolerance of the solver.
pub const LP_EPS: f64 = 1e-9;

/// Equality-form linear program `min objective . x  s.t.  constraints x =
/// rhs, x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let nv = objective.len();
        if nv == 0 {
            return Err(Error::InvalidParameter("LP needs at least one variable".into()));
        }
        if constraints.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                context: "LP constraint/rhs count",
                expected: constraints.len(),
                got: rhs.len(),
            });
        }
        for row in &constraints {
            if row.len() != nv {
                return Err(Error::DimensionMismatch {
                    context: "LP constraint row length",
                    expected: nv,
                    got: row.len(),
                });
            }
        }
        let finite = objective.iter().chain(rhs.iter()).all(|v| v.is_finite())
            && constraints.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("LP entries must be finite".into()));
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at the optimum; meaningful only for `Optimal`.
    pub objective_value: f64,
    /// Primal solution; meaningful only for `Optimal`.
    pub x: Vec<f64>,
}

struct Tableau {
    /// `rows x (ncols + 1)`; last column is the right-hand side.
    a: Vec<Vec<f64>>,
    /// Reduced-cost row for the phase being pivoted, plus negated objective
    /// value in the rhs slot.
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    basis: Vec<usize>,
    nv: usize,
    ncols: usize,
    pivots: usize,
    pivot_cap: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.pivot_cap {
            return Err(Error::Numerical(format!(
                "simplex pivot cap {} exceeded (degeneracy)",
                self.pivot_cap
            )));
        }
        let piv = self.a[row][col];
        let inv = 1.0 / piv;
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        self.a[row][col] = 1.0; // kill rounding residue on the pivot itself
        for r in 0..self.a.len() {
            if r == row {
                continue;
            }
            let factor = self.a[r][col];
            if factor != 0.0 {
                let (pivot_row, target_row) = if r < row {
                    let (lo, hi) = self.a.split_at_mut(row);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = self.a.split_at_mut(r);
                    (&lo[row], &mut hi[0])
                };
                for (t, p) in target_row.iter_mut().zip(pivot_row.iter()) {
                    *t -= factor * p;
                }
                target_row[col] = 0.0;
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            let factor = cost[col];
            if factor != 0.0 {
                for (t, p) in cost.iter_mut().zip(self.a[row].iter()) {
                    *t -= factor * p;
                }
                cost[col] = 0.0;
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Bland entering rule on the given cost row, restricted to columns
    /// `< col_limit`. Returns `None` when optimal.
    fn entering(&self, phase1: bool, col_limit: usize) -> Option<usize> {
        let cost = if phase1 { &self.cost1 } else { &self.cost2 };
        (0..col_limit).find(|&j| cost[j] < -LP_EPS)
    }

    /// Bland leaving rule: minimum ratio, ties to the lowest basic index.
    /// Returns `None` when the column is unbounded below.
    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis idx, row)
        for r in 0..self.a.len() {
            let coef = self.a[r][col];
            if coef > LP_EPS {
                let ratio = self.a[r][self.ncols] / coef;
                let key = (ratio, self.basis[r], r);
                best = match best {
                    None => Some(key),
                    Some(cur) => {
                        if key.0 < cur.0 - LP_EPS
                            || (key.0 < cur.0 + LP_EPS && key.1 < cur.1)
                        {
                            Some(key)
                        } else {
                            Some(cur)
                        }
                    }
                };
            }
        }
        best.map(|(_, _, r)| r)
    }
}

/// Solves the program with the two-phase simplex method. Statuses:
/// `Optimal` (with solution), `Infeasible`, `Unbounded`. Degenerate cycling
/// cannot occur under Bland's rule, but a pivot cap still guards against
/// pathological stalling and reports it as a numerical failure.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let nv = lp.num_vars();
    let nr = lp.num_constraints();
    if nr == 0 {
        // No constraints: optimum is 0 at x = 0 unless some cost is
        // negative, in which case that coordinate is unbounded below.
        if lp.objective.iter().any(|&c| c < -LP_EPS) {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective_value: f64::NEG_INFINITY,
                x: vec![0.0; nv],
            });
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            objective_value: 0.0,
            x: vec![0.0; nv],
        });
    }

    let ncols = nv + nr; // artificials occupy columns nv..nv+nr
    let mut a = vec![vec![0.0; ncols + 1]; nr];
    for r in 0..nr {
        let flip = if lp.rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..nv {
            a[r][c] = flip * lp.constraints[r][c];
        }
        a[r][nv + r] = 1.0;
        a[r][ncols] = flip * lp.rhs[r];
    }

    // Phase-1 reduced costs relative to the all-artificial basis:
    // d_j = -sum_r a[r][j] for real columns, 0 for artificials; the negated
    // objective value (= -sum of rhs) rides in the rhs slot.
    let mut cost1 = vec![0.0; ncols + 1];
    for j in 0..nv {
        cost1[j] = -(0..nr).map(|r| a[r][j]).sum::<f64>();
    }
    cost1[ncols] = -(0..nr).map(|r| a[r][ncols]).sum::<f64>();
    // Phase-2 reduced costs: artificials cost 0 in this phase and the basis
    // costs are all 0, so the row starts as the raw objective.
    let mut cost2 = vec![0.0; ncols + 1];
    cost2[..nv].copy_from_slice(&lp.objective);

    let mut t = Tableau {
        a,
        cost1,
        cost2,
        basis: (nv..nv + nr).collect(),
        nv,
        ncols,
        pivots: 0,
        pivot_cap: 1000 + 50 * (nr + ncols),
    };

    // Phase 1: drive the artificial mass to zero.
    while let Some(col) = t.entering(true, t.ncols) {
        let Some(row) = t.leaving(col) else {
            // Phase-1 objective is bounded below by 0; no unbounded column
            // can appear. Treat as numerical breakdown.
            return Err(Error::Numerical("phase-1 column with no pivot row".into()));
        };
        t.pivot(row, col)?;
    }
    let phase1_value = -t.cost1[t.ncols];
    if phase1_value > 1e-7 {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective_value: f64::NAN,
            x: vec![0.0; nv],
        });
    }

    // Remove artificials from the basis: pivot them out on any real column
    // with a nonzero coefficient, or drop the row as redundant.
    let mut r = 0;
    while r < t.a.len() {
        if t.basis[r] >= t.nv {
            let col = (0..t.nv).find(|&j| t.a[r][j].abs() > LP_EPS);
            match col {
                Some(c) => t.pivot(r, c)?,
                None => {
                    t.a.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 on the real columns only.
    while let Some(col) = t.entering(false, t.nv) {
        let Some(row) = t.leaving(col) else {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective_value: f64::NEG_INFINITY,
                x: vec![0.0; nv],
            });
        };
        t.pivot(row, col)?;
    }

    let mut x = vec![0.0; nv];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < nv {
            x[b] = t.a[r][t.ncols].max(0.0);
        }
    }
    let objective_value = lp
        .objective
        .iter()
        .zip(x.iter())
        .map(|(c, v)| c * v)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value,
        x,
    })
}
