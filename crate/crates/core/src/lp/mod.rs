//! Linear programs over nonnegative variables and a dense two-phase
//! primal simplex solver.
//!
//! [`canonical`] turns problems with free or lower-bounded variables into
//! the nonnegative form [`LpProblem`] that [`solve_lp`] accepts, and maps
//! solutions back.

pub mod canonical;
pub mod dump;
mod simplex;

use ndarray::Array2;

pub use canonical::{canonicalize, Bound, RawConstraint, RawLp, VarMap};
pub use simplex::{solve_lp, Pricing, SimplexSolver};

use crate::error::{Error, Result};

/// Tolerance used when checking a returned optimum against its constraints.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `a . x >= rhs`
    Ge,
    /// `a . x <= rhs`
    Le,
    /// `a . x == rhs`
    Eq,
}

/// `minimize cost . x` subject to `rows[i] . x (sense[i]) rhs[i]` and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub rows: Array2<f64>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
}

impl LpProblem {
    pub fn new(cost: Vec<f64>, rows: Array2<f64>, senses: Vec<Sense>, rhs: Vec<f64>) -> Result<Self> {
        if rows.ncols() != cost.len() {
            return Err(Error::Shape {
                expected: cost.len(),
                got: rows.ncols(),
            });
        }
        if senses.len() != rows.nrows() {
            return Err(Error::Shape {
                expected: rows.nrows(),
                got: senses.len(),
            });
        }
        if rhs.len() != rows.nrows() {
            return Err(Error::Shape {
                expected: rows.nrows(),
                got: rhs.len(),
            });
        }
        Ok(Self {
            cost,
            rows,
            senses,
            rhs,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any constraint or nonnegativity bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0_f64, |w, &v| w.max(-v));
        for (i, row) in self.rows.outer_iter().enumerate() {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let viol = match self.senses[i] {
                Sense::Ge => self.rhs[i] - lhs,
                Sense::Le => lhs - self.rhs[i],
                Sense::Eq => (lhs - self.rhs[i]).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal vertex, or the last basic feasible point when unbounded.
    /// Empty when infeasible.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Direction of unbounded descent when `status` is `Unbounded`.
    pub ray: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub x: Vec<f64>,
    pub objective: f64,
}
