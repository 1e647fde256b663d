use ndarray::Array2;

use super::{LpProblem, Sense};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    NonNegative,
    Free,
    /// `x >= lower`
    Lower(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawConstraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// LP in user coordinates: arbitrary lower bounds and free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLp {
    pub cost: Vec<f64>,
    pub bounds: Vec<Bound>,
    pub constraints: Vec<RawConstraint>,
}

impl RawLp {
    pub fn new(cost: Vec<f64>, bounds: Vec<Bound>) -> Result<Self> {
        if cost.len() != bounds.len() {
            return Err(Error::Shape {
                expected: cost.len(),
                got: bounds.len(),
            });
        }
        Ok(Self {
            cost,
            bounds,
            constraints: Vec::new(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn push(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Result<()> {
        if coeffs.len() != self.n_vars() {
            return Err(Error::Shape {
                expected: self.n_vars(),
                got: coeffs.len(),
            });
        }
        self.constraints.push(RawConstraint { coeffs, sense, rhs });
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of constraints and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (b, &v) in self.bounds.iter().zip(x) {
            worst = worst.max(match *b {
                Bound::NonNegative => -v,
                Bound::Free => 0.0,
                Bound::Lower(l) => l - v,
            });
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            worst = worst.max(match c.sense {
                Sense::Ge => c.rhs - lhs,
                Sense::Le => lhs - c.rhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            });
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mapping {
    Direct(usize),
    Shifted { col: usize, lower: f64 },
    Split { pos: usize, neg: usize },
}

/// How raw variables are recovered from canonical ones.
#[derive(Debug, Clone, PartialEq)]
pub struct VarMap {
    mappings: Vec<Mapping>,
    /// Constant dropped from the objective by shifting lower bounds.
    pub objective_offset: f64,
}

impl VarMap {
    pub fn reconstruct(&self, x: &[f64]) -> Vec<f64> {
        self.mappings
            .iter()
            .map(|m| match *m {
                Mapping::Direct(c) => x[c],
                Mapping::Shifted { col, lower } => lower + x[col],
                Mapping::Split { pos, neg } => x[pos] - x[neg],
            })
            .collect()
    }

    /// Canonical column holding the nonnegative part of raw variable `j`.
    pub fn column(&self, j: usize) -> usize {
        match self.mappings[j] {
            Mapping::Direct(c) => c,
            Mapping::Shifted { col, .. } => col,
            Mapping::Split { pos, .. } => pos,
        }
    }
}

/// Splits free variables into differences of nonnegative ones and shifts
/// lower-bounded variables to zero.
pub fn canonicalize(raw: &RawLp) -> Result<(LpProblem, VarMap)> {
    let mut mappings = Vec::with_capacity(raw.n_vars());
    let mut next = 0;
    for b in &raw.bounds {
        let m = match *b {
            Bound::NonNegative => Mapping::Direct(next),
            Bound::Lower(lower) => {
                if !lower.is_finite() {
                    return Err(Error::InvalidConfig(format!("lower bound must be finite, got {lower}")));
                }
                Mapping::Shifted { col: next, lower }
            }
            Bound::Free => {
                next += 1;
                Mapping::Split {
                    pos: next - 1,
                    neg: next,
                }
            }
        };
        next += 1;
        mappings.push(m);
    }
    let n = next;

    let mut cost = vec![0.0; n];
    let mut objective_offset = 0.0;
    for (j, m) in mappings.iter().enumerate() {
        let c = raw.cost[j];
        match *m {
            Mapping::Direct(col) => cost[col] = c,
            Mapping::Shifted { col, lower } => {
                cost[col] = c;
                objective_offset += c * lower;
            }
            Mapping::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }

    let m_rows = raw.constraints.len();
    let mut rows = Array2::zeros((m_rows, n));
    let mut rhs = Vec::with_capacity(m_rows);
    let mut senses = Vec::with_capacity(m_rows);
    for (i, con) in raw.constraints.iter().enumerate() {
        let mut r = con.rhs;
        for (j, m) in mappings.iter().enumerate() {
            let a = con.coeffs[j];
            if a == 0.0 {
                continue;
            }
            match *m {
                Mapping::Direct(col) => rows[[i, col]] = a,
                Mapping::Shifted { col, lower } => {
                    rows[[i, col]] = a;
                    r -= a * lower;
                }
                Mapping::Split { pos, neg } => {
                    rows[[i, pos]] = a;
                    rows[[i, neg]] = -a;
                }
            }
        }
        rhs.push(r);
        senses.push(con.sense);
    }
    let problem = LpProblem::new(cost, rows, senses, rhs)?;
    Ok((
        problem,
        VarMap {
            mappings,
            objective_offset,
        },
    ))
}
