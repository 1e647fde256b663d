//! Helpers shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use sdr_svm::lp::{LpProblem, LpStatus, Sense, SimplexSolver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Small integer LP: 1..=6 variables, 1..=6 constraints, mixed senses.
pub fn random_lp<R: Rng>(rng: &mut R) -> LpProblem {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(1..=6);
    let cost = (0..n).map(|_| rng.random_range(-2..=5) as f64).collect();
    let rows = Array2::from_shape_fn((m, n), |_| {
        if rng.random::<f64>() < 0.2 {
            0.0
        } else {
            rng.random_range(-3..=5) as f64
        }
    });
    let senses = (0..m)
        .map(|_| match rng.random_range(0..10) {
            0..=5 => Sense::Le,
            6..=8 => Sense::Ge,
            _ => Sense::Eq,
        })
        .collect();
    let rhs = (0..m).map(|_| rng.random_range(-2..=10) as f64).collect();
    LpProblem::new(cost, rows, senses, rhs).unwrap()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum of `cost . x` over the vertices of the polyhedron, or `None` when
/// it has no vertex (empty, since `x >= 0` makes it pointed).
fn best_vertex(cost: &[f64], rows: &[Vec<f64>], senses: &[Sense], rhs: &[f64]) -> Option<f64> {
    let n = cost.len();
    let m = rows.len();
    // Hyperplanes 0..m are the constraints, m..m+n the bounds x_j = 0.
    let plane = |h: usize| -> (Vec<f64>, f64) {
        if h < m {
            (rows[h].clone(), rhs[h])
        } else {
            let mut e = vec![0.0; n];
            e[h - m] = 1.0;
            (e, 0.0)
        }
    };
    let mut best: Option<f64> = None;
    for set in combinations(m + n, n) {
        let (a, b): (Vec<_>, Vec<_>) = set.iter().map(|&h| plane(h)).unzip();
        let Some(x) = solve_square(a, b) else { continue };
        let tol = 1e-9;
        if x.iter().any(|&v| v < -tol) {
            continue;
        }
        let feasible = (0..m).all(|i| {
            let lhs: f64 = rows[i].iter().zip(&x).map(|(a, v)| a * v).sum();
            match senses[i] {
                Sense::Le => lhs <= rhs[i] + tol,
                Sense::Ge => lhs >= rhs[i] - tol,
                Sense::Eq => (lhs - rhs[i]).abs() <= tol,
            }
        });
        if feasible {
            let obj: f64 = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

/// Vertex enumeration. Unboundedness is decided on the recession cone
/// `{d >= 0, A d (sense) 0, sum d = 1}`: the problem is unbounded iff some
/// such direction has negative cost.
pub fn brute_force(p: &LpProblem) -> Oracle {
    let rows: Vec<Vec<f64>> = p.rows.outer_iter().map(|r| r.to_vec()).collect();
    let Some(opt) = best_vertex(&p.cost, &rows, &p.senses, &p.rhs) else {
        return Oracle::Infeasible;
    };
    let mut cone_rows = rows.clone();
    cone_rows.push(vec![1.0; p.n_vars()]);
    let mut cone_senses = p.senses.clone();
    cone_senses.push(Sense::Eq);
    let mut cone_rhs = vec![0.0; rows.len()];
    cone_rhs.push(1.0);
    match best_vertex(&p.cost, &cone_rows, &cone_senses, &cone_rhs) {
        Some(v) if v < -1e-9 => Oracle::Unbounded,
        _ => Oracle::Optimal(opt),
    }
}

/// Outcome of comparing one solver configuration with the oracle.
#[derive(Debug, Default)]
pub struct OracleTally {
    pub checked: usize,
    pub mismatches: Vec<String>,
    pub optimal: usize,
    pub infeasible: usize,
    pub unbounded: usize,
}

pub fn compare_with_oracle(lps: &[LpProblem], solver: &mut SimplexSolver) -> OracleTally {
    let mut t = OracleTally::default();
    for (k, lp) in lps.iter().enumerate() {
        t.checked += 1;
        solver.max_iters = 50 * (lp.n_vars() + lp.n_constraints());
        let want = brute_force(lp);
        let sol = match solver.solve(lp) {
            Ok(s) => s,
            Err(e) => {
                t.mismatches.push(format!("lp {k}: solver error {e}"));
                continue;
            }
        };
        let ok = match (want, sol.status) {
            (Oracle::Optimal(v), LpStatus::Optimal) => {
                t.optimal += 1;
                (sol.objective - v).abs() <= 1e-6 && lp.max_violation(&sol.x) <= 1e-6 && (lp.objective(&sol.x) - v).abs() <= 1e-6
            }
            (Oracle::Infeasible, LpStatus::Infeasible) => {
                t.infeasible += 1;
                true
            }
            (Oracle::Unbounded, LpStatus::Unbounded) => {
                t.unbounded += 1;
                true
            }
            _ => false,
        };
        if !ok {
            t.mismatches.push(format!("lp {k}: oracle {want:?}, solver {:?} objective {}", sol.status, sol.objective));
        }
    }
    t
}
