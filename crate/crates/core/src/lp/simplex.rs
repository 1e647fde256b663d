use super::{FeasiblePoint, LpProblem, LpSolution, LpStatus, Sense, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Most negative reduced cost, falling back to Bland's rule after
    /// [`SimplexSolver::bland_after`] consecutive degenerate pivots.
    Dantzig,
    /// Lowest-index improving column throughout.
    Bland,
}

/// Dense tableau simplex.
///
/// Each phase runs on a slightly perturbed copy of the basic values so that
/// degenerate vertices do not stall the primal method. The exact values are
/// carried in a second right-hand-side column, restored at the end of the
/// phase, and repaired by dual simplex pivots if any went negative.
#[derive(Debug, Clone)]
pub struct SimplexSolver {
    pub max_iters: usize,
    /// Threshold for reduced costs and pivot elements.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub pricing: Pricing,
    /// Relative size of the right-hand-side perturbation; 0 disables it.
    pub perturbation: f64,
    tableau: Vec<f64>,
    pivot_row: Vec<f64>,
}

pub fn solve_lp(p: &LpProblem, max_iters: usize) -> Result<LpSolution> {
    SimplexSolver::new(max_iters).solve(p)
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

/// Basic values below this are treated as infeasible after restoring the
/// unperturbed right-hand side.
const PRIMAL_TOL: f64 = 1e-9;

/// Column layout: original variables, slacks, artificials, then the working
/// and exact right-hand sides.
struct Tableau<'a> {
    m: usize,
    width: usize,
    n_orig: usize,
    data: &'a mut Vec<f64>,
    pivot_row: &'a mut Vec<f64>,
    /// Reduced costs; the right-hand-side entries hold minus the objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
    enterable: Vec<bool>,
}

impl Tableau<'_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn ncols(&self) -> usize {
        self.width - 2
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 2]
    }

    #[inline]
    fn exact_rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.data[r * w + q];
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            let inv = 1.0 / piv;
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[q] = 1.0;
        }
        self.pivot_row.clear();
        self.pivot_row.extend_from_slice(&self.data[r * w..(r + 1) * w]);
        let prow = &*self.pivot_row;
        let nz: Vec<usize> = (0..w).filter(|&k| prow[k] != 0.0).collect();
        let sparse = nz.len() * 3 < w;

        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            if sparse {
                for &k in &nz {
                    row[k] -= f * prow[k];
                }
            } else {
                for (v, p) in row.iter_mut().zip(prow) {
                    *v -= f * p;
                }
            }
            row[q] = 0.0;
        };
        for (i, row) in self.data.chunks_exact_mut(w).enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = q;
    }

    fn choose_entering(&self, bland: bool, tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols() {
            if !self.enterable[j] {
                continue;
            }
            let dj = self.obj[j];
            if dj < -tol {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, b)| dj < b) {
                    best = Some((j, dj));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn choose_leaving(&self, q: usize, bland: bool, tol: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a <= tol {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12 {
                        best = Some((i, ratio));
                    } else if ratio <= br + 1e-12 {
                        let better = if bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a > self.at(bi, q)
                        };
                        if better {
                            best = Some((i, ratio));
                        }
                    }
                }
            }
        }
        best
    }

    fn run(&mut self, iters: &mut usize, solver: &SimplexSolver) -> std::result::Result<Outcome, ()> {
        let mut degenerate_run = 0;
        let mut bland = solver.pricing == Pricing::Bland;
        loop {
            let Some(q) = self.choose_entering(bland, solver.pivot_tol) else {
                return Ok(Outcome::Optimal);
            };
            let Some((r, ratio)) = self.choose_leaving(q, bland, solver.pivot_tol) else {
                return Ok(Outcome::Unbounded(q));
            };
            if *iters >= solver.max_iters {
                return Err(());
            }
            self.pivot(r, q);
            *iters += 1;
            if solver.pricing == Pricing::Bland {
                continue;
            }
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= solver.bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    /// Shifts each working basic value up by a small row-dependent amount.
    fn perturb(&mut self, size: f64) {
        if size == 0.0 {
            return;
        }
        let w = self.width;
        for i in 0..self.m {
            let v = self.exact_rhs(i).max(0.0);
            let spread = 1.0 + (i as f64 * 0.618_033_988_749_894_9).fract();
            self.data[i * w + w - 2] = v + size * spread * (1.0 + v);
        }
    }

    fn restore(&mut self) {
        let w = self.width;
        for i in 0..self.m {
            self.data[i * w + w - 2] = self.data[i * w + w - 1];
        }
        self.obj[w - 2] = self.obj[w - 1];
    }

    /// Dual simplex pivots until every basic value is nonnegative, starting
    /// from a dual feasible basis. Stops early if a row admits no pivot.
    fn dual_cleanup(&mut self, iters: &mut usize, solver: &SimplexSolver) -> std::result::Result<(), ()> {
        loop {
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let v = self.rhs(i);
                if v < -PRIMAL_TOL && leave.is_none_or(|(_, b)| v < b) {
                    leave = Some((i, v));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(());
            };
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..self.ncols() {
                if !self.enterable[j] {
                    continue;
                }
                let a = self.at(r, j);
                if a >= -solver.pivot_tol {
                    continue;
                }
                let ratio = self.obj[j].max(0.0) / -a;
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && -a > ba),
                };
                if better {
                    enter = Some((j, ratio, -a));
                }
            }
            let Some((q, _, _)) = enter else {
                return Ok(());
            };
            if *iters >= solver.max_iters {
                return Err(());
            }
            self.pivot(r, q);
            *iters += 1;
        }
    }

    /// Perturb, optimize, restore, repair.
    fn optimize(&mut self, iters: &mut usize, solver: &SimplexSolver) -> std::result::Result<Outcome, ()> {
        self.perturb(solver.perturbation);
        let outcome = self.run(iters, solver);
        self.restore();
        match outcome? {
            Outcome::Optimal => {
                self.dual_cleanup(iters, solver)?;
                Ok(Outcome::Optimal)
            }
            unbounded => Ok(unbounded),
        }
    }

    fn values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.exact_rhs(i).max(0.0);
        }
        x
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width;
        self.obj.clear();
        self.obj.extend_from_slice(costs);
        self.obj.resize(w, 0.0);
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.obj[b] = 0.0;
        }
    }
}

impl SimplexSolver {
    pub fn new(max_iters: usize) -> Self {
        Self {
            max_iters,
            pivot_tol: 1e-9,
            bland_after: 20,
            pricing: Pricing::Dantzig,
            perturbation: 1e-7,
            tableau: Vec::new(),
            pivot_row: Vec::new(),
        }
    }

    pub fn with_pricing(mut self, pricing: Pricing) -> Self {
        self.pricing = pricing;
        self
    }

    pub fn solve(&mut self, p: &LpProblem) -> Result<LpSolution> {
        let m = p.n_constraints();
        let n = p.n_vars();

        // Row signs so every right-hand side is nonnegative.
        let flip: Vec<bool> = p.rhs.iter().map(|&r| r < 0.0).collect();
        let slack_of: Vec<Option<usize>> = {
            let mut next = n;
            p.senses
                .iter()
                .map(|s| match s {
                    Sense::Eq => None,
                    _ => {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect()
        };
        let n_slack = slack_of.iter().filter(|s| s.is_some()).count();
        let slack_sign = |i: usize| -> f64 {
            let s = match p.senses[i] {
                Sense::Ge => -1.0,
                _ => 1.0,
            };
            if flip[i] {
                -s
            } else {
                s
            }
        };

        // Starting basis: a +1 slack, or a structural column that is a
        // positive multiple of a unit vector; otherwise an artificial.
        let mut unit_row: Vec<Option<usize>> = vec![None; n];
        for j in 0..n {
            let col = p.rows.column(j);
            let mut only = None;
            let mut count = 0;
            for (i, &a) in col.iter().enumerate() {
                if a != 0.0 {
                    count += 1;
                    only = Some(i);
                }
            }
            if count == 1 {
                let i = only.unwrap();
                let a = if flip[i] { -col[i] } else { col[i] };
                if a > 0.0 {
                    unit_row[j] = Some(i);
                }
            }
        }
        let mut basis: Vec<Option<usize>> = vec![None; m];
        for i in 0..m {
            if let Some(s) = slack_of[i] {
                if slack_sign(i) > 0.0 {
                    basis[i] = Some(s);
                }
            }
        }
        for (j, r) in unit_row.iter().enumerate() {
            if let Some(i) = *r {
                if basis[i].is_none() {
                    basis[i] = Some(j);
                }
            }
        }
        let art_rows: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
        let art_start = n + n_slack;
        let ncols = art_start + art_rows.len();
        let width = ncols + 2;

        self.tableau.clear();
        self.tableau.resize(m * width, 0.0);
        for i in 0..m {
            let sign = if flip[i] { -1.0 } else { 1.0 };
            let row = &mut self.tableau[i * width..(i + 1) * width];
            for (j, &a) in p.rows.row(i).iter().enumerate() {
                row[j] = sign * a;
            }
            if let Some(s) = slack_of[i] {
                row[s] = slack_sign(i);
            }
            row[ncols] = sign * p.rhs[i];
            row[ncols + 1] = sign * p.rhs[i];
        }
        for (k, &i) in art_rows.iter().enumerate() {
            self.tableau[i * width + art_start + k] = 1.0;
            basis[i] = Some(art_start + k);
        }
        let basis: Vec<usize> = basis.into_iter().map(|b| b.unwrap()).collect();
        // Scale rows whose basic column is a structural unit column.
        for (i, &b) in basis.iter().enumerate() {
            let a = self.tableau[i * width + b];
            if a != 1.0 {
                let inv = 1.0 / a;
                for v in &mut self.tableau[i * width..(i + 1) * width] {
                    *v *= inv;
                }
                self.tableau[i * width + b] = 1.0;
            }
        }

        let mut pivot_row = std::mem::take(&mut self.pivot_row);
        let mut data = std::mem::take(&mut self.tableau);
        let result = self.two_phase(p, &mut data, &mut pivot_row, m, width, n, art_start, basis);
        self.tableau = data;
        self.pivot_row = pivot_row;
        result
    }

    #[allow(clippy::too_many_arguments)]
    fn two_phase(
        &self,
        p: &LpProblem,
        data: &mut Vec<f64>,
        pivot_row: &mut Vec<f64>,
        m: usize,
        width: usize,
        n: usize,
        art_start: usize,
        basis: Vec<usize>,
    ) -> Result<LpSolution> {
        let ncols = width - 2;
        let mut t = Tableau {
            m,
            width,
            n_orig: n,
            data,
            pivot_row,
            obj: Vec::with_capacity(width),
            basis,
            enterable: vec![true; ncols],
        };
        let mut iters = 0;

        if art_start < ncols {
            let mut phase1 = vec![0.0; ncols];
            for c in &mut phase1[art_start..] {
                *c = 1.0;
            }
            t.set_costs(&phase1);
            if t.optimize(&mut iters, self).is_err() {
                return Err(Error::NonTermination {
                    iterations: iters,
                    best: None,
                });
            }
            let infeasibility: f64 = (0..m).filter(|&i| t.basis[i] >= art_start).map(|i| t.exact_rhs(i).max(0.0)).sum();
            let scale = p.rhs.iter().fold(1.0_f64, |s, r| s.max(r.abs()));
            if infeasibility > FEASIBILITY_TOL * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: Vec::new(),
                    objective: f64::NAN,
                    iterations: iters,
                    ray: None,
                });
            }
            // Drive artificials out of the basis where a real column can replace them.
            for r in 0..m {
                if t.basis[r] < art_start {
                    continue;
                }
                let mut best: Option<(usize, f64)> = None;
                for j in 0..art_start {
                    let a = t.at(r, j).abs();
                    if a > self.pivot_tol && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                if let Some((j, _)) = best {
                    t.pivot(r, j);
                }
            }
            for e in &mut t.enterable[art_start..] {
                *e = false;
            }
        }

        let mut costs = vec![0.0; ncols];
        costs[..n].copy_from_slice(&p.cost);
        t.set_costs(&costs);
        let outcome = match t.optimize(&mut iters, self) {
            Ok(o) => o,
            Err(()) => {
                let x = t.values()[..n].to_vec();
                let objective = p.objective(&x);
                return Err(Error::NonTermination {
                    iterations: iters,
                    best: Some(FeasiblePoint { x, objective }),
                });
            }
        };
        let x = t.values()[..t.n_orig].to_vec();
        let objective = p.objective(&x);
        Ok(match outcome {
            Outcome::Optimal => LpSolution {
                status: LpStatus::Optimal,
                x,
                objective,
                iterations: iters,
                ray: None,
            },
            Outcome::Unbounded(q) => {
                let mut ray = vec![0.0; n];
                if q < n {
                    ray[q] = 1.0;
                }
                for (i, &b) in t.basis.iter().enumerate() {
                    if b < n {
                        ray[b] = -t.at(i, q);
                    }
                }
                LpSolution {
                    status: LpStatus::Unbounded,
                    x,
                    objective,
                    iterations: iters,
                    ray: Some(ray),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn lp(cost: Vec<f64>, rows: Array2<f64>, senses: Vec<Sense>, rhs: Vec<f64>) -> LpProblem {
        LpProblem::new(cost, rows, senses, rhs).unwrap()
    }

    #[test]
    fn simplex_edge_optimum() {
        let p = lp(vec![-1.0, -1.0], array![[1.0, 1.0]], vec![Sense::Le], vec![1.0]);
        let s = solve_lp(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let p = lp(vec![-1.0], Array2::zeros((0, 1)), vec![], vec![]);
        let s = solve_lp(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.ray.unwrap();
        assert!(ray[0] > 0.0);
    }

    #[test]
    fn unbounded_ray_is_a_descent_direction() {
        // min -x - y  s.t.  x - y <= 1
        let p = lp(vec![-1.0, -1.0], array![[1.0, -1.0]], vec![Sense::Le], vec![1.0]);
        let s = solve_lp(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.ray.unwrap();
        assert!(p.objective(&ray) < 0.0);
        assert!(ray.iter().all(|&v| v >= 0.0));
        assert!(ray[0] - ray[1] <= 1e-12);
    }

    #[test]
    fn infeasible_problem() {
        let p = lp(
            vec![1.0],
            array![[1.0], [1.0]],
            vec![Sense::Ge, Sense::Le],
            vec![2.0, 1.0],
        );
        assert_eq!(solve_lp(&p, 100).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + 2y  s.t. x + y = 3, -x <= -1  (x >= 1)
        let p = lp(
            vec![1.0, 2.0],
            array![[1.0, 1.0], [-1.0, 0.0]],
            vec![Sense::Eq, Sense::Le],
            vec![3.0, -1.0],
        );
        let s = solve_lp(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let p = lp(
            vec![1.0, 1.0],
            array![[1.0, 1.0], [2.0, 2.0]],
            vec![Sense::Eq, Sense::Eq],
            vec![1.0, 2.0],
        );
        let s = solve_lp(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn iteration_cap_reports_best_point() {
        let p = lp(
            vec![-1.0, -2.0, -3.0],
            array![[1.0, 1.0, 1.0], [1.0, 2.0, 0.0], [0.0, 1.0, 3.0]],
            vec![Sense::Le, Sense::Le, Sense::Le],
            vec![4.0, 5.0, 6.0],
        );
        match solve_lp(&p, 1) {
            Err(Error::NonTermination { iterations, best }) => {
                assert_eq!(iterations, 1);
                let best = best.unwrap();
                assert!(p.max_violation(&best.x) < 1e-9);
            }
            other => panic!("expected nontermination, got {other:?}"),
        }
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic degenerate LP that cycles under textbook Dantzig pricing.
        let p = lp(
            vec![-0.75, 150.0, -0.02, 6.0],
            array![
                [0.25, -60.0, -0.04, 9.0],
                [0.5, -90.0, -0.02, 3.0],
                [0.0, 0.0, 1.0, 0.0]
            ],
            vec![Sense::Le, Sense::Le, Sense::Le],
            vec![0.0, 0.0, 1.0],
        );
        let s = solve_lp(&p, 50 * 7).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let p = lp(
            vec![-2.0, -3.0, 1.0],
            array![[1.0, 1.0, 1.0], [2.0, 1.0, -1.0]],
            vec![Sense::Le, Sense::Ge],
            vec![4.0, 1.0],
        );
        let a = solve_lp(&p, 100).unwrap();
        let b = solve_lp(&p, 100).unwrap();
        assert_eq!(a, b);
    }
}
