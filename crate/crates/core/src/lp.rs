//! The linear relaxation of the allocation program and a bounded-variable
//! primal simplex to solve it.

use alloc::vec::Vec;

use crate::instance::Instance;
use crate::preprocess::ReachabilityData;
use crate::{DemandIdx, TypeIdx};

/// Feasibility and optimality tolerance.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `a·x ≤ rhs`
    Le,
    /// `a·x = rhs`
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `max c·x` subject to the rows and `0 ≤ x ≤ upper`. Every `rhs` must be
/// nonnegative so that `x = 0` is feasible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

/// Meaning of a relaxation variable. Demand positions are local to the
/// type's view; start positions index the view's starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpVar {
    Serve(DemandIdx),
    FromStart { resource_type: TypeIdx, start: usize, demand: usize },
    Follow { resource_type: TypeIdx, from: usize, to: usize },
    ToSink { resource_type: TypeIdx, demand: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRelaxation {
    pub program: LinearProgram,
    pub vars: Vec<LpVar>,
    /// Column of `Serve(d)` for each demand.
    pub serve_col: Vec<usize>,
}

/// Per type and start: units leaving the start are at most its stock. Per
/// type and demand: inflow equals outflow, and the demand is served only to
/// the extent of its inflow. All variables lie in `[0, 1]`; the objective is
/// the served reward.
pub fn build_lp_relaxation(inst: &Instance, reach: &ReachabilityData) -> LpRelaxation {
    let mut vars: Vec<LpVar> = (0..inst.demands.len()).map(LpVar::Serve).collect();
    let serve_col: Vec<usize> = (0..inst.demands.len()).collect();
    let mut objective: Vec<f64> = inst.demands.iter().map(|d| d.reward as f64).collect();
    let mut rows = Vec::new();
    for (r, view) in reach.views.iter().enumerate() {
        let n = view.len();
        let mut inflow: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); n];
        let mut outflow: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); n];
        let col = |v: LpVar, vars: &mut Vec<LpVar>, objective: &mut Vec<f64>| {
            vars.push(v);
            objective.push(0.0);
            vars.len() - 1
        };
        for (pos, s) in view.starts.iter().enumerate() {
            let mut row = Vec::new();
            for &j in &s.reach {
                let c = col(LpVar::FromStart { resource_type: r, start: pos, demand: j }, &mut vars, &mut objective);
                row.push((c, 1.0));
                inflow[j].push((c, 1.0));
            }
            rows.push(Row { coeffs: row, kind: RowKind::Le, rhs: f64::from(s.count) });
        }
        for i in 0..n {
            for &j in &view.succ[i] {
                let c = col(LpVar::Follow { resource_type: r, from: i, to: j }, &mut vars, &mut objective);
                outflow[i].push((c, 1.0));
                inflow[j].push((c, 1.0));
            }
            let c = col(LpVar::ToSink { resource_type: r, demand: i }, &mut vars, &mut objective);
            outflow[i].push((c, 1.0));
        }
        for i in 0..n {
            let mut balance = inflow[i].clone();
            balance.extend(outflow[i].iter().map(|&(c, _)| (c, -1.0)));
            rows.push(Row { coeffs: balance, kind: RowKind::Eq, rhs: 0.0 });
        }
        for i in 0..n {
            let mut cover = alloc::vec![(serve_col[view.demands[i]], 1.0)];
            cover.extend(inflow[i].iter().map(|&(c, _)| (c, -1.0)));
            rows.push(Row { coeffs: cover, kind: RowKind::Le, rhs: 0.0 });
        }
    }
    let upper = alloc::vec![1.0; vars.len()];
    LpRelaxation { program: LinearProgram { objective, upper, rows }, vars, serve_col }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    /// Served fraction per demand.
    pub y: Vec<f64>,
    /// Value of every relaxation variable, by column.
    pub x: Vec<f64>,
    pub objective: f64,
}

pub fn solve_lp(lp: &LpRelaxation) -> FractionalSolution {
    let (x, objective) = maximize(&lp.program);
    let y = lp.serve_col.iter().map(|&c| x[c]).collect();
    FractionalSolution { y, x, objective }
}

/// Largest violation of a row or bound by `x`.
pub fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (v, &u) in x.iter().zip(&lp.upper) {
        worst = worst.max(-v).max(v - u);
    }
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a * x[c]).sum();
        let gap = lhs - row.rhs;
        worst = worst.max(match row.kind {
            RowKind::Le => gap,
            RowKind::Eq => gap.abs(),
        });
    }
    worst
}

/// Consecutive degenerate pivots after which entering and leaving choices
/// fall back to lowest index.
const DEGENERATE_STREAK: usize = 50;

/// Revised primal simplex on `A x + s = b` with bounded structurals and
/// slacks (`[0, ∞)` for `≤` rows, `[0, 0]` for `=` rows), starting from the
/// all-slack basis. Returns an optimal vertex and its objective.
pub fn maximize(lp: &LinearProgram) -> (Vec<f64>, f64) {
    let m = lp.rows.len();
    let n = lp.objective.len();
    let total = n + m;
    // sparse columns; slacks are unit columns
    let mut cols: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); total];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(c, a) in &row.coeffs {
            cols[c].push((i, a));
        }
        cols[n + i].push((i, 1.0));
    }
    let mut cost = lp.objective.clone();
    cost.resize(total, 0.0);
    let mut upper = lp.upper.clone();
    upper.extend(lp.rows.iter().map(|r| match r.kind {
        RowKind::Le => f64::INFINITY,
        RowKind::Eq => 0.0,
    }));
    let b: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();

    let mut x = alloc::vec![0.0; total];
    let mut basis: Vec<usize> = (n..total).collect();
    let mut is_basic = alloc::vec![false; total];
    for &j in &basis {
        is_basic[j] = true;
    }
    x[n..total].copy_from_slice(&b);
    // row-major inverse of the basis matrix
    let mut inv = alloc::vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }

    let mut streak = 0usize;
    let mut dual = alloc::vec![0.0; m];
    let mut alpha = alloc::vec![0.0; m];
    loop {
        for i in 0..m {
            dual[i] = 0.0;
        }
        for (k, &j) in basis.iter().enumerate() {
            let cj = cost[j];
            if cj != 0.0 {
                let row = &inv[k * m..(k + 1) * m];
                for i in 0..m {
                    dual[i] += cj * row[i];
                }
            }
        }
        let bland = streak >= DEGENERATE_STREAK;
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..total {
            if is_basic[j] {
                continue;
            }
            let d = cost[j] - cols[j].iter().map(|&(i, a)| dual[i] * a).sum::<f64>();
            let up = x[j] <= TOL;
            let improving = (up && d > TOL && upper[j] > TOL) || (!up && d < -TOL);
            if !improving {
                continue;
            }
            if bland {
                entering = Some((j, d));
                break;
            }
            if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                entering = Some((j, d));
            }
        }
        let Some((q, d)) = entering else { break };
        let dir = if d > 0.0 { 1.0 } else { -1.0 };

        for (k, a) in alpha.iter_mut().enumerate() {
            let row = &inv[k * m..(k + 1) * m];
            *a = cols[q].iter().map(|&(i, v)| row[i] * v).sum();
        }
        // step t moves x_q by dir·t and basic k by −dir·t·alpha[k]
        let mut step = upper[q];
        let mut leave: Option<usize> = None;
        for k in 0..m {
            let rate = -dir * alpha[k];
            let j = basis[k];
            let limit = if rate < -TOL {
                x[j] / -rate
            } else if rate > TOL && upper[j].is_finite() {
                (upper[j] - x[j]) / rate
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let take = if limit < step - TOL {
                true
            } else if limit <= step + TOL {
                match leave {
                    // a tie with the entering bound keeps the cheaper bound flip
                    None => false,
                    Some(l) if bland => j < basis[l],
                    Some(l) => alpha[k].abs() > alpha[l].abs(),
                }
            } else {
                false
            };
            if take {
                step = limit;
                leave = Some(k);
            }
        }
        assert!(step.is_finite(), "relaxation is bounded");
        streak = if step <= TOL { streak + 1 } else { 0 };

        x[q] += dir * step;
        for k in 0..m {
            x[basis[k]] -= dir * step * alpha[k];
        }
        let Some(k) = leave else {
            // bound flip
            x[q] = if dir > 0.0 { upper[q] } else { 0.0 };
            continue;
        };
        let out = basis[k];
        let rate = -dir * alpha[k];
        x[out] = if rate < 0.0 { 0.0 } else { upper[out] };
        is_basic[out] = false;
        is_basic[q] = true;
        basis[k] = q;

        let pivot = alpha[k];
        let (head, tail) = inv.split_at_mut(k * m);
        let (prow, tail) = tail.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= pivot;
        }
        for (r, row) in head.chunks_mut(m).enumerate() {
            let f = alpha[r];
            if f != 0.0 {
                for i in 0..m {
                    row[i] -= f * prow[i];
                }
            }
        }
        for (r, row) in tail.chunks_mut(m).enumerate() {
            let f = alpha[k + 1 + r];
            if f != 0.0 {
                for i in 0..m {
                    row[i] -= f * prow[i];
                }
            }
        }
    }

    // recompute basics from the nonbasic values to shed drift
    let mut rhs = b.clone();
    for j in 0..total {
        if !is_basic[j] && x[j] != 0.0 {
            for &(i, a) in &cols[j] {
                rhs[i] -= a * x[j];
            }
        }
    }
    for (k, &j) in basis.iter().enumerate() {
        let row = &inv[k * m..(k + 1) * m];
        x[j] = (0..m).map(|i| row[i] * rhs[i]).sum();
    }
    for j in 0..n {
        x[j] = x[j].clamp(0.0, lp.upper[j]);
    }
    x.truncate(n);
    let objective = x.iter().zip(&lp.objective).map(|(v, c)| v * c).sum();
    (x, objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::small;
    use crate::preprocess::build_reachability;
    use alloc::vec;

    #[test]
    fn small_program() {
        // max 3a + 2b, a + b ≤ 1.5, a ≤ 1, b ≤ 1
        let lp = LinearProgram {
            objective: vec![3.0, 2.0],
            upper: vec![1.0, 1.0],
            rows: vec![Row { coeffs: vec![(0, 1.0), (1, 1.0)], kind: RowKind::Le, rhs: 1.5 }],
        };
        let (x, obj) = maximize(&lp);
        assert!((obj - 4.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equality_rows() {
        // max a - b + c, a - b = 0, b + c ≤ 1
        let lp = LinearProgram {
            objective: vec![1.0, -1.0, 1.0],
            upper: vec![1.0; 3],
            rows: vec![
                Row { coeffs: vec![(0, 1.0), (1, -1.0)], kind: RowKind::Eq, rhs: 0.0 },
                Row { coeffs: vec![(1, 1.0), (2, 1.0)], kind: RowKind::Le, rhs: 1.0 },
            ],
        };
        let (x, obj) = maximize(&lp);
        assert!((obj - 1.0).abs() < 1e-9);
        assert!(max_violation(&lp, &x) < 1e-9);
    }

    #[test]
    fn relaxation_counts() {
        let inst = small();
        let reach = build_reachability(&inst);
        let lp = build_lp_relaxation(&inst, &reach);
        let mut expected_vars = inst.demands.len();
        let mut expected_rows = 0;
        for v in &reach.views {
            expected_vars += v.starts.iter().map(|s| s.reach.len()).sum::<usize>();
            expected_vars += v.succ.iter().map(Vec::len).sum::<usize>() + v.len();
            expected_rows += v.starts.len() + 2 * v.len();
        }
        assert_eq!(lp.vars.len(), expected_vars);
        assert_eq!(lp.program.rows.len(), expected_rows);
    }

    #[test]
    fn satisfiable_instance_reaches_total_reward() {
        let inst = small();
        let reach = build_reachability(&inst);
        let lp = build_lp_relaxation(&inst, &reach);
        let sol = solve_lp(&lp);
        assert!((sol.objective - inst.total_reward() as f64).abs() < 1e-6);
        assert!(max_violation(&lp.program, &sol.x) < 1e-9);
    }

    #[test]
    fn empty_instance() {
        let mut inst = small();
        inst.demands.clear();
        let reach = build_reachability(&inst);
        let sol = solve_lp(&build_lp_relaxation(&inst, &reach));
        assert_eq!(sol.objective, 0.0);
    }
}
