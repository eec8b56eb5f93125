//! Exact solving: routing a fixed served set, a brute-force oracle and a
//! best-first branch-and-bound over the served set.
//!
//! The branch-and-bound relaxes the requirement that a demand is served by
//! all its types at once. Each demand's reward is split into integer shares,
//! one per required type, and every type then schedules independently
//! against its shares; the sum of the independent optima bounds every
//! consistent schedule. Shares start equal and are improved by a few
//! subgradient steps per node. When the independent schedules agree on every
//! undecided demand the node is solved outright; otherwise the search
//! branches on the most valuable demand they disagree on.

use alloc::collections::BinaryHeap;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::budget::Budget;
use crate::instance::Instance;
use crate::preprocess::ReachabilityData;
use crate::schedule::{route_all, solve_one_type, Presence};
use crate::solution::Solution;
use crate::{DemandIdx, TypeIdx};

/// Default largest instance the brute-force oracle accepts.
pub const BRUTE_FORCE_CAP: usize = 16;

/// Common multiple of the share denominators, so equal splits among up to
/// eight types stay integral.
const SCALE: i64 = 840;
const ROOT_STEPS: usize = 40;
const NODE_STEPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("{demands} demands exceed the brute-force limit of {cap}")]
    TooLarge { demands: usize, cap: usize },
}

/// Routes exactly the demands in `served` for every type; `None` when some
/// type lacks the units to do so.
pub fn evaluate_fixed_y(inst: &Instance, reach: &ReachabilityData, served: &[DemandIdx]) -> Option<Solution> {
    route_all(inst, reach, served, false).map(|(s, _)| s)
}

/// Exhaustive search over served sets, largest reward first, ties to the
/// lexicographically smallest set.
pub fn solve_brute_force(inst: &Instance, reach: &ReachabilityData) -> Result<Solution, ExactError> {
    solve_brute_force_capped(inst, reach, BRUTE_FORCE_CAP)
}

pub fn solve_brute_force_capped(
    inst: &Instance,
    reach: &ReachabilityData,
    cap: usize,
) -> Result<Solution, ExactError> {
    for (set, _) in ranked_subsets(inst, cap)? {
        if let Some(sol) = evaluate_fixed_y(inst, reach, &set) {
            return Ok(sol);
        }
    }
    unreachable!("the empty set is always feasible")
}

/// Brute force for the net objective (reward minus minimum travel cost).
/// Ties go to the lexicographically smallest set.
pub fn solve_brute_force_costs(
    inst: &Instance,
    reach: &ReachabilityData,
    cap: usize,
) -> Result<Solution, ExactError> {
    let mut best: Option<Solution> = None;
    for (set, gross) in ranked_subsets(inst, cap)? {
        if best.as_ref().is_some_and(|b| gross < b.objective) {
            break;
        }
        if let Some((mut sol, cost)) = route_all(inst, reach, &set, true) {
            sol.objective = gross - cost;
            if best.as_ref().is_none_or(|b| sol.objective > b.objective) {
                best = Some(sol);
            }
        }
    }
    Ok(best.expect("the empty set is always feasible"))
}

/// All subsets with their reward, by decreasing reward then lexicographically.
fn ranked_subsets(inst: &Instance, cap: usize) -> Result<Vec<(Vec<DemandIdx>, i64)>, ExactError> {
    let n = inst.demands.len();
    if n > cap {
        return Err(ExactError::TooLarge { demands: n, cap });
    }
    let mut all: Vec<(Vec<DemandIdx>, i64)> = (0u64..1 << n)
        .map(|mask| {
            let set: Vec<DemandIdx> = (0..n).filter(|&d| mask >> d & 1 == 1).collect();
            let w = set.iter().map(|&d| inst.demands[d].reward).sum();
            (set, w)
        })
        .collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(all)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcome {
    pub solution: Solution,
    /// Whether the search finished, proving the solution optimal.
    pub optimal: bool,
    /// Search nodes evaluated.
    pub nodes: u64,
}

/// Best-first branch-and-bound on the served set. Stops early with the best
/// solution found so far once `budget` is exhausted.
pub fn solve_exact_bb<B: Budget + ?Sized>(
    inst: &Instance,
    reach: &ReachabilityData,
    budget: &mut B,
) -> ExactOutcome {
    Search::new(inst, reach, false).run(budget)
}

/// Same search maximizing reward minus travel cost; the solution's objective
/// is the net value.
pub(crate) fn solve_exact_net<B: Budget + ?Sized>(
    inst: &Instance,
    reach: &ReachabilityData,
    budget: &mut B,
) -> ExactOutcome {
    Search::new(inst, reach, true).run(budget)
}

/// Reward shares per type, indexed by local view position.
type Shares = Vec<Vec<i64>>;

struct Node {
    bound: i64,
    depth: usize,
    seq: u64,
    presence: Vec<Presence>,
    shares: Rc<Shares>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

enum Eval {
    Infeasible,
    Relaxed {
        /// Scaled bound.
        total: i64,
        shares: Shares,
        /// Served flags per type and local position.
        served: Vec<Vec<bool>>,
    },
}

struct Search<'a> {
    inst: &'a Instance,
    reach: &'a ReachabilityData,
    costs: bool,
    /// For each demand, its `(type, local position)` slots.
    slots: Vec<Vec<(TypeIdx, usize)>>,
    best: Solution,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, reach: &'a ReachabilityData, costs: bool) -> Self {
        let mut slots = alloc::vec![Vec::new(); inst.demands.len()];
        for (r, v) in reach.views.iter().enumerate() {
            for (k, &d) in v.demands.iter().enumerate() {
                slots[d].push((r, k));
            }
        }
        Search { inst, reach, costs, slots, best: Solution::empty(), nodes: 0 }
    }

    fn equal_shares(&self) -> Shares {
        let mut shares: Shares = self.reach.views.iter().map(|v| alloc::vec![0; v.len()]).collect();
        for (d, slots) in self.slots.iter().enumerate() {
            let total = self.inst.demands[d].reward * SCALE;
            let k = slots.len() as i64;
            for (i, &(r, pos)) in slots.iter().enumerate() {
                shares[r][pos] = total / k + i64::from(i == 0) * (total % k);
            }
        }
        shares
    }

    fn run<B: Budget + ?Sized>(mut self, budget: &mut B) -> ExactOutcome {
        let mut heap = BinaryHeap::new();
        let mut seq = 0;
        heap.push(Node {
            bound: i64::MAX,
            depth: 0,
            seq,
            presence: alloc::vec![Presence::Free; self.inst.demands.len()],
            shares: Rc::new(self.equal_shares()),
        });
        while let Some(node) = heap.pop() {
            if node.bound <= self.best.objective {
                continue;
            }
            if budget.exhausted() {
                return self.finish(false);
            }
            self.nodes += 1;
            let steps = if node.depth == 0 { ROOT_STEPS } else { NODE_STEPS };
            let Eval::Relaxed { total, shares, served } = self.relax(&node, steps) else {
                continue;
            };
            let bound = total.div_euclid(SCALE);
            if bound <= self.best.objective {
                continue;
            }
            let mut split: Option<DemandIdx> = None;
            let mut chosen = Vec::new();
            for (d, p) in node.presence.iter().enumerate() {
                let hits = self.slots[d].iter().filter(|&&(r, k)| served[r][k]).count();
                match p {
                    Presence::Forced => chosen.push(d),
                    Presence::Excluded => {}
                    Presence::Free if hits == self.slots[d].len() => chosen.push(d),
                    Presence::Free if hits == 0 => {}
                    Presence::Free => {
                        let w = self.inst.demands[d].reward;
                        if split.is_none_or(|s| w > self.inst.demands[s].reward) {
                            split = Some(d);
                        }
                    }
                }
            }
            self.try_incumbent(&chosen);
            let Some(d) = split else { continue };
            let shares = Rc::new(shares);
            for fix in [Presence::Forced, Presence::Excluded] {
                seq += 1;
                let mut presence = node.presence.clone();
                presence[d] = fix;
                heap.push(Node { bound, depth: node.depth + 1, seq, presence, shares: Rc::clone(&shares) });
            }
        }
        self.finish(true)
    }

    fn finish(self, optimal: bool) -> ExactOutcome {
        ExactOutcome { solution: self.best, optimal, nodes: self.nodes }
    }

    fn try_incumbent(&mut self, chosen: &[DemandIdx]) {
        let gross: i64 = chosen.iter().map(|&d| self.inst.demands[d].reward).sum();
        if gross <= self.best.objective {
            return;
        }
        if let Some((mut sol, cost)) = route_all(self.inst, self.reach, chosen, self.costs) {
            sol.objective = gross - cost;
            if sol.objective > self.best.objective {
                self.best = sol;
            }
        }
    }

    /// Lagrangian relaxation of the node with a few subgradient steps on the
    /// shares; returns the tightest bound seen.
    fn relax(&self, node: &Node, steps: usize) -> Eval {
        let mut shares: Shares = (*node.shares).clone();
        let mut best: Option<(i64, Shares, Vec<Vec<bool>>)> = None;
        let (mut theta, mut stall) = (SCALE / 2, 0);
        let leg = self.costs.then_some(SCALE);
        for _ in 0..steps.max(1) {
            let mut total = 0;
            let mut served = Vec::with_capacity(self.reach.views.len());
            for (r, view) in self.reach.views.iter().enumerate() {
                let presence: Vec<Presence> = view.demands.iter().map(|&d| node.presence[d]).collect();
                let Some(opt) = solve_one_type(self.inst, view, &shares[r], &presence, leg) else {
                    return Eval::Infeasible;
                };
                total += opt.value;
                let mut flags = alloc::vec![false; view.len()];
                for k in opt.served {
                    flags[k] = true;
                }
                served.push(flags);
            }
            if best.as_ref().is_none_or(|b| total < b.0) {
                best = Some((total, shares.clone(), served.clone()));
                stall = 0;
            } else {
                stall += 1;
                if stall >= 2 {
                    theta /= 2;
                    stall = 0;
                }
            }
            if theta == 0 || !self.step(node, &mut shares, &served, theta) {
                break;
            }
        }
        let (total, shares, served) = best.expect("at least one step");
        Eval::Relaxed { total, shares, served }
    }

    /// Moves share from the types that serve a free demand to those that
    /// skip it. Returns false when every free demand is already consistent.
    fn step(&self, node: &Node, shares: &mut Shares, served: &[Vec<bool>], theta: i64) -> bool {
        let mut moved = false;
        for (d, slots) in self.slots.iter().enumerate() {
            if node.presence[d] != Presence::Free || slots.len() < 2 {
                continue;
            }
            let k = slots.len() as i64;
            let c = slots.iter().filter(|&&(r, p)| served[r][p]).count() as i64;
            if c == 0 || c == k {
                continue;
            }
            let mut amount = self.inst.demands[d].reward * theta / (k * k);
            for &(r, p) in slots {
                if served[r][p] {
                    amount = amount.min(shares[r][p] / (k - c));
                }
            }
            if amount <= 0 {
                continue;
            }
            for &(r, p) in slots {
                if served[r][p] {
                    shares[r][p] -= amount * (k - c);
                } else {
                    shares[r][p] += amount * c;
                }
            }
            moved = true;
        }
        moved
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::{NodeLimit, Unlimited};
    use crate::instance::tests::small;
    use crate::preprocess::build_reachability;
    use alloc::vec;

    #[test]
    fn empty_served_set_is_feasible() {
        let inst = small();
        let reach = build_reachability(&inst);
        let sol = evaluate_fixed_y(&inst, &reach, &[]).unwrap();
        assert!(sol.paths.is_empty());
    }

    #[test]
    fn conflicting_single_unit_pair_is_infeasible() {
        let mut inst = small();
        inst.demands[2].requires = vec![0];
        inst.demands[2].start = 10;
        let reach = build_reachability(&inst);
        assert!(evaluate_fixed_y(&inst, &reach, &[0, 2]).is_none());
    }

    #[test]
    fn satisfiable_instance_solved_at_root() {
        let inst = small();
        let reach = build_reachability(&inst);
        let out = solve_exact_bb(&inst, &reach, &mut Unlimited);
        assert!(out.optimal);
        assert_eq!(out.nodes, 1);
        assert_eq!(out.solution.objective, inst.total_reward());
        assert_eq!(solve_brute_force(&inst, &reach).unwrap().objective, inst.total_reward());
    }

    #[test]
    fn zero_budget_returns_empty() {
        let inst = small();
        let reach = build_reachability(&inst);
        let out = solve_exact_bb(&inst, &reach, &mut NodeLimit(0));
        assert!(!out.optimal);
        assert_eq!(out.solution, Solution::empty());
    }

    #[test]
    fn brute_force_cap_enforced() {
        let mut inst = small();
        let d = inst.demands[0].clone();
        inst.demands = vec![d; 17];
        let reach = build_reachability(&inst);
        assert_eq!(
            solve_brute_force(&inst, &reach),
            Err(ExactError::TooLarge { demands: 17, cap: 16 })
        );
    }
}
