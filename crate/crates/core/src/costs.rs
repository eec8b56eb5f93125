//! Travel costs: maximizing reward minus the cost of every travel leg.

use crate::approx::{run_algorithm_a, ApproxError};
use crate::budget::Budget;
use crate::exact::solve_exact_net;
use crate::instance::Instance;
use crate::preprocess::ReachabilityData;
use crate::solution::{Certificate, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostedObjective {
    pub gross: i64,
    pub travel_cost: i64,
    pub net: i64,
}

impl CostedObjective {
    pub fn of(inst: &Instance, sol: &Solution) -> Self {
        let gross = sol.gross_reward(inst);
        let travel_cost = sol.travel_cost(inst);
        CostedObjective { gross, travel_cost, net: gross - travel_cost }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostedOutcome {
    /// Objective is the net value.
    pub solution: Solution,
    pub objective: CostedObjective,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostsError {
    #[error("travel cost {cost} between `{from}` and `{to}` exceeds the smallest reward divided by twice the number of types")]
    CostBound { cost: i64, from: alloc::string::String, to: alloc::string::String },
    #[error(transparent)]
    Approx(#[from] ApproxError),
}

/// Branch-and-bound maximizing reward minus travel cost. Each type's
/// relaxation charges its legs, and fixed served sets are routed at minimum
/// cost.
pub fn solve_exact_costs<B: Budget + ?Sized>(
    inst: &Instance,
    reach: &ReachabilityData,
    budget: &mut B,
) -> CostedOutcome {
    let out = solve_exact_net(inst, reach, budget);
    let objective = CostedObjective::of(inst, &out.solution);
    CostedOutcome { solution: out.solution, objective, optimal: out.optimal }
}

/// Checks that every travel cost among the start and demand locations is at
/// most `w_min/(2|R|)`.
pub fn check_cost_bound(inst: &Instance) -> Result<(), CostsError> {
    let Some(w_min) = inst.demands.iter().map(|d| d.reward).min() else {
        return Ok(());
    };
    let mut locs: alloc::vec::Vec<usize> = inst.demands.iter().map(|d| d.location).collect();
    locs.extend(inst.types.iter().flat_map(|t| t.starts.iter().map(|s| s.location)));
    locs.sort_unstable();
    locs.dedup();
    let factor = 2 * inst.types.len() as i64;
    for &a in &locs {
        for &b in &locs {
            let cost = inst.travel_cost(a, b);
            if factor * cost > w_min {
                return Err(CostsError::CostBound {
                    cost,
                    from: inst.locations[a].id.clone(),
                    to: inst.locations[b].id.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Runs the type-by-type heuristic ignoring costs, then charges the legs of
/// its paths. Without `force` the cost bound must hold; with it a violated
/// bound only withholds the certificate.
pub fn run_algorithm_a_costs(
    inst: &Instance,
    reach: &ReachabilityData,
    force: bool,
) -> Result<(Solution, CostedObjective), CostsError> {
    let bound = check_cost_bound(inst);
    if !force {
        bound.clone()?;
    }
    let mut sol = run_algorithm_a(inst, reach)?;
    let objective = CostedObjective::of(inst, &sol);
    sol.objective = objective.net;
    sol.certificate = bound.is_ok().then_some(Certificate::CostTypes(inst.types.len()));
    Ok((sol, objective))
}
