//! LP rounding that trades a bounded stock increase for a guaranteed share
//! of the relaxation optimum, and the flow rebounding step it relies on.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::instance::Instance;
use crate::lp::{build_lp_relaxation, solve_lp, LpRelaxation, LpVar, TOL};
use crate::preprocess::{ReachabilityData, TypeView};
use crate::schedule::route_all;
use crate::solution::Solution;
use crate::{DemandIdx, TypeIdx};

/// Endpoint of a flow arc within one type's network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowNode {
    /// Start position within the view.
    Start(usize),
    /// Local demand position within the view.
    Demand(usize),
    Sink,
}

/// Positive arc flows of one type.
pub type TypeFlow = BTreeMap<(FlowNode, FlowNode), f64>;

/// A rational `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BicriteriaError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k·eps must be below 1")]
    EpsTooLarge,
    #[error("the kept demands cannot be routed with the inflated stocks; the instance is not as satisfiable as assumed")]
    NotSatisfiable,
    #[error(transparent)]
    Rebound(#[from] ReboundError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReboundError {
    #[error("shortcut from {0:?} to {1:?} is not an arc; the travel metric breaks the triangle inequality")]
    MissingShortcut(FlowNode, FlowNode),
    #[error("arc from {0:?} to {1:?} carries excess flow with no adjacent flow to reroute")]
    Stuck(FlowNode, FlowNode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rebound {
    pub flow: TypeFlow,
    /// Total arc flow before each step and after the last.
    pub totals: Vec<f64>,
}

fn arc_exists(view: &TypeView, from: FlowNode, to: FlowNode) -> bool {
    match (from, to) {
        (_, FlowNode::Sink) => true,
        (FlowNode::Start(s), FlowNode::Demand(k)) => view.start_reaches(s, k),
        (FlowNode::Demand(i), FlowNode::Demand(k)) => view.has_arc(i, k),
        _ => false,
    }
}

fn positive(flow: &TypeFlow) -> impl Iterator<Item = (&(FlowNode, FlowNode), &f64)> {
    flow.iter().filter(|(_, &v)| v > TOL)
}

/// Brings every arc flow of one type down to at most one while conserving
/// flow at demands and keeping each demand's inflow at least one. Excess on
/// an arc is rerouted around its head or tail (or both) through shortcut
/// arcs; the lowest arc is always handled first.
pub fn rebound_flows(view: &TypeView, mut flow: TypeFlow) -> Result<Rebound, ReboundError> {
    let total = |f: &TypeFlow| f.values().sum::<f64>();
    let mut totals = alloc::vec![total(&flow)];
    loop {
        let Some((&(i, j), &x)) = flow.iter().find(|(_, &v)| v > 1.0 + TOL) else { break };
        let excess = x - 1.0;
        let from_source = matches!(i, FlowNode::Start(_));
        let to_sink = j == FlowNode::Sink;
        let before = (!from_source)
            .then(|| positive(&flow).find(|(&(_, b), _)| b == i).map(|(&(h, _), &v)| (h, v)));
        let after = (!to_sink)
            .then(|| positive(&flow).find(|(&(a, _), _)| a == j).map(|(&(_, k), &v)| (k, v)));
        let (h, k, delta) = match (before, after) {
            (None, None) => {
                flow.insert((i, j), 1.0);
                totals.push(total(&flow));
                continue;
            }
            (None, Some(Some((k, v)))) => (i, k, excess.min(v)),
            (Some(Some((h, v))), None) => (h, j, excess.min(v)),
            (Some(Some((h, u))), Some(Some((k, v)))) => (h, k, excess.min(u).min(v)),
            _ => return Err(ReboundError::Stuck(i, j)),
        };
        if !arc_exists(view, h, k) {
            return Err(ReboundError::MissingShortcut(h, k));
        }
        let mut take = |a: FlowNode, b: FlowNode| {
            let v = flow.get_mut(&(a, b)).expect("arc on the rerouted path");
            *v -= delta;
            if *v <= TOL {
                flow.remove(&(a, b));
            }
        };
        if h != i {
            take(h, i);
        }
        take(i, j);
        if k != j {
            take(j, k);
        }
        *flow.entry((h, k)).or_insert(0.0) += delta;
        totals.push(total(&flow));
    }
    Ok(Rebound { flow, totals })
}

/// Flows of type `r` in a relaxation solution, multiplied by `scale`.
pub fn type_flow(lp: &LpRelaxation, x: &[f64], r: TypeIdx, scale: f64) -> TypeFlow {
    let mut out = TypeFlow::new();
    for (c, var) in lp.vars.iter().enumerate() {
        let arc = match *var {
            LpVar::FromStart { resource_type, start, demand } if resource_type == r => {
                (FlowNode::Start(start), FlowNode::Demand(demand))
            }
            LpVar::Follow { resource_type, from, to } if resource_type == r => {
                (FlowNode::Demand(from), FlowNode::Demand(to))
            }
            LpVar::ToSink { resource_type, demand } if resource_type == r => {
                (FlowNode::Demand(demand), FlowNode::Sink)
            }
            _ => continue,
        };
        if x[c] > TOL {
            out.insert(arc, x[c] * scale);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicriteriaOutcome {
    /// Routes the kept demands on `inflated`.
    pub solution: Solution,
    /// The instance with every stock raised to `⌈l/(1 − k·eps)⌉`.
    pub inflated: Instance,
    pub lp_objective: f64,
    /// Served fraction per demand in the relaxation.
    pub lp_y: Vec<f64>,
    /// Demands whose served fraction reached `1 − k·eps`.
    pub kept: Vec<DemandIdx>,
    /// Per type, the rebounded scaled relaxation flow.
    pub rebounds: Vec<Rebound>,
}

/// Inflated stock `⌈l/(1 − k·eps)⌉`.
pub fn inflate(count: u32, k: u64, eps: Ratio) -> u32 {
    let keep = eps.den - k * eps.num;
    (u64::from(count) * eps.den).div_ceil(keep) as u32
}

/// Keeps the demands served to at least `1 − k·eps` in the relaxation and
/// routes them with stocks inflated by `1/(1 − k·eps)`.
pub fn run_bicriteria(
    inst: &Instance,
    reach: &ReachabilityData,
    k: u64,
    eps: Ratio,
) -> Result<BicriteriaOutcome, BicriteriaError> {
    if k == 0 {
        return Err(BicriteriaError::ZeroK);
    }
    if eps.den == 0 || k * eps.num >= eps.den {
        return Err(BicriteriaError::EpsTooLarge);
    }
    let lp = build_lp_relaxation(inst, reach);
    let frac = solve_lp(&lp);
    let keep = 1.0 - k as f64 * eps.value();
    let kept: Vec<DemandIdx> = (0..inst.demands.len()).filter(|&d| frac.y[d] >= keep - TOL).collect();

    let mut rebounds = Vec::with_capacity(reach.views.len());
    for (r, view) in reach.views.iter().enumerate() {
        rebounds.push(rebound_flows(view, type_flow(&lp, &frac.x, r, 1.0 / keep))?);
    }

    let inflated = inst.with_stocks(|_, s| inflate(s.count, k, eps));
    let mut wide = reach.clone();
    for (r, view) in wide.views.iter_mut().enumerate() {
        let counts: Vec<u32> = inflated.types[r].starts.iter().map(|s| s.count).collect();
        *view = view.with_counts(&counts);
    }
    let (solution, _) = route_all(&inflated, &wide, &kept, false).ok_or(BicriteriaError::NotSatisfiable)?;
    Ok(BicriteriaOutcome { solution, inflated, lp_objective: frac.objective, lp_y: frac.y, kept, rebounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::small;
    use crate::preprocess::build_reachability;
    use FlowNode::{Demand as D, Sink as T, Start as S};

    fn view() -> TypeView {
        // aide view of the small fixture: d3 then d2, both reachable, d3 → d2
        let inst = small();
        build_reachability(&inst).views[1].clone()
    }

    #[test]
    fn bounded_flow_unchanged() {
        let flow: TypeFlow = [((S(0), D(0)), 1.0), ((D(0), T), 1.0)].into_iter().collect();
        let out = rebound_flows(&view(), flow.clone()).unwrap();
        assert_eq!(out.flow, flow);
    }

    #[test]
    fn source_to_sink_capped() {
        let flow: TypeFlow = [((S(0), T), 3.0)].into_iter().collect();
        let out = rebound_flows(&view(), flow).unwrap();
        assert_eq!(out.flow[&(S(0), T)], 1.0);
    }

    #[test]
    fn excess_out_of_source_shortcut() {
        let flow: TypeFlow =
            [((S(0), D(0)), 2.0), ((D(0), D(1)), 1.0), ((D(0), T), 1.0), ((D(1), T), 1.0)].into_iter().collect();
        let out = rebound_flows(&view(), flow).unwrap();
        assert_eq!(out.flow[&(S(0), D(0))], 1.0);
        assert_eq!(out.flow[&(S(0), D(1))], 1.0);
        assert!(!out.flow.contains_key(&(D(0), D(1))));
        assert!(out.totals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn inflation_rounds_up() {
        assert_eq!(inflate(5, 5, Ratio::new(1, 100)), 6);
        assert_eq!(inflate(10, 2, Ratio::new(1, 10)), 13);
        assert_eq!(inflate(4, 2, Ratio::new(1, 10)), 5);
    }

    #[test]
    fn satisfiable_keeps_everything() {
        let inst = small();
        let reach = build_reachability(&inst);
        let out = run_bicriteria(&inst, &reach, 2, Ratio::new(1, 10)).unwrap();
        assert_eq!(out.kept, [0, 1, 2]);
        assert_eq!(out.solution.objective, inst.total_reward());
    }

    #[test]
    fn parameters_checked() {
        let inst = small();
        let reach = build_reachability(&inst);
        assert_eq!(run_bicriteria(&inst, &reach, 0, Ratio::new(1, 10)), Err(BicriteriaError::ZeroK));
        assert_eq!(run_bicriteria(&inst, &reach, 10, Ratio::new(1, 10)), Err(BicriteriaError::EpsTooLarge));
    }
}
