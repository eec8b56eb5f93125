//! Flow constructions over a single-type subproblem: optimal one-type
//! scheduling, routing a fixed served set, full feasibility, and turning
//! flows back into unit paths.

use alloc::vec::Vec;

use crate::instance::Instance;
use crate::mcf::{solve_min_cost_flow, FlowNetwork, NodeCapacity, UNBOUNDED};
use crate::preprocess::{ReachabilityData, TypeView};
use crate::solution::Solution;
use crate::{DemandIdx, LocIdx, TypeIdx};

/// What a node of a [`TypeNetwork`] stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Sink,
    /// Start position within the view.
    Start(usize),
    /// A demand as a single node (carrying a node capacity).
    Demand(usize),
    /// Entry half of a demand.
    DemandIn(usize),
    /// Exit half of a demand.
    DemandOut(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNetwork {
    pub network: FlowNetwork,
    pub roles: Vec<NodeRole>,
}

/// How a demand takes part in a one-type schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presence {
    /// May be served or skipped.
    Free,
    /// Must be served.
    Forced,
    /// Must not be served.
    Excluded,
}

/// Demand paths out of each start position, as local view positions.
pub type LocalPaths = Vec<(usize, Vec<usize>)>;

const SOURCE: usize = 0;
const SINK: usize = 1;

/// One-type scheduling network. Units leave the source through their start
/// node and either idle straight to the sink or enter demand `j` at `u_j`.
/// The arc `u_j → v_j` carries reward `rewards[j]` as cost `−rewards[j]`;
/// `v_j` continues to a successor or the sink. All demand arcs have capacity
/// one. With `leg_scale = Some(k)`, every travel leg also costs `k` times its
/// travel cost.
pub fn build_one_type_network(
    inst: &Instance,
    view: &TypeView,
    rewards: &[i64],
    presence: &[Presence],
    leg_scale: Option<i64>,
) -> TypeNetwork {
    let n = view.len();
    let m = view.units() as i64;
    let mut net = FlowNetwork::with_nodes(2);
    let mut roles = alloc::vec![NodeRole::Source, NodeRole::Sink];
    net.supplies[SOURCE] = m;
    net.supplies[SINK] = -m;
    let first_start = net.node_count();
    for pos in 0..view.starts.len() {
        net.add_node(0);
        roles.push(NodeRole::Start(pos));
    }
    let first_demand = net.node_count();
    for j in 0..n {
        net.add_node(0);
        net.add_node(0);
        roles.push(NodeRole::DemandIn(j));
        roles.push(NodeRole::DemandOut(j));
    }
    let u = |j: usize| first_demand + 2 * j;
    let v = |j: usize| first_demand + 2 * j + 1;
    let loc = |j: usize| inst.demands[view.demands[j]].location;
    let leg = |a: LocIdx, b: LocIdx| leg_scale.map_or(0, |k| k * inst.travel_cost(a, b));
    let live = |j: usize| presence[j] != Presence::Excluded;

    for (pos, s) in view.starts.iter().enumerate() {
        let c = s.count as i64;
        net.add_arc(SOURCE, first_start + pos, 0, c, 0);
        net.add_arc(first_start + pos, SINK, 0, c, 0);
        for &j in s.reach.iter().filter(|&&j| live(j)) {
            net.add_arc(first_start + pos, u(j), 0, 1, leg(s.location, loc(j)));
        }
    }
    for j in (0..n).filter(|&j| live(j)) {
        let lower = i64::from(presence[j] == Presence::Forced);
        net.add_arc(u(j), v(j), lower, 1, -rewards[j]);
        net.add_arc(v(j), SINK, 0, 1, 0);
        for &k in view.succ[j].iter().filter(|&&k| live(k)) {
            net.add_arc(v(j), u(k), 0, 1, leg(loc(j), loc(k)));
        }
    }
    TypeNetwork { network: net, roles }
}

/// Optimum of a one-type schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneTypeOptimum {
    /// Collected rewards minus scaled leg costs.
    pub value: i64,
    /// Served local positions, ascending.
    pub served: Vec<usize>,
    pub paths: LocalPaths,
}

/// Solves the one-type network; `None` when forced demands cannot all be
/// served.
pub fn solve_one_type(
    inst: &Instance,
    view: &TypeView,
    rewards: &[i64],
    presence: &[Presence],
    leg_scale: Option<i64>,
) -> Option<OneTypeOptimum> {
    let tn = build_one_type_network(inst, view, rewards, presence, leg_scale);
    let sol = solve_min_cost_flow(&tn.network).expect("one-type networks are balanced DAGs");
    if !sol.is_optimal() {
        return None;
    }
    let paths = decompose_flow_to_paths(&tn, view, &sol.flow).expect("solver flows decompose");
    let mut served: Vec<usize> = paths.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    served.sort_unstable();
    Some(OneTypeOptimum { value: -sol.cost, served, paths })
}

/// Maximum-reward schedule for one type in isolation. The returned solution
/// covers only the view's type.
pub fn solve_1r1d(inst: &Instance, view: &TypeView) -> Solution {
    let rewards: Vec<i64> = view.demands.iter().map(|&d| inst.demands[d].reward).collect();
    let presence = alloc::vec![Presence::Free; view.len()];
    let opt = solve_one_type(inst, view, &rewards, &presence, None).expect("nothing is forced");
    let r = view.resource_type;
    Solution::assemble(
        inst,
        opt.served.iter().map(|&k| view.demands[k]),
        to_raw(view, &opt.paths).map(|(loc, p)| (r, loc, p)),
    )
}

/// Routing network for a fixed served set: the source feeds each start up to
/// its stock and may send spare units straight to the sink; each demand node
/// must carry exactly one unit if served and none otherwise. With
/// `with_costs`, travel legs cost their travel cost.
pub fn build_routing_network(
    inst: &Instance,
    view: &TypeView,
    served: &[bool],
    with_costs: bool,
) -> TypeNetwork {
    let m = view.units() as i64;
    let mut net = FlowNetwork::with_nodes(2);
    let mut roles = alloc::vec![NodeRole::Source, NodeRole::Sink];
    net.supplies[SOURCE] = m;
    net.supplies[SINK] = -m;
    net.add_arc(SOURCE, SINK, 0, UNBOUNDED, 0);
    let first_start = net.node_count();
    for pos in 0..view.starts.len() {
        net.add_node(0);
        roles.push(NodeRole::Start(pos));
    }
    let first_demand = net.node_count();
    for j in 0..view.len() {
        let node = net.add_node(0);
        roles.push(NodeRole::Demand(j));
        net.set_node_capacity(node, NodeCapacity::exact(i64::from(served[j])));
    }
    let loc = |j: usize| inst.demands[view.demands[j]].location;
    let leg = |a: LocIdx, b: LocIdx| if with_costs { inst.travel_cost(a, b) } else { 0 };
    for (pos, s) in view.starts.iter().enumerate() {
        net.add_arc(SOURCE, first_start + pos, 0, s.count as i64, 0);
        for &j in s.reach.iter().filter(|&&j| served[j]) {
            net.add_arc(first_start + pos, first_demand + j, 0, 1, leg(s.location, loc(j)));
        }
    }
    for j in (0..view.len()).filter(|&j| served[j]) {
        net.add_arc(first_demand + j, SINK, 0, 1, 0);
        for &k in view.succ[j].iter().filter(|&&k| served[k]) {
            net.add_arc(first_demand + j, first_demand + k, 0, 1, leg(loc(j), loc(k)));
        }
    }
    TypeNetwork { network: net, roles }
}

/// Routes exactly the served local demands of one type. Returns the total
/// leg cost (zero unless `with_costs`) and the unit paths, or `None` when
/// the stock cannot cover them.
pub fn route_type(
    inst: &Instance,
    view: &TypeView,
    served: &[bool],
    with_costs: bool,
) -> Option<(i64, LocalPaths)> {
    let tn = build_routing_network(inst, view, served, with_costs);
    let sol = solve_min_cost_flow(&tn.network).expect("routing networks are balanced DAGs");
    if !sol.is_optimal() {
        return None;
    }
    let paths = decompose_flow_to_paths(&tn, view, &sol.flow).expect("solver flows decompose");
    Some((sol.cost, paths))
}

/// Routes a served set for every type. `None` as soon as one type fails.
/// The solution's objective is the gross reward; the returned integer is the
/// total leg cost.
pub fn route_all(
    inst: &Instance,
    reach: &ReachabilityData,
    served: &[DemandIdx],
    with_costs: bool,
) -> Option<(Solution, i64)> {
    let mut mask = alloc::vec![false; inst.demands.len()];
    for &d in served {
        mask[d] = true;
    }
    let mut raw = Vec::new();
    let mut cost = 0;
    for view in &reach.views {
        let local: Vec<bool> = view.demands.iter().map(|&d| mask[d]).collect();
        let (c, paths) = route_type(inst, view, &local, with_costs)?;
        cost += c;
        raw.extend(to_raw(view, &paths).map(|(loc, p)| (view.resource_type, loc, p)));
    }
    Some((Solution::assemble(inst, served.iter().copied(), raw), cost))
}

/// Whether every demand can be served at once, with witness paths.
pub fn check_full_feasibility(inst: &Instance, reach: &ReachabilityData) -> Option<Solution> {
    let all: Vec<DemandIdx> = (0..inst.demands.len()).collect();
    route_all(inst, reach, &all, false).map(|(s, _)| s)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("arc {0} carries negative flow")]
    Negative(usize),
    #[error("flow is not conserved at node {0}")]
    NotConserved(usize),
    #[error("start position {0} sends more units than its stock")]
    OverStock(usize),
}

/// Peels unit paths off an integral flow, always following the lowest
/// numbered arc that still carries flow. Each path starts at a start node and
/// lists the demands it passes, as local positions.
pub fn decompose_flow_to_paths(
    tn: &TypeNetwork,
    view: &TypeView,
    flow: &[i64],
) -> Result<LocalPaths, DecomposeError> {
    let net = &tn.network;
    let mut out_arcs: Vec<Vec<usize>> = alloc::vec![Vec::new(); net.node_count()];
    for (k, a) in net.arcs.iter().enumerate() {
        if flow[k] < 0 {
            return Err(DecomposeError::Negative(k));
        }
        out_arcs[a.from].push(k);
    }
    let mut rest = flow.to_vec();
    let mut paths = Vec::new();
    for (node, role) in tn.roles.iter().enumerate() {
        let NodeRole::Start(pos) = *role else { continue };
        let mut used = 0u32;
        loop {
            let Some(&first) = out_arcs[node]
                .iter()
                .find(|&&k| rest[k] > 0 && tn.roles[net.arcs[k].to] != NodeRole::Sink)
            else {
                break;
            };
            rest[first] -= 1;
            let mut demands = Vec::new();
            let mut at = net.arcs[first].to;
            while tn.roles[at] != NodeRole::Sink {
                match tn.roles[at] {
                    NodeRole::Demand(j) | NodeRole::DemandIn(j) => demands.push(j),
                    _ => {}
                }
                let k = *out_arcs[at].iter().find(|&&k| rest[k] > 0).ok_or(DecomposeError::NotConserved(at))?;
                rest[k] -= 1;
                at = net.arcs[k].to;
            }
            paths.push((pos, demands));
            used += 1;
        }
        if used > view.starts[pos].count {
            return Err(DecomposeError::OverStock(pos));
        }
    }
    Ok(paths)
}

/// Converts local paths to `(start location, demand indices)` pairs.
pub fn to_raw<'a>(
    view: &'a TypeView,
    paths: &'a LocalPaths,
) -> impl Iterator<Item = (LocIdx, Vec<DemandIdx>)> + 'a {
    paths
        .iter()
        .map(move |(pos, p)| (view.starts[*pos].location, p.iter().map(|&k| view.demands[k]).collect()))
}

/// Unit paths of one type in `sol`, as local positions.
pub fn local_paths(view: &TypeView, sol: &Solution, r: TypeIdx) -> LocalPaths {
    sol.paths
        .iter()
        .filter(|p| p.resource_type == r)
        .filter_map(|p| {
            let pos = view.start_position(p.start)?;
            Some((pos, p.demands.iter().filter_map(|&d| view.local(d)).collect()))
        })
        .collect()
}
