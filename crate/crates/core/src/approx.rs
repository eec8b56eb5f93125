//! Approximation algorithms with ratio certificates for instances whose
//! resources all start at one location, the conflict graph they rely on, and
//! the exact greedy for zero-travel single-start-time instances.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::instance::Instance;
use crate::preprocess::ReachabilityData;
use crate::schedule::{solve_one_type, to_raw, LocalPaths, Presence};
use crate::solution::{Certificate, Solution};
use crate::{DemandIdx, LocIdx, TypeIdx};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("resources do not all start at the same location")]
    NoSharedStart,
    #[error("coloring has {found} nodes but the conflict graph has {expected}")]
    ColoringSize { expected: usize, found: usize },
    #[error("node {node} does not get {b} distinct colors below {a}")]
    ColoringNode { node: usize, a: usize, b: usize },
    #[error("adjacent nodes {0} and {1} share a color")]
    ColoringClash(usize, usize),
    #[error("a proper coloring is required (one color per node)")]
    NotProper,
    #[error("travel times between used locations are not all zero")]
    NonzeroTravel,
    #[error("demands do not all share one start time")]
    MixedStartTimes,
    #[error("demand `{0}` has a negative start time")]
    NegativeStart(alloc::string::String),
    #[error("demand `{0}` requires neither a single type nor all types")]
    NotOneOrAll(alloc::string::String),
    #[error("demand `{0}` does not have duration 1")]
    NotUnitDuration(alloc::string::String),
}

/// Distinct requirement sets, joined when they intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    /// Requirement set of each node, in order of first appearance.
    pub nodes: Vec<Vec<TypeIdx>>,
    /// Neighbors of each node, ascending.
    pub adj: Vec<Vec<usize>>,
    /// Demands whose requirement set is the node's set, ascending.
    pub buckets: Vec<Vec<DemandIdx>>,
}

impl ConflictGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }
}

pub fn build_conflict_graph(inst: &Instance) -> ConflictGraph {
    let mut nodes: Vec<Vec<TypeIdx>> = Vec::new();
    let mut buckets: Vec<Vec<DemandIdx>> = Vec::new();
    for (d, dem) in inst.demands.iter().enumerate() {
        match nodes.iter().position(|v| *v == dem.requires) {
            Some(k) => buckets[k].push(d),
            None => {
                nodes.push(dem.requires.clone());
                buckets.push(alloc::vec![d]);
            }
        }
    }
    let adj = (0..nodes.len())
        .map(|u| {
            (0..nodes.len())
                .filter(|&v| v != u && nodes[u].iter().any(|r| nodes[v].binary_search(r).is_ok()))
                .collect()
        })
        .collect();
    ConflictGraph { nodes, adj, buckets }
}

/// An a:b-coloring: every node gets `b` of the colors `0..a`. Proper
/// colorings have `b = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub a: usize,
    pub b: usize,
    pub sets: Vec<Vec<usize>>,
}

impl Coloring {
    pub fn proper(colors: Vec<usize>) -> Self {
        let a = colors.iter().max().map_or(0, |&c| c + 1);
        Coloring { a, b: 1, sets: colors.into_iter().map(|c| alloc::vec![c]).collect() }
    }

    pub fn validate(&self, g: &ConflictGraph) -> Result<(), ApproxError> {
        if self.sets.len() != g.len() {
            return Err(ApproxError::ColoringSize { expected: g.len(), found: self.sets.len() });
        }
        for (node, set) in self.sets.iter().enumerate() {
            let mut s = set.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != self.b || set.len() != self.b || s.iter().any(|&c| c >= self.a) {
                return Err(ApproxError::ColoringNode { node, a: self.a, b: self.b });
            }
        }
        for u in 0..g.len() {
            for &v in g.adj[u].iter().filter(|&&v| v > u) {
                if self.sets[u].iter().any(|c| self.sets[v].contains(c)) {
                    return Err(ApproxError::ColoringClash(u, v));
                }
            }
        }
        Ok(())
    }

    /// Nodes holding color `c`.
    pub fn class(&self, c: usize) -> Vec<usize> {
        (0..self.sets.len()).filter(|&v| self.sets[v].contains(&c)).collect()
    }
}

/// Largest degree first (ties to lower index), each node taking the smallest
/// color no neighbor has yet.
pub fn greedy_color(g: &ConflictGraph) -> Coloring {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (core::cmp::Reverse(g.adj[v].len()), v));
    let mut color: Vec<Option<usize>> = alloc::vec![None; g.len()];
    for v in order {
        let taken: Vec<usize> = g.adj[v].iter().filter_map(|&u| color[u]).collect();
        color[v] = (0..).find(|c| !taken.contains(c));
    }
    Coloring::proper(color.into_iter().map(|c| c.unwrap_or(0)).collect())
}

fn shared_start(inst: &Instance) -> Result<LocIdx, ApproxError> {
    inst.shared_start().ok_or(ApproxError::NoSharedStart)
}

/// Best one-type schedule over `allowed` demands of type `r`.
fn best_schedule(
    inst: &Instance,
    reach: &ReachabilityData,
    r: TypeIdx,
    allowed: &[bool],
) -> (i64, LocalPaths) {
    let view = reach.view(r);
    let rewards: Vec<i64> = view.demands.iter().map(|&d| inst.demands[d].reward).collect();
    let presence: Vec<Presence> = view
        .demands
        .iter()
        .map(|&d| if allowed[d] { Presence::Free } else { Presence::Excluded })
        .collect();
    let opt = solve_one_type(inst, view, &rewards, &presence, None).expect("nothing is forced");
    (opt.value, opt.paths)
}

/// Type order by stock, ties to lower index.
fn by_stock(inst: &Instance) -> Vec<TypeIdx> {
    let mut order: Vec<TypeIdx> = (0..inst.types.len()).collect();
    order.sort_by_key(|&r| (inst.stock(r), r));
    order
}

/// Schedules types one at a time, smallest stock first, each over the
/// demands no earlier type needs, and keeps the most valuable round. Every
/// other type a served demand requires copies that round's unit paths,
/// skipping demands it is not needed for.
pub fn run_algorithm_a(inst: &Instance, reach: &ReachabilityData) -> Result<Solution, ApproxError> {
    let start = shared_start(inst)?;
    let mut allowed = alloc::vec![true; inst.demands.len()];
    let mut best: Option<(i64, TypeIdx, LocalPaths)> = None;
    for r in by_stock(inst) {
        let (value, paths) = best_schedule(inst, reach, r, &allowed);
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, r, paths));
        }
        for &d in &reach.view(r).demands {
            allowed[d] = false;
        }
    }
    let Some((_, win, paths)) = best else {
        return Ok(Solution { certificate: Some(Certificate::Types(0)), ..Solution::empty() });
    };
    let routes: Vec<Vec<DemandIdx>> = to_raw(reach.view(win), &paths).map(|(_, p)| p).collect();
    let served: Vec<DemandIdx> = routes.iter().flatten().copied().collect();
    let mut raw = Vec::new();
    for r in 0..inst.types.len() {
        for route in &routes {
            let own: Vec<DemandIdx> = route.iter().copied().filter(|&d| inst.demands[d].requires_type(r)).collect();
            raw.push((r, start, own));
        }
    }
    let mut sol = Solution::assemble(inst, served, raw);
    sol.certificate = Some(Certificate::Types(inst.types.len()));
    Ok(sol)
}

/// For a proper coloring, the coloring version of [`run_algorithm_c`].
pub fn run_algorithm_b(
    inst: &Instance,
    reach: &ReachabilityData,
    coloring: &Coloring,
) -> Result<Solution, ApproxError> {
    if coloring.b != 1 {
        return Err(ApproxError::NotProper);
    }
    run_algorithm_c(inst, reach, coloring)
}

/// For each color, schedules every bucket of that color class with its
/// smallest-stock type and sums the values; returns the best class, with all
/// types of each bucket copying its schedule.
pub fn run_algorithm_c(
    inst: &Instance,
    reach: &ReachabilityData,
    coloring: &Coloring,
) -> Result<Solution, ApproxError> {
    let start = shared_start(inst)?;
    let g = build_conflict_graph(inst);
    coloring.validate(&g)?;
    let rep = |v: usize| *g.nodes[v].iter().min_by_key(|&&r| (inst.stock(r), r)).expect("nonempty set");

    let mut best: Option<(i64, Vec<(usize, LocalPaths)>)> = None;
    for c in 0..coloring.a {
        let mut total = 0;
        let mut parts = Vec::new();
        for v in coloring.class(c) {
            let mut allowed = alloc::vec![false; inst.demands.len()];
            for &d in &g.buckets[v] {
                allowed[d] = true;
            }
            let (value, paths) = best_schedule(inst, reach, rep(v), &allowed);
            total += value;
            parts.push((v, paths));
        }
        if best.as_ref().is_none_or(|b| total > b.0) {
            best = Some((total, parts));
        }
    }
    let certificate = if coloring.b == 1 {
        Certificate::Colors(coloring.a)
    } else {
        Certificate::Fold { a: coloring.a, b: coloring.b }
    };
    let Some((_, parts)) = best else {
        return Ok(Solution { certificate: Some(certificate), ..Solution::empty() });
    };
    let mut served = Vec::new();
    let mut raw = Vec::new();
    for (v, paths) in parts {
        let routes: Vec<Vec<DemandIdx>> = to_raw(reach.view(rep(v)), &paths).map(|(_, p)| p).collect();
        served.extend(routes.iter().flatten().copied());
        for &r in &g.nodes[v] {
            raw.extend(routes.iter().map(|p| (r, start, p.clone())));
        }
    }
    let mut sol = Solution::assemble(inst, served, raw);
    sol.certificate = Some(certificate);
    Ok(sol)
}

fn check_zero_travel(inst: &Instance) -> Result<(), ApproxError> {
    let mut used: Vec<LocIdx> = inst.demands.iter().map(|d| d.location).collect();
    used.extend(inst.types.iter().flat_map(|t| t.starts.iter().map(|s| s.location)));
    used.sort_unstable();
    used.dedup();
    for &a in &used {
        for &b in &used {
            if inst.travel_time(a, b) != 0 {
                return Err(ApproxError::NonzeroTravel);
            }
        }
    }
    Ok(())
}

fn check_one_or_all(inst: &Instance) -> Result<(), ApproxError> {
    for d in &inst.demands {
        if d.requires.len() != 1 && d.requires.len() != inst.types.len() {
            return Err(ApproxError::NotOneOrAll(d.id.clone()));
        }
        if d.start < 0 {
            return Err(ApproxError::NegativeStart(d.id.clone()));
        }
    }
    Ok(())
}

/// Start locations of the units of each type, one entry per unit.
fn unit_starts(inst: &Instance) -> Vec<Vec<LocIdx>> {
    inst.types
        .iter()
        .map(|t| t.starts.iter().flat_map(|s| core::iter::repeat_n(s.location, s.count as usize)).collect())
        .collect()
}

/// Serves `group` (all at one time, each unit used once) optimally; returns
/// the demands taken by units `0, 1, …` of each type.
fn one_time_greedy(inst: &Instance, group: &[DemandIdx]) -> Vec<Vec<DemandIdx>> {
    let nr = inst.types.len();
    let mut all = Vec::new();
    let mut single: Vec<Vec<DemandIdx>> = alloc::vec![Vec::new(); nr];
    for &d in group {
        let req = &inst.demands[d].requires;
        if req.len() == nr {
            all.push(d);
        } else {
            single[req[0]].push(d);
        }
    }
    let by_reward = |v: &mut Vec<DemandIdx>| v.sort_by_key(|&d| (core::cmp::Reverse(inst.demands[d].reward), d));
    by_reward(&mut all);
    single.iter_mut().for_each(by_reward);

    let m = (0..nr).map(|r| inst.stock(r) as usize).min().unwrap_or(0);
    let mut taken: Vec<Vec<DemandIdx>> = alloc::vec![Vec::new(); nr];
    let mut heads = alloc::vec![0usize; nr];
    for r in 0..nr {
        let surplus = (inst.stock(r) as usize - m).min(single[r].len());
        taken[r].extend_from_slice(&single[r][..surplus]);
        heads[r] = surplus;
    }
    let mut next_all = 0;
    for _ in 0..m {
        let singles: i64 = (0..nr).filter_map(|r| single[r].get(heads[r])).map(|&d| inst.demands[d].reward).sum();
        match all.get(next_all) {
            Some(&d) if singles <= inst.demands[d].reward => {
                for t in taken.iter_mut() {
                    t.push(d);
                }
                next_all += 1;
            }
            _ => {
                for r in 0..nr {
                    if let Some(&d) = single[r].get(heads[r]) {
                        taken[r].push(d);
                        heads[r] += 1;
                    }
                }
            }
        }
    }
    taken
}

/// Exact for zero travel with all demands at one start time and each demand
/// needing one type or all of them; durations are ignored and every unit
/// serves at most one demand.
pub fn run_algorithm_e(inst: &Instance) -> Result<Solution, ApproxError> {
    check_zero_travel(inst)?;
    check_one_or_all(inst)?;
    if inst.demands.windows(2).any(|w| w[0].start != w[1].start) {
        return Err(ApproxError::MixedStartTimes);
    }
    let all: Vec<DemandIdx> = (0..inst.demands.len()).collect();
    let taken = one_time_greedy(inst, &all);
    let starts = unit_starts(inst);
    let served: Vec<DemandIdx> = taken.iter().flatten().copied().collect();
    let raw = taken
        .iter()
        .enumerate()
        .flat_map(|(r, ds)| ds.iter().enumerate().map(move |(u, &d)| (r, u, d)))
        .map(|(r, u, d)| (r, starts[r][u], alloc::vec![d]))
        .collect::<Vec<_>>();
    Ok(Solution::assemble(inst, served, raw))
}

/// Zero travel and unit durations: each start time is an independent
/// one-time problem with the full stock, and unit paths run through the
/// groups in time order.
pub fn run_algorithm_e_grouped(inst: &Instance) -> Result<Solution, ApproxError> {
    check_zero_travel(inst)?;
    check_one_or_all(inst)?;
    if let Some(d) = inst.demands.iter().find(|d| d.duration != 1) {
        return Err(ApproxError::NotUnitDuration(d.id.clone()));
    }
    let mut groups: BTreeMap<i64, Vec<DemandIdx>> = BTreeMap::new();
    for (d, dem) in inst.demands.iter().enumerate() {
        groups.entry(dem.start).or_default().push(d);
    }
    let starts = unit_starts(inst);
    let mut routes: Vec<Vec<Vec<DemandIdx>>> = starts.iter().map(|s| alloc::vec![Vec::new(); s.len()]).collect();
    let mut served = Vec::new();
    for group in groups.values() {
        for (r, ds) in one_time_greedy(inst, group).into_iter().enumerate() {
            for (u, d) in ds.into_iter().enumerate() {
                routes[r][u].push(d);
                served.push(d);
            }
        }
    }
    let raw = routes
        .into_iter()
        .enumerate()
        .flat_map(|(r, units)| units.into_iter().enumerate().map(move |(u, p)| (r, u, p)))
        .map(|(r, u, p)| (r, starts[r][u], p))
        .collect::<Vec<_>>();
    Ok(Solution::assemble(inst, served, raw))
}
