//! Brute-force oracles that recompute everything from raw instance fields,
//! independent of the reachability and flow code.
#![allow(dead_code)]

use mrmd_core::mcf::FlowNetwork;
use mrmd_core::Instance;

pub fn follows(inst: &Instance, i: usize, j: usize) -> bool {
    let (a, b) = (&inst.demands[i], &inst.demands[j]);
    a.start + a.duration + inst.travel_time(a.location, b.location) <= b.start
}

pub fn first(inst: &Instance, s: usize, d: usize) -> bool {
    inst.travel_time(s, inst.demands[d].location) <= inst.demands[d].start
}

/// Cheapest way for the units of type `r` to serve every demand in `set`
/// (leg costs only when `costs`), or `None` if they cannot.
pub fn cover_cost(inst: &Instance, r: usize, set: &[usize], costs: bool) -> Option<i64> {
    let mut order = set.to_vec();
    order.sort_by_key(|&d| (inst.demands[d].start, d));
    let units: Vec<usize> = inst.types[r]
        .starts
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.location, s.count as usize))
        .collect();
    let mut last: Vec<Option<usize>> = vec![None; units.len()];
    let mut best = None;
    cover_rec(inst, &order, 0, &units, &mut last, 0, costs, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn cover_rec(
    inst: &Instance,
    order: &[usize],
    k: usize,
    units: &[usize],
    last: &mut Vec<Option<usize>>,
    spent: i64,
    costs: bool,
    best: &mut Option<i64>,
) {
    let done = match *best {
        Some(b) => !costs || spent >= b,
        None => false,
    };
    if done {
        return;
    }
    if k == order.len() {
        *best = Some(best.map_or(spent, |b: i64| b.min(spent)));
        return;
    }
    let d = order[k];
    let mut idle_tried: Vec<usize> = Vec::new();
    for u in 0..units.len() {
        let (ok, from) = match last[u] {
            None => {
                if idle_tried.contains(&units[u]) {
                    continue;
                }
                idle_tried.push(units[u]);
                (first(inst, units[u], d), units[u])
            }
            Some(p) => (follows(inst, p, d), inst.demands[p].location),
        };
        if !ok {
            continue;
        }
        let leg = if costs { inst.travel_cost(from, inst.demands[d].location) } else { 0 };
        let prev = last[u];
        last[u] = Some(d);
        cover_rec(inst, order, k + 1, units, last, spent + leg, costs, best);
        last[u] = prev;
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

/// Best reward one type can collect on its own.
pub fn best_one_type(inst: &Instance, r: usize) -> i64 {
    let pool: Vec<usize> = (0..inst.demands.len()).filter(|&d| inst.demands[d].requires.contains(&r)).collect();
    subsets(pool.len())
        .map(|s| s.iter().map(|&k| pool[k]).collect::<Vec<_>>())
        .filter(|set| cover_cost(inst, r, set, false).is_some())
        .map(|set| set.iter().map(|&d| inst.demands[d].reward).sum())
        .max()
        .unwrap_or(0)
}

/// Whether every type can serve its part of `set`.
pub fn set_feasible(inst: &Instance, set: &[usize]) -> bool {
    (0..inst.types.len()).all(|r| {
        let part: Vec<usize> = set.iter().copied().filter(|&d| inst.demands[d].requires.contains(&r)).collect();
        cover_cost(inst, r, &part, false).is_some()
    })
}

pub fn full_feasible(inst: &Instance) -> bool {
    let all: Vec<usize> = (0..inst.demands.len()).collect();
    set_feasible(inst, &all)
}

/// Optimal reward by enumerating served sets.
pub fn brute_opt(inst: &Instance) -> i64 {
    subsets(inst.demands.len())
        .filter(|s| set_feasible(inst, s))
        .map(|s| s.iter().map(|&d| inst.demands[d].reward).sum())
        .max()
        .unwrap_or(0)
}

/// Optimal reward minus travel cost by enumerating served sets.
pub fn brute_net(inst: &Instance) -> i64 {
    subsets(inst.demands.len())
        .filter_map(|s| {
            let mut net: i64 = s.iter().map(|&d| inst.demands[d].reward).sum();
            for r in 0..inst.types.len() {
                let part: Vec<usize> = s.iter().copied().filter(|&d| inst.demands[d].requires.contains(&r)).collect();
                net -= cover_cost(inst, r, &part, true)?;
            }
            Some(net)
        })
        .max()
        .unwrap_or(0)
}

/// Cheapest feasible integral flow by trying every arc flow between the
/// arc's bounds (capped at `cap`).
pub fn mcf_enumerate(net: &FlowNetwork, cap: i64) -> Option<i64> {
    let ranges: Vec<(i64, i64)> = net.arcs.iter().map(|a| (a.lower, a.upper.min(cap))).collect();
    let mut flow: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut best = None;
    loop {
        let mut balance = net.supplies.clone();
        for (a, &x) in net.arcs.iter().zip(&flow) {
            balance[a.from] -= x;
            balance[a.to] += x;
        }
        if balance.iter().all(|&b| b == 0) {
            let cost: i64 = net.arcs.iter().zip(&flow).map(|(a, &x)| a.cost * x).sum();
            best = Some(best.map_or(cost, |b: i64| b.min(cost)));
        }
        let mut k = 0;
        loop {
            if k == flow.len() {
                return best;
            }
            if flow[k] < ranges[k].1 {
                flow[k] += 1;
                break;
            }
            flow[k] = ranges[k].0;
            k += 1;
        }
    }
}
