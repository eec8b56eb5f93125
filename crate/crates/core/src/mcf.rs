//! Integral min-cost flow with arc lower bounds and node capacities.
//!
//! Lower bounds are eliminated into node excesses, which a super source and
//! super sink then balance. Successive shortest paths with node potentials
//! route the excess; the initial potentials come from one pass in
//! topological order (Bellman-Ford when the residual graph has a cycle), so
//! negative arc costs are fine as long as no negative cycle exists.
//! Equal-cost paths are broken by lowest node id, so results are
//! deterministic.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::Reverse;

/// Upper bound standing in for "no capacity limit".
pub const UNBOUNDED: i64 = 1 << 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: i64,
}

/// Bounds on the total flow passing through a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCapacity {
    pub lower: i64,
    pub upper: i64,
}

impl NodeCapacity {
    pub fn exact(v: i64) -> Self {
        NodeCapacity { lower: v, upper: v }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    /// Net supply per node; demands are negative.
    pub supplies: Vec<i64>,
    pub arcs: Vec<FlowArc>,
    pub node_caps: Vec<Option<NodeCapacity>>,
}

impl FlowNetwork {
    pub fn with_nodes(n: usize) -> Self {
        FlowNetwork { supplies: alloc::vec![0; n], arcs: Vec::new(), node_caps: alloc::vec![None; n] }
    }

    pub fn node_count(&self) -> usize {
        self.supplies.len()
    }

    pub fn add_node(&mut self, supply: i64) -> usize {
        self.supplies.push(supply);
        self.node_caps.push(None);
        self.supplies.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, lower: i64, upper: i64, cost: i64) -> usize {
        self.arcs.push(FlowArc { from, to, lower, upper, cost });
        self.arcs.len() - 1
    }

    pub fn set_node_capacity(&mut self, node: usize, cap: NodeCapacity) {
        self.node_caps[node] = Some(cap);
    }

    pub fn has_node_capacities(&self) -> bool {
        self.node_caps.iter().any(Option::is_some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    /// Flow on each arc of the solved network; all zero when infeasible.
    pub flow: Vec<i64>,
    pub cost: i64,
    pub status: FlowStatus,
}

impl FlowSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == FlowStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McfError {
    #[error("supplies sum to {0}, not zero")]
    Unbalanced(i64),
    #[error("arc {0} has lower bound above its upper bound")]
    InvertedBounds(usize),
    #[error("arc {0} refers to a node outside the network")]
    BadEndpoint(usize),
    #[error("the network has a negative-cost cycle")]
    NegativeCycle,
}

/// A node-capacity-free network equivalent to the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitNetwork {
    pub network: FlowNetwork,
    /// Position of each input arc in `network.arcs`.
    pub arc_map: Vec<usize>,
    /// For each capacitated input node, the arc joining its two halves.
    pub split_arcs: Vec<Option<usize>>,
}

/// Replaces each capacitated node `i` by an entry half `i'` (keeping index
/// `i` and all incoming arcs) and an exit half `i''` (new index, all outgoing
/// arcs), joined by an arc bounded by the node capacity at cost 0.
pub fn apply_node_capacities(net: &FlowNetwork) -> SplitNetwork {
    let n = net.node_count();
    let mut out = FlowNetwork::with_nodes(n);
    out.supplies.clone_from(&net.supplies);
    let mut exit = (0..n).collect::<Vec<_>>();
    for (i, cap) in net.node_caps.iter().enumerate() {
        if cap.is_some() {
            exit[i] = out.add_node(0);
        }
    }
    let arc_map = net
        .arcs
        .iter()
        .map(|a| out.add_arc(exit[a.from], a.to, a.lower, a.upper, a.cost))
        .collect();
    let split_arcs = net
        .node_caps
        .iter()
        .enumerate()
        .map(|(i, cap)| cap.map(|c| out.add_arc(i, exit[i], c.lower, c.upper, 0)))
        .collect();
    SplitNetwork { network: out, arc_map, split_arcs }
}

/// Minimum-cost feasible integral flow, or [`FlowStatus::Infeasible`].
pub fn solve_min_cost_flow(net: &FlowNetwork) -> Result<FlowSolution, McfError> {
    if net.has_node_capacities() {
        let split = apply_node_capacities(net);
        let inner = solve_plain(&split.network)?;
        let flow = if inner.is_optimal() {
            split.arc_map.iter().map(|&k| inner.flow[k]).collect()
        } else {
            alloc::vec![0; net.arcs.len()]
        };
        return Ok(FlowSolution { flow, cost: inner.cost, status: inner.status });
    }
    solve_plain(net)
}

struct Residual {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual { adj: alloc::vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), cost: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let e = self.to.len();
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        self.to.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.cost.extend([cost, -cost]);
        e
    }
}

fn solve_plain(net: &FlowNetwork) -> Result<FlowSolution, McfError> {
    let n = net.node_count();
    let total: i64 = net.supplies.iter().sum();
    if total != 0 {
        return Err(McfError::Unbalanced(total));
    }
    let mut excess = net.supplies.clone();
    for (k, a) in net.arcs.iter().enumerate() {
        if a.from >= n || a.to >= n {
            return Err(McfError::BadEndpoint(k));
        }
        if a.lower > a.upper {
            return Err(McfError::InvertedBounds(k));
        }
        excess[a.from] -= a.lower;
        excess[a.to] += a.lower;
    }

    let (src, dst) = (n, n + 1);
    let mut g = Residual::new(n + 2);
    let edge_of: Vec<usize> =
        net.arcs.iter().map(|a| g.add(a.from, a.to, a.upper - a.lower, a.cost)).collect();
    let mut required = 0;
    for (i, &e) in excess.iter().enumerate() {
        if e > 0 {
            g.add(src, i, e, 0);
            required += e;
        } else if e < 0 {
            g.add(i, dst, -e, 0);
        }
    }

    let mut pot = initial_potentials(&g, src)?;
    let mut sent = 0;
    let mut dist = alloc::vec![i64::MAX; n + 2];
    let mut parent = alloc::vec![usize::MAX; n + 2];
    while sent < required {
        dist.fill(i64::MAX);
        parent.fill(usize::MAX);
        dist[src] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &g.adj[u] {
                if g.cap[e] <= 0 {
                    continue;
                }
                let v = g.to[e];
                let nd = d + g.cost[e] + pot[u] - pot[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[dst] == i64::MAX {
            break;
        }
        for v in 0..n + 2 {
            if dist[v] != i64::MAX {
                pot[v] += dist[v];
            }
        }
        let mut push = required - sent;
        let mut v = dst;
        while v != src {
            let e = parent[v];
            push = push.min(g.cap[e]);
            v = g.to[e ^ 1];
        }
        let mut v = dst;
        while v != src {
            let e = parent[v];
            g.cap[e] -= push;
            g.cap[e ^ 1] += push;
            v = g.to[e ^ 1];
        }
        sent += push;
    }

    if sent < required {
        return Ok(FlowSolution {
            flow: alloc::vec![0; net.arcs.len()],
            cost: 0,
            status: FlowStatus::Infeasible,
        });
    }
    let flow: Vec<i64> = net
        .arcs
        .iter()
        .zip(&edge_of)
        .map(|(a, &e)| a.lower + (a.upper - a.lower - g.cap[e]))
        .collect();
    let cost = net.arcs.iter().zip(&flow).map(|(a, &x)| a.cost * x).sum();
    Ok(FlowSolution { flow, cost, status: FlowStatus::Optimal })
}

/// Shortest distances from `src` over edges with residual capacity; zero for
/// unreachable nodes.
fn initial_potentials(g: &Residual, src: usize) -> Result<Vec<i64>, McfError> {
    let n = g.adj.len();
    let live = |e: usize| g.cap[e] > 0;

    let mut indeg = alloc::vec![0usize; n];
    for u in 0..n {
        for &e in &g.adj[u] {
            if live(e) {
                indeg[g.to[e]] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| indeg[u] == 0).collect();
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &e in &g.adj[u] {
            if live(e) {
                let v = g.to[e];
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
    }

    let mut dist = alloc::vec![i64::MAX; n];
    dist[src] = 0;
    if order.len() == n {
        for &u in &order {
            if dist[u] == i64::MAX {
                continue;
            }
            for &e in &g.adj[u] {
                if live(e) {
                    let v = g.to[e];
                    dist[v] = dist[v].min(dist[u] + g.cost[e]);
                }
            }
        }
    } else {
        let mut relaxed = alloc::vec![0usize; n];
        let mut queued = alloc::vec![false; n];
        let mut queue = VecDeque::from([src]);
        queued[src] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &e in &g.adj[u] {
                if !live(e) {
                    continue;
                }
                let v = g.to[e];
                let nd = dist[u] + g.cost[e];
                if nd < dist[v] {
                    dist[v] = nd;
                    relaxed[v] += 1;
                    if relaxed[v] > n {
                        return Err(McfError::NegativeCycle);
                    }
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    Ok(dist.into_iter().map(|d| if d == i64::MAX { 0 } else { d }).collect())
}
