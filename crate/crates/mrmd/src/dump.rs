//! Debug text dumps of reachability matrices and flow networks.

use std::fmt::Write;

use mrmd_core::mcf::{apply_node_capacities, FlowNetwork};
use mrmd_core::ReachabilityData;

/// Coordinate lists of the nonzero entries of A and B. Each section starts
/// with a `# A` or `# B` line. A lists `i j` demand index pairs. B lists
/// `s d` pairs of location index and demand index.
pub fn reachability_coordinates(reach: &ReachabilityData) -> String {
    let mut out = String::from("# A\n");
    for (i, next) in reach.succ.iter().enumerate() {
        for &j in next {
            writeln!(out, "{i} {j}").unwrap();
        }
    }
    out.push_str("# B\n");
    for (row, demands) in reach.start_reach.iter().enumerate() {
        for &d in demands {
            writeln!(out, "{} {d}", reach.start_locations[row]).unwrap();
        }
    }
    out
}

/// DIMACS min-cost-flow text. Node capacities are expanded into split arcs
/// first. Nodes are numbered from 1.
pub fn dimacs(net: &FlowNetwork, comment: &str) -> String {
    let split = apply_node_capacities(net);
    let net = &split.network;
    let mut out = String::new();
    for line in comment.lines() {
        writeln!(out, "c {line}").unwrap();
    }
    writeln!(out, "p min {} {}", net.node_count(), net.arcs.len()).unwrap();
    for (v, &b) in net.supplies.iter().enumerate() {
        if b != 0 {
            writeln!(out, "n {} {b}", v + 1).unwrap();
        }
    }
    for a in &net.arcs {
        writeln!(out, "a {} {} {} {} {}", a.from + 1, a.to + 1, a.lower, a.upper, a.cost).unwrap();
    }
    out
}
