//! Solutions as per-unit paths, and their validation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::preprocess::ReachabilityData;
use crate::{DemandIdx, LocIdx, TypeIdx};

/// The demands one resource unit serves, in order, after leaving its start
/// location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitPath {
    pub resource_type: TypeIdx,
    /// Unit number within its type, `0..stock`. Units are numbered in blocks
    /// following the order of the type's start locations.
    pub unit: u32,
    pub start: LocIdx,
    pub demands: Vec<DemandIdx>,
}

/// Guaranteed fraction of the optimum a heuristic solution attains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Objective at least OPT divided by the number of types.
    Types(usize),
    /// Objective at least OPT divided by the number of colors.
    Colors(usize),
    /// Objective at least `b·OPT/a` for an a:b-coloring.
    Fold { a: usize, b: usize },
    /// Net objective at least `(OPT − C*)/(2·types)`.
    CostTypes(usize),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Certificate::Types(n) => write!(f, "≥ OPT/{n}"),
            Certificate::Colors(n) => write!(f, "≥ OPT/{n}"),
            Certificate::Fold { a, b } => write!(f, "≥ {b}·OPT/{a}"),
            Certificate::CostTypes(n) => write!(f, "≥ (OPT − C*)/{}", 2 * n),
        }
    }
}

/// What the objective of a [`Solution`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Sum of served rewards.
    Reward,
    /// Served rewards minus travel costs of all paths.
    Net,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Served demands, ascending.
    pub served: Vec<DemandIdx>,
    /// Non-empty unit paths, ordered by (type, unit).
    pub paths: Vec<UnitPath>,
    pub objective: i64,
    pub certificate: Option<Certificate>,
}

impl Solution {
    pub fn empty() -> Self {
        Solution { served: Vec::new(), paths: Vec::new(), objective: 0, certificate: None }
    }

    /// Builds a reward-objective solution from raw paths given as
    /// `(type, start location, demands)`, numbering units per start block.
    /// Empty paths are dropped.
    pub fn assemble(
        inst: &Instance,
        served: impl IntoIterator<Item = DemandIdx>,
        raw: impl IntoIterator<Item = (TypeIdx, LocIdx, Vec<DemandIdx>)>,
    ) -> Solution {
        let served: Vec<DemandIdx> = served.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut next: Vec<Vec<u32>> = inst
            .types
            .iter()
            .map(|t| {
                let mut acc = 0;
                t.starts
                    .iter()
                    .map(|s| {
                        let first = acc;
                        acc += s.count;
                        first
                    })
                    .collect()
            })
            .collect();
        let mut paths = Vec::new();
        for (r, start, demands) in raw {
            if demands.is_empty() {
                continue;
            }
            let unit = match inst.types[r].starts.iter().position(|s| s.location == start) {
                Some(pos) => {
                    next[r][pos] += 1;
                    next[r][pos] - 1
                }
                None => u32::MAX,
            };
            paths.push(UnitPath { resource_type: r, unit, start, demands });
        }
        paths.sort_by_key(|p| (p.resource_type, p.unit));
        let objective = served.iter().map(|&d| inst.demands[d].reward).sum();
        Solution { served, paths, objective, certificate: None }
    }

    pub fn gross_reward(&self, inst: &Instance) -> i64 {
        self.served.iter().map(|&d| inst.demands[d].reward).sum()
    }

    /// Sum of travel costs over all paths.
    pub fn travel_cost(&self, inst: &Instance) -> i64 {
        self.paths.iter().map(|p| path_cost(inst, p)).sum()
    }

    pub fn is_served(&self, d: DemandIdx) -> bool {
        self.served.binary_search(&d).is_ok()
    }
}

/// Cost of the legs start → first demand → … → last demand.
pub fn path_cost(inst: &Instance, path: &UnitPath) -> i64 {
    let mut at = path.start;
    let mut total = 0;
    for &d in &path.demands {
        let loc = inst.demands[d].location;
        total += inst.travel_cost(at, loc);
        at = loc;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolutionViolation {
    #[error("path refers to undeclared type #{0}")]
    UnknownType(usize),
    #[error("path refers to undeclared demand #{0}")]
    UnknownDemand(usize),
    #[error("type `{resource_type}` has no unit {unit} starting at location `{location}`")]
    BadUnit { resource_type: String, unit: u32, location: String },
    #[error("unit {unit} of type `{resource_type}` has more than one path")]
    DuplicateUnit { resource_type: String, unit: u32 },
    #[error("type `{resource_type}` cannot reach demand `{demand}` from location `{location}` in time")]
    BadFirstStep { resource_type: String, location: String, demand: String },
    #[error("type `{resource_type}` cannot serve `{to}` after `{from}`")]
    BadStep { resource_type: String, from: String, to: String },
    #[error("demand `{demand}` does not require type `{resource_type}`")]
    UnneededType { demand: String, resource_type: String },
    #[error("demand `{demand}` is visited by {count} units of type `{resource_type}`")]
    WrongCoverage { demand: String, resource_type: String, count: usize },
    #[error("served list is not strictly ascending")]
    UnsortedServed,
    #[error("objective is {stated} but the paths give {actual}")]
    Objective { stated: i64, actual: i64 },
}

/// Checks every solution invariant against the given reachability data.
pub fn validate_solution(
    inst: &Instance,
    reach: &ReachabilityData,
    sol: &Solution,
    kind: ObjectiveKind,
) -> Vec<SolutionViolation> {
    use SolutionViolation as V;
    let mut out = Vec::new();
    let nd = inst.demands.len();
    if sol.served.windows(2).any(|w| w[0] >= w[1]) {
        out.push(V::UnsortedServed);
    }
    for &d in &sol.served {
        if d >= nd {
            out.push(V::UnknownDemand(d));
        }
    }
    let served: BTreeSet<DemandIdx> = sol.served.iter().copied().collect();
    let tid = |r: TypeIdx| inst.types[r].id.clone();
    let did = |d: DemandIdx| inst.demands[d].id.clone();
    let lid = |l: LocIdx| inst.locations.get(l).map_or_else(|| String::from("?"), |x| x.id.clone());

    let mut visits = alloc::vec![alloc::vec![0usize; inst.types.len()]; nd];
    let mut units: BTreeSet<(TypeIdx, u32)> = BTreeSet::new();
    for p in &sol.paths {
        let r = p.resource_type;
        if r >= inst.types.len() {
            out.push(V::UnknownType(r));
            continue;
        }
        if let Some(&d) = p.demands.iter().find(|&&d| d >= nd) {
            out.push(V::UnknownDemand(d));
            continue;
        }
        let view = reach.view(r);
        let mut first_unit = 0;
        let mut block = None;
        for (pos, s) in inst.types[r].starts.iter().enumerate() {
            if p.unit >= first_unit && p.unit < first_unit + s.count {
                block = Some((pos, s.location));
            }
            first_unit += s.count;
        }
        let pos = match block {
            Some((pos, loc)) if loc == p.start => pos,
            _ => {
                out.push(V::BadUnit { resource_type: tid(r), unit: p.unit, location: lid(p.start) });
                continue;
            }
        };
        if !units.insert((r, p.unit)) {
            out.push(V::DuplicateUnit { resource_type: tid(r), unit: p.unit });
        }
        let mut prev: Option<usize> = None;
        for &d in &p.demands {
            visits[d][r] += 1;
            let Some(k) = view.local(d) else {
                out.push(V::UnneededType { demand: did(d), resource_type: tid(r) });
                prev = None;
                continue;
            };
            match prev {
                None if !view.start_reaches(pos, k) && p.demands[0] == d => {
                    out.push(V::BadFirstStep { resource_type: tid(r), location: lid(p.start), demand: did(d) })
                }
                Some(i) if !view.has_arc(i, k) => out.push(V::BadStep {
                    resource_type: tid(r),
                    from: did(view.demands[i]),
                    to: did(d),
                }),
                _ => {}
            }
            prev = Some(k);
        }
    }
    for d in 0..nd {
        for r in 0..inst.types.len() {
            let want = usize::from(served.contains(&d) && inst.demands[d].requires_type(r));
            let count = visits[d][r];
            if count != want && (want == 1 || inst.demands[d].requires_type(r)) {
                out.push(V::WrongCoverage { demand: did(d), resource_type: tid(r), count });
            }
        }
    }
    if out.is_empty() {
        let gross = sol.gross_reward(inst);
        let actual = match kind {
            ObjectiveKind::Reward => gross,
            ObjectiveKind::Net => gross - sol.travel_cost(inst),
        };
        if actual != sol.objective {
            out.push(V::Objective { stated: sol.objective, actual });
        }
    }
    out
}
