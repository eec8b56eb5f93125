//! Reachability preprocessing: which demand can follow which, and which
//! demands a resource can reach first from its start location.
//!
//! Matrices are stored as sorted adjacency lists. Every solver consumes the
//! per-type [`TypeView`]s, so the origin-destination variant plugs in without
//! changes downstream.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::Instance;
use crate::{DemandIdx, LocIdx, TypeIdx};

/// Units of one type at one start location, with the demands they can serve
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartArcs {
    pub location: LocIdx,
    pub count: u32,
    /// Local demand positions with `B = 1`, ascending.
    pub reach: Vec<usize>,
}

/// Single-type subproblem: the demands requiring the type, the restricted
/// follow relation and the type's stocks.
///
/// Local position `k` refers to `demands[k]`. Demands are ordered by
/// `(start, index)`, which is a topological order of `succ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeView {
    pub resource_type: TypeIdx,
    pub demands: Vec<DemandIdx>,
    /// `succ[i]` lists local positions `j` with `A_ij = 1`, ascending.
    pub succ: Vec<Vec<usize>>,
    pub starts: Vec<StartArcs>,
    local: Vec<Option<usize>>,
}

impl TypeView {
    pub fn local(&self, d: DemandIdx) -> Option<usize> {
        self.local.get(d).copied().flatten()
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.succ[i].binary_search(&j).is_ok()
    }

    pub fn start_reaches(&self, start: usize, j: usize) -> bool {
        self.starts[start].reach.binary_search(&j).is_ok()
    }

    pub fn start_position(&self, location: LocIdx) -> Option<usize> {
        self.starts.iter().position(|s| s.location == location)
    }

    pub fn units(&self) -> u32 {
        self.starts.iter().map(|s| s.count).sum()
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    /// Same view with the stock at each start position replaced.
    pub fn with_counts(&self, counts: &[u32]) -> TypeView {
        let mut v = self.clone();
        for (s, &c) in v.starts.iter_mut().zip(counts) {
            s.count = c;
        }
        v
    }

    fn build<F, G>(inst: &Instance, r: TypeIdx, follows: F, first: G) -> TypeView
    where
        F: Fn(DemandIdx, DemandIdx) -> bool,
        G: Fn(LocIdx, DemandIdx) -> bool,
    {
        let mut demands = inst.demands_of_type(r);
        demands.sort_by_key(|&d| (inst.demands[d].start, d));
        let mut local = alloc::vec![None; inst.demands.len()];
        for (k, &d) in demands.iter().enumerate() {
            local[d] = Some(k);
        }
        let succ = demands
            .iter()
            .map(|&i| {
                (0..demands.len())
                    .filter(|&k| demands[k] != i && follows(i, demands[k]))
                    .collect()
            })
            .collect();
        let starts = inst.types[r]
            .starts
            .iter()
            .map(|s| StartArcs {
                location: s.location,
                count: s.count,
                reach: (0..demands.len()).filter(|&k| first(s.location, demands[k])).collect(),
            })
            .collect();
        TypeView { resource_type: r, demands, succ, starts, local }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityData {
    /// `succ[i]` lists demands `j` with `A_ij = 1`, ascending.
    pub succ: Vec<Vec<DemandIdx>>,
    /// Distinct start locations in first-seen order; the rows of `B`.
    pub start_locations: Vec<LocIdx>,
    /// `start_reach[s]` lists demands `d` with `B_sd = 1`, ascending.
    pub start_reach: Vec<Vec<DemandIdx>>,
    pub views: Vec<TypeView>,
}

impl ReachabilityData {
    pub fn a(&self, i: DemandIdx, j: DemandIdx) -> bool {
        self.succ[i].binary_search(&j).is_ok()
    }

    /// `B` entry for start location `loc` (a location, not a row number).
    pub fn b(&self, loc: LocIdx, d: DemandIdx) -> bool {
        self.start_locations
            .iter()
            .position(|&l| l == loc)
            .is_some_and(|row| self.start_reach[row].binary_search(&d).is_ok())
    }

    pub fn view(&self, r: TypeIdx) -> &TypeView {
        &self.views[r]
    }

    /// Number of `A` entries equal to one.
    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

/// Builds `A`, `B` and the per-type views.
///
/// `A_ij = 1` iff `τ_i + Δ_i + f_ij ≤ τ_j` and the requirement sets intersect;
/// `B_sd = 1` iff `f_sd ≤ τ_d` and `s` hosts some type `d` requires.
pub fn build_reachability(inst: &Instance) -> ReachabilityData {
    let follows = |i: DemandIdx, j: DemandIdx| {
        let (di, dj) = (&inst.demands[i], &inst.demands[j]);
        di.end() + inst.travel_time(di.location, dj.location) <= dj.start
    };
    let first = |s: LocIdx, d: DemandIdx| {
        let dd = &inst.demands[d];
        inst.travel_time(s, dd.location) <= dd.start
    };
    let n = inst.demands.len();
    let succ = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && intersects(&inst.demands[i].requires, &inst.demands[j].requires))
                .filter(|&j| follows(i, j))
                .collect()
        })
        .collect();
    let views = (0..inst.types.len())
        .map(|r| TypeView::build(inst, r, follows, first))
        .collect();
    let (start_locations, start_reach) = b_rows(inst, |s, d, _| first(s, d));
    ReachabilityData { succ, start_locations, start_reach, views }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OdError {
    #[error("demand `{demand}` requires type `{resource_type}` but has no origin-destination pair for it")]
    MissingPair { demand: String, resource_type: String },
}

/// Origin-destination variant: a unit of type `r` serving `i` starts at
/// `a_i^r`, ends at `b_i^r`, and can continue to `j` iff
/// `τ_i + Δ_i + f(a_i^r, b_i^r) + f(b_i^r, a_j^r) ≤ τ_j`.
pub fn build_od_reachability(inst: &Instance) -> Result<ReachabilityData, OdError> {
    for d in &inst.demands {
        for &r in &d.requires {
            if d.od_for(r).is_none() {
                return Err(OdError::MissingPair {
                    demand: d.id.clone(),
                    resource_type: inst.types[r].id.clone(),
                });
            }
        }
    }
    let pair = |d: DemandIdx, r: TypeIdx| *inst.demands[d].od_for(r).expect("checked above");
    let views: Vec<TypeView> = (0..inst.types.len())
        .map(|r| {
            TypeView::build(
                inst,
                r,
                |i, j| {
                    let (pi, pj) = (pair(i, r), pair(j, r));
                    inst.demands[i].end()
                        + inst.travel_time(pi.origin, pi.destination)
                        + inst.travel_time(pi.destination, pj.origin)
                        <= inst.demands[j].start
                },
                |s, d| inst.travel_time(s, pair(d, r).origin) <= inst.demands[d].start,
            )
        })
        .collect();

    let n = inst.demands.len();
    let mut succ: Vec<BTreeSet<DemandIdx>> = alloc::vec![BTreeSet::new(); n];
    for v in &views {
        for (i, next) in v.succ.iter().enumerate() {
            succ[v.demands[i]].extend(next.iter().map(|&j| v.demands[j]));
        }
    }
    let (start_locations, start_reach) = b_rows(inst, |s, d, r| {
        inst.travel_time(s, pair(d, r).origin) <= inst.demands[d].start
    });
    Ok(ReachabilityData {
        succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
        start_locations,
        start_reach,
        views,
    })
}

fn b_rows<F>(inst: &Instance, reaches: F) -> (Vec<LocIdx>, Vec<Vec<DemandIdx>>)
where
    F: Fn(LocIdx, DemandIdx, TypeIdx) -> bool,
{
    let mut rows: Vec<LocIdx> = Vec::new();
    for t in &inst.types {
        for s in &t.starts {
            if !rows.contains(&s.location) {
                rows.push(s.location);
            }
        }
    }
    let reach = rows
        .iter()
        .map(|&s| {
            (0..inst.demands.len())
                .filter(|&d| {
                    inst.demands[d].requires.iter().any(|&r| {
                        inst.types[r].starts.iter().any(|st| st.location == s) && reaches(s, d, r)
                    })
                })
                .collect()
        })
        .collect();
    (rows, reach)
}

fn intersects(a: &[TypeIdx], b: &[TypeIdx]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("resource type #{0} is not declared")]
pub struct UnknownType(pub TypeIdx);

/// The single-type subproblem for `r`: `D^r`, the induced submatrices and the
/// stocks of `r`.
pub fn restrict_to_type(reach: &ReachabilityData, r: TypeIdx) -> Result<TypeView, UnknownType> {
    reach.views.get(r).cloned().ok_or(UnknownType(r))
}
