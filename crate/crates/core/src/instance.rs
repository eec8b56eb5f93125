//! Problem data model and instance validation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{DemandIdx, LocIdx, TypeIdx};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub width: i64,
    pub height: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub id: String,
    pub coords: Option<(i64, i64)>,
}

/// Origin and destination a resource of one type must visit for a demand.
/// Only used by the origin-destination reachability variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OdPair {
    pub resource_type: TypeIdx,
    pub origin: LocIdx,
    pub destination: LocIdx,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub id: String,
    pub location: LocIdx,
    /// Service start time.
    pub start: i64,
    /// Service duration, at least 1.
    pub duration: i64,
    pub reward: i64,
    /// Required resource types, sorted and without duplicates.
    pub requires: Vec<TypeIdx>,
    pub od: Vec<OdPair>,
}

impl Demand {
    pub fn requires_type(&self, r: TypeIdx) -> bool {
        self.requires.binary_search(&r).is_ok()
    }

    pub fn end(&self) -> i64 {
        self.start + self.duration
    }

    pub fn od_for(&self, r: TypeIdx) -> Option<&OdPair> {
        self.od.iter().find(|p| p.resource_type == r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StartStock {
    pub location: LocIdx,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceTypeSpec {
    pub id: String,
    pub starts: Vec<StartStock>,
}

impl ResourceTypeSpec {
    pub fn total(&self) -> u32 {
        self.starts.iter().map(|s| s.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TravelMetric {
    /// Manhattan distance between location coordinates.
    GridL1,
    /// Explicit square matrix indexed by location.
    Matrix(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub grid: Option<Grid>,
    pub locations: Vec<Location>,
    pub travel: TravelMetric,
    /// Optional travel-cost matrix; when absent, cost-aware solvers charge
    /// travel times.
    pub costs: Option<Vec<Vec<i64>>>,
    pub types: Vec<ResourceTypeSpec>,
    pub demands: Vec<Demand>,
}

impl Instance {
    pub fn travel_time(&self, a: LocIdx, b: LocIdx) -> i64 {
        match &self.travel {
            TravelMetric::GridL1 => {
                let (ax, ay) = self.locations[a].coords.unwrap_or((0, 0));
                let (bx, by) = self.locations[b].coords.unwrap_or((0, 0));
                (ax - bx).abs() + (ay - by).abs()
            }
            TravelMetric::Matrix(f) => f[a][b],
        }
    }

    pub fn travel_cost(&self, a: LocIdx, b: LocIdx) -> i64 {
        match &self.costs {
            Some(c) => c[a][b],
            None => self.travel_time(a, b),
        }
    }

    pub fn total_reward(&self) -> i64 {
        self.demands.iter().map(|d| d.reward).sum()
    }

    /// Number of resource units of type `r`.
    pub fn stock(&self, r: TypeIdx) -> u32 {
        self.types[r].total()
    }

    pub fn demands_of_type(&self, r: TypeIdx) -> Vec<DemandIdx> {
        (0..self.demands.len())
            .filter(|&d| self.demands[d].requires_type(r))
            .collect()
    }

    /// The single location every resource starts from, if there is one.
    pub fn shared_start(&self) -> Option<LocIdx> {
        let mut locs = self.types.iter().flat_map(|t| t.starts.iter().map(|s| s.location));
        let first = locs.next()?;
        locs.all(|l| l == first).then_some(first)
    }

    pub fn location_index(&self, id: &str) -> Option<LocIdx> {
        self.locations.iter().position(|l| l.id == id)
    }

    pub fn type_index(&self, id: &str) -> Option<TypeIdx> {
        self.types.iter().position(|t| t.id == id)
    }

    pub fn demand_index(&self, id: &str) -> Option<DemandIdx> {
        self.demands.iter().position(|d| d.id == id)
    }

    /// Copy of the instance with every per-location stock replaced.
    pub fn with_stocks<F: FnMut(TypeIdx, &StartStock) -> u32>(&self, mut f: F) -> Instance {
        let mut out = self.clone();
        for (r, t) in out.types.iter_mut().enumerate() {
            for s in t.starts.iter_mut() {
                s.count = f(r, s);
            }
        }
        out
    }
}

/// Matrix named in a [`Violation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Travel,
    Cost,
}

impl core::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            MatrixKind::Travel => "travel",
            MatrixKind::Cost => "cost",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("duplicate location id `{0}`")]
    DuplicateLocationId(String),
    #[error("duplicate demand id `{0}`")]
    DuplicateDemandId(String),
    #[error("duplicate resource type id `{0}`")]
    DuplicateTypeId(String),
    #[error("location `{0}` lies outside the grid")]
    OutsideGrid(String),
    #[error("location `{0}` has no coordinates but travel is grid-based")]
    MissingCoords(String),
    #[error("demand `{demand}` has duration {duration}; durations must be at least 1")]
    NonPositiveDuration { demand: String, duration: i64 },
    #[error("demand `{demand}` has reward {reward}; rewards must be positive")]
    NonPositiveReward { demand: String, reward: i64 },
    #[error("demand `{0}` requires no resource type")]
    EmptyRequirement(String),
    #[error("demand `{demand}` requires undeclared resource type #{resource_type}")]
    UnknownType { demand: String, resource_type: usize },
    #[error("demand `{0}` lists its required types unsorted or with repeats")]
    UnnormalizedRequirement(String),
    #[error("{entity} refers to unknown location #{location}")]
    UnknownLocation { entity: String, location: usize },
    #[error("resource type `{0}` has no units")]
    EmptyStock(String),
    #[error("resource type `{resource_type}` lists start location `{location}` with zero units")]
    ZeroStartCount { resource_type: String, location: String },
    #[error("resource type `{resource_type}` lists start location `{location}` twice")]
    DuplicateStart { resource_type: String, location: String },
    #[error("{0} matrix is not square over all locations")]
    MatrixShape(MatrixKind),
    #[error("{kind} matrix entry ({from}, {to}) is negative")]
    NegativeEntry { kind: MatrixKind, from: String, to: String },
    #[error("{kind} matrix diagonal entry at `{location}` is nonzero")]
    NonzeroDiagonal { kind: MatrixKind, location: String },
    #[error("{kind} matrix violates the triangle inequality on ({a}, {b}, {c})")]
    TriangleInequality { kind: MatrixKind, a: String, b: String, c: String },
    #[error("demand `{demand}` has an origin-destination pair for type #{resource_type} it does not require")]
    StrayOdPair { demand: String, resource_type: usize },
}

/// Every invariant violation of `inst`; an empty list means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let nloc = inst.locations.len();

    let mut seen = BTreeSet::new();
    for l in &inst.locations {
        if !seen.insert(l.id.as_str()) {
            out.push(Violation::DuplicateLocationId(l.id.clone()));
        }
        match (l.coords, inst.grid) {
            (Some((x, y)), Some(g)) if x < 0 || y < 0 || x >= g.width || y >= g.height => {
                out.push(Violation::OutsideGrid(l.id.clone()));
            }
            (None, _) if inst.travel == TravelMetric::GridL1 => {
                out.push(Violation::MissingCoords(l.id.clone()));
            }
            _ => {}
        }
    }

    let mut seen = BTreeSet::new();
    for t in &inst.types {
        if !seen.insert(t.id.as_str()) {
            out.push(Violation::DuplicateTypeId(t.id.clone()));
        }
        if t.total() == 0 {
            out.push(Violation::EmptyStock(t.id.clone()));
        }
        let mut starts = BTreeSet::new();
        for s in &t.starts {
            if s.location >= nloc {
                out.push(Violation::UnknownLocation {
                    entity: alloc::format!("resource type `{}`", t.id),
                    location: s.location,
                });
                continue;
            }
            let loc = inst.locations[s.location].id.clone();
            if !starts.insert(s.location) {
                out.push(Violation::DuplicateStart { resource_type: t.id.clone(), location: loc });
            } else if s.count == 0 {
                out.push(Violation::ZeroStartCount { resource_type: t.id.clone(), location: loc });
            }
        }
    }

    let mut seen = BTreeSet::new();
    for d in &inst.demands {
        if !seen.insert(d.id.as_str()) {
            out.push(Violation::DuplicateDemandId(d.id.clone()));
        }
        if d.location >= nloc {
            out.push(Violation::UnknownLocation {
                entity: alloc::format!("demand `{}`", d.id),
                location: d.location,
            });
        }
        if d.duration < 1 {
            out.push(Violation::NonPositiveDuration { demand: d.id.clone(), duration: d.duration });
        }
        if d.reward <= 0 {
            out.push(Violation::NonPositiveReward { demand: d.id.clone(), reward: d.reward });
        }
        if d.requires.is_empty() {
            out.push(Violation::EmptyRequirement(d.id.clone()));
        }
        if d.requires.windows(2).any(|w| w[0] >= w[1]) {
            out.push(Violation::UnnormalizedRequirement(d.id.clone()));
        }
        for &r in &d.requires {
            if r >= inst.types.len() {
                out.push(Violation::UnknownType { demand: d.id.clone(), resource_type: r });
            }
        }
        for p in &d.od {
            if !d.requires_type(p.resource_type) {
                out.push(Violation::StrayOdPair { demand: d.id.clone(), resource_type: p.resource_type });
            }
            for loc in [p.origin, p.destination] {
                if loc >= nloc {
                    out.push(Violation::UnknownLocation {
                        entity: alloc::format!("demand `{}` origin-destination pair", d.id),
                        location: loc,
                    });
                }
            }
        }
    }

    if let TravelMetric::Matrix(f) = &inst.travel {
        check_matrix(inst, f, MatrixKind::Travel, &mut out);
    }
    if let Some(c) = &inst.costs {
        check_matrix(inst, c, MatrixKind::Cost, &mut out);
    }
    out
}

fn check_matrix(inst: &Instance, m: &[Vec<i64>], kind: MatrixKind, out: &mut Vec<Violation>) {
    let n = inst.locations.len();
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        out.push(Violation::MatrixShape(kind));
        return;
    }
    let name = |i: usize| inst.locations[i].id.clone();
    for i in 0..n {
        if m[i][i] != 0 {
            out.push(Violation::NonzeroDiagonal { kind, location: name(i) });
        }
        for j in 0..n {
            if m[i][j] < 0 {
                out.push(Violation::NegativeEntry { kind, from: name(i), to: name(j) });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if m[a][c] > m[a][b] + m[b][c] {
                    out.push(Violation::TriangleInequality { kind, a: name(a), b: name(b), c: name(c) });
                }
            }
        }
    }
}
