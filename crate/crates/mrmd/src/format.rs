//! JSON instance and solution files. Entities refer to each other by string id.

use std::collections::HashMap;

use mrmd_core::approx::{Coloring, ConflictGraph};
use mrmd_core::{
    Demand, Grid, Instance, Location, OdPair, ResourceTypeSpec, Solution, StartStock, TravelMetric, UnitPath,
};
use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported version {0}; expected {VERSION}")]
    Version(u32),
    #[error("{context}: unknown location `{id}`")]
    UnknownLocation { context: String, id: String },
    #[error("{context}: unknown resource type `{id}`")]
    UnknownType { context: String, id: String },
    #[error("{context}: unknown demand `{id}`")]
    UnknownDemand { context: String, id: String },
    #[error("demand `{0}` lists a required type twice")]
    RepeatedRequirement(String),
    #[error("location `{0}` has only one of x and y")]
    HalfCoords(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridFile>,
    pub locations: Vec<LocationFile>,
    pub travel: TravelFile,
    pub resource_types: Vec<TypeFile>,
    pub demands: Vec<DemandFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub width: i64,
    pub height: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationFile {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TravelFile {
    GridL1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<Vec<i64>>>,
    },
    Matrix {
        f: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<Vec<i64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeFile {
    pub id: String,
    pub starts: Vec<StartFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartFile {
    pub location: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandFile {
    pub id: String,
    pub location: String,
    pub start: i64,
    pub duration: i64,
    pub reward: i64,
    pub requires: Vec<String>,
    /// Origin and destination per required type, for the
    /// origin-destination reachability variant.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub od: Vec<OdFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdFile {
    #[serde(rename = "type")]
    pub resource_type: String,
    pub origin: String,
    pub destination: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub objective: i64,
    pub served: Vec<String>,
    pub paths: Vec<PathFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    #[serde(rename = "type")]
    pub resource_type: String,
    pub unit: u32,
    pub start_location: String,
    pub demands: Vec<String>,
}

fn index(ids: impl Iterator<Item = String>) -> HashMap<String, usize> {
    // first occurrence wins; duplicates are reported by instance validation
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        map.entry(id).or_insert(i);
    }
    map
}

struct Lookup<'a> {
    map: &'a HashMap<String, usize>,
    context: &'a str,
}

impl Lookup<'_> {
    fn get<E>(&self, id: &str, err: E) -> Result<usize, FormatError>
    where
        E: FnOnce(String, String) -> FormatError,
    {
        self.map.get(id).copied().ok_or_else(|| err(self.context.to_string(), id.to_string()))
    }
}

fn loc_err(context: String, id: String) -> FormatError {
    FormatError::UnknownLocation { context, id }
}

fn type_err(context: String, id: String) -> FormatError {
    FormatError::UnknownType { context, id }
}

fn demand_err(context: String, id: String) -> FormatError {
    FormatError::UnknownDemand { context, id }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, FormatError> {
        if self.version != VERSION {
            return Err(FormatError::Version(self.version));
        }
        let locs = index(self.locations.iter().map(|l| l.id.clone()));
        let types = index(self.resource_types.iter().map(|t| t.id.clone()));

        let mut locations = Vec::with_capacity(self.locations.len());
        for l in self.locations {
            let coords = match (l.x, l.y) {
                (Some(x), Some(y)) => Some((x, y)),
                (None, None) => None,
                _ => return Err(FormatError::HalfCoords(l.id)),
            };
            locations.push(Location { id: l.id, coords });
        }

        let mut resource_types = Vec::with_capacity(self.resource_types.len());
        for t in self.resource_types {
            let context = format!("resource type `{}`", t.id);
            let at = Lookup { map: &locs, context: &context };
            let starts = t
                .starts
                .iter()
                .map(|s| Ok(StartStock { location: at.get(&s.location, loc_err)?, count: s.count }))
                .collect::<Result<_, FormatError>>()?;
            resource_types.push(ResourceTypeSpec { id: t.id, starts });
        }

        let mut demands = Vec::with_capacity(self.demands.len());
        for d in self.demands {
            let context = format!("demand `{}`", d.id);
            let at = Lookup { map: &locs, context: &context };
            let ty = Lookup { map: &types, context: &context };
            let mut requires = d.requires.iter().map(|r| ty.get(r, type_err)).collect::<Result<Vec<_>, _>>()?;
            requires.sort_unstable();
            if requires.windows(2).any(|w| w[0] == w[1]) {
                return Err(FormatError::RepeatedRequirement(d.id));
            }
            let od = d
                .od
                .iter()
                .map(|p| {
                    Ok(OdPair {
                        resource_type: ty.get(&p.resource_type, type_err)?,
                        origin: at.get(&p.origin, loc_err)?,
                        destination: at.get(&p.destination, loc_err)?,
                    })
                })
                .collect::<Result<_, FormatError>>()?;
            demands.push(Demand {
                location: at.get(&d.location, loc_err)?,
                id: d.id,
                start: d.start,
                duration: d.duration,
                reward: d.reward,
                requires,
                od,
            });
        }

        let (travel, costs) = match self.travel {
            TravelFile::GridL1 { c } => (TravelMetric::GridL1, c),
            TravelFile::Matrix { f, c } => (TravelMetric::Matrix(f), c),
        };
        Ok(Instance {
            grid: self.grid.map(|g| Grid { width: g.width, height: g.height }),
            locations,
            travel,
            costs,
            types: resource_types,
            demands,
        })
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let lid = |l: usize| inst.locations[l].id.clone();
        let tid = |r: usize| inst.types[r].id.clone();
        InstanceFile {
            version: VERSION,
            grid: inst.grid.map(|g| GridFile { width: g.width, height: g.height }),
            locations: inst
                .locations
                .iter()
                .map(|l| LocationFile { id: l.id.clone(), x: l.coords.map(|c| c.0), y: l.coords.map(|c| c.1) })
                .collect(),
            travel: match &inst.travel {
                TravelMetric::GridL1 => TravelFile::GridL1 { c: inst.costs.clone() },
                TravelMetric::Matrix(f) => TravelFile::Matrix { f: f.clone(), c: inst.costs.clone() },
            },
            resource_types: inst
                .types
                .iter()
                .map(|t| TypeFile {
                    id: t.id.clone(),
                    starts: t.starts.iter().map(|s| StartFile { location: lid(s.location), count: s.count }).collect(),
                })
                .collect(),
            demands: inst
                .demands
                .iter()
                .map(|d| DemandFile {
                    id: d.id.clone(),
                    location: lid(d.location),
                    start: d.start,
                    duration: d.duration,
                    reward: d.reward,
                    requires: d.requires.iter().map(|&r| tid(r)).collect(),
                    od: d
                        .od
                        .iter()
                        .map(|p| OdFile {
                            resource_type: tid(p.resource_type),
                            origin: lid(p.origin),
                            destination: lid(p.destination),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl SolutionFile {
    /// Resolves ids against `inst`. The certificate text is not parsed back.
    pub fn into_solution(self, inst: &Instance) -> Result<Solution, FormatError> {
        let locs = index(inst.locations.iter().map(|l| l.id.clone()));
        let types = index(inst.types.iter().map(|t| t.id.clone()));
        let demands = index(inst.demands.iter().map(|d| d.id.clone()));
        let top = Lookup { map: &demands, context: "served list" };
        let served = self.served.iter().map(|d| top.get(d, demand_err)).collect::<Result<_, _>>()?;
        let mut paths = Vec::with_capacity(self.paths.len());
        for p in self.paths {
            let context = format!("path of type `{}` unit {}", p.resource_type, p.unit);
            let ty = Lookup { map: &types, context: &context };
            let at = Lookup { map: &locs, context: &context };
            let on = Lookup { map: &demands, context: &context };
            paths.push(UnitPath {
                resource_type: ty.get(&p.resource_type, type_err)?,
                unit: p.unit,
                start: at.get(&p.start_location, loc_err)?,
                demands: p.demands.iter().map(|d| on.get(d, demand_err)).collect::<Result<_, _>>()?,
            });
        }
        Ok(Solution { served, paths, objective: self.objective, certificate: None })
    }

    pub fn from_solution(inst: &Instance, sol: &Solution) -> Self {
        let did = |d: usize| inst.demands[d].id.clone();
        SolutionFile {
            objective: sol.objective,
            served: sol.served.iter().map(|&d| did(d)).collect(),
            paths: sol
                .paths
                .iter()
                .map(|p| PathFile {
                    resource_type: inst.types[p.resource_type].id.clone(),
                    unit: p.unit,
                    start_location: inst.locations[p.start].id.clone(),
                    demands: p.demands.iter().map(|&d| did(d)).collect(),
                })
                .collect(),
            certificate: sol.certificate.map(|c| c.to_string()),
        }
    }
}

/// An a:b-coloring of the conflict graph. Each class names a requirement
/// set by its type ids and lists its `b` colors below `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringFile {
    pub a: usize,
    pub b: usize,
    pub classes: Vec<ColorClassFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorClassFile {
    pub types: Vec<String>,
    pub colors: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ColoringFileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coloring names unknown resource type `{0}`")]
    UnknownType(String),
    #[error("requirement set {0:?} has no color class")]
    Missing(Vec<String>),
}

impl ColoringFile {
    /// Colors indexed by the nodes of `g`. Classes for sets that no demand
    /// uses are ignored.
    pub fn resolve(&self, inst: &Instance, g: &ConflictGraph) -> Result<Coloring, ColoringFileError> {
        let mut by_set = HashMap::new();
        for class in &self.classes {
            let mut set = class
                .types
                .iter()
                .map(|t| inst.type_index(t).ok_or_else(|| ColoringFileError::UnknownType(t.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            set.sort_unstable();
            set.dedup();
            by_set.insert(set, class.colors.clone());
        }
        let sets = g
            .nodes
            .iter()
            .map(|node| {
                by_set.get(node).cloned().ok_or_else(|| {
                    ColoringFileError::Missing(node.iter().map(|&r| inst.types[r].id.clone()).collect())
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Coloring { a: self.a, b: self.b, sets })
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution, FormatError> {
    serde_json::from_str::<SolutionFile>(text)?.into_solution(inst)
}

pub fn solution_to_json(inst: &Instance, sol: &Solution) -> String {
    serde_json::to_string_pretty(&SolutionFile::from_solution(inst, sol)).expect("solution serializes")
}
