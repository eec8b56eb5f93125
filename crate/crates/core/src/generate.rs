//! Seeded instance generators: the grid-and-day random model, small
//! families for oracle testing, and the numerical 3-dimensional matching
//! construction.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular};

use crate::instance::{Demand, Grid, Instance, Location, ResourceTypeSpec, StartStock, TravelMetric};
use crate::{LocIdx, TypeIdx};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub types: usize,
    pub demands: usize,
    /// Total resource units, split evenly over the types.
    pub resources: u32,
    pub grid: Grid,
    /// Start times are drawn uniformly from `0..=horizon`.
    pub horizon: i64,
    pub duration_min: f64,
    pub duration_mode: f64,
    pub duration_max: f64,
    /// Chance that a demand requires any given type.
    pub membership: f64,
    /// Multiply every reward by 100.
    pub scaled_rewards: bool,
    /// Put every resource at one depot instead of spreading them out.
    pub shared_start: bool,
}

impl GeneratorConfig {
    /// Day-long horizon on a 20×20 grid with durations triangular on
    /// `[15, 120]` peaking at 30 and even type membership.
    pub fn new(types: usize, demands: usize, resources: u32) -> Self {
        GeneratorConfig {
            types,
            demands,
            resources,
            grid: Grid { width: 20, height: 20 },
            horizon: 1440,
            duration_min: 15.0,
            duration_mode: 30.0,
            duration_max: 120.0,
            membership: 0.5,
            scaled_rewards: false,
            shared_start: false,
        }
    }

    pub fn per_type(&self) -> u32 {
        self.resources / self.types.max(1) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid generator configuration: {0}")]
    Config(&'static str),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_requirements<R: Rng>(rng: &mut R, types: usize, p: f64) -> Vec<TypeIdx> {
    loop {
        let set: Vec<TypeIdx> = (0..types).filter(|_| rng.random_bool(p)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

fn point<R: Rng>(rng: &mut R, grid: Grid) -> (i64, i64) {
    (rng.random_range(0..grid.width), rng.random_range(0..grid.height))
}

/// Rounds a nonnegative float to the nearest integer, halves up.
fn round(x: f64) -> i64 {
    (x + 0.5) as i64
}

pub fn generate_random_instance(cfg: &GeneratorConfig, seed: u64) -> Result<Instance, GeneratorError> {
    if cfg.types == 0 {
        return Err(GeneratorError::Config("at least one type is needed"));
    }
    if cfg.resources == 0 || !cfg.resources.is_multiple_of(cfg.types as u32) {
        return Err(GeneratorError::Config("resources must split evenly and positively over the types"));
    }
    if !(cfg.duration_min <= cfg.duration_mode && cfg.duration_mode <= cfg.duration_max) || cfg.duration_min < 1.0 {
        return Err(GeneratorError::Config("durations need 1 ≤ min ≤ mode ≤ max"));
    }
    if !(cfg.membership > 0.0 && cfg.membership <= 1.0) {
        return Err(GeneratorError::Config("membership probability must lie in (0, 1]"));
    }
    if cfg.grid.width <= 0 || cfg.grid.height <= 0 || cfg.horizon < 0 {
        return Err(GeneratorError::Config("grid and horizon must be positive"));
    }
    let durations = Triangular::new(cfg.duration_min, cfg.duration_max, cfg.duration_mode)
        .map_err(|_| GeneratorError::Config("bad duration distribution"))?;
    let mut rng = rng(seed);
    let mut locations = Vec::new();
    let mut demands = Vec::with_capacity(cfg.demands);
    for k in 0..cfg.demands {
        let coords = point(&mut rng, cfg.grid);
        locations.push(Location { id: format!("p{k}"), coords: Some(coords) });
        let start = rng.random_range(0..=cfg.horizon);
        let duration = round(durations.sample(&mut rng)).max(1);
        let requires = random_requirements(&mut rng, cfg.types, cfg.membership);
        let scale = if cfg.scaled_rewards { 100 } else { 1 };
        demands.push(Demand {
            id: format!("d{k}"),
            location: k,
            start,
            duration,
            reward: duration * requires.len() as i64 * scale,
            requires,
            od: Vec::new(),
        });
    }
    let depot = cfg.shared_start.then(|| {
        let coords = point(&mut rng, cfg.grid);
        locations.push(Location { id: "depot".to_string(), coords: Some(coords) });
        locations.len() - 1
    });
    let mut types = Vec::with_capacity(cfg.types);
    for r in 0..cfg.types {
        let mut starts: Vec<StartStock> = Vec::new();
        for _ in 0..cfg.per_type() {
            let location = match depot {
                Some(l) => l,
                None => {
                    let coords = point(&mut rng, cfg.grid);
                    match locations.iter().position(|l| l.id.starts_with('s') && l.coords == Some(coords)) {
                        Some(l) => l,
                        None => {
                            locations.push(Location { id: format!("s{}", locations.len()), coords: Some(coords) });
                            locations.len() - 1
                        }
                    }
                }
            };
            match starts.iter_mut().find(|s| s.location == location) {
                Some(s) => s.count += 1,
                None => starts.push(StartStock { location, count: 1 }),
            }
        }
        types.push(ResourceTypeSpec { id: format!("r{r}"), starts });
    }
    Ok(Instance {
        grid: Some(cfg.grid),
        locations,
        travel: TravelMetric::GridL1,
        costs: None,
        types,
        demands,
    })
}

/// Parameters of [`small_instance`], a family sized for exhaustive oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallFamily {
    pub max_types: usize,
    pub max_demands: usize,
    pub max_units: u32,
    pub shared_start: bool,
    /// Side of the square grid.
    pub grid: i64,
    pub horizon: i64,
    pub max_duration: i64,
    pub max_reward: i64,
}

impl SmallFamily {
    pub fn new(max_types: usize, max_demands: usize, max_units: u32) -> Self {
        SmallFamily {
            max_types,
            max_demands,
            max_units,
            shared_start: false,
            grid: 6,
            horizon: 60,
            max_duration: 25,
            max_reward: 20,
        }
    }
}

/// Small crowded instance: random type count, demand count and per-type
/// stock within the family's limits, tight horizon so that demands conflict,
/// rewards independent of durations.
pub fn small_instance(fam: &SmallFamily, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let grid = Grid { width: fam.grid, height: fam.grid };
    let nt = rng.random_range(1..=fam.max_types);
    let nd = rng.random_range(0..=fam.max_demands);
    let mut locations: Vec<Location> = Vec::new();
    let mut demands = Vec::with_capacity(nd);
    for k in 0..nd {
        locations.push(Location { id: format!("p{k}"), coords: Some(point(&mut rng, grid)) });
        demands.push(Demand {
            id: format!("d{k}"),
            location: k,
            start: rng.random_range(0..=fam.horizon),
            duration: rng.random_range(1..=fam.max_duration),
            reward: rng.random_range(1..=fam.max_reward),
            requires: random_requirements(&mut rng, nt, 0.5),
            od: Vec::new(),
        });
    }
    let depots = if fam.shared_start { 1 } else { 2 };
    for k in 0..depots {
        locations.push(Location { id: format!("s{k}"), coords: Some(point(&mut rng, grid)) });
    }
    let types = (0..nt)
        .map(|r| {
            let units = rng.random_range(1..=fam.max_units);
            let mut starts: Vec<StartStock> = Vec::new();
            for _ in 0..units {
                let location = nd + rng.random_range(0..depots);
                match starts.iter_mut().find(|s| s.location == location) {
                    Some(s) => s.count += 1,
                    None => starts.push(StartStock { location, count: 1 }),
                }
            }
            ResourceTypeSpec { id: format!("r{r}"), starts }
        })
        .collect();
    Instance { grid: Some(grid), locations, travel: TravelMetric::GridL1, costs: None, types, demands }
}

/// Zero-travel instance where every demand needs one type or all of them.
/// With `unit_durations`, demands last one time step and start at one of a
/// few times; otherwise they all start together.
pub fn one_or_all_instance(
    max_types: usize,
    max_demands: usize,
    max_units: u32,
    unit_durations: bool,
    seed: u64,
) -> Instance {
    let mut rng = rng(seed);
    let nt = rng.random_range(1..=max_types);
    let nd = rng.random_range(0..=max_demands);
    let shared = rng.random_range(0..=10);
    let demands = (0..nd)
        .map(|k| {
            let requires = if rng.random_bool(0.35) {
                (0..nt).collect()
            } else {
                alloc::vec![rng.random_range(0..nt)]
            };
            let (start, duration) = if unit_durations {
                (rng.random_range(0..=3), 1)
            } else {
                (shared, rng.random_range(1..=30))
            };
            Demand {
                id: format!("d{k}"),
                location: 0,
                start,
                duration,
                reward: rng.random_range(1..=20),
                requires,
                od: Vec::new(),
            }
        })
        .collect();
    let types = (0..nt)
        .map(|r| ResourceTypeSpec {
            id: format!("r{r}"),
            starts: alloc::vec![StartStock { location: 0, count: rng.random_range(1..=max_units) }],
        })
        .collect();
    Instance {
        grid: None,
        locations: alloc::vec![Location { id: "hub".to_string(), coords: None }],
        travel: TravelMetric::Matrix(alloc::vec![alloc::vec![0]]),
        costs: None,
        types,
        demands,
    }
}

/// Adds a cost matrix equal to the grid distance times `per_step`, and raises
/// rewards so that every cost is at most the smallest reward divided by
/// twice the number of types.
pub fn with_bounded_costs(inst: &Instance, per_step: i64) -> Instance {
    let mut out = inst.clone();
    let n = inst.locations.len();
    let c: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|b| per_step * inst.travel_time(a, b)).collect()).collect();
    let worst = c.iter().flatten().copied().max().unwrap_or(0);
    let floor = 2 * inst.types.len() as i64 * worst;
    for d in &mut out.demands {
        d.reward = d.reward.max(floor);
    }
    out.costs = Some(c);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum N3dmError {
    #[error("expected {0} values in each of a, b and c")]
    Length(usize),
    #[error("every value must lie strictly between 0 and d")]
    Range,
    #[error("a, b and c must sum to t·d")]
    Sum,
}

/// Two-type zero-travel instance whose resources can all stay busy over
/// `[0, T]` exactly when the matching instance `(t, d, a, b, c)` is
/// solvable. Type index 0 (id "0") has `t²` units and type index 1 (id "1")
/// has `t`. Rewards are interval length times the number of required types.
pub fn build_n3dm_instance(t: usize, d: i64, a: &[i64], b: &[i64], c: &[i64]) -> Result<Instance, N3dmError> {
    if a.len() != t || b.len() != t || c.len() != t {
        return Err(N3dmError::Length(t));
    }
    if a.iter().chain(b).chain(c).any(|&v| v <= 0 || v >= d) {
        return Err(N3dmError::Range);
    }
    if a.iter().chain(b).chain(c).sum::<i64>() != t as i64 * d {
        return Err(N3dmError::Sum);
    }
    let ti = t as i64;
    let big_a = |i: usize| i as i64;
    let big_b = |j: usize| ti + j as i64;
    let big_c = |i: usize, j: usize| 2 * ti + (i as i64 - 1) * ti + j as i64;
    let s = ti * ti + 2 * ti;
    let big_t = s + 2 * d + 1;

    let mut demands = Vec::new();
    let mut add = |id: String, from: i64, to: i64, requires: Vec<TypeIdx>| {
        let duration = to - from;
        demands.push(Demand {
            id,
            location: 0,
            start: from,
            duration,
            reward: duration * requires.len() as i64,
            requires,
            od: Vec::new(),
        });
    };
    let both = || alloc::vec![0, 1];
    for i in 1..=t {
        add(format!("open-a{i}"), 0, big_a(i), both());
    }
    for i in 1..=t {
        for j in 1..=t {
            add(format!("a{i}-c{i}.{j}"), big_a(i), big_c(i, j), both());
        }
    }
    for k in 1..=t {
        add(format!("close-c{k}"), s + d - c[k - 1], big_t, both());
    }
    for j in 1..=t {
        for copy in 1..t {
            add(format!("open-b{j}#{copy}"), 0, big_b(j), alloc::vec![0]);
        }
    }
    for i in 1..=t {
        for j in 1..=t {
            add(format!("b{j}-c{i}.{j}"), big_b(j), big_c(i, j), alloc::vec![0]);
        }
    }
    for i in 1..=t {
        for j in 1..=t {
            add(format!("match{i}.{j}/0"), big_c(i, j), s + a[i - 1] + b[j - 1], alloc::vec![0]);
        }
    }
    for i in 1..=t {
        for j in 1..=t {
            add(format!("rest{i}.{j}"), s + a[i - 1] + b[j - 1], big_t - 1, alloc::vec![0]);
        }
    }
    for copy in 1..=t * t - t {
        add(format!("close#{copy}"), big_t - 1, big_t, alloc::vec![0]);
    }
    for i in 1..=t {
        for j in 1..=t {
            add(format!("match{i}.{j}/1"), big_c(i, j), s + a[i - 1] + b[j - 1], alloc::vec![1]);
        }
    }
    let hub: LocIdx = 0;
    Ok(Instance {
        grid: None,
        locations: alloc::vec![Location { id: "hub".to_string(), coords: None }],
        travel: TravelMetric::Matrix(alloc::vec![alloc::vec![0]]),
        costs: None,
        types: alloc::vec![
            ResourceTypeSpec { id: "0".to_string(), starts: alloc::vec![StartStock { location: hub, count: (t * t) as u32 }] },
            ResourceTypeSpec { id: "1".to_string(), starts: alloc::vec![StartStock { location: hub, count: t as u32 }] },
        ],
        demands,
    })
}

/// Horizon `T` of the matching construction.
pub fn n3dm_horizon(t: usize, d: i64) -> i64 {
    let ti = t as i64;
    ti * ti + 2 * ti + 2 * d + 1
}
