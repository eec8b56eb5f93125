//! Benchmark grid over generated instances, and the added-resources sweep.

use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use mrmd_core::approx::{build_conflict_graph, greedy_color, run_algorithm_a, run_algorithm_b};
use mrmd_core::exact::solve_exact_bb;
use mrmd_core::generate::{generate_random_instance, GeneratorConfig, GeneratorError};
use mrmd_core::{build_reachability, Instance};
use serde::{Deserialize, Serialize};

/// One `(|R|, |D|, L)` configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub types: usize,
    pub demands: usize,
    pub resources: u32,
}

impl GridCell {
    pub const fn new(types: usize, demands: usize, resources: u32) -> Self {
        GridCell { types, demands, resources }
    }
}

/// Smaller instances whose exact solves finish in seconds. Each type count
/// uses the resource total the published grid pairs with 100 demands.
pub fn desk_grid() -> Vec<GridCell> {
    let mut out = Vec::new();
    for (types, resources) in [(2, 10), (3, 12), (4, 16)] {
        for demands in [25, 50, 100] {
            out.push(GridCell::new(types, demands, resources));
        }
    }
    out
}

/// The published grid: 2 to 7 types, 100 to 800 demands.
pub fn full_grid() -> Vec<GridCell> {
    let mut out = Vec::new();
    for types in 2..=7u32 {
        for k in 1..=8u32 {
            // resource totals grow by 2 per type per 100 demands
            let base = if types == 2 { 10 } else { 4 * types };
            out.push(GridCell::new(types as usize, 100 * k as usize, base + 2 * types * (k - 1)));
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("grid file: {0}")]
    Csv(#[from] csv::Error),
    #[error("grid file has no cells")]
    Empty,
}

/// Reads a CSV grid with header `types,demands,resources`.
pub fn parse_grid<R: io::Read>(reader: R) -> Result<Vec<GridCell>, GridError> {
    let cells = csv::Reader::from_reader(reader).deserialize().collect::<Result<Vec<GridCell>, _>>()?;
    if cells.is_empty() {
        return Err(GridError::Empty);
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    A,
    B,
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Solver::Exact),
            "a" => Ok(Solver::A),
            "b" => Ok(Solver::B),
            _ => Err(format!("unknown solver `{s}`; expected exact, a or b")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub types: usize,
    pub demands: usize,
    pub resources: u32,
    pub seed: u64,
    pub solver: Solver,
    /// Empty when the solver does not apply to the instance.
    pub objective: Option<i64>,
    pub seconds: f64,
    pub optimal: bool,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub seeds: u64,
    pub first_seed: u64,
    pub time_limit: Option<Duration>,
    pub solvers: Vec<Solver>,
    pub shared_start: bool,
    pub scaled_rewards: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seeds: 10,
            first_seed: 0,
            time_limit: None,
            solvers: vec![Solver::Exact],
            shared_start: false,
            scaled_rewards: false,
        }
    }
}

pub fn instance_for(cell: GridCell, shared_start: bool, scaled_rewards: bool, seed: u64) -> Result<Instance, GeneratorError> {
    let mut cfg = GeneratorConfig::new(cell.types, cell.demands, cell.resources);
    cfg.shared_start = shared_start;
    cfg.scaled_rewards = scaled_rewards;
    generate_random_instance(&cfg, seed)
}

/// Exact solve that gives up once `limit` has elapsed.
pub fn exact_with_limit(inst: &Instance, limit: Option<Duration>) -> mrmd_core::exact::ExactOutcome {
    let reach = build_reachability(inst);
    let start = Instant::now();
    let mut budget = || limit.is_some_and(|l| start.elapsed() >= l);
    solve_exact_bb(inst, &reach, &mut budget)
}

fn run_solver(inst: &Instance, solver: Solver, limit: Option<Duration>) -> (Option<i64>, bool) {
    let reach = build_reachability(inst);
    match solver {
        Solver::Exact => {
            let out = exact_with_limit(inst, limit);
            (Some(out.solution.objective), out.optimal)
        }
        Solver::A => (run_algorithm_a(inst, &reach).ok().map(|s| s.objective), false),
        Solver::B => {
            let coloring = greedy_color(&build_conflict_graph(inst));
            (run_algorithm_b(inst, &reach, &coloring).ok().map(|s| s.objective), false)
        }
    }
}

/// Runs every solver on `cfg.seeds` generated instances per cell. Rows come
/// out ordered by cell, seed and solver.
pub fn run_benchmark_suite(cells: &[GridCell], cfg: &BenchConfig) -> Result<Vec<BenchRow>, GeneratorError> {
    let mut rows = Vec::new();
    for &cell in cells {
        for seed in cfg.first_seed..cfg.first_seed + cfg.seeds {
            let inst = instance_for(cell, cfg.shared_start, cfg.scaled_rewards, seed)?;
            for &solver in &cfg.solvers {
                let clock = Instant::now();
                let (objective, optimal) = run_solver(&inst, solver, cfg.time_limit);
                rows.push(BenchRow {
                    types: cell.types,
                    demands: cell.demands,
                    resources: cell.resources,
                    seed,
                    solver,
                    objective,
                    seconds: clock.elapsed().as_secs_f64(),
                    optimal,
                });
            }
        }
    }
    Ok(rows)
}

/// Averages over the seeds of one cell and solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub types: usize,
    pub demands: usize,
    pub resources: u32,
    pub solver: Solver,
    pub runs: usize,
    pub mean_objective: Option<f64>,
    pub mean_seconds: f64,
    pub optimal_runs: usize,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    let mut sums: Vec<(i64, usize)> = Vec::new();
    for row in rows {
        let key = (row.types, row.demands, row.resources, row.solver);
        let pos = match out.iter().position(|s| (s.types, s.demands, s.resources, s.solver) == key) {
            Some(p) => p,
            None => {
                out.push(CellSummary {
                    types: row.types,
                    demands: row.demands,
                    resources: row.resources,
                    solver: row.solver,
                    runs: 0,
                    mean_objective: None,
                    mean_seconds: 0.0,
                    optimal_runs: 0,
                });
                sums.push((0, 0));
                out.len() - 1
            }
        };
        let s = &mut out[pos];
        s.runs += 1;
        s.mean_seconds += row.seconds;
        s.optimal_runs += usize::from(row.optimal);
        if let Some(v) = row.objective {
            sums[pos].0 += v;
            sums[pos].1 += 1;
        }
    }
    for (s, (total, n)) in out.iter_mut().zip(sums) {
        s.mean_seconds /= s.runs as f64;
        s.mean_objective = (n > 0).then(|| total as f64 / n as f64);
    }
    out
}

pub fn write_csv<T: Serialize, W: io::Write>(rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub added_resources: u32,
    pub objective: i64,
    /// Every demand that some unit of each required type can reach in time
    /// is served; more units cannot help.
    pub full: bool,
    pub optimal: bool,
}

/// Copy of `inst` with `added` more units of every type at its first start
/// location.
pub fn add_units(inst: &Instance, added: u32) -> Instance {
    let mut out = inst.clone();
    for t in &mut out.types {
        if let Some(s) = t.starts.first_mut() {
            s.count += added;
        }
    }
    out
}

/// Total reward of the demands that one unit of each required type could
/// reach from its start location in time.
pub fn servable_reward(inst: &Instance) -> i64 {
    let reach = build_reachability(inst);
    (0..inst.demands.len())
        .filter(|&d| {
            inst.demands[d]
                .requires
                .iter()
                .all(|&r| inst.types[r].starts.iter().any(|s| reach.b(s.location, d)))
        })
        .map(|d| inst.demands[d].reward)
        .sum()
}

/// Solves each seeded instance of `cell` exactly with `0..=max_added` extra
/// units of every type.
pub fn run_sweep(
    cell: GridCell,
    seeds: impl IntoIterator<Item = u64>,
    max_added: u32,
    time_limit: Option<Duration>,
) -> Result<Vec<SweepRow>, GeneratorError> {
    let mut rows = Vec::new();
    for seed in seeds {
        let base = instance_for(cell, false, false, seed)?;
        let total = servable_reward(&base);
        for added in 0..=max_added {
            let out = exact_with_limit(&add_units(&base, added), time_limit);
            rows.push(SweepRow {
                seed,
                added_resources: added,
                objective: out.solution.objective,
                full: out.solution.objective == total,
                optimal: out.optimal,
            });
        }
    }
    Ok(rows)
}
