use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mrmd::bench::{self, BenchConfig, GridCell, Solver};
use mrmd::dump::{dimacs, reachability_coordinates};
use mrmd::format::{instance_to_json, parse_instance, parse_solution, solution_to_json, ColoringFile};
use mrmd::parse_ratio;
use mrmd_core::approx::{
    build_conflict_graph, greedy_color, run_algorithm_a, run_algorithm_b, run_algorithm_c, run_algorithm_e,
    run_algorithm_e_grouped, ApproxError, Coloring,
};
use mrmd_core::bicriteria::{run_bicriteria, Ratio};
use mrmd_core::costs::{run_algorithm_a_costs, solve_exact_costs, CostedObjective};
use mrmd_core::exact::{solve_brute_force, solve_brute_force_costs, solve_exact_bb, BRUTE_FORCE_CAP};
use mrmd_core::generate::{build_n3dm_instance, generate_random_instance, GeneratorConfig};
use mrmd_core::instance::validate_instance;
use mrmd_core::schedule::{build_routing_network, check_full_feasibility};
use mrmd_core::solution::validate_solution;
use mrmd_core::{build_od_reachability, build_reachability, Grid, Instance, ObjectiveKind, ReachabilityData, Solution};

#[derive(Parser)]
#[command(name = "mrmd", version, about = "Allocate typed resource units to demands that need several types at once")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    Generate {
        #[arg(long)]
        types: usize,
        #[arg(long)]
        demands: usize,
        /// Total units, split evenly over the types.
        #[arg(long)]
        resources: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side length of the square grid.
        #[arg(long, default_value_t = 20)]
        grid: i64,
        #[arg(long, default_value_t = 1440)]
        horizon: i64,
        /// Start every unit at one depot.
        #[arg(long)]
        shared_start: bool,
        /// Multiply rewards by 100.
        #[arg(long)]
        scaled_rewards: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an instance, and optionally a solution against it.
    Validate {
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        /// The solution objective is reward minus travel cost.
        #[arg(long)]
        costs: bool,
        /// Use origin-destination reachability.
        #[arg(long)]
        od: bool,
    },
    /// Solve an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Rounding parameter for bicriteria.
        #[arg(long, default_value_t = 2)]
        k: u64,
        /// Satisfiability slack for bicriteria, as 1/10 or 0.1.
        #[arg(long, default_value = "1/10", value_parser = parse_ratio)]
        eps: Ratio,
        /// Maximize reward minus travel cost (exact, brute, a).
        #[arg(long)]
        costs: bool,
        /// Run the cost-aware heuristic even when costs exceed its bound.
        #[arg(long)]
        force: bool,
        /// Seconds before the exact search returns its best solution so far.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Coloring file for algorithms b and c; greedy when absent.
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Use origin-destination reachability.
        #[arg(long)]
        od: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where bicriteria writes the instance with raised stocks.
        #[arg(long)]
        inflated_out: Option<PathBuf>,
        /// Write the nonzero entries of A and B.
        #[arg(long)]
        dump_reach: Option<PathBuf>,
        /// Write each type's routing network for the returned served set in DIMACS form.
        #[arg(long)]
        dump_mcf: Option<PathBuf>,
    },
    /// Check whether every demand can be served; exits 1 if not.
    Feasible {
        instance: PathBuf,
        #[arg(long)]
        od: bool,
        /// Where to write the witness solution.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time solvers over a grid of generated instances.
    Bench {
        /// CSV with header `types,demands,resources`. Defaults to a small grid.
        #[arg(long, conflicts_with = "full")]
        grid: Option<PathBuf>,
        /// Use the published 2-7 type, 100-800 demand grid.
        #[arg(long)]
        full: bool,
        /// Per-instance rows.
        #[arg(long)]
        out: PathBuf,
        /// Averages per cell and solver.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        time_limit: Option<f64>,
        /// Comma-separated list of exact, a, b.
        #[arg(long, value_delimiter = ',', default_value = "exact")]
        solvers: Vec<Solver>,
        #[arg(long)]
        shared_start: bool,
        #[arg(long)]
        scaled_rewards: bool,
    },
    /// Exact objective as every type gains 0..=max-added units.
    Sweep {
        #[arg(long, default_value_t = 3)]
        types: usize,
        #[arg(long, default_value_t = 60)]
        demands: usize,
        #[arg(long, default_value_t = 6)]
        resources: u32,
        #[arg(long, default_value_t = 15)]
        max_added: u32,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the two-type instance encoding a numerical matching triple.
    N3dm {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: i64,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<i64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<i64>,
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    Brute,
    A,
    B,
    C,
    E,
    Bicriteria,
}

/// Command ran but the answer is "no": infeasible, invalid or inapplicable.
#[derive(Debug)]
struct Refused(String);

impl std::fmt::Display for Refused {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Refused {}

fn refuse<T>(msg: impl Into<String>) -> Result<T> {
    Err(Refused(msg.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Refused>() => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Reads and validates an instance; violations are a refusal.
fn load(path: &Path) -> Result<Instance> {
    let inst = parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return refuse(format!("{}: invalid instance\n{}", path.display(), lines.join("\n")));
    }
    Ok(inst)
}

fn reachability(inst: &Instance, od: bool) -> Result<ReachabilityData> {
    if od {
        build_od_reachability(inst).or_else(|e| refuse(e.to_string()))
    } else {
        Ok(build_reachability(inst))
    }
}

fn limit(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).context("time limit must be a nonnegative number of seconds"))
        .transpose()
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate { types, demands, resources, seed, grid, horizon, shared_start, scaled_rewards, out } => {
            let mut cfg = GeneratorConfig::new(types, demands, resources);
            cfg.grid = Grid { width: grid, height: grid };
            cfg.horizon = horizon;
            cfg.shared_start = shared_start;
            cfg.scaled_rewards = scaled_rewards;
            let inst = generate_random_instance(&cfg, seed)?;
            emit(out.as_deref(), &instance_to_json(&inst))
        }
        Command::Validate { instance, solution, costs, od } => {
            let inst = load(&instance)?;
            let Some(sol_path) = solution else {
                println!("instance ok: {} demands, {} types", inst.demands.len(), inst.types.len());
                return Ok(());
            };
            let reach = reachability(&inst, od)?;
            let sol = parse_solution(&read(&sol_path)?, &inst)
                .with_context(|| format!("parsing {}", sol_path.display()))?;
            let kind = if costs { ObjectiveKind::Net } else { ObjectiveKind::Reward };
            let violations = validate_solution(&inst, &reach, &sol, kind);
            if violations.is_empty() {
                println!("solution ok: objective {}", sol.objective);
                Ok(())
            } else {
                let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
                refuse(format!("{}: invalid solution\n{}", sol_path.display(), lines.join("\n")))
            }
        }
        Command::Solve {
            instance,
            algo,
            k,
            eps,
            costs,
            force,
            time_limit,
            coloring,
            od,
            out,
            inflated_out,
            dump_reach,
            dump_mcf,
        } => {
            let inst = load(&instance)?;
            let reach = reachability(&inst, od)?;
            if let Some(p) = &dump_reach {
                emit(Some(p), &reachability_coordinates(&reach))?;
            }
            let limit = limit(time_limit)?;
            let sol = solve(&inst, &reach, algo, Params { k, eps, costs, force, limit, coloring, inflated_out })?;
            if let Some(p) = &dump_mcf {
                let mut text = String::new();
                for view in &reach.views {
                    let served: Vec<bool> = view.demands.iter().map(|&d| sol.is_served(d)).collect();
                    let tn = build_routing_network(&inst, view, &served, costs);
                    text.push_str(&dimacs(&tn.network, &format!("type {}", inst.types[view.resource_type].id)));
                }
                emit(Some(p), &text)?;
            }
            emit(out.as_deref(), &solution_to_json(&inst, &sol))
        }
        Command::Feasible { instance, od, out } => {
            let inst = load(&instance)?;
            let reach = reachability(&inst, od)?;
            match check_full_feasibility(&inst, &reach) {
                Some(sol) => {
                    eprintln!("feasible: all {} demands can be served", inst.demands.len());
                    if let Some(p) = &out {
                        emit(Some(p), &solution_to_json(&inst, &sol))?;
                    }
                    Ok(())
                }
                None => refuse("infeasible: the demands cannot all be served"),
            }
        }
        Command::Bench { grid, full, out, summary, seeds, seed, time_limit, solvers, shared_start, scaled_rewards } => {
            let cells = match (&grid, full) {
                (Some(p), _) => bench::parse_grid(fs::File::open(p).with_context(|| format!("opening {}", p.display()))?)?,
                (None, true) => bench::full_grid(),
                (None, false) => bench::desk_grid(),
            };
            let cfg = BenchConfig { seeds, first_seed: seed, time_limit: limit(time_limit)?, solvers, shared_start, scaled_rewards };
            let rows = bench::run_benchmark_suite(&cells, &cfg)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            bench::write_csv(&rows, file)?;
            let sums = bench::summarize(&rows);
            match summary {
                Some(p) => bench::write_csv(&sums, fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?)?,
                None => bench::write_csv(&sums, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Sweep { types, demands, resources, max_added, seeds, seed, time_limit, out } => {
            let cell = GridCell::new(types, demands, resources);
            let rows = bench::run_sweep(cell, seed..seed + seeds, max_added, limit(time_limit)?)?;
            match out {
                Some(p) => bench::write_csv(&rows, fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?)?,
                None => bench::write_csv(&rows, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::N3dm { t, d, a, b, c, out } => {
            let inst = build_n3dm_instance(t, d, &a, &b, &c)?;
            emit(out.as_deref(), &instance_to_json(&inst))
        }
    }
}

struct Params {
    k: u64,
    eps: Ratio,
    costs: bool,
    force: bool,
    limit: Option<Duration>,
    coloring: Option<PathBuf>,
    inflated_out: Option<PathBuf>,
}

fn coloring_for(inst: &Instance, path: Option<&Path>) -> Result<Coloring> {
    let g = build_conflict_graph(inst);
    match path {
        Some(p) => {
            let file: ColoringFile =
                serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            Ok(file.resolve(inst, &g)?)
        }
        None => Ok(greedy_color(&g)),
    }
}

fn approx<T>(r: Result<T, ApproxError>) -> Result<T> {
    r.or_else(|e| refuse(format!("not applicable: {e}")))
}

fn report(sol: &Solution, extra: &str) {
    let cert = sol.certificate.map(|c| format!(", certificate {c}")).unwrap_or_default();
    eprintln!("objective {}{cert}{extra}", sol.objective);
}

fn report_costed(obj: &CostedObjective) -> String {
    format!(" (reward {}, travel cost {})", obj.gross, obj.travel_cost)
}

fn solve(inst: &Instance, reach: &ReachabilityData, algo: Algo, p: Params) -> Result<Solution> {
    if p.costs && !matches!(algo, Algo::Exact | Algo::Brute | Algo::A) {
        bail!("--costs applies to exact, brute and a only");
    }
    let clock = Instant::now();
    let mut budget = || p.limit.is_some_and(|l| clock.elapsed() >= l);
    let sol = match algo {
        Algo::Exact if p.costs => {
            let out = solve_exact_costs(inst, reach, &mut budget);
            let status = if out.optimal { ", optimal" } else { ", time limit reached" };
            report(&out.solution, &format!("{}{status}", report_costed(&out.objective)));
            out.solution
        }
        Algo::Exact => {
            let out = solve_exact_bb(inst, reach, &mut budget);
            let status = if out.optimal { "optimal" } else { "time limit reached" };
            report(&out.solution, &format!(", {status}, {} nodes", out.nodes));
            out.solution
        }
        Algo::Brute => {
            let sol = if p.costs {
                solve_brute_force_costs(inst, reach, BRUTE_FORCE_CAP)
            } else {
                solve_brute_force(inst, reach)
            };
            let sol = sol.or_else(|e| refuse(e.to_string()))?;
            report(&sol, "");
            sol
        }
        Algo::A if p.costs => {
            let (sol, obj) = match run_algorithm_a_costs(inst, reach, p.force) {
                Ok(x) => x,
                Err(e) => return refuse(format!("not applicable: {e}; pass --force to run without the guarantee")),
            };
            report(&sol, &report_costed(&obj));
            sol
        }
        Algo::A => {
            let sol = approx(run_algorithm_a(inst, reach))?;
            report(&sol, "");
            sol
        }
        Algo::B => {
            let sol = approx(run_algorithm_b(inst, reach, &coloring_for(inst, p.coloring.as_deref())?))?;
            report(&sol, "");
            sol
        }
        Algo::C => {
            let sol = approx(run_algorithm_c(inst, reach, &coloring_for(inst, p.coloring.as_deref())?))?;
            report(&sol, "");
            sol
        }
        Algo::E => {
            let sol = match run_algorithm_e(inst) {
                Err(ApproxError::MixedStartTimes) => approx(run_algorithm_e_grouped(inst))?,
                other => approx(other)?,
            };
            report(&sol, "");
            sol
        }
        Algo::Bicriteria => {
            let out = run_bicriteria(inst, reach, p.k, p.eps).or_else(|e| refuse(e.to_string()))?;
            let stocks: Vec<String> = inst
                .types
                .iter()
                .zip(&out.inflated.types)
                .map(|(a, b)| format!("{} {}→{}", a.id, a.total(), b.total()))
                .collect();
            report(
                &out.solution,
                &format!(", LP bound {:.3}, kept {} demands, stocks {}", out.lp_objective, out.kept.len(), stocks.join(", ")),
            );
            if let Some(path) = &p.inflated_out {
                emit(Some(path), &instance_to_json(&out.inflated))?;
            }
            out.solution
        }
    };
    Ok(sol)
}
