//! Acceptance suite. Runs every criterion, prints one PASS or FAIL line for
//! each and exits nonzero if any failed.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mrmd::bench::{run_sweep, GridCell};
use mrmd_core::approx::{
    build_conflict_graph, greedy_color, run_algorithm_a, run_algorithm_b, run_algorithm_c, run_algorithm_e,
    run_algorithm_e_grouped, Coloring,
};
use mrmd_core::bicriteria::{run_bicriteria, FlowNode, Ratio};
use mrmd_core::costs::{run_algorithm_a_costs, solve_exact_costs};
use mrmd_core::exact::{evaluate_fixed_y, solve_brute_force, solve_exact_bb};
use mrmd_core::generate::{
    build_n3dm_instance, generate_random_instance, n3dm_horizon, one_or_all_instance, small_instance,
    with_bounded_costs, GeneratorConfig, SmallFamily,
};
use mrmd_core::schedule::{check_full_feasibility, solve_1r1d};
use mrmd_core::solution::validate_solution;
use mrmd_core::{build_reachability, Instance, ObjectiveKind, Unlimited};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn valid(inst: &Instance, sol: &mrmd_core::Solution, kind: ObjectiveKind, what: &str) -> Result<(), String> {
    let v = validate_solution(inst, &build_reachability(inst), sol, kind);
    ensure(v.is_empty(), || format!("{what}: invalid solution: {}", v[0]))
}

fn exact_matches_brute_force() -> Outcome {
    let fam = SmallFamily::new(3, 12, 2);
    let clock = Instant::now();
    let mut optimal = 0;
    for seed in 0..200 {
        let inst = small_instance(&fam, seed);
        let reach = build_reachability(&inst);
        let bb = solve_exact_bb(&inst, &reach, &mut Unlimited);
        let brute = solve_brute_force(&inst, &reach).map_err(|e| e.to_string())?;
        ensure(bb.optimal, || format!("seed {seed}: search did not finish"))?;
        ensure(bb.solution.objective == brute.objective, || {
            format!("seed {seed}: branch-and-bound {} vs brute force {}", bb.solution.objective, brute.objective)
        })?;
        valid(&inst, &bb.solution, ObjectiveKind::Reward, &format!("seed {seed}"))?;
        optimal += usize::from(bb.solution.objective > 0);
    }
    let secs = clock.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("200/200 equal ({optimal} nonzero) in {secs:.2}s"))
}

fn one_type_matches_enumeration() -> Outcome {
    let fam = SmallFamily::new(1, 8, 3);
    for seed in 0..200 {
        let inst = small_instance(&fam, seed);
        let reach = build_reachability(&inst);
        let got = solve_1r1d(&inst, reach.view(0));
        let want = support::best_one_type(&inst, 0);
        ensure(got.objective == want, || format!("seed {seed}: flow {} vs enumeration {want}", got.objective))?;
        valid(&inst, &got, ObjectiveKind::Reward, &format!("seed {seed}"))?;
    }
    Ok("200/200 equal".into())
}

/// Whether `a_i + b_σ(i) + c_π(i) = d` for some permutations σ, π.
fn matching_exists(d: i64, a: &[i64], b: &[i64], c: &[i64]) -> bool {
    fn rec(i: usize, d: i64, a: &[i64], b: &[i64], c: &[i64], ub: &mut [bool], uc: &mut [bool]) -> bool {
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            for k in 0..c.len() {
                if !ub[j] && !uc[k] && a[i] + b[j] + c[k] == d {
                    ub[j] = true;
                    uc[k] = true;
                    let ok = rec(i + 1, d, a, b, c, ub, uc);
                    ub[j] = false;
                    uc[k] = false;
                    if ok {
                        return true;
                    }
                }
            }
        }
        false
    }
    rec(0, d, a, b, c, &mut vec![false; b.len()], &mut vec![false; c.len()])
}

/// Triples of length `t` with entries in `1..d` summing to `t·d`.
fn triples(t: usize, d: i64, rng: &mut ChaCha8Rng, count: usize) -> Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> {
    let mut out = Vec::new();
    while out.len() < count {
        let v: Vec<i64> = (0..3 * t).map(|_| rng.random_range(1..d)).collect();
        if v.iter().sum::<i64>() == t as i64 * d {
            out.push((v[..t].to_vec(), v[t..2 * t].to_vec(), v[2 * t..].to_vec()));
        }
    }
    out
}

fn full_feasibility_check() -> Outcome {
    let fam = SmallFamily { horizon: 150, ..SmallFamily::new(3, 7, 3) };
    let mut feasible = 0;
    for seed in 0..200 {
        let inst = small_instance(&fam, seed);
        let got = check_full_feasibility(&inst, &build_reachability(&inst));
        let want = support::full_feasible(&inst);
        ensure(got.is_some() == want, || format!("seed {seed}: check says {}, oracle {want}", got.is_some()))?;
        if let Some(sol) = got {
            valid(&inst, &sol, ObjectiveKind::Reward, &format!("seed {seed}"))?;
            feasible += 1;
        }
    }
    // Matching instances: every unit busy over the whole horizon exactly
    // when the triple has a matching.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for (t, d, n) in [(1, 5, 3), (2, 6, 12), (3, 6, 6)] {
        for (a, b, c) in triples(t, d, &mut rng, n) {
            let inst = build_n3dm_instance(t, d, &a, &b, &c).map_err(|e| e.to_string())?;
            let reach = build_reachability(&inst);
            let best = solve_exact_bb(&inst, &reach, &mut Unlimited);
            let cap = (t * t + t) as i64 * n3dm_horizon(t, d);
            let yes = matching_exists(d, &a, &b, &c);
            ensure(best.optimal, || format!("t={t} {a:?} {b:?} {c:?}: search did not finish"))?;
            if yes {
                sat += 1;
                ensure(best.solution.objective == cap, || {
                    format!("t={t} {a:?} {b:?} {c:?}: matchable but optimum {} < {cap}", best.solution.objective)
                })?;
            } else {
                unsat += 1;
                ensure(best.solution.objective < cap, || {
                    format!("t={t} {a:?} {b:?} {c:?}: no matching but optimum reaches {cap}")
                })?;
            }
        }
    }
    ensure(sat > 0 && unsat > 0, || format!("{sat} matchable and {unsat} unmatchable triples"))?;
    Ok(format!("200/200 agree ({feasible} feasible); matching triples {sat} reach capacity, {unsat} fall short"))
}

/// Five types whose requirement sets `{i, i+1 mod 5}` form a 5-cycle.
fn five_cycle(seed: u64) -> Instance {
    let mut fam = SmallFamily::new(5, 10, 2);
    fam.shared_start = true;
    let mut inst = small_instance(&fam, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    inst.types = (0..5)
        .map(|r| mrmd_core::ResourceTypeSpec {
            id: format!("r{r}"),
            starts: vec![mrmd_core::StartStock { location: inst.locations.len() - 1, count: rng.random_range(1..=2) }],
        })
        .collect();
    for d in &mut inst.demands {
        let i = rng.random_range(0..5);
        let mut set = vec![i, (i + 1) % 5];
        set.sort_unstable();
        d.requires = set;
    }
    inst
}

fn ratio_certificates() -> Outcome {
    let mut fam = SmallFamily::new(3, 10, 2);
    fam.shared_start = true;
    let mut tight = 0;
    for seed in 0..100 {
        let inst = small_instance(&fam, seed);
        let reach = build_reachability(&inst);
        let opt = support::brute_opt(&inst);
        let a = run_algorithm_a(&inst, &reach).map_err(|e| e.to_string())?;
        let coloring = greedy_color(&build_conflict_graph(&inst));
        let b = run_algorithm_b(&inst, &reach, &coloring).map_err(|e| e.to_string())?;
        let c = run_algorithm_c(&inst, &reach, &coloring).map_err(|e| e.to_string())?;
        let r = inst.types.len() as i64;
        let chi = coloring.a as i64;
        ensure(r * a.objective >= opt, || format!("seed {seed}: |R|·A = {} < {opt}", r * a.objective))?;
        ensure(chi * b.objective >= opt, || format!("seed {seed}: χ·B = {} < {opt}", chi * b.objective))?;
        ensure(chi * c.objective >= opt, || format!("seed {seed}: a·C = {} < {opt}", chi * c.objective))?;
        for (name, sol) in [("A", &a), ("B", &b), ("C", &c)] {
            valid(&inst, sol, ObjectiveKind::Reward, &format!("seed {seed} {name}"))?;
        }
        tight += usize::from(a.objective == opt);
    }
    let mut classes_used = 0;
    for seed in 0..100 {
        let inst = five_cycle(seed);
        let reach = build_reachability(&inst);
        let g = build_conflict_graph(&inst);
        // node with set {i, i+1} gets colors {2i, 2i+1} mod 5
        let sets = g
            .nodes
            .iter()
            .map(|set| {
                let i = if set[..] == [0, 4] { 4 } else { set[0] };
                vec![(2 * i) % 5, (2 * i + 1) % 5]
            })
            .collect();
        let coloring = Coloring { a: 5, b: 2, sets };
        let c = run_algorithm_c(&inst, &reach, &coloring).map_err(|e| format!("seed {seed}: {e}"))?;
        let opt = support::brute_opt(&inst);
        ensure(5 * c.objective >= 2 * opt, || format!("seed {seed}: 5·C = {} < 2·{opt}", 5 * c.objective))?;
        valid(&inst, &c, ObjectiveKind::Reward, &format!("5:2 seed {seed}"))?;
        classes_used += usize::from(g.len() == 5);
    }
    Ok(format!("0 violations over 100 + 100 instances ({tight} where A is exact, {classes_used} full 5-cycles)"))
}

fn one_time_greedy_exact() -> Outcome {
    for seed in 0..200 {
        let inst = one_or_all_instance(3, 10, 3, false, seed);
        let sol = run_algorithm_e(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let opt = support::brute_opt(&inst);
        ensure(sol.objective == opt, || format!("seed {seed}: greedy {} vs {opt}", sol.objective))?;
        valid(&inst, &sol, ObjectiveKind::Reward, &format!("seed {seed}"))?;
    }
    for seed in 0..200 {
        let inst = one_or_all_instance(3, 10, 2, true, seed);
        let sol = run_algorithm_e_grouped(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let opt = support::brute_opt(&inst);
        ensure(sol.objective == opt, || format!("grouped seed {seed}: greedy {} vs {opt}", sol.objective))?;
        valid(&inst, &sol, ObjectiveKind::Reward, &format!("grouped seed {seed}"))?;
    }
    Ok("200/200 single-time and 200/200 grouped equal".into())
}

/// Instance keeping only the demands in `keep`.
fn restrict(inst: &Instance, keep: &[usize]) -> Instance {
    let mut out = inst.clone();
    out.demands = keep.iter().map(|&d| inst.demands[d].clone()).collect();
    out
}

/// Fully satisfiable: the optimal served set of a random instance.
/// Otherwise: that set plus unservable-together extras whose rewards stay
/// within the `eps` slack.
fn bicriteria_instance(seed: u64, eps: f64, full: bool) -> Option<Instance> {
    let fam = SmallFamily { max_reward: 2000, ..SmallFamily::new(3, 12, 2) };
    let inst = small_instance(&fam, seed);
    let reach = build_reachability(&inst);
    let best = solve_exact_bb(&inst, &reach, &mut Unlimited).solution;
    if best.served.is_empty() {
        return None;
    }
    if full {
        return Some(restrict(&inst, &best.served));
    }
    let extra: Vec<usize> = (0..inst.demands.len()).filter(|&d| !best.is_served(d)).collect();
    if extra.is_empty() {
        return None;
    }
    let slack = (eps * best.objective as f64 / (1.0 - eps)).floor() as i64 / extra.len() as i64;
    if slack < 1 {
        return None;
    }
    let mut out = inst.clone();
    for &d in &extra {
        out.demands[d].reward = slack;
    }
    Some(out)
}

fn bicriteria_guarantee() -> Outcome {
    let mut summary = Vec::new();
    for (k, eps) in [(2u64, Ratio::new(1, 10)), (5, Ratio::new(1, 100))] {
        for full in [true, false] {
            let mut done = 0;
            let mut seed = 0;
            let mut worst: f64 = f64::INFINITY;
            let mut dropped = 0;
            while done < 50 {
                seed += 1;
                ensure(seed < 5000, || "ran out of seeds".into())?;
                let Some(inst) = bicriteria_instance(seed, eps.value(), full) else { continue };
                let total = inst.total_reward();
                let opt = support::brute_opt(&inst);
                let satisfiable = opt as f64 >= (1.0 - eps.value()) * total as f64;
                let is_full = opt == total;
                if !satisfiable || is_full != full {
                    continue;
                }
                done += 1;
                let reach = build_reachability(&inst);
                let tag = format!("k={k} eps={} seed {seed}", eps.value());
                let out = run_bicriteria(&inst, &reach, k, eps).map_err(|e| format!("{tag}: {e}"))?;
                let bound = (k - 1) as f64 / k as f64 * out.lp_objective - 1e-6 * total as f64;
                ensure(out.solution.objective as f64 >= bound, || {
                    format!("{tag}: objective {} < {bound:.3}", out.solution.objective)
                })?;
                worst = worst.min(out.solution.objective as f64 / out.lp_objective);
                dropped += usize::from(out.kept.len() < inst.demands.len());
                valid(&out.inflated, &out.solution, ObjectiveKind::Reward, &tag)?;
                // units leaving each start location stay within the rounded-up inflation
                for (r, ty) in inst.types.iter().enumerate() {
                    for s in &ty.starts {
                        let used = out.solution.paths.iter().filter(|p| p.resource_type == r && p.start == s.location).count()
                            as u64;
                        let keep = eps.den - k * eps.num;
                        let allowed = (u64::from(s.count) * eps.den).div_ceil(keep);
                        ensure(used <= allowed, || format!("{tag}: type {r} uses {used} > {allowed} units"))?;
                    }
                }
                check_rebounds(&inst, &out, &tag)?;
            }
            summary.push(format!(
                "k={k} eps={} {}: min objective/LP {worst:.3}, {dropped} drop demands",
                eps.value(),
                if full { "full" } else { "slack" }
            ));
        }
    }
    Ok(format!("4×50 instances; {}", summary.join("; ")))
}

fn check_rebounds(inst: &Instance, out: &mrmd_core::bicriteria::BicriteriaOutcome, tag: &str) -> Result<(), String> {
    let reach = build_reachability(inst);
    for (r, view) in reach.views.iter().enumerate() {
        let flow = &out.rebounds[r].flow;
        for (&(a, b), &x) in flow {
            ensure(x > 0.0 && x <= 1.0 + 1e-9, || format!("{tag}: type {r} arc {a:?}→{b:?} carries {x}"))?;
        }
        for j in 0..view.len() {
            let node = FlowNode::Demand(j);
            let inflow: f64 = flow.iter().filter(|(e, _)| e.1 == node).map(|(_, v)| v).sum();
            let outflow: f64 = flow.iter().filter(|(e, _)| e.0 == node).map(|(_, v)| v).sum();
            ensure((inflow - outflow).abs() < 1e-7, || format!("{tag}: type {r} demand {j} unbalanced"))?;
            if out.kept.contains(&view.demands[j]) {
                ensure(inflow >= 1.0 - 1e-7, || format!("{tag}: type {r} kept demand {j} inflow {inflow}"))?;
            }
        }
        let totals = &out.rebounds[r].totals;
        ensure(totals.windows(2).all(|w| w[1] < w[0]), || format!("{tag}: type {r} total flow did not fall"))?;
    }
    Ok(())
}

fn fixed_sets_route_integrally() -> Outcome {
    let fam = SmallFamily::new(3, 9, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut feasible, mut infeasible, mut seed) = (0, 0, 0);
    while feasible < 100 {
        seed += 1;
        ensure(seed < 10_000, || "ran out of seeds".into())?;
        let inst = small_instance(&fam, seed);
        let mut set: Vec<usize> = (0..inst.demands.len()).filter(|_| rng.random_bool(0.6)).collect();
        set.shuffle(&mut rng);
        set.sort_unstable();
        let want = support::set_feasible(&inst, &set);
        let got = evaluate_fixed_y(&inst, &build_reachability(&inst), &set);
        ensure(got.is_some() == want, || format!("seed {seed}: routing says {}, oracle {want}", got.is_some()))?;
        match got {
            Some(sol) => {
                ensure(sol.served == set, || format!("seed {seed}: served set changed"))?;
                valid(&inst, &sol, ObjectiveKind::Reward, &format!("seed {seed}"))?;
                feasible += 1;
            }
            None => infeasible += 1,
        }
    }
    Ok(format!("100 feasible sets decomposed into valid paths; {infeasible} infeasible sets rejected"))
}

fn travel_cost_guarantee() -> Outcome {
    let mut fam = SmallFamily::new(3, 9, 2);
    fam.shared_start = true;
    for seed in 0..100 {
        let mut inst = small_instance(&fam, seed);
        let n = inst.locations.len();
        inst.costs = Some(vec![vec![0; n]; n]);
        let reach = build_reachability(&inst);
        let plain = solve_exact_bb(&inst, &reach, &mut Unlimited).solution;
        let costed = solve_exact_costs(&inst, &reach, &mut Unlimited);
        ensure(costed.solution.served == plain.served && costed.objective.net == plain.objective, || {
            format!("seed {seed}: zero-cost exact differs")
        })?;
        let (a, obj) = run_algorithm_a_costs(&inst, &reach, false).map_err(|e| format!("seed {seed}: {e}"))?;
        let a_plain = run_algorithm_a(&inst, &reach).map_err(|e| e.to_string())?;
        ensure(a.served == a_plain.served && obj.net == a_plain.objective, || {
            format!("seed {seed}: zero-cost heuristic differs")
        })?;
    }
    let mut worst = f64::INFINITY;
    for seed in 0..100 {
        let inst = with_bounded_costs(&small_instance(&fam, seed), 1);
        let reach = build_reachability(&inst);
        let (sol, obj) = run_algorithm_a_costs(&inst, &reach, false).map_err(|e| format!("seed {seed}: {e}"))?;
        let best = solve_exact_costs(&inst, &reach, &mut Unlimited);
        let oracle = support::brute_net(&inst);
        ensure(best.objective.net == oracle, || format!("seed {seed}: exact net {} vs {oracle}", best.objective.net))?;
        let factor = 2 * inst.types.len() as i64;
        ensure(factor * obj.net >= best.objective.net, || {
            format!("seed {seed}: 2|R|·{} < {}", obj.net, best.objective.net)
        })?;
        valid(&inst, &sol, ObjectiveKind::Net, &format!("seed {seed}"))?;
        if best.objective.net > 0 {
            worst = worst.min(obj.net as f64 / best.objective.net as f64);
        }
    }
    Ok(format!("zero-cost reduction exact on 100; guarantee holds on 100 (worst ratio {worst:.3})"))
}

fn desk_scale_envelope() -> Outcome {
    let mut slowest = Duration::ZERO;
    for seed in 0..10 {
        let inst = generate_random_instance(&GeneratorConfig::new(2, 100, 10), seed).map_err(|e| e.to_string())?;
        let clock = Instant::now();
        let out = solve_exact_bb(&inst, &build_reachability(&inst), &mut Unlimited);
        let took = clock.elapsed();
        ensure(out.optimal, || format!("seed {seed}: not proven optimal"))?;
        ensure(took < Duration::from_secs(300), || format!("seed {seed}: {took:?}"))?;
        valid(&inst, &out.solution, ObjectiveKind::Reward, &format!("seed {seed}"))?;
        slowest = slowest.max(took);
    }
    Ok(format!("10 instances solved to optimality, slowest {:.3}s", slowest.as_secs_f64()))
}

fn resource_sweep_shape() -> Outcome {
    let cell = GridCell::new(3, 60, 6);
    let rows = run_sweep(cell, 0..5, 15, None).map_err(|e| e.to_string())?;
    let mut plateau_at = Vec::new();
    for seed in 0..5 {
        let obj: Vec<i64> = rows.iter().filter(|r| r.seed == seed).map(|r| r.objective).collect();
        let full: Vec<bool> = rows.iter().filter(|r| r.seed == seed).map(|r| r.full).collect();
        ensure(rows.iter().all(|r| r.optimal), || "a sweep solve did not finish".into())?;
        ensure(obj.windows(2).all(|w| w[1] >= w[0]), || format!("seed {seed}: objective decreases: {obj:?}"))?;
        if let Some(p) = full.iter().position(|&f| f) {
            ensure(obj[p..].iter().all(|&v| v == obj[p]), || format!("seed {seed}: increase after full service"))?;
            plateau_at.push(p);
        } else {
            return Err(format!("seed {seed}: never serves every reachable demand: {obj:?}"));
        }
        // gains shrink: the first half of the sweep gains at least as much as the second
        let gain = |a: usize, b: usize| obj[b] - obj[a];
        ensure(gain(0, 7) >= gain(7, 15), || format!("seed {seed}: gains grow: {obj:?}"))?;
    }
    Ok(format!("5 instances nondecreasing; every reachable demand served after adding {plateau_at:?} units per type"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact search equals brute force", exact_matches_brute_force),
        ("single-type flow equals schedule enumeration", one_type_matches_enumeration),
        ("full-feasibility check and matching instances", full_feasibility_check),
        ("approximation ratio certificates", ratio_certificates),
        ("one-or-all greedy is exact", one_time_greedy_exact),
        ("bicriteria rounding guarantee and rebounding", bicriteria_guarantee),
        ("fixed served sets route integrally", fixed_sets_route_integrally),
        ("travel-cost extension", travel_cost_guarantee),
        ("desk-scale exact solve envelope", desk_scale_envelope),
        ("added-resource sweep shape", resource_sweep_shape),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
