mod support;

use mrmd_core::bicriteria::{rebound_flows, FlowNode, TypeFlow};
use mrmd_core::generate::{small_instance, SmallFamily};
use mrmd_core::lp::{build_lp_relaxation, max_violation, solve_lp};
use mrmd_core::schedule::route_type;
use mrmd_core::build_reachability;
use mrmd_core::exact::solve_brute_force;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn relaxation_sandwich() {
    let fam = SmallFamily::new(3, 10, 2);
    for seed in 0..100 {
        let inst = small_instance(&fam, seed);
        let reach = build_reachability(&inst);
        let lp = build_lp_relaxation(&inst, &reach);
        let frac = solve_lp(&lp);
        assert!(max_violation(&lp.program, &frac.x) < 1e-9, "seed {seed}");
        let opt = solve_brute_force(&inst, &reach).unwrap().objective as f64;
        assert!(opt <= frac.objective + 1e-6, "seed {seed}");
        assert!(frac.objective <= inst.total_reward() as f64 + 1e-6);
    }
}

/// Rebounding a scaled-up integral routing keeps every arc within one,
/// conserves flow at demands and keeps inflow at least one where there was
/// flow; total flow strictly falls at every step.
#[test]
fn rebound_postconditions_on_scaled_routings() {
    let fam = SmallFamily::new(2, 10, 3);
    for seed in 0..150 {
        let inst = small_instance(&fam, seed);
        let reach = build_reachability(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sol = solve_brute_force(&inst, &reach).unwrap();
        for view in &reach.views {
            let served: Vec<bool> = view.demands.iter().map(|&d| sol.is_served(d)).collect();
            let (_, paths) = route_type(&inst, view, &served, false).unwrap();
            let scale = rng.random_range(1.0..3.0);
            let mut flow = TypeFlow::new();
            for (pos, p) in &paths {
                let mut at = FlowNode::Start(*pos);
                for &k in p.iter().chain(std::iter::once(&usize::MAX)) {
                    let next = if k == usize::MAX { FlowNode::Sink } else { FlowNode::Demand(k) };
                    *flow.entry((at, next)).or_insert(0.0) += scale;
                    at = next;
                }
            }
            let out = rebound_flows(view, flow).unwrap();
            assert!(out.totals.windows(2).all(|w| w[1] < w[0]), "seed {seed}");
            for (&(_, _), &x) in &out.flow {
                assert!(x <= 1.0 + 1e-9);
            }
            for k in 0..view.len() {
                let inflow: f64 = out.flow.iter().filter(|(a, _)| a.1 == FlowNode::Demand(k)).map(|(_, v)| v).sum();
                let outflow: f64 = out.flow.iter().filter(|(a, _)| a.0 == FlowNode::Demand(k)).map(|(_, v)| v).sum();
                assert!((inflow - outflow).abs() < 1e-9, "seed {seed}");
                if served[k] {
                    assert!(inflow >= 1.0 - 1e-9, "seed {seed}");
                }
            }
        }
    }
}
