mod support;

use mrmd_core::approx::run_algorithm_a;
use mrmd_core::costs::{run_algorithm_a_costs, solve_exact_costs};
use mrmd_core::exact::{solve_brute_force_costs, solve_exact_bb};
use mrmd_core::generate::{small_instance, with_bounded_costs, SmallFamily};
use mrmd_core::solution::{validate_solution, ObjectiveKind};
use mrmd_core::{build_reachability, Unlimited};

fn family() -> SmallFamily {
    let mut fam = SmallFamily::new(3, 9, 2);
    fam.shared_start = true;
    fam
}

#[test]
fn zero_costs_reduce_to_plain_objective() {
    for seed in 0..100 {
        let mut inst = small_instance(&family(), seed);
        let n = inst.locations.len();
        inst.costs = Some(vec![vec![0; n]; n]);
        let reach = build_reachability(&inst);
        let plain = solve_exact_bb(&inst, &reach, &mut Unlimited);
        let costed = solve_exact_costs(&inst, &reach, &mut Unlimited);
        assert_eq!(costed.objective.net, plain.solution.objective, "seed {seed}");
        let (a, obj) = run_algorithm_a_costs(&inst, &reach, false).unwrap();
        assert_eq!(obj.net, run_algorithm_a(&inst, &reach).unwrap().objective);
        assert_eq!(a.served, run_algorithm_a(&inst, &reach).unwrap().served);
    }
}

#[test]
fn exact_net_matches_enumeration() {
    let mut fam = family();
    fam.shared_start = false;
    fam.max_demands = 8;
    for seed in 0..100 {
        let mut inst = small_instance(&fam, seed);
        for d in &mut inst.demands {
            d.reward = d.reward / 2 + 1;
        }
        let reach = build_reachability(&inst);
        let out = solve_exact_costs(&inst, &reach, &mut Unlimited);
        assert!(out.optimal);
        assert_eq!(out.objective.net, support::brute_net(&inst), "seed {seed}");
        assert_eq!(solve_brute_force_costs(&inst, &reach, 16).unwrap().objective, out.objective.net);
        assert!(out.objective.net <= out.objective.gross);
        assert!(validate_solution(&inst, &reach, &out.solution, ObjectiveKind::Net).is_empty());
    }
}

#[test]
fn heuristic_net_within_guarantee() {
    for seed in 0..100 {
        let inst = with_bounded_costs(&small_instance(&family(), seed), 1);
        let reach = build_reachability(&inst);
        let (sol, obj) = run_algorithm_a_costs(&inst, &reach, false).unwrap();
        let best = solve_exact_costs(&inst, &reach, &mut Unlimited).objective.net;
        assert!(2 * inst.types.len() as i64 * obj.net >= best, "seed {seed}");
        assert!(validate_solution(&inst, &reach, &sol, ObjectiveKind::Net).is_empty());
    }
}
