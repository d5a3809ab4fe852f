mod support;

use rand::Rng;
use stlmpc_core::milp::{solve, SolveStatus, SolverConfig, VarKind};
use support::{brute_force_milp, random_milp, rng};

#[test]
fn matches_enumeration_on_small_milps() {
    let mut r = rng(21);
    let cfg = SolverConfig::default();
    let mut feasible = 0;
    for case in 0..80 {
        let bins = r.random_range(1..=8);
        let conts = r.random_range(0..=2);
        let rows = r.random_range(1..=5);
        let model = random_milp(&mut r, bins, conts, rows);
        let res = solve(&model, &cfg).unwrap();
        match brute_force_milp(&model) {
            Some(best) => {
                feasible += 1;
                assert_eq!(res.status, SolveStatus::Optimal, "case {case}");
                assert!((res.objective - best).abs() <= 1e-6, "case {case}: {} vs {best}", res.objective);
                assert!(res.root_bound <= res.objective + 1e-9);
                assert!(model.max_violation(&res.values) <= cfg.feasibility_tolerance);
                for (v, x) in model.vars.iter().zip(&res.values) {
                    if v.kind == VarKind::Binary {
                        assert!(*x == 0.0 || *x == 1.0);
                    }
                }
            }
            None => assert_eq!(res.status, SolveStatus::Infeasible, "case {case}"),
        }
    }
    assert!(feasible > 20);
}

#[test]
fn repeated_solves_are_identical() {
    let mut r = rng(22);
    for _ in 0..20 {
        let model = random_milp(&mut r, 8, 2, 5);
        let a = solve(&model, &SolverConfig::default()).unwrap();
        let b = solve(&model, &SolverConfig::default()).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }
}

#[test]
fn node_limit_is_reported() {
    let mut r = rng(23);
    let model = random_milp(&mut r, 12, 0, 4);
    let cfg = SolverConfig { node_limit: Some(1), ..Default::default() };
    let res = solve(&model, &cfg).unwrap();
    assert!(matches!(res.status, SolveStatus::NodeLimit | SolveStatus::Optimal | SolveStatus::Infeasible));
}
