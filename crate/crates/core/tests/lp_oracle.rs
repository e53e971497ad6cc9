mod common;

use common::{random_bounded_lp, vertex_enumeration, VertexResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strict_install::lp::{solve, LinearProgram, LpStatus, Relation};

#[test]
fn agrees_with_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut optimal, mut infeasible) = (0, 0);
    for k in 0..500 {
        let lp = random_bounded_lp(&mut rng);
        let sol = solve(&lp).unwrap();
        match vertex_enumeration(&lp) {
            VertexResult::Infeasible => {
                assert_eq!(sol.status, LpStatus::Infeasible, "lp {k}");
                infeasible += 1;
            }
            VertexResult::Optimal(v) => {
                assert_eq!(sol.status, LpStatus::Optimal, "lp {k}");
                let got = sol.objective_value.unwrap();
                assert!((got - v).abs() <= 1e-6, "lp {k}: {got} vs {v}");
                assert!(lp.max_violation(sol.point.as_ref().unwrap()) <= 1e-7);
                optimal += 1;
            }
        }
    }
    assert!(optimal > 100 && infeasible > 20, "{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn objective_never_beaten_by_sampled_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let lp = random_bounded_lp(&mut rng);
        let sol = solve(&lp).unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let opt = sol.objective_value.unwrap();
        let n = lp.num_vars();
        for _ in 0..2000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..3.5)).collect();
            if lp.is_feasible_point(&x, 0.0) {
                assert!(lp.objective_value(&x) >= opt - 1e-9);
            }
        }
    }
}

#[test]
fn trivial_status_fixtures() {
    let mut lp = LinearProgram::new(2);
    lp.set_objective(vec![-1.0, -1.0]);
    lp.add_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
    let sol = solve(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective_value.unwrap() + 1.0).abs() < 1e-12);

    let mut lp = LinearProgram::new(1);
    lp.add_constraint(vec![1.0], Relation::Le, -1.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

    let mut lp = LinearProgram::new(1);
    lp.set_objective(vec![-1.0]);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn deterministic_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let lp = random_bounded_lp(&mut rng);
        assert_eq!(solve(&lp).unwrap(), solve(&lp).unwrap());
    }
}
