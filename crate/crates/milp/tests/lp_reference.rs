//! Cross-check of the dual simplex against brute-force vertex enumeration on
//! small dense problems.

use microramp_milp::reference::vertex_enumeration;
use microramp_milp::{solve_lp, LpOptions, LpStatus, MilpModel, ObjSense, RowSense, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Dense {
    n: usize,
    rows: Vec<(Vec<f64>, RowSense, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
}

fn random_problem(rng: &mut ChaCha8Rng) -> Dense {
    let n = rng.gen_range(1..=10);
    let m = rng.gen_range(1..=4);
    let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=0) as f64).collect();
    let upper: Vec<f64> = (0..n).map(|j| lower[j] + rng.gen_range(1..=6) as f64).collect();
    let anchor: Vec<f64> = (0..n).map(|j| rng.gen_range(lower[j]..=upper[j])).collect();
    let force_feasible = rng.gen_bool(0.7);
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n)
                .map(|_| if rng.gen_bool(0.7) { rng.gen_range(-5..=5) as f64 } else { 0.0 })
                .collect();
            let sense = match rng.gen_range(0..5) {
                0 => RowSense::Eq,
                1 | 2 => RowSense::Le,
                _ => RowSense::Ge,
            };
            let at_anchor: f64 = a.iter().zip(&anchor).map(|(c, v)| c * v).sum();
            let rhs = if force_feasible {
                match sense {
                    RowSense::Eq => at_anchor,
                    RowSense::Le => (at_anchor + rng.gen_range(0.0..3.0)).round(),
                    RowSense::Ge => (at_anchor - rng.gen_range(0.0..3.0)).round(),
                }
            } else {
                rng.gen_range(-8..=8) as f64
            };
            // Rounding may cut the anchor off; that is fine, the oracle decides.
            (a, sense, rhs)
        })
        .collect();
    let cost = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();
    Dense {
        n,
        rows,
        lower,
        upper,
        cost,
    }
}

fn to_model(p: &Dense) -> MilpModel {
    let mut model = MilpModel::new();
    let vars: Vec<VarId> = (0..p.n)
        .map(|j| model.add_continuous(p.lower[j], p.upper[j], format!("x{j}")))
        .collect();
    for (i, (a, sense, rhs)) in p.rows.iter().enumerate() {
        model.add_constraint(
            a.iter().enumerate().map(|(j, &c)| (vars[j], c)),
            *sense,
            *rhs,
            format!("r{i}"),
        );
    }
    model.set_objective(
        ObjSense::Minimize,
        p.cost.iter().enumerate().map(|(j, &c)| (vars[j], c)),
        0.0,
    );
    model
}

#[test]
fn dual_simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..300 {
        let p = random_problem(&mut rng);
        let model = to_model(&p);
        let got = solve_lp(&model, &LpOptions::default()).unwrap();
        match vertex_enumeration(&model) {
            Some(expected) => {
                assert_eq!(got.status, LpStatus::Optimal, "case {case}");
                let tol = 1e-9 * expected.abs().max(1.0);
                assert!(
                    (got.objective - expected).abs() <= tol,
                    "case {case}: simplex {} vs enumeration {}",
                    got.objective,
                    expected
                );
                assert!(model.max_violation(&got.values) <= 1e-7, "case {case}");
                optimal += 1;
            }
            None => {
                assert_eq!(got.status, LpStatus::Infeasible, "case {case}");
                infeasible += 1;
            }
        }
    }
    assert!(optimal > 100 && infeasible > 10, "{optimal} optimal, {infeasible} infeasible");
}
