//! Brute-force reference solvers for tiny models, used to cross-check the
//! simplex and branch-and-bound engines.
//!
//! The LP reference enumerates vertices of the bounded polyhedron: each
//! vertex has a set of tight rows, as many free variables solving the square
//! system, and every other variable at a bound. Cost grows combinatorially;
//! keep models to about ten variables and a handful of rows.

use crate::model::{MilpModel, ObjSense, RowSense};

const TOL: f64 = 1e-9;

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..k {
            let f = a[i][c] / a[c][c];
            for j in c..k {
                a[i][j] -= f * a[c][j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| a[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn feasible(rows: &[(Vec<f64>, RowSense, f64)], lower: &[f64], upper: &[f64], x: &[f64]) -> bool {
    let bounded = (0..x.len()).all(|j| x[j] >= lower[j] - TOL && x[j] <= upper[j] + TOL);
    bounded
        && rows.iter().all(|(a, sense, rhs)| {
            let lhs: f64 = a.iter().zip(x).map(|(c, v)| c * v).sum();
            match sense {
                RowSense::Le => lhs <= rhs + TOL,
                RowSense::Ge => lhs >= rhs - TOL,
                RowSense::Eq => (lhs - rhs).abs() <= TOL,
            }
        })
}

/// Optimal objective of the LP relaxation by vertex enumeration, or `None`
/// when infeasible. Every bound must be finite.
pub fn vertex_enumeration(model: &MilpModel) -> Option<f64> {
    let n = model.num_vars();
    let lower: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
    assert!(
        lower.iter().chain(&upper).all(|b| b.is_finite()),
        "vertex enumeration needs finite bounds"
    );
    let rows: Vec<(Vec<f64>, RowSense, f64)> = model
        .constraints()
        .iter()
        .map(|c| {
            let mut a = vec![0.0; n];
            for &(v, coef) in &c.terms {
                a[v.0] += coef;
            }
            (a, c.sense, c.rhs)
        })
        .collect();
    let obj = model.objective();
    let sign = if obj.sense == ObjSense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; n];
    for &(v, coef) in &obj.terms {
        cost[v.0] += sign * coef;
    }

    let m = rows.len();
    let mut best: Option<f64> = None;
    for k in 0..=m.min(n) {
        for active in subsets(m, k) {
            for free in subsets(n, k) {
                let fixed: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
                for mask in 0u64..(1 << fixed.len()) {
                    let mut x = vec![0.0; n];
                    for (b, &j) in fixed.iter().enumerate() {
                        x[j] = if mask >> b & 1 == 1 { upper[j] } else { lower[j] };
                    }
                    let a = active.iter().map(|&i| free.iter().map(|&j| rows[i].0[j]).collect()).collect();
                    let rhs = active
                        .iter()
                        .map(|&i| rows[i].2 - fixed.iter().map(|&j| rows[i].0[j] * x[j]).sum::<f64>())
                        .collect();
                    let Some(sol) = solve_square(a, rhs) else { continue };
                    for (t, &j) in free.iter().enumerate() {
                        x[j] = sol[t];
                    }
                    if feasible(&rows, &lower, &upper, &x) {
                        let value: f64 = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                        best = Some(best.map_or(value, |b: f64| b.min(value)));
                    }
                }
            }
        }
    }
    best.map(|b| sign * b + obj.constant)
}

/// Optimal MILP objective by fixing every binary assignment and solving the
/// rest with [`vertex_enumeration`].
pub fn binary_enumeration(model: &MilpModel) -> Option<f64> {
    let binaries: Vec<_> = model.binaries().collect();
    let maximize = model.objective().sense == ObjSense::Maximize;
    let mut best: Option<f64> = None;
    for mask in 0u64..(1 << binaries.len()) {
        let mut fixed = model.clone();
        for (k, &b) in binaries.iter().enumerate() {
            let v = (mask >> k & 1) as f64;
            fixed.set_bounds(b, v, v);
        }
        if let Some(value) = vertex_enumeration(&fixed) {
            best = Some(match best {
                None => value,
                Some(b) if maximize => b.max(value),
                Some(b) => b.min(value),
            });
        }
    }
    best
}
