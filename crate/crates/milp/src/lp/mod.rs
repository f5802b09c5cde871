//! Linear programming relaxations.

mod dual;
mod factor;

use std::sync::Arc;

pub(crate) use dual::{DualSimplex, EngineStatus, LpData, Tolerances};

use crate::error::SolverError;
use crate::model::{MilpModel, ObjSense, RowSense, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration limit or numerical breakdown; values are not trustworthy.
    SolverFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per model variable (empty unless optimal).
    pub values: Vec<f64>,
    /// Objective in the model's own sense, constant included.
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub feasibility_tolerance: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tolerance: 1e-7,
        }
    }
}

/// Internal engine input prepared from a model: costs are always minimized.
pub(crate) struct Prepared {
    pub data: Arc<LpData>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// +1 for minimization, -1 for maximization.
    pub sign: f64,
    pub constant: f64,
    /// Set when bound tightening alone proves the model infeasible.
    pub infeasible: bool,
}

/// Builds the engine input. Rows with a single term become variable bounds
/// and empty rows are checked and dropped; with `integral`, binaries keep
/// integer bounds inside `[0, 1]`.
pub(crate) fn prepare(model: &MilpModel, integral: bool) -> Prepared {
    const TOL: f64 = 1e-9;
    let n = model.num_vars();
    let mut var_lower: Vec<f64> = Vec::with_capacity(n);
    let mut var_upper: Vec<f64> = Vec::with_capacity(n);
    for v in model.variables() {
        if v.kind == VarKind::Binary {
            var_lower.push(v.lower.max(0.0));
            var_upper.push(v.upper.min(1.0));
        } else {
            var_lower.push(v.lower);
            var_upper.push(v.upper);
        }
    }
    let mut infeasible = false;
    let mut kept = Vec::new();
    for row in model.constraints() {
        match row.terms.as_slice() {
            [] => {
                let ok = match row.sense {
                    RowSense::Le => row.rhs >= -TOL,
                    RowSense::Ge => row.rhs <= TOL,
                    RowSense::Eq => row.rhs.abs() <= TOL,
                };
                infeasible |= !ok;
            }
            [(v, a)] if *a != 0.0 => {
                let x = row.rhs / a;
                let (upper_side, lower_side) = match row.sense {
                    RowSense::Eq => (true, true),
                    RowSense::Le => (*a > 0.0, *a < 0.0),
                    RowSense::Ge => (*a < 0.0, *a > 0.0),
                };
                if upper_side {
                    var_upper[v.0] = var_upper[v.0].min(x);
                }
                if lower_side {
                    var_lower[v.0] = var_lower[v.0].max(x);
                }
            }
            _ => kept.push(row),
        }
    }
    for (j, v) in model.variables().iter().enumerate() {
        if integral && v.kind == VarKind::Binary {
            var_lower[j] = (var_lower[j] - TOL).ceil().max(0.0);
            var_upper[j] = (var_upper[j] + TOL).floor().min(1.0);
        }
        if var_lower[j] > var_upper[j] {
            if var_lower[j] - var_upper[j] <= TOL {
                var_upper[j] = var_lower[j];
            } else {
                infeasible = true;
                var_upper[j] = var_lower[j];
            }
        }
    }

    let m = kept.len();
    let mut counts = vec![0usize; n + 1];
    for row in &kept {
        for &(v, _) in &row.terms {
            counts[v.0 + 1] += 1;
        }
    }
    for j in 0..n {
        counts[j + 1] += counts[j];
    }
    let col_start = counts.clone();
    let nnz = col_start[n];
    let mut col_row = vec![0usize; nnz];
    let mut col_val = vec![0.0; nnz];
    let mut fill = counts;
    for (i, row) in kept.iter().enumerate() {
        for &(v, c) in &row.terms {
            let p = fill[v.0];
            col_row[p] = i;
            col_val[p] = c;
            fill[v.0] += 1;
        }
    }
    let sign = match model.objective().sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; n];
    for &(v, c) in &model.objective().terms {
        cost[v.0] += sign * c;
    }
    let mut lower = var_lower;
    let mut upper = var_upper;
    lower.reserve(m);
    upper.reserve(m);
    // Logical s_i = -a_i·x.
    for row in &kept {
        let (lo, hi) = match row.sense {
            RowSense::Le => (-row.rhs, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, -row.rhs),
            RowSense::Eq => (-row.rhs, -row.rhs),
        };
        lower.push(lo);
        upper.push(hi);
    }
    Prepared {
        data: Arc::new(LpData {
            n,
            m,
            col_start,
            col_row,
            col_val,
            cost,
        }),
        lower,
        upper,
        sign,
        constant: model.objective().constant,
        infeasible,
    }
}

/// Solves the LP relaxation of `model` (binaries relaxed to their bounds within `[0, 1]`).
pub fn solve_lp(model: &MilpModel, options: &LpOptions) -> Result<LpSolution, SolverError> {
    model.validate()?;
    if !(options.feasibility_tolerance > 0.0) {
        return Err(SolverError::Options("feasibility tolerance must be positive".into()));
    }
    let prepared = prepare(model, false);
    let tol = Tolerances {
        primal: options.feasibility_tolerance,
        ..Tolerances::default()
    };
    if prepared.infeasible {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::NAN,
            iterations: 0,
        });
    }
    let mut engine = DualSimplex::new(prepared.data, prepared.lower, prepared.upper, tol);
    let status = engine.solve();
    let iterations = engine.iterations;
    let failed = |status| LpSolution {
        status,
        values: Vec::new(),
        objective: f64::NAN,
        iterations,
    };
    Ok(match status {
        EngineStatus::Optimal => {
            let values = engine.values().to_vec();
            let objective = model.objective().evaluate(&values);
            // Guard against a drifted basis being reported as optimal.
            if model.relaxed().max_violation(&values) > 10.0 * options.feasibility_tolerance.max(1e-6) {
                failed(LpStatus::SolverFailure)
            } else {
                LpSolution {
                    status: LpStatus::Optimal,
                    values,
                    objective,
                    iterations,
                }
            }
        }
        EngineStatus::Infeasible => failed(LpStatus::Infeasible),
        EngineStatus::Unbounded => failed(LpStatus::Unbounded),
        EngineStatus::IterationLimit | EngineStatus::Singular => failed(LpStatus::SolverFailure),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjSense, RowSense};

    fn lp(f: impl FnOnce(&mut MilpModel)) -> LpSolution {
        let mut m = MilpModel::new();
        f(&mut m);
        solve_lp(&m, &LpOptions::default()).unwrap()
    }

    #[test]
    fn single_lower_row() {
        let s = lp(|m| {
            let x = m.add_continuous(0.0, 10.0, "x");
            m.add_constraint([(x, 1.0)], RowSense::Ge, 3.0, "r");
            m.set_objective(ObjSense::Minimize, [(x, 1.0)], 0.0);
        });
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let s = lp(|m| {
            let x = m.add_continuous(f64::NEG_INFINITY, f64::INFINITY, "x");
            m.add_constraint([(x, 1.0)], RowSense::Ge, 5.0, "lo");
            m.add_constraint([(x, 1.0)], RowSense::Le, 3.0, "hi");
            m.set_objective(ObjSense::Minimize, [(x, 1.0)], 0.0);
        });
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_face_objective() {
        let s = lp(|m| {
            let x = m.add_continuous(0.0, 3.0, "x");
            let y = m.add_continuous(0.0, 3.0, "y");
            m.add_constraint([(x, 1.0), (y, 1.0)], RowSense::Le, 4.0, "cap");
            m.set_objective(ObjSense::Minimize, [(x, -1.0), (y, -1.0)], 0.0);
        });
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 4.0).abs() < 1e-9);
    }

    #[test]
    fn free_direction_is_unbounded() {
        let s = lp(|m| {
            let x = m.add_continuous(0.0, f64::INFINITY, "x");
            let y = m.add_continuous(f64::NEG_INFINITY, f64::INFINITY, "y");
            m.add_constraint([(x, 1.0), (y, -1.0)], RowSense::Eq, 1.0, "link");
            m.set_objective(ObjSense::Maximize, [(x, 1.0), (y, 1.0)], 0.0);
        });
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn maximization_with_constant() {
        let s = lp(|m| {
            let x = m.add_continuous(0.0, 2.0, "x");
            m.set_objective(ObjSense::Maximize, [(x, 3.0)], -1.0);
        });
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 5.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_variable_with_finite_optimum() {
        let s = lp(|m| {
            let x = m.add_continuous(f64::NEG_INFINITY, f64::INFINITY, "x");
            let y = m.add_continuous(0.0, f64::INFINITY, "y");
            m.add_constraint([(x, 1.0), (y, 1.0)], RowSense::Ge, 2.0, "a");
            m.add_constraint([(x, 1.0), (y, -1.0)], RowSense::Le, 1.0, "b");
            m.set_objective(ObjSense::Minimize, [(x, 1.0), (y, 2.0)], 0.0);
        });
        // x + y >= 2, x - y <= 1 → optimum at x = 1.5, y = 0.5.
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.5).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn singleton_rows_become_bounds() {
        let mut m = MilpModel::new();
        let x = m.add_continuous(0.0, 10.0, "x");
        let b = m.add_binary("b");
        m.add_constraint([(x, -2.0)], RowSense::Le, -3.0, "x_lo");
        m.add_constraint([(b, 4.0)], RowSense::Ge, 1.0, "b_on");
        let p = prepare(&m, true);
        assert_eq!(p.data.m, 0);
        assert_eq!((p.lower[0], p.upper[0]), (1.5, 10.0));
        assert_eq!((p.lower[1], p.upper[1]), (1.0, 1.0));
        let relaxed = prepare(&m, false);
        assert_eq!(relaxed.lower[1], 0.25);
    }

    #[test]
    fn violated_empty_row_is_infeasible() {
        let s = lp(|m| {
            let x = m.add_continuous(0.0, 1.0, "x");
            m.add_constraint([(x, 0.0)], RowSense::Ge, 1.0, "never");
            m.set_objective(ObjSense::Minimize, [(x, 1.0)], 0.0);
        });
        assert_eq!(s.status, LpStatus::Infeasible);
    }
}
