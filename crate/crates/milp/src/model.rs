//! Solver-agnostic mixed-integer linear program representation.

use std::fmt;

use crate::error::ModelError;

/// Index of a variable inside a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    /// Semantic tag such as `P[G1,3]`.
    pub tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    pub fn symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

/// A sparse linear row `Σ coef·x  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub tag: String,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            RowSense::Le => (lhs - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - lhs).max(0.0),
            RowSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjSense,
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl Default for Objective {
    fn default() -> Self {
        Objective {
            sense: ObjSense::Minimize,
            terms: Vec::new(),
            constant: 0.0,
        }
    }
}

impl Objective {
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<f64>()
    }
}

/// Merge duplicate variables, drop zero coefficients and order by id.
pub fn canonical_terms(terms: impl IntoIterator<Item = (VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut terms: Vec<(VarId, f64)> = terms.into_iter().collect();
    terms.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += c,
            _ => merged.push((v, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    merged
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Objective,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        kind: VarKind,
        lower: f64,
        upper: f64,
        tag: impl Into<String>,
    ) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            kind,
            lower,
            upper,
            tag: tag.into(),
        });
        id
    }

    pub fn add_continuous(&mut self, lower: f64, upper: f64, tag: impl Into<String>) -> VarId {
        self.add_variable(VarKind::Continuous, lower, upper, tag)
    }

    pub fn add_binary(&mut self, tag: impl Into<String>) -> VarId {
        self.add_variable(VarKind::Binary, 0.0, 1.0, tag)
    }

    /// Appends a row. Terms are canonicalized; returns the row index.
    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: RowSense,
        rhs: f64,
        tag: impl Into<String>,
    ) -> usize {
        self.constraints.push(Constraint {
            terms: canonical_terms(terms),
            sense,
            rhs,
            tag: tag.into(),
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(
        &mut self,
        sense: ObjSense,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        constant: f64,
    ) {
        self.objective = Objective {
            sense,
            terms: canonical_terms(terms),
            constant,
        };
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        let v = &mut self.variables[var.0];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries().count()
    }

    /// Copy of the model with every binary turned into a continuous `[lo, hi] ∩ [0, 1]` variable.
    pub fn relaxed(&self) -> MilpModel {
        let mut out = self.clone();
        for v in &mut out.variables {
            if v.kind == VarKind::Binary {
                v.kind = VarKind::Continuous;
                v.lower = v.lower.max(0.0);
                v.upper = v.upper.min(1.0);
            }
        }
        out
    }

    /// Checks the structural invariants: finite data, binaries within `[0,1]`,
    /// ordered bounds and row references to existing variables.
    pub fn validate(&self) -> Result<(), ModelError> {
        for v in &self.variables {
            let unusable = v.lower.is_nan()
                || v.upper.is_nan()
                || v.lower == f64::INFINITY
                || v.upper == f64::NEG_INFINITY;
            if unusable || v.lower > v.upper {
                return Err(ModelError::InvalidBounds {
                    tag: v.tag.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelError::BinaryBounds { tag: v.tag.clone() });
            }
        }
        for row in &self.constraints {
            if !row.rhs.is_finite() {
                return Err(ModelError::NonFinite { tag: row.tag.clone() });
            }
            for &(var, coef) in &row.terms {
                if var.0 >= self.variables.len() {
                    return Err(ModelError::UnknownVariable {
                        tag: row.tag.clone(),
                        var: var.0,
                    });
                }
                if !coef.is_finite() {
                    return Err(ModelError::NonFinite { tag: row.tag.clone() });
                }
            }
        }
        if !self.objective.constant.is_finite() {
            return Err(ModelError::NonFinite {
                tag: "objective".into(),
            });
        }
        for &(var, coef) in &self.objective.terms {
            if var.0 >= self.variables.len() {
                return Err(ModelError::UnknownVariable {
                    tag: "objective".into(),
                    var: var.0,
                });
            }
            if !coef.is_finite() {
                return Err(ModelError::NonFinite {
                    tag: "objective".into(),
                });
            }
        }
        Ok(())
    }

    /// Largest bound or row violation of `values` (absolute units).
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(values));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    /// Largest distance of a binary variable from `{0, 1}`.
    pub fn max_integrality_violation(&self, values: &[f64]) -> f64 {
        self.binaries()
            .map(|v| {
                let x = values[v.0];
                (x - x.round()).abs()
            })
            .fold(0.0, f64::max)
    }
}
