//! Generic sparse LP model and the one solver facade used everywhere in the
//! crate.
//!
//! Models beyond the solve budget (full-size bound LPs) are meant to be
//! exported via [`crate::lp::export::write_lp`] and solved externally; only
//! the resulting dual certificates come back in, through the verifier.

use std::collections::HashMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::{Error, Result};

/// Nonzero budget for internal solves. Export has no budget.
pub const SOLVE_NONZERO_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub objective: f64,
    /// `false` means the variable is free.
    pub nonneg: bool,
}

#[derive(Debug, Clone)]
pub struct ConstraintRow {
    pub name: String,
    /// Sparse row, coalesced and sorted by variable index.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Sparse LP: named variables with objective coefficients and nonnegativity
/// flags, plus named constraint rows.
#[derive(Debug, Clone)]
pub struct LpModel {
    pub name: String,
    pub sense: Sense,
    vars: Vec<VarDef>,
    index: HashMap<String, usize>,
    constraints: Vec<ConstraintRow>,
}

impl LpModel {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        LpModel {
            name: name.into(),
            sense,
            vars: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, objective: f64, nonneg: bool) -> usize {
        let name = name.into();
        let id = self.vars.len();
        assert!(
            self.index.insert(name.clone(), id).is_none(),
            "duplicate variable name {name}"
        );
        self.vars.push(VarDef {
            name,
            objective,
            nonneg,
        });
        id
    }

    /// Adds a row; terms referencing undeclared variables are rejected.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(usize, f64)],
        relation: Relation,
        rhs: f64,
    ) -> Result<()> {
        let mut coalesced: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        let mut sorted = terms.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        for (v, c) in sorted {
            if v >= self.vars.len() {
                return Err(Error::invalid(format!(
                    "constraint references undeclared variable index {v}"
                )));
            }
            if c == 0.0 {
                continue;
            }
            match coalesced.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => coalesced.push((v, c)),
            }
        }
        self.constraints.push(ConstraintRow {
            name: name.into(),
            terms: coalesced,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn constraints(&self) -> &[ConstraintRow] {
        &self.constraints
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Nonzeros in the constraint matrix.
    pub fn nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.terms.len()).sum()
    }

    /// Solves the model. Infeasible and unbounded outcomes are reported as
    /// errors, never as silently wrong numbers; models over the nonzero
    /// budget are rejected up front.
    pub fn solve(&self) -> Result<LpSolution> {
        let nnz = self.nonzeros();
        if nnz > SOLVE_NONZERO_BUDGET {
            return Err(Error::BudgetExceeded {
                op: "solve_lp",
                detail: format!("{nnz} nonzeros exceed solve budget {SOLVE_NONZERO_BUDGET}"),
            });
        }
        let direction = match self.sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        let mut problem = Problem::new(direction);
        let handles: Vec<_> = self
            .vars
            .iter()
            .map(|v| {
                let lo = if v.nonneg { 0.0 } else { f64::NEG_INFINITY };
                problem.add_var(v.objective, (lo, f64::INFINITY))
            })
            .collect();
        for row in &self.constraints {
            let terms: Vec<_> = row.terms.iter().map(|&(v, c)| (handles[v], c)).collect();
            let op = match row.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Ge => ComparisonOp::Ge,
                Relation::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(&terms, op, row.rhs);
        }
        match problem.solve() {
            Ok(sol) => {
                let values = handles.iter().map(|&h| sol[h]).collect();
                Ok(LpSolution {
                    value: sol.objective(),
                    values,
                })
            }
            Err(microlp::Error::Infeasible) => Err(Error::LpInfeasible),
            Err(microlp::Error::Unbounded) => Err(Error::LpUnbounded),
            Err(e) => Err(Error::LpNumerical(e.to_string())),
        }
    }
}

/// Optimal value and primal variable values, indexed like the model's
/// variables.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub values: Vec<f64>,
}

impl LpSolution {
    pub fn value_of(&self, model: &LpModel, name: &str) -> Option<f64> {
        model.var_index(name).map(|i| self.values[i])
    }
}
