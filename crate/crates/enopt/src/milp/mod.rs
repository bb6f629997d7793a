//! Self-contained LP and MILP solving.
//!
//! The LP path is a two-phase primal simplex on a dense tableau with row
//! equilibration, Dantzig pricing, and a Bland's-rule fallback that kicks in
//! on degenerate stalls so the solve always terminates. The MILP path is
//! branch and bound over the LP relaxation with best-bound node selection
//! and most-fractional branching. Problems and solutions are immutable
//! values; a solve touches nothing outside its own stack, so independent
//! solves can run concurrently.

mod branch;
mod simplex;

use crate::{Error, Result};

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

/// Integrality requirement of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarKind {
    #[default]
    Continuous,
    Binary,
    Integer,
}

/// Handle to a variable of the problem it was created on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program: bounded variables, linear constraints, linear objective.
#[derive(Debug, Clone)]
pub struct LpProblem {
    sense: Sense,
    variables: Vec<Variable>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Adds a variable with bounds `[lower, upper]` (either may be infinite)
    /// and its objective coefficient.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        obj_coeff: f64,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.push(obj_coeff);
        VarId(self.variables.len() - 1)
    }

    pub fn set_obj_coeff(&mut self, var: VarId, coeff: f64) {
        self.objective[var.0] = coeff;
    }

    pub fn add_constraint(&mut self, terms: Vec<(VarId, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            terms: terms.into_iter().map(|(v, c)| (v.0, c)).collect(),
            relation,
            rhs,
        });
    }

    pub fn add_le(&mut self, terms: Vec<(VarId, f64)>, rhs: f64) {
        self.add_constraint(terms, Relation::Le, rhs);
    }

    pub fn add_ge(&mut self, terms: Vec<(VarId, f64)>, rhs: f64) {
        self.add_constraint(terms, Relation::Ge, rhs);
    }

    pub fn add_eq(&mut self, terms: Vec<(VarId, f64)>, rhs: f64) {
        self.add_constraint(terms, Relation::Eq, rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_name(&self, var: VarId) -> &str {
        &self.variables[var.0].name
    }

    pub fn bounds(&self, var: VarId) -> (f64, f64) {
        (self.variables[var.0].lower, self.variables[var.0].upper)
    }

    /// Checks that the problem is well formed: declared variables only,
    /// uncrossed bounds, finite coefficients.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        for (j, v) in self.variables.iter().enumerate() {
            if v.lower > v.upper {
                return Err(Error::InvalidProblem(format!(
                    "variable '{}' has crossed bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower.is_nan() || v.upper.is_nan() {
                return Err(Error::InvalidProblem(format!(
                    "variable '{}' has NaN bounds",
                    v.name
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "objective coefficient of '{}' is not finite",
                    v.name
                )));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for &(var, coeff) in &c.terms {
                if var >= n {
                    return Err(Error::InvalidProblem(format!(
                        "constraint {i} references undeclared variable index {var}"
                    )));
                }
                if !coeff.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "constraint {i} has non-finite coefficient on '{}'",
                        self.variables[var].name
                    )));
                }
            }
            if !c.rhs.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "constraint {i} has non-finite right-hand side"
                )));
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation of `values`. Useful as an
    /// independent residual check on solver output.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for (j, v) in self.variables.iter().enumerate() {
            worst = worst.max(v.lower - values[j]).max(values[j] - v.upper);
        }
        worst
    }

    /// Objective value of `values` under this problem's coefficients.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .map(|(c, x)| c * x)
            .sum()
    }

    /// Plain-text dump of the problem, one line per constraint, for
    /// debugging. Format:
    ///
    /// ```text
    /// minimize 2 a + 3 b
    /// subject to
    ///   c0: 1 a + 1 b >= 1
    /// bounds
    ///   0 <= a <= 1
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        out.push_str(sense);
        out.push(' ');
        out.push_str(&self.linear_text(
            &self
                .objective
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, c)| (j, *c))
                .collect::<Vec<_>>(),
        ));
        out.push_str("\nsubject to\n");
        for (i, c) in self.constraints.iter().enumerate() {
            out.push_str(&format!(
                "  c{}: {} {} {}\n",
                i,
                self.linear_text(&c.terms),
                c.relation,
                c.rhs
            ));
        }
        out.push_str("bounds\n");
        for v in &self.variables {
            out.push_str(&format!("  {} <= {} <= {}\n", v.lower, v.name, v.upper));
        }
        out
    }

    fn linear_text(&self, terms: &[(usize, f64)]) -> String {
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, &(var, coeff)) in terms.iter().enumerate() {
            if k > 0 {
                s.push_str(if coeff < 0.0 { " - " } else { " + " });
                s.push_str(&format!("{} {}", coeff.abs(), self.variables[var].name));
            } else {
                s.push_str(&format!("{} {}", coeff, self.variables[var].name));
            }
        }
        s
    }

    pub(crate) fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub(crate) fn objective(&self) -> &[f64] {
        &self.objective
    }
}

/// A linear program plus per-variable integrality flags.
#[derive(Debug, Clone)]
pub struct MilpProblem {
    base: LpProblem,
    kinds: Vec<VarKind>,
}

impl MilpProblem {
    /// Wraps an LP with every variable continuous.
    pub fn from_lp(base: LpProblem) -> Self {
        let kinds = vec![VarKind::Continuous; base.num_vars()];
        Self { base, kinds }
    }

    pub fn set_kind(&mut self, var: VarId, kind: VarKind) {
        self.kinds[var.0] = kind;
    }

    pub fn kind(&self, var: VarId) -> VarKind {
        self.kinds[var.0]
    }

    pub fn base(&self) -> &LpProblem {
        &self.base
    }

    pub fn base_mut(&mut self) -> &mut LpProblem {
        &mut self.base
    }

    pub fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for (j, kind) in self.kinds.iter().enumerate() {
            if *kind == VarKind::Binary {
                let v = &self.base.variables[j];
                if v.lower < 0.0 || v.upper > 1.0 {
                    return Err(Error::InvalidProblem(format!(
                        "binary variable '{}' has bounds [{}, {}] outside [0, 1]",
                        v.name, v.lower, v.upper
                    )));
                }
            }
        }
        Ok(())
    }

    /// Text dump of the base LP followed by the integrality section.
    pub fn to_text(&self) -> String {
        let mut out = self.base.to_text();
        out.push_str("integrality\n");
        for (j, kind) in self.kinds.iter().enumerate() {
            let label = match kind {
                VarKind::Continuous => continue,
                VarKind::Binary => "binary",
                VarKind::Integer => "integer",
            };
            out.push_str(&format!("  {} {}\n", self.base.variables[j].name, label));
        }
        out
    }

    pub(crate) fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node or time budget exhausted; the best incumbent is reported with its gap.
    GapLimit,
    /// Budget exhausted with nothing usable to report.
    IterationLimit,
}

/// Result of an LP or MILP solve. `values` and `objective` are meaningful
/// for `Optimal` and `GapLimit`; otherwise `values` is empty and
/// `objective` is NaN.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Relative MIP gap; 0 for proven optima (always 0 for pure LPs).
    pub gap: f64,
}

impl Solution {
    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub(crate) fn not_solved(status: Status) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            gap: f64::INFINITY,
        }
    }
}

/// Solver tolerances and budgets.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub rel_gap: f64,
    pub max_nodes: usize,
    pub time_limit: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            rel_gap: 1e-6,
            max_nodes: 1_000_000,
            time_limit: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.feasibility_tol <= 0.0 || self.integrality_tol <= 0.0 || self.rel_gap <= 0.0 {
            return Err(Error::InvalidInput(
                "solver tolerances must be positive".into(),
            ));
        }
        if let Some(t) = self.time_limit {
            if t <= 0.0 {
                return Err(Error::InvalidInput("time limit must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Solves a linear program. Infeasibility and unboundedness are reported
/// through [`Solution::status`]; malformed problems error before solving.
pub fn solve_lp(problem: &LpProblem, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    problem.validate()?;
    let bounds: Vec<(f64, f64)> = problem
        .variables
        .iter()
        .map(|v| (v.lower, v.upper))
        .collect();
    let out = simplex::solve_bounded(problem, &bounds, opts, None)?;
    Ok(Solution {
        status: out.status,
        values: out.values,
        objective: out.objective,
        gap: if out.status == Status::Optimal {
            0.0
        } else {
            f64::INFINITY
        },
    })
}

/// Solves a mixed-integer linear program by branch and bound over the LP
/// relaxation.
pub fn solve_milp(problem: &MilpProblem, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    problem.validate()?;
    branch::solve(problem, opts)
}
