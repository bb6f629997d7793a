//! Two-phase primal simplex on a dense tableau.
//!
//! The user-facing problem (general bounds, free variables, `<=`/`=`/`>=`
//! rows) is rewritten into standard form first: lower bounds are shifted to
//! zero, upper-bounded-only variables are mirrored, free variables are split
//! into a positive and a negative part, and finite upper bounds become
//! explicit rows. Constraint rows are equilibrated to max-abs coefficient 1
//! so tariff-scale and energy-scale terms pivot comparably.

use std::time::Instant;

use super::{LpProblem, Relation, Sense, SolveOptions, Status};
use crate::Result;

const EPS_PIVOT: f64 = 1e-9;
const EPS_RC: f64 = 1e-9;

pub(crate) struct LpOutcome {
    pub status: Status,
    /// Values in original variable space; empty unless optimal.
    pub values: Vec<f64>,
    /// Objective in the problem's own sense; NaN unless optimal.
    pub objective: f64,
}

impl LpOutcome {
    fn not_solved(status: Status) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective: f64::NAN,
        }
    }
}

/// How each original variable maps into standard-form columns.
#[derive(Clone, Copy)]
enum VarMap {
    Fixed(f64),
    /// x = lo + x'
    Shift { col: usize, lo: f64 },
    /// x = ub - x'  (no finite lower bound)
    Mirror { col: usize, ub: f64 },
    /// x = x+ - x-
    Split { pos: usize, neg: usize },
}

/// Solves `problem` with `bounds` overriding the declared variable bounds
/// (used by branch and bound to tighten integer variables). Crossed bounds
/// here mean an infeasible subproblem, not a malformed input.
pub(crate) fn solve_bounded(
    problem: &LpProblem,
    bounds: &[(f64, f64)],
    opts: &SolveOptions,
    deadline: Option<Instant>,
) -> Result<LpOutcome> {
    let n = problem.num_vars();
    for &(lo, hi) in bounds {
        if lo > hi {
            return Ok(LpOutcome::not_solved(Status::Infeasible));
        }
    }

    // Map variables to standard-form columns.
    let mut var_map = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for &(lo, hi) in bounds {
        let m = if lo == hi {
            VarMap::Fixed(lo)
        } else if lo.is_finite() {
            let col = ncols;
            ncols += 1;
            VarMap::Shift { col, lo }
        } else if hi.is_finite() {
            let col = ncols;
            ncols += 1;
            VarMap::Mirror { col, ub: hi }
        } else {
            let pos = ncols;
            ncols += 2;
            VarMap::Split { pos, neg: pos + 1 }
        };
        var_map.push(m);
    }

    // Rewrite constraints over standard columns; drop empty rows after
    // checking they are satisfiable.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    let mut dense = vec![0.0; n];
    for c in problem.constraints() {
        for x in dense.iter_mut() {
            *x = 0.0;
        }
        for &(var, coeff) in &c.terms {
            dense[var] += coeff;
        }
        let mut row = vec![0.0; ncols];
        let mut rhs = c.rhs;
        let mut empty = true;
        for (j, &a) in dense.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Fixed(v) => rhs -= a * v,
                VarMap::Shift { col, lo } => {
                    row[col] += a;
                    rhs -= a * lo;
                    empty = false;
                }
                VarMap::Mirror { col, ub } => {
                    row[col] -= a;
                    rhs -= a * ub;
                    empty = false;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                    empty = false;
                }
            }
        }
        if empty {
            let ok = match c.relation {
                Relation::Le => rhs >= -opts.feasibility_tol,
                Relation::Ge => rhs <= opts.feasibility_tol,
                Relation::Eq => rhs.abs() <= opts.feasibility_tol,
            };
            if !ok {
                return Ok(LpOutcome::not_solved(Status::Infeasible));
            }
            continue;
        }
        rows.push((row, c.relation, rhs));
    }

    // Finite upper bounds of shifted variables become explicit rows.
    for (j, m) in var_map.iter().enumerate() {
        if let VarMap::Shift { col, lo } = *m {
            let hi = bounds[j].1;
            if hi.is_finite() {
                let mut row = vec![0.0; ncols];
                row[col] = 1.0;
                rows.push((row, Relation::Le, hi - lo));
            }
        }
    }

    // Row equilibration.
    for (row, _, rhs) in rows.iter_mut() {
        let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale > 0.0 && scale != 1.0 {
            for a in row.iter_mut() {
                *a /= scale;
            }
            *rhs /= scale;
        }
    }

    // Slack/artificial layout. Slack coefficient starts as +1 for <=, -1 for
    // >=; a row whose rhs is negative is negated wholesale, flipping that
    // sign. Rows left without a +1 slack get an artificial basic column.
    let m = rows.len();
    let n_slack = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let slack_start = ncols;
    let art_start = ncols + n_slack;

    let mut slack_sign = vec![0i8; m];
    for (i, (row, rel, rhs)) in rows.iter_mut().enumerate() {
        let mut sign = match rel {
            Relation::Le => 1i8,
            Relation::Ge => -1i8,
            Relation::Eq => 0i8,
        };
        if *rhs < 0.0 {
            for a in row.iter_mut() {
                *a = -*a;
            }
            *rhs = -*rhs;
            sign = -sign;
        }
        slack_sign[i] = sign;
    }

    let n_art = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| slack_sign[*i] != 1)
        .count();
    let width = art_start + n_art + 1; // +1 rhs column
    let rhs_col = width - 1;

    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut basis = vec![0usize; m];
    {
        let mut slack_idx = 0usize;
        let mut art_idx = 0usize;
        for (i, (row, rel, rhs)) in rows.iter().enumerate() {
            let mut t = vec![0.0; width];
            t[..ncols].copy_from_slice(row);
            if *rel != Relation::Eq {
                t[slack_start + slack_idx] = slack_sign[i] as f64;
                if slack_sign[i] == 1 {
                    basis[i] = slack_start + slack_idx;
                }
                slack_idx += 1;
            }
            if slack_sign[i] != 1 {
                t[art_start + art_idx] = 1.0;
                basis[i] = art_start + art_idx;
                art_idx += 1;
            }
            t[rhs_col] = *rhs;
            tab.push(t);
        }
        tab.push(vec![0.0; width]); // objective row
    }

    let pivot_cap = 50 * (m + width) + 10_000;
    let mut pivots_used = 0usize;

    // Phase 1: minimise the sum of artificials.
    if n_art > 0 {
        for j in art_start..rhs_col {
            tab[m][j] = 1.0;
        }
        for i in 0..m {
            if basis[i] >= art_start {
                let row = tab[i].clone();
                for (a, b) in tab[m].iter_mut().zip(row.iter()) {
                    *a -= b;
                }
            }
        }
        match iterate(
            &mut tab,
            &mut basis,
            rhs_col,
            pivot_cap,
            &mut pivots_used,
            deadline,
        ) {
            IterStatus::Optimal => {}
            IterStatus::Unbounded => {
                // Phase-1 objective is bounded below by zero; reaching here
                // means numerical trouble, treat as iteration limit.
                return Ok(LpOutcome::not_solved(Status::IterationLimit));
            }
            IterStatus::PivotLimit => return Ok(LpOutcome::not_solved(Status::IterationLimit)),
        }
        let rhs_scale = tab
            .iter()
            .take(m)
            .fold(1.0f64, |acc, r| acc.max(r[rhs_col].abs()));
        let infeas = -tab[m][rhs_col];
        if infeas > opts.feasibility_tol * rhs_scale.max(1.0) {
            return Ok(LpOutcome::not_solved(Status::Infeasible));
        }

        // Drive remaining artificials out of the basis; rows that cannot be
        // pivoted are linearly dependent and get dropped.
        for r in 0..m {
            if basis[r] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| tab[r][j].abs() > EPS_PIVOT) {
                    pivot(&mut tab, &mut basis, r, j, rhs_col);
                }
            }
        }
        let mut keep: Vec<usize> = (0..m).filter(|&r| basis[r] < art_start).collect();
        if keep.len() < m {
            let mut new_tab = Vec::with_capacity(keep.len() + 1);
            let mut new_basis = Vec::with_capacity(keep.len());
            for &r in &keep {
                new_tab.push(std::mem::take(&mut tab[r]));
                new_basis.push(basis[r]);
            }
            new_tab.push(std::mem::take(&mut tab[m]));
            tab = new_tab;
            basis = new_basis;
            keep.clear();
        }
    }

    // Phase 2 works on a tableau truncated at the artificial columns.
    let m2 = basis.len();
    for row in tab.iter_mut() {
        let rhs = row[rhs_col];
        row.truncate(art_start);
        row.push(rhs);
    }
    let rhs_col = art_start;

    // Standard-space objective for the minimisation.
    let flip = problem.sense() == Sense::Maximize;
    let obj = problem.objective();
    let objrow = tab.len() - 1;
    for a in tab[objrow].iter_mut() {
        *a = 0.0;
    }
    for (j, vm) in var_map.iter().enumerate() {
        let c = if flip { -obj[j] } else { obj[j] };
        if c == 0.0 {
            continue;
        }
        match *vm {
            VarMap::Fixed(_) => {}
            VarMap::Shift { col, .. } => tab[objrow][col] += c,
            VarMap::Mirror { col, .. } => tab[objrow][col] -= c,
            VarMap::Split { pos, neg } => {
                tab[objrow][pos] += c;
                tab[objrow][neg] -= c;
            }
        }
    }
    for i in 0..m2 {
        let b = basis[i];
        let factor = tab[objrow][b];
        if factor.abs() > 0.0 {
            let row = tab[i].clone();
            for (a, r) in tab[objrow].iter_mut().zip(row.iter()) {
                *a -= factor * r;
            }
        }
    }

    let status = match iterate(
        &mut tab,
        &mut basis,
        rhs_col,
        pivot_cap,
        &mut pivots_used,
        deadline,
    ) {
        IterStatus::Optimal => Status::Optimal,
        IterStatus::Unbounded => return Ok(LpOutcome::not_solved(Status::Unbounded)),
        IterStatus::PivotLimit => return Ok(LpOutcome::not_solved(Status::IterationLimit)),
    };

    // Recover original-space values.
    let mut x_std = vec![0.0; ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < ncols {
            x_std[b] = tab[i][rhs_col];
        }
    }
    let mut values = vec![0.0; n];
    for (j, vm) in var_map.iter().enumerate() {
        values[j] = match *vm {
            VarMap::Fixed(v) => v,
            VarMap::Shift { col, lo } => lo + x_std[col],
            VarMap::Mirror { col, ub } => ub - x_std[col],
            VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
        };
    }
    let objective = problem.objective_value(&values);

    Ok(LpOutcome {
        status,
        values,
        objective,
    })
}

enum IterStatus {
    Optimal,
    Unbounded,
    PivotLimit,
}

/// Runs simplex pivots to optimality of the current objective row.
/// Dantzig pricing by default; a stall longer than `2 * (m + n)` pivots
/// without objective improvement switches to Bland's rule, which cannot
/// cycle.
fn iterate(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    rhs_col: usize,
    pivot_cap: usize,
    pivots_used: &mut usize,
    deadline: Option<Instant>,
) -> IterStatus {
    let m = basis.len();
    let objrow = tab.len() - 1;
    let stall_limit = 2 * (m + rhs_col) + 16;
    let mut stall = 0usize;
    let mut bland = false;
    let mut last_z = tab[objrow][rhs_col];

    loop {
        if *pivots_used >= pivot_cap {
            return IterStatus::PivotLimit;
        }
        if let Some(d) = deadline {
            if *pivots_used % 64 == 0 && Instant::now() > d {
                return IterStatus::PivotLimit;
            }
        }

        // Entering column: reduced cost < 0 (minimisation).
        let mut entering = None;
        if bland {
            for j in 0..rhs_col {
                if tab[objrow][j] < -EPS_RC {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -EPS_RC;
            for j in 0..rhs_col {
                let d = tab[objrow][j];
                if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
        }
        let Some(enter) = entering else {
            return IterStatus::Optimal;
        };

        // Ratio test; ties go to the lowest basis index (anti-cycling).
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tab[i][enter];
            if a > EPS_PIVOT {
                let ratio = tab[i][rhs_col] / a;
                match leave {
                    None => {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                    Some(cur) => {
                        if ratio < best_ratio - 1e-12
                            || ((ratio - best_ratio).abs() <= 1e-12 && basis[i] < basis[cur])
                        {
                            best_ratio = ratio;
                            leave = Some(i);
                        }
                    }
                }
            }
        }
        let Some(leave) = leave else {
            return IterStatus::Unbounded;
        };

        pivot(tab, basis, leave, enter, rhs_col);
        *pivots_used += 1;

        let z = tab[objrow][rhs_col];
        if (z - last_z).abs() > 1e-12 * (1.0 + z.abs()) {
            stall = 0;
            last_z = z;
        } else {
            stall += 1;
            if stall > stall_limit {
                bland = true;
            }
        }
    }
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, rhs_col: usize) {
    let p = tab[row][col];
    let inv = 1.0 / p;
    for a in tab[row].iter_mut() {
        *a *= inv;
    }
    tab[row][col] = 1.0;
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let factor = r[col];
        if factor == 0.0 {
            continue;
        }
        for (a, b) in r.iter_mut().zip(pivot_row.iter()) {
            *a -= factor * b;
        }
        r[col] = 0.0;
    }
    // Guard against tiny negative rhs from cancellation.
    for r in tab.iter_mut().take(basis.len()) {
        if r[rhs_col] < 0.0 && r[rhs_col] > -1e-11 {
            r[rhs_col] = 0.0;
        }
    }
    basis[row] = col;
}

