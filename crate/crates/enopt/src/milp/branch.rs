//! Branch and bound over the LP relaxation.
//!
//! Node selection is best-bound (ties broken by insertion order), branching
//! picks the most fractional integer variable with ties broken by lowest
//! variable index, so a given problem always explores the same tree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::simplex;
use super::{MilpProblem, Sense, SolveOptions, Solution, Status, VarKind};
use crate::Result;

struct Node {
    /// LP bound of the parent, in minimisation score space.
    score: f64,
    id: u64,
    bounds: Vec<(f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.score == other.score && self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap; invert so the lowest score pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .partial_cmp(&self.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

pub(crate) fn solve(problem: &MilpProblem, opts: &SolveOptions) -> Result<Solution> {
    let base = problem.base();
    let integer_vars: Vec<usize> = problem
        .kinds()
        .iter()
        .enumerate()
        .filter(|(_, k)| **k != VarKind::Continuous)
        .map(|(j, _)| j)
        .collect();

    let root_bounds: Vec<(f64, f64)> = (0..base.num_vars())
        .map(|j| {
            let (lo, hi) = base.bounds(super::VarId(j));
            match problem.kinds()[j] {
                VarKind::Continuous => (lo, hi),
                // Integral bounds can be tightened to the enclosed integers.
                VarKind::Binary | VarKind::Integer => (lo.ceil(), hi.floor()),
            }
        })
        .collect();

    let deadline = opts.time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s));
    let to_score = |obj: f64| match base.sense() {
        Sense::Minimize => obj,
        Sense::Maximize => -obj,
    };

    // Continuous problems collapse to a single LP solve.
    if integer_vars.is_empty() {
        let out = simplex::solve_bounded(base, &root_bounds, opts, deadline)?;
        return Ok(Solution {
            status: out.status,
            values: out.values,
            objective: out.objective,
            gap: if out.status == Status::Optimal {
                0.0
            } else {
                f64::INFINITY
            },
        });
    }

    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    heap.push(Node {
        score: f64::NEG_INFINITY,
        id: next_id,
        bounds: root_bounds,
    });
    next_id += 1;

    let mut incumbent: Option<(f64, Vec<f64>)> = None; // (score, values)
    let mut nodes_explored = 0usize;
    let mut at_root = true;

    let rel_gap_of = |inc: f64, bound: f64| {
        let denom = inc.abs().max(1e-10);
        ((inc - bound) / denom).max(0.0)
    };

    loop {
        let best_open = heap.peek().map(|n| n.score);
        if let Some((inc_score, _)) = &incumbent {
            let bound = best_open.unwrap_or(*inc_score);
            if rel_gap_of(*inc_score, bound) <= opts.rel_gap {
                let (score, values) = incumbent.unwrap();
                let objective = base.objective_value(&values);
                let gap = if heap.is_empty() {
                    0.0
                } else {
                    rel_gap_of(score, bound)
                };
                return Ok(Solution {
                    status: Status::Optimal,
                    values,
                    objective,
                    gap,
                });
            }
        }
        let Some(node) = heap.pop() else {
            return Ok(Solution::not_solved(Status::Infeasible));
        };

        let budget_hit = nodes_explored >= opts.max_nodes
            || deadline.map(|d| Instant::now() > d).unwrap_or(false);
        if budget_hit {
            return Ok(match incumbent {
                Some((score, values)) => {
                    let objective = base.objective_value(&values);
                    Solution {
                        status: Status::GapLimit,
                        values,
                        objective,
                        gap: rel_gap_of(score, node.score),
                    }
                }
                None => Solution::not_solved(Status::IterationLimit),
            });
        }
        nodes_explored += 1;

        let lp = simplex::solve_bounded(base, &node.bounds, opts, deadline)?;
        let root = std::mem::take(&mut at_root);
        match lp.status {
            Status::Infeasible => continue,
            Status::Unbounded => {
                if root {
                    return Ok(Solution::not_solved(Status::Unbounded));
                }
                continue;
            }
            Status::IterationLimit | Status::GapLimit => {
                return Ok(Solution::not_solved(Status::IterationLimit));
            }
            Status::Optimal => {}
        }
        let score = to_score(lp.objective);
        if let Some((inc_score, _)) = &incumbent {
            if score >= *inc_score - 1e-12 * (1.0 + inc_score.abs()) {
                continue;
            }
        }

        // Most fractional integer variable; ties to the lowest index.
        let mut branch_var: Option<(usize, f64)> = None;
        let mut best_dist = 0.0f64;
        for &j in &integer_vars {
            let v = lp.values[j];
            let dist = (v - v.floor()).min(v.ceil() - v);
            if dist > opts.integrality_tol && dist > best_dist {
                best_dist = dist;
                branch_var = Some((j, v));
            }
        }

        match branch_var {
            None => {
                // Integral within tolerance: new incumbent.
                incumbent = Some((score, lp.values));
            }
            Some((j, v)) => {
                let mut down = node.bounds.clone();
                down[j].1 = v.floor();
                if down[j].0 <= down[j].1 {
                    heap.push(Node {
                        score,
                        id: next_id,
                        bounds: down,
                    });
                    next_id += 1;
                }
                let mut up = node.bounds;
                up[j].0 = v.ceil();
                if up[j].0 <= up[j].1 {
                    heap.push(Node {
                        score,
                        id: next_id,
                        bounds: up,
                    });
                    next_id += 1;
                }
            }
        }
    }
}
