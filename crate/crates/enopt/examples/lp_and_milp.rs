//! Solver basics: build a small LP and MILP, solve, and dump the problem
//! text.
//!
//! Run with: cargo run --release --example lp_and_milp

use enopt::milp::{
    solve_lp, solve_milp, LpProblem, MilpProblem, Sense, SolveOptions, VarKind,
};

fn main() {
    let opts = SolveOptions::default();

    // maximize 3x + 2y  s.t.  x + y <= 4, x <= 2, x,y >= 0
    let mut lp = LpProblem::new(Sense::Maximize);
    let x = lp.add_var("x", 0.0, f64::INFINITY, 3.0);
    let y = lp.add_var("y", 0.0, f64::INFINITY, 2.0);
    lp.add_le(vec![(x, 1.0), (y, 1.0)], 4.0);
    lp.add_le(vec![(x, 1.0)], 2.0);

    println!("--- LP ---");
    print!("{}", lp.to_text());
    let solution = solve_lp(&lp, &opts).expect("well-formed problem");
    println!(
        "status {:?}: x = {}, y = {}, objective = {}\n",
        solution.status,
        solution.value(x),
        solution.value(y),
        solution.objective
    );

    // A tiny unit-commitment flavoured MILP: two generators with on/off
    // binaries and minimum loads, one demand balance.
    let mut lp = LpProblem::new(Sense::Minimize);
    let on_a = lp.add_var("on_a", 0.0, 1.0, 5.0); // £5 to run A at all
    let on_b = lp.add_var("on_b", 0.0, 1.0, 2.0);
    let gen_a = lp.add_var("gen_a", 0.0, 80.0, 0.10); // cheap unit, big
    let gen_b = lp.add_var("gen_b", 0.0, 40.0, 0.25);
    // Generation only while on, with 30% minimum stable load.
    lp.add_le(vec![(gen_a, 1.0), (on_a, -80.0)], 0.0);
    lp.add_ge(vec![(gen_a, 1.0), (on_a, -24.0)], 0.0);
    lp.add_le(vec![(gen_b, 1.0), (on_b, -40.0)], 0.0);
    lp.add_ge(vec![(gen_b, 1.0), (on_b, -12.0)], 0.0);
    lp.add_eq(vec![(gen_a, 1.0), (gen_b, 1.0)], 90.0);

    let mut milp = MilpProblem::from_lp(lp);
    milp.set_kind(on_a, VarKind::Binary);
    milp.set_kind(on_b, VarKind::Binary);

    println!("--- MILP ---");
    print!("{}", milp.to_text());
    let solution = solve_milp(&milp, &opts).expect("well-formed problem");
    println!(
        "status {:?} (gap {:.2e}): A {} @ {:.1} kW, B {} @ {:.1} kW, cost £{:.2}",
        solution.status,
        solution.gap,
        if solution.value(on_a) > 0.5 { "on" } else { "off" },
        solution.value(gen_a),
        if solution.value(on_b) > 0.5 { "on" } else { "off" },
        solution.value(gen_b),
        solution.objective
    );
}
