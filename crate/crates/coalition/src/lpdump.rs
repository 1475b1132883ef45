//! Writes the relaxed LP in CPLEX LP format.
//!
//! Vertices are named `t<j>` for tasks and `r<i>` for robots; the separation
//! variable of a pair is `x_<a>_<b>`. The objective's constant term is carried
//! by the variable `one`, fixed to 1. Either the full triangle set or only the
//! cuts a solve produced can be written.

use std::fmt::Write as _;
use std::io::{self, Write};

use coalition_core::lp::{LpProblem, TriangleCut};

fn vertex_name(problem: &LpProblem, v: usize) -> String {
    let m = problem.task_count();
    if v < m {
        format!("t{v}")
    } else {
        format!("r{}", v - m)
    }
}

/// Variable names in pair-index order.
pub fn variable_names(problem: &LpProblem) -> Vec<String> {
    let v = problem.vertex_count();
    let mut names = Vec::with_capacity(problem.variable_count());
    for a in 0..v {
        for b in a + 1..v {
            names.push(format!("x_{}_{}", vertex_name(problem, a), vertex_name(problem, b)));
        }
    }
    names
}

fn term(out: &mut String, coef: f64, name: &str, first: bool) {
    let sign = if coef < 0.0 { '-' } else { '+' };
    if first && sign == '+' {
        let _ = write!(out, " {} {name}", coef.abs());
    } else {
        let _ = write!(out, " {sign} {} {name}", coef.abs());
    }
}

/// Writes the LP with the given rows (pass `problem.triangles()` for the
/// full formulation).
pub fn write_lp<W: Write>(
    out: &mut W,
    problem: &LpProblem,
    cuts: impl IntoIterator<Item = TriangleCut>,
) -> io::Result<()> {
    let names = variable_names(problem);
    writeln!(
        out,
        "\\ correlation clustering relaxation: {} vertices ({} tasks), {} variables",
        problem.vertex_count(),
        problem.task_count(),
        names.len()
    )?;
    writeln!(out, "Minimize")?;
    let mut line = String::from(" obj:");
    let mut first = true;
    let mut on_line = 0;
    for (coef, name) in problem.linear_costs().iter().zip(&names) {
        if *coef != 0.0 {
            // LP readers cap line length.
            if on_line == 6 {
                line.push_str("\n     ");
                on_line = 0;
            }
            term(&mut line, *coef, name, first);
            first = false;
            on_line += 1;
        }
    }
    term(&mut line, problem.constant(), "one", first);
    writeln!(out, "{line}")?;
    writeln!(out, "Subject To")?;
    for (k, cut) in cuts.into_iter().enumerate() {
        writeln!(
            out,
            " tri{k}: {} + {} - {} >= 0",
            names[cut.plus[0]],
            names[cut.plus[1]],
            names[cut.minus]
        )?;
    }
    writeln!(out, "Bounds")?;
    for name in &names {
        writeln!(out, " 0 <= {name} <= 1")?;
    }
    writeln!(out, " one = 1")?;
    writeln!(out, "End")
}
