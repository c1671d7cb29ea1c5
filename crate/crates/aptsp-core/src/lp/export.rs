//! CPLEX-LP-format writer.
//!
//! Output is bit-stable for a fixed model: terms appear in variable-index
//! order and floats print with Rust's shortest round-trip formatting. Export
//! carries no solve budget; full-size models are written here and solved
//! externally.

use std::io::Write;
use std::path::Path;

use crate::lp::model::{LpModel, Relation, Sense};
use crate::Result;

/// Writes the model to `path` in CPLEX LP format.
pub fn write_lp(model: &LpModel, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_lp_to(model, &mut out)
}

/// Writes the model to an arbitrary writer.
pub fn write_lp_to(model: &LpModel, out: &mut impl Write) -> Result<()> {
    writeln!(out, "\\ {}", model.name)?;
    writeln!(
        out,
        "{}",
        match model.sense {
            Sense::Minimize => "Minimize",
            Sense::Maximize => "Maximize",
        }
    )?;
    let objective: Vec<(usize, f64)> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.objective != 0.0)
        .map(|(i, v)| (i, v.objective))
        .collect();
    write_expression(out, model, "obj", &objective)?;
    writeln!(out)?;
    writeln!(out, "Subject To")?;
    for row in model.constraints() {
        write_expression(out, model, &row.name, &row.terms)?;
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        writeln!(out, " {} {}", rel, fmt(row.rhs))?;
    }
    let free: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| !v.nonneg)
        .map(|v| v.name.as_str())
        .collect();
    if !free.is_empty() {
        writeln!(out, "Bounds")?;
        for name in free {
            writeln!(out, " {name} free")?;
        }
    }
    writeln!(out, "End")?;
    out.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    // Shortest representation that round-trips keeps the file exact and
    // stable.
    format!("{x}")
}

fn write_expression(
    out: &mut impl Write,
    model: &LpModel,
    name: &str,
    terms: &[(usize, f64)],
) -> Result<()> {
    write!(out, " {name}:")?;
    if terms.is_empty() {
        write!(out, " 0 {}", model.vars()[0].name)?;
        return Ok(());
    }
    let mut column = name.len() + 2;
    for (pos, &(var, coef)) in terms.iter().enumerate() {
        let piece = if pos == 0 {
            if coef < 0.0 {
                format!(" - {} {}", fmt(-coef), model.vars()[var].name)
            } else {
                format!(" {} {}", fmt(coef), model.vars()[var].name)
            }
        } else if coef < 0.0 {
            format!(" - {} {}", fmt(-coef), model.vars()[var].name)
        } else {
            format!(" + {} {}", fmt(coef), model.vars()[var].name)
        };
        if column + piece.len() > 240 {
            writeln!(out)?;
            write!(out, "   ")?;
            column = 3;
        }
        write!(out, "{piece}")?;
        column += piece.len();
    }
    Ok(())
}
