//! Report emission: CSV and JSON renderings of sweep and membership
//! results. Every rational column appears three times: a 12-significant-
//! digit decimal for reading, and the exact numerator and denominator.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::geom2d::{dec12, Rat};
use crate::lb_bounds::{ClosureMembershipReport, QSweepRow, SubclassGQuantities};
use crate::ub_bounds::{UbSweepReport, UbSweepRow};

fn rat_cols(r: &Rat) -> [String; 3] {
    [dec12(r), r.numer().to_string(), r.denom().to_string()]
}

fn blank_cols() -> [String; 3] {
    [String::new(), String::new(), String::new()]
}

fn header_for(names: &[&str]) -> String {
    let mut cols = Vec::new();
    for n in names {
        cols.push((*n).to_string());
        cols.push(format!("{n}_num"));
        cols.push(format!("{n}_den"));
    }
    cols.join(",")
}

fn push_row(line: &mut Vec<String>, cols: [String; 3]) {
    line.extend(cols);
}

/// CSV for a relaxation sweep: u,v,w,f1,f2 (each as decimal+num+den),
/// the case tag, and the objective value.
pub fn write_ub_sweep_csv<W: Write>(out: &mut W, report: &UbSweepReport) -> io::Result<()> {
    writeln!(
        out,
        "{},case,{}",
        header_for(&["u", "v", "w", "f1", "f2"]),
        header_for(&["value"])
    )?;
    for row in &report.rows {
        writeln!(out, "{}", ub_row_csv(row))?;
    }
    Ok(())
}

fn ub_row_csv(row: &UbSweepRow) -> String {
    let mut line = Vec::new();
    for r in [&row.u, &row.v, &row.w, &row.f1, &row.f2] {
        push_row(&mut line, rat_cols(r));
    }
    line.push(row.case.to_string());
    push_row(&mut line, rat_cols(&row.value));
    line.join(",")
}

pub fn ub_report_json(report: &UbSweepReport) -> Value {
    json!({
        "evaluations": report.evaluations,
        "empty": report.empty,
        "min": report.min.as_ref().map(ub_row_json),
        "rows": report.rows.iter().map(ub_row_json).collect::<Vec<_>>(),
    })
}

fn ub_row_json(row: &UbSweepRow) -> Value {
    json!({
        "u": rat_json(&row.u),
        "v": rat_json(&row.v),
        "w": rat_json(&row.w),
        "f1": rat_json(&row.f1),
        "f2": rat_json(&row.f2),
        "case": row.case.to_string(),
        "value": rat_json(&row.value),
    })
}

pub fn rat_json(r: &Rat) -> Value {
    json!({
        "decimal": dec12(r),
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
    })
}

/// CSV for the q sweep: t,a,b,lambda1,lambda2,thr1,thr2,m,q. The m column
/// is blank at parameters where the assembled chain degenerates.
pub fn write_q_sweep_csv<W: Write>(out: &mut W, rows: &[QSweepRow]) -> io::Result<()> {
    writeln!(
        out,
        "{}",
        header_for(&["t", "a", "b", "lambda1", "lambda2", "thr1", "thr2", "m", "q"])
    )?;
    for row in rows {
        let mut line = Vec::new();
        push_row(&mut line, rat_cols(&row.t));
        match &row.quantities {
            Some(g) => {
                for r in [
                    &g.a,
                    &g.b,
                    &g.lambda1,
                    &g.lambda2,
                    &g.threshold1,
                    &g.threshold2,
                    &g.m,
                ] {
                    push_row(&mut line, rat_cols(r));
                }
            }
            None => {
                // a, b are always well defined; recompute them directly
                let one = crate::geom2d::rat_i(1);
                let denom = &one + &row.t * &row.t;
                let a = &row.t / &denom;
                let b = denom.recip();
                push_row(&mut line, rat_cols(&a));
                push_row(&mut line, rat_cols(&b));
                for _ in 0..5 {
                    push_row(&mut line, blank_cols());
                }
            }
        }
        push_row(&mut line, rat_cols(&row.q));
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn q_rows_json(rows: &[QSweepRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                json!({
                    "t": rat_json(&row.t),
                    "q": rat_json(&row.q),
                    "quantities": row.quantities.as_ref().map(quantities_json),
                })
            })
            .collect(),
    )
}

pub fn quantities_json(g: &SubclassGQuantities) -> Value {
    json!({
        "t": rat_json(&g.t),
        "a": rat_json(&g.a),
        "b": rat_json(&g.b),
        "lambda1": rat_json(&g.lambda1),
        "lambda2": rat_json(&g.lambda2),
        "threshold1": rat_json(&g.threshold1),
        "threshold2": rat_json(&g.threshold2),
        "pprime_x": rat_json(&g.pprime_x),
        "m": rat_json(&g.m),
        "q": rat_json(&g.q),
    })
}

/// CSV for the membership report: sample_id,family,sum,slack.
pub fn write_membership_csv<W: Write>(
    out: &mut W,
    report: &ClosureMembershipReport,
) -> io::Result<()> {
    writeln!(
        out,
        "sample_id,family,{}",
        header_for(&["sum", "slack"])
    )?;
    for row in &report.rows {
        let mut line = vec![row.sample_id.to_string(), row.family.to_string()];
        push_row(&mut line, rat_cols(&row.total));
        push_row(&mut line, rat_cols(&row.slack));
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn membership_json(report: &ClosureMembershipReport) -> Value {
    json!({
        "min_slack": report.min_slack.as_ref().map(rat_json),
        "skipped": report.skipped,
        "rows": report.rows.iter().map(|row| json!({
            "sample_id": row.sample_id,
            "family": row.family.to_string(),
            "sum": rat_json(&row.total),
            "slack": rat_json(&row.slack),
        })).collect::<Vec<_>>(),
    })
}
