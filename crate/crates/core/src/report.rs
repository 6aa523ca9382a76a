//! CSV rendering of [`CheckReport`] rows.

use std::fmt::Write as _;

use crate::bounds::CheckReport;

pub const CSV_HEADER: &str = "suite,n,quantity,computed,bound,direction,pass,runtime_ms,witness_ref";

/// 17 significant digits, enough for an exact round trip.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Header plus one line per row. Runtimes are left empty unless
/// `timings` is set, so that output is reproducible byte for byte.
pub fn to_csv(rows: &[CheckReport], timings: bool) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = if timings { format!("{:.3}", r.runtime.as_secs_f64() * 1e3) } else { String::new() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.suite,
            r.n,
            r.quantity,
            format_number(r.computed),
            format_number(r.bound),
            r.direction.as_str(),
            r.status.as_str(),
            runtime,
            escape(r.witness.as_deref().unwrap_or("")),
        );
    }
    out
}
