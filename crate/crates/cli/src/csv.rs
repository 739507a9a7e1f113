//! CSV output for sweeps and optimizer profiles.
//!
//! The schema is fixed: ten columns, `\n` line endings, `.` decimal
//! separator, floats at 12 significant digits, optional cells left
//! empty. Byte stability across runs with the same inputs is part of
//! the contract, so all formatting funnels through [`fmt_g12`].

use crate::fmt::fmt_g12;
use aoi_core::{SweepRow, SweptVariable};
use std::io::{self, Write};

pub const CSV_HEADER: &str =
    "swept_var,value,scheme,blocklength,error_rate,aoi_analytic_slots,aoi_sim_slots,aoi_sim_ci95,seed,flags";

fn flags_cell(row: &SweepRow) -> String {
    let mut flags = Vec::new();
    if row.unbounded {
        flags.push("unbounded");
    }
    if row.short_block {
        flags.push("short_block");
    }
    flags.join(";")
}

pub fn write_rows<W: Write>(
    out: &mut W,
    variable: SweptVariable,
    rows: &[SweepRow],
) -> io::Result<()> {
    write!(out, "{CSV_HEADER}\n")?;
    for row in rows {
        let sim_aoi = row.sim_aoi_slots.map(fmt_g12).unwrap_or_default();
        let sim_ci = row.sim_ci95.map(fmt_g12).unwrap_or_default();
        let seed = row.seed.map(|s| s.to_string()).unwrap_or_default();
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}\n",
            variable.as_str(),
            fmt_g12(row.swept_value),
            row.scheme.as_str(),
            row.blocklength,
            fmt_g12(row.error_rate),
            fmt_g12(row.analytic_aoi_slots),
            sim_aoi,
            sim_ci,
            seed,
            flags_cell(row),
        )?;
    }
    Ok(())
}

/// Render to an owned buffer; the caller decides between stdout and a
/// file.
pub fn render(variable: SweptVariable, rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&mut buf, variable, rows).expect("writing to a Vec cannot fail");
    buf
}
