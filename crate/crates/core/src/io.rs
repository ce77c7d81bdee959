//! CSV output with 12 significant digits, `.meta` sidecars and state dumps.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dynamics::TimeSeries;
use crate::spectrum::{GroundScanRow, LevelTable, PlateauEdge};
use crate::state::StateVector;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-5 <= |x| < 1e12`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_ground_scan<W: Write>(mut w: W, rows: &[GroundScanRow]) -> io::Result<()> {
    writeln!(w, "J_over_gt,EG_over_gt,lG")?;
    for r in rows {
        writeln!(w, "{},{},{}", fmt_g12(r.j_over_gt), fmt_g12(r.eg_over_gt), r.l_g)?;
    }
    Ok(())
}

pub fn write_transitions<W: Write>(mut w: W, edges: &[PlateauEdge]) -> io::Result<()> {
    writeln!(w, "J_over_gt,l_from,l_to")?;
    for e in edges {
        writeln!(w, "{},{},{}", fmt_g12(e.j_over_gt), e.l_from, e.l_to)?;
    }
    Ok(())
}

pub fn write_level_table<W: Write>(mut w: W, table: &LevelTable) -> io::Result<()> {
    writeln!(w, "l,E1b,degeneracy")?;
    for r in &table.rows {
        writeln!(w, "{},{},{}", r.l, fmt_g12(r.e1b), r.degeneracy)?;
    }
    Ok(())
}

/// `t,value` for one series, `t,value_<name>,...` for several on one grid.
pub fn write_series<W: Write>(mut w: W, series: &[TimeSeries]) -> io::Result<()> {
    let first = series
        .first()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "no series to write"))?;
    if series.iter().any(|s| s.times != first.times) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "series do not share a time grid",
        ));
    }
    let mut header = String::from("t");
    if series.len() == 1 {
        header.push_str(",value");
    } else {
        for s in series {
            write!(header, ",value_{}", s.observable.name()).expect("string write");
        }
    }
    writeln!(w, "{header}")?;
    for (k, t) in first.times.iter().enumerate() {
        let mut line = fmt_g12(*t);
        for s in series {
            line.push(',');
            line.push_str(&fmt_g12(s.values[k]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// `key=value` lines, in the given order.
pub fn write_meta<W: Write>(mut w: W, entries: &[(String, String)]) -> io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}

/// Plain-text dump: a header `N two_S two_m dim` per block, then
/// `index re im` per basis state.
pub fn write_state<W: Write>(mut w: W, state: &StateVector) -> io::Result<()> {
    for b in state.blocks() {
        let tag = b.tag();
        writeln!(w, "{} {} {} {}", tag.n, tag.two_s, tag.two_m, b.amps.len())?;
        for (i, a) in b.amps.iter().enumerate() {
            writeln!(w, "{i} {} {}", fmt_g12(a.re), fmt_g12(a.im))?;
        }
    }
    Ok(())
}
