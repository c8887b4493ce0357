//! Path files and CSV report tables.
//!
//! A path file is a `delta=<decimal>` header followed by one observation per
//! line. All reals are written with 17 significant digits so that parsing
//! recovers the exact double.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use diffsel_core::harness::{grid, truth_drift, truth_vol, Curves, CURVE_POINTS};
use diffsel_core::regression::{make_drift_responses, make_vol_responses};
use diffsel_core::{DiffusionFamily, ReplicationRecord, SamplePath, Target};

use crate::error::CliError;

pub const REPLICATIONS_HEADER: &str =
    "replication,drift_p,drift_r,drift_err,vol_p,vol_r,vol_err,window_lo,window_hi";
pub const CURVES_HEADER: &str = "x,truth_drift,est_drift,truth_vol,est_vol";
pub const SCATTER_HEADER: &str = "x,y_drift_response,u_vol_response";

/// Decimal text with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn serialize_path(path: &SamplePath) -> String {
    let mut out = String::with_capacity(24 * (path.values().len() + 1));
    writeln!(out, "delta={}", fmt_real(path.delta())).unwrap();
    for v in path.values() {
        writeln!(out, "{}", fmt_real(*v)).unwrap();
    }
    out
}

pub fn parse_path(text: &str) -> Result<SamplePath, CliError> {
    let mut lines = text.lines().enumerate();
    let delta = loop {
        match lines.next() {
            None => return Err(CliError::Usage("line 1: missing 'delta=' header".into())),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => {
                let value = l.trim().strip_prefix("delta=").ok_or_else(|| {
                    CliError::Usage(format!("line {}: expected 'delta=<decimal>'", i + 1))
                })?;
                break parse_real(value, i + 1)?;
            }
        }
    };
    let mut values = Vec::new();
    for (i, l) in lines {
        let t = l.trim();
        if t.is_empty() {
            continue;
        }
        values.push(parse_real(t, i + 1)?);
    }
    SamplePath::new(delta, values).map_err(|e| CliError::Usage(format!("invalid path: {e}")))
}

fn parse_real(s: &str, line: usize) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("line {line}: '{s}' is not a decimal number")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!(
            "line {line}: non-finite value '{s}'"
        )));
    }
    Ok(v)
}

pub fn replications_table<'a>(
    rows: impl IntoIterator<Item = (usize, Option<&'a ReplicationRecord>)>,
) -> String {
    let mut out = String::new();
    writeln!(out, "{REPLICATIONS_HEADER}").unwrap();
    for (r, rec) in rows {
        match rec {
            Some(rec) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r,
                rec.drift_model.p(),
                rec.drift_model.r(),
                fmt_real(rec.drift_err),
                rec.vol_model.p(),
                rec.vol_model.r(),
                fmt_real(rec.vol_err),
                fmt_real(rec.window.lo()),
                fmt_real(rec.window.hi()),
            ),
            None => writeln!(out, "{r},NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN"),
        }
        .unwrap();
    }
    out
}

pub fn curves_table(curves: &Curves) -> String {
    let mut out = String::new();
    writeln!(out, "{CURVES_HEADER}").unwrap();
    for i in 0..curves.x.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(curves.x[i]),
            fmt_real(curves.truth_drift[i]),
            fmt_real(curves.est_drift[i]),
            fmt_real(curves.truth_vol[i]),
            fmt_real(curves.est_vol[i]),
        )
        .unwrap();
    }
    out
}

/// Curves for a single fit; truth columns are `NaN` when the generating
/// family is unknown.
pub fn single_fit_curves(
    record: &ReplicationRecord,
    truth: Option<(&DiffusionFamily, Target)>,
) -> Curves {
    let x = grid(record.window, CURVE_POINTS);
    let truth_at = |f: fn(&DiffusionFamily, Target, f64) -> f64| {
        x.iter()
            .map(|&v| truth.map_or(f64::NAN, |(fam, t)| f(fam, t, v)))
            .collect::<Vec<_>>()
    };
    Curves {
        window: record.window,
        truth_drift: truth_at(truth_drift),
        est_drift: x
            .iter()
            .map(|&v| record.drift_estimate.evaluate(v))
            .collect(),
        truth_vol: truth_at(truth_vol),
        est_vol: x.iter().map(|&v| record.vol_estimate.evaluate(v)).collect(),
        x,
    }
}

pub fn scatter_table(path: &SamplePath) -> String {
    let drift = make_drift_responses(path);
    let vol = make_vol_responses(path);
    let mut out = String::new();
    writeln!(out, "{SCATTER_HEADER}").unwrap();
    for ((x, y), u) in drift
        .predictors()
        .iter()
        .zip(drift.responses())
        .zip(vol.responses())
    {
        writeln!(out, "{},{},{}", fmt_real(*x), fmt_real(*y), fmt_real(*u)).unwrap();
    }
    out
}

/// `<prefix><suffix>`, e.g. `run` + `.curves.csv`.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}
