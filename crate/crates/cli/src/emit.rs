//! Artifact writers.  All floating-point numbers are written with enough
//! digits to round-trip exactly, so a byte comparison of two output trees
//! is a comparison of the numbers themselves.

use std::fs;
use std::path::{Path, PathBuf};

use zpd_core::Result;

/// One CSV row of experiment output.
pub struct Row {
    pub id: &'static str,
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub budget: f64,
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.17e}")
}

/// Writes `<out>/<name>.csv` with a fixed header.
pub fn write_csv(out: &Path, name: &str, rows: &[Row]) -> Result<PathBuf> {
    let mut text = String::from("id,x,re,im,abs,budget\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.id,
            fmt_f(r.x),
            fmt_f(r.re),
            fmt_f(r.im),
            fmt_f(r.abs),
            fmt_f(r.budget)
        ));
    }
    let path = out.join(format!("{name}.csv"));
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes `<out>/<name>.dat` as two whitespace-separated columns plus a
/// sibling `<name>.README` naming the axes, ready for any plotting tool.
pub fn write_plot(
    out: &Path,
    name: &str,
    x_axis: &str,
    y_axis: &str,
    points: &[(f64, f64)],
) -> Result<PathBuf> {
    let mut text = String::new();
    for (x, y) in points {
        text.push_str(&format!("{} {}\n", fmt_f(*x), fmt_f(*y)));
    }
    let path = out.join(format!("{name}.dat"));
    fs::write(&path, text)?;
    fs::write(
        out.join(format!("{name}.README")),
        format!("column 1: {x_axis}\ncolumn 2: {y_axis}\n"),
    )?;
    Ok(path)
}

/// Writes `<out>/summary.json`.
pub fn write_summary(out: &Path, value: &serde_json::Value) -> Result<PathBuf> {
    let path = out.join("summary.json");
    let mut text = serde_json::to_string_pretty(value).expect("json serialization");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
