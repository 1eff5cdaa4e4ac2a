//! Exporters: legacy-VTK ASCII unstructured grids and the CSV history.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::mesh::SpaceTimeMesh;
use crate::optimizer::HistoryRow;

pub const HISTORY_HEADER: &str = "iter,J,theta_norm,tau,newton_iters";

/// Formats like C's `%.12e`: twelve mantissa digits, signed exponent of at
/// least two digits. Independent of the process locale.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn history_csv(rows: &[HistoryRow]) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iter,
            format_sci(r.objective),
            format_sci(r.theta_norm),
            format_sci(r.tau),
            r.newton_iters
        );
    }
    out
}

pub fn write_history_csv(path: &Path, rows: &[HistoryRow]) -> io::Result<()> {
    fs::write(path, history_csv(rows))
}

/// A named scalar per vertex or per element.
#[derive(Debug, Clone, Copy)]
pub struct ScalarData<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

impl<'a> ScalarData<'a> {
    pub fn new(name: &'a str, values: &'a [f64]) -> Self {
        Self { name, values }
    }
}

/// Renders the space-time mesh as a legacy-VTK unstructured grid of
/// triangles; points are placed at `(x, t, 0)`. Names may not contain
/// whitespace.
pub fn vtk_string(
    mesh: &SpaceTimeMesh,
    title: &str,
    point_data: &[ScalarData<'_>],
    cell_data: &[ScalarData<'_>],
) -> io::Result<String> {
    let nv = mesh.n_vertices();
    let ne = mesh.n_elements();
    for d in point_data {
        check(d, nv, "point")?;
    }
    for d in cell_data {
        check(d, ne, "cell")?;
    }
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {nv} double");
    for &[t, x] in &mesh.vertices {
        let _ = writeln!(s, "{} {} 0", fmt(x), fmt(t));
    }
    let _ = writeln!(s, "CELLS {ne} {}", 4 * ne);
    for e in &mesh.elements {
        let [a, b, c] = e.vertices;
        // Reversed so the cell stays counter-clockwise in the (x, t) plane.
        let _ = writeln!(s, "3 {a} {c} {b}");
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("5\n");
    }
    section(&mut s, "POINT_DATA", nv, point_data);
    section(&mut s, "CELL_DATA", ne, cell_data);
    Ok(s)
}

pub fn write_vtk(
    path: &Path,
    mesh: &SpaceTimeMesh,
    title: &str,
    point_data: &[ScalarData<'_>],
    cell_data: &[ScalarData<'_>],
) -> io::Result<()> {
    fs::write(path, vtk_string(mesh, title, point_data, cell_data)?)
}

fn check(d: &ScalarData<'_>, n: usize, what: &str) -> io::Result<()> {
    if d.values.len() != n {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{what} field `{}` has {} values, expected {n}", d.name, d.values.len()),
        ));
    }
    if d.name.is_empty() || d.name.contains(char::is_whitespace) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, format!("invalid field name `{}`", d.name)));
    }
    Ok(())
}

fn section(s: &mut String, header: &str, n: usize, data: &[ScalarData<'_>]) {
    if data.is_empty() {
        return;
    }
    let _ = writeln!(s, "{header} {n}");
    for d in data {
        let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", d.name);
        for v in d.values {
            let _ = writeln!(s, "{}", fmt(*v));
        }
    }
}

// Shortest round-tripping representation; VTK readers accept Rust's float
// syntax except for non-finite values.
fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        "nan".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_sci(5.091e-4), "5.091000000000e-04");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(-1.5e123), "-1.500000000000e+123");
        assert_eq!(format_sci(12.0), "1.200000000000e+01");
    }
}
