//! CSV tables and legacy VTK snapshots.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use swehdg_core::diagnostics::{ConvergenceRow, QuantityRecord};
use swehdg_core::fespace::Spaces;

pub const CONVERGENCE_HEADER: &str = "k,h,err_phi,eoc_phi,err_u,eoc_u,err_w,eoc_w";
pub const INIT_CONVERGENCE_HEADER: &str = "k,h,err_sigma,eoc_sigma,err_w,eoc_w,err_phi,eoc_phi";

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_convergence(path: &Path, header: &str, rows: &[ConvergenceRow]) -> Result<()> {
    write_lines(path, header, rows.iter().map(ConvergenceRow::csv_row))
}

pub fn write_time_series(path: &Path, records: &[QuantityRecord]) -> Result<()> {
    write_lines(path, QuantityRecord::CSV_HEADER, records.iter().map(QuantityRecord::csv_row))
}

/// `step,time,energy_uw,energy_phiu`
pub fn write_energy_comparison(path: &Path, rows: &[(usize, f64, f64, f64)]) -> Result<()> {
    write_lines(
        path,
        "step,time,energy_uw,energy_phiu",
        rows.iter().map(|(n, t, a, b)| format!("{n},{t:.16e},{a:.16e},{b:.16e}")),
    )
}

/// Unstructured grid with three private points per triangle, so the
/// discontinuous fields are shown without averaging.
pub fn write_vtk(path: &Path, spaces: &Spaces, title: &str, phi: &[f64], u: &[f64]) -> Result<()> {
    let mesh = &spaces.mesh;
    let ne = mesh.num_elements();
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0")?;
    writeln!(s, "{title}")?;
    writeln!(s, "ASCII")?;
    writeln!(s, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(s, "POINTS {} double", 3 * ne)?;
    for e in 0..ne {
        for v in mesh.vertices(e) {
            writeln!(s, "{:e} {:e} 0", v.x, v.y)?;
        }
    }
    writeln!(s, "CELLS {} {}", ne, 4 * ne)?;
    for e in 0..ne {
        writeln!(s, "3 {} {} {}", 3 * e, 3 * e + 1, 3 * e + 2)?;
    }
    writeln!(s, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(s, "5")?;
    }
    writeln!(s, "POINT_DATA {}", 3 * ne)?;
    writeln!(s, "SCALARS phi double 1")?;
    writeln!(s, "LOOKUP_TABLE default")?;
    for e in 0..ne {
        for xi in corners {
            writeln!(s, "{:e}", spaces.eval_scalar_reference(phi, e, xi))?;
        }
    }
    writeln!(s, "SCALARS speed double 1")?;
    writeln!(s, "LOOKUP_TABLE default")?;
    for e in 0..ne {
        for xi in corners {
            let v = spaces.eval_vector_reference(u, e, xi);
            writeln!(s, "{:e}", v[0].hypot(v[1]))?;
        }
    }
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(s.as_bytes())?;
    Ok(())
}
