//! Built-in mesh generators for the 1D and 2D models.

use super::{build_complex, compute_dual_geometry, DualGeometry, Point, SimplicialComplex};
use crate::{Error, Result};

/// Uniform 1D mesh of `n_edges` edges on [0, length]. Boundary dual
/// vertices sit at 0 and length so the dual of the boundary equals the
/// boundary of the dual.
pub fn generate_interval_mesh(
    n_edges: usize,
    length: f64,
) -> Result<(SimplicialComplex, DualGeometry)> {
    if n_edges == 0 {
        return Err(Error::InvalidInput("n_edges must be positive".into()));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidInput("length must be positive".into()));
    }
    let h = length / n_edges as f64;
    let vertices: Vec<Point> = (0..=n_edges)
        .map(|i| Point::new(vec![i as f64 * h]))
        .collect();
    let top: Vec<Vec<usize>> = (0..n_edges).map(|i| vec![i, i + 1]).collect();
    let complex = build_complex(vertices, &top)?;
    let geometry = compute_dual_geometry(&complex)?;
    Ok((complex, geometry))
}

/// Strip mesh of `rows` x `cols` cells, each split into an up and a down
/// isoceles triangle whose apex sits over the base midpoint. Alternate
/// vertex rows are offset by half a cell, so the lateral boundary zigzags
/// while the top and bottom edges stay straight; every triangle is
/// congruent and strictly acute, which makes the mesh well-centered.
pub fn generate_strip_mesh(
    rows: usize,
    cols: usize,
    width: f64,
    height: f64,
) -> Result<(SimplicialComplex, DualGeometry)> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("rows and cols must be positive".into()));
    }
    if !(width > 0.0) || !(height > 0.0) || !width.is_finite() || !height.is_finite() {
        return Err(Error::InvalidInput(
            "width and height must be positive and finite".into(),
        ));
    }
    let dx = width / cols as f64;
    let dy = height / rows as f64;
    // Apex angle is acute iff the row height exceeds half the base.
    if dy <= 0.5 * dx * (1.0 + 1e-9) {
        return Err(Error::NotWellCenterable(format!(
            "row height {dy:.6} must exceed half the column width {dx:.6} for acute triangles"
        )));
    }

    let vid = |row: usize, j: usize| row * (cols + 1) + j;
    let mut vertices = Vec::with_capacity((rows + 1) * (cols + 1));
    for row in 0..=rows {
        let offset = if row % 2 == 0 { 0.0 } else { 0.5 * dx };
        for j in 0..=cols {
            vertices.push(Point::new(vec![offset + j as f64 * dx, row as f64 * dy]));
        }
    }

    // Each band contributes cols up-triangles (base on the unshifted-side
    // row) and cols down-triangles, all counterclockwise.
    let mut top: Vec<Vec<usize>> = Vec::with_capacity(2 * rows * cols);
    for row in 0..rows {
        let lower_shifted = row % 2 == 1;
        for j in 0..cols {
            if !lower_shifted {
                // lower row at offset 0, upper row shifted right by dx/2
                top.push(vec![vid(row, j), vid(row, j + 1), vid(row + 1, j)]);
                top.push(vec![vid(row + 1, j + 1), vid(row + 1, j), vid(row, j + 1)]);
            } else {
                // lower row shifted right, upper row at offset 0
                top.push(vec![vid(row, j), vid(row, j + 1), vid(row + 1, j + 1)]);
                top.push(vec![vid(row + 1, j + 1), vid(row + 1, j), vid(row, j)]);
            }
        }
    }

    let complex = build_complex(vertices, &top)?;
    let geometry = compute_dual_geometry(&complex)?;
    let report = super::is_well_centered(&complex, &geometry);
    if !report.ok {
        return Err(Error::NotWellCenterable(format!(
            "generated strip is not well-centered (margin {:.3e})",
            report.min_margin
        )));
    }
    Ok((complex, geometry))
}
