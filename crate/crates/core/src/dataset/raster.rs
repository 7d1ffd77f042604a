//! Polygon rasterization: even-odd fill sampled at pixel centers.
//!
//! A pixel belongs to the mask iff its center `(x + 0.5, y + 0.5)` lies
//! inside the polygon under the even-odd rule. Edge crossings use the
//! half-open rule `min(y1, y2) <= cy < max(y1, y2)` so shared vertices are
//! counted once, and a center is inside iff an odd number of crossings lie
//! strictly to its left.

use crate::geometry::InstanceMask;
use crate::{Error, Result};

/// Crossing abscissas of the polygon with the horizontal line at `cy`.
fn row_crossings(vertices: &[(f64, f64)], cy: f64) -> Vec<f64> {
    let n = vertices.len();
    let mut xs = Vec::new();
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        if (y1 <= cy && cy < y2) || (y2 <= cy && cy < y1) {
            xs.push(x1 + (cy - y1) * (x2 - x1) / (y2 - y1));
        }
    }
    xs.sort_unstable_by(f64::total_cmp);
    xs
}

/// Scanline even-odd fill of a polygon given in pixel coordinates, clipped
/// to a `w` x `h` frame. A degenerate zero-area polygon produces an empty
/// mask, not an error.
pub fn rasterize_polygon(vertices: &[(f64, f64)], w: usize, h: usize) -> Result<InstanceMask> {
    if vertices.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "a polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if let Some(&(x, y)) = vertices.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "polygon vertex ({x}, {y}) is not finite"
        )));
    }

    let mut mask = InstanceMask::empty(w, h);
    for row in 0..h {
        let cy = row as f64 + 0.5;
        let xs = row_crossings(vertices, cy);
        if xs.is_empty() {
            continue;
        }
        for col in 0..w {
            let cx = col as f64 + 0.5;
            // crossings strictly left of the center
            let left = xs.partition_point(|&x| x < cx);
            if left % 2 == 1 {
                mask.set(col, row, true);
            }
        }
    }
    Ok(mask)
}
