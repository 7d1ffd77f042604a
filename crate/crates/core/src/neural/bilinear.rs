//! Bilinear sampling of a rank-2 map at fractional coordinates.
//!
//! Deformable taps usually land between grid points; this interpolates from
//! the four integer neighbors. Out-of-range coordinates are clamped to the
//! border (replicate edge), making the sampler a total function.

use crate::Tensor;

/// One sample with everything the backward pass needs: the value, the
/// partial derivatives with respect to the (unclamped) coordinates, and the
/// four grid taps with their weights.
#[derive(Debug, Clone, Copy)]
pub struct BilinearSample {
    pub value: f64,
    /// d value / d x; zero when `x` sits in the clamped region.
    pub dx: f64,
    /// d value / d y; zero when `y` sits in the clamped region.
    pub dy: f64,
    /// `(row, col, weight)` of the four contributing grid cells.
    pub taps: [(usize, usize, f64); 4],
}

/// Interpolated value of `map` at `(x, y)`, `x` horizontal (column axis),
/// `y` vertical (row axis). Integer coordinates reproduce grid values
/// exactly.
pub fn bilinear_sample(map: &Tensor, x: f64, y: f64) -> f64 {
    bilinear_sample_detailed(map, x, y).value
}

/// Sample with derivative information for backward contracts.
pub fn bilinear_sample_detailed(map: &Tensor, x: f64, y: f64) -> BilinearSample {
    debug_assert_eq!(map.shape().len(), 2, "bilinear map must be rank 2");
    let h = map.shape()[0];
    let w = map.shape()[1];

    let max_x = (w - 1) as f64;
    let max_y = (h - 1) as f64;
    let cx = x.clamp(0.0, max_x);
    let cy = y.clamp(0.0, max_y);
    let x_in_range = x > 0.0 && x < max_x;
    let y_in_range = y > 0.0 && y < max_y;

    let x0 = (cx.floor() as usize).min(w - 1);
    let y0 = (cy.floor() as usize).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = cx - x0 as f64;
    let fy = cy - y0 as f64;

    let v00 = map.at2(y0, x0);
    let v01 = map.at2(y0, x1);
    let v10 = map.at2(y1, x0);
    let v11 = map.at2(y1, x1);

    let top = (1.0 - fx) * v00 + fx * v01;
    let bottom = (1.0 - fx) * v10 + fx * v11;
    let value = (1.0 - fy) * top + fy * bottom;

    let dx = if x_in_range {
        (1.0 - fy) * (v01 - v00) + fy * (v11 - v10)
    } else {
        0.0
    };
    let dy = if y_in_range { bottom - top } else { 0.0 };

    BilinearSample {
        value,
        dx,
        dy,
        taps: [
            (y0, x0, (1.0 - fy) * (1.0 - fx)),
            (y0, x1, (1.0 - fy) * fx),
            (y1, x0, fy * (1.0 - fx)),
            (y1, x1, fy * fx),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map2(rows: Vec<Vec<f64>>) -> Tensor {
        let h = rows.len();
        let w = rows[0].len();
        Tensor::new(vec![h, w], rows.into_iter().flatten().collect()).unwrap()
    }

    #[test]
    fn midpoint_average() {
        let m = map2(vec![vec![0.0, 1.0]]);
        assert_eq!(bilinear_sample(&m, 0.5, 0.0), 0.5);
    }

    #[test]
    fn integer_coordinates_reproduce_grid_values() {
        let m = Tensor::from_fn(vec![5, 4], |i| (i * i) as f64 * 0.37).unwrap();
        for row in 0..5 {
            for col in 0..4 {
                assert_eq!(bilinear_sample(&m, col as f64, row as f64), m.at2(row, col));
            }
        }
    }

    #[test]
    fn tensor_product_weights() {
        // Brute-force weights: (0.75*0.25)*1 + (0.25*0.25)*2 + (0.75*0.75)*3 + (0.25*0.75)*4
        let m = map2(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let v = bilinear_sample(&m, 0.25, 0.75);
        assert!((v - 2.75).abs() < 1e-15, "v = {v}");
    }

    #[test]
    fn border_clamp_replicates_edge() {
        let m = map2(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(bilinear_sample(&m, -5.0, -5.0), 1.0);
        assert_eq!(bilinear_sample(&m, 10.0, 0.0), 2.0);
        assert_eq!(bilinear_sample(&m, 0.5, 9.0), 3.5);
        // clamped coordinate -> zero coordinate gradient
        let s = bilinear_sample_detailed(&m, 10.0, 0.5);
        assert_eq!(s.dx, 0.0);
    }

    #[test]
    fn tap_weights_sum_to_one() {
        let m = Tensor::from_fn(vec![6, 7], |i| i as f64).unwrap();
        let s = bilinear_sample_detailed(&m, 3.21, 4.79);
        let total: f64 = s.taps.iter().map(|&(_, _, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
