//! Moore-neighbor boundary tracing and the metric perimeter.
//!
//! Each 8-connected component of a mask produces one chain: the clockwise
//! walk of its outer boundary starting from the top-most, then left-most
//! member pixel. The tracer keeps `(pixel, backtrack)` states and stops when
//! a state repeats, which terminates on every shape including one-pixel-thin
//! lines where the classic entered-from-the-same-direction rule can spin.

use std::collections::HashMap;

use super::mask::InstanceMask;

/// Clockwise Moore ring in image coordinates (x right, y down), starting
/// north: N, NE, E, SE, S, SW, W, NW.
const RING: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Ordered boundary pixels of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryChain {
    /// `(x, y)` pixel coordinates; consecutive points are 8-neighbors.
    pub points: Vec<(usize, usize)>,
    /// Whether the chain wraps around (always true for traced components;
    /// a one-point chain is trivially closed).
    pub closed: bool,
}

impl BoundaryChain {
    /// Check the structural invariants: consecutive points are 8-neighbors
    /// (Chebyshev distance exactly 1, which also rules out consecutive
    /// duplicates), and a closed chain wraps with distance 1.
    pub fn is_well_formed(&self) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let cheby = |a: (usize, usize), b: (usize, usize)| -> u64 {
            let dx = (a.0 as i64 - b.0 as i64).unsigned_abs();
            let dy = (a.1 as i64 - b.1 as i64).unsigned_abs();
            dx.max(dy)
        };
        for pair in self.points.windows(2) {
            if cheby(pair[0], pair[1]) != 1 {
                return false;
            }
        }
        if self.closed && self.points.len() >= 2 {
            let first = self.points[0];
            let last = *self.points.last().unwrap();
            if cheby(first, last) != 1 {
                return false;
            }
        }
        true
    }
}

type State = ((i64, i64), (i64, i64)); // (pixel, backtrack)

/// One clockwise step: scan the Moore ring of `p` starting just after the
/// backtrack `b`; the first member pixel becomes the new current pixel and
/// the ring cell scanned right before it the new backtrack.
fn step(mask: &InstanceMask, (p, b): State) -> Option<State> {
    let start = RING
        .iter()
        .position(|&(dx, dy)| (p.0 + dx, p.1 + dy) == b)
        .expect("backtrack must be a Moore neighbor of the current pixel");
    for k in 1..=8 {
        let (dx, dy) = RING[(start + k) % 8];
        let cand = (p.0 + dx, p.1 + dy);
        if mask.get_signed(cand.0, cand.1) {
            let (px, py) = RING[(start + k + 7) % 8];
            return Some((cand, (p.0 + px, p.1 + py)));
        }
    }
    None
}

/// Trace one component from its raster-first pixel `(sx, sy)`. The pixel to
/// the west is guaranteed background (or out of image) by the raster order.
fn trace_component(mask: &InstanceMask, sx: usize, sy: usize) -> Vec<(usize, usize)> {
    let start = (sx as i64, sy as i64);
    let s0: State = (start, (start.0 - 1, start.1));

    let mut states: Vec<State> = vec![s0];
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(s0, 0);

    let cycle_start = loop {
        let next = match step(mask, *states.last().unwrap()) {
            Some(next) => next,
            None => return vec![(sx, sy)], // isolated pixel
        };
        if let Some(&k) = seen.get(&next) {
            break k;
        }
        seen.insert(next, states.len());
        states.push(next);
    };

    // The repeating suffix is the boundary cycle; rotate it so the chain
    // starts at the raster-first pixel (which every outer cycle contains).
    let mut cycle: Vec<(i64, i64)> = states[cycle_start..].iter().map(|&(p, _)| p).collect();
    let offset = cycle
        .iter()
        .position(|&p| p == start)
        .expect("outer boundary cycle must contain the start pixel");
    cycle.rotate_left(offset);
    cycle
        .into_iter()
        .map(|(x, y)| (x as usize, y as usize))
        .collect()
}

/// Trace the outer boundary of every 8-connected component, in raster order
/// of their first pixels. An empty mask yields an empty list.
pub fn trace_boundary(mask: &InstanceMask) -> Vec<BoundaryChain> {
    let (w, h) = (mask.width(), mask.height());
    let mut component = vec![usize::MAX; w * h];
    let mut chains = Vec::new();
    let mut queue = Vec::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || component[y * w + x] != usize::MAX {
                continue;
            }
            let id = chains.len();
            component[y * w + x] = id;
            queue.push((x as i64, y as i64));
            while let Some((cx, cy)) = queue.pop() {
                for &(dx, dy) in &RING {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if mask.get_signed(nx, ny)
                        && component[ny as usize * w + nx as usize] == usize::MAX
                    {
                        component[ny as usize * w + nx as usize] = id;
                        queue.push((nx, ny));
                    }
                }
            }
            chains.push(BoundaryChain {
                points: trace_component(mask, x, y),
                closed: true,
            });
        }
    }
    chains
}

/// Perimeter closure mode. The printed summation runs over `n - 1` segments
/// (open polyline); a region outline is semantically closed, so closed is
/// the default and open is kept for like-for-like comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerimeterMode {
    #[default]
    Closed,
    Open,
}

/// Metric perimeter of a chain:
/// `L = sum_i sqrt(((x_{i+1}-x_i) * s_x)^2 + ((y_{i+1}-y_i) * s_y)^2)`,
/// with the wrap-around segment appended in closed mode. A one-point chain
/// has zero length.
pub fn boundary_perimeter(chain: &BoundaryChain, s_x: f64, s_y: f64, mode: PerimeterMode) -> f64 {
    let pts = &chain.points;
    if pts.len() < 2 {
        return 0.0;
    }
    let seg = |a: (usize, usize), b: (usize, usize)| {
        let dx = (b.0 as f64 - a.0 as f64) * s_x;
        let dy = (b.1 as f64 - a.1 as f64) * s_y;
        (dx * dx + dy * dy).sqrt()
    };
    let mut total: f64 = pts.windows(2).map(|p| seg(p[0], p[1])).sum();
    if mode == PerimeterMode::Closed {
        total += seg(*pts.last().unwrap(), pts[0]);
    }
    total
}
