//! Synthetic RGB-D scenes with analytically known pothole geometry.
//!
//! A scene is a flat plane at a fixed depth with circular or elliptical
//! depressions, optional per-pixel Gaussian noise, and a constant
//! camera-height offset added to every depth. Because the footprints,
//! depressions, and pinhole scale are all known in closed form, generated
//! scenes serve as an independent end-to-end oracle for the measurement
//! pipeline.
//!
//! `write_scene_dataset` emits scenes in the exact dataset formats (depth
//! PNG, label file, intrinsics, manifest), so a synthetic set is a drop-in
//! dataset.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{
    format_polygon_line, save_depth_png, save_intrinsics, IntrinsicsFile, PolygonLabel,
};
use crate::geometry::{trace_boundary, CameraIntrinsics, DepthFrame, InstanceMask};
use crate::{Error, Result};

/// Shape of the depression inside a footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepressionProfile {
    /// Uniform depression: the whole footprint sits exactly
    /// `depression_mm` below the plane, making the analytic depth exact.
    #[default]
    FlatBottom,
    /// Bowl shape `depression * sqrt(1 - u^2)` in the normalized radial
    /// coordinate; exercises the percentile statistic.
    SphericalCap,
}

/// One pothole of a scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotholeSpec {
    /// Center in pixel coordinates.
    pub center: (f64, f64),
    /// Semi-axes in pixels (equal for a circle), each >= 2.
    pub radii: (f64, f64),
    /// Maximum depression below the plane, millimeters.
    pub depression_mm: f64,
    pub profile: DepressionProfile,
}

impl PotholeSpec {
    pub fn circle(cx: f64, cy: f64, r: f64, depression_mm: f64) -> Self {
        Self {
            center: (cx, cy),
            radii: (r, r),
            depression_mm,
            profile: DepressionProfile::FlatBottom,
        }
    }

    /// Normalized squared radial coordinate of a point.
    fn radial_sq(&self, px: f64, py: f64) -> f64 {
        let dx = (px - self.center.0) / self.radii.0;
        let dy = (py - self.center.1) / self.radii.1;
        dx * dx + dy * dy
    }

    fn depression_at(&self, px: f64, py: f64) -> f64 {
        let r2 = self.radial_sq(px, py);
        if r2 > 1.0 {
            return 0.0;
        }
        match self.profile {
            DepressionProfile::FlatBottom => self.depression_mm,
            DepressionProfile::SphericalCap => self.depression_mm * (1.0 - r2).sqrt(),
        }
    }

    /// Footprint: pixels whose centers fall inside the ellipse.
    fn footprint(&self, width: usize, height: usize) -> InstanceMask {
        InstanceMask::from_fn(width, height, |x, y| {
            self.radial_sq(x as f64 + 0.5, y as f64 + 0.5) <= 1.0
        })
    }
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub plane_depth_mm: f64,
    pub potholes: Vec<PotholeSpec>,
    /// Standard deviation of per-pixel Gaussian depth noise; 0 disables it.
    pub noise_sigma_mm: f64,
    /// Constant offset added to every depth, modeling camera-height change.
    pub camera_jitter_mm: f64,
    pub rng_seed: u64,
    /// Camera model used for the metric truth values.
    pub intrinsics: CameraIntrinsics,
}

impl SceneSpec {
    fn validate(&self) -> Result<()> {
        if !(self.plane_depth_mm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "plane depth must be positive, got {}",
                self.plane_depth_mm
            )));
        }
        if self.noise_sigma_mm < 0.0 {
            return Err(Error::InvalidInput("noise sigma must be nonnegative".into()));
        }
        for (i, p) in self.potholes.iter().enumerate() {
            if p.radii.0 < 2.0 || p.radii.1 < 2.0 {
                return Err(Error::InvalidInput(format!(
                    "pothole {i}: radii must be >= 2 px, got {:?}",
                    p.radii
                )));
            }
            let inside = p.center.0 - p.radii.0 >= 0.0
                && p.center.1 - p.radii.1 >= 0.0
                && p.center.0 + p.radii.0 <= self.width as f64
                && p.center.1 + p.radii.1 <= self.height as f64;
            if !inside {
                return Err(Error::InvalidInput(format!(
                    "pothole {i} does not lie fully inside the {}x{} frame",
                    self.width, self.height
                )));
            }
        }
        Ok(())
    }
}

/// Analytic ground truth for one pothole.
#[derive(Debug, Clone)]
pub struct PotholeTruth {
    /// `2*pi*sqrt((a^2 + b^2) / 2)` for metric semi-axes `a`, `b` evaluated
    /// at the plane depth; reduces to the exact `2*pi*r*scale` for circles.
    pub perimeter_mm: f64,
    /// The depression value (exact for flat-bottom profiles).
    pub depth_mm: f64,
    /// Exact membership mask of the footprint.
    pub mask: InstanceMask,
}

/// Ground truth of a generated scene.
#[derive(Debug, Clone)]
pub struct SceneTruth {
    pub potholes: Vec<PotholeTruth>,
}

/// Render a scene: the depth frame, one exact footprint mask per pothole,
/// and the analytic truth. Deterministic given the seed.
pub fn generate_scene(spec: &SceneSpec) -> Result<(DepthFrame, Vec<InstanceMask>, SceneTruth)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);

    let masks: Vec<InstanceMask> = spec.potholes.iter().map(|p| p.footprint(w, h)).collect();
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            let disjoint = masks[i]
                .pixels()
                .iter()
                .zip(masks[j].pixels())
                .all(|(&a, &b)| !(a && b));
            if !disjoint {
                return Err(Error::InvalidInput(format!(
                    "pothole footprints {i} and {j} overlap; truth would be ambiguous"
                )));
            }
        }
    }

    let mut depth = vec![spec.plane_depth_mm; w * h];
    for p in &spec.potholes {
        // Only the bounding box of the footprint can be affected.
        let x0 = (p.center.0 - p.radii.0).floor().max(0.0) as usize;
        let x1 = ((p.center.0 + p.radii.0).ceil() as usize).min(w);
        let y0 = (p.center.1 - p.radii.1).floor().max(0.0) as usize;
        let y1 = ((p.center.1 + p.radii.1).ceil() as usize).min(h);
        for y in y0..y1 {
            for x in x0..x1 {
                depth[y * w + x] += p.depression_at(x as f64 + 0.5, y as f64 + 0.5);
            }
        }
    }

    if spec.noise_sigma_mm > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        let normal = Normal::new(0.0, spec.noise_sigma_mm)
            .map_err(|e| Error::InvalidInput(format!("bad noise sigma: {e}")))?;
        for v in depth.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }

    // Jitter last, as a single addition, so two scenes differing only in
    // jitter differ by exactly that constant in every pixel.
    for v in depth.iter_mut() {
        *v += spec.camera_jitter_mm;
    }

    let frame = DepthFrame::new(w, h, depth, vec![true; w * h])?;
    let s_x = spec.plane_depth_mm / spec.intrinsics.fx;
    let s_y = spec.plane_depth_mm / spec.intrinsics.fy;
    let truth = SceneTruth {
        potholes: spec
            .potholes
            .iter()
            .zip(&masks)
            .map(|(p, mask)| {
                let a = p.radii.0 * s_x;
                let b = p.radii.1 * s_y;
                PotholeTruth {
                    perimeter_mm: TAU * ((a * a + b * b) / 2.0).sqrt(),
                    depth_mm: p.depression_mm,
                    mask: mask.clone(),
                }
            })
            .collect(),
    };
    Ok((frame, masks, truth))
}

/// Ramanujan's second approximation of the ellipse perimeter:
/// `pi (a + b) (1 + 3h / (10 + sqrt(4 - 3h)))` with
/// `h = ((a - b) / (a + b))^2`. Exact for circles; far below one part in
/// 1e6 of the true value for the aspect ratios used here.
pub fn ellipse_perimeter_reference(a_mm: f64, b_mm: f64) -> f64 {
    assert!(a_mm > 0.0 && b_mm > 0.0, "semi-axes must be positive");
    let h = ((a_mm - b_mm) / (a_mm + b_mm)).powi(2);
    PI * (a_mm + b_mm) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()))
}

/// Polygon approximation of a footprint boundary for the label file.
fn footprint_polygon(p: &PotholeSpec, w: usize, h: usize) -> PolygonLabel {
    const SIDES: usize = 72;
    let vertices = (0..SIDES)
        .map(|i| {
            let t = i as f64 / SIDES as f64 * TAU;
            (
                (p.center.0 + p.radii.0 * t.cos()) / w as f64,
                (p.center.1 + p.radii.1 * t.sin()) / h as f64,
            )
        })
        .collect();
    PolygonLabel::new(0, vertices).expect("footprint polygon is inside the frame")
}

/// Write scenes to `dir` in the dataset formats and return the manifest
/// path. All scenes must share frame size and intrinsics. The RGB images
/// are flat gray with the footprint outlines overlaid.
pub fn write_scene_dataset(dir: &Path, scenes: &[SceneSpec]) -> Result<PathBuf> {
    let first = scenes
        .first()
        .ok_or_else(|| Error::InvalidInput("no scenes to write".into()))?;
    for s in scenes {
        if (s.width, s.height) != (first.width, first.height) || s.intrinsics != first.intrinsics {
            return Err(Error::InvalidInput(
                "all scenes in one dataset must share frame size and intrinsics".into(),
            ));
        }
    }
    for sub in ["rgb", "depth", "labels"] {
        std::fs::create_dir_all(dir.join(sub)).map_err(|e| Error::file(dir.join(sub), e))?;
    }
    let intr = IntrinsicsFile {
        fx: first.intrinsics.fx,
        fy: first.intrinsics.fy,
        cx: first.intrinsics.cx,
        cy: first.intrinsics.cy,
        width: first.width,
        height: first.height,
        depth_unit_mm_per_count: 1.0,
    };
    save_intrinsics(&dir.join("intrinsics.txt"), &intr)?;

    let mut manifest = String::from("intrinsics=intrinsics.txt\n");
    for (i, spec) in scenes.iter().enumerate() {
        let name = format!("scene_{i:04}");
        let (frame, masks, _) = generate_scene(spec)?;

        save_depth_png(&dir.join(format!("depth/{name}.png")), &frame, 1.0)?;

        let mut rgb = image::RgbImage::from_pixel(
            spec.width as u32,
            spec.height as u32,
            image::Rgb([128, 128, 128]),
        );
        for mask in &masks {
            for chain in trace_boundary(mask) {
                for (x, y) in chain.points {
                    rgb.put_pixel(x as u32, y as u32, image::Rgb([220, 40, 40]));
                }
            }
        }
        let rgb_path = dir.join(format!("rgb/{name}.png"));
        rgb.save(&rgb_path)
            .map_err(|e| Error::file(rgb_path.clone(), e))?;

        let labels: String = spec
            .potholes
            .iter()
            .map(|p| format_polygon_line(&footprint_polygon(p, spec.width, spec.height)) + "\n")
            .collect();
        std::fs::write(dir.join(format!("labels/{name}.txt")), labels)
            .map_err(|e| Error::file(dir.join(format!("labels/{name}.txt")), e))?;

        manifest.push_str(&format!(
            "rgb/{name}.png depth/{name}.png labels/{name}.txt\n"
        ));
    }
    let manifest_path = dir.join("manifest.txt");
    std::fs::write(&manifest_path, manifest).map_err(|e| Error::file(manifest_path.clone(), e))?;
    Ok(manifest_path)
}
