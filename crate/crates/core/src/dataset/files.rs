//! Intrinsics files and 16-bit depth PNGs.

use std::fmt::Write as _;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::geometry::{CameraIntrinsics, DepthFrame};
use crate::{Error, Result};

/// Contents of an intrinsics file: pinhole parameters, the native frame
/// size, and the depth unit (millimeters per raw count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicsFile {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub depth_unit_mm_per_count: f64,
}

impl IntrinsicsFile {
    pub fn camera(&self) -> CameraIntrinsics {
        CameraIntrinsics {
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
            width: self.width,
            height: self.height,
        }
    }

    fn validate(&self, path: &Path) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::file(path, "fx and fy must be positive"));
        }
        if !(self.depth_unit_mm_per_count > 0.0) {
            return Err(Error::file(path, "depth_unit must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::file(path, "width and height must be positive"));
        }
        Ok(())
    }
}

/// Load a `key=value` intrinsics file. All seven keys are required; unknown
/// keys are rejected to catch typos.
pub fn load_intrinsics(path: &Path) -> Result<IntrinsicsFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let mut fx = None;
    let mut fy = None;
    let mut cx = None;
    let mut cy = None;
    let mut width = None;
    let mut height = None;
    let mut unit = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: format!("expected key=value, got `{line}`"),
        })?;
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let num: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("`{}` is not a number", value.trim())))?;
        match key.trim() {
            "fx" => fx = Some(num),
            "fy" => fy = Some(num),
            "cx" => cx = Some(num),
            "cy" => cy = Some(num),
            "width" => width = Some(num as usize),
            "height" => height = Some(num as usize),
            "depth_unit" => unit = Some(num),
            other => return Err(parse_err(format!("unknown key `{other}`"))),
        }
    }
    let missing = |what: &str| Error::file(path, format!("missing key `{what}`"));
    let file = IntrinsicsFile {
        fx: fx.ok_or_else(|| missing("fx"))?,
        fy: fy.ok_or_else(|| missing("fy"))?,
        cx: cx.ok_or_else(|| missing("cx"))?,
        cy: cy.ok_or_else(|| missing("cy"))?,
        width: width.ok_or_else(|| missing("width"))?,
        height: height.ok_or_else(|| missing("height"))?,
        depth_unit_mm_per_count: unit.ok_or_else(|| missing("depth_unit"))?,
    };
    file.validate(path)?;
    Ok(file)
}

pub fn save_intrinsics(path: &Path, intr: &IntrinsicsFile) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "fx={}", intr.fx);
    let _ = writeln!(s, "fy={}", intr.fy);
    let _ = writeln!(s, "cx={}", intr.cx);
    let _ = writeln!(s, "cy={}", intr.cy);
    let _ = writeln!(s, "width={}", intr.width);
    let _ = writeln!(s, "height={}", intr.height);
    let _ = writeln!(s, "depth_unit={}", intr.depth_unit_mm_per_count);
    std::fs::write(path, s).map_err(|e| Error::file(path, e))
}

/// Load a 16-bit single-channel PNG as a depth frame. Raw count 0 marks a
/// pixel with no sensor return; anything else is `count * depth_unit`
/// millimeters.
pub fn load_depth_frame(path: &Path, intrinsics: &IntrinsicsFile) -> Result<DepthFrame> {
    let img = image::open(path).map_err(|e| Error::file(path, e))?;
    let gray16 = match img {
        DynamicImage::ImageLuma16(buf) => buf,
        other => {
            return Err(Error::file(
                path,
                format!(
                    "depth files must be 16-bit single-channel PNG, got {:?}",
                    other.color()
                ),
            ))
        }
    };
    let (w, h) = (gray16.width() as usize, gray16.height() as usize);
    if w != intrinsics.width || h != intrinsics.height {
        return Err(Error::DimensionMismatch(format!(
            "{}: depth image is {w}x{h}, intrinsics declare {}x{}",
            path.display(),
            intrinsics.width,
            intrinsics.height
        )));
    }
    let mut depth_mm = Vec::with_capacity(w * h);
    let mut valid = Vec::with_capacity(w * h);
    for px in gray16.pixels() {
        let raw = px.0[0];
        valid.push(raw != 0);
        depth_mm.push(raw as f64 * intrinsics.depth_unit_mm_per_count);
    }
    DepthFrame::new(w, h, depth_mm, valid)
}

/// Write a depth frame as a 16-bit PNG. Values are divided by the unit and
/// rounded to the nearest count; invalid pixels are written as 0.
pub fn save_depth_png(path: &Path, frame: &DepthFrame, depth_unit_mm_per_count: f64) -> Result<()> {
    if !(depth_unit_mm_per_count > 0.0) {
        return Err(Error::InvalidInput("depth unit must be positive".into()));
    }
    let (w, h) = (frame.width(), frame.height());
    let mut buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            let count = if frame.valid_at(x, y) {
                let c = (frame.depth_at(x, y) / depth_unit_mm_per_count).round();
                c.clamp(0.0, u16::MAX as f64) as u16
            } else {
                0
            };
            buf.put_pixel(x as u32, y as u32, Luma([count]));
        }
    }
    buf.save(path).map_err(|e| Error::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_intrinsics() -> IntrinsicsFile {
        IntrinsicsFile {
            fx: 640.0,
            fy: 640.0,
            cx: 320.0,
            cy: 240.0,
            width: 4,
            height: 3,
            depth_unit_mm_per_count: 1.0,
        }
    }

    #[test]
    fn intrinsics_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("intrinsics.txt");
        let intr = sample_intrinsics();
        save_intrinsics(&path, &intr).unwrap();
        assert_eq!(load_intrinsics(&path).unwrap(), intr);
    }

    #[test]
    fn intrinsics_rejects_unknown_and_missing_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "fx=640\nfy=640\ncx=320\ncy=240\nwidth=4\nheight=3\n").unwrap();
        assert!(load_intrinsics(&path).is_err()); // missing depth_unit
        std::fs::write(&path, "fx=640\nfz=1\n").unwrap();
        assert!(load_intrinsics(&path).is_err()); // unknown key
    }

    #[test]
    fn depth_png_round_trip_with_unit_and_validity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("depth.png");
        let intr = IntrinsicsFile {
            depth_unit_mm_per_count: 0.25,
            ..sample_intrinsics()
        };
        // raw counts 800 -> 200 mm at unit 0.25; one invalid pixel
        let mut depth = vec![200.0; 12];
        let mut valid = vec![true; 12];
        depth[5] = 0.0;
        valid[5] = false;
        depth[7] = 250.0; // raw 1000
        let frame = DepthFrame::new(4, 3, depth, valid).unwrap();
        save_depth_png(&path, &frame, 0.25).unwrap();

        let loaded = load_depth_frame(&path, &intr).unwrap();
        assert_eq!(loaded.depth_at(0, 0), 200.0);
        assert!(!loaded.valid_at(1, 1));
        assert_eq!(loaded.depth_at(3, 1), 250.0);
        assert!(loaded.valid_at(3, 1));
    }

    #[test]
    fn wrong_bit_depth_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("depth8.png");
        let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::new(4, 3);
        buf.save(&path).unwrap();
        let err = load_depth_frame(&path, &sample_intrinsics()).unwrap_err();
        assert!(err.to_string().contains("16-bit"));
    }

    #[test]
    fn wrong_dimensions_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("depth.png");
        let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::new(8, 8);
        buf.save(&path).unwrap();
        let err = load_depth_frame(&path, &sample_intrinsics()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = load_depth_frame(Path::new("/nonexistent/depth.png"), &sample_intrinsics())
            .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/depth.png"));
    }
}
