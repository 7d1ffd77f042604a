//! Line-oriented dataset manifests.
//!
//! Format: a header `intrinsics=<path>`, then one record per line with three
//! whitespace-separated relative paths: `<rgb> <depth> <labels>`. Paths
//! containing whitespace are not supported.

use std::path::{Path, PathBuf};

use super::files::{load_intrinsics, IntrinsicsFile};
use crate::{Error, Result};

/// One dataset record with resolved paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub rgb_path: PathBuf,
    pub depth_path: PathBuf,
    pub label_path: PathBuf,
}

impl DatasetRecord {
    /// Frame identifier: the RGB file stem.
    pub fn frame_id(&self) -> String {
        self.rgb_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.rgb_path.display().to_string())
    }
}

/// Validation outcome of one manifest line. Bad records do not abort the
/// manifest: callers report them and keep processing the good ones.
pub type RecordEntry = std::result::Result<DatasetRecord, Error>;

/// A loaded manifest: shared intrinsics plus per-record entries.
#[derive(Debug)]
pub struct Manifest {
    pub intrinsics: IntrinsicsFile,
    pub records: Vec<RecordEntry>,
}

fn validate_record(record: DatasetRecord, intr: &IntrinsicsFile, line: usize) -> RecordEntry {
    for (what, path) in [
        ("rgb", &record.rgb_path),
        ("depth", &record.depth_path),
        ("labels", &record.label_path),
    ] {
        if !path.exists() {
            return Err(Error::file(
                path.clone(),
                format!("record {line}: {what} file does not exist"),
            ));
        }
    }
    let expect = (intr.width as u32, intr.height as u32);
    for (what, path) in [("rgb", &record.rgb_path), ("depth", &record.depth_path)] {
        let dims = image::image_dimensions(path).map_err(|e| Error::file(path.clone(), e))?;
        if dims != expect {
            return Err(Error::DimensionMismatch(format!(
                "record {line}: {what} file {} is {}x{} but the intrinsics declare {}x{}",
                path.display(),
                dims.0,
                dims.1,
                expect.0,
                expect.1
            )));
        }
    }
    Ok(record)
}

/// Load a manifest, resolving record paths relative to the manifest's
/// directory. The intrinsics header is mandatory; each record is eagerly
/// checked for existence and dimension agreement, with failures kept as
/// per-record errors.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::file(path, "empty manifest: missing intrinsics header"))?;
    let intr_rel = header
        .trim()
        .strip_prefix("intrinsics=")
        .ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected `intrinsics=<path>` header, got `{}`", header.trim()),
        })?;
    let intrinsics = load_intrinsics(&dir.join(intr_rel))?;

    let mut records = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            records.push(Err(Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: format!("expected `<rgb> <depth> <labels>`, got {} fields", fields.len()),
            }));
            continue;
        }
        let record = DatasetRecord {
            rgb_path: dir.join(fields[0]),
            depth_path: dir.join(fields[1]),
            label_path: dir.join(fields[2]),
        };
        records.push(validate_record(record, &intrinsics, i + 1));
    }
    Ok(Manifest {
        intrinsics,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::files::{save_depth_png, save_intrinsics};
    use crate::geometry::DepthFrame;
    use image::{ImageBuffer, Rgb};

    fn write_fixture(dir: &Path, w: usize, h: usize) {
        save_intrinsics(
            &dir.join("intrinsics.txt"),
            &IntrinsicsFile {
                fx: 640.0,
                fy: 640.0,
                cx: 320.0,
                cy: 240.0,
                width: w,
                height: h,
                depth_unit_mm_per_count: 1.0,
            },
        )
        .unwrap();
        let rgb: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::new(w as u32, h as u32);
        rgb.save(dir.join("frame.png")).unwrap();
        let frame =
            DepthFrame::new(w, h, vec![800.0; w * h], vec![true; w * h]).unwrap();
        save_depth_png(&dir.join("depth.png"), &frame, 1.0).unwrap();
        std::fs::write(dir.join("labels.txt"), "0 0.2 0.2 0.8 0.2 0.8 0.8\n").unwrap();
    }

    #[test]
    fn loads_a_valid_manifest() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), 16, 12);
        std::fs::write(
            dir.path().join("manifest.txt"),
            "intrinsics=intrinsics.txt\nframe.png depth.png labels.txt\n",
        )
        .unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.txt")).unwrap();
        assert_eq!(manifest.records.len(), 1);
        let record = manifest.records[0].as_ref().unwrap();
        assert_eq!(record.frame_id(), "frame");
    }

    #[test]
    fn empty_manifest_means_no_records() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), 8, 8);
        std::fs::write(dir.path().join("manifest.txt"), "intrinsics=intrinsics.txt\n").unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.txt")).unwrap();
        assert!(manifest.records.is_empty());
    }

    #[test]
    fn dangling_reference_is_a_record_error_only() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), 8, 8);
        std::fs::write(
            dir.path().join("manifest.txt"),
            "intrinsics=intrinsics.txt\nframe.png missing.png labels.txt\nframe.png depth.png labels.txt\n",
        )
        .unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.txt")).unwrap();
        assert_eq!(manifest.records.len(), 2);
        assert!(manifest.records[0].is_err());
        assert!(manifest.records[1].is_ok());
    }

    #[test]
    fn dimension_mismatch_cites_both_sizes() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), 640, 480);
        // overwrite depth with a smaller image
        let small = DepthFrame::new(320, 240, vec![800.0; 320 * 240], vec![true; 320 * 240])
            .unwrap();
        save_depth_png(&dir.path().join("depth.png"), &small, 1.0).unwrap();
        std::fs::write(
            dir.path().join("manifest.txt"),
            "intrinsics=intrinsics.txt\nframe.png depth.png labels.txt\n",
        )
        .unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.txt")).unwrap();
        let err = manifest.records[0].as_ref().unwrap_err().to_string();
        assert!(err.contains("320x240") && err.contains("640x480"), "{err}");
    }

    #[test]
    fn missing_manifest_is_a_file_error() {
        assert!(load_manifest(Path::new("/nonexistent/manifest.txt")).is_err());
    }
}
