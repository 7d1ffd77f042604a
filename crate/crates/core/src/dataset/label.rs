//! YOLO segmentation label lines: class id followed by normalized polygon
//! vertices, with an optional trailing confidence for prediction files.

use std::path::Path;

use crate::{Error, Result};

/// A normalized-polygon label.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonLabel {
    pub class_id: u32,
    /// `(u, v)` pairs in `[0, 1]`, at least three of them.
    pub vertices: Vec<(f64, f64)>,
}

impl PolygonLabel {
    pub fn new(class_id: u32, vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for &(u, v) in &vertices {
            if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidInput(format!(
                    "normalized coordinate ({u}, {v}) outside [0, 1]"
                )));
            }
        }
        Ok(Self { class_id, vertices })
    }

    /// Vertices scaled to pixel space: `(u * img_w, v * img_h)`.
    pub fn pixel_vertices(&self, img_w: usize, img_h: usize) -> Vec<(f64, f64)> {
        self.vertices
            .iter()
            .map(|&(u, v)| (u * img_w as f64, v * img_h as f64))
            .collect()
    }
}

/// A predicted polygon with its confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPolygon {
    pub label: PolygonLabel,
    pub confidence: f64,
}

fn parse_tokens(line: &str, with_confidence: bool) -> std::result::Result<(PolygonLabel, Option<f64>), String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.is_empty() {
        return Err("empty line".into());
    }
    let class_id: u32 = tokens[0]
        .parse()
        .map_err(|_| format!("class id `{}` is not a nonnegative integer", tokens[0]))?;

    let mut rest = &tokens[1..];
    let confidence = if with_confidence {
        let tok = rest
            .last()
            .ok_or_else(|| "missing confidence value".to_string())?;
        let c: f64 = tok
            .parse()
            .map_err(|_| format!("confidence `{tok}` is not a number"))?;
        if !(0.0..=1.0).contains(&c) {
            return Err(format!("confidence {c} outside [0, 1]"));
        }
        rest = &rest[..rest.len() - 1];
        Some(c)
    } else {
        None
    };

    if rest.len() % 2 != 0 {
        return Err(format!("odd coordinate count ({})", rest.len()));
    }
    if rest.len() < 6 {
        return Err(format!(
            "a polygon needs at least 3 vertices, got {}",
            rest.len() / 2
        ));
    }
    let mut vertices = Vec::with_capacity(rest.len() / 2);
    for pair in rest.chunks_exact(2) {
        let u: f64 = pair[0]
            .parse()
            .map_err(|_| format!("coordinate `{}` is not a number", pair[0]))?;
        let v: f64 = pair[1]
            .parse()
            .map_err(|_| format!("coordinate `{}` is not a number", pair[1]))?;
        if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
            return Err(format!("coordinate ({u}, {v}) outside [0, 1]"));
        }
        vertices.push((u, v));
    }
    let label = PolygonLabel::new(class_id, vertices).map_err(|e| e.to_string())?;
    Ok((label, confidence))
}

/// Parse one ground-truth label line. Returns the label and its pixel-space
/// vertices for an `img_w` x `img_h` frame.
pub fn parse_yolo_polygon_line(
    line: &str,
    img_w: usize,
    img_h: usize,
) -> std::result::Result<(PolygonLabel, Vec<(f64, f64)>), String> {
    let (label, _) = parse_tokens(line, false)?;
    let pixels = label.pixel_vertices(img_w, img_h);
    Ok((label, pixels))
}

/// Parse one prediction line: a label line with one trailing confidence.
pub fn parse_scored_polygon_line(
    line: &str,
    img_w: usize,
    img_h: usize,
) -> std::result::Result<(ScoredPolygon, Vec<(f64, f64)>), String> {
    let (label, confidence) = parse_tokens(line, true)?;
    let pixels = label.pixel_vertices(img_w, img_h);
    Ok((
        ScoredPolygon {
            label,
            confidence: confidence.unwrap(),
        },
        pixels,
    ))
}

/// Render a label back to its line form. `f64` display is shortest
/// round-trip, so `parse(format(label))` reproduces the vertices exactly.
pub fn format_polygon_line(label: &PolygonLabel) -> String {
    let mut s = label.class_id.to_string();
    for &(u, v) in &label.vertices {
        s.push(' ');
        s.push_str(&u.to_string());
        s.push(' ');
        s.push_str(&v.to_string());
    }
    s
}

fn load_lines<T>(
    path: &Path,
    mut parse: impl FnMut(&str) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line).map_err(|message| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        })?);
    }
    Ok(out)
}

/// Load every polygon of a ground-truth label file. Any malformed line is a
/// parse error with file/line diagnostics; nothing is skipped silently.
pub fn load_polygon_labels(
    path: &Path,
    img_w: usize,
    img_h: usize,
) -> Result<Vec<(PolygonLabel, Vec<(f64, f64)>)>> {
    load_lines(path, |line| parse_yolo_polygon_line(line, img_w, img_h))
}

/// Load a prediction file (label lines with trailing confidence).
pub fn load_scored_polygons(
    path: &Path,
    img_w: usize,
    img_h: usize,
) -> Result<Vec<(ScoredPolygon, Vec<(f64, f64)>)>> {
    load_lines(path, |line| parse_scored_polygon_line(line, img_w, img_h))
}
