//! Measurement-error reports: real vs. predicted perimeter and depth.

use std::fmt;

/// One real/predicted measurement pair, in centimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPair {
    pub real_perimeter_cm: f64,
    pub real_depth_cm: f64,
    pub predicted_perimeter_cm: f64,
    pub predicted_depth_cm: f64,
}

/// A report row; differences are `predicted - real`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementErrorRow {
    pub real_perimeter_cm: f64,
    pub real_depth_cm: f64,
    pub predicted_perimeter_cm: f64,
    pub predicted_depth_cm: f64,
    pub diff_perimeter_cm: f64,
    pub diff_depth_cm: f64,
}

/// Rows plus summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementReport {
    pub rows: Vec<MeasurementErrorRow>,
    pub mean_abs_diff_perimeter_cm: f64,
    pub mean_abs_diff_depth_cm: f64,
}

/// Signed differences and per-column mean absolute difference.
pub fn measurement_report(pairs: &[MeasurementPair]) -> MeasurementReport {
    let rows: Vec<MeasurementErrorRow> = pairs
        .iter()
        .map(|p| MeasurementErrorRow {
            real_perimeter_cm: p.real_perimeter_cm,
            real_depth_cm: p.real_depth_cm,
            predicted_perimeter_cm: p.predicted_perimeter_cm,
            predicted_depth_cm: p.predicted_depth_cm,
            diff_perimeter_cm: p.predicted_perimeter_cm - p.real_perimeter_cm,
            diff_depth_cm: p.predicted_depth_cm - p.real_depth_cm,
        })
        .collect();
    let n = rows.len().max(1) as f64;
    MeasurementReport {
        mean_abs_diff_perimeter_cm: rows.iter().map(|r| r.diff_perimeter_cm.abs()).sum::<f64>() / n,
        mean_abs_diff_depth_cm: rows.iter().map(|r| r.diff_depth_cm.abs()).sum::<f64>() / n,
        rows,
    }
}

impl MeasurementReport {
    /// Machine-readable CSV, one row per instance, one decimal place in cm.
    pub fn to_delimited(&self) -> String {
        let mut s = String::from(
            "real_perimeter_cm,real_depth_cm,predicted_perimeter_cm,predicted_depth_cm,diff_perimeter_cm,diff_depth_cm\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:.1},{:.1},{:.1},{:.1},{:+.1},{:+.1}\n",
                r.real_perimeter_cm,
                r.real_depth_cm,
                r.predicted_perimeter_cm,
                r.predicted_depth_cm,
                r.diff_perimeter_cm,
                r.diff_depth_cm
            ));
        }
        s
    }
}

impl fmt::Display for MeasurementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>10} {:>8} | {:>10} {:>8} | {:>8} {:>8}",
            "real perim", "depth", "pred perim", "depth", "d perim", "d depth"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>10.1} {:>8.1} | {:>10.1} {:>8.1} | {:>+8.1} {:>+8.1}",
                r.real_perimeter_cm,
                r.real_depth_cm,
                r.predicted_perimeter_cm,
                r.predicted_depth_cm,
                r.diff_perimeter_cm,
                r.diff_depth_cm
            )?;
        }
        writeln!(
            f,
            "mean |diff|: perimeter {:.2} cm, depth {:.2} cm",
            self.mean_abs_diff_perimeter_cm, self.mean_abs_diff_depth_cm
        )
    }
}

#[cfg(test)]
const FIELD_ROWS: [MeasurementPair; 5] = [
    MeasurementPair {
        real_perimeter_cm: 127.6,
        real_depth_cm: 6.2,
        predicted_perimeter_cm: 125.1,
        predicted_depth_cm: 6.0,
    },
    MeasurementPair {
        real_perimeter_cm: 96.3,
        real_depth_cm: 4.8,
        predicted_perimeter_cm: 97.9,
        predicted_depth_cm: 5.0,
    },
    MeasurementPair {
        real_perimeter_cm: 104.2,
        real_depth_cm: 5.5,
        predicted_perimeter_cm: 101.7,
        predicted_depth_cm: 5.3,
    },
    MeasurementPair {
        real_perimeter_cm: 88.5,
        real_depth_cm: 3.9,
        predicted_perimeter_cm: 90.2,
        predicted_depth_cm: 4.2,
    },
    MeasurementPair {
        real_perimeter_cm: 144.8,
        real_depth_cm: 5.4,
        predicted_perimeter_cm: 141.6,
        predicted_depth_cm: 5.7,
    },
];
