//! File formats: numeric CSV ingest, dataset / label / knot-size CSV export
//! and a static SVG scatter plot of the first two dimensions.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::base::DataMatrix;
use crate::bench::LabeledDataset;
use crate::error::{Result, SkeletonError};
use crate::knots::KnotSet;
use crate::skeleton::SkeletonGraph;

/// Column names that mark the last column as ground truth.
pub const TRUTH_COLUMN_NAMES: [&str; 3] = ["truth", "label", "class"];

/// A rectangular numeric CSV. The first record is treated as a header when
/// any of its cells fails to parse as a number.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Option<Vec<String>>,
    pub data: DataMatrix,
}

/// How to treat the last column of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthColumn {
    /// Last column is truth iff the header names it `truth`, `label` or `class`.
    #[default]
    Auto,
    Last,
    None,
}

impl std::str::FromStr for TruthColumn {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(TruthColumn::Auto),
            "last" => Ok(TruthColumn::Last),
            "none" => Ok(TruthColumn::None),
            _ => Err(SkeletonError::invalid(format!(
                "unknown truth column mode '{s}' (expected auto, last or none)"
            ))),
        }
    }
}

/// Reads a numeric CSV. Rows and columns in error messages are 1-based and
/// count the header line, so they match what an editor shows.
pub fn read_numeric_csv<R: Read>(r: R) -> Result<NumericTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut header = None;
    let mut values = Vec::new();
    let mut cols = 0;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = line + 1;
        if line == 0 && record.iter().any(|cell| cell.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_owned).collect());
            cols = record.len();
            continue;
        }
        if cols == 0 {
            cols = record.len();
        }
        if record.len() != cols {
            return Err(SkeletonError::Ingest {
                row,
                col: record.len().min(cols) + 1,
                message: format!("expected {cols} fields, found {}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| SkeletonError::Ingest {
                row,
                col: c + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(SkeletonError::Ingest {
                    row,
                    col: c + 1,
                    message: format!("'{cell}' is not finite"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(SkeletonError::DegenerateInput("input has no data rows".into()));
    }
    Ok(NumericTable {
        header,
        data: DataMatrix::new(rows, cols, values)?,
    })
}

impl NumericTable {
    fn last_is_truth(&self, mode: TruthColumn) -> bool {
        match mode {
            TruthColumn::Last => true,
            TruthColumn::None => false,
            TruthColumn::Auto => self
                .header
                .as_ref()
                .and_then(|h| h.last())
                .is_some_and(|name| TRUTH_COLUMN_NAMES.iter().any(|t| name.eq_ignore_ascii_case(t))),
        }
    }

    /// Splits off the truth column according to `mode`.
    pub fn into_features(self, mode: TruthColumn) -> Result<(DataMatrix, Option<Vec<usize>>)> {
        if !self.last_is_truth(mode) {
            return Ok((self.data, None));
        }
        let (n, d) = (self.data.rows(), self.data.cols());
        if d < 2 {
            return Err(SkeletonError::invalid(
                "a truth column needs at least one feature column beside it",
            ));
        }
        let row_offset = usize::from(self.header.is_some()) + 1;
        let truth = (0..n)
            .map(|i| integer_label(self.data.row(i)[d - 1], i + row_offset, d))
            .collect::<Result<Vec<i64>>>()?;
        let cols: Vec<usize> = (0..d - 1).collect();
        let mut values = Vec::with_capacity(n * (d - 1));
        for row in self.data.iter_rows() {
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Ok((DataMatrix::new(n, d - 1, values)?, Some(dense_labels(&truth))))
    }

    /// The last column as integer labels.
    pub fn last_column_labels(&self) -> Result<Vec<usize>> {
        let d = self.data.cols();
        let row_offset = usize::from(self.header.is_some()) + 1;
        let raw = (0..self.data.rows())
            .map(|i| integer_label(self.data.row(i)[d - 1], i + row_offset, d))
            .collect::<Result<Vec<i64>>>()?;
        Ok(dense_labels(&raw))
    }
}

fn integer_label(v: f64, row: usize, col: usize) -> Result<i64> {
    if v.fract() != 0.0 || v.abs() > 1e15 {
        return Err(SkeletonError::Ingest {
            row,
            col,
            message: format!("label {v} is not an integer"),
        });
    }
    Ok(v as i64)
}

/// Maps arbitrary integer labels to `0..m`, ordered by value.
pub fn dense_labels(raw: &[i64]) -> Vec<usize> {
    let mut distinct: Vec<i64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let id: HashMap<i64, usize> = distinct.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    raw.iter().map(|v| id[v]).collect()
}

/// Writes `x1..xd[,truth]`. Floats use the shortest representation that
/// parses back to the same value, so a write/read cycle is lossless.
pub fn write_matrix_csv<W: Write>(data: &DataMatrix, truth: Option<&[usize]>, w: W) -> Result<()> {
    if let Some(t) = truth {
        if t.len() != data.rows() {
            return Err(SkeletonError::DimensionMismatch {
                expected: data.rows(),
                got: t.len(),
            });
        }
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=data.cols()).map(|c| format!("x{c}")).collect();
    if truth.is_some() {
        header.push("truth".into());
    }
    out.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (i, row) in data.iter_rows().enumerate() {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        if let Some(t) = truth {
            record.push(t[i].to_string());
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_dataset_csv<W: Write>(ds: &LabeledDataset, w: W) -> Result<()> {
    write_matrix_csv(&ds.data, Some(&ds.truth), w)
}

/// `index,label`, one row per observation.
pub fn write_labels_csv<W: Write>(labels: &[usize], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "label"])?;
    for (i, l) in labels.iter().enumerate() {
        out.write_record([i.to_string(), l.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `knot,size`, one row per knot; the raw material of a knot-size diagram.
pub fn write_knot_sizes_csv<W: Write>(knots: &KnotSet, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["knot", "size"])?;
    for (j, s) in knots.sizes.iter().enumerate() {
        out.write_record([j.to_string(), s.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

const PLOT_SIZE: f64 = 600.0;
const PLOT_MARGIN: f64 = 20.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Static SVG: observations in dims 1 and 2 colored by label, with the
/// skeleton edges and knots drawn on top.
pub fn write_svg_plot<W: Write>(
    data: &DataMatrix,
    labels: &[usize],
    skeleton: Option<&SkeletonGraph>,
    mut w: W,
) -> Result<()> {
    if data.cols() < 2 {
        return Err(SkeletonError::invalid("a 2-D plot needs at least two columns"));
    }
    if labels.len() != data.rows() {
        return Err(SkeletonError::DimensionMismatch {
            expected: data.rows(),
            got: labels.len(),
        });
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for r in data.iter_rows() {
        for c in 0..2 {
            lo[c] = lo[c].min(r[c]);
            hi[c] = hi[c].max(r[c]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = (PLOT_SIZE - 2.0 * PLOT_MARGIN) / span;
    let px = |x: f64| PLOT_MARGIN + (x - lo[0]) * scale;
    // SVG y grows downward
    let py = |y: f64| PLOT_SIZE - PLOT_MARGIN - (y - lo[1]) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_SIZE}" height="{PLOT_SIZE}" viewBox="0 0 {PLOT_SIZE} {PLOT_SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<g stroke="none" fill-opacity="0.6">"#);
    for (r, &l) in data.iter_rows().zip(labels) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}"/>"#,
            px(r[0]),
            py(r[1]),
            PALETTE[l % PALETTE.len()]
        );
    }
    let _ = writeln!(s, "</g>");
    if let Some(g) = skeleton {
        let _ = writeln!(s, r#"<g stroke="black" stroke-width="0.8">"#);
        for &(j, l) in &g.edges.pairs {
            let (a, b) = (g.knots.center(j), g.knots.center(l));
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                px(a[0]),
                py(a[1]),
                px(b[0]),
                py(b[1])
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<g fill="black">"#);
        for j in 0..g.k() {
            let c = g.knots.center(j);
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, px(c[0]), py(c[1]));
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    w.write_all(s.as_bytes())?;
    Ok(())
}
