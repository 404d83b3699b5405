//! Dataset and model files: CSV (label in the last column) and IDX image/label pairs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Dataset, KernelModel};
use crate::error::{Error, Result};
use crate::operators::DenseMatrix;

/// Maps raw IDX class codes to `±1`. Samples with other codes are an error
/// unless `skip_unmapped` is set, in which case they are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMapping {
    pub negative: u8,
    pub positive: u8,
    pub skip_unmapped: bool,
}

impl Default for LabelMapping {
    /// Digit 8 is the negative class and digit 9 the positive one.
    fn default() -> Self {
        Self {
            negative: 8,
            positive: 9,
            skip_unmapped: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    /// `path` names the image file; the label file is given here.
    IdxPair {
        labels: PathBuf,
        mapping: LabelMapping,
    },
}

pub fn load_dataset(path: impl AsRef<Path>, format: &DatasetFormat) -> Result<Dataset> {
    let path = path.as_ref();
    match format {
        DatasetFormat::Csv => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_csv(&text).map_err(|m| Error::format(path, m))
        }
        DatasetFormat::IdxPair { labels, mapping } => {
            let images = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let raw_labels = std::fs::read(labels).map_err(|e| Error::io(labels, e))?;
            let (dims, pixels) = parse_idx(&images, 0x0803).map_err(|m| Error::format(path, m))?;
            let (ldims, codes) =
                parse_idx(&raw_labels, 0x0801).map_err(|m| Error::format(labels, m))?;
            if ldims[0] != dims[0] {
                return Err(Error::format(
                    labels,
                    format!("{} labels for {} images", ldims[0], dims[0]),
                ));
            }
            let d = dims[1] * dims[2];
            let mut data = Vec::new();
            let mut ys = Vec::new();
            for (i, &code) in codes.iter().enumerate() {
                let y = if code == mapping.negative {
                    -1.0
                } else if code == mapping.positive {
                    1.0
                } else if mapping.skip_unmapped {
                    continue;
                } else {
                    return Err(Error::format(
                        labels,
                        format!("item {i}: label {code} is not mapped"),
                    ));
                };
                ys.push(y);
                data.extend(pixels[i * d..(i + 1) * d].iter().map(|&p| p as f64));
            }
            if ys.is_empty() {
                return Err(Error::format(labels, "no samples with a mapped label"));
            }
            Dataset::new(DenseMatrix::from_row_major(ys.len(), d, data)?, ys)
        }
    }
}

fn parse_csv(text: &str) -> std::result::Result<Dataset, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(format!(
                "line {lineno}: need at least one feature and a label"
            ));
        }
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            values.push(
                f.parse::<f64>()
                    .map_err(|_| format!("line {lineno}: '{f}' is not a number"))?,
            );
        }
        let y = values.pop().expect("at least two fields");
        if y != 1.0 && y != -1.0 {
            return Err(format!("line {lineno}: label {y} is not +1 or -1"));
        }
        if let Some(first) = rows.first() {
            if first.len() != values.len() {
                return Err(format!(
                    "line {lineno}: {} features, expected {}",
                    values.len(),
                    first.len()
                ));
            }
        }
        rows.push(values);
        labels.push(y);
    }
    if rows.is_empty() {
        return Err("no samples".into());
    }
    Dataset::from_rows(&rows, labels).map_err(|e| e.to_string())
}

/// Returns the dimensions and the raw `u8` payload of an IDX file with the given magic.
fn parse_idx(bytes: &[u8], magic: u32) -> std::result::Result<(Vec<usize>, &[u8]), String> {
    let be = |at: usize| -> std::result::Result<u32, String> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| "truncated header".to_string())
    };
    let found = be(0)?;
    if found != magic {
        return Err(format!("magic {found:#010x}, expected {magic:#010x}"));
    }
    let ndims = (magic & 0xff) as usize;
    let dims: Vec<usize> = (0..ndims)
        .map(|k| be(4 + 4 * k).map(|v| v as usize))
        .collect::<std::result::Result<_, _>>()?;
    let start = 4 + 4 * ndims;
    let count: usize = dims.iter().product();
    let body = bytes.get(start..start + count).ok_or_else(|| {
        format!(
            "payload has {} bytes, expected {count}",
            bytes.len().saturating_sub(start)
        )
    })?;
    Ok((dims, body))
}

/// `σ`, `C`, then one coefficient per line.
pub fn write_model_csv(path: impl AsRef<Path>, model: &KernelModel) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "{:.16e}", model.kernel_sigma);
    let _ = writeln!(out, "{:.16e}", model.c);
    for c in &model.coefficients {
        let _ = writeln!(out, "{c:.16e}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads `(σ, C, coefficients)` written by [`write_model_csv`].
pub fn read_model_csv(path: impl AsRef<Path>) -> Result<(f64, f64, Vec<f64>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let v = line
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::format(path, format!("line {}: not a number", i + 1)))?;
        values.push(v);
    }
    if values.len() < 2 {
        return Err(Error::format(path, "missing sigma or C"));
    }
    let coeffs = values.split_off(2);
    Ok((values[0], values[1], coeffs))
}
