//! CSV datasets, projection matrices and dumps, and JSON reports.
//!
//! CSV dialect: comma separated, one header row, one point per row. A column
//! named `label` holds one-based integer class ids (single-label); columns
//! prefixed `label_` hold 0/1 indicators (multi-label). Every other column is
//! a numeric feature.
//!
//! Reports are pretty-printed JSON with struct-order keys and every float
//! written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::dataset::{Dataset, LabeledDataset, MultiLabelDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsvSchema {
    /// `label` column if present, otherwise `label_*` columns.
    #[default]
    Detect,
    SingleLabel,
    MultiLabel,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Row numbers in diagnostics count data rows from 1 (the header is row 0).
pub fn load_csv(path: &Path, schema: CsvSchema) -> Result<Dataset> {
    let file = File::open(path).map_err(io_err(path))?;
    read_csv(file, schema).map_err(|e| match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn read_csv<R: std::io::Read>(reader: R, schema: CsvSchema) -> Result<Dataset> {
    let pseudo = Path::new("<input>");
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(pseudo, e))?
        .iter()
        .map(str::to_string)
        .collect();

    let single_col = headers.iter().position(|h| h == "label");
    let multi_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| headers[i].starts_with("label_"))
        .collect();
    let multi = match schema {
        CsvSchema::SingleLabel => false,
        CsvSchema::MultiLabel => true,
        CsvSchema::Detect => single_col.is_none() && !multi_cols.is_empty(),
    };
    if !multi && single_col.is_none() {
        return Err(Error::InvalidDataset("header has no 'label' column".into()));
    }
    if multi && multi_cols.len() < 2 {
        return Err(Error::InvalidDataset(
            "multi-label header needs at least two 'label_' columns".into(),
        ));
    }
    let is_label = |i: usize| {
        if multi {
            multi_cols.contains(&i)
        } else {
            Some(i) == single_col
        }
    };
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| !is_label(i)).collect();
    if feature_cols.is_empty() {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let mut columns: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut indicator = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| csv_err(pseudo, e))?;
        if record.len() != headers.len() {
            return Err(Error::RowLengthMismatch {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for &c in &feature_cols {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                row,
                column: headers[c].clone(),
                value: cell.to_string(),
            })?;
            columns.push(v);
        }
        if multi {
            let mut bits = Vec::with_capacity(multi_cols.len());
            for &c in &multi_cols {
                let bit = match &record[c] {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(Error::MalformedIndicator {
                            row,
                            column: headers[c].clone(),
                            value: other.to_string(),
                        })
                    }
                };
                bits.push(bit);
            }
            if !bits.iter().any(|&b| b) {
                return Err(Error::UnlabeledRow { row });
            }
            indicator.push(bits);
        } else {
            let c = single_col.expect("single-label column");
            let cell = &record[c];
            if cell.is_empty() {
                return Err(Error::MissingLabel {
                    row,
                    column: headers[c].clone(),
                });
            }
            let id: usize = match cell.parse() {
                Ok(v) if v >= 1 => v,
                _ => {
                    return Err(Error::InvalidLabel {
                        row,
                        value: cell.to_string(),
                    })
                }
            };
            labels.push(id - 1);
        }
    }

    let n = if multi { indicator.len() } else { labels.len() };
    let features = DMatrix::from_column_slice(feature_cols.len(), n, &columns);
    if multi {
        for (j, &c) in multi_cols.iter().enumerate() {
            if !indicator.iter().any(|row| row[j]) {
                return Err(Error::EmptyClass {
                    class: headers[c].clone(),
                });
            }
        }
        MultiLabelDataset::new(features, indicator).map(Dataset::Multi)
    } else {
        LabeledDataset::from_labels(features, labels).map(Dataset::Single)
    }
}

fn label_header(dataset: &Dataset) -> Vec<String> {
    match dataset {
        Dataset::Single(_) => vec!["label".to_string()],
        Dataset::Multi(d) => (1..=d.class_count()).map(|k| format!("label_{k}")).collect(),
    }
}

fn label_cells(dataset: &Dataset, i: usize) -> Vec<String> {
    match dataset {
        Dataset::Single(d) => vec![(d.labels()[i] + 1).to_string()],
        Dataset::Multi(d) => d.indicator()[i]
            .iter()
            .map(|&b| if b { "1" } else { "0" }.to_string())
            .collect(),
    }
}

fn write_rows(
    path: &Path,
    header: Vec<String>,
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn fmt_cell(v: f64) -> String {
    format!("{v:?}")
}

/// Writes features as `f_1..f_p` followed by the label column(s).
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let x = dataset.features();
    let mut header: Vec<String> = (1..=x.nrows()).map(|j| format!("f_{j}")).collect();
    header.extend(label_header(dataset));
    write_rows(
        path,
        header,
        (0..x.ncols()).map(|i| {
            let mut row: Vec<String> = x.column(i).iter().map(|&v| fmt_cell(v)).collect();
            row.extend(label_cells(dataset, i));
            row
        }),
    )
}

/// Projected coordinates `G^T x_i` as `dim_1..dim_k` plus the label column(s).
pub fn dump_projection(dataset: &Dataset, map: &DMatrix<f64>, path: &Path) -> Result<()> {
    if map.nrows() != dataset.dim() {
        return Err(Error::LengthMismatch {
            what: "projection rows vs feature dimension",
            left: map.nrows(),
            right: dataset.dim(),
        });
    }
    let projected = map.transpose() * dataset.features();
    let mut header: Vec<String> = (1..=map.ncols()).map(|j| format!("dim_{j}")).collect();
    header.extend(label_header(dataset));
    write_rows(
        path,
        header,
        (0..projected.ncols()).map(|i| {
            let mut row: Vec<String> = projected.column(i).iter().map(|&v| fmt_cell(v)).collect();
            row.extend(label_cells(dataset, i));
            row
        }),
    )
}

/// A `p x k` matrix as CSV with header `g_1..g_k`, one row per input dimension.
pub fn write_matrix(matrix: &DMatrix<f64>, path: &Path) -> Result<()> {
    let header = (1..=matrix.ncols()).map(|j| format!("g_{j}")).collect();
    write_rows(
        path,
        header,
        matrix
            .row_iter()
            .map(|r| r.iter().map(|&v| fmt_cell(v)).collect()),
    )
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let cols = headers.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() != cols {
            return Err(Error::RowLengthMismatch {
                row: r + 1,
                expected: cols,
                found: record.len(),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            values.push(cell.parse::<f64>().map_err(|_| Error::NonNumericCell {
                row: r + 1,
                column: headers[c].clone(),
                value: cell.to_string(),
            })?);
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

/// Pretty JSON that prints every float with 17 significant digits.
struct ReportFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_object_value(w)
    }
}

pub fn report_to_string<T: Serialize>(report: &T) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = ReportFormatter {
        inner: serde_json::ser::PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    report
        .serialize(&mut ser)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn write_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let text = report_to_string(report)?;
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))
}
