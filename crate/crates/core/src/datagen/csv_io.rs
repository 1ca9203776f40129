//! Dataset CSV files.
//!
//! Points use the header `x,y,label`, correspondences `x1,y1,x2,y2,label`.
//! Labels are written as `1`/`0`; an empty label column on read means the
//! dataset is unlabeled.

use std::io::{Read, Write};

use thiserror::Error;

use super::{Task, TaskData};
use crate::estimators::{Correspondence, Dataset, DatasetError, Point2};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unrecognized header `{0}`")]
    Header(String),
    #[error("line {line}: {message}")]
    Field { line: u64, message: String },
    #[error("line {line}: some rows are labeled and some are not")]
    PartialLabels { line: u64 },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

const POINT_HEADER: [&str; 3] = ["x", "y", "label"];
const CORR_HEADER: [&str; 5] = ["x1", "y1", "x2", "y2", "label"];

pub fn write_dataset<W: Write>(data: &TaskData, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    let label = |labels: Option<&[bool]>, i: usize| match labels {
        Some(l) => if l[i] { "1" } else { "0" }.to_string(),
        None => String::new(),
    };
    match data {
        TaskData::Line(d) => {
            w.write_record(POINT_HEADER)?;
            for (i, p) in d.points().iter().enumerate() {
                w.write_record([p.x.to_string(), p.y.to_string(), label(d.labels(), i)])?;
            }
        }
        TaskData::Homography(d) => {
            w.write_record(CORR_HEADER)?;
            for (i, c) in d.points().iter().enumerate() {
                w.write_record([
                    c.source.x.to_string(),
                    c.source.y.to_string(),
                    c.target.x.to_string(),
                    c.target.y.to_string(),
                    label(d.labels(), i),
                ])?;
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads either layout; the task is inferred from the header. A missing
/// `label` column is accepted.
pub fn read_dataset<R: Read>(input: R) -> Result<TaskData, CsvError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let task = if header
        .iter()
        .map(String::as_str)
        .eq(POINT_HEADER[..2].iter().copied())
        || header
            .iter()
            .map(String::as_str)
            .eq(POINT_HEADER.iter().copied())
    {
        Task::Line
    } else if header
        .iter()
        .map(String::as_str)
        .eq(CORR_HEADER[..4].iter().copied())
        || header
            .iter()
            .map(String::as_str)
            .eq(CORR_HEADER.iter().copied())
    {
        Task::Homography
    } else {
        return Err(CsvError::Header(header.join(",")));
    };
    let coords = match task {
        Task::Line => 2,
        Task::Homography => 4,
    };

    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Option<bool>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(coords);
        for i in 0..coords {
            let field = rec.get(i).unwrap_or("");
            row.push(field.parse::<f64>().map_err(|_| CsvError::Field {
                line,
                message: format!("`{field}` is not a number"),
            })?);
        }
        let label = match rec.get(coords).unwrap_or("") {
            "" => None,
            "1" | "true" => Some(true),
            "0" | "false" => Some(false),
            other => {
                return Err(CsvError::Field {
                    line,
                    message: format!("`{other}` is not a label"),
                })
            }
        };
        if let Some(prev) = labels.last() {
            if prev.is_some() != label.is_some() {
                return Err(CsvError::PartialLabels { line });
            }
        }
        values.push(row);
        labels.push(label);
    }
    let labels: Option<Vec<bool>> = labels.into_iter().collect();

    Ok(match task {
        Task::Line => {
            let pts = values.iter().map(|v| Point2::new(v[0], v[1])).collect();
            TaskData::Line(with_optional_labels(pts, labels)?)
        }
        Task::Homography => {
            let cs = values
                .iter()
                .map(|v| Correspondence::new(Point2::new(v[0], v[1]), Point2::new(v[2], v[3])))
                .collect();
            TaskData::Homography(with_optional_labels(cs, labels)?)
        }
    })
}

fn with_optional_labels<O: crate::estimators::Observation>(
    obs: Vec<O>,
    labels: Option<Vec<bool>>,
) -> Result<Dataset<O>, DatasetError> {
    match labels {
        Some(l) if !obs.is_empty() => Dataset::with_labels(obs, l),
        _ => Dataset::new(obs),
    }
}
