//! Labeled samples and their CSV form.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature vector with a binary label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: u8,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: u8) -> Self {
        Self { x, y }
    }
}

/// Immutable training or test sample. Coordinates are stored row-major in a
/// single buffer; insertion order is preserved and is the "original index"
/// used to break distance ties.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    /// An empty dataset of the given dimension.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim: dim.max(1),
            coords: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyDataset)?.x.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("feature vectors must be non-empty".into()));
        }
        let mut data = Self {
            dim,
            coords: Vec::with_capacity(points.len() * dim),
            labels: Vec::with_capacity(points.len()),
        };
        for (index, p) in points.into_iter().enumerate() {
            if p.x.len() != dim {
                return Err(Error::MixedDimensions {
                    expected: dim,
                    found: p.x.len(),
                    index,
                });
            }
            if p.y > 1 {
                return Err(Error::BadLabel {
                    label: p.y as i64,
                    index,
                });
            }
            if p.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
            data.coords.extend_from_slice(&p.x);
            data.labels.push(p.y);
        }
        Ok(data)
    }

    /// Builds a dataset from raw vectors and integer labels.
    pub fn from_raw<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, i64)>,
    {
        let points = points
            .into_iter()
            .enumerate()
            .map(|(index, (x, label))| match label {
                0 | 1 => Ok(LabeledPoint::new(x, label as u8)),
                _ => Err(Error::BadLabel { label, index }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Fast path for generators: pushes a point without re-validating the
    /// label range (callers produce labels in {0,1}).
    pub(crate) fn with_capacity(dim: usize, n: usize) -> Self {
        Self {
            dim,
            coords: Vec::with_capacity(dim * n),
            labels: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(&mut self, x: &[f64], y: u8) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert!(y <= 1);
        self.coords.extend_from_slice(x);
        self.labels.push(y);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> LabeledPoint {
        LabeledPoint::new(self.x(i).to_vec(), self.y(i))
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], u8)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.labels.iter().copied())
    }

    /// Concatenation of two datasets of the same dimension.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        out.coords.extend_from_slice(&other.coords);
        out.labels.extend_from_slice(&other.labels);
        Ok(out)
    }

    /// Same features with every label replaced by `label`.
    pub fn relabeled(&self, label: u8) -> Dataset {
        Dataset {
            dim: self.dim,
            coords: self.coords.clone(),
            labels: vec![label; self.labels.len()],
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        writeln!(out, "{},y", header.join(","))?;
        for (x, y) in self.points() {
            let row: Vec<String> = x.iter().map(|v| format_float(*v)).collect();
            writeln!(out, "{},{}", row.join(","), y)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })??;
        let columns: Vec<&str> = header.trim().split(',').collect();
        let dim = columns.len().saturating_sub(1);
        let expected: Vec<String> = (1..=dim).map(|j| format!("x{j}")).collect();
        if dim == 0 || columns[dim] != "y" || columns[..dim] != expected[..] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header x1,...,xd,y; got `{header}`"),
            });
        }
        let mut data = Dataset::empty(dim);
        for (offset, line) in lines.enumerate() {
            let line = line?;
            let lineno = offset + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim + 1 {
                return Err(Error::MixedDimensions {
                    expected: dim,
                    found: fields.len().saturating_sub(1),
                    index: data.len(),
                });
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let x = fields[..dim]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| parse_err(format!("`{f}`: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index: data.len() });
            }
            let label: i64 = fields[dim]
                .parse()
                .map_err(|e| parse_err(format!("label `{}`: {e}", fields[dim])))?;
            if !(0..=1).contains(&label) {
                return Err(Error::BadLabel {
                    label,
                    index: data.len(),
                });
            }
            data.push(&x, label as u8);
        }
        Ok(data)
    }
}

/// 17 significant digits: enough for an exact f64 round trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Entry point for callers holding `(vector, label)` pairs.
pub fn make_dataset<I>(points: I) -> Result<Dataset>
where
    I: IntoIterator<Item = (Vec<f64>, i64)>,
{
    Dataset::from_raw(points)
}
