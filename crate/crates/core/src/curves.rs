//! Sampled probability curves and surfaces, their comparison metrics, and
//! the CSV layouts they are exported in.
//!
//! Every CSV starts with `#`-prefixed metadata lines followed by a header
//! row; probabilities are written with six decimals.

use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// What the x coordinate of a curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Horizontal TX–RX ground distance in meters.
    Distance,
    /// Elevation angle of the transmitter seen from the receiver, radians.
    Elevation,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::Distance => "d_rx_m",
            Axis::Elevation => "theta_rad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Theoretical,
    Parametric,
    Simulated,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Theoretical => "theoretical",
            Source::Parametric => "parametric",
            Source::Simulated => "simulated",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveMeta {
    pub scenario: Option<String>,
    pub h_tx: Option<f64>,
    pub h_rx: Option<f64>,
    pub source: Option<Source>,
}

/// A sampled map from distance (or elevation) to LoS probability.
///
/// x values are strictly increasing and every probability lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityCurve {
    axis: Axis,
    points: Vec<(f64, f64)>,
    pub meta: CurveMeta,
}

impl ProbabilityCurve {
    pub fn new(axis: Axis, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Curve("curve has no points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Curve(format!(
                    "x values must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(x, p)) = points
            .iter()
            .find(|(x, p)| !x.is_finite() || !(0.0..=1.0).contains(p))
        {
            return Err(Error::Curve(format!("invalid point ({x}, {p})")));
        }
        Ok(Self {
            axis,
            points,
            meta: CurveMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: CurveMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check_same_grid(&self, other: &ProbabilityCurve) -> Result<()> {
        if self.axis != other.axis {
            return Err(Error::GridMismatch(format!(
                "axis {:?} vs {:?}",
                self.axis, other.axis
            )));
        }
        if self.points.len() != other.points.len() {
            return Err(Error::GridMismatch(format!(
                "{} points vs {} points",
                self.points.len(),
                other.points.len()
            )));
        }
        for (a, b) in self.points.iter().zip(&other.points) {
            if a.0 != b.0 {
                return Err(Error::GridMismatch(format!("x = {} vs x = {}", a.0, b.0)));
            }
        }
        Ok(())
    }

    /// Writes `#` metadata lines, the header `<x column>,p_los` and one row
    /// per point.
    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        write_metadata(&mut out, metadata)?;
        writeln!(out, "{},p_los", self.axis.column())?;
        for &(x, p) in &self.points {
            writeln!(out, "{x:.6},{p:.6}")?;
        }
        Ok(())
    }

    /// Reads the first two columns of a CSV produced by this crate (or any
    /// CSV whose first column is the x value and second a probability).
    /// The axis is taken from the header name of the first column.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = reader.headers()?.clone();
        let axis = match headers.get(0) {
            Some("theta_rad") | Some("x_theta_rad") => Axis::Elevation,
            _ => Axis::Distance,
        };
        let mut points = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: idx + 2,
                        message: format!("column {} is not a number", i + 1),
                    })
            };
            points.push((field(0)?, field(1)?));
        }
        ProbabilityCurve::new(axis, points)
    }
}

pub(crate) fn write_metadata<W: Write>(out: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

/// Sup-norm distance `max |p_a − p_b|` between two curves on the same grid.
pub fn max_abs_gap(a: &ProbabilityCurve, b: &ProbabilityCurve) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(pa, pb)| (pa.1 - pb.1).abs())
        .fold(0.0, f64::max))
}

/// Mean squared difference between two curves on the same grid.
pub fn mean_squared_gap(a: &ProbabilityCurve, b: &ProbabilityCurve) -> Result<f64> {
    a.check_same_grid(b)?;
    let sum: f64 = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(pa, pb)| (pa.1 - pb.1).powi(2))
        .sum();
    Ok(sum / a.points.len() as f64)
}

/// Writes the merged comparison layout `x,p_theoretical,p_parametric,p_simulated`.
/// Missing sources leave their column empty; present curves must share a grid.
pub fn write_comparison_csv<W: Write>(
    mut out: W,
    metadata: &[(String, String)],
    theoretical: Option<&ProbabilityCurve>,
    parametric: Option<&ProbabilityCurve>,
    simulated: Option<&ProbabilityCurve>,
) -> Result<()> {
    let present: Vec<&ProbabilityCurve> = [theoretical, parametric, simulated]
        .into_iter()
        .flatten()
        .collect();
    let Some(reference) = present.first() else {
        return Err(Error::Curve("no curves to compare".into()));
    };
    for other in &present[1..] {
        reference.check_same_grid(other)?;
    }
    write_metadata(&mut out, metadata)?;
    writeln!(out, "x,p_theoretical,p_parametric,p_simulated")?;
    let cell = |c: Option<&ProbabilityCurve>, i: usize| -> String {
        c.map(|c| format!("{:.6}", c.points[i].1)).unwrap_or_default()
    };
    for (i, &(x, _)) in reference.points.iter().enumerate() {
        writeln!(
            out,
            "{x:.6},{},{},{}",
            cell(theoretical, i),
            cell(parametric, i),
            cell(simulated, i)
        )?;
    }
    Ok(())
}

/// Values sampled on an `h' × d_rx` grid, row-major by height.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    h_prime: Vec<f64>,
    d_rx: Vec<f64>,
    values: Vec<f64>,
}

impl Surface {
    pub fn from_fn(
        h_prime: &[f64],
        d_rx: &[f64],
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(h_prime.len() * d_rx.len());
        for &h in h_prime {
            for &d in d_rx {
                values.push(f(h, d));
            }
        }
        Self {
            h_prime: h_prime.to_vec(),
            d_rx: d_rx.to_vec(),
            values,
        }
    }

    pub fn from_rows(h_prime: &[f64], d_rx: &[f64], rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != h_prime.len() || rows.iter().any(|r| r.len() != d_rx.len()) {
            return Err(Error::GridMismatch("row shape does not match grids".into()));
        }
        Ok(Self {
            h_prime: h_prime.to_vec(),
            d_rx: d_rx.to_vec(),
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn h_prime(&self) -> &[f64] {
        &self.h_prime
    }

    pub fn d_rx(&self) -> &[f64] {
        &self.d_rx
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d_rx.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.d_rx.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Location `(h', d)` and value of the largest entry.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let (idx, &v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        let n = self.d_rx.len();
        (self.h_prime[idx / n], self.d_rx[idx % n], v)
    }
}

/// Evenly spaced grid `start, start+step, …` up to `end` inclusive
/// (allowing for rounding at the last point).
pub fn linear_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() {
        return Err(Error::domain("step", step, "must be positive with finite bounds"));
    }
    if end < start {
        return Err(Error::domain("end", end, "must not be below start"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}
