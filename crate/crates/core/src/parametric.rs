//! Closed-form LoS probability with a height-dependent breakpoint.
//!
//! ```text
//! P(d, h') = min(D1/d, 1)·(1 − exp(−d/D2)) + exp(−d/D2)
//! D1(h') = a1·h'^b1 + c1      (breakpoint distance)
//! D2(h') = a2·h'^b2           (decay length)
//! ```
//!
//! `h'` is the transmitter height above the receiver plane. Up to the
//! breakpoint the probability is exactly 1.

use std::path::Path;

use crate::curves::{Axis, CurveMeta, ProbabilityCurve, Source};
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::scenario::ScenarioPreset;

/// Evaluates the model directly from a breakpoint `d1` and decay length `d2`.
#[inline]
pub fn eval_breakpoints(d1: f64, d2: f64, d_rx: f64) -> f64 {
    if d_rx <= d1 {
        return 1.0;
    }
    let e = (-d_rx / d2).exp();
    ((d1 / d_rx) * (1.0 - e) + e).clamp(0.0, 1.0)
}

/// Ground distance at which a transmitter `h_prime` above the receiver is
/// seen under elevation `theta`.
pub fn distance_for_elevation(h_prime: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain("theta", theta, "must lie in (0, pi/2]"));
    }
    if !(h_prime > 0.0) {
        return Err(Error::domain("h_prime", h_prime, "must be positive"));
    }
    if theta == std::f64::consts::FRAC_PI_2 {
        return Ok(0.0);
    }
    Ok(h_prime / theta.tan())
}

/// The five constants of the closed-form model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCoeffs {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub label: Option<String>,
}

impl ParametricCoeffs {
    pub fn new(a1: f64, b1: f64, c1: f64, a2: f64, b2: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("b1", b1), ("c1", c1), ("a2", a2), ("b2", b2)] {
            if !v.is_finite() {
                return Err(Error::domain(name, v, "must be finite"));
            }
        }
        if !(a2 > 0.0) {
            return Err(Error::domain("a2", a2, "decay scale must be positive"));
        }
        if a1 >= 0.0 && c1 < 0.0 {
            return Err(Error::domain("c1", c1, "breakpoint offset must be non-negative"));
        }
        Ok(Self {
            a1,
            b1,
            c1,
            a2,
            b2,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Published coefficient set for each standard scenario.
    pub fn preset(preset: ScenarioPreset) -> Self {
        let (a1, b1, c1, a2, b2) = match preset {
            ScenarioPreset::Suburban => (1.698, 1.082, 30.07, 38.63, 0.4911),
            ScenarioPreset::Urban => (0.3891, 1.098, 23.92, 21.31, 0.4770),
            ScenarioPreset::DenseUrban => (0.3475, 1.018, 20.15, 18.87, 0.4461),
            ScenarioPreset::HighRiseUrban => (0.1885, 0.9723, 17.31, 15.70, 0.4106),
        };
        Self {
            a1,
            b1,
            c1,
            a2,
            b2,
            label: Some(preset.label().to_string()),
        }
    }

    /// Breakpoint distance `D1(h')`.
    pub fn breakpoint(&self, h_prime: f64) -> f64 {
        self.a1 * h_prime.powf(self.b1) + self.c1
    }

    /// Decay length `D2(h')`.
    pub fn decay(&self, h_prime: f64) -> f64 {
        self.a2 * h_prime.powf(self.b2)
    }

    /// LoS probability at height difference `h_prime` and ground distance
    /// `d_rx`. Equal to 1 for `d_rx ≤ D1`, including `d_rx = 0`.
    pub fn eval(&self, h_prime: f64, d_rx: f64) -> Result<f64> {
        if !(h_prime >= 0.0) {
            return Err(Error::domain("h_prime", h_prime, "must be non-negative"));
        }
        if !(d_rx >= 0.0) {
            return Err(Error::domain("d_rx", d_rx, "must be non-negative"));
        }
        let d2 = self.decay(h_prime);
        if !(d2 > 0.0) {
            return Err(Error::domain("D2", d2, "decay length must be positive"));
        }
        let d1 = self.breakpoint(h_prime);
        if d1 < 0.0 {
            return Err(Error::domain("D1", d1, "breakpoint must be non-negative"));
        }
        Ok(eval_breakpoints(d1, d2, d_rx))
    }

    /// LoS probability for elevation angle `theta` (radians), with the
    /// ground distance `h'/tan θ`.
    pub fn eval_by_elevation(&self, h_prime: f64, theta: f64) -> Result<f64> {
        let d = distance_for_elevation(h_prime, theta)?;
        self.eval(h_prime, d)
    }

    pub fn curve(&self, h_prime: f64, distances: &[f64]) -> Result<ProbabilityCurve> {
        let points = distances
            .iter()
            .map(|&d| Ok((d, self.eval(h_prime, d)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbabilityCurve::new(Axis::Distance, points)?.with_meta(self.meta(h_prime)))
    }

    pub fn elevation_curve(&self, h_prime: f64, thetas: &[f64]) -> Result<ProbabilityCurve> {
        let points = thetas
            .iter()
            .map(|&t| Ok((t, self.eval_by_elevation(h_prime, t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbabilityCurve::new(Axis::Elevation, points)?.with_meta(self.meta(h_prime)))
    }

    fn meta(&self, h_prime: f64) -> CurveMeta {
        CurveMeta {
            scenario: self.label.clone(),
            h_tx: Some(h_prime),
            h_rx: Some(0.0),
            source: Some(Source::Parametric),
        }
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let c = Self::new(
            kv.require_f64("a1")?,
            kv.require_f64("b1")?,
            kv.require_f64("c1")?,
            kv.require_f64("a2")?,
            kv.require_f64("b2")?,
        )?;
        Ok(match kv.get("scenario") {
            Some(label) => c.with_label(label),
            None => c,
        })
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        if let Some(label) = &self.label {
            kv.insert("scenario", label);
        }
        kv.insert("a1", self.a1);
        kv.insert("b1", self.b1);
        kv.insert("c1", self.c1);
        kv.insert("a2", self.a2);
        kv.insert("b2", self.b2);
        kv
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_key_values().to_string())?;
        Ok(())
    }
}
