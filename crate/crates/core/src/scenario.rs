//! Built-up scenario description: coverage fraction `alpha`, building
//! density `beta` (per km²) and the Rayleigh scale `gamma` of building
//! heights, plus the building width and street spacing derived from them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv::KeyValues;

/// Building width in meters, `1000·sqrt(alpha/beta)`.
pub fn derive_width(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha_beta(alpha, beta)?;
    Ok(1000.0 * (alpha / beta).sqrt())
}

/// Street spacing between buildings in meters, `(1000/sqrt(beta))·(1 − sqrt(alpha))`.
pub fn derive_spacing(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha_beta(alpha, beta)?;
    Ok((1000.0 / beta.sqrt()) * (1.0 - alpha.sqrt()))
}

fn check_alpha_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (0, 1]"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("beta", beta, "must be positive"));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma", gamma, "must be positive"));
    }
    Ok(())
}

/// Rayleigh density of building height.
pub fn height_pdf(h: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if h < 0.0 {
        return Ok(0.0);
    }
    let g2 = gamma * gamma;
    Ok(h / g2 * (-h * h / (2.0 * g2)).exp())
}

/// Probability that a building is lower than `h`.
///
/// Zero for `h < 0`: the Rayleigh support is `[0, ∞)`, so a line of sight
/// running below ground level is always blocked.
pub fn height_cdf(h: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(rayleigh_cdf(h, gamma))
}

#[inline]
pub(crate) fn rayleigh_cdf(h: f64, gamma: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    -(-h * h / (2.0 * gamma * gamma)).exp_m1()
}

/// Inverse of [`height_cdf`]: maps a uniform variate in `[0, 1)` to a height.
#[inline]
pub fn height_quantile(u: f64, gamma: f64) -> f64 {
    gamma * (-2.0 * (-u).ln_1p()).sqrt()
}

/// The four standard built-up environments.
///
/// `DenseUrban` and `HighRiseUrban` carry identical environment parameters;
/// they are distinguished only by their fitted parametric coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioPreset {
    Suburban,
    Urban,
    DenseUrban,
    HighRiseUrban,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 4] = [
        ScenarioPreset::Suburban,
        ScenarioPreset::Urban,
        ScenarioPreset::DenseUrban,
        ScenarioPreset::HighRiseUrban,
    ];

    /// `(alpha, beta, gamma)`.
    pub fn parameters(self) -> (f64, f64, f64) {
        match self {
            ScenarioPreset::Suburban => (0.1, 750.0, 8.0),
            ScenarioPreset::Urban => (0.3, 500.0, 15.0),
            ScenarioPreset::DenseUrban => (0.5, 300.0, 20.0),
            ScenarioPreset::HighRiseUrban => (0.5, 300.0, 20.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScenarioPreset::Suburban => "Suburban",
            ScenarioPreset::Urban => "Urban",
            ScenarioPreset::DenseUrban => "Dense urban",
            ScenarioPreset::HighRiseUrban => "High-rise urban",
        }
    }

    /// Command-line spelling.
    pub fn key(self) -> &'static str {
        match self {
            ScenarioPreset::Suburban => "suburban",
            ScenarioPreset::Urban => "urban",
            ScenarioPreset::DenseUrban => "dense-urban",
            ScenarioPreset::HighRiseUrban => "high-rise-urban",
        }
    }

    pub fn scenario(self) -> BuiltUpScenario {
        let (alpha, beta, gamma) = self.parameters();
        BuiltUpScenario::new(alpha, beta, gamma)
            .expect("preset parameters are valid")
            .with_name(self.label())
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ScenarioPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "suburban" => Ok(ScenarioPreset::Suburban),
            "urban" => Ok(ScenarioPreset::Urban),
            "denseurban" => Ok(ScenarioPreset::DenseUrban),
            "highriseurban" => Ok(ScenarioPreset::HighRiseUrban),
            _ => Err(Error::Parse {
                line: 0,
                message: format!("unknown scenario preset `{s}`"),
            }),
        }
    }
}

/// Statistical description of a built-up area.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltUpScenario {
    alpha: f64,
    beta: f64,
    gamma: f64,
    width: f64,
    spacing: f64,
    name: Option<String>,
}

impl BuiltUpScenario {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            alpha,
            beta,
            gamma,
            width: derive_width(alpha, beta)?,
            spacing: derive_spacing(alpha, beta)?,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Replaces the derived building width, keeping `alpha`, `beta`,
    /// `gamma` and the spacing. Used for width-sensitivity studies; the
    /// width no longer follows `1000·sqrt(alpha/beta)` afterwards.
    pub fn with_width_override(mut self, width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::domain("width", width, "must be non-negative"));
        }
        self.width = width;
        Ok(self)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Lattice pitch `W + S` of the equivalent Manhattan layout.
    pub fn pitch(&self) -> f64 {
        self.width + self.spacing
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of buildings crossed by a ground path of length `d_rx`,
    /// `floor(d_rx·sqrt(alpha·beta)/1000)`.
    pub fn building_count(&self, d_rx: f64) -> usize {
        if !(d_rx > 0.0) {
            return 0;
        }
        (d_rx * (self.alpha * self.beta).sqrt() / 1000.0).floor() as usize
    }

    /// Ground distance per crossed building, `1000/sqrt(alpha·beta)`: the
    /// shortest path that crosses one building.
    pub fn building_interval(&self) -> f64 {
        1000.0 / (self.alpha * self.beta).sqrt()
    }

    pub fn height_pdf(&self, h: f64) -> f64 {
        height_pdf(h, self.gamma).expect("gamma validated at construction")
    }

    pub fn height_cdf(&self, h: f64) -> f64 {
        rayleigh_cdf(h, self.gamma)
    }

    /// Parses `alpha`, `beta`, `gamma` and an optional `name`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let scenario = Self::new(
            kv.require_f64("alpha")?,
            kv.require_f64("beta")?,
            kv.require_f64("gamma")?,
        )?;
        Ok(match kv.get("name") {
            Some(name) => scenario.with_name(name),
            None => scenario,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        if let Some(name) = &self.name {
            kv.insert("name", name);
        }
        kv.insert("alpha", self.alpha);
        kv.insert("beta", self.beta);
        kv.insert("gamma", self.gamma);
        kv
    }

    /// Short label for metadata lines.
    pub fn describe(&self) -> String {
        format!(
            "{} (alpha={}, beta={}, gamma={}, W={:.2}, S={:.2})",
            self.name.as_deref().unwrap_or("custom"),
            self.alpha,
            self.beta,
            self.gamma,
            self.width,
            self.spacing
        )
    }
}

impl From<ScenarioPreset> for BuiltUpScenario {
    fn from(p: ScenarioPreset) -> Self {
        p.scenario()
    }
}
