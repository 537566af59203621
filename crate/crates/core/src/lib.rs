//! Line-of-sight probability for air-to-ground millimeter-wave links over
//! built-up terrain.
//!
//! - [`scenario`]: environment parameters, presets and building-height law.
//! - [`theoretical`]: product model over the buildings crossed by a link.
//! - [`parametric`]: closed-form model with height-dependent breakpoint.
//! - [`fitting`]: least-squares fit of the closed form to the product model.
//! - [`geosim`]: Monte Carlo blockage simulation over Manhattan layouts.
//! - [`fresnel`]: first Fresnel zone geometry.
//! - [`curves`]: shared curve type, comparison metrics and CSV layouts.

pub mod curves;
pub mod error;
pub mod fitting;
pub mod fresnel;
pub mod geosim;
pub mod kv;
mod optim;
pub mod parametric;
pub mod scenario;
pub mod theoretical;

pub use curves::{max_abs_gap, mean_squared_gap, Axis, ProbabilityCurve, Source, Surface};
pub use error::{Error, Result};
pub use fitting::{fit_scenario, FitConfig, FitResult};
pub use geosim::{estimate_curve, SimConfig, SimEstimate};
pub use kv::KeyValues;
pub use parametric::ParametricCoeffs;
pub use scenario::{BuiltUpScenario, ScenarioPreset};
pub use theoretical::{los_probability, LinkGeometry};
