//! Height-dependent LoS probability as a product of per-building clearance
//! probabilities.
//!
//! A link of ground length `d_rx` crosses `N_b = floor(d_rx·sqrt(αβ)/1000)`
//! buildings. Building `i` (1-based) is taken to sit at the fraction
//! `(i − 0.5)/N_b + W/(2·d_rx)` of the path, i.e. its far edge as seen from
//! the transmitter. The link is clear of it when the building is lower than
//! the straight TX–RX line at that point, and the LoS probability is the
//! product over all crossed buildings.
//!
//! No frequency enters: at millimeter wave the first Fresnel zone is thin
//! compared to building dimensions (see [`crate::fresnel`]).

use crate::curves::{Axis, CurveMeta, ProbabilityCurve, Source};
use crate::error::{Error, Result};
use crate::scenario::BuiltUpScenario;

/// Transmitter height, receiver height and horizontal ground distance, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub h_tx: f64,
    pub h_rx: f64,
    pub d_rx: f64,
}

impl LinkGeometry {
    pub fn new(h_tx: f64, h_rx: f64, d_rx: f64) -> Result<Self> {
        for (name, v) in [("h_tx", h_tx), ("h_rx", h_rx), ("d_rx", d_rx)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "must be finite and non-negative"));
            }
        }
        Ok(Self { h_tx, h_rx, d_rx })
    }

    /// Height difference `h' = h_tx − h_rx`.
    pub fn height_difference(&self) -> f64 {
        self.h_tx - self.h_rx
    }

    /// Elevation angle of the transmitter seen from the receiver.
    pub fn elevation(&self) -> f64 {
        self.height_difference().atan2(self.d_rx)
    }

    #[inline]
    fn line_height_at_fraction(&self, fraction: f64) -> f64 {
        self.h_tx - fraction * (self.h_tx - self.h_rx)
    }
}

/// One building crossed by the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingCrossing {
    /// 1-based ordinal counted from the transmitter.
    pub index: usize,
    /// Position along the path as a fraction of `d_rx`.
    pub fraction: f64,
    /// Height of the TX–RX line above ground at that position.
    pub los_height: f64,
    /// Probability that the building is lower than `los_height`.
    pub clear_prob: f64,
}

/// Height of the TX–RX line at ground distance `d_los` from the transmitter.
pub fn los_line_height(geometry: &LinkGeometry, d_los: f64) -> Result<f64> {
    if !(d_los >= 0.0) {
        return Err(Error::domain("d_los", d_los, "must be non-negative"));
    }
    if geometry.d_rx == 0.0 {
        if d_los > 0.0 {
            return Err(Error::domain(
                "d_los",
                d_los,
                "a zero-length link has no interior point",
            ));
        }
        return Ok(geometry.h_tx);
    }
    if d_los > geometry.d_rx {
        return Err(Error::domain("d_los", d_los, "must not exceed d_rx"));
    }
    Ok(geometry.line_height_at_fraction(d_los / geometry.d_rx))
}

/// The buildings crossed by the link, nearest to the transmitter first.
///
/// Empty when the link is too short to cross a building. With an overridden
/// (non-derived) width the last fractions may exceed 1; heights are then
/// extrapolated along the line and clamped only through the height CDF.
pub fn crossings(geometry: &LinkGeometry, scenario: &BuiltUpScenario) -> Vec<BuildingCrossing> {
    let n = scenario.building_count(geometry.d_rx);
    if n == 0 {
        return Vec::new();
    }
    let offset = scenario.width() / (2.0 * geometry.d_rx);
    (1..=n)
        .map(|index| {
            let fraction = (index as f64 - 0.5) / n as f64 + offset;
            let los_height = geometry.line_height_at_fraction(fraction);
            BuildingCrossing {
                index,
                fraction,
                los_height,
                clear_prob: scenario.height_cdf(los_height),
            }
        })
        .collect()
}

/// LoS probability of the link; 1 when no building is crossed.
pub fn los_probability(geometry: &LinkGeometry, scenario: &BuiltUpScenario) -> f64 {
    let n = scenario.building_count(geometry.d_rx);
    if n == 0 {
        return 1.0;
    }
    let offset = scenario.width() / (2.0 * geometry.d_rx);
    let mut p = 1.0;
    for i in 1..=n {
        let fraction = (i as f64 - 0.5) / n as f64 + offset;
        p *= scenario.height_cdf(geometry.line_height_at_fraction(fraction));
        if p == 0.0 {
            break;
        }
    }
    p
}

/// [`los_probability`] over a strictly increasing list of distances.
pub fn los_probability_curve(
    h_tx: f64,
    h_rx: f64,
    distances: &[f64],
    scenario: &BuiltUpScenario,
) -> Result<ProbabilityCurve> {
    if distances.is_empty() {
        return Err(Error::Curve("distance list is empty".into()));
    }
    let points = distances
        .iter()
        .map(|&d| {
            let g = LinkGeometry::new(h_tx, h_rx, d)?;
            Ok((d, los_probability(&g, scenario)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityCurve::new(Axis::Distance, points)?.with_meta(CurveMeta {
        scenario: scenario.name().map(str::to_string),
        h_tx: Some(h_tx),
        h_rx: Some(h_rx),
        source: Some(Source::Theoretical),
    }))
}

/// Theoretical curve against elevation angle for a transmitter at `h_tx`.
/// `thetas` are radians in `(0, π/2]`, strictly increasing; the ground
/// distance is `(h_tx − h_rx)/tan θ`.
pub fn los_probability_by_elevation(
    h_tx: f64,
    h_rx: f64,
    thetas: &[f64],
    scenario: &BuiltUpScenario,
) -> Result<ProbabilityCurve> {
    let h_prime = h_tx - h_rx;
    if !(h_prime > 0.0) {
        return Err(Error::domain("h_tx - h_rx", h_prime, "must be positive for an elevation view"));
    }
    let points = thetas
        .iter()
        .map(|&theta| {
            let d = crate::parametric::distance_for_elevation(h_prime, theta)?;
            let g = LinkGeometry::new(h_tx, h_rx, d)?;
            Ok((theta, los_probability(&g, scenario)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityCurve::new(Axis::Elevation, points)?.with_meta(CurveMeta {
        scenario: scenario.name().map(str::to_string),
        h_tx: Some(h_tx),
        h_rx: Some(h_rx),
        source: Some(Source::Theoretical),
    }))
}
