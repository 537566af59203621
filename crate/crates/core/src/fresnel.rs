//! First Fresnel zone geometry.
//!
//! Used to check that the optical-ray blockage model is reasonable at
//! millimeter wave: at 28 GHz the full first-zone width `2·r_max = sqrt(λ·d)`
//! stays within 2.5 m only for links up to about 584 m, and reaches about
//! 3.27 m at 1 km. Both are small compared to building widths of 10–40 m.

use std::io::Write;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn wavelength(frequency: f64) -> Result<f64> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(Error::domain("frequency", frequency, "must be positive"));
    }
    Ok(SPEED_OF_LIGHT / frequency)
}

/// Radius of the first Fresnel zone at the point splitting the path into
/// `d1` and `d2`: `sqrt(λ·d1·d2/(d1 + d2))`.
pub fn first_fresnel_radius(frequency: f64, d1: f64, d2: f64) -> Result<f64> {
    let lambda = wavelength(frequency)?;
    if !(d1 >= 0.0) {
        return Err(Error::domain("d1", d1, "must be non-negative"));
    }
    if !(d2 >= 0.0) {
        return Err(Error::domain("d2", d2, "must be non-negative"));
    }
    if !(d1 + d2 > 0.0) {
        return Err(Error::domain("d1 + d2", d1 + d2, "path length must be positive"));
    }
    Ok((lambda * (d1 * d2) / (d1 + d2)).sqrt())
}

/// Full first-zone width at mid-path, `sqrt(λ·d)`.
pub fn max_width(frequency: f64, total_distance: f64) -> Result<f64> {
    let half = total_distance / 2.0;
    Ok(2.0 * first_fresnel_radius(frequency, half, half)?)
}

/// Longest link whose mid-path first-zone width stays within `width`.
pub fn longest_link_within_width(frequency: f64, width: f64) -> Result<f64> {
    if !(width >= 0.0) {
        return Err(Error::domain("width", width, "must be non-negative"));
    }
    Ok(width * width / wavelength(frequency)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FresnelProfile {
    pub frequency: f64,
    pub total_distance: f64,
    /// `(d1, radius)` pairs, evenly spaced from 0 to `total_distance`.
    pub samples: Vec<(f64, f64)>,
}

impl FresnelProfile {
    pub fn max_radius(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        crate::curves::write_metadata(&mut out, metadata)?;
        writeln!(out, "d1_m,radius_m")?;
        for &(d1, r) in &self.samples {
            writeln!(out, "{d1:.6},{r:.6}")?;
        }
        Ok(())
    }
}

pub fn profile(frequency: f64, total_distance: f64, n_samples: usize) -> Result<FresnelProfile> {
    if n_samples < 3 {
        return Err(Error::domain("n_samples", n_samples as f64, "need at least 3 samples"));
    }
    if !(total_distance > 0.0 && total_distance.is_finite()) {
        return Err(Error::domain("total_distance", total_distance, "must be positive"));
    }
    let last = n_samples - 1;
    let samples = (0..n_samples)
        .map(|i| {
            // Endpoints are pinned so the radius is exactly zero there.
            let d1 = if i == last {
                total_distance
            } else {
                total_distance * i as f64 / last as f64
            };
            let d2 = if i == last { 0.0 } else { total_distance - d1 };
            Ok((d1, first_fresnel_radius(frequency, d1, d2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FresnelProfile {
        frequency,
        total_distance,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F28: f64 = 28e9;

    #[test]
    fn endpoint_radius_is_zero() {
        assert_eq!(first_fresnel_radius(F28, 0.0, 500.0).unwrap(), 0.0);
        assert_eq!(first_fresnel_radius(F28, 500.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_kilometer_at_28_ghz() {
        // λ = 0.0107069 m; sqrt(λ·125) = 1.15687 m.
        let r = first_fresnel_radius(F28, 250.0, 250.0).unwrap();
        assert!((r - 1.156_87).abs() < 1e-4, "{r}");
        assert!(2.0 * r < 2.5);
    }

    #[test]
    fn square_root_law_in_frequency() {
        let r1 = first_fresnel_radius(F28, 300.0, 700.0).unwrap();
        let r4 = first_fresnel_radius(4.0 * F28, 300.0, 700.0).unwrap();
        assert!((r4 - r1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(first_fresnel_radius(0.0, 1.0, 1.0).is_err());
        assert!(first_fresnel_radius(-1e9, 1.0, 1.0).is_err());
        assert!(first_fresnel_radius(F28, -1.0, 1.0).is_err());
        assert!(first_fresnel_radius(F28, 0.0, 0.0).is_err());
        assert!(profile(F28, 100.0, 2).is_err());
        assert!(profile(F28, 0.0, 11).is_err());
    }

    #[test]
    fn profile_shape() {
        let p = profile(F28, 1000.0, 101).unwrap();
        assert_eq!(p.samples.len(), 101);
        assert_eq!(p.samples[0].1, 0.0);
        assert_eq!(p.samples[100].1, 0.0);
        assert_eq!(p.samples[100].0, 1000.0);
        assert_eq!(p.max_radius(), p.samples[50].1);
        // 2·sqrt(λ·250) = 3.2726 m
        assert!(2.0 * p.max_radius() <= 3.3);
        assert!((2.0 * p.max_radius() - 3.2726).abs() < 1e-3);
    }

    #[test]
    fn even_sample_count_peaks_at_centre() {
        let p = profile(F28, 400.0, 10).unwrap();
        let max = p.max_radius();
        assert!(p.samples[4].1 == max || p.samples[5].1 == max);
    }

    #[test]
    fn halving_distance_scales_radius() {
        let a = profile(F28, 800.0, 41).unwrap().max_radius();
        let b = profile(F28, 400.0, 41).unwrap().max_radius();
        assert!((b - a / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn width_limits() {
        let d = longest_link_within_width(F28, 2.5).unwrap();
        assert!((d - 583.7).abs() < 0.5, "{d}");
        assert!((max_width(F28, d).unwrap() - 2.5).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn symmetric(d1 in 0.0f64..5e3, d2 in 0.0f64..5e3, f in 1e8f64..1e11) {
            prop_assume!(d1 + d2 > 0.0);
            prop_assert_eq!(
                first_fresnel_radius(f, d1, d2).unwrap(),
                first_fresnel_radius(f, d2, d1).unwrap()
            );
        }

        #[test]
        fn lower_frequency_never_narrower(d1 in 0.0f64..5e3, d2 in 1.0f64..5e3, f in 1e8f64..1e11, k in 1.0f64..100.0) {
            prop_assert!(
                first_fresnel_radius(f / k, d1, d2).unwrap() >= first_fresnel_radius(f, d1, d2).unwrap()
            );
        }
    }
}
