//! Geometric Monte Carlo estimate of LoS probability.
//!
//! Each trial places the transmitter above the origin and the receiver at
//! the requested ground distance under some azimuth, lays a Manhattan grid
//! of square buildings (pitch `W + S`, side `W`) with a random phase, draws
//! Rayleigh(γ) heights and tests the optical TX–RX segment for blockage.
//! The estimate is the fraction of clear trials.
//!
//! Every trial owns a ChaCha8 stream keyed by `(seed, distance index,
//! trial index)`, so results do not depend on thread count or scheduling.

mod grid;
mod trace;

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use grid::{synthesize_grid, BuildingGrid, Lattice, Point3};
pub use trace::is_blocked;

use crate::curves::{Axis, CurveMeta, ProbabilityCurve, Source};
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::scenario::{height_quantile, BuiltUpScenario};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum AzimuthPolicy {
    /// Uniform on `[0, 2π)`, fresh every trial.
    Uniform,
    /// Trial `t` uses `azimuths[t % len]` (radians).
    Fixed(Vec<f64>),
}

/// Where the receiver may stand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverSite {
    /// On a street: layouts (or azimuths, in a frozen city) that would put
    /// the receiver inside a footprint are redrawn.
    Street,
    /// Anywhere, including inside building footprints.
    Anywhere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CityMode {
    /// New layout phase and heights every trial.
    Resample,
    /// One sampled city shared by every trial; only the receiver azimuth varies.
    Frozen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: BuiltUpScenario,
    pub h_tx: f64,
    pub h_rx: f64,
    pub distances: Vec<f64>,
    pub trials_per_distance: usize,
    pub seed: u64,
    pub azimuth: AzimuthPolicy,
    pub receiver_site: ReceiverSite,
    pub city: CityMode,
}

impl SimConfig {
    /// 10 000 trials per distance, seed 0, uniform azimuth, street receiver,
    /// resampled city.
    pub fn new(scenario: BuiltUpScenario, h_tx: f64, h_rx: f64, distances: Vec<f64>) -> Self {
        Self {
            scenario,
            h_tx,
            h_rx,
            distances,
            trials_per_distance: 10_000,
            seed: 0,
            azimuth: AzimuthPolicy::Uniform,
            receiver_site: ReceiverSite::Street,
            city: CityMode::Resample,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_distance == 0 {
            return Err(Error::domain("trials_per_distance", 0.0, "must be at least 1"));
        }
        for (name, v) in [("h_tx", self.h_tx), ("h_rx", self.h_rx)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "must be finite and non-negative"));
            }
        }
        if self.distances.is_empty() {
            return Err(Error::domain("distances", 0.0, "need at least one distance"));
        }
        if let Some(&d) = self.distances.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return Err(Error::domain("distance", d, "must be finite and non-negative"));
        }
        if let AzimuthPolicy::Fixed(list) = &self.azimuth {
            if list.is_empty() || list.iter().any(|a| !a.is_finite()) {
                return Err(Error::domain("azimuth", f64::NAN, "fixed azimuth list must be non-empty and finite"));
            }
        }
        if self.scenario.pitch() <= 0.0 {
            return Err(Error::domain("pitch", self.scenario.pitch(), "building pitch W + S must be positive"));
        }
        if self.receiver_site == ReceiverSite::Street && self.scenario.spacing() <= 0.0 {
            return Err(Error::domain("spacing", self.scenario.spacing(), "a street receiver needs streets"));
        }
        Ok(())
    }

    /// Reproducibility sidecar: every field that determines the result.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.insert("scenario", self.scenario.name().unwrap_or("custom"));
        kv.insert("alpha", self.scenario.alpha());
        kv.insert("beta", self.scenario.beta());
        kv.insert("gamma", self.scenario.gamma());
        kv.insert("width_m", self.scenario.width());
        kv.insert("spacing_m", self.scenario.spacing());
        kv.insert("h_tx_m", self.h_tx);
        kv.insert("h_rx_m", self.h_rx);
        kv.insert("trials_per_distance", self.trials_per_distance);
        kv.insert("seed", self.seed);
        kv.insert(
            "azimuth_policy",
            match &self.azimuth {
                AzimuthPolicy::Uniform => "uniform-random".to_string(),
                AzimuthPolicy::Fixed(list) => format!(
                    "fixed-list:{}",
                    list.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
                ),
            },
        );
        kv.insert(
            "receiver_site",
            match self.receiver_site {
                ReceiverSite::Street => "street",
                ReceiverSite::Anywhere => "anywhere",
            },
        );
        kv.insert(
            "city",
            match self.city {
                CityMode::Resample => "resample",
                CityMode::Frozen => "frozen",
            },
        );
        kv.insert("ray_model", "optical segment, frequency independent");
        kv
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub distance: f64,
    pub p_los_hat: f64,
    pub trials: usize,
    /// Half-width of the 95% Wilson score interval.
    pub wilson_halfwidth: f64,
}

/// Half-width of the Wilson score interval for `successes` out of `trials`.
pub fn wilson_halfwidth(successes: usize, trials: usize, z: f64) -> f64 {
    if trials == 0 {
        return 0.5;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
fn stream_id(distance_index: usize, trial: usize) -> u64 {
    ((distance_index as u64) << 40) | trial as u64
}

fn azimuth_for(policy: &AzimuthPolicy, trial: usize, rng: &mut ChaCha8Rng) -> f64 {
    match policy {
        AzimuthPolicy::Uniform => rng.random::<f64>() * TAU,
        AzimuthPolicy::Fixed(list) => list[trial % list.len()],
    }
}

fn resampled_trial(cfg: &SimConfig, distance: f64, distance_index: usize, trial: usize) -> bool {
    let mut rng = trial_rng(cfg.seed, stream_id(distance_index, trial));
    let phi = azimuth_for(&cfg.azimuth, trial, &mut rng);
    let rx = Point3::new(distance * phi.cos(), distance * phi.sin(), cfg.h_rx);
    let tx = Point3::new(0.0, 0.0, cfg.h_tx);
    let pitch = cfg.scenario.pitch();
    let mut lattice = Lattice::for_scenario(&cfg.scenario, (0.0, 0.0)).expect("validated pitch");
    for _ in 0..PLACEMENT_ATTEMPTS {
        lattice.offset = (rng.random::<f64>() * pitch, rng.random::<f64>() * pitch);
        if cfg.receiver_site == ReceiverSite::Anywhere || !lattice.in_footprint(rx.x, rx.y) {
            break;
        }
    }
    let gamma = cfg.scenario.gamma();
    !trace::segment_blocked(&lattice, &tx, &rx, |_, _| Some(height_quantile(rng.random::<f64>(), gamma)))
}

fn frozen_trial(cfg: &SimConfig, city: &BuildingGrid, distance: f64, distance_index: usize, trial: usize) -> bool {
    let mut rng = trial_rng(cfg.seed, stream_id(distance_index, trial));
    let tx = Point3::new(0.0, 0.0, cfg.h_tx);
    let mut phi = azimuth_for(&cfg.azimuth, trial, &mut rng);
    // A fixed azimuth cannot be redrawn, so the street condition only
    // applies under the uniform policy.
    if cfg.receiver_site == ReceiverSite::Street && cfg.azimuth == AzimuthPolicy::Uniform && distance > 0.0 {
        for _ in 0..PLACEMENT_ATTEMPTS {
            if !city.lattice.in_footprint(distance * phi.cos(), distance * phi.sin()) {
                break;
            }
            phi = rng.random::<f64>() * TAU;
        }
    }
    let rx = Point3::new(distance * phi.cos(), distance * phi.sin(), cfg.h_rx);
    !is_blocked(city, tx, rx)
}

/// Runs `trials_per_distance` independent trials at every distance.
pub fn estimate_curve(config: &SimConfig) -> Result<Vec<SimEstimate>> {
    config.validate()?;
    let city = match config.city {
        CityMode::Resample => None,
        CityMode::Frozen => {
            let reach = config.distances.iter().copied().fold(0.0, f64::max);
            let extent = 2.0 * (reach + 2.0 * config.scenario.pitch());
            let seed = trial_rng(config.seed, u64::MAX).random::<u64>();
            Some(synthesize_grid(&config.scenario, extent, seed)?)
        }
    };
    let n = config.trials_per_distance;
    Ok(config
        .distances
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let clear = (0..n)
                .into_par_iter()
                .filter(|&t| match &city {
                    None => resampled_trial(config, d, k, t),
                    Some(city) => frozen_trial(config, city, d, k, t),
                })
                .count();
            SimEstimate {
                distance: d,
                p_los_hat: clear as f64 / n as f64,
                trials: n,
                wilson_halfwidth: wilson_halfwidth(clear, n, Z_95),
            }
        })
        .collect())
}

/// Writes `<x>,p_los_hat,trials,ci95_halfwidth`, where the x column is
/// `d_rx_m` or, with `thetas`, `theta_rad` (one angle per estimate).
pub fn write_estimates_csv<W: Write>(
    mut out: W,
    metadata: &[(String, String)],
    estimates: &[SimEstimate],
    thetas: Option<&[f64]>,
) -> Result<()> {
    crate::curves::write_metadata(&mut out, metadata)?;
    let column = if thetas.is_some() { Axis::Elevation } else { Axis::Distance }.column();
    writeln!(out, "{column},p_los_hat,trials,ci95_halfwidth")?;
    for (i, e) in estimates.iter().enumerate() {
        let x = thetas.map_or(e.distance, |t| t[i]);
        writeln!(out, "{x:.6},{:.6},{},{:.6}", e.p_los_hat, e.trials, e.wilson_halfwidth)?;
    }
    Ok(())
}

/// Estimates as a distance curve (sorted by distance).
pub fn estimates_to_curve(estimates: &[SimEstimate], config: &SimConfig) -> Result<ProbabilityCurve> {
    let mut points: Vec<(f64, f64)> = estimates.iter().map(|e| (e.distance, e.p_los_hat)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ProbabilityCurve::new(Axis::Distance, points)?.with_meta(CurveMeta {
        scenario: config.scenario.name().map(str::to_string),
        h_tx: Some(config.h_tx),
        h_rx: Some(config.h_rx),
        source: Some(Source::Simulated),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioPreset;

    fn config(distances: Vec<f64>, trials: usize) -> SimConfig {
        let mut c = SimConfig::new(ScenarioPreset::Suburban.scenario(), 70.0, 1.5, distances);
        c.trials_per_distance = trials;
        c.seed = 2024;
        c
    }

    #[test]
    fn zero_distance_always_clear() {
        let est = estimate_curve(&config(vec![0.0], 500)).unwrap();
        assert_eq!(est[0].p_los_hat, 1.0);
    }

    #[test]
    fn flat_city_is_clear() {
        let mut c = config(vec![100.0, 400.0], 300);
        c.scenario = c.scenario.with_gamma(1e-9).unwrap();
        for e in estimate_curve(&c).unwrap() {
            assert_eq!(e.p_los_hat, 1.0);
        }
    }

    #[test]
    fn seeded_and_schedule_independent() {
        let c = config(vec![50.0, 200.0, 400.0], 2000);
        let a = estimate_curve(&c).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = single.install(|| estimate_curve(&c).unwrap());
        assert_eq!(a, b);
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(estimate_curve(&other).unwrap(), a);
    }

    #[test]
    fn wilson_examples() {
        // p = 0.5, n = 100: z/(1 + z²/n)·sqrt(0.25/n + z²/(4n²)) = 0.096168…
        assert!((wilson_halfwidth(50, 100, Z_95) - 0.096_168_47).abs() < 1e-8);
        assert!(wilson_halfwidth(0, 100, Z_95) > 0.0);
        assert!(wilson_halfwidth(100, 100, Z_95) > 0.0);
        let narrow = wilson_halfwidth(2000, 40_000, Z_95);
        let wide = wilson_halfwidth(500, 10_000, Z_95);
        assert!((wide / narrow - 2.0).abs() < 0.2);
    }

    #[test]
    fn fixed_azimuth_and_frozen_city_run() {
        let mut c = config(vec![150.0, 300.0], 400);
        c.azimuth = AzimuthPolicy::Fixed(vec![0.3, 1.1]);
        c.city = CityMode::Frozen;
        let a = estimate_curve(&c).unwrap();
        assert_eq!(a, estimate_curve(&c).unwrap());
        assert!(a.iter().all(|e| (0.0..=1.0).contains(&e.p_los_hat)));
    }

    #[test]
    fn validation() {
        let mut c = config(vec![100.0], 0);
        assert!(estimate_curve(&c).is_err());
        c.trials_per_distance = 10;
        c.distances = vec![-5.0];
        assert!(estimate_curve(&c).is_err());
        c.distances = vec![10.0];
        c.azimuth = AzimuthPolicy::Fixed(vec![]);
        assert!(estimate_curve(&c).is_err());
        let mut full = config(vec![10.0], 10);
        full.scenario = BuiltUpScenario::new(1.0, 400.0, 10.0).unwrap();
        assert!(estimate_curve(&full).is_err());
        full.receiver_site = ReceiverSite::Anywhere;
        assert!(estimate_curve(&full).is_ok());
    }

    #[test]
    fn sidecar_names_every_setting() {
        let kv = config(vec![10.0], 10).to_key_values();
        for key in ["scenario", "alpha", "beta", "gamma", "h_tx_m", "h_rx_m", "seed", "azimuth_policy", "receiver_site", "city"] {
            assert!(kv.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn csv_layout() {
        let est = [SimEstimate {
            distance: 50.0,
            p_los_hat: 0.25,
            trials: 100,
            wilson_halfwidth: 0.08,
        }];
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &[], &est, None).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "d_rx_m,p_los_hat,trials,ci95_halfwidth\n50.000000,0.250000,100,0.080000\n"
        );
    }
}
