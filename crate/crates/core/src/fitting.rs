//! Least-squares fit of the closed-form model to the theoretical product
//! model, and the squared-error surface between the two.
//!
//! The fit runs in two stages:
//!
//! 1. For every height `h'` of the grid, the breakpoint `D1` and decay
//!    length `D2` minimizing the mean squared error against the
//!    theoretical curve (receiver plane at 0 m, so `h_tx = h'`) are found
//!    by a coarse grid seed refined with bounded Nelder–Mead.
//! 2. `D1(h') = a1·h'^b1 + c1` (with `c1 ≥ 0`) and `D2(h') = a2·h'^b2` are
//!    regressed in linear space: a scan plus golden-section search over the
//!    exponent with the linear coefficients solved in closed form.
//!
//! Only heights whose curve drops to [`INFORMATIVE_LEVEL`] or below enter
//! stage 2. Higher links stay near 1 over the whole distance grid, which
//! leaves `D2` unidentifiable and would dominate the regression.

use std::io::Write;

use rayon::prelude::*;

use crate::curves::{linear_grid, Axis, ProbabilityCurve, Surface};
use crate::error::{Error, Result};
use crate::optim::{golden_section, Bounds, Minimum, NelderMead};
use crate::parametric::{eval_breakpoints, ParametricCoeffs};
use crate::scenario::BuiltUpScenario;
use crate::theoretical::{los_probability, LinkGeometry};

/// Minimum number of distance samples for a per-height fit.
pub const MIN_CURVE_POINTS: usize = 20;

/// A height takes part in the power-law regression only if its curve falls
/// to this probability or below somewhere on the distance grid.
pub const INFORMATIVE_LEVEL: f64 = 0.5;

const EXPONENT_RANGE: (f64, f64) = (-4.0, 4.0);
const EXPONENT_SCAN: usize = 800;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Relative parameter tolerance for the per-height search.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub h_prime_grid: Vec<f64>,
    pub d_rx_grid: Vec<f64>,
    pub scenario: BuiltUpScenario,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl FitConfig {
    /// `h'` = 10, 20, …, 500 m and `d_rx` = 10, 20, …, 1000 m.
    pub fn with_default_grids(scenario: BuiltUpScenario) -> Self {
        let opts = FitOptions::default();
        Self {
            h_prime_grid: linear_grid(10.0, 500.0, 10.0).expect("static grid"),
            d_rx_grid: linear_grid(10.0, 1000.0, 10.0).expect("static grid"),
            scenario,
            tolerance: opts.tolerance,
            max_iterations: opts.max_iterations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("h_prime_grid", &self.h_prime_grid), ("d_rx_grid", &self.d_rx_grid)] {
            if grid.is_empty() {
                return Err(Error::domain(name, 0.0, "grid is empty"));
            }
            if let Some(&bad) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return Err(Error::domain(name, bad, "grid values must be non-negative"));
            }
            if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
                return Err(Error::domain(name, w[1], "grid must be strictly increasing"));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("tolerance", self.tolerance, "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations", 0.0, "must be positive"));
        }
        Ok(())
    }

    fn options(&self) -> FitOptions {
        FitOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

/// Breakpoint and decay length fitted to one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightFit {
    pub h_prime: f64,
    pub d1: f64,
    pub d2: f64,
    pub mse: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coeffs: ParametricCoeffs,
    pub per_height: Vec<HeightFit>,
    /// Heights whose `(D1, D2)` entered the power-law regression.
    pub regression_heights: Vec<f64>,
    /// Mean squared error of the assembled model over the whole grid.
    pub final_mse: f64,
    /// Largest absolute gap of the assembled model over the whole grid.
    pub max_abs_gap: f64,
    pub iterations_used: usize,
}

impl FitResult {
    /// Report layout `h_prime_m,D1_m,D2_m,per_height_mse`.
    pub fn write_report<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        crate::curves::write_metadata(&mut out, metadata)?;
        writeln!(out, "h_prime_m,D1_m,D2_m,per_height_mse")?;
        for f in &self.per_height {
            writeln!(out, "{:.6},{:.6},{:.6},{:.9}", f.h_prime, f.d1, f.d2, f.mse)?;
        }
        Ok(())
    }
}

/// `y ≈ a·x^b + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Sum of squared residuals.
    pub sse: f64,
}

impl PowerLaw {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b) + self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Offset {
    None,
    Free,
    NonNegative,
}

fn mse_breakpoints(d1: f64, d2: f64, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(d, p)| (eval_breakpoints(d1, d2, d) - p).powi(2))
        .sum::<f64>()
        / points.len() as f64
}

/// Fits `(D1, D2)` of the closed-form model to one distance curve.
pub fn fit_per_height(curve: &ProbabilityCurve, h_prime: f64) -> Result<HeightFit> {
    fit_per_height_with(curve, h_prime, &FitOptions::default())
}

pub fn fit_per_height_with(curve: &ProbabilityCurve, h_prime: f64, opts: &FitOptions) -> Result<HeightFit> {
    if curve.axis() != Axis::Distance {
        return Err(Error::Fit("per-height fits need a distance curve".into()));
    }
    if curve.len() < MIN_CURVE_POINTS {
        return Err(Error::Fit(format!(
            "curve has {} points, need at least {MIN_CURVE_POINTS}",
            curve.len()
        )));
    }
    let points = curve.points();
    let (lo, hi) = curve
        .probabilities()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)));
    let d_max = points.last().map(|p| p.0).unwrap_or(0.0);
    if !(d_max > 0.0) {
        return Err(Error::Fit("distance grid has no positive extent".into()));
    }
    if lo >= 1.0 {
        // Clear over the whole grid: the breakpoint lies beyond it and the
        // decay length is unidentifiable. Such heights never enter the regression.
        return Ok(HeightFit {
            h_prime,
            d1: d_max,
            d2: 10.0 * d_max,
            mse: 0.0,
            iterations: 0,
        });
    }
    if hi - lo <= 1e-12 {
        return Err(Error::Fit(format!(
            "curve is constant at {lo:.6}; no decay to fit"
        )));
    }

    let d2_lo = d_max * 1e-6;
    let d2_hi = 10.0 * d_max;

    // Coarse seed: the best D1 column for each D2 row, on a log grid of D2.
    const D2_ROWS: usize = 61;
    let seeds: Vec<(f64, f64, f64)> = (0..D2_ROWS)
        .map(|j| {
            let d2 = d_max * 1e-3 * (1e4f64).powf(j as f64 / (D2_ROWS - 1) as f64);
            (0..=100)
                .map(|i| {
                    let d1 = d_max * i as f64 / 100.0;
                    (mse_breakpoints(d1, d2, points), d1, d2)
                })
                .fold((f64::INFINITY, 0.0, d2), |a, b| if b.0 < a.0 { b } else { a })
        })
        .collect();

    let bounds = Bounds {
        lower: vec![0.0, d2_lo],
        upper: vec![d_max, d2_hi],
    };
    let nm = NelderMead {
        x_tol: opts.tolerance,
        f_tol: 1e-18,
        max_iterations: opts.max_iterations,
    };
    let objective = |x: &[f64]| mse_breakpoints(x[0], x[1], points);
    // A very short decay length mimics a step at D1 and forms a spurious
    // basin, so the best seed of each quarter of the D2 range gets a start.
    let mut best: Option<Minimum> = None;
    let mut iterations = 0;
    for band in seeds.chunks(D2_ROWS.div_ceil(4)) {
        let seed = band.iter().fold(band[0], |a, &b| if b.0 < a.0 { b } else { a });
        let first = nm.minimize(
            objective,
            &[seed.1, seed.2],
            &[d_max / 100.0, seed.2 * 0.2],
            Some(&bounds),
        );
        // Restart once from the converged point; Nelder–Mead can stall on the kink at d = D1.
        let second = nm.minimize(
            objective,
            &first.x,
            &[(first.x[0] * 0.01).max(d_max * 1e-4), first.x[1] * 0.01],
            Some(&bounds),
        );
        iterations += first.iterations + second.iterations;
        let local = if second.value <= first.value { second } else { first };
        if best.as_ref().is_none_or(|b| local.value < b.value) {
            best = Some(local);
        }
    }
    let best = best.expect("at least one seed band");
    Ok(HeightFit {
        h_prime,
        d1: best.x[0],
        d2: best.x[1],
        mse: best.value,
        iterations,
    })
}

/// Least-squares `y ≈ a·h'^b + c`; `c` is fixed at 0 unless `with_offset`.
pub fn fit_power_law(samples: &[(f64, f64)], with_offset: bool) -> Result<PowerLaw> {
    fit_power_law_inner(samples, if with_offset { Offset::Free } else { Offset::None }).map(|(p, _)| p)
}

fn fit_power_law_inner(samples: &[(f64, f64)], offset: Offset) -> Result<(PowerLaw, usize)> {
    if let Some(&(x, _)) = samples.iter().find(|(x, _)| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::domain("h_prime", x, "power-law samples need positive abscissae"));
    }
    if let Some(&(_, y)) = samples.iter().find(|(_, y)| !y.is_finite()) {
        return Err(Error::domain("y", y, "power-law samples must be finite"));
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let needed = if offset == Offset::None { 2 } else { 3 };
    if xs.len() < needed {
        return Err(Error::Singular(format!(
            "{} distinct abscissae for {needed} unknowns",
            xs.len()
        )));
    }

    let solve = |b: f64| linear_solve(samples, b, offset);
    let sse = |b: f64| solve(b).map_or(f64::INFINITY, |s| s.2);

    let (lo, hi) = EXPONENT_RANGE;
    let step = (hi - lo) / EXPONENT_SCAN as f64;
    let (best_k, _) = (0..=EXPONENT_SCAN)
        .map(|k| (k, sse(lo + k as f64 * step)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let b_lo = lo + best_k.saturating_sub(1) as f64 * step;
    let b_hi = (lo + (best_k + 1) as f64 * step).min(hi);
    let (b, _, iterations) = golden_section(sse, b_lo, b_hi, 1e-13, 400);
    let Some((a, c, sse)) = solve(b) else {
        return Err(Error::Singular(format!("degenerate design at exponent {b}")));
    };
    Ok((PowerLaw { a, b, c, sse }, iterations))
}

/// Closed-form `(a, c, sse)` for a fixed exponent.
fn linear_solve(samples: &[(f64, f64)], b: f64, offset: Offset) -> Option<(f64, f64, f64)> {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.powf(b)).collect();
    let sse_of = |a: f64, c: f64| -> f64 {
        xs.iter()
            .zip(samples)
            .map(|(x, s)| (a * x + c - s.1).powi(2))
            .sum()
    };
    let through_origin = || {
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        if !(sxx > 0.0) || !sxx.is_finite() {
            return None;
        }
        let sxy: f64 = xs.iter().zip(samples).map(|(x, s)| x * s.1).sum();
        let a = sxy / sxx;
        Some((a, 0.0, sse_of(a, 0.0)))
    };
    if offset == Offset::None {
        return through_origin();
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-12 * (mx * mx * n).max(f64::MIN_POSITIVE)) || !sxx.is_finite() {
        return None;
    }
    let sxy: f64 = xs.iter().zip(samples).map(|(x, s)| (x - mx) * (s.1 - my)).sum();
    let a = sxy / sxx;
    let c = my - a * mx;
    if offset == Offset::NonNegative && c < 0.0 {
        return through_origin();
    }
    Some((a, c, sse_of(a, c)))
}

/// Theoretical surface with the receiver plane at 0 m (`h_tx = h'`).
pub fn theoretical_surface(scenario: &BuiltUpScenario, h_prime_grid: &[f64], d_rx_grid: &[f64]) -> Result<Surface> {
    let rows = h_prime_grid
        .par_iter()
        .map(|&h| {
            d_rx_grid
                .iter()
                .map(|&d| Ok(los_probability(&LinkGeometry::new(h, 0.0, d)?, scenario)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Surface::from_rows(h_prime_grid, d_rx_grid, rows)
}

pub fn parametric_surface(coeffs: &ParametricCoeffs, h_prime_grid: &[f64], d_rx_grid: &[f64]) -> Result<Surface> {
    let rows = h_prime_grid
        .iter()
        .map(|&h| d_rx_grid.iter().map(|&d| coeffs.eval(h, d)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    Surface::from_rows(h_prime_grid, d_rx_grid, rows)
}

/// Fits the closed-form model to the theoretical model of `config.scenario`.
pub fn fit_scenario(config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let target = theoretical_surface(&config.scenario, &config.h_prime_grid, &config.d_rx_grid)?;
    let mut result = fit_surface(&target, &config.options())?;
    if let Some(name) = config.scenario.name() {
        result.coeffs.label = Some(name.to_string());
    }
    Ok(result)
}

/// Fits the closed-form model to an arbitrary target surface.
pub fn fit_surface(target: &Surface, opts: &FitOptions) -> Result<FitResult> {
    let d_grid = target.d_rx();
    let per_height = target
        .h_prime()
        .par_iter()
        .enumerate()
        .map(|(i, &h)| {
            let curve = ProbabilityCurve::new(
                Axis::Distance,
                d_grid.iter().copied().zip(target.row(i).iter().copied()).collect(),
            )
            .and_then(|c| fit_per_height_with(&c, h, opts));
            curve.map_err(|e| Error::FitAtHeight {
                h_prime: h,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<HeightFit>>>()?;

    let informative: Vec<&HeightFit> = per_height
        .iter()
        .enumerate()
        .filter(|(i, _)| target.row(*i).iter().copied().fold(f64::INFINITY, f64::min) <= INFORMATIVE_LEVEL)
        .map(|(_, f)| f)
        .collect();
    if informative.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} heights decay below {INFORMATIVE_LEVEL} on the distance grid; need 3",
            informative.len()
        )));
    }
    let d1_samples: Vec<(f64, f64)> = informative.iter().map(|f| (f.h_prime, f.d1)).collect();
    let d2_samples: Vec<(f64, f64)> = informative.iter().map(|f| (f.h_prime, f.d2)).collect();
    let (d1_law, it1) = fit_power_law_inner(&d1_samples, Offset::NonNegative)?;
    let (d2_law, it2) = fit_power_law_inner(&d2_samples, Offset::None)?;
    let coeffs = ParametricCoeffs::new(d1_law.a, d1_law.b, d1_law.c, d2_law.a, d2_law.b)
        .map_err(|e| Error::Fit(format!("regression produced invalid coefficients: {e}")))?;

    let fitted = parametric_surface(&coeffs, target.h_prime(), d_grid)
        .map_err(|e| Error::Fit(format!("fitted model is undefined on the grid: {e}")))?;
    let (mut sq, mut gap) = (0.0, 0.0f64);
    for (p, t) in fitted.values().iter().zip(target.values()) {
        sq += (p - t).powi(2);
        gap = gap.max((p - t).abs());
    }
    Ok(FitResult {
        coeffs,
        regression_heights: informative.iter().map(|f| f.h_prime).collect(),
        final_mse: sq / target.values().len() as f64,
        max_abs_gap: gap,
        iterations_used: per_height.iter().map(|f| f.iterations).sum::<usize>() + it1 + it2,
        per_height,
    })
}

#[inline]
pub fn squared_gap(p_theoretical: f64, p_parametric: f64) -> f64 {
    (p_theoretical - p_parametric).powi(2)
}

/// Squared difference between theoretical (receiver plane at 0 m) and
/// closed-form probabilities over an `h' × d_rx` grid.
pub fn error_surface(
    coeffs: &ParametricCoeffs,
    scenario: &BuiltUpScenario,
    h_prime_grid: &[f64],
    d_rx_grid: &[f64],
) -> Result<Surface> {
    let theo = theoretical_surface(scenario, h_prime_grid, d_rx_grid)?;
    let param = parametric_surface(coeffs, h_prime_grid, d_rx_grid)?;
    let rows = (0..h_prime_grid.len())
        .map(|i| {
            theo.row(i)
                .iter()
                .zip(param.row(i))
                .map(|(t, p)| squared_gap(*t, *p))
                .collect()
        })
        .collect();
    Surface::from_rows(h_prime_grid, d_rx_grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioPreset;

    fn d_grid() -> Vec<f64> {
        linear_grid(10.0, 1000.0, 10.0).unwrap()
    }

    fn synthetic(d1: f64, d2: f64) -> ProbabilityCurve {
        ProbabilityCurve::new(
            Axis::Distance,
            d_grid().into_iter().map(|d| (d, eval_breakpoints(d1, d2, d))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn recovers_synthetic_breakpoints() {
        for (d1, d2) in [(200.0, 300.0), (237.3, 412.9), (55.5, 80.0), (640.0, 1500.0)] {
            let f = fit_per_height(&synthetic(d1, d2), 100.0).unwrap();
            assert!((f.d1 / d1 - 1.0).abs() < 0.01, "{d1} -> {}", f.d1);
            assert!((f.d2 / d2 - 1.0).abs() < 0.01, "{d2} -> {}", f.d2);
            assert!(f.mse < 1e-10);
        }
    }

    #[test]
    fn constant_curve_fails() {
        let flat = ProbabilityCurve::new(Axis::Distance, d_grid().into_iter().map(|d| (d, 0.3)).collect()).unwrap();
        assert!(matches!(fit_per_height(&flat, 100.0), Err(Error::Fit(_))));
    }

    #[test]
    fn short_curve_fails() {
        let c = ProbabilityCurve::new(Axis::Distance, (1..10).map(|i| (i as f64 * 100.0, 1.0 / i as f64)).collect()).unwrap();
        assert!(matches!(fit_per_height(&c, 100.0), Err(Error::Fit(_))));
    }

    #[test]
    fn suburban_theoretical_height_fit_is_sane() {
        let s = ScenarioPreset::Suburban.scenario();
        let curve = crate::theoretical::los_probability_curve(100.0, 0.0, &d_grid(), &s).unwrap();
        let f = fit_per_height(&curve, 100.0).unwrap();
        assert!(f.d1 > 0.0 && f.d2 > 0.0);
        assert!(f.d1 < 1000.0);
    }

    #[test]
    fn power_law_examples() {
        let hs = [10.0, 20.0, 50.0, 100.0, 300.0];
        let sqrt: Vec<_> = hs.iter().map(|&h: &f64| (h, 2.0 * h.sqrt())).collect();
        let p = fit_power_law(&sqrt, false).unwrap();
        assert!((p.a - 2.0).abs() < 1e-6 && (p.b - 0.5).abs() < 1e-6 && p.c == 0.0, "{p:?}");

        let affine: Vec<_> = hs.iter().map(|&h| (h, 3.0 * h + 10.0)).collect();
        let p = fit_power_law(&affine, true).unwrap();
        assert!((p.a - 3.0).abs() < 1e-6 && (p.b - 1.0).abs() < 1e-6 && (p.c - 10.0).abs() < 1e-6, "{p:?}");

        let two = [(20.0, 7.0), (80.0, 19.0)];
        let p = fit_power_law(&two, false).unwrap();
        assert!(p.sse < 1e-18);
        assert!((p.eval(20.0) - 7.0).abs() < 1e-9 && (p.eval(80.0) - 19.0).abs() < 1e-9);
    }

    #[test]
    fn power_law_singular() {
        let same = [(50.0, 1.0), (50.0, 2.0), (50.0, 3.0)];
        assert!(matches!(fit_power_law(&same, true), Err(Error::Singular(_))));
        assert!(matches!(fit_power_law(&same, false), Err(Error::Singular(_))));
        assert!(fit_power_law(&[(0.0, 1.0), (1.0, 2.0)], false).is_err());
    }

    #[test]
    fn non_negative_offset_falls_back_to_origin() {
        let s: Vec<_> = [10.0, 20.0, 40.0, 80.0].iter().map(|&h: &f64| (h, 2.0 * h - 15.0)).collect();
        let (free, _) = fit_power_law_inner(&s, Offset::Free).unwrap();
        assert!(free.c < 0.0);
        let (clamped, _) = fit_power_law_inner(&s, Offset::NonNegative).unwrap();
        assert_eq!(clamped.c, 0.0);
    }

    #[test]
    fn surface_round_trip_and_determinism() {
        let truth = ParametricCoeffs::new(0.8, 1.05, 25.0, 22.0, 0.45).unwrap();
        let hs = linear_grid(10.0, 200.0, 10.0).unwrap();
        let target = parametric_surface(&truth, &hs, &d_grid()).unwrap();
        let r = fit_surface(&target, &FitOptions::default()).unwrap();
        assert!(r.final_mse < 1e-10, "{}", r.final_mse);
        for (got, want) in [(r.coeffs.a1, 0.8), (r.coeffs.b1, 1.05), (r.coeffs.c1, 25.0), (r.coeffs.a2, 22.0), (r.coeffs.b2, 0.45)] {
            assert!((got / want - 1.0).abs() < 0.01, "{got} vs {want}");
        }
        let again = fit_surface(&target, &FitOptions::default()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn fit_scenario_is_deterministic() {
        let mut cfg = FitConfig::with_default_grids(ScenarioPreset::Urban.scenario());
        cfg.h_prime_grid = linear_grid(10.0, 200.0, 20.0).unwrap();
        let a = fit_scenario(&cfg).unwrap();
        let b = fit_scenario(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_height.len(), cfg.h_prime_grid.len());
        assert!(a.per_height.iter().all(|f| f.d1 >= 0.0 && f.d2 > 0.0));
        assert_eq!(a.coeffs.label.as_deref(), Some("Urban"));
        assert!(a.final_mse >= 0.0);
    }

    #[test]
    fn fit_failure_names_the_height() {
        let ds = d_grid();
        let rows = [30.0, 60.0, 90.0]
            .iter()
            .map(|&h| ds.iter().map(|&d| eval_breakpoints(3.0 * h, 40.0 * h.sqrt(), d)).collect())
            .chain(std::iter::once(vec![0.4; ds.len()]))
            .collect();
        let target = Surface::from_rows(&[30.0, 60.0, 90.0, 120.0], &ds, rows).unwrap();
        match fit_surface(&target, &FitOptions::default()) {
            Err(Error::FitAtHeight { h_prime, .. }) => assert_eq!(h_prime, 120.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn always_clear_heights_are_left_out_of_regression() {
        // Suburban links at 5 km altitude stay clear over a 1 km grid.
        let mut cfg = FitConfig::with_default_grids(ScenarioPreset::Suburban.scenario());
        cfg.h_prime_grid = vec![20.0, 50.0, 80.0, 5000.0];
        let r = fit_scenario(&cfg).unwrap();
        assert_eq!(r.per_height[3].d1, 1000.0);
        assert!(!r.regression_heights.contains(&5000.0));
        let curve = ProbabilityCurve::new(Axis::Distance, d_grid().into_iter().map(|d| (d, 1.0)).collect()).unwrap();
        assert_eq!(fit_per_height(&curve, 700.0).unwrap().mse, 0.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = FitConfig::with_default_grids(ScenarioPreset::Urban.scenario());
        cfg.d_rx_grid = vec![10.0, 10.0];
        assert!(fit_scenario(&cfg).is_err());
        let mut cfg = FitConfig::with_default_grids(ScenarioPreset::Urban.scenario());
        cfg.tolerance = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tolerance = 1e-6;
        cfg.h_prime_grid.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn error_surface_zero_where_models_agree() {
        // Below the first crossed building both models give exactly 1.
        let s = ScenarioPreset::Suburban.scenario();
        let c = ParametricCoeffs::preset(ScenarioPreset::Suburban);
        let e = error_surface(&c, &s, &[50.0, 100.0], &[10.0, 20.0, 500.0]).unwrap();
        assert_eq!(e.get(0, 0), 0.0);
        assert_eq!(e.get(1, 1), 0.0);
        assert!(e.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn squared_gap_is_quadratic() {
        let g1 = squared_gap(0.5, 0.45);
        let g2 = squared_gap(0.5, 0.40);
        assert!((g2 / g1 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn report_layout() {
        let truth = ParametricCoeffs::new(0.8, 1.05, 25.0, 22.0, 0.45).unwrap();
        let hs = linear_grid(10.0, 60.0, 10.0).unwrap();
        let r = fit_surface(&parametric_surface(&truth, &hs, &d_grid()).unwrap(), &FitOptions::default()).unwrap();
        let mut buf = Vec::new();
        r.write_report(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("h_prime_m,D1_m,D2_m,per_height_mse\n10.000000,"));
        assert_eq!(text.lines().count(), 7);
    }
}
