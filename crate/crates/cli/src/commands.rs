use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use a2g_los::curves::{linear_grid, write_comparison_csv};
use a2g_los::fitting::{fit_scenario, parametric_surface, theoretical_surface, FitConfig};
use a2g_los::fresnel;
use a2g_los::geosim::{
    estimate_curve, estimates_to_curve, write_estimates_csv, AzimuthPolicy, CityMode, ReceiverSite, SimConfig,
};
use a2g_los::parametric::distance_for_elevation;
use a2g_los::theoretical::{los_probability_by_elevation, los_probability_curve};
use a2g_los::{max_abs_gap, mean_squared_gap, Axis, BuiltUpScenario, ParametricCoeffs, ProbabilityCurve, ScenarioPreset};

use crate::args::*;
use crate::CliError;

type Meta = Vec<(String, String)>;

fn meta(pairs: &[(&str, String)]) -> Meta {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Usage(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut out: Box<dyn Write>) -> Result<(), CliError> {
    out.flush().map_err(|e| CliError::Model(e.into()))
}

pub fn resolve_scenario(args: &ScenarioArgs) -> Result<BuiltUpScenario, CliError> {
    let base = match args.scenario.parse::<ScenarioPreset>() {
        Ok(p) => p.scenario(),
        Err(_) if Path::new(&args.scenario).is_file() => BuiltUpScenario::load(&args.scenario)?,
        Err(_) => {
            return Err(CliError::Usage(format!(
                "unknown scenario `{}` (expected a preset name or a scenario file)",
                args.scenario
            )))
        }
    };
    Ok(match args.width {
        Some(w) => base.with_width_override(w)?,
        None => base,
    })
}

fn resolve_coeffs(scenario: &str, file: Option<&PathBuf>) -> Result<ParametricCoeffs, CliError> {
    match file {
        Some(path) => Ok(ParametricCoeffs::load(path)?),
        None => scenario
            .parse::<ScenarioPreset>()
            .map(ParametricCoeffs::preset)
            .map_err(|_| CliError::Usage(format!("`{scenario}` is not a preset; pass --coeffs <file>"))),
    }
}

/// `start:end:step` or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("invalid grid `{spec}`: {what}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, step] => {
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
            linear_grid(num(start)?, num(end)?, num(step)?).map_err(|e| bad(&e.to_string()))
        }
        [list] => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect(),
        _ => Err(bad("expected start:end:step or a comma list")),
    }
}

fn describe_grid(values: &[f64]) -> String {
    match values {
        [] => String::new(),
        [x] => format!("{x}"),
        [first, second, ..] => {
            let last = values[values.len() - 1];
            let step = second - first;
            let uniform = values.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1.0));
            if uniform {
                format!("{first}:{last}:{step}")
            } else {
                values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            }
        }
    }
}

fn distances(grid: &DistanceGrid) -> Result<Vec<f64>, CliError> {
    match &grid.d_list {
        Some(list) => Ok(list.clone()),
        None => linear_grid(grid.d_min, grid.d_max, grid.d_step).map_err(|e| CliError::Usage(e.to_string())),
    }
}

/// Elevation angles in degrees.
fn elevations(grid: &ElevationGrid) -> Result<Vec<f64>, CliError> {
    let deg = match &grid.theta_list {
        Some(list) => list.clone(),
        None => linear_grid(grid.theta_min, grid.theta_max, grid.theta_step)
            .map_err(|e| CliError::Usage(e.to_string()))?,
    };
    if let Some(t) = deg.iter().find(|t| !(**t > 0.0 && **t <= 90.0)) {
        return Err(CliError::Usage(format!("elevation {t}° outside (0, 90]")));
    }
    Ok(deg)
}

fn radians(deg: &[f64]) -> Vec<f64> {
    deg.iter().map(|d| d.to_radians()).collect()
}

fn link_meta(scenario: &str, link: &LinkArgs, xs: &[f64]) -> Meta {
    let grid_key = match link.axis {
        AxisArg::Distance => "d_rx_m",
        AxisArg::Elevation => "theta_deg",
    };
    meta(&[
        ("scenario", scenario.to_string()),
        ("h_tx_m", link.h_tx.to_string()),
        ("h_rx_m", link.h_rx.to_string()),
        ("axis", format!("{:?}", link.axis).to_lowercase()),
        (grid_key, describe_grid(xs)),
    ])
}

fn link_grid(link: &LinkArgs) -> Result<Vec<f64>, CliError> {
    match link.axis {
        AxisArg::Distance => distances(&link.distances),
        AxisArg::Elevation => elevations(&link.elevations),
    }
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.scenario)?;
    let xs = link_grid(&args.link)?;
    let curve = match args.link.axis {
        AxisArg::Distance => los_probability_curve(args.link.h_tx, args.link.h_rx, &xs, &scenario)?,
        AxisArg::Elevation => los_probability_by_elevation(args.link.h_tx, args.link.h_rx, &radians(&xs), &scenario)?,
    };
    let mut m = meta(&[("model", "theoretical".into())]);
    m.extend(link_meta(&scenario.describe(), &args.link, &xs));
    let mut out = open_out(args.out.as_deref())?;
    curve.write_csv(&mut out, &m)?;
    finish(out)
}

pub fn eval_param(args: &EvalParamArgs) -> Result<(), CliError> {
    let coeffs = resolve_coeffs(&args.scenario, args.coeffs.as_ref())?;
    let h_prime = args.link.h_tx - args.link.h_rx;
    let xs = link_grid(&args.link)?;
    let curve = match args.link.axis {
        AxisArg::Distance => coeffs.curve(h_prime, &xs)?,
        AxisArg::Elevation => coeffs.elevation_curve(h_prime, &radians(&xs))?,
    };
    let label = coeffs.label.clone().unwrap_or_else(|| "custom".into());
    let mut m = meta(&[
        ("model", "parametric".into()),
        (
            "coefficients",
            format!("a1={} b1={} c1={} a2={} b2={}", coeffs.a1, coeffs.b1, coeffs.c1, coeffs.a2, coeffs.b2),
        ),
    ]);
    m.extend(link_meta(&label, &args.link, &xs));
    let mut out = open_out(args.out.as_deref())?;
    curve.write_csv(&mut out, &m)?;
    finish(out)
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.scenario)?;
    let mut config = FitConfig::with_default_grids(scenario.clone());
    config.h_prime_grid = parse_grid(&args.h_prime_grid)?;
    config.d_rx_grid = parse_grid(&args.d_grid)?;
    let result = fit_scenario(&config)?;
    let m = meta(&[
        ("scenario", scenario.describe()),
        ("h_prime_grid_m", describe_grid(&config.h_prime_grid)),
        ("d_rx_grid_m", describe_grid(&config.d_rx_grid)),
        ("final_mse", format!("{:.9}", result.final_mse)),
        ("max_abs_gap", format!("{:.6}", result.max_abs_gap)),
        ("regression_heights", result.regression_heights.len().to_string()),
    ]);
    let mut out = open_out(args.out.as_deref())?;
    for (k, v) in &m {
        writeln!(out, "# {k}: {v}").map_err(|e| CliError::Model(e.into()))?;
    }
    result.coeffs.to_key_values().write(&mut out)?;
    finish(out)?;
    if let Some(path) = &args.report {
        let mut report = open_out(Some(path))?;
        result.write_report(&mut report, &m)?;
        finish(report)?;
    }
    eprintln!("final_mse = {:.6e}, max_abs_gap = {:.4}", result.final_mse, result.max_abs_gap);
    Ok(())
}

fn azimuth_policy(spec: &str) -> Result<AzimuthPolicy, CliError> {
    if spec.eq_ignore_ascii_case("uniform") {
        return Ok(AzimuthPolicy::Uniform);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map(f64::to_radians))
        .collect::<Result<Vec<_>, _>>()
        .map(AzimuthPolicy::Fixed)
        .map_err(|_| CliError::Usage(format!("invalid --azimuth `{spec}`: expected `uniform` or degrees")))
}

fn sim_config(
    scenario: BuiltUpScenario,
    h_tx: f64,
    h_rx: f64,
    distances: Vec<f64>,
    sim: &SimArgs,
) -> Result<SimConfig, CliError> {
    let mut cfg = SimConfig::new(scenario, h_tx, h_rx, distances);
    cfg.trials_per_distance = sim.trials;
    cfg.seed = sim.seed;
    cfg.azimuth = azimuth_policy(&sim.azimuth)?;
    cfg.receiver_site = match sim.receiver {
        ReceiverArg::Street => ReceiverSite::Street,
        ReceiverArg::Anywhere => ReceiverSite::Anywhere,
    };
    cfg.city = match sim.city {
        CityArg::Resample => CityMode::Resample,
        CityArg::Frozen => CityMode::Frozen,
    };
    Ok(cfg)
}

/// Ground distances for each elevation angle (degrees) at height difference `h_prime`.
fn elevation_distances(h_prime: f64, deg: &[f64]) -> Result<Vec<f64>, CliError> {
    if !(h_prime > 0.0) {
        return Err(CliError::Usage("an elevation axis needs h_tx > h_rx".into()));
    }
    Ok(deg
        .iter()
        .map(|t| distance_for_elevation(h_prime, t.to_radians()))
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.scenario)?;
    let xs = link_grid(&args.link)?;
    let (dists, thetas) = match args.link.axis {
        AxisArg::Distance => (xs.clone(), None),
        AxisArg::Elevation => (elevation_distances(args.link.h_tx - args.link.h_rx, &xs)?, Some(radians(&xs))),
    };
    let cfg = sim_config(scenario, args.link.h_tx, args.link.h_rx, dists, &args.sim)?;
    let estimates = estimate_curve(&cfg)?;
    let kv = cfg.to_key_values();
    let mut m = meta(&[("model", "simulated".into())]);
    m.extend(kv.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    m.extend(link_meta(&cfg.scenario.describe(), &args.link, &xs).into_iter().skip(1).filter(|(k, _)| !k.starts_with("h_")));
    let mut out = open_out(args.out.as_deref())?;
    write_estimates_csv(&mut out, &m, &estimates, thetas.as_deref())?;
    finish(out)?;
    if let Some(path) = &args.out {
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".meta");
        let mut f = open_out(Some(Path::new(&sidecar)))?;
        kv.write(&mut f)?;
        finish(f)?;
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.scenario)?;
    match args.h_tx {
        Some(h_tx) => compare_curves(args, scenario, h_tx),
        None => compare_surfaces(args, scenario),
    }
}

fn compare_surfaces(args: &CompareArgs, scenario: BuiltUpScenario) -> Result<(), CliError> {
    if args.sources.contains(&SourceArg::Simulated) {
        return Err(CliError::Usage("grid comparison covers theoretical and parametric only; pass --h-tx to include simulated".into()));
    }
    let coeffs = resolve_coeffs(&args.scenario.scenario, args.coeffs.as_ref())?;
    let hs = parse_grid(&args.h_prime_grid)?;
    let ds = parse_grid(&args.d_grid)?;
    let theo = theoretical_surface(&scenario, &hs, &ds)?;
    let param = parametric_surface(&coeffs, &hs, &ds)?;
    let (mut worst, mut at, mut sq) = (0.0f64, (hs[0], ds[0]), 0.0);
    for (i, &h) in hs.iter().enumerate() {
        for (j, &d) in ds.iter().enumerate() {
            let gap = (theo.get(i, j) - param.get(i, j)).abs();
            sq += gap * gap;
            if gap > worst {
                worst = gap;
                at = (h, d);
            }
        }
    }
    let mse = sq / (hs.len() * ds.len()) as f64;
    println!("max_abs_gap = {worst:.6} at h' = {} m, d_rx = {} m", at.0, at.1);
    println!("mse = {mse:.6e}");
    if let Some(path) = &args.out {
        let mut out = open_out(Some(path))?;
        let m = meta(&[
            ("scenario", scenario.describe()),
            ("h_rx_m", "0".into()),
            ("h_prime_grid_m", describe_grid(&hs)),
            ("d_rx_grid_m", describe_grid(&ds)),
            ("max_abs_gap", format!("{worst:.6}")),
            ("mse", format!("{mse:.6e}")),
        ]);
        let io = |e: io::Error| CliError::Model(e.into());
        for (k, v) in &m {
            writeln!(out, "# {k}: {v}").map_err(io)?;
        }
        writeln!(out, "h_prime_m,d_rx_m,p_theoretical,p_parametric,abs_gap").map_err(io)?;
        for (i, &h) in hs.iter().enumerate() {
            for (j, &d) in ds.iter().enumerate() {
                let (t, p) = (theo.get(i, j), param.get(i, j));
                writeln!(out, "{h:.6},{d:.6},{t:.6},{p:.6},{:.6}", (t - p).abs()).map_err(io)?;
            }
        }
        finish(out)?;
    }
    Ok(())
}

fn compare_curves(args: &CompareArgs, scenario: BuiltUpScenario, h_tx: f64) -> Result<(), CliError> {
    if args.sources.len() < 2 {
        return Err(CliError::Usage("compare needs at least two --sources".into()));
    }
    let h_prime = h_tx - args.h_rx;
    let (xs, axis_values, dists) = match args.axis {
        AxisArg::Distance => {
            let d = parse_grid(&args.d_grid)?;
            (d.clone(), d.clone(), d)
        }
        AxisArg::Elevation => {
            let deg = elevations(&args.elevations)?;
            let dists = elevation_distances(h_prime, &deg)?;
            (deg.clone(), radians(&deg), dists)
        }
    };
    let want = |s: SourceArg| args.sources.contains(&s);
    let theoretical = match (want(SourceArg::Theoretical), args.axis) {
        (false, _) => None,
        (true, AxisArg::Distance) => Some(los_probability_curve(h_tx, args.h_rx, &axis_values, &scenario)?),
        (true, AxisArg::Elevation) => Some(los_probability_by_elevation(h_tx, args.h_rx, &axis_values, &scenario)?),
    };
    let parametric = if want(SourceArg::Parametric) {
        let coeffs = resolve_coeffs(&args.scenario.scenario, args.coeffs.as_ref())?;
        Some(match args.axis {
            AxisArg::Distance => coeffs.curve(h_prime, &axis_values)?,
            AxisArg::Elevation => coeffs.elevation_curve(h_prime, &axis_values)?,
        })
    } else {
        None
    };
    let simulated = if want(SourceArg::Simulated) {
        let cfg = sim_config(scenario.clone(), h_tx, args.h_rx, dists, &args.sim)?;
        let est = estimate_curve(&cfg)?;
        let axis = match args.axis {
            AxisArg::Distance => Axis::Distance,
            AxisArg::Elevation => Axis::Elevation,
        };
        let curve = match axis {
            Axis::Distance => estimates_to_curve(&est, &cfg)?,
            Axis::Elevation => ProbabilityCurve::new(
                axis,
                axis_values.iter().zip(&est).map(|(&t, e)| (t, e.p_los_hat)).collect(),
            )?,
        };
        Some(curve)
    } else {
        None
    };

    let named = [("theoretical", &theoretical), ("parametric", &parametric), ("simulated", &simulated)];
    let present: Vec<(&str, &ProbabilityCurve)> =
        named.iter().filter_map(|(n, c)| c.as_ref().map(|c| (*n, c))).collect();
    for (i, (na, a)) in present.iter().enumerate() {
        for (nb, b) in &present[i + 1..] {
            println!(
                "{na} vs {nb}: max_abs_gap = {:.6}, mse = {:.6e}",
                max_abs_gap(a, b)?,
                mean_squared_gap(a, b)?
            );
        }
    }
    if let Some(path) = &args.out {
        let mut m = meta(&[
            ("scenario", scenario.describe()),
            ("h_tx_m", h_tx.to_string()),
            ("h_rx_m", args.h_rx.to_string()),
            ("axis", format!("{:?}", args.axis).to_lowercase()),
            (
                if args.axis == AxisArg::Distance { "d_rx_m" } else { "theta_deg" },
                describe_grid(&xs),
            ),
        ]);
        if simulated.is_some() {
            m.push(("trials_per_distance".into(), args.sim.trials.to_string()));
            m.push(("seed".into(), args.sim.seed.to_string()));
        }
        let mut out = open_out(Some(path))?;
        write_comparison_csv(&mut out, &m, theoretical.as_ref(), parametric.as_ref(), simulated.as_ref())?;
        finish(out)?;
    }
    Ok(())
}

pub fn fresnel(args: &FresnelArgs) -> Result<(), CliError> {
    let f = args.frequency_ghz * 1e9;
    let profile = fresnel::profile(f, args.distance, args.samples)?;
    let m = meta(&[
        ("frequency_ghz", args.frequency_ghz.to_string()),
        ("distance_m", args.distance.to_string()),
        ("wavelength_m", format!("{:.6}", fresnel::wavelength(f)?)),
        ("max_width_m", format!("{:.4}", fresnel::max_width(f, args.distance)?)),
        (
            "longest_link_within_width_limit_m",
            format!("{:.1} (limit {} m)", fresnel::longest_link_within_width(f, args.width_limit)?, args.width_limit),
        ),
    ]);
    let mut out = open_out(args.out.as_deref())?;
    profile.write_csv(&mut out, &m)?;
    finish(out)
}

pub fn presets() -> Result<(), CliError> {
    let mut out = open_out(None)?;
    let io = |e: io::Error| CliError::Model(e.into());
    writeln!(out, "# environment parameters").map_err(io)?;
    writeln!(out, "scenario alpha beta gamma W_m S_m").map_err(io)?;
    for p in ScenarioPreset::ALL {
        let s = p.scenario();
        writeln!(
            out,
            "{} {} {} {} {:.2} {:.2}",
            p.key(),
            s.alpha(),
            s.beta(),
            s.gamma(),
            s.width(),
            s.spacing()
        )
        .map_err(io)?;
    }
    writeln!(out, "# closed-form coefficients, D1 = a1*h'^b1 + c1, D2 = a2*h'^b2").map_err(io)?;
    writeln!(out, "scenario a1 b1 c1 a2 b2").map_err(io)?;
    for p in ScenarioPreset::ALL {
        let c = ParametricCoeffs::preset(p);
        writeln!(out, "{} {} {} {} {} {}", p.key(), c.a1, c.b1, c.c1, c.a2, c.b2).map_err(io)?;
    }
    finish(out)
}
