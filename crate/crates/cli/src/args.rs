use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "a2g-los", version, about = "Air-to-ground line-of-sight probability over built-up terrain")]
pub struct Cli {
    /// Worker threads for `simulate`, `fit` and `compare` (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theoretical (product-over-buildings) LoS probability curve.
    Eval(EvalArgs),
    /// Closed-form LoS probability curve from preset or file coefficients.
    EvalParam(EvalParamArgs),
    /// Fit closed-form coefficients to the theoretical model of a scenario.
    Fit(FitArgs),
    /// Monte Carlo LoS estimate over random Manhattan layouts.
    Simulate(SimulateArgs),
    /// Compare theoretical, closed-form and simulated probabilities.
    Compare(CompareArgs),
    /// First Fresnel zone radius profile along a link.
    Fresnel(FresnelArgs),
    /// Print the built-in scenarios and their closed-form coefficients.
    Presets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Distance,
    Elevation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReceiverArg {
    Street,
    Anywhere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CityArg {
    Resample,
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Theoretical,
    Parametric,
    Simulated,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Preset name (suburban, urban, dense-urban, high-rise-urban) or a
    /// `key = value` file with alpha, beta, gamma and optional name.
    #[arg(long, default_value = "suburban")]
    pub scenario: String,

    /// Override the derived building width W (m).
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceGrid {
    /// Explicit ground distances (m), comma separated; overrides --d-min/--d-max/--d-step.
    #[arg(long = "d", value_delimiter = ',', num_args = 1..)]
    pub d_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    pub d_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub d_step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ElevationGrid {
    /// Explicit elevation angles (degrees), comma separated; used with --axis elevation.
    #[arg(long = "theta", value_delimiter = ',', num_args = 1..)]
    pub theta_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 80.0)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 5.0)]
    pub theta_step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct LinkArgs {
    /// Transmitter height (m).
    #[arg(long, default_value_t = 100.0)]
    pub h_tx: f64,
    /// Receiver height (m).
    #[arg(long, default_value_t = 0.0)]
    pub h_rx: f64,
    #[arg(long, value_enum, default_value_t = AxisArg::Distance)]
    pub axis: AxisArg,
    #[command(flatten)]
    pub distances: DistanceGrid,
    #[command(flatten)]
    pub elevations: ElevationGrid,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalParamArgs {
    /// Preset whose coefficients to use when --coeffs is absent.
    #[arg(long, default_value = "suburban")]
    pub scenario: String,
    /// Coefficient file (`key = value`: a1, b1, c1, a2, b2).
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    #[command(flatten)]
    pub link: LinkArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Heights h' = h_tx − h_rx (m) as `start:end:step` or a comma list.
    #[arg(long, default_value = "10:500:10")]
    pub h_prime_grid: String,
    /// Ground distances (m) as `start:end:step` or a comma list.
    #[arg(long, default_value = "10:1000:10")]
    pub d_grid: String,
    /// Coefficient file to write (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-height report CSV (h_prime_m, D1_m, D2_m, per_height_mse).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Trials per distance.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `uniform` or a comma list of fixed azimuths in degrees.
    #[arg(long, default_value = "uniform")]
    pub azimuth: String,
    #[arg(long, value_enum, default_value_t = ReceiverArg::Street)]
    pub receiver: ReceiverArg,
    #[arg(long, value_enum, default_value_t = CityArg::Resample)]
    pub city: CityArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Output CSV (stdout when absent); a `<out>.meta` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Compare curves at this transmitter height; without it the theoretical
    /// and closed-form models are compared over the whole h' × d grid.
    #[arg(long)]
    pub h_tx: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub h_rx: f64,
    #[arg(long, value_enum, default_value_t = AxisArg::Distance)]
    pub axis: AxisArg,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SourceArg::Theoretical, SourceArg::Parametric])]
    pub sources: Vec<SourceArg>,
    /// Grid mode heights, `start:end:step` or a comma list.
    #[arg(long, default_value = "10:500:10")]
    pub h_prime_grid: String,
    /// Ground distances (m), `start:end:step` or a comma list.
    #[arg(long, default_value = "10:1000:10")]
    pub d_grid: String,
    #[command(flatten)]
    pub elevations: ElevationGrid,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FresnelArgs {
    #[arg(long, default_value_t = 28.0)]
    pub frequency_ghz: f64,
    /// Link length (m).
    #[arg(long, default_value_t = 1000.0)]
    pub distance: f64,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Width (m) for the reported longest admissible link.
    #[arg(long, default_value_t = 2.5)]
    pub width_limit: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
    }
}
