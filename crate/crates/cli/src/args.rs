use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "airfocus",
    version,
    about = "Link budget, lens, Fresnel screen, polarization and channel planning calculator"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Seed for every random draw (overrides a scenario's own seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Free-space loss, Friis received power and power-utilization coefficient.
    Linkbudget(LinkArgs),
    /// Metal-plate lens design and link effect.
    #[command(subcommand)]
    Lens(LensCommand),
    /// Fresnel-zone sizing and screen field enhancement.
    #[command(subcommand)]
    Fresnel(FresnelCommand),
    /// Polarization mismatch and MIMO capacity.
    #[command(subcommand)]
    Polar(PolarCommand),
    /// Sensor sweep simulation, aggregation and channel planning.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Doubling-period fit of a count series.
    #[command(subcommand)]
    Growth(GrowthCommand),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LinkArgs {
    /// Transmit power, dBm.
    #[arg(long, default_value_t = 20.0)]
    pub pt: f64,
    /// Transmit antenna gain, dBi.
    #[arg(long, default_value_t = 0.0)]
    pub gt: f64,
    /// Receive antenna gain, dBi.
    #[arg(long, default_value_t = 0.0)]
    pub gr: f64,
    /// Carrier frequency, Hz.
    #[arg(long, default_value_t = 2.437e9)]
    pub freq: f64,
    /// Path length, m.
    #[arg(long, default_value_t = 10.0)]
    pub dist: f64,
}

#[derive(Debug, Subcommand)]
pub enum LensCommand {
    /// Effective index and face profile.
    Design(LensDesignArgs),
    /// Apply the lens gain to a link.
    Apply(LensApplyArgs),
}

#[derive(Debug, Args)]
pub struct LensDesignArgs {
    /// Plate spacing, m.
    #[arg(long)]
    pub spacing: f64,
    /// Design frequency, Hz.
    #[arg(long, default_value_t = 2.437e9)]
    pub freq: f64,
    /// Focal length, m.
    #[arg(long)]
    pub focal: f64,
    /// Aperture half-angle, degrees.
    #[arg(long, default_value_t = 30.0)]
    pub aperture_deg: f64,
    /// Profile sampling step, degrees.
    #[arg(long, default_value_t = 1.0)]
    pub step_deg: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LensApplyArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    /// Baseline received power, dBm; back-solves the transmit power.
    #[arg(long)]
    pub rx: Option<f64>,
    /// Gain uplift, dB.
    #[arg(long, default_value_t = airfocus::lens::DEFAULT_GAIN_UPLIFT_DB)]
    pub uplift: f64,
    /// Fractional throughput uplift.
    #[arg(long, default_value_t = airfocus::lens::DEFAULT_THROUGHPUT_UPLIFT)]
    pub throughput: f64,
    /// Bearing of the lens as seen from the AP, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub lens_bearing: f64,
    /// Shadow sector width, degrees.
    #[arg(long, default_value_t = 60.0)]
    pub shade_width: f64,
    /// Shadow attenuation, dB.
    #[arg(long, default_value_t = airfocus::lens::DEFAULT_SHADING_ATTENUATION_DB)]
    pub shade_atten: f64,
    /// Client bearing, degrees (repeatable).
    #[arg(long = "client-bearing")]
    pub client_bearings: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// Wavelength, m.
    #[arg(long)]
    pub lambda: f64,
    /// Transmitter to screen plane, m.
    #[arg(long)]
    pub d1: f64,
    /// Screen plane to receiver, m.
    #[arg(long)]
    pub d2: f64,
}

#[derive(Debug, Subcommand)]
pub enum FresnelCommand {
    /// Zone radii on the screen plane.
    Zones {
        #[command(flatten)]
        path: PathArgs,
        /// Number of zones to list.
        #[arg(long, default_value_t = 5)]
        count: u32,
    },
    /// Annular screen covering one zone.
    Screen {
        #[command(flatten)]
        path: PathArgs,
        /// Zone to block.
        #[arg(long)]
        zone: u32,
        /// Apex distance for the shading cone, m (default d1 + d2).
        #[arg(long)]
        cone_distance: Option<f64>,
    },
    /// Receiver field with zone ranges blocked.
    Field(FieldArgs),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Blocked range in zone coordinates, `start:end` (repeatable).
    #[arg(long = "block")]
    pub blocks: Vec<String>,
    /// Block whole zone n (repeatable).
    #[arg(long = "zone")]
    pub zones: Vec<u32>,
    /// Weight zones by the obliquity factor (needs --lambda, --d1, --d2).
    #[arg(long)]
    pub obliquity: bool,
    /// Evaluate numerically even without obliquity.
    #[arg(long)]
    pub quadrature: bool,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    /// Also emit the open-zone partial field up to this zone coordinate.
    #[arg(long)]
    pub curve_max: Option<f64>,
    /// Sampling step of the partial-field curve.
    #[arg(long, default_value_t = 0.05)]
    pub curve_step: f64,
}

#[derive(Debug, Subcommand)]
pub enum PolarCommand {
    /// Mismatch loss between rotated linear antennas.
    Loss(PolarLossArgs),
    /// 2×2 capacity of a dual-polarized channel.
    Capacity(CapacityArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PolarLossArgs {
    /// Rotation between antennas, degrees.
    #[arg(long, default_value_t = 90.0)]
    pub delta_psi: f64,
    /// Diffuse fraction ε.
    #[arg(long, conflicts_with_all = ["isolation_db", "preset"])]
    pub epsilon: Option<f64>,
    /// Crossed-antenna isolation to calibrate ε from, dB.
    #[arg(long, conflicts_with = "preset")]
    pub isolation_db: Option<f64>,
    /// Named environment: sparse-room or metal-rich.
    #[arg(long)]
    pub preset: Option<String>,
    /// Receiver tilt, degrees (positive leans forward).
    #[arg(long)]
    pub tilt_deg: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CapacityArgs {
    /// Signal-to-noise ratio, dB.
    #[arg(long, default_value_t = 20.0)]
    pub snr_db: f64,
    /// Cross-polar leakage in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub xpd: f64,
    /// Add the seeded complex Gaussian perturbation.
    #[arg(long)]
    pub perturb: bool,
    /// Tabulate capacity over xpd = 0, 0.1, …, 1.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Synthesize one sweep per sensor for a scenario file.
    Simulate(SimulateArgs),
    /// Merge sweeps from a file.
    Aggregate(AggregateArgs),
    /// Pick a channel in ap-only and client-aware modes.
    Plan(PlanArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Sweep timestamp, ms.
    #[arg(long, default_value_t = 0)]
    pub t_ms: u64,
    /// Also write the sweeps as JSON lines here.
    #[arg(long)]
    pub sweeps_out: Option<PathBuf>,
    /// Also write the sweeps as binary frames here.
    #[arg(long)]
    pub frames_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    MaxHold,
    Ewma,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Sweeps as JSON lines or concatenated binary frames.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "max-hold")]
    pub mode: ModeArg,
    /// EWMA smoothing factor.
    #[arg(long, default_value_t = airfocus::spectrum::aggregate::DEFAULT_EWMA_ALPHA)]
    pub alpha: f64,
    /// Only use these sensors (repeatable).
    #[arg(long = "sensor")]
    pub sensors: Vec<u16>,
    /// Label for the merged spectrum.
    #[arg(long, default_value = "aggregate")]
    pub position: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Minimax,
    Sum,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Scenario TOML file; sweeps are simulated at the AP and every client.
    #[arg(long, required_unless_present = "sweeps", conflicts_with = "sweeps")]
    pub scenario: Option<PathBuf>,
    /// Recorded sweeps (JSON lines or frames); sensor 0 is the AP.
    #[arg(long)]
    pub sweeps: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "minimax")]
    pub objective: ObjectiveArg,
    /// Candidate channels, comma separated (default 1–14).
    #[arg(long, value_delimiter = ',')]
    pub candidates: Vec<u8>,
    #[arg(long, default_value_t = 0)]
    pub t_ms: u64,
}

#[derive(Debug, Subcommand)]
pub enum GrowthCommand {
    /// Fit the doubling period of a two-column (t_days, count) file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Predict the next doubling after this day (default: last sample).
        #[arg(long)]
        from: Option<f64>,
    },
}
