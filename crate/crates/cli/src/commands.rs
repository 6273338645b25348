//! One handler per subcommand. Each returns a [`Report`] for rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use airfocus::fresnel::{
    field_ratio, field_ratio_quadrature, partial_field_curve, screen_for_zone, shading_cone_deg,
    zone_table, Obliquity, PathGeometry, ZoneInterval,
};
use airfocus::growth::{fit_doubling, predict_doubling_date, CountSeries};
use airfocus::lens::{apply_lens, shading_assessment, LensEffect, LensSpec, ShadingSector};
use airfocus::polar::{
    dual_polarized_channel, mimo_capacity_bps_hz, mismatch_loss_db, tilt_effect_db,
    EnvironmentModel, MimoChannel,
};
use airfocus::rf::{fspl_db, power_utilization, AntennaGain, Frequency, LinkBudget, LinkGeometry};
use airfocus::spectrum::frame::{parse_frames, MAGIC};
use airfocus::spectrum::plan::all_channels;
use airfocus::spectrum::sim::AP_SENSOR_ID;
use airfocus::spectrum::{
    aggregate, encode_frame, read_sweep_lines, select_channel, simulate_sweeps, write_sweep_lines,
    AggregateMode, AggregatedSpectrum, Objective, PlanMode, Scenario, SensorSweep,
};

use crate::args::*;
use crate::output::{num, Report, Table};
use crate::CliError;

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn link_budget(a: &LinkArgs) -> Result<LinkBudget, CliError> {
    let freq = Frequency::from_hz(a.freq).map_err(domain)?;
    let geom = LinkGeometry::new(a.dist, freq).map_err(domain)?;
    let gt = AntennaGain::from_dbi(a.gt).map_err(domain)?;
    let gr = AntennaGain::from_dbi(a.gr).map_err(domain)?;
    LinkBudget::new(a.pt, gt, gr, geom).map_err(domain)
}

pub fn linkbudget(a: &LinkArgs) -> Result<Report, CliError> {
    let budget = link_budget(a)?;
    let k = power_utilization(budget.tx_gain, budget.rx_gain, &budget.geometry).map_err(domain)?;
    Ok(Report::default()
        .field("wavelength_m", num(budget.geometry.wavelength_m()))
        .field("fspl_db", num(fspl_db(&budget.geometry).map_err(domain)?))
        .field("rx_dbm", num(budget.rx_power_dbm()))
        .field("power_utilization", num(k)))
}

pub fn lens(cmd: &LensCommand) -> Result<Report, CliError> {
    match cmd {
        LensCommand::Design(a) => {
            let freq = Frequency::from_hz(a.freq).map_err(domain)?;
            let spec = LensSpec::new(a.spacing, freq, a.focal, a.aperture_deg).map_err(domain)?;
            let profile = spec.profile(a.step_deg).map_err(domain)?;
            let mut table = Table::new(&["theta_deg", "r_m", "y_m", "depth_m"]);
            for s in &profile.samples {
                table.push(vec![
                    num(s.theta_deg),
                    num(s.r_m),
                    num(s.y_m),
                    num(s.depth_m),
                ]);
            }
            Ok(Report::default()
                .field("index", num(spec.index()))
                .field("aperture_half_height_m", num(spec.aperture_half_height_m()))
                .with_table(table))
        }
        LensCommand::Apply(a) => {
            let mut budget = link_budget(&a.link)?;
            if let Some(rx) = a.rx {
                let pt = a.link.pt + (rx - budget.rx_power_dbm());
                budget = LinkBudget::new(pt, budget.tx_gain, budget.rx_gain, budget.geometry)
                    .map_err(domain)?;
            }
            let effect = LensEffect {
                gain_uplift_db: a.uplift,
                throughput_uplift_fraction: a.throughput,
                shading: ShadingSector {
                    bearing_deg: a.lens_bearing,
                    width_deg: a.shade_width,
                    attenuation_db: a.shade_atten,
                },
            };
            let (_, report) = apply_lens(&budget, &effect).map_err(domain)?;
            let mut out = Report::default()
                .field("baseline_rx_dbm", num(report.baseline_rx_dbm))
                .field("lensed_rx_dbm", num(report.lensed_rx_dbm))
                .field("range_ratio", num(report.range_ratio))
                .field("throughput_multiplier", num(report.throughput_multiplier));
            if !a.client_bearings.is_empty() {
                let atten = shading_assessment(a.lens_bearing, &effect, &a.client_bearings);
                let mut table = Table::new(&["bearing_deg", "attenuation_db"]);
                for (b, d) in a.client_bearings.iter().zip(atten) {
                    table.push(vec![num(*b), num(d)]);
                }
                out = out.with_table(table);
            }
            Ok(out)
        }
    }
}

fn path_geometry(p: &PathArgs) -> Result<PathGeometry, CliError> {
    PathGeometry::new(p.d1, p.d2, p.lambda).map_err(domain)
}

fn parse_block(text: &str) -> Result<ZoneInterval, CliError> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--block expects start:end, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("--block bound {s:?} is not a number")))
    };
    Ok(ZoneInterval::new(parse(a)?, parse(b)?))
}

pub fn fresnel(cmd: &FresnelCommand) -> Result<Report, CliError> {
    match cmd {
        FresnelCommand::Zones { path, count } => {
            let geom = path_geometry(path)?;
            let mut table = Table::new(&["n", "r_m", "u"]);
            for (n, r, u) in zone_table(&geom, *count).map_err(domain)? {
                table.push(vec![n.into(), num(r), num(u)]);
            }
            Ok(Report::default().with_table(table))
        }
        FresnelCommand::Screen {
            path,
            zone,
            cone_distance,
        } => {
            let geom = path_geometry(path)?;
            let screen = screen_for_zone(*zone, &geom).map_err(domain)?;
            let distance = cone_distance.unwrap_or(geom.total_m());
            let cone = shading_cone_deg(screen.r_outer_m, distance).map_err(domain)?;
            Ok(Report::default()
                .field("zone", *zone)
                .field("r_inner_m", num(screen.r_inner_m))
                .field("r_outer_m", num(screen.r_outer_m))
                .field("outer_diameter_m", num(screen.outer_diameter_m()))
                .field("cone_distance_m", num(distance))
                .field("cone_deg", num(cone)))
        }
        FresnelCommand::Field(a) => fresnel_field(a),
    }
}

fn fresnel_field(a: &FieldArgs) -> Result<Report, CliError> {
    let mut blocked = a
        .blocks
        .iter()
        .map(|b| parse_block(b))
        .collect::<Result<Vec<_>, _>>()?;
    for &n in &a.zones {
        if n == 0 {
            return Err(CliError::Usage("--zone must be at least 1".into()));
        }
        blocked.push(ZoneInterval::new(f64::from(n - 1), f64::from(n)));
    }
    let geom = match (a.lambda, a.d1, a.d2) {
        (Some(l), Some(d1), Some(d2)) => Some(PathGeometry::new(d1, d2, l).map_err(domain)?),
        (None, None, None) => None,
        _ => {
            return Err(CliError::Usage(
                "--lambda, --d1 and --d2 go together".into(),
            ))
        }
    };
    if a.obliquity && geom.is_none() {
        return Err(CliError::Usage(
            "--obliquity needs --lambda, --d1 and --d2".into(),
        ));
    }
    let weight = geom.filter(|_| a.obliquity);
    let ratio = match (weight, a.quadrature) {
        (Some(g), _) => field_ratio(&blocked, Obliquity::On(g)),
        (None, true) => field_ratio_quadrature(&blocked, None),
        (None, false) => field_ratio(&blocked, Obliquity::Off),
    }
    .map_err(domain)?;
    let mut out = Report::default()
        .field("re", num(ratio.complex_ratio.re))
        .field("im", num(ratio.complex_ratio.im))
        .field("magnitude", num(ratio.magnitude()))
        .field("power_gain_db", num(ratio.power_gain_db()));
    if let Some(u_max) = a.curve_max {
        let curve = partial_field_curve(weight.as_ref(), u_max, a.curve_step).map_err(domain)?;
        let mut table = Table::new(&["u", "partial_field"]);
        for (u, m) in curve {
            table.push(vec![num(u), num(m)]);
        }
        out = out.with_table(table);
    }
    Ok(out)
}

pub fn polar(cmd: &PolarCommand, seed: Option<u64>) -> Result<Report, CliError> {
    match cmd {
        PolarCommand::Loss(a) => {
            let env = match (a.epsilon, a.isolation_db, a.preset.as_deref()) {
                (Some(eps), _, _) => EnvironmentModel::new(eps),
                (_, Some(iso), _) => EnvironmentModel::from_isolation_db(iso),
                (_, _, Some(name)) => EnvironmentModel::preset(name),
                _ => EnvironmentModel::new(0.0),
            }
            .map_err(domain)?;
            let mut out = Report::default()
                .field("diffuse_fraction", num(env.diffuse_fraction))
                .field(
                    "mismatch_db",
                    num(mismatch_loss_db(a.delta_psi, &env).map_err(domain)?),
                );
            if let Some(t) = a.tilt_deg {
                let effect = tilt_effect_db(t.to_radians(), &env).map_err(domain)?;
                out = out.field("tilt_effect_db", num(effect));
            }
            Ok(out)
        }
        PolarCommand::Capacity(a) => {
            let perturb = a.perturb.then(|| seed.unwrap_or(0));
            let capacity = |xpd: f64| -> Result<f64, CliError> {
                let h = dual_polarized_channel(xpd, perturb).map_err(domain)?;
                let ch = MimoChannel::from_snr_db(h, a.snr_db).map_err(domain)?;
                mimo_capacity_bps_hz(&ch).map_err(domain)
            };
            if a.sweep {
                let mut table = Table::new(&["xpd", "capacity_bps_hz"]);
                for k in 0..=10 {
                    let xpd = f64::from(k) / 10.0;
                    table.push(vec![num(xpd), num(capacity(xpd)?)]);
                }
                Ok(Report::default()
                    .field("snr_db", num(a.snr_db))
                    .with_table(table))
            } else {
                Ok(Report::default()
                    .field("snr_db", num(a.snr_db))
                    .field("xpd", num(a.xpd))
                    .field("capacity_bps_hz", num(capacity(a.xpd)?)))
            }
        }
    }
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario, CliError> {
    let text = String::from_utf8(read_bytes(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut scenario: Scenario =
        toml::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    scenario.validate().map_err(domain)?;
    Ok(scenario)
}

/// Reads concatenated binary frames or JSON lines, picked by the leading bytes.
fn load_sweeps(path: &Path) -> Result<Vec<SensorSweep>, CliError> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(&MAGIC) {
        parse_frames(&bytes).map_err(domain)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        read_sweep_lines(&text).map_err(domain)
    }
}

fn position_label(sensor_id: u16) -> String {
    if sensor_id == AP_SENSOR_ID {
        "ap".to_string()
    } else {
        format!("client-{sensor_id}")
    }
}

fn spectrum_table(spec: &AggregatedSpectrum) -> Table {
    let mut table = Table::new(&["freq_mhz", "dbm"]);
    for (i, &v) in spec.bins.iter().enumerate() {
        table.push(vec![num(spec.bin_center_khz(i) / 1000.0), num(v)]);
    }
    table
}

pub fn spectrum(cmd: &SpectrumCommand, seed: Option<u64>) -> Result<Report, CliError> {
    match cmd {
        SpectrumCommand::Simulate(a) => {
            let scenario = load_scenario(&a.scenario, seed)?;
            let positions = scenario.sensor_positions();
            let sweeps = simulate_sweeps(&scenario, &positions, a.t_ms).map_err(domain)?;
            if let Some(p) = &a.sweeps_out {
                write_bytes(p, write_sweep_lines(&sweeps).as_bytes())?;
            }
            if let Some(p) = &a.frames_out {
                let mut bytes = Vec::new();
                for s in &sweeps {
                    bytes.extend(encode_frame(s).map_err(domain)?);
                }
                write_bytes(p, &bytes)?;
            }
            let mut columns = vec!["freq_mhz".to_string()];
            columns.extend(positions.iter().map(|p| p.position_id.clone()));
            let mut table = Table {
                columns,
                rows: Vec::new(),
            };
            for i in 0..sweeps[0].bins.len() {
                let mut row = vec![num(sweeps[0].bin_center_khz(i) / 1000.0)];
                row.extend(sweeps.iter().map(|s| s.bins[i].into()));
                table.push(row);
            }
            Ok(Report::default()
                .field("seed", scenario.seed)
                .field("sensors", sweeps.len())
                .with_table(table))
        }
        SpectrumCommand::Aggregate(a) => {
            let mut sweeps = load_sweeps(&a.input)?;
            if !a.sensors.is_empty() {
                sweeps.retain(|s| a.sensors.contains(&s.sensor_id));
            }
            let mode = match a.mode {
                ModeArg::MaxHold => AggregateMode::MaxHold,
                ModeArg::Ewma => AggregateMode::Ewma { alpha: a.alpha },
            };
            let spec = aggregate(&a.position, &sweeps, mode).map_err(domain)?;
            Ok(Report::default()
                .field("position", spec.position_id.clone())
                .field("sweeps", sweeps.len())
                .with_table(spectrum_table(&spec)))
        }
        SpectrumCommand::Plan(a) => spectrum_plan(a, seed),
    }
}

fn spectrum_plan(a: &PlanArgs, seed: Option<u64>) -> Result<Report, CliError> {
    let sweeps = match (&a.scenario, &a.sweeps) {
        (Some(path), _) => {
            let scenario = load_scenario(path, seed)?;
            simulate_sweeps(&scenario, &scenario.sensor_positions(), a.t_ms).map_err(domain)?
        }
        (None, Some(path)) => load_sweeps(path)?,
        (None, None) => return Err(CliError::Usage("need --scenario or --sweeps".into())),
    };
    let mut by_sensor: BTreeMap<u16, Vec<SensorSweep>> = BTreeMap::new();
    for s in sweeps {
        by_sensor.entry(s.sensor_id).or_default().push(s);
    }
    let ap_sweeps = by_sensor
        .remove(&AP_SENSOR_ID)
        .ok_or_else(|| CliError::Domain(format!("no sweeps from AP sensor {AP_SENSOR_ID}")))?;
    let ap = aggregate("ap", &ap_sweeps, AggregateMode::MaxHold).map_err(domain)?;
    let clients = by_sensor
        .iter()
        .map(|(&id, sw)| {
            let label = position_label(id);
            aggregate(&label, sw, AggregateMode::MaxHold).map(|spec| (label, spec))
        })
        .collect::<Result<BTreeMap<_, _>, _>>()
        .map_err(domain)?;
    let candidates: BTreeSet<u8> = if a.candidates.is_empty() {
        all_channels()
    } else {
        a.candidates.iter().copied().collect()
    };
    let objective = match a.objective {
        ObjectiveArg::Minimax => Objective::Minimax,
        ObjectiveArg::Sum => Objective::WeightedSum(BTreeMap::new()),
    };
    let ap_only =
        select_channel(&ap, &clients, PlanMode::ApOnly, &candidates, &objective).map_err(domain)?;
    let aware = select_channel(
        &ap,
        &clients,
        PlanMode::ClientAware,
        &candidates,
        &objective,
    )
    .map_err(domain)?;

    let mut columns = vec![
        "channel",
        "ap_only_objective_mw",
        "client_aware_objective_mw",
    ];
    let labels: Vec<String> = clients.keys().cloned().collect();
    columns.extend(labels.iter().map(String::as_str));
    let mut table = Table::new(&columns);
    for ch in &candidates {
        let a_only = &ap_only.per_channel_scores[ch];
        let aw = &aware.per_channel_scores[ch];
        let mut row = vec![(*ch).into(), num(a_only.objective), num(aw.objective)];
        row.extend(labels.iter().map(|l| num(aw.per_position_mw[l])));
        table.push(row);
    }
    Ok(Report::default()
        .field("ap_only_channel", ap_only.chosen_channel)
        .field("client_aware_channel", aware.chosen_channel)
        .field("positions", 1 + clients.len())
        .with_table(table))
}

pub fn growth(cmd: &GrowthCommand) -> Result<Report, CliError> {
    match cmd {
        GrowthCommand::Fit { input, from } => {
            let text = String::from_utf8(read_bytes(input)?)
                .map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
            let series = CountSeries::parse(&text).map_err(domain)?;
            let fit = fit_doubling(&series).map_err(domain)?;
            let last = series.points().last().map_or(0.0, |p| p.0);
            let from = from.unwrap_or(last);
            let next = predict_doubling_date(&fit, from).map_err(domain)?;
            Ok(Report::default()
                .field("points", series.points().len())
                .field("doubling_days", num(fit.doubling_days))
                .field("intercept_log2", num(fit.intercept_log2))
                .field("r_squared", num(fit.r_squared))
                .field("from_day", num(from))
                .field("next_doubling_day", num(next)))
        }
    }
}
