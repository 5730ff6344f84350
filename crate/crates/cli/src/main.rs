//! Command line harness: configuration-driven access to the simulation,
//! estimation, bound, design-comparison and Monte Carlo sweep pipelines.
//!
//! Every subcommand reads the same JSON experiment document (see the
//! `copulse::config` module) and emits CSV or JSON to a file or stdout.
//! Angles cross both boundaries in degrees.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use copulse::altdesigns::{
    coupling_leakage, coupling_matrix, dwell_occupancy, occupancy_rate, CouplingModel,
    OccupancySpec,
};
use copulse::ccing::{ccing, CcingOptions, EstimateSet};
use copulse::config::ExperimentSpec;
use copulse::crb::crb;
use copulse::geometry::{difference_profile, lag_counts, IndexSet};
use copulse::metrics::noise_power_for_snr;
use copulse::montecarlo::{run_montecarlo, CovarianceMode, Experiment};
use copulse::scene::TargetScene;
use copulse::signal::{
    analytic_covariance, extract_coarray, sample_covariance, synthesize, SnapshotSet,
};

// ---------------------------------------------------------------------------
// Arguments
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "copulse",
    version,
    about = "Simulator and estimator for L-shaped co-pulsing FDA radar"
)]
struct Cli {
    /// JSON experiment document driving every subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the document's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; stdout when neither this nor the document names one.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Index sets and lag structure of the configured design.
    Geometry,
    /// Draw one snapshot set and emit both arms sample by sample.
    Simulate {
        /// Per-realization signal-to-noise ratio in dB; the configured
        /// noise power applies when omitted.
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Run the estimation pipeline once and emit the recovered targets.
    Estimate {
        /// Per-realization signal-to-noise ratio in dB (sampled mode).
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Estimation error bounds for the configured scene.
    Crb {
        /// Sets the noise power from this ratio against the summed target
        /// powers; the configured noise power applies when omitted.
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Mutual-coupling leakage of the configured L-shaped array.
    Coupling {
        /// Nearest-neighbour coupling magnitude.
        #[arg(long)]
        magnitude: Option<f64>,
        /// Nearest-neighbour coupling phase, radians.
        #[arg(long)]
        phase: Option<f64>,
    },
    /// Spectral and dwell occupancy figures for the configured design.
    Occupancy,
    /// The configured Monte Carlo sweep, one row per (design row, level).
    Montecarlo,
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// A rectangular table that renders to CSV rows or a JSON array of
/// objects keyed by the header.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "ragged table row");
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn to_json(&self) -> Result<String> {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut map = serde_json::Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    // Numeric cells stay numbers in JSON; everything else
                    // stays a string.
                    let value = if let Ok(v) = cell.parse::<i64>() {
                        json!(v)
                    } else if let Ok(v) = cell.parse::<f64>() {
                        if v.is_finite() { json!(v) } else { json!(cell) }
                    } else {
                        json!(cell)
                    };
                    map.insert((*key).to_string(), value);
                }
                serde_json::Value::Object(map)
            })
            .collect();
        Ok(serde_json::to_string_pretty(&objects)?)
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips; the decimal separator is
    // always '.'.
    format!("{v}")
}

fn deg(rad: f64) -> f64 {
    rad * 180.0 / std::f64::consts::PI
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            // A closed pipe (e.g. `copulse ... | head`) is not an error.
            if let Err(e) = std::io::stdout().write_all(content.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Document loading
// ---------------------------------------------------------------------------

fn load(cli: &Cli) -> Result<(ExperimentSpec, Experiment)> {
    let path = cli
        .config
        .as_ref()
        .context("this subcommand needs --config <PATH> (a JSON experiment document)")?;
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: ExperimentSpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    doc.check_schema()?;
    let mut spec = doc.experiment()?;
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    Ok((doc, spec))
}

fn out_path<'a>(cli: &'a Cli, doc: &'a ExperimentSpec) -> Option<PathBuf> {
    cli.out.clone().or_else(|| doc.out.as_ref().map(PathBuf::from))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn axis_row(name: &str, set: &IndexSet) -> Vec<String> {
    let profile = difference_profile(set);
    let values =
        set.values().iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    vec![
        name.to_string(),
        set.len().to_string(),
        set.aperture().to_string(),
        profile.contiguous_halfwidth.to_string(),
        profile.nonneg_count.to_string(),
        profile.holes.len().to_string(),
        values,
    ]
}

fn run_geometry(spec: &Experiment, format: Format) -> Result<String> {
    let spatial = spec.config.spatial_set()?;
    let pri = spec.config.pri_set()?;
    let fo = spec.config.fo_set()?;

    let mut table = Table::new(vec![
        "axis",
        "elements",
        "aperture",
        "contiguous_halfwidth",
        "nonneg_lags",
        "holes",
        "positions",
    ]);
    table.push(axis_row("spatial", &spatial));
    if let Some(fo) = &fo {
        table.push(axis_row("fo", fo));
    }
    table.push(axis_row("pri", &pri));
    if let Some(fo) = &fo {
        let (physical, coarray) = lag_counts(&spatial, fo, &pri);
        table.push(vec![
            "design".into(),
            physical.to_string(),
            coarray.to_string(),
            String::new(),
            String::new(),
            String::new(),
            "physical and coarray lag triples".into(),
        ]);
    }
    table.render(format)
}

fn run_simulate(
    spec: &Experiment,
    scene: &TargetScene,
    snr: Option<f64>,
    format: Format,
) -> Result<String> {
    let snaps: SnapshotSet = synthesize(&spec.config, scene, spec.master_seed, snr)?;
    let mut table = Table::new(vec!["sample", "row", "x_re", "x_im", "z_re", "z_im"]);
    for sample in 0..snaps.x.ncols() {
        for row in 0..snaps.x.nrows() {
            let x = snaps.x[(row, sample)];
            let z = snaps.z[(row, sample)];
            table.push(vec![
                sample.to_string(),
                row.to_string(),
                fmt_f64(x.re),
                fmt_f64(x.im),
                fmt_f64(z.re),
                fmt_f64(z.im),
            ]);
        }
    }
    table.render(format)
}

fn estimate_once(spec: &Experiment, scene: &TargetScene, snr: Option<f64>) -> Result<EstimateSet> {
    let cfg = &spec.config;
    let q = scene.len();
    let set = match spec.mode {
        CovarianceMode::Sampled => {
            let snaps = synthesize(cfg, scene, spec.master_seed, snr)?;
            let (r_x, r_z) = sample_covariance(&snaps);
            let co = extract_coarray(&r_x, &r_z, cfg, snaps.sigma_n2)?;
            ccing(&co, cfg, q, &CcingOptions::noisy())?
        }
        CovarianceMode::Analytic => {
            let (r_x, r_z) = analytic_covariance(cfg, scene)?;
            let co = extract_coarray(&r_x, &r_z, cfg, cfg.sigma_n2)?;
            ccing(&co, cfg, q, &CcingOptions::default())?
        }
    };
    Ok(set)
}

fn run_estimate(
    spec: &Experiment,
    scene: &TargetScene,
    snr: Option<f64>,
    format: Format,
) -> Result<String> {
    let set = estimate_once(spec, scene, snr)?;
    match format {
        Format::Csv => {
            let mut table =
                Table::new(vec!["target", "theta_deg", "phi_deg", "r_m", "v_mps"]);
            for (i, t) in set.targets.iter().enumerate() {
                table.push(vec![
                    i.to_string(),
                    fmt_f64(deg(t.theta)),
                    fmt_f64(deg(t.phi)),
                    fmt_f64(t.r),
                    fmt_f64(t.v),
                ]);
            }
            table.render(format)
        }
        Format::Json => {
            let targets: Vec<serde_json::Value> = set
                .targets
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    json!({
                        "target": i,
                        "theta_deg": deg(t.theta),
                        "phi_deg": deg(t.phi),
                        "r_m": t.r,
                        "v_mps": t.v,
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&json!({
                "targets": targets,
                "diagnostics": set.diagnostics,
            }))?)
        }
    }
}

fn run_crb(
    spec: &Experiment,
    scene: &TargetScene,
    snr: Option<f64>,
    format: Format,
) -> Result<String> {
    let sigma_n2 = match snr {
        Some(db) => noise_power_for_snr(scene, db)?,
        None => spec.config.sigma_n2,
    };
    let report = crb(&spec.config, scene, sigma_n2)?;
    let rcrb = report.rcrb();
    match format {
        Format::Csv => {
            let mut table = Table::new(vec!["row", "theta", "phi", "r", "v"]);
            for q in 0..scene.len() {
                table.push(vec![
                    format!("sd_target_{q}"),
                    fmt_f64(report.theta_var[q].sqrt()),
                    fmt_f64(report.phi_var[q].sqrt()),
                    fmt_f64(report.r_var[q].sqrt()),
                    fmt_f64(report.v_var[q].sqrt()),
                ]);
            }
            table.push(vec![
                "rcrb".into(),
                fmt_f64(rcrb[0]),
                fmt_f64(rcrb[1]),
                fmt_f64(rcrb[2]),
                fmt_f64(rcrb[3]),
            ]);
            table.render(format)
        }
        Format::Json => Ok(serde_json::to_string_pretty(&json!({
            "report": report,
            "rcrb_theta": rcrb[0],
            "rcrb_phi": rcrb[1],
            "rcrb_r": rcrb[2],
            "rcrb_v": rcrb[3],
            "sigma_n2": sigma_n2,
        }))?),
    }
}

fn run_coupling(
    spec: &Experiment,
    magnitude: Option<f64>,
    phase: Option<f64>,
    format: Format,
) -> Result<String> {
    let standard = CouplingModel::standard();
    let model = CouplingModel {
        magnitude: magnitude.unwrap_or(standard.magnitude),
        phase: phase.unwrap_or(standard.phase),
    };
    let positions = spec.config.spatial_set()?;
    let h = coupling_matrix(&positions, &model)?;
    let leakage = coupling_leakage(&h);
    let mut table = Table::new(vec!["sensors", "magnitude", "phase", "leakage"]);
    table.push(vec![
        h.nrows().to_string(),
        fmt_f64(model.magnitude),
        fmt_f64(model.phase),
        fmt_f64(leakage),
    ]);
    table.render(format)
}

fn run_occupancy(spec: &Experiment, format: Format) -> Result<String> {
    let cfg = &spec.config;
    let b = cfg.bandwidth();
    let mut table = Table::new(vec!["quantity", "value"]);

    if let Some(fo) = cfg.fo_set()? {
        let profile = difference_profile(&fo);
        // Number of contiguous coarray offsets the design synthesizes.
        let l_f = 2 * profile.contiguous_halfwidth + 1;
        let max_offset = f64::from(fo.aperture()) * cfg.delta_f;
        let entries = [
            ("logarithmic", OccupancySpec::Logarithmic { b, delta_f: cfg.delta_f }),
            ("tdfo", OccupancySpec::Tdfo { b, max_delta_f: max_offset.max(cfg.delta_f) }),
            ("cnfo", OccupancySpec::Cnfo { b, delta_f: cfg.delta_f, l_f }),
            (
                "gnfo_2_3",
                OccupancySpec::Gnfo { b, delta_f: cfg.delta_f, l_f, alpha: 2, beta: 3 },
            ),
            ("coprime_fo", OccupancySpec::CoprimeFo { b, delta_f: cfg.delta_f, l_f }),
        ];
        for (name, occ) in entries {
            match occupancy_rate(&occ) {
                Ok(v) => table.push(vec![name.into(), fmt_f64(v)]),
                Err(e) => table.push(vec![name.into(), format!("unavailable: {e}")]),
            }
        }
    }
    let pri = cfg.pri_set()?;
    table.push(vec!["dwell".into(), fmt_f64(dwell_occupancy(&pri, cfg.t, cfg.t_p)?)]);
    table.render(format)
}

fn run_montecarlo_cmd(spec: &Experiment, format: Format) -> Result<String> {
    let report = run_montecarlo(spec)?;
    for skip in &report.skipped {
        eprintln!("skipped {}: {}", skip.tag, skip.reason);
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                w.serialize(row)?;
            }
            // Serializing zero rows writes nothing, not even a header.
            if report.rows.is_empty() {
                w.write_record([
                    "tag", "snr_db", "trials", "failed", "hit_rate", "rmse_theta",
                    "rmse_phi", "rmse_r", "rmse_v", "rcrb_theta", "rcrb_phi", "rcrb_r",
                    "rcrb_v", "wall_ms",
                ])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => Ok(serde_json::to_string_pretty(&report)?),
    }
}

// ---------------------------------------------------------------------------
// Entry
// ---------------------------------------------------------------------------

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (doc, spec) = load(&cli)?;
    let scene = spec.resolve_scene()?;
    let output = match &cli.command {
        Command::Geometry => run_geometry(&spec, cli.format)?,
        Command::Simulate { snr } => run_simulate(&spec, &scene, *snr, cli.format)?,
        Command::Estimate { snr } => run_estimate(&spec, &scene, *snr, cli.format)?,
        Command::Crb { snr } => run_crb(&spec, &scene, *snr, cli.format)?,
        Command::Coupling { magnitude, phase } => {
            run_coupling(&spec, *magnitude, *phase, cli.format)?
        }
        Command::Occupancy => run_occupancy(&spec, cli.format)?,
        Command::Montecarlo => run_montecarlo_cmd(&spec, cli.format)?,
    };
    write_output(out_path(&cli, &doc).as_ref(), &output)
}
