//! Seeded Monte Carlo sweeps over design rows and signal-to-noise levels.
//!
//! One sweep fixes a reference configuration and a scene, realizes each
//! requested design row against the reference, and scores the estimation
//! pipeline at every signal-to-noise level with [`crate::metrics`]. Every
//! trial derives its own generator seed from the master seed and its (row,
//! level, trial) coordinates, so results are reproducible run to run and
//! independent of how trials are scheduled across workers.
//!
//! With the `parallel` feature (on by default) trials of a row run on a
//! rayon pool; without it they run sequentially. Both paths produce
//! identical rows apart from the measured wall time.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ccing::{ccing, CcingOptions, EstimateSet, TargetEstimate};
use crate::crb::crb;
use crate::geometry::SchemeSpec;
use crate::metrics::{
    hit_rate, noise_power_for_snr, power_spread_scene, random_scene, rmse, SceneBox,
    Tolerances, MAX_MATCH_TARGETS,
};
use crate::scene::{check_feasibility, AxisDesign, DesignTag, RadarConfig, TargetScene};
use crate::signal::{analytic_covariance, extract_coarray, sample_covariance, synthesize};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finalizing mixer of the splitmix64 generator; bijective on u64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hierarchical stream seed: the master seed and each path component are
/// folded through the splitmix64 finalizer in turn, so sibling paths land
/// in unrelated regions of the seed space.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = mix64(master ^ GOLDEN);
    for &p in path {
        h = mix64(h.wrapping_add(GOLDEN).wrapping_add(p));
    }
    h
}

/// Seed path lane reserved for scene generation; trial paths start their
/// first component at 1 so the lanes never collide.
const SCENE_LANE: u64 = 0;

// ---------------------------------------------------------------------------
// Design row realization
// ---------------------------------------------------------------------------

/// Builds the concrete configuration for one design row against a reference
/// design.
///
/// Uniform letters take the filled counterpart with the same element count
/// as the reference axis, which keeps all rows on a common physical budget.
/// Co-prime letters keep the reference scheme for that axis, which must
/// itself be co-prime. A `-` row drops the offsets entirely; realizing any
/// offset-bearing row requires the reference to carry offsets.
pub fn realize_tag(base: &RadarConfig, tag: DesignTag) -> Result<RadarConfig> {
    base.validate()?;
    let axis = |design: AxisDesign, scheme: &SchemeSpec, count: usize, name: &str| match design {
        AxisDesign::Uniform => Ok(SchemeSpec::Uniform { count: count as u32 }),
        AxisDesign::Coprime => {
            if matches!(scheme, SchemeSpec::Coprime { .. }) {
                Ok(scheme.clone())
            } else {
                Err(Error::Parameter(format!(
                    "design row {tag} needs a co-prime {name} scheme in the reference design"
                )))
            }
        }
    };
    let spatial = axis(tag.spatial, &base.spatial, base.spatial_set()?.len(), "sensor")?;
    let pri = axis(tag.pri, &base.pri, base.pri_set()?.len(), "pulse")?;
    let fo = match (tag.fo, &base.fo) {
        (None, _) => None,
        (Some(_), None) => {
            return Err(Error::Parameter(format!(
                "design row {tag} needs frequency offsets, but the reference design has none"
            )));
        }
        (Some(design), Some(scheme)) => {
            let count = base.fo_set()?.map_or(0, |s| s.len());
            Some(axis(design, scheme, count, "offset")?)
        }
    };
    let realized = RadarConfig { spatial, fo, pri, ..base.clone() };
    realized.validate()?;
    Ok(realized)
}

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

/// Where the sweep's scene comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SceneSource {
    /// A fully specified scene, reused for every trial.
    Fixed { scene: TargetScene },
    /// One scene drawn from `bx` under the master seed, then reused for
    /// every trial. Minimum separations come from the reference design's
    /// resolution bins.
    Random {
        q: usize,
        #[serde(default)]
        bx: SceneBox,
    },
}

/// How each trial forms its covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceMode {
    /// Draw snapshots at each grid level and use the sample covariance.
    Sampled,
    /// Use the exact ensemble covariance; no randomness enters, the level
    /// grid is ignored and each row is emitted once without a level label.
    Analytic,
}

/// A full sweep description: reference design, scene, design rows, level
/// grid, trial count and master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    /// Reference design; co-prime axes of realized rows are taken from it.
    pub config: RadarConfig,
    pub scene: SceneSource,
    /// Replace target powers by a ramp with this population deviation
    /// around the scene's mean power.
    #[serde(default)]
    pub power_sd: Option<f64>,
    /// Design rows to realize and score.
    pub tags: Vec<DesignTag>,
    /// Signal-to-noise grid in dB (sampled mode).
    pub snr_grid_db: Vec<f64>,
    /// Trials per (row, level) cell.
    pub trials: usize,
    pub master_seed: u64,
    pub mode: CovarianceMode,
    /// Matching half-widths; defaults to the reference design's resolution
    /// bins so every row is scored on a common grid.
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.trials == 0 {
            return Err(Error::Parameter("a sweep needs at least one trial".into()));
        }
        if self.tags.is_empty() {
            return Err(Error::Parameter("a sweep needs at least one design row".into()));
        }
        if self.mode == CovarianceMode::Sampled && self.snr_grid_db.is_empty() {
            return Err(Error::Parameter(
                "sampled sweeps need at least one signal-to-noise level".into(),
            ));
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "signal-to-noise levels must be finite, got {bad} dB"
            )));
        }
        if let Some(sd) = self.power_sd {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(Error::Parameter(format!(
                    "power spread must be finite and non-negative, got {sd}"
                )));
            }
        }
        if let Some(tol) = &self.tolerances {
            tol.validate()?;
        }
        Ok(())
    }

    /// The scene every trial observes: fixed or drawn once from the master
    /// seed, then power-spread if requested.
    pub fn resolve_scene(&self) -> Result<TargetScene> {
        let scene = match &self.scene {
            SceneSource::Fixed { scene } => scene.clone(),
            SceneSource::Random { q, bx } => {
                let sep = Tolerances::resolution_bins(&self.config)?;
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(self.master_seed, &[SCENE_LANE]));
                random_scene(bx, *q, &sep, &mut rng)?
            }
        };
        match self.power_sd {
            Some(sd) if sd > 0.0 => power_spread_scene(&scene, sd),
            _ => Ok(scene),
        }
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// One scored (design row, level) cell. Field order is the emission order.
///
/// Parameters the realized design cannot observe (range without frequency
/// offsets) surface as NaN error and bound entries; the bound entries are
/// also NaN whenever the bound does not exist for the row. `snr_db` is
/// empty in analytic mode. `wall_ms` is measured and therefore the one
/// field that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tag: String,
    pub snr_db: Option<f64>,
    pub trials: usize,
    /// Trials whose estimation pipeline returned an error; they count as
    /// complete misses in `hit_rate` and are excluded from the error
    /// statistics.
    pub failed: usize,
    pub hit_rate: f64,
    pub rmse_theta: f64,
    pub rmse_phi: f64,
    pub rmse_r: f64,
    pub rmse_v: f64,
    pub rcrb_theta: f64,
    pub rcrb_phi: f64,
    pub rcrb_r: f64,
    pub rcrb_v: f64,
    pub wall_ms: f64,
}

/// A design row the sweep could not run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTag {
    pub tag: String,
    pub reason: String,
}

/// Sweep output: scored rows in (tag, level) order, skipped rows, and the
/// scene that was actually observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<MetricsRow>,
    pub skipped: Vec<SkippedTag>,
    pub scene: TargetScene,
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Runs `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Results come back in index order either way.
fn map_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// One trial: covariance by the requested mode, coarray extraction,
/// subspace estimation.
fn run_trial(
    cfg: &RadarConfig,
    scene: &TargetScene,
    q: usize,
    seed: u64,
    snr_db: Option<f64>,
    mode: CovarianceMode,
) -> Result<EstimateSet> {
    match mode {
        CovarianceMode::Sampled => {
            let snaps = synthesize(cfg, scene, seed, snr_db)?;
            let (r_x, r_z) = sample_covariance(&snaps);
            let co = extract_coarray(&r_x, &r_z, cfg, snaps.sigma_n2)?;
            ccing(&co, cfg, q, &CcingOptions::noisy())
        }
        CovarianceMode::Analytic => {
            let (r_x, r_z) = analytic_covariance(cfg, scene)?;
            let co = extract_coarray(&r_x, &r_z, cfg, cfg.sigma_n2)?;
            ccing(&co, cfg, q, &CcingOptions::default())
        }
    }
}

fn run_row(
    cfg: &RadarConfig,
    scene: &TargetScene,
    tol: &Tolerances,
    spec: &Experiment,
    tag: DesignTag,
    tag_idx: usize,
    snr_idx: usize,
    snr_db: Option<f64>,
) -> Result<MetricsRow> {
    let q = scene.len();
    let start = Instant::now();
    let outcomes = map_trials(spec.trials, |j| {
        let seed = derive_seed(
            spec.master_seed,
            &[1 + tag_idx as u64, 1 + snr_idx as u64, j as u64],
        );
        run_trial(cfg, scene, q, seed, snr_db, spec.mode)
    });

    let mut kept: Vec<Vec<TargetEstimate>> = Vec::with_capacity(spec.trials);
    let mut failed = 0usize;
    let mut hit_sum = 0.0f64;
    for outcome in outcomes {
        match outcome {
            Ok(set) => {
                hit_sum += hit_rate(&set.targets, scene, tol)?;
                kept.push(set.targets);
            }
            Err(_) => failed += 1,
        }
    }
    let hit = hit_sum / spec.trials as f64;
    let errors = if kept.is_empty() {
        [f64::NAN; 4]
    } else {
        rmse(&kept, scene, tol)?
    };
    let bound = match snr_db {
        Some(snr) => noise_power_for_snr(scene, snr)
            .and_then(|p| crb(cfg, scene, p))
            .map_or([f64::NAN; 4], |rep| rep.rcrb()),
        None => [f64::NAN; 4],
    };

    Ok(MetricsRow {
        tag: tag.to_string(),
        snr_db,
        trials: spec.trials,
        failed,
        hit_rate: hit,
        rmse_theta: errors[0],
        rmse_phi: errors[1],
        rmse_r: errors[2],
        rmse_v: errors[3],
        rcrb_theta: bound[0],
        rcrb_phi: bound[1],
        rcrb_r: bound[2],
        rcrb_v: bound[3],
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the whole sweep: realize each design row, skip rows the scene makes
/// infeasible (recording why), and score every remaining (row, level) cell.
///
/// Output rows are ordered by (row position in `tags`, level position in
/// the grid) and are identical across runs and worker counts, except for
/// the measured `wall_ms`.
pub fn run_montecarlo(spec: &Experiment) -> Result<SweepReport> {
    spec.validate()?;
    let scene = spec.resolve_scene()?;
    let q = scene.len();
    if q == 0 {
        return Err(Error::Parameter("a sweep needs at least one target".into()));
    }
    if q > MAX_MATCH_TARGETS {
        return Err(Error::Parameter(format!(
            "sweeps score at most {MAX_MATCH_TARGETS} targets, got {q}"
        )));
    }
    let common = match &spec.tolerances {
        Some(tol) => *tol,
        None => Tolerances::resolution_bins(&spec.config)?,
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (tag_idx, &tag) in spec.tags.iter().enumerate() {
        let cfg = match realize_tag(&spec.config, tag) {
            Ok(cfg) => cfg,
            Err(e) => {
                skipped.push(SkippedTag { tag: tag.to_string(), reason: e.to_string() });
                continue;
            }
        };
        let feas = check_feasibility(&cfg, &scene)?;
        if !feas.feasible {
            skipped.push(SkippedTag {
                tag: tag.to_string(),
                reason: format!(
                    "recovery conditions fail for {q} targets \
                     (max supported {}, angles distinct {})",
                    feas.max_targets, feas.angles_distinct
                ),
            });
            continue;
        }
        // Rows without offsets cannot observe range; drop that dimension
        // from matching instead of scoring guaranteed misses.
        let tol = if cfg.fo.is_none() {
            Tolerances { r: f64::INFINITY, ..common }
        } else {
            common
        };

        match spec.mode {
            CovarianceMode::Analytic => {
                rows.push(run_row(&cfg, &scene, &tol, spec, tag, tag_idx, 0, None)?);
            }
            CovarianceMode::Sampled => {
                for (snr_idx, &snr) in spec.snr_grid_db.iter().enumerate() {
                    rows.push(run_row(
                        &cfg,
                        &scene,
                        &tol,
                        spec,
                        tag,
                        tag_idx,
                        snr_idx,
                        Some(snr),
                    )?);
                }
            }
        }
    }
    Ok(SweepReport { rows, skipped, scene })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
