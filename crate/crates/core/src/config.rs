//! Versioned JSON experiment descriptions.
//!
//! The command line harness reads one JSON document per run. The document
//! carries the radar configuration, a scene (explicit targets or a draw
//! specification), the design rows to sweep, the level grid, trial count
//! and seed. Angles cross the wire in degrees and are converted to radians
//! here; everything else is SI (Hz, m, s, m/s).
//!
//! The document format is versioned through its mandatory `schema` field;
//! this build reads [`SCHEMA_VERSION`]. Parsing itself is left to the
//! caller (any serde front end works); this module only defines the wire
//! types and their conversion into a runnable [`Experiment`].

use serde::{Deserialize, Serialize};

use crate::metrics::{SceneBox, Tolerances};
use crate::montecarlo::{CovarianceMode, Experiment, SceneSource};
use crate::scene::{DesignTag, RadarConfig, Target, TargetScene};
use crate::{Error, Result};

/// The one document version this build understands.
pub const SCHEMA_VERSION: u32 = 1;

fn rad(deg: f64) -> f64 {
    deg * std::f64::consts::PI / 180.0
}

fn default_power() -> f64 {
    1.0
}

// ---------------------------------------------------------------------------
// Scene wire types
// ---------------------------------------------------------------------------

/// One target on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub r_m: f64,
    pub v_mps: f64,
    #[serde(default = "default_power")]
    pub power: f64,
}

impl From<TargetSpec> for Target {
    fn from(t: TargetSpec) -> Self {
        Target {
            theta: rad(t.theta_deg),
            phi: rad(t.phi_deg),
            r: t.r_m,
            v: t.v_mps,
            sigma2: t.power,
        }
    }
}

/// Open draw box on the wire; each interval is `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub theta_deg: (f64, f64),
    pub phi_deg: (f64, f64),
    pub r_m: (f64, f64),
    pub v_mps: (f64, f64),
    #[serde(default = "default_power")]
    pub power: f64,
}

impl Default for BoxSpec {
    fn default() -> Self {
        Self {
            theta_deg: (0.0, 90.0),
            phi_deg: (-70.0, 70.0),
            r_m: (100.0, 5000.0),
            v_mps: (10.0, 400.0),
            power: 1.0,
        }
    }
}

impl From<BoxSpec> for SceneBox {
    fn from(b: BoxSpec) -> Self {
        SceneBox {
            theta: (rad(b.theta_deg.0), rad(b.theta_deg.1)),
            phi: (rad(b.phi_deg.0), rad(b.phi_deg.1)),
            r: b.r_m,
            v: b.v_mps,
            sigma2: b.power,
        }
    }
}

/// Scene on the wire: explicit targets or a seeded draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneSpec {
    Fixed { targets: Vec<TargetSpec> },
    Random {
        q: usize,
        #[serde(default, rename = "box")]
        bx: BoxSpec,
    },
}

impl From<&SceneSpec> for SceneSource {
    fn from(s: &SceneSpec) -> Self {
        match s {
            SceneSpec::Fixed { targets } => SceneSource::Fixed {
                scene: TargetScene::new(targets.iter().map(|&t| t.into()).collect()),
            },
            SceneSpec::Random { q, bx } => SceneSource::Random { q: *q, bx: (*bx).into() },
        }
    }
}

/// Matching half-widths on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub r_m: f64,
    pub v_mps: f64,
}

impl From<ToleranceSpec> for Tolerances {
    fn from(t: ToleranceSpec) -> Self {
        Tolerances { theta: rad(t.theta_deg), phi: rad(t.phi_deg), r: t.r_m, v: t.v_mps }
    }
}

// ---------------------------------------------------------------------------
// Top-level document
// ---------------------------------------------------------------------------

fn default_tags() -> Vec<DesignTag> {
    vec!["CCC".parse().expect("static tag")]
}

fn default_trials() -> usize {
    1
}

fn default_mode() -> CovarianceMode {
    CovarianceMode::Sampled
}

/// One experiment document. Only `schema`, `config` and `scene` are
/// mandatory; everything else defaults to a single sampled trial of the
/// fully co-prime row under seed 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema: u32,
    pub config: RadarConfig,
    pub scene: SceneSpec,
    #[serde(default)]
    pub power_sd: Option<f64>,
    #[serde(default = "default_tags")]
    pub tags: Vec<DesignTag>,
    #[serde(default)]
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_mode")]
    pub mode: CovarianceMode,
    #[serde(default)]
    pub tolerances: Option<ToleranceSpec>,
    /// Default output path; a command line flag takes precedence.
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentSpec {
    /// Rejects documents written for another schema version.
    pub fn check_schema(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parameter(format!(
                "unsupported schema version {}, this build reads {SCHEMA_VERSION}",
                self.schema
            )));
        }
        Ok(())
    }

    /// Converts the document into a runnable sweep description, validating
    /// the schema version and the resulting experiment.
    pub fn experiment(&self) -> Result<Experiment> {
        self.check_schema()?;
        let spec = Experiment {
            config: self.config.clone(),
            scene: (&self.scene).into(),
            power_sd: self.power_sd,
            tags: self.tags.clone(),
            snr_grid_db: self.snr_grid_db.clone(),
            trials: self.trials,
            master_seed: self.master_seed,
            mode: self.mode,
            tolerances: self.tolerances.map(Into::into),
        };
        spec.validate()?;
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
