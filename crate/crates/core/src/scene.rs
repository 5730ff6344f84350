//! Radar configuration, target scenes, and feasibility analysis.
//!
//! A [`RadarConfig`] fixes the hardware: base carrier, frequency-offset step,
//! element spacing, pulse interval and width, snapshot count, and the three
//! index-set schemes (sensors, frequency offsets, pulse times). A
//! [`TargetScene`] lists point targets by elevation, azimuth, range, radial
//! velocity and reflected power. [`check_feasibility`] evaluates the
//! operating conditions under which the estimation pipeline provably
//! recovers all targets, and [`min_resources`] inverts those conditions into
//! the smallest sensor and pulse counts for a given design row.
//!
//! All quantities are SI: Hz, meters, seconds, radians. Conversions from
//! friendlier wire units (degrees, kHz) belong to the CLI layer.

use serde::{Deserialize, Serialize};

use crate::geometry::{difference_profile, generate_index_set, IndexSet, SchemeSpec};
use crate::{Error, Result, C0};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Physical and structural parameters of the L-shaped co-pulsing radar.
///
/// Both arms of the L share the same spatial scheme and the element at the
/// origin. When `fo` is `Some`, each sensor owns one frequency offset (the
/// x-arm transmits at `f_b + fo[i]*delta_f`, the z-arm at `f_b -
/// fo[i]*delta_f`), so the offset set must have exactly as many entries as
/// the spatial set. `None` models a single-tone radar without range
/// estimation support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    /// Base carrier frequency, Hz.
    pub f_b: f64,
    /// Frequency-offset step, Hz.
    pub delta_f: f64,
    /// Element spacing unit, meters.
    pub d: f64,
    /// Fundamental pulse repetition interval, seconds.
    pub t: f64,
    /// Pulse width, seconds. The transmitted bandwidth is `1/t_p`.
    pub t_p: f64,
    /// Number of snapshots (range-bin samples) per pulse.
    pub l_r: usize,
    /// Receiver noise power per sample.
    pub sigma_n2: f64,
    /// Sensor position scheme (same on both arms).
    pub spatial: SchemeSpec,
    /// Frequency-offset scheme, or `None` for a single-tone radar.
    pub fo: Option<SchemeSpec>,
    /// Pulse time scheme.
    pub pri: SchemeSpec,
}

impl RadarConfig {
    /// Base wavelength `c / f_b`, meters.
    pub fn lambda_b(&self) -> f64 {
        C0 / self.f_b
    }

    /// Transmitted bandwidth per pulse `1 / t_p`, Hz.
    pub fn bandwidth(&self) -> f64 {
        1.0 / self.t_p
    }

    /// Sensor positions in units of `d`.
    pub fn spatial_set(&self) -> Result<IndexSet> {
        generate_index_set(&self.spatial)
    }

    /// Frequency-offset multipliers in units of `delta_f`, if any.
    pub fn fo_set(&self) -> Result<Option<IndexSet>> {
        self.fo.as_ref().map(|s| generate_index_set(s)).transpose()
    }

    /// Pulse times in units of `t`.
    pub fn pri_set(&self) -> Result<IndexSet> {
        generate_index_set(&self.pri)
    }

    /// Structural validation: positive physical quantities, generatable
    /// schemes, one frequency offset per sensor.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_b", self.f_b),
            ("delta_f", self.delta_f),
            ("d", self.d),
            ("t", self.t),
            ("t_p", self.t_p),
            ("sigma_n2", self.sigma_n2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and non-negative")));
            }
        }
        if self.f_b <= 0.0 || self.delta_f <= 0.0 || self.d <= 0.0 || self.t <= 0.0 {
            return Err(Error::Parameter("f_b, delta_f, d, t must be positive".into()));
        }
        if self.t_p <= 0.0 || self.t_p > self.t {
            return Err(Error::Parameter("pulse width must satisfy 0 < t_p <= t".into()));
        }
        if self.l_r == 0 {
            return Err(Error::Parameter("snapshot count l_r must be at least 1".into()));
        }
        let spatial = self.spatial_set()?;
        if let Some(fo) = self.fo_set()? {
            if fo.len() != spatial.len() {
                return Err(Error::Inconsistent(format!(
                    "each sensor owns one frequency offset: {} sensors vs {} offsets",
                    spatial.len(),
                    fo.len()
                )));
            }
        }
        self.pri_set()?;
        Ok(())
    }

    /// The design-row tag of this configuration, when every axis is either
    /// uniform or co-prime.
    pub fn tag(&self) -> Option<DesignTag> {
        let axis = |s: &SchemeSpec| match s {
            SchemeSpec::Uniform { .. } => Some(AxisDesign::Uniform),
            SchemeSpec::Coprime { .. } => Some(AxisDesign::Coprime),
            _ => None,
        };
        Some(DesignTag {
            spatial: axis(&self.spatial)?,
            fo: match &self.fo {
                None => None,
                Some(s) => Some(axis(s)?),
            },
            pri: axis(&self.pri)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

/// One far-field point target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// Elevation, radians, strictly inside (0, pi/2).
    pub theta: f64,
    /// Azimuth, radians, strictly inside (-pi/2, pi/2).
    pub phi: f64,
    /// Range, meters, non-negative.
    pub r: f64,
    /// Radial velocity, meters/second, non-negative.
    pub v: f64,
    /// Mean reflected power, positive.
    pub sigma2: f64,
}

impl Target {
    pub fn validate(&self) -> Result<()> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(self.theta > 0.0 && self.theta < half_pi) {
            return Err(Error::Parameter(format!(
                "elevation must lie strictly inside (0, pi/2), got {}",
                self.theta
            )));
        }
        if !(self.phi > -half_pi && self.phi < half_pi) {
            return Err(Error::Parameter(format!(
                "azimuth must lie strictly inside (-pi/2, pi/2), got {}",
                self.phi
            )));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::Parameter(format!("range must be non-negative, got {}", self.r)));
        }
        if !(self.v.is_finite() && self.v >= 0.0) {
            return Err(Error::Parameter(format!("velocity must be non-negative, got {}", self.v)));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::Parameter(format!("power must be positive, got {}", self.sigma2)));
        }
        Ok(())
    }

    /// Direction cosine along the x arm, `sin(theta) sin(phi)`.
    pub fn u_x(&self) -> f64 {
        self.theta.sin() * self.phi.sin()
    }

    /// Direction cosine along the z arm, `sin(theta) cos(phi)`.
    pub fn u_z(&self) -> f64 {
        self.theta.sin() * self.phi.cos()
    }
}

/// A collection of targets observed in one coherent processing interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetScene {
    pub targets: Vec<Target>,
}

impl TargetScene {
    pub fn new(targets: Vec<Target>) -> Self {
        Self { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Per-target validation plus the angular-ambiguity requirement: no two
    /// targets may share a direction cosine along either arm. Comparison is
    /// exact; near-coincident scenes pass here and are instead flagged by the
    /// estimator's conditioning guard.
    pub fn validate(&self) -> Result<()> {
        for t in &self.targets {
            t.validate()?;
        }
        if !self.angles_distinct() {
            return Err(Error::Infeasible(
                "two targets share a direction cosine along one arm".into(),
            ));
        }
        Ok(())
    }

    /// True when all pairwise direction cosines differ along both arms.
    pub fn angles_distinct(&self) -> bool {
        let n = self.targets.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&self.targets[i], &self.targets[j]);
                if a.u_x() == b.u_x() || a.u_z() == b.u_z() {
                    return false;
                }
            }
        }
        true
    }

    /// True when every single parameter dimension is pairwise distinct.
    pub fn all_parameters_distinct(&self) -> bool {
        let n = self.targets.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&self.targets[i], &self.targets[j]);
                if a.theta == b.theta || a.phi == b.phi || a.r == b.r || a.v == b.v {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Design tags
// ---------------------------------------------------------------------------

/// Whether one axis of a design row uses a filled or a co-prime pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisDesign {
    Uniform,
    Coprime,
}

/// A design row in three-letter grammar: array, frequency offsets, pulsing.
/// `U` is uniform, `C` co-prime, and `-` (offsets only) no offsets at all.
/// The fully co-prime row `CCC` is the co-pulsing design this crate is
/// about; `UUU` is its filled counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DesignTag {
    pub spatial: AxisDesign,
    pub fo: Option<AxisDesign>,
    pub pri: AxisDesign,
}

impl DesignTag {
    /// All twelve rows, non-FDA designs first.
    pub fn all() -> [DesignTag; 12] {
        let parse = |s: &str| s.parse::<DesignTag>().expect("static tag");
        [
            parse("U-U"),
            parse("U-C"),
            parse("C-U"),
            parse("C-C"),
            parse("UUU"),
            parse("UUC"),
            parse("UCU"),
            parse("UCC"),
            parse("CUU"),
            parse("CUC"),
            parse("CCU"),
            parse("CCC"),
        ]
    }

    /// Sensor-count bound type: the co-prime square-root bound applies when
    /// the array is co-prime and the offsets do not collapse the spatial
    /// coarray (uniform offsets do; co-prime or absent offsets do not).
    fn sensors_use_coarray_bound(&self) -> bool {
        self.spatial == AxisDesign::Coprime && self.fo != Some(AxisDesign::Uniform)
    }

    /// Pulse-count bound type: the square-root bound applies exactly when
    /// pulsing is co-prime.
    fn pulses_use_coarray_bound(&self) -> bool {
        self.pri == AxisDesign::Coprime
    }
}

impl std::fmt::Display for DesignTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ch = |a: AxisDesign| match a {
            AxisDesign::Uniform => 'U',
            AxisDesign::Coprime => 'C',
        };
        write!(
            f,
            "{}{}{}",
            ch(self.spatial),
            self.fo.map_or('-', ch),
            ch(self.pri)
        )
    }
}

impl std::str::FromStr for DesignTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axis = |c: char| match c {
            'U' | 'u' => Ok(AxisDesign::Uniform),
            'C' | 'c' => Ok(AxisDesign::Coprime),
            other => Err(Error::Parameter(format!("unknown axis letter '{other}' in tag '{s}'"))),
        };
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 3 {
            return Err(Error::Parameter(format!(
                "design tag must be three letters like CCC or C-U, got '{s}'"
            )));
        }
        Ok(DesignTag {
            spatial: axis(chars[0])?,
            fo: if chars[1] == '-' { None } else { Some(axis(chars[1])?) },
            pri: axis(chars[2])?,
        })
    }
}

impl From<DesignTag> for String {
    fn from(t: DesignTag) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for DesignTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

/// Outcome of checking a configuration/scene pair against the recovery
/// conditions. Conditions that do not apply to the design row are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// Element spacing at most half the base wavelength.
    pub c1: Option<bool>,
    /// Pulse interval short enough for the fastest scene target.
    pub c2: Option<bool>,
    /// Offset step small enough for the farthest scene target. Applies only
    /// when frequency offsets are present.
    pub c3: Option<bool>,
    /// Spatial coarray large enough: `L_s > (Q-1)/2`. Applies when the
    /// sensor-count bound is of coarray type.
    pub c4: Option<bool>,
    /// Pulse coarray large enough: `L_t > (Q-1)/2`. Applies when the
    /// pulse-count bound is of coarray type.
    pub c5: Option<bool>,
    /// Enough physical sensors: `P_s > Q`. Complement of `c4`.
    pub c6: Option<bool>,
    /// Enough physical pulses: `K > Q`. Complement of `c5`.
    pub c7: Option<bool>,
    /// No two targets share a direction cosine along either arm.
    pub angles_distinct: bool,
    /// Contiguous halfwidth of the spatial difference set.
    pub l_s: u32,
    /// Contiguous halfwidth of the pulse-time difference set.
    pub l_t: u32,
    /// Contiguous halfwidth of the offset difference set, if offsets exist.
    pub l_f: Option<u32>,
    /// Unambiguous range `c t / 2`, meters.
    pub r_max: f64,
    /// Unambiguous velocity `c / (2 f_b t)`, meters/second.
    pub v_max: f64,
    /// Capacity for the given scene's distinctness pattern.
    pub max_targets: u64,
    /// Smallest sensor count per arm that would support this scene, when the
    /// configuration matches a design row.
    pub min_sensors: Option<u32>,
    /// Smallest pulse count that would support this scene, likewise.
    pub min_pulses: Option<u32>,
    /// Conjunction of every applicable condition and the angle check.
    pub feasible: bool,
}

/// Unambiguous range and velocity limits `(c t / 2, c / (2 f_b t))` implied
/// by the pulse interval and carrier.
pub fn unambiguous_limits(config: &RadarConfig) -> (f64, f64) {
    (C0 * config.t / 2.0, C0 / (2.0 * config.f_b * config.t))
}

/// Whether an axis exploits its difference set (any sparse design) rather
/// than raw element count (uniform).
fn coarray_type(spec: &SchemeSpec) -> bool {
    !matches!(spec, SchemeSpec::Uniform { .. })
}

/// Per-axis capacity: distinct usable steering rows along that axis.
fn axis_dof(spec: &SchemeSpec, set: &IndexSet) -> u64 {
    if coarray_type(spec) {
        2 * u64::from(difference_profile(set).contiguous_halfwidth)
    } else {
        set.len() as u64
    }
}

/// Evaluates every applicable recovery condition for a configuration/scene
/// pair. Violations are reported, not raised; errors occur only for
/// structurally invalid configurations.
pub fn check_feasibility(config: &RadarConfig, scene: &TargetScene) -> Result<FeasibilityReport> {
    config.validate()?;
    for t in &scene.targets {
        t.validate()?;
    }
    let spatial = config.spatial_set()?;
    let fo = config.fo_set()?;
    let pri = config.pri_set()?;
    let q = scene.len() as u32;

    let l_s = difference_profile(&spatial).contiguous_halfwidth;
    let l_t = difference_profile(&pri).contiguous_halfwidth;
    let l_f = fo.as_ref().map(|s| difference_profile(s).contiguous_halfwidth);
    let (r_max, v_max) = unambiguous_limits(config);

    let c1 = config.d <= C0 / (2.0 * config.f_b);
    let c2 = scene.targets.iter().all(|t| t.v <= v_max);
    let c3 = fo
        .as_ref()
        .map(|_| scene.targets.iter().all(|t| t.r <= C0 / (2.0 * config.delta_f)));

    // The sensor-count condition comes in two flavours; which one applies is
    // decided by the same rule as the resource bounds. A non-tabulated sparse
    // scheme is treated as coarray type.
    let sensors_coarray = match config.tag() {
        Some(tag) => tag.sensors_use_coarray_bound(),
        None => coarray_type(&config.spatial),
    };
    let pulses_coarray = match config.tag() {
        Some(tag) => tag.pulses_use_coarray_bound(),
        None => coarray_type(&config.pri),
    };
    let (c4, c6) = if sensors_coarray {
        (Some(u64::from(l_s) * 2 >= u64::from(q)), None)
    } else {
        (None, Some(spatial.len() as u64 > u64::from(q)))
    };
    let (c5, c7) = if pulses_coarray {
        (Some(u64::from(l_t) * 2 >= u64::from(q)), None)
    } else {
        (None, Some(pri.len() as u64 > u64::from(q)))
    };

    let angles_distinct = scene.angles_distinct();
    let max_targets = max_targets(config, scene.all_parameters_distinct())?;
    let (min_sensors, min_pulses) = match (config.tag(), q) {
        (Some(tag), q) if q >= 1 => {
            let (s, p) = min_resources(tag, q)?;
            (Some(s), Some(p))
        }
        _ => (None, None),
    };

    let feasible = [Some(c1), Some(c2), c3, c4, c5, c6, c7]
        .into_iter()
        .flatten()
        .all(|ok| ok)
        && angles_distinct;

    Ok(FeasibilityReport {
        c1: Some(c1),
        c2: Some(c2),
        c3,
        c4,
        c5,
        c6,
        c7,
        angles_distinct,
        l_s,
        l_t,
        l_f,
        r_max,
        v_max,
        max_targets,
        min_sensors,
        min_pulses,
        feasible,
    })
}

/// Smallest sensor and pulse counts that guarantee recovery of `q` targets
/// for a design row: the smallest integers strictly above the row's bounds
/// (`q` for count-type axes, `2 sqrt(q+1) - 2` for coarray-type axes).
pub fn min_resources(tag: DesignTag, q: u32) -> Result<(u32, u32)> {
    if q == 0 {
        return Err(Error::Parameter("resource bounds need at least one target".into()));
    }
    let coarray_bound = |q: u32| -> u32 {
        // Smallest s with s > 2 sqrt(q+1) - 2, i.e. (s+2)^2 > 4(q+1),
        // computed in exact integer arithmetic.
        let target = 4 * (u64::from(q) + 1);
        let mut s = 1u32;
        while u64::from(s + 2) * u64::from(s + 2) <= target {
            s += 1;
        }
        s
    };
    let sensors =
        if tag.sensors_use_coarray_bound() { coarray_bound(q) } else { q + 1 };
    let pulses = if tag.pulses_use_coarray_bound() { coarray_bound(q) } else { q + 1 };
    Ok((sensors, pulses))
}

/// Capacity of a configuration: how many targets the pipeline can tell
/// apart. With every parameter dimension pairwise distinct the binding
/// constraint is the smaller of the spatial and temporal capacities; with
/// repeats allowed the capacities multiply across all four signal domains
/// (x arm, z arm, offsets, pulses).
pub fn max_targets(config: &RadarConfig, all_distinct: bool) -> Result<u64> {
    let spatial = config.spatial_set()?;
    let fo = config.fo_set()?;
    let pri = config.pri_set()?;
    let dof_s = axis_dof(&config.spatial, &spatial);
    let dof_t = axis_dof(&config.pri, &pri);
    if all_distinct {
        Ok(dof_s.min(dof_t))
    } else {
        let dof_f = match (&config.fo, &fo) {
            (Some(spec), Some(set)) => axis_dof(spec, set),
            _ => 1,
        };
        Ok(dof_s * dof_s * dof_f * dof_t)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
