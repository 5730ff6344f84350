//! Signal synthesis and coarray statistics.
//!
//! Each sensor transmits a pulse train on its own frequency offset; the x
//! arm offsets upward, the z arm downward, so after matched filtering every
//! receive channel separates `2 P_s - 1` offset branches. One range bin of
//! one coherent interval therefore yields a data cube over offset branches,
//! pulse times and sensors, vectorized with the sensor index fastest and
//! the branch index slowest. [`synthesize`] draws such snapshot sets from
//! seeded streams, [`sample_covariance`] and [`analytic_covariance`] form
//! second-order statistics, and [`extract_coarray`] averages covariance
//! entries sharing a (spatial, time, offset) lag triple into the virtual
//! difference-domain measurement the estimator consumes.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{difference_profile, IndexSet, SchemeSpec};
use crate::linalg::{khatri_rao, unvec, C64};
use crate::scene::{RadarConfig, TargetScene};
use crate::{Error, Result, C0};

// ---------------------------------------------------------------------------
// Phase units
// ---------------------------------------------------------------------------

/// Spatial phase per unit sensor index per direction cosine.
pub(crate) fn spatial_unit(config: &RadarConfig) -> f64 {
    2.0 * PI * config.d / config.lambda_b()
}

/// Doppler phase per unit pulse index per meter/second.
pub(crate) fn doppler_unit(config: &RadarConfig) -> f64 {
    4.0 * PI * config.t / config.lambda_b()
}

/// Round-trip offset phase per unit branch value per meter of range.
pub(crate) fn range_unit(config: &RadarConfig) -> f64 {
    4.0 * PI * config.delta_f / C0
}

/// Signed offset branch values, largest first: every positive multiplier,
/// zero, then their negatives. The middle entry is always zero.
pub(crate) fn fo_branch_values(set: &IndexSet) -> Vec<i64> {
    let vals = set.values();
    let mut out: Vec<i64> = vals.iter().rev().map(|&v| i64::from(v)).collect();
    out.extend(vals.iter().skip(1).map(|&v| -i64::from(v)));
    out
}

fn cis(phase: f64) -> C64 {
    C64::new(phase.cos(), phase.sin())
}

// ---------------------------------------------------------------------------
// Steering
// ---------------------------------------------------------------------------

/// Per-target steering vectors, one column per target.
///
/// `a_x` and `a_z` hold the arm responses over sensors, `b` the pulse-time
/// response, and `c` the offset-branch response over all signed branches
/// (a single row of ones when the radar has no offsets). The stacked
/// per-arm steering matrix interleaves them branch-slowest, sensor-fastest.
#[derive(Debug, Clone)]
pub struct SteeringSet {
    pub a_x: Array2<C64>,
    pub a_z: Array2<C64>,
    pub c: Array2<C64>,
    pub b: Array2<C64>,
}

impl SteeringSet {
    /// Full x-arm steering matrix, `(branches * pulses * sensors) x Q`.
    pub fn stacked_x(&self) -> Array2<C64> {
        khatri_rao(&self.c, &khatri_rao(&self.b, &self.a_x))
    }

    /// Full z-arm steering matrix.
    pub fn stacked_z(&self) -> Array2<C64> {
        khatri_rao(&self.c, &khatri_rao(&self.b, &self.a_z))
    }
}

/// Builds the steering set of a scene under a configuration.
pub fn steering(config: &RadarConfig, scene: &TargetScene) -> Result<SteeringSet> {
    config.validate()?;
    for t in &scene.targets {
        t.validate()?;
    }
    let spatial = config.spatial_set()?;
    let pri = config.pri_set()?;
    let fo = config.fo_set()?;
    let su = spatial_unit(config);
    let du = doppler_unit(config);
    let ru = range_unit(config);
    let q = scene.len();

    let xi = spatial.values();
    let eta = pri.values();
    let u: Vec<i64> = fo.as_ref().map_or_else(|| vec![0], fo_branch_values);

    let mut a_x = Array2::zeros((xi.len(), q));
    let mut a_z = Array2::zeros((xi.len(), q));
    let mut b = Array2::zeros((eta.len(), q));
    let mut c = Array2::zeros((u.len(), q));
    for (qi, t) in scene.targets.iter().enumerate() {
        for (ni, &x) in xi.iter().enumerate() {
            a_x[(ni, qi)] = cis(-su * f64::from(x) * t.u_x());
            a_z[(ni, qi)] = cis(-su * f64::from(x) * t.u_z());
        }
        for (ki, &e) in eta.iter().enumerate() {
            b[(ki, qi)] = cis(-du * f64::from(e) * t.v);
        }
        for (fi, &uf) in u.iter().enumerate() {
            c[(fi, qi)] = cis(ru * uf as f64 * t.r);
        }
    }
    Ok(SteeringSet { a_x, a_z, c, b })
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

/// Snapshot matrices for both arms, one column per range bin, plus the
/// noise power that was actually applied.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    pub x: Array2<C64>,
    pub z: Array2<C64>,
    pub sigma_n2: f64,
}

/// One circularly-symmetric complex Gaussian draw with standard deviation
/// `scale` per complex sample. Always consumes exactly two reals so the
/// stream position is independent of `scale`.
fn draw_cn(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * (scale / std::f64::consts::SQRT_2)
}

/// Draws one snapshot set. Reflection coefficients are shared between the
/// arms (stream 0 of the seeded generator); receiver noise uses stream 1 on
/// the x arm and stream 2 on the z arm. With `snr_db` set, the noise power
/// is chosen so the noiseless snapshot energy sits at that ratio above the
/// total noise energy; otherwise `config.sigma_n2` applies.
pub fn synthesize(
    config: &RadarConfig,
    scene: &TargetScene,
    seed: u64,
    snr_db: Option<f64>,
) -> Result<SnapshotSet> {
    let steer = steering(config, scene)?;
    let m_x = steer.stacked_x();
    let m_z = steer.stacked_z();
    let q = scene.len();
    let l_r = config.l_r;
    let d = m_x.nrows();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let mut rho = Array2::zeros((q, l_r));
    for l in 0..l_r {
        for (qi, t) in scene.targets.iter().enumerate() {
            rho[(qi, l)] = draw_cn(&mut rng, t.sigma2.sqrt());
        }
    }
    let mut x = m_x.dot(&rho);
    let mut z = m_z.dot(&rho);

    let sigma_n2 = match snr_db {
        None => config.sigma_n2,
        Some(snr) => {
            let energy: f64 =
                x.iter().map(|v| v.norm_sqr()).sum::<f64>() + z.iter().map(|v| v.norm_sqr()).sum::<f64>();
            energy / (l_r as f64 * (2 * d) as f64 * 10f64.powf(snr / 10.0))
        }
    };
    let sigma_n = sigma_n2.sqrt();

    rng.set_stream(1);
    for l in 0..l_r {
        for row in 0..d {
            x[(row, l)] += draw_cn(&mut rng, sigma_n);
        }
    }
    rng.set_stream(2);
    for l in 0..l_r {
        for row in 0..d {
            z[(row, l)] += draw_cn(&mut rng, sigma_n);
        }
    }
    Ok(SnapshotSet { x, z, sigma_n2 })
}

// ---------------------------------------------------------------------------
// Covariance
// ---------------------------------------------------------------------------

/// Exact covariance of both arms: steering-weighted target powers plus
/// `config.sigma_n2` on the diagonal.
pub fn analytic_covariance(
    config: &RadarConfig,
    scene: &TargetScene,
) -> Result<(Array2<C64>, Array2<C64>)> {
    let steer = steering(config, scene)?;
    let build = |m: Array2<C64>| {
        let d = m.nrows();
        let mut weighted = m.clone();
        for (qi, t) in scene.targets.iter().enumerate() {
            weighted.column_mut(qi).mapv_inplace(|v| v * t.sigma2);
        }
        let mut r = weighted.dot(&m.mapv(|v| v.conj()).reversed_axes());
        for i in 0..d {
            r[(i, i)] += C64::new(config.sigma_n2, 0.0);
        }
        r
    };
    Ok((build(steer.stacked_x()), build(steer.stacked_z())))
}

/// Per-arm sample covariance, snapshots averaged over range bins.
pub fn sample_covariance(snapshots: &SnapshotSet) -> (Array2<C64>, Array2<C64>) {
    let form = |m: &Array2<C64>| {
        let l_r = m.ncols() as f64;
        let mut r = m.dot(&m.mapv(|v| v.conj()).reversed_axes());
        r.mapv_inplace(|v| v / l_r);
        r
    };
    (form(&snapshots.x), form(&snapshots.z))
}

// ---------------------------------------------------------------------------
// Coarray extraction
// ---------------------------------------------------------------------------

/// One contiguous run of lags along a single virtual axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagAxis {
    lags: Vec<i64>,
}

impl LagAxis {
    fn new(lags: Vec<i64>) -> Self {
        debug_assert!(lags.windows(2).all(|w| w[1] == w[0] + 1), "lag run must be contiguous");
        Self { lags }
    }

    pub fn lags(&self) -> &[i64] {
        &self.lags
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    /// Position of a lag inside the run, if covered.
    pub fn index_of(&self, lag: i64) -> Option<usize> {
        let off = lag - self.lags.first()?;
        if off < 0 || off >= self.lags.len() as i64 {
            None
        } else {
            Some(off as usize)
        }
    }
}

/// Sparse axes keep their full two-sided contiguous difference run; uniform
/// axes expose raw element indices instead, since a filled axis gains
/// nothing from differencing.
fn axis_lags(spec: &SchemeSpec, set: &IndexSet) -> LagAxis {
    match spec {
        SchemeSpec::Uniform { .. } => LagAxis::new((0..set.len() as i64).collect()),
        _ => {
            let l = i64::from(difference_profile(set).contiguous_halfwidth);
            LagAxis::new((-l..=l).collect())
        }
    }
}

/// The offset axis is two-sided even when uniform because the demodulated
/// branches physically span both signs.
fn fo_axis_lags(fo: Option<(&SchemeSpec, &IndexSet)>) -> LagAxis {
    match fo {
        None => LagAxis::new(vec![0]),
        Some((SchemeSpec::Uniform { .. }, set)) => {
            let l = set.len() as i64 - 1;
            LagAxis::new((-l..=l).collect())
        }
        Some((_, set)) => {
            let l = i64::from(difference_profile(set).contiguous_halfwidth);
            LagAxis::new((-l..=l).collect())
        }
    }
}

/// Shape of the virtual difference-domain measurement: one lag run per
/// axis, flattened spatial-fastest, offset-slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarrayLayout {
    pub spatial: LagAxis,
    pub time: LagAxis,
    pub fo: LagAxis,
}

impl CoarrayLayout {
    pub fn from_config(config: &RadarConfig) -> Result<Self> {
        let spatial = config.spatial_set()?;
        let pri = config.pri_set()?;
        let fo = config.fo_set()?;
        Ok(Self {
            spatial: axis_lags(&config.spatial, &spatial),
            time: axis_lags(&config.pri, &pri),
            fo: fo_axis_lags(config.fo.as_ref().zip(fo.as_ref())),
        })
    }

    /// Total virtual measurement length.
    pub fn len(&self) -> usize {
        self.spatial.len() * self.time.len() * self.fo.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat position of a lag-index triple.
    pub fn flat_index(&self, f_idx: usize, t_idx: usize, s_idx: usize) -> usize {
        (f_idx * self.time.len() + t_idx) * self.spatial.len() + s_idx
    }

    /// Flat position of the all-zero lag triple, where the noise power
    /// surfaces.
    pub fn zero_index(&self) -> usize {
        self.flat_index(
            self.fo.index_of(0).expect("offset run covers zero"),
            self.time.index_of(0).expect("time run covers zero"),
            self.spatial.index_of(0).expect("spatial run covers zero"),
        )
    }
}

/// Virtual difference-domain measurements for both arms under a shared
/// layout.
#[derive(Debug, Clone)]
pub struct CoarrayVectors {
    pub layout: CoarrayLayout,
    pub rx: Array1<C64>,
    pub rz: Array1<C64>,
}

impl CoarrayVectors {
    /// The x-arm measurement reshaped spatial-lags by (offset, time) pages.
    pub fn x_matrix(&self) -> Array2<C64> {
        let n_s = self.layout.spatial.len();
        unvec(&self.rx, n_s, self.rx.len() / n_s).expect("layout-consistent length")
    }

    /// The z-arm measurement reshaped likewise.
    pub fn z_matrix(&self) -> Array2<C64> {
        let n_s = self.layout.spatial.len();
        unvec(&self.rz, n_s, self.rz.len() / n_s).expect("layout-consistent length")
    }
}

/// Averages covariance entries over identical lag triples and removes the
/// known noise power from the all-zero slot.
///
/// Only covariance rows and columns on non-negative offset branches
/// participate, so the offset axis carries pure branch differences. Every
/// slot of the layout's cartesian lag product is reached by at least one
/// entry; redundant entries are averaged.
pub fn extract_coarray(
    r_x: &Array2<C64>,
    r_z: &Array2<C64>,
    config: &RadarConfig,
    sigma_n2: f64,
) -> Result<CoarrayVectors> {
    config.validate()?;
    let spatial = config.spatial_set()?;
    let pri = config.pri_set()?;
    let fo = config.fo_set()?;
    let layout = CoarrayLayout::from_config(config)?;

    let xi: Vec<i64> = spatial.values().iter().map(|&v| i64::from(v)).collect();
    let eta: Vec<i64> = pri.values().iter().map(|&v| i64::from(v)).collect();
    let u: Vec<i64> = fo.as_ref().map_or_else(|| vec![0], fo_branch_values);
    let p_s = xi.len();
    let k = eta.len();
    let d = u.len() * k * p_s;
    if r_x.dim() != (d, d) || r_z.dim() != (d, d) {
        return Err(Error::Inconsistent(format!(
            "covariance must be {d} x {d} for this configuration, got {:?} and {:?}",
            r_x.dim(),
            r_z.dim()
        )));
    }

    let branches: Vec<usize> = (0..u.len()).filter(|&i| u[i] >= 0).collect();
    let n = layout.len();
    let mut acc_x = vec![C64::new(0.0, 0.0); n];
    let mut acc_z = vec![C64::new(0.0, 0.0); n];
    let mut counts = vec![0u32; n];

    for &fa in &branches {
        for &fb in &branches {
            let Some(f_idx) = layout.fo.index_of(u[fa] - u[fb]) else { continue };
            for ka in 0..k {
                for kb in 0..k {
                    let Some(t_idx) = layout.time.index_of(eta[kb] - eta[ka]) else { continue };
                    for na in 0..p_s {
                        for nb in 0..p_s {
                            let Some(s_idx) = layout.spatial.index_of(xi[nb] - xi[na]) else {
                                continue;
                            };
                            let row = (fa * k + ka) * p_s + na;
                            let col = (fb * k + kb) * p_s + nb;
                            let slot = layout.flat_index(f_idx, t_idx, s_idx);
                            acc_x[slot] += r_x[(row, col)];
                            acc_z[slot] += r_z[(row, col)];
                            counts[slot] += 1;
                        }
                    }
                }
            }
        }
    }
    debug_assert!(counts.iter().all(|&c| c > 0), "every lag slot must be populated");

    let mut rx = Array1::from(acc_x);
    let mut rz = Array1::from(acc_z);
    for (slot, &cnt) in counts.iter().enumerate() {
        let w = C64::new(1.0 / f64::from(cnt), 0.0);
        rx[slot] *= w;
        rz[slot] *= w;
    }
    let zero = layout.zero_index();
    rx[zero] -= C64::new(sigma_n2, 0.0);
    rz[zero] -= C64::new(sigma_n2, 0.0);
    Ok(CoarrayVectors { layout, rx, rz })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
