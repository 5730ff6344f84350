//! Scoring of estimate ensembles against ground truth, plus the scene
//! synthesis helpers used by benchmark sweeps.
//!
//! Two scores are provided. [`hit_rate`] counts how many true targets are
//! matched by some estimate within a per-dimension tolerance box, using
//! greedy one-to-one matching. [`rmse`] reports the per-parameter root mean
//! square error of an ensemble of trials, pairing estimates to targets by
//! the assignment that minimizes the tolerance-normalized distance in each
//! trial.
//!
//! Default tolerances come from [`Tolerances::resolution_bins`]: one virtual
//! resolution bin per dimension, derived from the contiguous coarray widths
//! of the configuration.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ccing::TargetEstimate;
use crate::geometry::difference_profile;
use crate::scene::{RadarConfig, Target, TargetScene};
use crate::{Error, Result, C0};

/// Largest target count for which the per-trial optimal assignment is
/// searched exhaustively.
pub const MAX_MATCH_TARGETS: usize = 7;

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

/// Per-parameter matching half-widths: radians for the angles, meters for
/// range, meters per second for velocity.
///
/// An infinite entry disables its dimension, which is how configurations
/// without frequency offsets (range reported as NaN) still participate in
/// matching on the remaining three parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub theta: f64,
    pub phi: f64,
    pub r: f64,
    pub v: f64,
}

impl Tolerances {
    /// One virtual-resolution bin per dimension.
    ///
    /// With contiguous coarray halfwidths `L_s` (sensors) and `L_t`
    /// (pulses), the direction cosines resolve to about `1/(2 L_s)`, the
    /// synthesized bandwidth across `2 L_s + 1` offset lags gives a range
    /// bin of `c / (2 (2 L_s + 1) delta_f)`, and `2 L_t + 1` pulse lags
    /// give a velocity bin of `lambda_b / (2 (2 L_t + 1) T)`. Without
    /// frequency offsets the range dimension is disabled.
    pub fn resolution_bins(config: &RadarConfig) -> Result<Self> {
        let l_s = f64::from(difference_profile(&config.spatial_set()?).contiguous_halfwidth);
        let l_t = f64::from(difference_profile(&config.pri_set()?).contiguous_halfwidth);
        let r = if config.fo.is_some() {
            C0 / (2.0 * (2.0 * l_s + 1.0) * config.delta_f)
        } else {
            f64::INFINITY
        };
        Ok(Self {
            theta: 1.0 / (2.0 * l_s),
            phi: 1.0 / (2.0 * l_s),
            r,
            v: config.lambda_b() / (2.0 * (2.0 * l_t + 1.0) * config.t),
        })
    }

    fn axes(&self) -> [f64; 4] {
        [self.theta, self.phi, self.r, self.v]
    }

    /// Every entry must be positive; infinities are allowed (disabled
    /// dimension), NaN is not.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in ["theta", "phi", "r", "v"].iter().zip(self.axes()) {
            if !(value > 0.0) {
                return Err(Error::Parameter(format!(
                    "tolerance {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

fn deltas(estimate: &TargetEstimate, truth: &Target) -> [f64; 4] {
    [
        estimate.theta - truth.theta,
        estimate.phi - truth.phi,
        estimate.r - truth.r,
        estimate.v - truth.v,
    ]
}

/// Squared distance with each enabled dimension scaled by its tolerance.
/// Disabled (infinite-tolerance) dimensions contribute nothing.
fn normalized_distance2(estimate: &TargetEstimate, truth: &Target, tol: &Tolerances) -> f64 {
    deltas(estimate, truth)
        .iter()
        .zip(tol.axes())
        .filter(|(_, t)| t.is_finite())
        .map(|(d, t)| (d / t) * (d / t))
        .fold(0.0, |acc, v| acc + v)
}

/// Whether every enabled dimension lies inside its tolerance.
fn within(estimate: &TargetEstimate, truth: &Target, tol: &Tolerances) -> bool {
    deltas(estimate, truth)
        .iter()
        .zip(tol.axes())
        .all(|(d, t)| !t.is_finite() || d.abs() <= t)
}

/// Fraction of true targets matched one-to-one by some estimate within all
/// enabled tolerances.
///
/// Candidate pairs are consumed greedily in order of normalized distance,
/// so one estimate can never account for two targets. Estimate and truth
/// counts must agree.
pub fn hit_rate(
    estimates: &[TargetEstimate],
    truth: &TargetScene,
    tol: &Tolerances,
) -> Result<f64> {
    tol.validate()?;
    if truth.is_empty() {
        return Err(Error::Parameter("hit rate needs at least one true target".into()));
    }
    if estimates.len() != truth.len() {
        return Err(Error::Inconsistent(format!(
            "estimate count {} does not match target count {}",
            estimates.len(),
            truth.len()
        )));
    }
    let q = truth.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (qi, t) in truth.targets.iter().enumerate() {
        for (ei, e) in estimates.iter().enumerate() {
            if within(e, t, tol) {
                pairs.push((normalized_distance2(e, t, tol), qi, ei));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut truth_used = vec![false; q];
    let mut estimate_used = vec![false; q];
    let mut hits = 0usize;
    for (_, qi, ei) in pairs {
        if !truth_used[qi] && !estimate_used[ei] {
            truth_used[qi] = true;
            estimate_used[ei] = true;
            hits += 1;
        }
    }
    Ok(hits as f64 / q as f64)
}

/// Runs `visit` on every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, visit: &mut impl FnMut(&[usize])) {
    fn heap(k: usize, items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            heap(k - 1, items, visit);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let mut items: Vec<usize> = (0..n).collect();
    heap(n, &mut items, visit);
}

/// Estimate index assigned to each target, minimizing the summed
/// tolerance-normalized squared distance over all permutations.
fn best_assignment(
    estimates: &[TargetEstimate],
    truth: &[Target],
    tol: &Tolerances,
) -> Vec<usize> {
    let q = truth.len();
    let mut cost = vec![0.0f64; q * q];
    for (qi, t) in truth.iter().enumerate() {
        for (ei, e) in estimates.iter().enumerate() {
            cost[qi * q + ei] = normalized_distance2(e, t, tol);
        }
    }
    let mut best: Vec<usize> = (0..q).collect();
    let mut best_cost = f64::INFINITY;
    for_each_permutation(q, &mut |perm| {
        let total: f64 = perm.iter().enumerate().map(|(qi, &ei)| cost[qi * q + ei]).sum();
        if total < best_cost {
            best_cost = total;
            best.copy_from_slice(perm);
        }
    });
    best
}

/// Per-parameter root mean square error of a trial ensemble.
///
/// Within each trial, estimates are paired to targets by the optimal
/// assignment under tolerance-normalized distance; the score of one trial
/// is the root of the mean squared error over targets, and trials are then
/// averaged. Order of results: elevation, azimuth, range, velocity.
///
/// Dimensions the configuration cannot observe (NaN estimates) produce NaN
/// entries rather than being silently dropped.
pub fn rmse(
    trials: &[Vec<TargetEstimate>],
    truth: &TargetScene,
    tol: &Tolerances,
) -> Result<[f64; 4]> {
    tol.validate()?;
    let q = truth.len();
    if q == 0 {
        return Err(Error::Parameter("error scoring needs at least one true target".into()));
    }
    if q > MAX_MATCH_TARGETS {
        return Err(Error::Parameter(format!(
            "assignment search supports at most {MAX_MATCH_TARGETS} targets, got {q}"
        )));
    }
    if trials.is_empty() {
        return Err(Error::Parameter("error scoring needs at least one trial".into()));
    }
    for (j, est) in trials.iter().enumerate() {
        if est.len() != q {
            return Err(Error::Inconsistent(format!(
                "trial {j} has {} estimates for {q} targets",
                est.len()
            )));
        }
    }

    let mut sums = [0.0f64; 4];
    for est in trials {
        let perm = best_assignment(est, &truth.targets, tol);
        let mut sq = [0.0f64; 4];
        for (qi, t) in truth.targets.iter().enumerate() {
            let d = deltas(&est[perm[qi]], t);
            for (axis, value) in d.iter().enumerate() {
                sq[axis] += value * value;
            }
        }
        for axis in 0..4 {
            sums[axis] += (sq[axis] / q as f64).sqrt();
        }
    }
    let j = trials.len() as f64;
    Ok([sums[0] / j, sums[1] / j, sums[2] / j, sums[3] / j])
}

// ---------------------------------------------------------------------------
// Scene synthesis
// ---------------------------------------------------------------------------

/// Replaces the target powers of `base` with a linear ramp whose mean equals
/// the mean power of `base` and whose population standard deviation equals
/// `sd`. Targets keep their positions and order.
pub fn power_spread_scene(base: &TargetScene, sd: f64) -> Result<TargetScene> {
    if !(sd >= 0.0) || !sd.is_finite() {
        return Err(Error::Parameter(format!(
            "power spread must be a finite non-negative number, got {sd}"
        )));
    }
    let q = base.len();
    if q == 0 {
        return Err(Error::Parameter("power spread needs at least one target".into()));
    }
    let mean: f64 = base.targets.iter().map(|t| t.sigma2).sum::<f64>() / q as f64;
    if q == 1 {
        if sd > 0.0 {
            return Err(Error::Parameter(
                "a single target cannot carry a nonzero power spread".into(),
            ));
        }
        return Ok(base.clone());
    }
    // Centered ramp mean + c*(q - (Q-1)/2); the slope that realizes the
    // requested population deviation is sd * sqrt(12 / (Q^2 - 1)).
    let qf = q as f64;
    let slope = sd * (12.0 / (qf * qf - 1.0)).sqrt();
    let lowest = mean - slope * (qf - 1.0) / 2.0;
    if lowest <= 0.0 {
        return Err(Error::Parameter(format!(
            "power spread {sd} drives the weakest target to {lowest} (mean {mean})"
        )));
    }
    let mut scene = base.clone();
    for (qi, t) in scene.targets.iter_mut().enumerate() {
        t.sigma2 = mean + slope * (qi as f64 - (qf - 1.0) / 2.0);
    }
    Ok(scene)
}

/// Open parameter box from which random scenes are drawn, angles in
/// radians. The default covers elevations in (0, 90) degrees, azimuths in
/// (-70, 70) degrees, ranges in (100, 5000) m and velocities in (10, 400)
/// m/s at unit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneBox {
    pub theta: (f64, f64),
    pub phi: (f64, f64),
    pub r: (f64, f64),
    pub v: (f64, f64),
    pub sigma2: f64,
}

impl Default for SceneBox {
    fn default() -> Self {
        let deg = std::f64::consts::PI / 180.0;
        Self {
            theta: (0.0, 90.0 * deg),
            phi: (-70.0 * deg, 70.0 * deg),
            r: (100.0, 5000.0),
            v: (10.0, 400.0),
            sigma2: 1.0,
        }
    }
}

impl SceneBox {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in
            ["theta", "phi", "r", "v"].iter().zip([self.theta, self.phi, self.r, self.v])
        {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Parameter(format!(
                    "scene box {name} interval ({lo}, {hi}) is not an ordered finite pair"
                )));
            }
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Parameter(format!(
                "scene box power must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

/// One uniform draw from the open interval.
fn draw_open(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if x > lo && x < hi {
            return x;
        }
    }
}

/// Draws `q` targets uniformly from `bx`, enforcing a minimum separation in
/// every dimension of `min(sep, span / (2 q))`. The cap keeps the request
/// geometrically satisfiable for any `q`, so the draw always terminates for
/// a valid box. Deterministic for a given generator state.
pub fn random_scene(
    bx: &SceneBox,
    q: usize,
    sep: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<TargetScene> {
    bx.validate()?;
    sep.validate()?;
    if q == 0 {
        return Err(Error::Parameter("a scene needs at least one target".into()));
    }
    let spans = [
        bx.theta.1 - bx.theta.0,
        bx.phi.1 - bx.phi.0,
        bx.r.1 - bx.r.0,
        bx.v.1 - bx.v.0,
    ];
    let gaps: Vec<f64> = sep
        .axes()
        .iter()
        .zip(spans)
        .map(|(&s, span)| s.min(span / (2.0 * q as f64)))
        .collect();

    let mut targets: Vec<Target> = Vec::with_capacity(q);
    while targets.len() < q {
        let cand = Target {
            theta: draw_open(rng, bx.theta.0, bx.theta.1),
            phi: draw_open(rng, bx.phi.0, bx.phi.1),
            r: draw_open(rng, bx.r.0, bx.r.1),
            v: draw_open(rng, bx.v.0, bx.v.1),
            sigma2: bx.sigma2,
        };
        let separated = targets.iter().all(|t| {
            deltas(
                &TargetEstimate { theta: cand.theta, phi: cand.phi, r: cand.r, v: cand.v },
                t,
            )
            .iter()
            .zip(&gaps)
            .all(|(d, g)| d.abs() >= *g)
        });
        if separated {
            targets.push(cand);
        }
    }
    let scene = TargetScene::new(targets);
    scene.validate()?;
    Ok(scene)
}

/// Noise power realizing a target signal-to-noise ratio against the summed
/// target powers. Matches the per-realization normalization used during
/// synthesis in expectation, because every steering entry has unit modulus.
pub fn noise_power_for_snr(scene: &TargetScene, snr_db: f64) -> Result<f64> {
    if scene.is_empty() {
        return Err(Error::Parameter(
            "signal-to-noise ratio is undefined for an empty scene".into(),
        ));
    }
    if !snr_db.is_finite() {
        return Err(Error::Parameter(format!("SNR must be finite, got {snr_db} dB")));
    }
    let total: f64 = scene.targets.iter().map(|t| t.sigma2).sum();
    Ok(total * 10f64.powf(-snr_db / 10.0))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
