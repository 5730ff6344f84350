//! Joint angle, range and velocity estimation on the virtual difference
//! domain.
//!
//! The estimator stacks the two arms' virtual measurements, separates the
//! signal subspace with one truncated SVD, and reads every parameter out of
//! shift invariances of that single decomposition: sensor-lag shifts of the
//! left singular vectors give both direction cosines, pulse-lag and
//! offset-lag shifts of the right singular vectors give velocity and range.
//! The eigenbasis that diagonalizes the first invariance also diagonalizes
//! the rest, so all four parameter families come out paired per target
//! without any joint search.

use std::f64::consts::PI;

use ndarray::{concatenate, s, Array1, Array2, Axis};
use ndarray_linalg::{JobSvd, SVDDC};
use serde::Serialize;

use crate::linalg::{cond_2, eig_cols, pinv, try_inv, C64};
use crate::scene::RadarConfig;
use crate::signal::{doppler_unit, range_unit, spatial_unit, CoarrayVectors};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Options and outputs
// ---------------------------------------------------------------------------

/// Numerical policy for the estimation pipeline.
#[derive(Debug, Clone)]
pub struct CcingOptions {
    /// Relative floor under which the q-th singular value counts as rank
    /// collapse.
    pub rank_tol: f64,
    /// Relative cutoff inside every pseudo-inverse.
    pub pinv_tol: f64,
    /// Error out when the q-th singular value falls below the floor.
    pub strict_rank: bool,
    /// Upper bound on the eigenbasis condition number before the scene
    /// counts as degenerate.
    pub condition_limit: f64,
}

impl Default for CcingOptions {
    fn default() -> Self {
        Self { rank_tol: 1e-8, pinv_tol: 1e-10, strict_rank: true, condition_limit: 1e8 }
    }
}

impl CcingOptions {
    /// Settings for sample statistics, where noise fills the whole
    /// spectrum: coarser pseudo-inverse cutoff and no bail-outs, so every
    /// trial yields estimates even deep below threshold.
    pub fn noisy() -> Self {
        Self { rank_tol: 1e-8, pinv_tol: 1e-6, strict_rank: false, condition_limit: f64::INFINITY }
    }
}

/// One estimated target, all SI units and radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetEstimate {
    pub theta: f64,
    pub phi: f64,
    /// Range in meters; NaN when the radar has no frequency offsets.
    pub r: f64,
    /// Radial velocity in meters/second; NaN when only one pulse lag exists.
    pub v: f64,
}

/// Numerical health indicators of one estimation run.
#[derive(Debug, Clone, Serialize)]
pub struct CcingDiagnostics {
    /// Full singular spectrum of the stacked virtual measurement.
    pub singular_values: Vec<f64>,
    /// Condition number of the shared eigenbasis.
    pub eigen_condition: f64,
    /// Off-diagonal leakage of the z-arm invariance after diagonalization,
    /// relative to its diagonal.
    pub pairing_leakage: f64,
}

/// Estimates sorted by elevation, with diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateSet {
    pub targets: Vec<TargetEstimate>,
    pub diagnostics: CcingDiagnostics,
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

/// Stacks the x-arm virtual measurement on top of the z-arm one.
pub fn build_rxz(co: &CoarrayVectors) -> Array2<C64> {
    concatenate![Axis(0), co.x_matrix(), co.z_matrix()]
}

/// Rank-q signal subspace of the stacked measurement.
#[derive(Debug, Clone)]
pub struct SubspacePack {
    /// Left singular vectors, `2 n_s x q`.
    pub u1: Array2<C64>,
    /// Top singular values.
    pub lambda: Array1<f64>,
    /// Adjoint right singular vectors, `q x (n_f n_t)`.
    pub v1h: Array2<C64>,
    /// The whole spectrum, for diagnostics.
    pub singular_values: Vec<f64>,
}

pub fn truncated_svd(rxz: &Array2<C64>, q: usize, opts: &CcingOptions) -> Result<SubspacePack> {
    if q == 0 {
        return Err(Error::Parameter("estimation needs at least one source".into()));
    }
    let k = rxz.nrows().min(rxz.ncols());
    if q > k {
        return Err(Error::Parameter(format!(
            "cannot separate {q} sources from a {} x {} measurement",
            rxz.nrows(),
            rxz.ncols()
        )));
    }
    let (u, sv, vt) = rxz
        .svddc(JobSvd::Some)
        .map_err(|e| Error::Degenerate { stage: "subspace svd", detail: e.to_string() })?;
    let u = u.expect("left vectors requested");
    let vt = vt.expect("right vectors requested");
    if opts.strict_rank {
        let floor = opts.rank_tol * sv[0];
        let rank = sv.iter().filter(|&&s| s > floor).count();
        if rank < q {
            return Err(Error::RankDeficient {
                stage: "subspace svd",
                detail: format!("numerical rank {rank} below the requested {q} sources"),
            });
        }
    }
    Ok(SubspacePack {
        u1: u.slice(s![.., ..q]).to_owned(),
        lambda: sv.slice(s![..q]).to_owned(),
        v1h: vt.slice(s![..q, ..]).to_owned(),
        singular_values: sv.to_vec(),
    })
}

/// Direction estimates plus the eigenbasis every later stage reuses.
#[derive(Debug, Clone)]
pub struct DoaStage {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Eigenvector matrix of the x-arm invariance.
    pub basis: Array2<C64>,
    pub basis_inv: Array2<C64>,
    pub eigen_condition: f64,
    pub pairing_leakage: f64,
}

/// Solves the sensor-lag shift invariances of the left subspace for both
/// direction cosines. `su` is the spatial phase per unit lag per cosine.
pub fn estimate_doa(pack: &SubspacePack, n_s: usize, su: f64, opts: &CcingOptions) -> Result<DoaStage> {
    let q = pack.u1.ncols();
    if pack.u1.nrows() != 2 * n_s || n_s < 2 {
        return Err(Error::Inconsistent(format!(
            "left subspace has {} rows, expected twice {n_s}",
            pack.u1.nrows()
        )));
    }
    if n_s < q + 1 {
        return Err(Error::RankDeficient {
            stage: "doa shift",
            detail: format!("{n_s} spatial lags support at most {} sources", n_s - 1),
        });
    }
    let u11 = pack.u1.slice(s![..n_s, ..]);
    let u12 = pack.u1.slice(s![n_s.., ..]);
    let u111 = u11.slice(s![..n_s - 1, ..]).to_owned();
    let u112 = u11.slice(s![1.., ..]).to_owned();
    let u121 = u12.slice(s![..n_s - 1, ..]).to_owned();
    let u122 = u12.slice(s![1.., ..]).to_owned();

    let e_x = pinv(&u111, opts.pinv_tol, "doa x-shift")?.dot(&u112);
    let (phi_x, basis) = eig_cols(&e_x, "doa eigenbasis")?;
    let eigen_condition = cond_2(&basis, "doa eigenbasis")?;
    if eigen_condition > opts.condition_limit {
        return Err(Error::Degenerate {
            stage: "doa eigenbasis",
            detail: format!(
                "eigenbasis condition {eigen_condition:.3e} exceeds {:.1e}; sources too close",
                opts.condition_limit
            ),
        });
    }
    let basis_inv = try_inv(&basis, "doa eigenbasis")?;
    let e_z = pinv(&u121, opts.pinv_tol, "doa z-shift")?.dot(&u122);
    let psi = basis_inv.dot(&e_z).dot(&basis);

    let mut diag_sq = 0.0;
    let mut off_sq = 0.0;
    for i in 0..q {
        for j in 0..q {
            if i == j {
                diag_sq += psi[(i, j)].norm_sqr();
            } else {
                off_sq += psi[(i, j)].norm_sqr();
            }
        }
    }
    let pairing_leakage = if diag_sq > 0.0 { (off_sq / diag_sq).sqrt() } else { f64::INFINITY };

    let mut theta = Vec::with_capacity(q);
    let mut phi = Vec::with_capacity(q);
    for qi in 0..q {
        let ang_x = phi_x[qi].arg();
        let ang_z = psi[(qi, qi)].arg();
        let u_x = ang_x / su;
        let u_z = ang_z / su;
        phi.push(f64::atan2(u_x, u_z));
        theta.push((u_x * u_x + u_z * u_z).sqrt().clamp(0.0, 1.0).asin());
    }
    Ok(DoaStage { theta, phi, basis, basis_inv, eigen_condition, pairing_leakage })
}

/// Range and velocity per target, index-aligned with the direction stage.
#[derive(Debug, Clone)]
pub struct RangeDoppler {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
}

fn wrap_2pi(angle: f64) -> f64 {
    angle.rem_euclid(2.0 * PI)
}

/// Reads velocity and range off the right-subspace shift invariances,
/// rotated into the direction stage's eigenbasis so the pairing carries
/// over. Phases map to `[0, 2 pi)` because both quantities are
/// non-negative with a known one-sided unambiguous span.
pub fn estimate_range_doppler(
    pack: &SubspacePack,
    doa: &DoaStage,
    n_t: usize,
    n_f: usize,
    du: f64,
    ru: f64,
    opts: &CcingOptions,
) -> Result<RangeDoppler> {
    let q = pack.u1.ncols();
    let n_c = pack.v1h.ncols();
    if n_c != n_t * n_f {
        return Err(Error::Inconsistent(format!(
            "right subspace has {n_c} columns, expected {n_t} x {n_f}"
        )));
    }
    let lam = Array2::from_diag(&pack.lambda.mapv(|x| C64::new(x, 0.0)));
    let lam_inv = Array2::from_diag(&pack.lambda.mapv(|x| C64::new(1.0 / x, 0.0)));

    let diagonalized_shift = |keep_lo: &dyn Fn(usize) -> bool,
                              keep_hi: &dyn Fn(usize) -> bool,
                              count: usize,
                              stage: &'static str|
     -> Result<Array2<C64>> {
        if count < q {
            return Err(Error::RankDeficient {
                stage,
                detail: format!("{count} shifted columns support at most {count} sources, need {q}"),
            });
        }
        let lo: Vec<usize> = (0..n_c).filter(|&c| keep_lo(c)).collect();
        let hi: Vec<usize> = (0..n_c).filter(|&c| keep_hi(c)).collect();
        let v_lo = pack.v1h.select(Axis(1), &lo);
        let v_hi = pack.v1h.select(Axis(1), &hi);
        let p = v_hi.dot(&pinv(&v_lo, opts.pinv_tol, stage)?);
        Ok(doa.basis_inv.dot(&lam).dot(&p).dot(&lam_inv).dot(&doa.basis))
    };

    let v = if n_t >= 2 {
        let g = diagonalized_shift(
            &|c| c % n_t < n_t - 1,
            &|c| c % n_t >= 1,
            n_f * (n_t - 1),
            "doppler shift",
        )?;
        (0..q).map(|i| wrap_2pi(g[(i, i)].arg()) / du).collect()
    } else {
        vec![f64::NAN; q]
    };
    let r = if n_f >= 2 {
        let g = diagonalized_shift(
            &|c| c / n_t < n_f - 1,
            &|c| c / n_t >= 1,
            n_t * (n_f - 1),
            "range shift",
        )?;
        (0..q).map(|i| wrap_2pi(g[(i, i)].arg()) / ru).collect()
    } else {
        vec![f64::NAN; q]
    };
    Ok(RangeDoppler { r, v })
}

/// Full pipeline: subspace split, direction invariances, range and
/// velocity invariances, estimates sorted by elevation.
pub fn ccing(
    co: &CoarrayVectors,
    config: &RadarConfig,
    q: usize,
    opts: &CcingOptions,
) -> Result<EstimateSet> {
    let rxz = build_rxz(co);
    let pack = truncated_svd(&rxz, q, opts)?;
    let n_s = co.layout.spatial.len();
    let n_t = co.layout.time.len();
    let n_f = co.layout.fo.len();
    let doa = estimate_doa(&pack, n_s, spatial_unit(config), opts)?;
    let rd = estimate_range_doppler(
        &pack,
        &doa,
        n_t,
        n_f,
        doppler_unit(config),
        range_unit(config),
        opts,
    )?;
    let mut targets: Vec<TargetEstimate> = (0..q)
        .map(|i| TargetEstimate { theta: doa.theta[i], phi: doa.phi[i], r: rd.r[i], v: rd.v[i] })
        .collect();
    targets.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.phi.total_cmp(&b.phi)));
    Ok(EstimateSet {
        targets,
        diagnostics: CcingDiagnostics {
            singular_values: pack.singular_values.clone(),
            eigen_condition: doa.eigen_condition,
            pairing_leakage: doa.pairing_leakage,
        },
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
