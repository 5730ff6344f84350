//! Estimation-theoretic lower bounds for the stacked two-arm observation.
//!
//! The snapshot vector of both arms together is zero-mean complex Gaussian
//! whose covariance carries all parameter information. For each target the
//! covariance depends on elevation, azimuth, range and velocity through one
//! steering column, so every partial derivative of the covariance is a
//! rank-two dyad update. The information matrix follows from the standard
//! trace formula; the dyad structure reduces it to a handful of weighted
//! Gram matrices, which keeps the cost at one covariance inversion plus
//! small matrix products.
//!
//! Two deliberately redundant implementations exist for cross-checking on
//! miniature instances: an explicit weighted form over vectorized
//! covariance derivatives, and a nuisance-projector form equivalent to the
//! Schur complement over unknown powers and noise floor.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, Inverse, UPLO};
use serde::Serialize;

use crate::linalg::{adjoint, hermitian_sqrt, outer, pinv, vec_mat, C64};
use crate::scene::{RadarConfig, TargetScene};
use crate::signal::{doppler_unit, fo_branch_values, range_unit, spatial_unit, steering};
use crate::{Error, Result};

/// Parameter kinds in their order inside the parameter vector.
const KINDS: usize = 4;

// ---------------------------------------------------------------------------
// Manifold derivatives
// ---------------------------------------------------------------------------

/// Stacked steering columns and their partial derivatives.
///
/// `stacked` holds one column per target over both arms. `derivs` holds one
/// column per scalar parameter, kind-major: all elevation columns, then
/// azimuth, range, velocity. The covariance derivative for parameter `m`
/// belonging to target `q` is `powers[q] * (d_m s_q^H + s_q d_m^H)`.
#[derive(Debug, Clone)]
pub struct ManifoldDerivatives {
    pub stacked: Array2<C64>,
    pub derivs: Array2<C64>,
    pub powers: Vec<f64>,
}

fn kron3_col(c: &[C64], b: &[C64], a: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(c.len() * b.len() * a.len());
    for &cf in c {
        for &bk in b {
            for &an in a {
                out.push(cf * bk * an);
            }
        }
    }
    out
}

fn column(v: &Array2<C64>, q: usize) -> Vec<C64> {
    v.column(q).to_vec()
}

/// Builds the stacked steering matrix and all parameter derivatives.
pub fn manifold_derivatives(config: &RadarConfig, scene: &TargetScene) -> Result<ManifoldDerivatives> {
    let steer = steering(config, scene)?;
    let spatial = config.spatial_set()?;
    let pri = config.pri_set()?;
    let fo = config.fo_set()?;
    let su = spatial_unit(config);
    let du = doppler_unit(config);
    let ru = range_unit(config);
    let xi: Vec<f64> = spatial.values().iter().map(|&v| f64::from(v)).collect();
    let eta: Vec<f64> = pri.values().iter().map(|&v| f64::from(v)).collect();
    let u: Vec<f64> = fo
        .as_ref()
        .map_or_else(|| vec![0], fo_branch_values)
        .into_iter()
        .map(|v| v as f64)
        .collect();

    let q = scene.len();
    let d = 2 * u.len() * eta.len() * xi.len();
    let mut stacked = Array2::zeros((d, q));
    let mut derivs = Array2::zeros((d, KINDS * q));
    let j = C64::new(0.0, 1.0);

    for (qi, t) in scene.targets.iter().enumerate() {
        let a_x = column(&steer.a_x, qi);
        let a_z = column(&steer.a_z, qi);
        let b = column(&steer.b, qi);
        let c = column(&steer.c, qi);

        let scale = |base: &[C64], w: &[f64], factor: f64| -> Vec<C64> {
            base.iter().zip(w).map(|(&v, &wi)| v * (j * factor * wi)).collect()
        };
        let (st, ct) = t.theta.sin_cos();
        let (sp, cp) = t.phi.sin_cos();
        let dax_dt = scale(&a_x, &xi, -su * ct * sp);
        let dax_dp = scale(&a_x, &xi, -su * st * cp);
        let daz_dt = scale(&a_z, &xi, -su * ct * cp);
        let daz_dp = scale(&a_z, &xi, su * st * sp);
        let dc_dr = scale(&c, &u, ru);
        let db_dv = scale(&b, &eta, -du);

        let put = |dst: &mut Array2<C64>, col: usize, x_part: Vec<C64>, z_part: Vec<C64>| {
            for (row, v) in x_part.into_iter().chain(z_part).enumerate() {
                dst[(row, col)] = v;
            }
        };
        put(&mut stacked, qi, kron3_col(&c, &b, &a_x), kron3_col(&c, &b, &a_z));
        put(&mut derivs, qi, kron3_col(&c, &b, &dax_dt), kron3_col(&c, &b, &daz_dt));
        put(&mut derivs, q + qi, kron3_col(&c, &b, &dax_dp), kron3_col(&c, &b, &daz_dp));
        put(&mut derivs, 2 * q + qi, kron3_col(&dc_dr, &b, &a_x), kron3_col(&dc_dr, &b, &a_z));
        put(&mut derivs, 3 * q + qi, kron3_col(&c, &db_dv, &a_x), kron3_col(&c, &db_dv, &a_z));
    }
    let powers = scene.targets.iter().map(|t| t.sigma2).collect();
    Ok(ManifoldDerivatives { stacked, derivs, powers })
}

/// Exact covariance of the stacked two-arm observation: steering-weighted
/// target powers plus a white floor. Reflections are shared between the
/// arms, so the cross-arm blocks are populated.
pub fn stacked_covariance(
    config: &RadarConfig,
    scene: &TargetScene,
    sigma_n2: f64,
) -> Result<Array2<C64>> {
    let md = manifold_derivatives(config, scene)?;
    let d = md.stacked.nrows();
    let mut weighted = md.stacked.clone();
    for (qi, &p) in md.powers.iter().enumerate() {
        weighted.column_mut(qi).mapv_inplace(|v| v * p);
    }
    let mut r = weighted.dot(&adjoint(&md.stacked));
    for i in 0..d {
        r[(i, i)] += C64::new(sigma_n2, 0.0);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Information matrix and bound
// ---------------------------------------------------------------------------

fn invert_covariance(r: &Array2<C64>) -> Result<Array2<C64>> {
    r.inv().map_err(|e| Error::RankDeficient {
        stage: "covariance inverse",
        detail: format!("stacked covariance is singular: {e}"),
    })
}

/// Information matrix over the target parameter vector (elevations, then
/// azimuths, ranges, velocities), powers and noise floor held known.
pub fn fim(config: &RadarConfig, scene: &TargetScene, sigma_n2: f64) -> Result<Array2<f64>> {
    let md = manifold_derivatives(config, scene)?;
    let r = stacked_covariance(config, scene, sigma_n2)?;
    let r_inv = invert_covariance(&r)?;
    let l_r = config.l_r as f64;
    let q = md.powers.len();
    let p = KINDS * q;

    let rm = r_inv.dot(&md.stacked);
    let rd = r_inv.dot(&md.derivs);
    let g_mm = adjoint(&md.stacked).dot(&rm);
    let g_md = adjoint(&md.stacked).dot(&rd);
    let g_dd = adjoint(&md.derivs).dot(&rd);

    let mut j = Array2::<f64>::zeros((p, p));
    for m in 0..p {
        let a = m % q;
        for n in 0..p {
            let b = n % q;
            let t = g_md[(a, n)] * g_md[(b, m)] + g_mm[(a, b)] * g_dd[(n, m)];
            j[(m, n)] = 2.0 * l_r * md.powers[a] * md.powers[b] * t.re;
        }
    }
    // Symmetrize away floating-point asymmetry.
    for m in 0..p {
        for n in (m + 1)..p {
            let avg = 0.5 * (j[(m, n)] + j[(n, m)]);
            j[(m, n)] = avg;
            j[(n, m)] = avg;
        }
    }
    Ok(j)
}

/// Lower bounds on per-target estimation variances.
#[derive(Debug, Clone, Serialize)]
pub struct CrbReport {
    /// Elevation variance bound per target, radians squared.
    pub theta_var: Vec<f64>,
    /// Azimuth variance bound per target, radians squared.
    pub phi_var: Vec<f64>,
    /// Range variance bound per target, meters squared.
    pub r_var: Vec<f64>,
    /// Velocity variance bound per target, (meters/second) squared.
    pub v_var: Vec<f64>,
    /// Condition number of the information matrix.
    pub fim_condition: f64,
}

impl CrbReport {
    /// Root bounds averaged over targets, ordered elevation, azimuth,
    /// range, velocity. This is the quantity plotted against RMSE curves.
    pub fn rcrb(&self) -> [f64; 4] {
        let rms = |v: &[f64]| (v.iter().sum::<f64>() / v.len() as f64).sqrt();
        [rms(&self.theta_var), rms(&self.phi_var), rms(&self.r_var), rms(&self.v_var)]
    }
}

/// Inverts the information matrix and reads off the per-parameter bounds.
pub fn crb(config: &RadarConfig, scene: &TargetScene, sigma_n2: f64) -> Result<CrbReport> {
    let q = scene.len();
    if q == 0 {
        return Err(Error::Parameter("bound needs at least one target".into()));
    }
    let j = fim(config, scene, sigma_n2)?;
    let eig = j
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Degenerate { stage: "fim spectrum", detail: e.to_string() })?;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 1e-12 * max.max(0.0)) {
        return Err(Error::RankDeficient {
            stage: "fim",
            detail: format!(
                "information matrix not positive definite (eigenvalues span {min:.3e}..{max:.3e}); \
                 some parameter is unobservable"
            ),
        });
    }
    let j_inv = j.inv().map_err(|e| Error::RankDeficient {
        stage: "fim",
        detail: format!("information matrix inversion failed: {e}"),
    })?;
    let grab = |kind: usize| (0..q).map(|i| j_inv[(kind * q + i, kind * q + i)]).collect();
    Ok(CrbReport {
        theta_var: grab(0),
        phi_var: grab(1),
        r_var: grab(2),
        v_var: grab(3),
        fim_condition: max / min,
    })
}

// ---------------------------------------------------------------------------
// Identifiability
// ---------------------------------------------------------------------------

/// Outcome of testing whether the bound exists at all.
#[derive(Debug, Clone, Serialize)]
pub struct IdentifiabilityReport {
    /// True when the covariance derivatives are linearly independent.
    pub exists: bool,
    /// Numerical rank of their Gram matrix.
    pub rank: usize,
    /// Full parameter count, four per target.
    pub required: usize,
    /// Gram eigenvalues, ascending.
    pub spectrum: Vec<f64>,
}

/// Tests linear independence of the covariance derivatives through their
/// unweighted Gram matrix. Scenes with coinciding targets, or parameters
/// the hardware cannot observe, fail here before any inversion is tried.
pub fn crb_exists(config: &RadarConfig, scene: &TargetScene) -> Result<IdentifiabilityReport> {
    let q = scene.len();
    let required = KINDS * q;
    if q == 0 {
        return Ok(IdentifiabilityReport { exists: true, rank: 0, required, spectrum: vec![] });
    }
    let md = manifold_derivatives(config, scene)?;
    let g_mm = adjoint(&md.stacked).dot(&md.stacked);
    let g_md = adjoint(&md.stacked).dot(&md.derivs);
    let g_dd = adjoint(&md.derivs).dot(&md.derivs);

    let mut g = Array2::<f64>::zeros((required, required));
    for m in 0..required {
        let a = m % q;
        for n in 0..required {
            let b = n % q;
            let t = g_md[(a, n)] * g_md[(b, m)] + g_mm[(a, b)] * g_dd[(n, m)];
            g[(m, n)] = 2.0 * md.powers[a] * md.powers[b] * t.re;
        }
    }
    let eig = g
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Degenerate { stage: "gram spectrum", detail: e.to_string() })?;
    let spectrum: Vec<f64> = eig.to_vec();
    let max_root = spectrum.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt();
    let rank = spectrum.iter().filter(|&&l| l.max(0.0).sqrt() > 1e-8 * max_root).count();
    Ok(IdentifiabilityReport { exists: rank == required, rank, required, spectrum })
}

// ---------------------------------------------------------------------------
// Redundant forms for miniature instances
// ---------------------------------------------------------------------------

const MINIATURE_DIM: usize = 32;

fn require_miniature(d: usize, what: &str) -> Result<()> {
    if d > MINIATURE_DIM {
        return Err(Error::Parameter(format!(
            "{what} materializes the full weighting matrix and only supports stacked \
             dimension up to {MINIATURE_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Covariance derivative of one scalar parameter, materialized.
fn derivative_matrix(md: &ManifoldDerivatives, m: usize) -> Array2<C64> {
    let q = md.powers.len();
    let a = m % q;
    let s = md.stacked.column(a);
    let d = md.derivs.column(m);
    let mut out = outer(d, s) + outer(s, d);
    out.mapv_inplace(|v| v * md.powers[a]);
    out
}

/// Information matrix through the explicit vectorized form: derivative
/// columns weighted by the Kronecker inverse-covariance pair. Agrees with
/// [`fim`] to rounding; exists purely as an independent check.
pub fn fim_via_weight_matrix(
    config: &RadarConfig,
    scene: &TargetScene,
    sigma_n2: f64,
) -> Result<Array2<f64>> {
    let md = manifold_derivatives(config, scene)?;
    let d = md.stacked.nrows();
    require_miniature(d, "weight-matrix information form")?;
    let r = stacked_covariance(config, scene, sigma_n2)?;
    let r_inv = invert_covariance(&r)?;
    let w = kron(&r_inv.t(), &r_inv);
    let l_r = config.l_r as f64;
    let p = KINDS * md.powers.len();

    let cols: Vec<Array1<C64>> =
        (0..p).map(|m| vec_mat(&derivative_matrix(&md, m))).collect();
    let weighted: Vec<Array1<C64>> = cols.iter().map(|c| w.dot(c)).collect();
    let mut j = Array2::<f64>::zeros((p, p));
    for m in 0..p {
        for n in 0..p {
            let s: C64 = cols[m].iter().zip(weighted[n].iter()).map(|(a, b)| a.conj() * b).sum();
            j[(m, n)] = l_r * s.re;
        }
    }
    Ok(j)
}

fn nuisance_partials(md: &ManifoldDerivatives, dim: usize) -> Vec<Array2<C64>> {
    let q = md.powers.len();
    let mut out: Vec<Array2<C64>> = (0..q)
        .map(|b| {
            let s = md.stacked.column(b);
            outer(s, s)
        })
        .collect();
    out.push(Array2::eye(dim));
    out
}

/// Bound on the target parameters with powers and noise floor unknown,
/// via the Schur complement of the joint information matrix.
pub fn crb_nuisance_schur(
    config: &RadarConfig,
    scene: &TargetScene,
    sigma_n2: f64,
) -> Result<Array2<f64>> {
    let md = manifold_derivatives(config, scene)?;
    let r = stacked_covariance(config, scene, sigma_n2)?;
    let r_inv = invert_covariance(&r)?;
    let l_r = config.l_r as f64;
    let q = md.powers.len();
    let p = KINDS * q;
    let total = p + q + 1;

    let rm = r_inv.dot(&md.stacked);
    let rd = r_inv.dot(&md.derivs);
    let g_mm = adjoint(&md.stacked).dot(&rm);
    let g_md = adjoint(&md.stacked).dot(&rd);
    let g_dd = adjoint(&md.derivs).dot(&rd);
    // With a Hermitian inverse, squared weighting is the Gram of the
    // once-weighted columns.
    let h_mm = adjoint(&rm).dot(&rm);
    let h_md = adjoint(&rm).dot(&rd);
    let tr_r2: f64 = r_inv.iter().map(|v| v.norm_sqr()).sum();

    let mut j = Array2::<f64>::zeros((total, total));
    for m in 0..p {
        let a = m % q;
        for n in 0..p {
            let b = n % q;
            let t = g_md[(a, n)] * g_md[(b, m)] + g_mm[(a, b)] * g_dd[(n, m)];
            j[(m, n)] = 2.0 * l_r * md.powers[a] * md.powers[b] * t.re;
        }
        for b in 0..q {
            let v = 2.0 * l_r * md.powers[a] * (g_mm[(a, b)] * g_md[(b, m)]).re;
            j[(m, p + b)] = v;
            j[(p + b, m)] = v;
        }
        let v = 2.0 * l_r * md.powers[a] * h_md[(a, m)].re;
        j[(m, p + q)] = v;
        j[(p + q, m)] = v;
    }
    for a in 0..q {
        for b in 0..q {
            j[(p + a, p + b)] = l_r * g_mm[(a, b)].norm_sqr();
        }
        let v = l_r * h_mm[(a, a)].re;
        j[(p + a, p + q)] = v;
        j[(p + q, p + a)] = v;
    }
    j[(p + q, p + q)] = l_r * tr_r2;

    let j_gg = j.slice(ndarray::s![..p, ..p]).to_owned();
    let j_gs = j.slice(ndarray::s![..p, p..]).to_owned();
    let j_ss = j.slice(ndarray::s![p.., p..]).to_owned();
    let j_ss_inv = j_ss.inv().map_err(|e| Error::RankDeficient {
        stage: "nuisance fim",
        detail: format!("nuisance block singular: {e}"),
    })?;
    let schur = &j_gg - &j_gs.dot(&j_ss_inv).dot(&j_gs.t());
    schur.inv().map_err(|e| Error::RankDeficient {
        stage: "nuisance fim",
        detail: format!("marginalized information matrix singular: {e}"),
    })
}

/// The same marginalized bound through an explicit weighted projector:
/// derivative columns are whitened by the Kronecker square root of the
/// inverse covariance and the nuisance directions projected out. Miniature
/// instances only; cross-checks [`crb_nuisance_schur`].
pub fn crb_nuisance_projector(
    config: &RadarConfig,
    scene: &TargetScene,
    sigma_n2: f64,
) -> Result<Array2<f64>> {
    let md = manifold_derivatives(config, scene)?;
    let d = md.stacked.nrows();
    require_miniature(d, "projector bound form")?;
    let r = stacked_covariance(config, scene, sigma_n2)?;
    let r_inv = invert_covariance(&r)?;
    let r_inv_half = hermitian_sqrt(&r_inv, "inverse covariance root")?;
    let w_half = kron(&r_inv_half.t(), &r_inv_half);
    let l_r = config.l_r as f64;
    let q = md.powers.len();
    let p = KINDS * q;

    let mut a_g = Array2::<C64>::zeros((d * d, p));
    for m in 0..p {
        let col = w_half.dot(&vec_mat(&derivative_matrix(&md, m)));
        a_g.column_mut(m).assign(&col);
    }
    let nuisances = nuisance_partials(&md, d);
    let mut a_s = Array2::<C64>::zeros((d * d, nuisances.len()));
    for (i, partial) in nuisances.iter().enumerate() {
        let col = w_half.dot(&vec_mat(partial));
        a_s.column_mut(i).assign(&col);
    }
    let projected = &a_g - &a_s.dot(&pinv(&a_s, 1e-12, "nuisance projector")?.dot(&a_g));
    let gram = adjoint(&a_g).dot(&projected);
    let mut s = Array2::<f64>::zeros((p, p));
    for m in 0..p {
        for n in 0..p {
            s[(m, n)] = l_r * gram[(m, n)].re;
        }
    }
    s.inv().map_err(|e| Error::RankDeficient {
        stage: "nuisance fim",
        detail: format!("projected information matrix singular: {e}"),
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
