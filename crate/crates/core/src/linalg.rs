//! Complex linear-algebra helpers shared by the signal, estimation, and
//! bound modules.
//!
//! Thin wrappers over the LAPACK-backed decompositions that add explicit
//! tolerances and crate-level error labels, plus the structured products
//! (Khatri-Rao, vectorisation, outer products) the covariance models are
//! assembled from. Everything here is dimension-agnostic; radar semantics
//! live in the callers.

use ndarray::{s, Array1, Array2, ArrayBase, ArrayView1, Data, Ix2};
use ndarray_linalg::{Eig, Eigh, Inverse, JobSvd, SVDDC, UPLO};
use num_complex::Complex64;

use crate::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Conjugate transpose.
pub fn adjoint<S: Data<Elem = C64>>(a: &ArrayBase<S, Ix2>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Outer product `a b^H`.
pub fn outer(a: ArrayView1<'_, C64>, b: ArrayView1<'_, C64>) -> Array2<C64> {
    let mut out = Array2::zeros((a.len(), b.len()));
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[(i, j)] = x * y.conj();
        }
    }
    out
}

/// Column-wise Kronecker product. Both factors must share a column count;
/// for column c the output entry `(i * rows(b) + j, c)` is `a[i,c] * b[j,c]`,
/// so the second factor's index runs fastest, matching [`vec_mat`] applied
/// to the rank-one products `b_c a_c^T`.
pub fn khatri_rao<S1, S2>(a: &ArrayBase<S1, Ix2>, b: &ArrayBase<S2, Ix2>) -> Array2<C64>
where
    S1: Data<Elem = C64>,
    S2: Data<Elem = C64>,
{
    assert_eq!(a.ncols(), b.ncols(), "khatri_rao factors must share column count");
    let (ra, rb) = (a.nrows(), b.nrows());
    let mut out = Array2::zeros((ra * rb, a.ncols()));
    for c in 0..a.ncols() {
        for i in 0..ra {
            for j in 0..rb {
                out[(i * rb + j, c)] = a[(i, c)] * b[(j, c)];
            }
        }
    }
    out
}

/// Column-major vectorisation: stacks the columns of `x` top to bottom.
pub fn vec_mat(x: &Array2<C64>) -> Array1<C64> {
    Array1::from_iter(x.t().iter().copied())
}

/// Inverse of [`vec_mat`]: rebuilds a `rows x cols` matrix column by column.
pub fn unvec(v: &Array1<C64>, rows: usize, cols: usize) -> Result<Array2<C64>> {
    if v.len() != rows * cols {
        return Err(Error::Inconsistent(format!(
            "cannot reshape a length-{} vector into {rows}x{cols}",
            v.len()
        )));
    }
    let m = Array2::from_shape_vec((cols, rows), v.to_vec())
        .expect("length checked above");
    Ok(m.reversed_axes().to_owned())
}

/// Matrix inverse with a crate-level error carrying the pipeline stage.
pub fn try_inv(a: &Array2<C64>, stage: &'static str) -> Result<Array2<C64>> {
    a.inv().map_err(|e| Error::RankDeficient { stage, detail: e.to_string() })
}

/// Moore-Penrose pseudo-inverse, discarding singular values below
/// `rtol x sigma_max`.
pub fn pinv(a: &Array2<C64>, rtol: f64, stage: &'static str) -> Result<Array2<C64>> {
    let (u, sv, vt) = a
        .svddc(JobSvd::Some)
        .map_err(|e| Error::RankDeficient { stage, detail: e.to_string() })?;
    let u = u.expect("JobSvd::Some returns U");
    let vt = vt.expect("JobSvd::Some returns V^T");
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return Err(Error::RankDeficient { stage, detail: "all singular values are zero".into() });
    }
    let k = sv.iter().take_while(|&&s| s > rtol * smax).count();
    if k == 0 {
        return Err(Error::RankDeficient {
            stage,
            detail: format!("no singular value above {:.3e}", rtol * smax),
        });
    }
    // A^+ = V_k diag(1/s) U_k^H
    let mut vk = adjoint(&vt.slice(s![..k, ..])); // n x k
    for (i, mut col) in vk.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|z| z / sv[i]);
    }
    Ok(vk.dot(&adjoint(&u.slice(s![.., ..k]))))
}

/// Ratio of extreme singular values. Returns infinity for a numerically
/// singular matrix.
pub fn cond_2(a: &Array2<C64>, stage: &'static str) -> Result<f64> {
    let (_, sv, _) = a
        .svddc(JobSvd::None)
        .map_err(|e| Error::RankDeficient { stage, detail: e.to_string() })?;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(smax / smin)
}

/// Hermitian eigendecomposition with ascending real eigenvalues and true
/// eigenvectors of `a` as columns.
///
/// The LAPACK bridge hands row-major complex input to a column-major routine,
/// so what comes back are eigenvectors of the transposed (for Hermitian
/// input: conjugated) matrix. Both orientations are residual-checked here and
/// the correct one returned, which keeps this safe against future fixes of
/// the bridge.
pub fn eigh_cols(a: &Array2<C64>, stage: &'static str) -> Result<(Array1<f64>, Array2<C64>)> {
    let std = a.as_standard_layout().to_owned();
    let (vals, vecs) = std
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Degenerate { stage, detail: e.to_string() })?;
    let d = Array2::from_diag(&vals.mapv(|v| C64::new(v, 0.0)));
    let residual = |v: &Array2<C64>| fro_norm(&(&a.dot(v) - &v.dot(&d)));
    let conj = vecs.mapv(|z| z.conj());
    if residual(&conj) <= residual(&vecs) {
        Ok((vals, conj))
    } else {
        Ok((vals, vecs))
    }
}

/// General (non-Hermitian) eigendecomposition with right eigenvectors of `a`
/// as columns, paired entrywise with the returned eigenvalues.
///
/// Like [`eigh_cols`] this defends against the row-major/column-major
/// mismatch in the LAPACK bridge: every orientation the bridge could plausibly
/// return (plain, conjugated, transposed, adjoint, with plain or conjugated
/// eigenvalues) is residual-tested and the true one returned. An input whose
/// best candidate still violates the eigen equation is reported as degenerate.
pub fn eig_cols(a: &Array2<C64>, stage: &'static str) -> Result<(Array1<C64>, Array2<C64>)> {
    let std = a.as_standard_layout().to_owned();
    let (vals, vecs) = std
        .eig()
        .map_err(|e| Error::Degenerate { stage, detail: e.to_string() })?;
    let scale = fro_norm(a).max(1.0);
    let vec_candidates =
        [vecs.clone(), vecs.mapv(|z| z.conj()), vecs.t().to_owned(), adjoint(&vecs)];
    let val_candidates = [vals.clone(), vals.mapv(|z| z.conj())];
    let mut best: Option<(f64, Array1<C64>, Array2<C64>)> = None;
    for v in &vec_candidates {
        for w in &val_candidates {
            let d = Array2::from_diag(w);
            let resid = fro_norm(&(&a.dot(v) - &v.dot(&d))) / scale;
            if best.as_ref().is_none_or(|(r, _, _)| resid < *r) {
                best = Some((resid, w.clone(), v.clone()));
            }
        }
    }
    let (resid, vals, vecs) = best.expect("candidate list is non-empty");
    if resid > 1e-8 {
        return Err(Error::Degenerate {
            stage,
            detail: format!("eigendecomposition residual {resid:.3e}"),
        });
    }
    Ok((vals, vecs))
}

/// Hermitian (principal) square root via eigendecomposition. Eigenvalues
/// below `-1e-10 x max` are treated as evidence the input was not positive
/// semidefinite; smaller negatives are clamped to zero.
pub fn hermitian_sqrt(a: &Array2<C64>, stage: &'static str) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh_cols(a, stage)?;
    let vmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-10 * vmax.max(1.0);
    if vals.iter().any(|&v| v < -tol) {
        return Err(Error::Degenerate {
            stage,
            detail: format!("matrix is not PSD (min eigenvalue {:.3e})", vals[0]),
        });
    }
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let s = vals[j].max(0.0).sqrt();
        col.mapv_inplace(|z| z * s);
    }
    Ok(scaled.dot(&adjoint(&vecs)))
}

/// Frobenius norm.
pub fn fro_norm<S: Data<Elem = C64>>(a: &ArrayBase<S, Ix2>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
