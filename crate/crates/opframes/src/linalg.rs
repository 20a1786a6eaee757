//! Internal dense complex linear algebra helpers on top of nalgebra.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::tol;

pub type CMat = DMatrix<Complex64>;

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn scale(m: &CMat, c: Complex64) -> CMat {
    m.map(|v| v * c)
}

pub fn scale_re(m: &CMat, c: f64) -> CMat {
    m.map(|v| v * c)
}

/// Largest singular value. Zero for an all-zero matrix.
pub fn sigma_max(m: &CMat) -> f64 {
    if m.iter().all(|v| v.norm_sqr() == 0.0) {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b))
}

/// Smallest singular value (matrix must be nonempty).
pub fn sigma_min(m: &CMat) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

pub fn is_hermitian(m: &CMat, rel_tol: f64) -> bool {
    let scale = sigma_max(m).max(1.0);
    let dev = (m - m.adjoint())
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.norm()));
    dev <= rel_tol * scale
}

/// Symmetrize a numerically Hermitian matrix before eigen-based work.
pub fn hermitize(m: &CMat) -> CMat {
    scale_re(&(m + m.adjoint()), 0.5)
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching unitary of eigenvectors (columns).
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let dim = m.nrows();
    let se = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn min_eig(m: &CMat) -> f64 {
    herm_eig(m).0[0]
}

pub fn max_eig(m: &CMat) -> f64 {
    *herm_eig(m).0.last().unwrap()
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(m: &CMat, rank_rel: f64) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cut = rank_rel * smax;
    let mut sp = CMat::zeros(vt.nrows(), u.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            sp[(i, i)] = Complex64::new(1.0 / s, 0.0);
        }
    }
    vt.adjoint() * sp * u.adjoint()
}

/// f(A) for Hermitian PSD A with f applied to clamped eigenvalues.
fn herm_fun(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let dim = m.nrows();
    let mut d = CMat::zeros(dim, dim);
    for (i, &v) in vals.iter().enumerate() {
        d[(i, i)] = Complex64::new(f(v.max(0.0)), 0.0);
    }
    &vecs * d * vecs.adjoint()
}

/// Unique positive square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &CMat) -> CMat {
    herm_fun(m, f64::sqrt)
}

/// Pseudo-inverse square root of a Hermitian PSD matrix, with eigenvalues
/// below `rank_rel * lambda_max` treated as zero.
pub fn psd_pinv_sqrt(m: &CMat, rank_rel: f64) -> CMat {
    let lmax = max_eig(m).max(0.0);
    let cut = rank_rel * lmax;
    herm_fun(m, |v| if v > cut && v > 0.0 { 1.0 / v.sqrt() } else { 0.0 })
}

/// PSD test with a scale-relative slack on the minimum eigenvalue.
pub fn is_psd(m: &CMat, rel_tol: f64) -> bool {
    let scale = sigma_max(m).max(1.0);
    min_eig(m) >= -rel_tol * scale
}

pub enum PencilLower {
    /// The constraint matrix vanishes; any constant works.
    Unconstrained,
    /// The supremum of admissible constants.
    Value(f64),
    /// Range condition fails; no positive constant exists.
    Zero,
}

/// sup { a >= 0 : s - a * p is PSD } for Hermitian PSD `s`, `p`.
///
/// Computed in closed form as 1 / lambda_max(s^{+1/2} p s^{+1/2}) when
/// range(p) is contained in range(s).
pub fn max_psd_scale(s: &CMat, p: &CMat) -> PencilLower {
    let p_norm = sigma_max(p);
    if p_norm <= tol::RANK_REL * sigma_max(s).max(1.0) {
        return PencilLower::Unconstrained;
    }
    // range inclusion via the orthogonal projector onto range(s)
    let s_pinv = pinv(s, tol::RANK_REL);
    let dim = s.nrows();
    let resid = sigma_max(&((&identity(dim) - s * &s_pinv) * p));
    if resid > tol::RESIDUAL_REL * p_norm.max(1.0) {
        return PencilLower::Zero;
    }
    let sp_half = psd_pinv_sqrt(s, tol::RANK_REL);
    let g = &sp_half * p * sp_half.adjoint();
    let lmax = max_eig(&hermitize(&g));
    if lmax <= 0.0 {
        PencilLower::Unconstrained
    } else {
        PencilLower::Value(1.0 / lmax)
    }
}

/// Eigenvector of the pencil achieving the `max_psd_scale` value, mapped
/// back to the original coordinates. Used for probe witnesses.
pub fn pencil_witness(s: &CMat, p: &CMat) -> Option<nalgebra::DVector<Complex64>> {
    let sp_half = psd_pinv_sqrt(s, tol::RANK_REL);
    let g = hermitize(&(&sp_half * p * sp_half.adjoint()));
    let (vals, vecs) = herm_eig(&g);
    let last = vals.len() - 1;
    if vals[last] <= 0.0 {
        return None;
    }
    let v = vecs.column(last).into_owned();
    let w = &sp_half * v;
    let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        None
    } else {
        Some(w.map(|c| c / norm))
    }
}
