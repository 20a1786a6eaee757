//! Independent brute-force reference routines.
//!
//! Everything here deliberately avoids the nalgebra decomposition paths used
//! by the main modules: eigenvalues come from a hand-written cyclic Jacobi
//! sweep, PSD tests from a hand-written Cholesky attempt, and extremal frame
//! bounds from bisection on those PSD tests. These are the second route that
//! the optimal-bounds and certifier results are validated against.

use num_complex::Complex64;

use crate::linalg::CMat;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns ascending eigenvalues and the unitary of eigenvectors.
pub fn hermitian_eig_jacobi(m: &CMat) -> (Vec<f64>, CMat) {
    let dim = m.nrows();
    assert_eq!(dim, m.ncols(), "matrix must be square");
    let mut a = m.map(|v| v) ;
    // enforce exact Hermitian symmetry of the working copy
    for i in 0..dim {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..dim {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(dim, dim);
    let scale = a.iter().fold(0.0_f64, |acc, x| acc.max(x.norm())).max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..dim {
            for q in p + 1..dim {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let phase = apq / apq.norm();
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns: [p q] <- [p q] * [[c, s*phase], [-s*conj(phase), c]]... applied as
                // a 2x2 unitary J with J_pp = c, J_pq = s*phase, J_qp = -s*conj(phase), J_qq = c
                let jpp = Complex64::new(c, 0.0);
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                let jqq = Complex64::new(c, 0.0);
                // A <- J^H A J
                for r in 0..dim {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * jpp + arq * jqp;
                    a[(r, q)] = arp * jpq + arq * jqq;
                }
                for r in 0..dim {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = jpp.conj() * apr + jqp.conj() * aqr;
                    a[(q, r)] = jpq.conj() * apr + jqq.conj() * aqr;
                }
                for r in 0..dim {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * jpp + vrq * jqp;
                    v[(r, q)] = vrp * jpq + vrq * jqq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..dim).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vecs = CMat::zeros(dim, dim);
    for (col, &(_, i)) in pairs.iter().enumerate() {
        vecs.set_column(col, &v.column(i));
    }
    (vals, vecs)
}

/// Does a Cholesky factorization of `m + shift * I` succeed? Used as a
/// decomposition-free PSD test.
pub fn cholesky_succeeds(m: &CMat, shift: f64) -> bool {
    let dim = m.nrows();
    let mut a = m.clone();
    for i in 0..dim {
        a[(i, i)] += Complex64::new(shift, 0.0);
    }
    let mut l = CMat::zeros(dim, dim);
    for j in 0..dim {
        let mut d = a[(j, j)].re;
        for p in 0..j {
            d -= l[(j, p)].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in j + 1..dim {
            let mut sum = a[(i, j)];
            for p in 0..j {
                sum -= l[(i, p)] * l[(j, p)].conj();
            }
            l[(i, j)] = sum / dj;
        }
    }
    true
}

/// PSD verdict with a scale-relative slack, by Cholesky attempt.
pub fn is_psd_cholesky(m: &CMat, rel_tol: f64) -> bool {
    let scale = m.iter().fold(0.0_f64, |a, v| a.max(v.norm())).max(1.0);
    cholesky_succeeds(m, rel_tol * scale)
}

fn matrix_scale(m: &CMat) -> f64 {
    // row-sum bound on the spectral radius; cheap and decomposition-free
    let dim = m.nrows();
    (0..dim)
        .map(|i| (0..dim).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

/// Largest `a` with `s - a * I` PSD, by bisection on the Cholesky test.
pub fn bisect_lower_bound(s: &CMat) -> f64 {
    bisect_max_scale(s, &CMat::identity(s.nrows(), s.ncols()))
}

/// Smallest `b` with `b * I - s` PSD, by bisection on the Cholesky test.
pub fn bisect_upper_bound(s: &CMat) -> f64 {
    let hi0 = matrix_scale(s).max(1e-30);
    let dim = s.nrows();
    let psd_at = |b: f64| {
        let mut m = -s.clone();
        for i in 0..dim {
            m[(i, i)] += Complex64::new(b, 0.0);
        }
        cholesky_succeeds(&m, 1e-13 * hi0)
    };
    let (mut lo, mut hi) = (0.0_f64, hi0);
    if psd_at(0.0) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psd_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi0 {
            break;
        }
    }
    hi
}

/// sup { a >= 0 : s - a * p PSD }, by doubling then bisection on the
/// Cholesky test. Returns `f64::INFINITY` when even huge multiples pass
/// (the constraint is vacuous).
pub fn bisect_max_scale(s: &CMat, p: &CMat) -> f64 {
    let dim = s.nrows();
    let scale = matrix_scale(s).max(matrix_scale(p)).max(1.0);
    let psd_at = |a: f64| {
        let mut m = s - p.map(|v| v * a);
        for i in 0..dim {
            m[(i, i)] += Complex64::new(1e-12 * scale * (1.0 + a), 0.0);
        }
        cholesky_succeeds(&m, 0.0)
    };
    if !psd_at(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut doubles = 0;
    while psd_at(hi) {
        hi *= 2.0;
        doubles += 1;
        if doubles > 120 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    if !psd_at(lo) {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psd_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    lo
}
