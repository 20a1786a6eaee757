//! Adjointable operators on `H = A^n` through their faithful flattening.
//!
//! An operator is stored as an nk-by-nk matrix `M` acting on the right of
//! the k-by-nk concatenation of a module vector: `T(x) ~ X * M`. The
//! flattening is a *-anti-isomorphism: the adjoint is the conjugate
//! transpose, composition reverses order, and positivity and spectra are
//! preserved. All A-valued operator inequalities therefore reduce to
//! ordinary PSD tests on flattened matrices.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::module::{ModuleVector, VectorSequence};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointableOp {
    k: usize,
    n: usize,
    flat: CMat, // nk x nk
}

impl AdjointableOp {
    pub fn from_flat(k: usize, n: usize, flat: CMat) -> Result<Self> {
        let dim = n * k;
        if flat.nrows() != dim || flat.ncols() != dim || k == 0 || n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "expected {dim}x{dim} flattened operator, got {}x{}",
                flat.nrows(),
                flat.ncols()
            )));
        }
        Ok(Self { k, n, flat })
    }

    pub fn identity(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            flat: linalg::identity(n * k),
        }
    }

    pub fn zero(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            flat: CMat::zeros(n * k, n * k),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    pub fn flat(&self) -> &CMat {
        &self.flat
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k == other.k && self.n == other.n
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(format!(
                "(k, n) = ({}, {}) vs ({}, {})",
                self.k, self.n, other.k, other.n
            )));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            k: self.k,
            n: self.n,
            flat: self.flat.adjoint(),
        }
    }

    /// `self` after `other`: x -> self(other(x)), so the flattened matrix is
    /// `flat(other) * flat(self)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            k: self.k,
            n: self.n,
            flat: &other.flat * &self.flat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            k: self.k,
            n: self.n,
            flat: &self.flat + &other.flat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            k: self.k,
            n: self.n,
            flat: &self.flat - &other.flat,
        })
    }

    pub fn scale(&self, c: num_complex::Complex64) -> Self {
        Self {
            k: self.k,
            n: self.n,
            flat: linalg::scale(&self.flat, c),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        Self {
            k: self.k,
            n: self.n,
            flat: linalg::scale_re(&self.flat, c),
        }
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.k() != self.k || x.n() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "vector (k, n) = ({}, {}), operator ({}, {})",
                x.k(),
                x.n(),
                self.k,
                self.n
            )));
        }
        ModuleVector::from_flat(self.k, self.n, x.flat() * &self.flat)
    }

    /// Operator norm: largest singular value of the flattening.
    pub fn op_norm(&self) -> f64 {
        linalg::sigma_max(&self.flat)
    }

    pub fn is_self_adjoint(&self, rel_tol: f64) -> bool {
        linalg::is_hermitian(&self.flat, rel_tol)
    }

    /// Moore-Penrose pseudo-inverse with singular values below
    /// `rank_tol * sigma_max` dropped.
    pub fn pseudo_inverse(&self, rank_tol: f64) -> Self {
        Self {
            k: self.k,
            n: self.n,
            flat: linalg::pinv(&self.flat, rank_tol),
        }
    }

    /// `||K K^* - I||` small; in finite dimension this forces K unitary.
    pub fn is_co_isometry(&self, tol: f64) -> bool {
        let kkstar = self.flat.adjoint() * &self.flat; // flat(K o K*)
        linalg::sigma_max(&(kkstar - linalg::identity(self.dim()))) <= tol
    }

    /// Flattening of the positive operator `K K^*`, the weight of the
    /// K-frame lower bound.
    pub fn kkstar_flat(&self) -> CMat {
        self.flat.adjoint() * &self.flat
    }
}

/// Outcome of the Douglas range-inclusion test for a pair `(T, S)`.
pub struct DouglasReport {
    pub included: bool,
    /// Largest constant with `lambda * T T^* <= S S^*`, when included.
    pub lambda: Option<f64>,
    /// Factor `Q` with `S Q = T` (flattened: `flat(S) * flat(Q) = flat(T)`).
    pub factor: Option<AdjointableOp>,
    /// Range-projection residual backing the verdict.
    pub residual: f64,
}

/// Douglas factorization on flattened matrices: range inclusion, the
/// majorization constant, and the minimal-norm factor, all of which must
/// agree on the verdict.
pub fn douglas_check(t: &AdjointableOp, s: &AdjointableOp) -> Result<DouglasReport> {
    if !t.same_shape(s) {
        return Err(Error::ShapeMismatch(format!(
            "(k, n) = ({}, {}) vs ({}, {})",
            t.k, t.n, s.k, s.n
        )));
    }
    let report = douglas_check_mats(t.flat(), s.flat())?;
    let factor = report
        .2
        .map(|q| AdjointableOp::from_flat(t.k, t.n, q).expect("factor shape"));
    Ok(DouglasReport {
        included: report.0,
        lambda: report.1,
        factor,
        residual: report.3,
    })
}

/// Matrix-level Douglas test: `range(t) subset range(s)` via the projector
/// residual, the pencil constant for `lambda t t^H <= s s^H`, and the
/// minimal-norm factor `q = s^+ t`.
pub fn douglas_check_mats(t: &CMat, s: &CMat) -> Result<(bool, Option<f64>, Option<CMat>, f64)> {
    if t.nrows() != s.nrows() || t.ncols() != s.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            t.nrows(),
            t.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    let dim = t.nrows();
    let s_pinv = linalg::pinv(s, tol::RANK_REL);
    let proj = linalg::identity(dim) - s * &s_pinv;
    let residual = linalg::sigma_max(&(&proj * t));
    let t_norm = linalg::sigma_max(t);
    let included = residual <= tol::RESIDUAL_REL * t_norm.max(1.0);
    if !included {
        return Ok((false, None, None, residual));
    }
    let q = &s_pinv * t;
    let ttstar = t * t.adjoint();
    let ssstar = s * s.adjoint();
    let lambda = match linalg::max_psd_scale(&ssstar, &ttstar) {
        linalg::PencilLower::Value(v) => Some(v),
        // T = 0: any positive constant works; report 1 for definiteness.
        linalg::PencilLower::Unconstrained => Some(1.0),
        linalg::PencilLower::Zero => None,
    };
    Ok((true, lambda, Some(q), residual))
}

/// Lemma-style surjectivity report for a self-adjoint operator.
pub struct SurjectivityBounds {
    pub surjective: bool,
    pub m: f64,
    pub big_m: f64,
}

/// For self-adjoint `T`: surjectivity together with the sharp constants in
/// `m ||x|| <= ||T x|| <= M ||x||`.
pub fn surjectivity_bounds(t: &AdjointableOp) -> Result<SurjectivityBounds> {
    if !t.is_self_adjoint(tol::PSD_REL) {
        return Err(Error::Precondition(
            "surjectivity bounds require a self-adjoint operator".into(),
        ));
    }
    let smax = linalg::sigma_max(t.flat());
    let smin = if smax == 0.0 {
        0.0
    } else {
        linalg::sigma_min(t.flat())
    };
    Ok(SurjectivityBounds {
        surjective: smin > tol::FRAME_DECISION * smax.max(1.0),
        m: smin,
        big_m: smax,
    })
}

/// For injective `T`: the invertibility sandwich constants of `T^* T`,
/// i.e. `||(T^*T)^{-1}||^{-1}` and `||T||^2`.
pub fn ttstar_bounds(t: &AdjointableOp) -> Result<(f64, f64)> {
    let smax = linalg::sigma_max(t.flat());
    let smin = if smax == 0.0 {
        0.0
    } else {
        linalg::sigma_min(t.flat())
    };
    if smin <= tol::FRAME_DECISION * smax.max(1.0) {
        return Err(Error::Precondition(format!(
            "operator is not injective: sigma_min = {smin:.3e}"
        )));
    }
    Ok((smin * smin, smax * smax))
}

/// A bounded operator on the finite direct sum `l2(H) = H^J`, acting on the
/// right of the k-by-(J nk) concatenation of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    k: usize,
    n: usize,
    blocks: usize,
    flat: CMat, // (J nk) x (J nk)
}

impl BlockOperator {
    pub fn from_flat(k: usize, n: usize, blocks: usize, flat: CMat) -> Result<Self> {
        let dim = blocks * n * k;
        if blocks == 0 || flat.nrows() != dim || flat.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {dim}x{dim} block operator, got {}x{}",
                flat.nrows(),
                flat.ncols()
            )));
        }
        Ok(Self { k, n, blocks, flat })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn flat(&self) -> &CMat {
        &self.flat
    }

    pub fn norm(&self) -> f64 {
        linalg::sigma_max(&self.flat)
    }

    pub fn apply(&self, seq: &VectorSequence) -> Result<VectorSequence> {
        if seq.len() != self.blocks {
            return Err(Error::ShapeMismatch(format!(
                "sequence length {} vs block count {}",
                seq.len(),
                self.blocks
            )));
        }
        let nk = self.n * self.k;
        let mut concat = CMat::zeros(self.k, self.blocks * nk);
        for (i, x) in seq.items().iter().enumerate() {
            concat.view_mut((0, i * nk), (self.k, nk)).copy_from(x.flat());
        }
        let out = concat * &self.flat;
        let items = (0..self.blocks)
            .map(|i| {
                ModuleVector::from_flat(self.k, self.n, out.view((0, i * nk), (self.k, nk)).into_owned())
            })
            .collect::<Result<Vec<_>>>()?;
        VectorSequence::new(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian, random_unitary, rng_for_seed};
    use num_complex::Complex64;

    fn random_op(k: usize, n: usize, rng: &mut impl rand::Rng) -> AdjointableOp {
        AdjointableOp::from_flat(k, n, complex_gaussian(n * k, n * k, rng)).unwrap()
    }

    #[test]
    fn identity_applies_trivially() {
        let mut rng = rng_for_seed(1);
        let x = ModuleVector::random_unit(2, 3, &mut rng);
        let id = AdjointableOp::identity(2, 3);
        assert_eq!(id.apply(&x).unwrap(), x);
        assert!((id.op_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adjointness_identity() {
        let mut rng = rng_for_seed(2);
        for _ in 0..30 {
            let t = random_op(2, 2, &mut rng);
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            let y = ModuleVector::random_unit(2, 2, &mut rng);
            let lhs = t.apply(&x).unwrap().inner_product(&y).unwrap();
            let rhs = x.inner_product(&t.adjoint().apply(&y).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).norm() < 1e-10 * t.op_norm().max(1.0));
        }
    }

    #[test]
    fn composition_reverses_flattening() {
        let mut rng = rng_for_seed(3);
        for _ in 0..30 {
            let t = random_op(2, 2, &mut rng);
            let s = random_op(2, 2, &mut rng);
            let c = t.compose(&s).unwrap();
            let expected = s.flat() * t.flat();
            assert!(linalg::sigma_max(&(c.flat() - expected)) < 1e-12 * c.op_norm().max(1.0));
            // action agrees: (T o S)(x) = T(S(x))
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            let a = c.apply(&x).unwrap();
            let b = t.apply(&s.apply(&x).unwrap()).unwrap();
            assert!(a.sub(&b).unwrap().scalar_norm() < 1e-12 * c.op_norm().max(1.0));
        }
    }

    #[test]
    fn operator_norm_inequality_holds() {
        let mut rng = rng_for_seed(4);
        for _ in 0..100 {
            let t = random_op(2, 2, &mut rng);
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            let gap = x
                .inner_product(&x)
                .unwrap()
                .scale(Complex64::new(t.op_norm().powi(2), 0.0))
                .sub(&{
                    let tx = t.apply(&x).unwrap();
                    tx.inner_product(&tx).unwrap()
                });
            assert!(gap.is_positive(1e-9));
        }
    }

    #[test]
    fn pseudo_inverse_of_invertible() {
        let mut rng = rng_for_seed(5);
        let t = random_op(2, 2, &mut rng);
        let p = t.pseudo_inverse(tol::RANK_REL);
        let r = linalg::sigma_max(&(t.flat() * p.flat() - linalg::identity(4)));
        assert!(r < 1e-10);
    }

    #[test]
    fn pseudo_inverse_of_zero_is_zero() {
        let z = AdjointableOp::zero(2, 2);
        assert_eq!(z.pseudo_inverse(tol::RANK_REL), z);
    }

    #[test]
    fn penrose_identities_rank_deficient() {
        let mut rng = rng_for_seed(6);
        // rank-2 operator on a 6-dimensional flattening
        let a = complex_gaussian(6, 2, &mut rng);
        let b = complex_gaussian(2, 6, &mut rng);
        let m = &a * &b;
        let t = AdjointableOp::from_flat(2, 3, m.clone()).unwrap();
        let p = t.pseudo_inverse(tol::RANK_REL).flat().clone();
        let scale = linalg::sigma_max(&m).max(1.0);
        assert!(linalg::sigma_max(&(&m * &p * &m - &m)) < 1e-8 * scale);
        assert!(linalg::sigma_max(&(&p * &m * &p - &p)) < 1e-8 * scale);
        let mp = &m * &p;
        let pm = &p * &m;
        assert!(linalg::sigma_max(&(mp.adjoint() - &mp)) < 1e-8);
        assert!(linalg::sigma_max(&(pm.adjoint() - &pm)) < 1e-8);
    }

    #[test]
    fn douglas_same_invertible_operator() {
        let mut rng = rng_for_seed(7);
        let s = random_op(2, 2, &mut rng);
        let rep = douglas_check(&s, &s).unwrap();
        assert!(rep.included);
        let q = rep.factor.unwrap();
        assert!(linalg::sigma_max(&(q.flat() - linalg::identity(4))) < 1e-9);
    }

    #[test]
    fn douglas_identity_not_in_projection_range() {
        let mut p = CMat::zeros(4, 4);
        p[(0, 0)] = Complex64::new(1.0, 0.0);
        p[(1, 1)] = Complex64::new(1.0, 0.0);
        let s = AdjointableOp::from_flat(2, 2, p).unwrap();
        let t = AdjointableOp::identity(2, 2);
        let rep = douglas_check(&t, &s).unwrap();
        assert!(!rep.included);
        assert!(rep.lambda.is_none());
    }

    #[test]
    fn douglas_constructed_factorization() {
        let mut rng = rng_for_seed(8);
        for _ in 0..20 {
            let s = random_op(2, 2, &mut rng);
            let q0 = random_op(2, 2, &mut rng);
            let t = AdjointableOp::from_flat(2, 2, s.flat() * q0.flat()).unwrap();
            let rep = douglas_check(&t, &s).unwrap();
            assert!(rep.included);
            assert!(rep.lambda.unwrap() > 0.0);
            let q = rep.factor.unwrap();
            let resid = linalg::sigma_max(&(s.flat() * q.flat() - t.flat()));
            assert!(resid <= 1e-8 * t.op_norm().max(1.0));
        }
    }

    #[test]
    fn surjectivity_identity() {
        let b = surjectivity_bounds(&AdjointableOp::identity(2, 2)).unwrap();
        assert!(b.surjective);
        assert!((b.m - 1.0).abs() < 1e-14 && (b.big_m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn surjectivity_rejects_non_self_adjoint() {
        let mut rng = rng_for_seed(9);
        let t = random_op(2, 2, &mut rng);
        assert!(surjectivity_bounds(&t).is_err());
    }

    #[test]
    fn surjectivity_detects_kernel() {
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        m[(2, 2)] = Complex64::new(1.0, 0.0);
        // m[(3,3)] stays zero
        let t = AdjointableOp::from_flat(2, 2, m).unwrap();
        assert!(!surjectivity_bounds(&t).unwrap().surjective);
    }

    #[test]
    fn ttstar_scalar_cases() {
        let id = AdjointableOp::identity(2, 2);
        assert_eq!(ttstar_bounds(&id).unwrap(), (1.0, 1.0));
        let two = id.scale_re(2.0);
        let (lo, hi) = ttstar_bounds(&two).unwrap();
        assert!((lo - 4.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
        assert!(ttstar_bounds(&AdjointableOp::zero(2, 2)).is_err());
    }

    #[test]
    fn co_isometry_from_unitary() {
        let mut rng = rng_for_seed(10);
        let u = random_unitary(6, &mut rng);
        let k = AdjointableOp::from_flat(2, 3, u).unwrap();
        assert!(k.is_co_isometry(1e-10));
        assert!(!k.scale_re(2.0).is_co_isometry(1e-10));
        assert!(AdjointableOp::identity(2, 3).is_co_isometry(1e-12));
    }
}
