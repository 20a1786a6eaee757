//! Operator frames, K-operator frames and vector frames: frame operators,
//! optimal bounds, classification and the norm-characterization probe.
//!
//! "Optimal bounds" are the extremal eigenvalues of the flattened frame
//! operator. By the rank-one reduction these are simultaneously the sharp
//! constants of the A-valued inequality and of the scalar norm inequality;
//! the probe and the bisection oracle in [`crate::oracle`] cross-check this.

use serde::Serialize;

use crate::adjointable::AdjointableOp;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, PencilLower};
use crate::module::{ModuleVector, VectorSequence};
use crate::sampling;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Classification {
    /// The frame operator vanishes.
    Degenerate,
    /// Upper bound only; the lower optimal constant is numerically zero.
    BesselOnly,
    Frame,
    Tight(f64),
    Parseval,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KFrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub k_frame: bool,
    /// K = 0 sentinel: the lower inequality is vacuous and `lower` is
    /// reported as `upper`.
    pub unconstrained: bool,
}

fn classify(lower: f64, upper: f64) -> Classification {
    let tol = tol::FRAME_DECISION;
    if upper <= tol {
        return Classification::Degenerate;
    }
    if lower <= tol * upper.max(1.0) {
        return Classification::BesselOnly;
    }
    if (upper - lower).abs() <= tol * upper {
        if (upper - 1.0).abs() <= tol {
            Classification::Parseval
        } else {
            Classification::Tight(0.5 * (lower + upper))
        }
    } else {
        Classification::Frame
    }
}

/// A finite indexed family of adjointable operators sharing one module.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    k: usize,
    n: usize,
    ops: Vec<AdjointableOp>,
}

impl OperatorFamily {
    pub fn new(ops: Vec<AdjointableOp>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyFamily)?;
        let (k, n) = (first.k(), first.n());
        for (i, op) in ops.iter().enumerate() {
            if op.k() != k || op.n() != n {
                return Err(Error::ShapeMismatch(format!(
                    "family member {i} has (k, n) = ({}, {})",
                    op.k(),
                    op.n()
                )));
            }
        }
        Ok(Self { k, n, ops })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[AdjointableOp] {
        &self.ops
    }

    /// Frame operator `S = sum_i T_i^* T_i`, flattened as
    /// `sum_i flat(T_i) flat(T_i)^H`. Always self-adjoint and positive.
    pub fn frame_operator(&self) -> AdjointableOp {
        let dim = self.n * self.k;
        let mut acc = CMat::zeros(dim, dim);
        for op in &self.ops {
            acc += op.flat() * op.flat().adjoint();
        }
        AdjointableOp::from_flat(self.k, self.n, linalg::hermitize(&acc)).expect("shape")
    }

    /// Analysis operator: x -> {T_i x}.
    pub fn analysis_apply(&self, x: &ModuleVector) -> Result<VectorSequence> {
        let items = self
            .ops
            .iter()
            .map(|op| op.apply(x))
            .collect::<Result<Vec<_>>>()?;
        VectorSequence::new(items)
    }

    /// Synthesis operator: {x_i} -> sum_i T_i^* x_i.
    pub fn synthesis_apply(&self, seq: &VectorSequence) -> Result<ModuleVector> {
        if seq.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "sequence length {} vs family size {}",
                seq.len(),
                self.len()
            )));
        }
        let mut acc = ModuleVector::zero(self.k, self.n);
        for (op, x) in self.ops.iter().zip(seq.items()) {
            acc = acc.add(&op.adjoint().apply(x)?)?;
        }
        Ok(acc)
    }

    pub fn optimal_bounds(&self) -> Result<FrameBounds> {
        let s = self.frame_operator();
        let (vals, _) = linalg::herm_eig(s.flat());
        let lower = vals[0].max(0.0);
        let upper = vals.last().copied().unwrap().max(0.0);
        Ok(FrameBounds {
            lower,
            upper,
            classification: classify(lower, upper),
        })
    }

    /// Optimal constants of the K-frame inequality: the upper bound is the
    /// plain one; the lower is `sup { A : S - A * KK^* PSD }`.
    pub fn k_optimal_bounds(&self, k_op: &AdjointableOp) -> Result<KFrameBounds> {
        if k_op.k() != self.k || k_op.n() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "K has (k, n) = ({}, {}), family ({}, {})",
                k_op.k(),
                k_op.n(),
                self.k,
                self.n
            )));
        }
        let s = self.frame_operator();
        let upper = linalg::max_eig(s.flat()).max(0.0);
        let p = k_op.kkstar_flat();
        match linalg::max_psd_scale(s.flat(), &p) {
            PencilLower::Unconstrained => Ok(KFrameBounds {
                lower: upper,
                upper,
                k_frame: true,
                unconstrained: true,
            }),
            PencilLower::Value(v) => Ok(KFrameBounds {
                lower: v,
                upper,
                k_frame: v > tol::FRAME_DECISION * upper.max(1.0),
                unconstrained: false,
            }),
            PencilLower::Zero => Ok(KFrameBounds {
                lower: 0.0,
                upper,
                k_frame: false,
                unconstrained: false,
            }),
        }
    }

    /// Member-wise sum `{T_i + sign * R_i}`.
    pub fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "family sizes {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| a.add(&b.scale_re(sign)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// Member-wise scalar multiple `{c_i T_i}` with one weight per member.
    pub fn scale_members(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for family of size {}",
                weights.len(),
                self.len()
            )));
        }
        let ops = self
            .ops
            .iter()
            .zip(weights)
            .map(|(op, &w)| op.scale_re(w))
            .collect();
        Self::new(ops)
    }
}

/// Member-wise linear combination `{ sum_n alpha_n T_{n,i} }` of several
/// equally sized families.
pub fn weighted_family_sum(
    families: &[OperatorFamily],
    alphas: &[num_complex::Complex64],
) -> Result<OperatorFamily> {
    let first = families.first().ok_or(Error::EmptyFamily)?;
    if families.len() != alphas.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} families vs {} scalars",
            families.len(),
            alphas.len()
        )));
    }
    let count = first.len();
    let mut ops = Vec::with_capacity(count);
    for i in 0..count {
        let mut acc = AdjointableOp::zero(first.k(), first.n());
        for (fam, &a) in families.iter().zip(alphas) {
            if fam.len() != count {
                return Err(Error::ShapeMismatch(format!(
                    "family sizes {} vs {count}",
                    fam.len()
                )));
            }
            acc = acc.add(&fam.ops[i].scale(a))?;
        }
        ops.push(acc);
    }
    OperatorFamily::new(ops)
}

/// Optimal bounds of a vector frame `{x_i}`: extremal eigenvalues of the
/// flattened Gram accumulation `G = sum_i X_i^H X_i`.
pub fn vector_frame_bounds(xs: &[ModuleVector]) -> Result<FrameBounds> {
    let first = xs.first().ok_or(Error::EmptyFamily)?;
    let dim = first.n() * first.k();
    let mut g = CMat::zeros(dim, dim);
    for (i, x) in xs.iter().enumerate() {
        if !first.same_shape(x) {
            return Err(Error::ShapeMismatch(format!(
                "vector {i} has (k, n) = ({}, {})",
                x.k(),
                x.n()
            )));
        }
        g += x.flat().adjoint() * x.flat();
    }
    let (vals, _) = linalg::herm_eig(&g);
    let lower = vals[0].max(0.0);
    let upper = vals.last().copied().unwrap().max(0.0);
    Ok(FrameBounds {
        lower,
        upper,
        classification: classify(lower, upper),
    })
}

/// Extremes of the sampled norm ratios of the norm characterization.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_witness: ModuleVector,
    pub max_witness: ModuleVector,
}

impl OperatorFamily {
    /// Sample `||<S x, x>|| / ||x||^2` (or `/ ||K^* x||^2` for the lower
    /// side in K-mode) over seeded unit vectors plus the rank-one vectors
    /// built from extremal eigenvectors of the flattened frame operator.
    pub fn norm_char_probe(
        &self,
        samples: usize,
        seed: u64,
        k_op: Option<&AdjointableOp>,
    ) -> Result<ProbeResult> {
        if samples == 0 {
            return Err(Error::Precondition("samples must be >= 1".into()));
        }
        let s = self.frame_operator();
        let s_flat = s.flat().clone();
        let p = k_op.map(|k| k.kkstar_flat());
        if let Some(p) = &p {
            if linalg::sigma_max(p) <= tol::RANK_REL {
                return Err(Error::Precondition(
                    "K-mode probe with K = 0 produces no ratios".into(),
                ));
            }
        }

        let mut rng = sampling::rng_for_seed(seed);
        let mut candidates: Vec<ModuleVector> = (0..samples)
            .map(|_| ModuleVector::random_unit(self.k, self.n, &mut rng))
            .collect();

        // rank-one witnesses from the extremal eigenvectors
        let (_, vecs) = linalg::herm_eig(&s_flat);
        let dim = self.n * self.k;
        candidates.push(ModuleVector::rank_one(self.k, self.n, &vecs.column(0).into_owned())?);
        candidates.push(ModuleVector::rank_one(
            self.k,
            self.n,
            &vecs.column(dim - 1).into_owned(),
        )?);
        if let Some(p) = &p {
            if let Some(w) = linalg::pencil_witness(&s_flat, p) {
                candidates.push(ModuleVector::rank_one(self.k, self.n, &w)?);
            }
        }

        let mut best: Option<(f64, ModuleVector)> = None;
        let mut worst: Option<(f64, ModuleVector)> = None;
        for x in candidates {
            let sx = s.apply(&x)?;
            let num = sx.inner_product(&x)?.norm();
            let den_upper = x.scalar_norm().powi(2);
            if den_upper <= tol::RANK_REL {
                continue;
            }
            let upper_ratio = num / den_upper;
            if worst.as_ref().map_or(true, |(r, _)| upper_ratio > *r) {
                worst = Some((upper_ratio, x.clone()));
            }
            let lower_ratio = match k_op {
                None => upper_ratio,
                Some(k) => {
                    let kx = k.adjoint().apply(&x)?;
                    let den = kx.scalar_norm().powi(2);
                    if den <= tol::RANK_REL * den_upper {
                        continue;
                    }
                    num / den
                }
            };
            if best.as_ref().map_or(true, |(r, _)| lower_ratio < *r) {
                best = Some((lower_ratio, x));
            }
        }
        let (min_ratio, min_witness) = best.ok_or_else(|| {
            Error::Precondition("no admissible probe vector produced a ratio".into())
        })?;
        let (max_ratio, max_witness) = worst.unwrap();
        Ok(ProbeResult {
            min_ratio,
            max_ratio,
            min_witness,
            max_witness,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian, rng_for_seed};
    use num_complex::Complex64;

    fn random_family(k: usize, n: usize, count: usize, seed: u64) -> OperatorFamily {
        let mut rng = rng_for_seed(seed);
        let ops = (0..count)
            .map(|_| AdjointableOp::from_flat(k, n, complex_gaussian(n * k, n * k, &mut rng)).unwrap())
            .collect();
        OperatorFamily::new(ops).unwrap()
    }

    #[test]
    fn identity_family_is_parseval() {
        let f = OperatorFamily::new(vec![AdjointableOp::identity(2, 2)]).unwrap();
        let s = f.frame_operator();
        assert!(linalg::sigma_max(&(s.flat() - linalg::identity(4))) < 1e-14);
        let b = f.optimal_bounds().unwrap();
        assert_eq!(b.classification, Classification::Parseval);
    }

    #[test]
    fn doubled_identity_is_tight_two() {
        let id = AdjointableOp::identity(2, 2);
        let f = OperatorFamily::new(vec![id.clone(), id]).unwrap();
        let b = f.optimal_bounds().unwrap();
        assert!((b.lower - 2.0).abs() < 1e-12 && (b.upper - 2.0).abs() < 1e-12);
        assert!(matches!(b.classification, Classification::Tight(_)));
    }

    #[test]
    fn scalar_family_bounds() {
        let m = CMat::from_element(1, 1, Complex64::new(2.0, 0.0));
        let f = OperatorFamily::new(vec![AdjointableOp::from_flat(1, 1, m).unwrap()]).unwrap();
        let b = f.optimal_bounds().unwrap();
        assert!((b.lower - 4.0).abs() < 1e-14 && (b.upper - 4.0).abs() < 1e-14);
    }

    #[test]
    fn frame_operator_quadratic_form_matches_direct_sum() {
        let f = random_family(2, 2, 3, 21);
        let s = f.frame_operator();
        let mut rng = rng_for_seed(22);
        for _ in 0..100 {
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            let via_s = s.apply(&x).unwrap().inner_product(&x).unwrap();
            let mut direct = crate::algebra::AlgebraElement::zero(2);
            for op in f.ops() {
                let tx = op.apply(&x).unwrap();
                direct = direct.add(&tx.inner_product(&tx).unwrap());
            }
            assert!(via_s.sub(&direct).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn analysis_synthesis_roundtrip_is_frame_operator() {
        let f = random_family(2, 3, 4, 23);
        let s = f.frame_operator();
        let mut rng = rng_for_seed(24);
        let x = ModuleVector::random_unit(2, 3, &mut rng);
        let y = f.synthesis_apply(&f.analysis_apply(&x).unwrap()).unwrap();
        let z = s.apply(&x).unwrap();
        assert!(y.sub(&z).unwrap().scalar_norm() < 1e-10 * s.op_norm());
    }

    #[test]
    fn analysis_synthesis_adjointness() {
        let f = random_family(2, 2, 3, 25);
        let mut rng = rng_for_seed(26);
        for _ in 0..20 {
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            let seq = VectorSequence::new(
                (0..3)
                    .map(|_| ModuleVector::random_unit(2, 2, &mut rng))
                    .collect(),
            )
            .unwrap();
            let lhs = f.analysis_apply(&x).unwrap().inner_product(&seq).unwrap();
            let rhs = x.inner_product(&f.synthesis_apply(&seq).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).norm() < 1e-10 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn k_identity_matches_plain_lower() {
        let f = random_family(2, 2, 3, 27);
        let plain = f.optimal_bounds().unwrap();
        let kb = f.k_optimal_bounds(&AdjointableOp::identity(2, 2)).unwrap();
        assert!((kb.lower - plain.lower).abs() < 1e-9 * plain.lower.max(1.0));
        assert!(kb.k_frame);
    }

    #[test]
    fn k_zero_sentinel() {
        let f = random_family(2, 2, 3, 28);
        let kb = f.k_optimal_bounds(&AdjointableOp::zero(2, 2)).unwrap();
        assert!(kb.unconstrained && kb.k_frame);
        assert_eq!(kb.lower, kb.upper);
    }

    #[test]
    fn standard_basis_vector_frame_is_parseval() {
        // k = 1: module vectors are ordinary row vectors in C^n
        let n = 3;
        let xs: Vec<ModuleVector> = (0..n)
            .map(|i| {
                let mut flat = CMat::zeros(1, n);
                flat[(0, i)] = Complex64::new(1.0, 0.0);
                ModuleVector::from_flat(1, n, flat).unwrap()
            })
            .collect();
        let b = vector_frame_bounds(&xs).unwrap();
        assert_eq!(b.classification, Classification::Parseval);
    }

    #[test]
    fn repeated_unit_vector_is_tight_two() {
        let mut flat = CMat::zeros(1, 1);
        flat[(0, 0)] = Complex64::new(1.0, 0.0);
        let x = ModuleVector::from_flat(1, 1, flat).unwrap();
        let b = vector_frame_bounds(&[x.clone(), x]).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
    }

    #[test]
    fn vector_frame_quadratic_identity() {
        let mut rng = rng_for_seed(29);
        let xs: Vec<ModuleVector> = (0..3)
            .map(|_| ModuleVector::random_unit(2, 2, &mut rng))
            .collect();
        let mut g = CMat::zeros(4, 4);
        for x in &xs {
            g += x.flat().adjoint() * x.flat();
        }
        for _ in 0..100 {
            let x = ModuleVector::random_unit(2, 2, &mut rng);
            // sum_i <x, x_i><x_i, x> as algebra elements
            let mut direct = crate::algebra::AlgebraElement::zero(2);
            for xi in &xs {
                let a = x.inner_product(xi).unwrap();
                direct = direct.add(&a.mul(&a.adjoint()));
            }
            // versus the flattened quadratic form X G X^H
            let form = x.flat() * &g * x.flat().adjoint();
            assert!(
                linalg::sigma_max(&(direct.matrix() - form)) < 1e-10 * direct.norm().max(1.0)
            );
        }
    }

    #[test]
    fn probe_identity_family_all_ones() {
        let f = OperatorFamily::new(vec![AdjointableOp::identity(2, 2)]).unwrap();
        let p = f.norm_char_probe(100, 1, None).unwrap();
        assert!((p.min_ratio - 1.0).abs() < 1e-9);
        assert!((p.max_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn probe_bracketed_by_bounds_and_achieves_them() {
        for seed in 0..5 {
            let f = random_family(2, 2, 3, 60 + seed);
            let b = f.optimal_bounds().unwrap();
            let p = f.norm_char_probe(2000, seed, None).unwrap();
            assert!(p.min_ratio >= b.lower - 1e-9);
            assert!(p.max_ratio <= b.upper + 1e-9);
            assert!((p.min_ratio - b.lower).abs() < 1e-8 * b.upper.max(1.0));
            assert!((p.max_ratio - b.upper).abs() < 1e-8 * b.upper.max(1.0));
        }
    }

    #[test]
    fn probe_k_zero_errors() {
        let f = random_family(2, 2, 3, 70);
        assert!(f
            .norm_char_probe(10, 0, Some(&AdjointableOp::zero(2, 2)))
            .is_err());
    }
}
