//! One certifier per stability theorem: verify the hypothesis (exactly via
//! the rank-one PSD reduction where the inequality is a single positive
//! form, by sampling where square roots mix), emit the theorem's certified
//! bound interval, and validate it against the perturbed family's actual
//! optimal bounds.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::adjointable::{AdjointableOp, BlockOperator};
use crate::error::{Error, Result};
use crate::frame::{weighted_family_sum, FrameBounds, KFrameBounds, OperatorFamily};
use crate::linalg::{self, CMat};
use crate::module::ModuleVector;
use crate::sampling;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisMode {
    ExactPsd,
    Sampled,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ActualBounds {
    Frame(FrameBounds),
    KFrame(KFrameBounds),
}

impl ActualBounds {
    pub fn lower(&self) -> f64 {
        match self {
            ActualBounds::Frame(b) => b.lower,
            ActualBounds::KFrame(b) => b.lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            ActualBounds::Frame(b) => b.upper,
            ActualBounds::KFrame(b) => b.upper,
        }
    }
}

/// Output of a theorem certifier.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub theorem: String,
    pub hypothesis_mode: HypothesisMode,
    pub hypothesis_ok: bool,
    pub certified_lower: f64,
    pub certified_upper: f64,
    pub actual: ActualBounds,
    pub valid: bool,
    pub details: BTreeMap<String, f64>,
}

fn make_certificate(
    theorem: &str,
    mode: HypothesisMode,
    hypothesis_ok: bool,
    certified_lower: f64,
    certified_upper: f64,
    actual: ActualBounds,
    details: BTreeMap<String, f64>,
) -> Certificate {
    let valid = hypothesis_ok
        && certified_lower <= actual.lower() + tol::CERT_SLACK
        && actual.upper() <= certified_upper + tol::CERT_SLACK;
    Certificate {
        theorem: theorem.to_string(),
        hypothesis_mode: mode,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        valid,
        details,
    }
}

/// `lhs <= rhs` in the PSD order, with the margin (minimum eigenvalue of
/// the gap, scale-relative verdict).
fn psd_leq(lhs: &CMat, rhs: &CMat) -> (bool, f64) {
    let gap = linalg::hermitize(&(rhs - lhs));
    let scale = (linalg::sigma_max(lhs) + linalg::sigma_max(rhs)).max(1.0);
    let margin = linalg::min_eig(&gap);
    (margin >= -tol::PSD_REL * scale, margin)
}

/// A positively confined real sequence: `0 < inf <= sup < infinity`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfinedSequence {
    values: Vec<f64>,
    inf: f64,
    sup: f64,
}

impl ConfinedSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("confined sequence is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Precondition(format!(
                    "confined sequence entry {i} = {v} is not strictly positive and finite"
                )));
            }
        }
        let inf = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let sup = values.iter().cloned().fold(0.0, f64::max);
        Ok(Self { values, inf, sup })
    }

    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn frame_bounds_of(f: &OperatorFamily) -> Result<FrameBounds> {
    f.optimal_bounds()
}

fn require_frame(f: &OperatorFamily, name: &str) -> Result<FrameBounds> {
    let b = frame_bounds_of(f)?;
    if b.lower <= tol::FRAME_DECISION * b.upper.max(1.0) {
        return Err(Error::Precondition(format!(
            "{name} is not an operator frame (optimal lower bound {:.3e})",
            b.lower
        )));
    }
    Ok(b)
}

fn require_k_frame(f: &OperatorFamily, k: &AdjointableOp, name: &str) -> Result<KFrameBounds> {
    let b = f.k_optimal_bounds(k)?;
    if !b.k_frame {
        return Err(Error::Precondition(format!(
            "{name} is not a K-operator frame (pencil lower bound {:.3e})",
            b.lower
        )));
    }
    Ok(b)
}

/// T/R bounds pair (A, B) in plain or K mode.
fn mode_bounds(f: &OperatorFamily, k: Option<&AdjointableOp>, name: &str) -> Result<(f64, f64)> {
    match k {
        None => {
            let b = require_frame(f, name)?;
            Ok((b.lower, b.upper))
        }
        Some(k) => {
            let b = require_k_frame(f, k, name)?;
            Ok((b.lower, b.upper))
        }
    }
}

fn actual_of(f: &OperatorFamily, k: Option<&AdjointableOp>) -> Result<ActualBounds> {
    match k {
        None => Ok(ActualBounds::Frame(f.optimal_bounds()?)),
        Some(k) => Ok(ActualBounds::KFrame(f.k_optimal_bounds(k)?)),
    }
}

fn check_same_size(t: &OperatorFamily, r: &OperatorFamily) -> Result<()> {
    if t.len() != r.len() || t.k() != r.k() || t.n() != r.n() {
        return Err(Error::ShapeMismatch(format!(
            "families differ: size {} (k={}, n={}) vs size {} (k={}, n={})",
            t.len(),
            t.k(),
            t.n(),
            r.len(),
            r.k(),
            r.n()
        )));
    }
    Ok(())
}

/// Bessel perturbation: if `R` is Bessel with bound `M < A`, then
/// `{T_i +/- R_i}` is a frame with bounds `(sqrt A - sqrt M)^2` and
/// `(sqrt B + sqrt M)^2`.
pub fn certify_bessel_perturbation(
    t: &OperatorFamily,
    r: &OperatorFamily,
    sign: Sign,
) -> Result<Certificate> {
    check_same_size(t, r)?;
    let tb = require_frame(t, "T")?;
    let (a, b) = (tb.lower, tb.upper);
    let m = frame_bounds_of(r)?.upper;
    // the Bessel bound is an eigenvalue, so the hypothesis check is exact
    let hypothesis_ok = m < a;
    let certified_lower = (a.sqrt() - m.sqrt()).powi(2);
    let certified_upper = (b.sqrt() + m.sqrt()).powi(2);
    let perturbed = t.combine(r, sign.factor())?;
    let actual = ActualBounds::Frame(perturbed.optimal_bounds()?);
    let mut details = BTreeMap::new();
    details.insert("A".into(), a);
    details.insert("B".into(), b);
    details.insert("M".into(), m);
    Ok(make_certificate(
        "bessel-perturb",
        HypothesisMode::ExactPsd,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

/// Min-constant equivalence: `||S_{T-R}|| <= M min(...)` at every x,
/// checked as the pair of PSD inequalities `S_{T-R} <= M S_T` and
/// `S_{T-R} <= M S_R`; concludes `R` is a frame with bounds
/// `A/(sqrt M + 1)^2` and `B (sqrt M + 1)^2`. In K-mode the lower bound is
/// certified against `||K^* x||^2`.
pub fn certify_min_constant(
    t: &OperatorFamily,
    r: &OperatorFamily,
    m_const: f64,
    k: Option<&AdjointableOp>,
) -> Result<Certificate> {
    check_same_size(t, r)?;
    if !(m_const > 0.0) {
        return Err(Error::Precondition(format!("M must be positive, got {m_const}")));
    }
    let (a, b) = mode_bounds(t, k, "T")?;
    let diff = t.combine(r, -1.0)?;
    let s_diff = diff.frame_operator();
    let s_t = t.frame_operator();
    let s_r = r.frame_operator();
    let m_st = linalg::scale_re(s_t.flat(), m_const);
    let m_sr = linalg::scale_re(s_r.flat(), m_const);
    let (ok_t, margin_t) = psd_leq(s_diff.flat(), &m_st);
    let (ok_r, margin_r) = psd_leq(s_diff.flat(), &m_sr);
    let hypothesis_ok = ok_t && ok_r;
    let denom = (m_const.sqrt() + 1.0).powi(2);
    let certified_lower = a / denom;
    let certified_upper = b * denom;
    let actual = actual_of(r, k)?;
    let mut details = BTreeMap::new();
    details.insert("A".into(), a);
    details.insert("B".into(), b);
    details.insert("M".into(), m_const);
    details.insert("psd_margin_vs_T".into(), margin_t);
    details.insert("psd_margin_vs_R".into(), margin_r);
    Ok(make_certificate(
        "min-constant",
        HypothesisMode::ExactPsd,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

/// Converse direction of the min-constant theorem: when both families are
/// frames, `M = max((1 + sqrt(D/A))^2, (1 + sqrt(B/C))^2)` satisfies the
/// hypothesis. K-mode follows the co-isometry converse.
pub fn derive_min_constant(
    t: &OperatorFamily,
    r: &OperatorFamily,
    k: Option<&AdjointableOp>,
) -> Result<f64> {
    check_same_size(t, r)?;
    if let Some(k) = k {
        if !k.is_co_isometry(tol::RESIDUAL_REL) {
            return Err(Error::Precondition(
                "derived min-constant in K-mode requires a co-isometry".into(),
            ));
        }
    }
    let (a, b) = mode_bounds(t, k, "T")?;
    let rb = require_frame(r, "R")?;
    let (c, d) = (rb.lower, rb.upper);
    // the triangle inequality bounds the square roots, so the constant on
    // the squared norms is the square; both comparisons of the hypothesis
    // must hold, hence the max
    Ok((1.0 + (d / a).sqrt())
        .powi(2)
        .max((1.0 + (b / c).sqrt()).powi(2)))
}

/// Scalar finite sum: if `lambda ||{T_{p,i} x}|| <= ||{sum_n alpha_n
/// T_{n,i} x}||`, the weighted sum family is a frame with bounds
/// `A_p lambda^2` and `(max |alpha_n|)^2 (sum_n sqrt B_n)^2`.
pub fn certify_scalar_sum(
    families: &[OperatorFamily],
    alphas: &[num_complex::Complex64],
    p: usize,
    lambda: f64,
    k: Option<&AdjointableOp>,
) -> Result<Certificate> {
    if families.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if p >= families.len() {
        return Err(Error::Precondition(format!(
            "index p = {p} out of range for {} families",
            families.len()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let (a_p, _) = mode_bounds(&families[p], k, "family p")?;
    let mut sqrt_b_sum = 0.0;
    for fam in families {
        sqrt_b_sum += fam.optimal_bounds()?.upper.sqrt();
    }
    let max_alpha = alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let summed = weighted_family_sum(families, alphas)?;
    let s_w = summed.frame_operator();
    let s_p = families[p].frame_operator();
    let (hypothesis_ok, margin) =
        psd_leq(&linalg::scale_re(s_p.flat(), lambda * lambda), s_w.flat());
    let certified_lower = a_p * lambda * lambda;
    let certified_upper = max_alpha * max_alpha * sqrt_b_sum * sqrt_b_sum;
    let actual = actual_of(&summed, k)?;
    let mut details = BTreeMap::new();
    details.insert("A_p".into(), a_p);
    details.insert("lambda".into(), lambda);
    details.insert("max_alpha".into(), max_alpha);
    details.insert("sqrt_B_sum".into(), sqrt_b_sum);
    details.insert("psd_margin".into(), margin);
    Ok(make_certificate(
        "scalar-sum",
        HypothesisMode::ExactPsd,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

/// Converse constant of the scalar-sum theorem: `A_W / B_p`, stated by the
/// converse for squared norms. Callers feeding it back into
/// [`certify_scalar_sum`] should take its square root first.
pub fn derive_sum_lambda(
    families: &[OperatorFamily],
    alphas: &[num_complex::Complex64],
    p: usize,
    k: Option<&AdjointableOp>,
) -> Result<f64> {
    if families.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if p >= families.len() {
        return Err(Error::Precondition(format!(
            "index p = {p} out of range for {} families",
            families.len()
        )));
    }
    if let Some(k) = k {
        if !k.is_co_isometry(tol::RESIDUAL_REL) {
            return Err(Error::Precondition(
                "derived sum constant in K-mode requires a co-isometry".into(),
            ));
        }
    }
    let summed = weighted_family_sum(families, alphas)?;
    let (a_w, _) = mode_bounds(&summed, k, "summed family")?;
    let b_p = require_frame(&families[p], "family p")?.upper;
    Ok(a_w / b_p)
}

/// L-operator finite sum: per-family closeness `S_{T_n - R_n} <= lambda
/// S_{T_n}` plus an intertwiner `L` mapping the summed-R analysis sequences
/// onto the `T_p` analysis sequences certifies the summed R family with
/// bounds `A_p / ||L||^2` and `(1 + sqrt lambda)^2 (sum_n sqrt B_n)^2`.
///
/// When `l` is omitted the minimal-norm intertwiner is constructed from the
/// stacked analysis matrices; a range violation means no such `L` exists.
pub fn certify_l_operator_sum(
    families_t: &[OperatorFamily],
    families_r: &[OperatorFamily],
    p: usize,
    lambda: f64,
    l: Option<&BlockOperator>,
    k: Option<&AdjointableOp>,
) -> Result<Certificate> {
    if families_t.is_empty() || families_t.len() != families_r.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} T families vs {} R families",
            families_t.len(),
            families_r.len()
        )));
    }
    if p >= families_t.len() {
        return Err(Error::Precondition(format!(
            "index p = {p} out of range for {} families",
            families_t.len()
        )));
    }
    if lambda < 0.0 {
        return Err(Error::Precondition(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let (kdim, n) = (families_t[0].k(), families_t[0].n());
    let count = families_t[0].len();
    let (a_p, _) = mode_bounds(&families_t[p], k, "family p")?;
    let mut sqrt_b_sum = 0.0;
    let mut hypothesis_ok = true;
    let mut worst_margin = f64::INFINITY;
    for (tn, rn) in families_t.iter().zip(families_r) {
        check_same_size(tn, rn)?;
        if tn.len() != count {
            return Err(Error::ShapeMismatch("family sizes differ across n".into()));
        }
        sqrt_b_sum += tn.optimal_bounds()?.upper.sqrt();
        let diff = tn.combine(rn, -1.0)?;
        let (ok, margin) = psd_leq(
            diff.frame_operator().flat(),
            &linalg::scale_re(tn.frame_operator().flat(), lambda),
        );
        hypothesis_ok &= ok;
        worst_margin = worst_margin.min(margin);
    }

    let ones = vec![num_complex::Complex64::new(1.0, 0.0); families_r.len()];
    let summed_r = weighted_family_sum(families_r, &ones)?;

    // stacked analysis matrices: x -> {W_i x} flattens to X * [M_1 | ... | M_J]
    let nk = n * kdim;
    let mut g_r = CMat::zeros(nk, count * nk);
    let mut g_p = CMat::zeros(nk, count * nk);
    for i in 0..count {
        g_r.view_mut((0, i * nk), (nk, nk)).copy_from(summed_r.ops()[i].flat());
        g_p.view_mut((0, i * nk), (nk, nk)).copy_from(families_t[p].ops()[i].flat());
    }
    let g_p_scale = linalg::sigma_max(&g_p).max(1.0);
    let (l_flat, l_norm, residual) = match l {
        Some(l) => {
            if l.blocks() != count {
                return Err(Error::ShapeMismatch(format!(
                    "L has {} blocks, expected {count}",
                    l.blocks()
                )));
            }
            let resid = linalg::sigma_max(&(&g_r * l.flat() - &g_p));
            if resid > tol::RESIDUAL_REL * g_p_scale {
                return Err(Error::Precondition(format!(
                    "supplied L violates the intertwining identity (residual {resid:.3e})"
                )));
            }
            (l.flat().clone(), l.norm(), resid)
        }
        None => {
            let ml = linalg::pinv(&g_r, tol::RANK_REL) * &g_p;
            let resid = linalg::sigma_max(&(&g_r * &ml - &g_p));
            if resid > tol::RESIDUAL_REL * g_p_scale {
                return Err(Error::RangeViolation(resid));
            }
            let norm = linalg::sigma_max(&ml);
            (ml, norm, resid)
        }
    };
    let _ = l_flat;
    if l_norm <= 0.0 {
        return Err(Error::Precondition("intertwiner L is zero".into()));
    }

    let certified_lower = a_p / (l_norm * l_norm);
    let certified_upper = (1.0 + lambda.sqrt()).powi(2) * sqrt_b_sum * sqrt_b_sum;
    let actual = actual_of(&summed_r, k)?;
    let mut details = BTreeMap::new();
    details.insert("A_p".into(), a_p);
    details.insert("lambda".into(), lambda);
    details.insert("L_norm".into(), l_norm);
    details.insert("intertwine_residual".into(), residual);
    details.insert("worst_psd_margin".into(), worst_margin);
    details.insert("sqrt_B_sum".into(), sqrt_b_sum);
    Ok(make_certificate(
        "l-sum",
        HypothesisMode::ExactPsd,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

/// Confined-sequence perturbation (sampled hypothesis): the two-term
/// square-root inequality admits no PSD reduction, so it is checked at
/// seeded unit vectors plus eigenvector-derived witnesses. Certifies the
/// proof-supported form: the lower bound holds against `||K^* x||^2`.
#[allow(clippy::too_many_arguments)]
pub fn certify_confined_perturbation(
    t: &OperatorFamily,
    r: &OperatorFamily,
    alpha: &ConfinedSequence,
    beta: &ConfinedSequence,
    lambda: f64,
    mu: f64,
    k: &AdjointableOp,
    samples: usize,
    seed: u64,
) -> Result<Certificate> {
    check_same_size(t, r)?;
    if !(0.0..1.0).contains(&lambda) || !(0.0..1.0).contains(&mu) {
        return Err(Error::Precondition(format!(
            "lambda and mu must lie in [0, 1), got ({lambda}, {mu})"
        )));
    }
    if alpha.len() != t.len() || beta.len() != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "confined sequence lengths {} / {} vs family size {}",
            alpha.len(),
            beta.len(),
            t.len()
        )));
    }
    let kb = require_k_frame(t, k, "T")?;
    let (a, b) = (kb.lower, kb.upper);

    let scaled_t = t.scale_members(alpha.values())?;
    let scaled_r = r.scale_members(beta.values())?;
    let diff = scaled_t.combine(&scaled_r, -1.0)?;
    let s_diff = diff.frame_operator();
    let s_t = scaled_t.frame_operator();
    let s_r = scaled_r.frame_operator();

    let mut candidates: Vec<ModuleVector> = Vec::new();
    let mut rng = sampling::rng_for_seed(seed);
    for _ in 0..samples.max(1) {
        candidates.push(ModuleVector::random_unit(t.k(), t.n(), &mut rng));
    }
    for s in [&s_diff, &s_t, &s_r] {
        let (_, vecs) = linalg::herm_eig(s.flat());
        let dim = vecs.nrows();
        candidates.push(ModuleVector::rank_one(t.k(), t.n(), &vecs.column(0).into_owned())?);
        candidates.push(ModuleVector::rank_one(
            t.k(),
            t.n(),
            &vecs.column(dim - 1).into_owned(),
        )?);
    }

    let mut hypothesis_ok = true;
    let mut worst_slack = f64::NEG_INFINITY;
    for x in &candidates {
        let form = |s: &AdjointableOp| -> Result<f64> {
            Ok(s.apply(x)?.inner_product(x)?.norm().max(0.0).sqrt())
        };
        let lhs = form(&s_diff)?;
        let rhs = lambda * form(&s_t)? + mu * form(&s_r)?;
        let slack = lhs - rhs;
        worst_slack = worst_slack.max(slack);
        if slack > tol::SAMPLED_SLACK {
            hypothesis_ok = false;
        }
    }

    let certified_lower = a * ((1.0 - lambda) * alpha.inf() / ((1.0 + mu) * beta.sup())).powi(2);
    let certified_upper = b * ((1.0 + lambda) * alpha.sup() / ((1.0 - mu) * beta.inf())).powi(2);
    let actual = ActualBounds::KFrame(r.k_optimal_bounds(k)?);
    let mut details = BTreeMap::new();
    details.insert("A".into(), a);
    details.insert("B".into(), b);
    details.insert("lambda".into(), lambda);
    details.insert("mu".into(), mu);
    details.insert("alpha_inf".into(), alpha.inf());
    details.insert("alpha_sup".into(), alpha.sup());
    details.insert("beta_inf".into(), beta.inf());
    details.insert("beta_sup".into(), beta.sup());
    details.insert("worst_sample_slack".into(), worst_slack);
    Ok(make_certificate(
        "confined",
        HypothesisMode::Sampled,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

/// alpha-beta perturbation: `S_{T-R} <= alpha S_T + beta KK^*` with
/// `alpha + beta/A < 1` certifies `R` as a K-frame with bounds
/// `A (1 - sqrt(alpha + beta/A))^2` and `B (1 + sqrt(alpha + beta/A))^2`.
/// The corollary is the `alpha = 0` call with its constant passed as beta.
pub fn certify_alpha_beta(
    t: &OperatorFamily,
    r: &OperatorFamily,
    alpha: f64,
    beta: f64,
    k: &AdjointableOp,
) -> Result<Certificate> {
    check_same_size(t, r)?;
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::Precondition(format!(
            "alpha and beta must be nonnegative, got ({alpha}, {beta})"
        )));
    }
    let kb = require_k_frame(t, k, "T")?;
    let (a, b) = (kb.lower, kb.upper);
    let ratio = alpha + beta / a;
    if ratio >= 1.0 {
        return Err(Error::Precondition(format!(
            "alpha + beta/A = {ratio} must be below 1"
        )));
    }
    let diff = t.combine(r, -1.0)?;
    let s_diff = diff.frame_operator();
    let rhs = linalg::scale_re(t.frame_operator().flat(), alpha)
        + linalg::scale_re(&k.kkstar_flat(), beta);
    let (hypothesis_ok, margin) = psd_leq(s_diff.flat(), &rhs);
    let root = ratio.sqrt();
    let certified_lower = a * (1.0 - root).powi(2);
    let certified_upper = b * (1.0 + root).powi(2);
    let actual = ActualBounds::KFrame(r.k_optimal_bounds(k)?);
    let mut details = BTreeMap::new();
    details.insert("A".into(), a);
    details.insert("B".into(), b);
    details.insert("alpha".into(), alpha);
    details.insert("beta".into(), beta);
    details.insert("ratio".into(), ratio);
    details.insert("psd_margin".into(), margin);
    Ok(make_certificate(
        "alpha-beta",
        HypothesisMode::ExactPsd,
        hypothesis_ok,
        certified_lower,
        certified_upper,
        actual,
        details,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn scalar_family(values: &[f64]) -> OperatorFamily {
        let ops = values
            .iter()
            .map(|&v| {
                AdjointableOp::from_flat(1, 1, CMat::from_element(1, 1, Complex64::new(v, 0.0)))
                    .unwrap()
            })
            .collect();
        OperatorFamily::new(ops).unwrap()
    }

    fn scalar_k(v: f64) -> AdjointableOp {
        AdjointableOp::from_flat(1, 1, CMat::from_element(1, 1, Complex64::new(v, 0.0))).unwrap()
    }

    #[test]
    fn bessel_perturb_scalar_case() {
        // T = {[1]}, R = {[0.5]}: A = B = 1, M = 0.25
        let t = scalar_family(&[1.0]);
        let r = scalar_family(&[0.5]);
        let c = certify_bessel_perturbation(&t, &r, Sign::Plus).unwrap();
        assert!(c.hypothesis_ok);
        assert!((c.certified_lower - 0.25).abs() < 1e-12);
        assert!((c.certified_upper - 2.25).abs() < 1e-12);
        assert!((c.actual.lower() - 2.25).abs() < 1e-12);
        assert!(c.valid);
    }

    #[test]
    fn bessel_perturb_zero_r_is_sharp() {
        let t = scalar_family(&[1.0, 2.0]);
        let r = scalar_family(&[0.0, 0.0]);
        let c = certify_bessel_perturbation(&t, &r, Sign::Minus).unwrap();
        assert!(c.hypothesis_ok && c.valid);
        assert!((c.certified_lower - c.actual.lower()).abs() < 1e-12);
        assert!((c.certified_upper - c.actual.upper()).abs() < 1e-12);
    }

    #[test]
    fn min_constant_scalar_case() {
        // T = {[1]}, R = {[2]}: S_{T-R} = 1, S_T = 1, S_R = 4; minimal M = 1
        let t = scalar_family(&[1.0]);
        let r = scalar_family(&[2.0]);
        let c = certify_min_constant(&t, &r, 1.0, None).unwrap();
        assert!(c.hypothesis_ok);
        assert!((c.certified_lower - 0.25).abs() < 1e-12);
        assert!((c.certified_upper - 4.0).abs() < 1e-12);
        assert!((c.actual.lower() - 4.0).abs() < 1e-12);
        assert!(c.valid);
        // below the minimal constant the hypothesis must fail
        let c = certify_min_constant(&t, &r, 0.5, None).unwrap();
        assert!(!c.hypothesis_ok);
    }

    #[test]
    fn min_constant_equal_families() {
        let t = scalar_family(&[1.0, 0.5]);
        let c = certify_min_constant(&t, &t, 1e-6, None).unwrap();
        assert!(c.hypothesis_ok && c.valid);
    }

    #[test]
    fn derived_min_constant_passes_certifier() {
        let t = scalar_family(&[1.0, 2.0]);
        let r = scalar_family(&[1.5, 1.0]);
        let m = derive_min_constant(&t, &r, None).unwrap();
        let c = certify_min_constant(&t, &r, m, None).unwrap();
        assert!(c.hypothesis_ok, "derived M = {m} must satisfy the hypothesis");
        assert!(c.valid);
    }

    #[test]
    fn scalar_sum_single_family_identity() {
        let t = scalar_family(&[1.0, 2.0]);
        let one = [Complex64::new(1.0, 0.0)];
        let c = certify_scalar_sum(std::slice::from_ref(&t), &one, 0, 1.0, None).unwrap();
        assert!(c.hypothesis_ok && c.valid);
        let b = t.optimal_bounds().unwrap();
        assert!((c.certified_lower - b.lower).abs() < 1e-12);
    }

    #[test]
    fn scalar_sum_two_identical_families() {
        let t = scalar_family(&[1.0, 2.0]);
        let alphas = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let fams = vec![t.clone(), t.clone()];
        // S_W = 4 S_T, so the maximal feasible lambda is 2
        let c = certify_scalar_sum(&fams, &alphas, 0, 2.0, None).unwrap();
        assert!(c.hypothesis_ok);
        let b = t.optimal_bounds().unwrap();
        assert!((c.certified_lower - 4.0 * b.lower).abs() < 1e-12);
        assert!((c.actual.lower() - 4.0 * b.lower).abs() < 1e-12);
        assert!(c.valid);
        let c = certify_scalar_sum(&fams, &alphas, 0, 2.1, None).unwrap();
        assert!(!c.hypothesis_ok);
    }

    #[test]
    fn l_sum_r_equals_t() {
        let t = scalar_family(&[1.0, 2.0]);
        let fams = vec![t.clone()];
        let c = certify_l_operator_sum(&fams, &fams, 0, 0.0, None, None).unwrap();
        assert!(c.hypothesis_ok && c.valid);
        let b = t.optimal_bounds().unwrap();
        assert!((c.certified_lower - b.lower).abs() < 1e-10);
        assert!((c.certified_upper - b.upper).abs() < 1e-10);
    }

    #[test]
    fn l_sum_zero_r_is_range_violation() {
        let t = scalar_family(&[1.0, 2.0]);
        let r = scalar_family(&[0.0, 0.0]);
        match certify_l_operator_sum(&[t], &[r], 0, 0.0, None, None) {
            Err(Error::RangeViolation(_)) => {}
            other => panic!("expected range violation, got {other:?}"),
        }
    }

    #[test]
    fn confined_equal_families_pass() {
        let t = scalar_family(&[1.0, 0.7]);
        let k = scalar_k(1.0);
        let ones = ConfinedSequence::constant(1.0, 2).unwrap();
        let c =
            certify_confined_perturbation(&t, &t, &ones, &ones, 0.0, 0.0, &k, 50, 3).unwrap();
        assert!(c.hypothesis_ok && c.valid);
    }

    #[test]
    fn confined_mismatched_scaling_fails_hypothesis() {
        let t = scalar_family(&[1.0, 0.7]);
        let k = scalar_k(1.0);
        let ones = ConfinedSequence::constant(1.0, 2).unwrap();
        let twos = ConfinedSequence::constant(2.0, 2).unwrap();
        let c = certify_confined_perturbation(&t, &t, &ones, &twos, 0.0, 0.0, &k, 50, 3).unwrap();
        assert!(!c.hypothesis_ok);
    }

    #[test]
    fn alpha_beta_scalar_case() {
        // T = {[1]}, R = {[0.5]}, K = [1]: S_{T-R} = 0.25; alpha = 0, beta = 0.25
        let t = scalar_family(&[1.0]);
        let r = scalar_family(&[0.5]);
        let k = scalar_k(1.0);
        let c = certify_alpha_beta(&t, &r, 0.0, 0.25, &k).unwrap();
        assert!(c.hypothesis_ok);
        assert!((c.certified_lower - 0.25).abs() < 1e-12);
        assert!((c.certified_upper - 2.25).abs() < 1e-12);
        assert!((c.actual.lower() - 0.25).abs() < 1e-12);
        assert!(c.valid);
    }

    #[test]
    fn alpha_beta_precondition_gate() {
        let t = scalar_family(&[1.0]);
        let r = scalar_family(&[0.5]);
        let k = scalar_k(1.0);
        match certify_alpha_beta(&t, &r, 0.9, 0.5, &k) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("1.4")),
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn confined_rejects_bad_constants() {
        let t = scalar_family(&[1.0]);
        let k = scalar_k(1.0);
        let ones = ConfinedSequence::constant(1.0, 1).unwrap();
        assert!(
            certify_confined_perturbation(&t, &t, &ones, &ones, 1.0, 0.0, &k, 10, 0).is_err()
        );
        assert!(ConfinedSequence::new(vec![1.0, 0.0]).is_err());
    }
}
