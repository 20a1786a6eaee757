//! Canonical JSON instance format and seeded generators.
//!
//! A document is one JSON object with keys `k`, `n`, `families`,
//! `k_operator`, `sequences`, `scalars`, `metadata`. A complex scalar is a
//! two-element `[re, im]` array of doubles, a matrix is a row-major array
//! of rows, an operator is its nk-by-nk flattened matrix, a family is an
//! array of operators. NaN and infinities are rejected. Unknown top-level
//! keys are rejected.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adjointable::AdjointableOp;
use crate::error::{Error, Result};
use crate::frame::OperatorFamily;
use crate::linalg::CMat;
use crate::perturb::ConfinedSequence;
use crate::sampling;
use crate::tol;

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    k: usize,
    n: usize,
    families: BTreeMap<String, Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_operator: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequences: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalars: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

/// A fully validated instance: named operator families over one module,
/// with an optional K operator, confined sequences and scalar weights.
#[derive(Debug, Clone)]
pub struct Instance {
    pub k: usize,
    pub n: usize,
    pub families: BTreeMap<String, OperatorFamily>,
    pub k_operator: Option<AdjointableOp>,
    pub sequences: BTreeMap<String, ConfinedSequence>,
    pub scalars: Vec<Complex64>,
    pub metadata: BTreeMap<String, String>,
}

fn schema_err(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        msg: msg.into(),
    }
}

fn matrix_from_json(raw: &JsonMatrix, dim: usize, path: &str) -> Result<CMat> {
    if raw.len() != dim {
        return Err(schema_err(path, format!("expected {dim} rows, got {}", raw.len())));
    }
    let mut m = CMat::zeros(dim, dim);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != dim {
            return Err(schema_err(
                format!("{path}[{i}]"),
                format!("expected {dim} entries, got {}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(schema_err(
                    format!("{path}[{i}][{j}]"),
                    "non-finite number".to_string(),
                ));
            }
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl Instance {
    fn from_doc(doc: InstanceDoc) -> Result<Self> {
        if doc.k == 0 || doc.n == 0 {
            return Err(schema_err("k", "dimensions k and n must be positive"));
        }
        let dim = doc.n * doc.k;
        let mut families = BTreeMap::new();
        for (name, ops_raw) in &doc.families {
            let mut ops = Vec::with_capacity(ops_raw.len());
            for (i, raw) in ops_raw.iter().enumerate() {
                let path = format!("families.{name}[{i}]");
                let m = matrix_from_json(raw, dim, &path)?;
                ops.push(AdjointableOp::from_flat(doc.k, doc.n, m).expect("dim checked"));
            }
            if ops.is_empty() {
                return Err(schema_err(format!("families.{name}"), "family is empty"));
            }
            families.insert(
                name.clone(),
                OperatorFamily::new(ops).expect("shapes checked"),
            );
        }
        let k_operator = match &doc.k_operator {
            None => None,
            Some(raw) => Some(
                AdjointableOp::from_flat(doc.k, doc.n, matrix_from_json(raw, dim, "k_operator")?)
                    .expect("dim checked"),
            ),
        };
        let mut sequences = BTreeMap::new();
        for (name, values) in doc.sequences.unwrap_or_default() {
            for (i, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(schema_err(
                        format!("sequences.{name}[{i}]"),
                        "non-finite number",
                    ));
                }
            }
            let seq = ConfinedSequence::new(values)
                .map_err(|e| schema_err(format!("sequences.{name}"), e.to_string()))?;
            sequences.insert(name, seq);
        }
        let mut scalars = Vec::new();
        for (i, &[re, im]) in doc.scalars.unwrap_or_default().iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(schema_err(format!("scalars[{i}]"), "non-finite number"));
            }
            scalars.push(Complex64::new(re, im));
        }
        Ok(Self {
            k: doc.k,
            n: doc.n,
            families,
            k_operator,
            sequences,
            scalars,
            metadata: doc.metadata,
        })
    }

    fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            k: self.k,
            n: self.n,
            families: self
                .families
                .iter()
                .map(|(name, fam)| {
                    (
                        name.clone(),
                        fam.ops().iter().map(|op| matrix_to_json(op.flat())).collect(),
                    )
                })
                .collect(),
            k_operator: self.k_operator.as_ref().map(|k| matrix_to_json(k.flat())),
            sequences: if self.sequences.is_empty() {
                None
            } else {
                Some(
                    self.sequences
                        .iter()
                        .map(|(n, s)| (n.clone(), s.values().to_vec()))
                        .collect(),
                )
            },
            scalars: if self.scalars.is_empty() {
                None
            } else {
                Some(self.scalars.iter().map(|c| [c.re, c.im]).collect())
            },
            metadata: self.metadata.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    pub fn family(&self, name: &str) -> Result<&OperatorFamily> {
        self.families.get(name).ok_or_else(|| {
            schema_err(format!("families.{name}"), "no such family in the instance")
        })
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    Instance::from_json(&text)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(inst.to_json().as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Frame,
    Bessel,
    Parseval,
    Pair,
    KInstance,
}

impl std::str::FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frame" => Ok(GenKind::Frame),
            "bessel" => Ok(GenKind::Bessel),
            "parseval" => Ok(GenKind::Parseval),
            "pair" => Ok(GenKind::Pair),
            "k-instance" => Ok(GenKind::KInstance),
            other => Err(Error::Precondition(format!("unknown generator kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KKind {
    CoIsometry,
    General,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GenParams {
    /// Bessel target for the rescaled upper bound.
    pub target: Option<f64>,
    /// Perturbation size for `pair`.
    pub epsilon: Option<f64>,
    /// K operator flavor for `k-instance`; co-isometry when omitted.
    pub k_kind: Option<KKind>,
}

fn gaussian_family(
    k: usize,
    n: usize,
    count: usize,
    rng: &mut impl rand::Rng,
) -> OperatorFamily {
    let dim = n * k;
    let ops = (0..count)
        .map(|_| {
            AdjointableOp::from_flat(k, n, sampling::complex_gaussian(dim, dim, rng))
                .expect("shape")
        })
        .collect();
    OperatorFamily::new(ops).expect("nonempty")
}

/// Deterministic instance generator. Identical arguments give identical
/// instances, down to the serialized bytes.
pub fn random_instance(
    kind: GenKind,
    k: usize,
    n: usize,
    count: usize,
    seed: u64,
    params: GenParams,
) -> Result<Instance> {
    if k == 0 || n == 0 || count == 0 {
        return Err(Error::Precondition(
            "k, n and count must all be at least 1".into(),
        ));
    }
    let dim = n * k;
    let mut rng = sampling::rng_for_seed(seed);
    let mut metadata = BTreeMap::new();
    metadata.insert("seed".into(), seed.to_string());
    metadata.insert("count".into(), count.to_string());
    let mut families = BTreeMap::new();
    let mut k_operator = None;

    match kind {
        GenKind::Frame => {
            metadata.insert("kind".into(), "frame".into());
            let fam = gaussian_family(k, n, count, &mut rng);
            let b = fam.optimal_bounds()?;
            if b.lower <= tol::FRAME_DECISION * b.upper.max(1.0) {
                return Err(Error::Precondition(
                    "generated Gaussian family is numerically degenerate; pick another seed"
                        .into(),
                ));
            }
            families.insert("T".to_string(), fam);
        }
        GenKind::Bessel => {
            let target = params.target.ok_or_else(|| {
                Error::Precondition("bessel generator requires params.target".into())
            })?;
            if !(target > 0.0) {
                return Err(Error::Precondition(format!(
                    "bessel target must be positive, got {target}"
                )));
            }
            metadata.insert("kind".into(), "bessel".into());
            metadata.insert("target".into(), target.to_string());
            let fam = gaussian_family(k, n, count, &mut rng);
            let upper = fam.optimal_bounds()?.upper;
            let scale = (target / upper).sqrt();
            let scaled = fam.scale_members(&vec![scale; count])?;
            families.insert("T".to_string(), scaled);
        }
        GenKind::Parseval => {
            metadata.insert("kind".into(), "parseval".into());
            // first nk columns of a random unitary, cut into count row blocks
            let u = sampling::random_unitary(count * dim, &mut rng);
            let w = u.view((0, 0), (count * dim, dim)).into_owned();
            let ops = (0..count)
                .map(|i| {
                    let v = w.view((i * dim, 0), (dim, dim)).into_owned();
                    AdjointableOp::from_flat(k, n, v.adjoint()).expect("shape")
                })
                .collect();
            families.insert("T".to_string(), OperatorFamily::new(ops)?);
        }
        GenKind::Pair => {
            let epsilon = params.epsilon.ok_or_else(|| {
                Error::Precondition("pair generator requires params.epsilon".into())
            })?;
            metadata.insert("kind".into(), "pair".into());
            metadata.insert("epsilon".into(), epsilon.to_string());
            let t = gaussian_family(k, n, count, &mut rng);
            let noise = gaussian_family(k, n, count, &mut rng);
            let r = t.combine(&noise.scale_members(&vec![epsilon; count])?, 1.0)?;
            families.insert("T".to_string(), t);
            families.insert("R".to_string(), r);
        }
        GenKind::KInstance => {
            let k_kind = params.k_kind.unwrap_or(KKind::CoIsometry);
            metadata.insert("kind".into(), "k-instance".into());
            metadata.insert(
                "k_kind".into(),
                match k_kind {
                    KKind::CoIsometry => "co-isometry".into(),
                    KKind::General => "general".into(),
                },
            );
            let fam = gaussian_family(k, n, count, &mut rng);
            families.insert("T".to_string(), fam);
            let flat = match k_kind {
                KKind::CoIsometry => sampling::random_unitary(dim, &mut rng),
                KKind::General => sampling::complex_gaussian(dim, dim, &mut rng),
            };
            k_operator = Some(AdjointableOp::from_flat(k, n, flat)?);
        }
    }

    Ok(Instance {
        k,
        n,
        families,
        k_operator,
        sequences: BTreeMap::new(),
        scalars: Vec::new(),
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Classification;

    #[test]
    fn minimal_document_parses() {
        let inst = Instance::from_json(
            r#"{"k": 1, "n": 1, "families": {"T": [[[[1.0, 0.0]]]]}}"#,
        )
        .unwrap();
        assert_eq!(inst.k, 1);
        assert_eq!(inst.family("T").unwrap().len(), 1);
    }

    #[test]
    fn wrong_matrix_size_names_the_field() {
        let err = Instance::from_json(
            r#"{"k": 2, "n": 1, "families": {"T": [[[[1.0, 0.0]]]]}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("families.T[0]"), "{msg}");
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        assert!(Instance::from_json(
            r#"{"k": 1, "n": 1, "families": {}, "extra": 3}"#
        )
        .is_err());
    }

    #[test]
    fn non_finite_rejected() {
        // serde_json already refuses out-of-range literals before our own check runs
        assert!(Instance::from_json(
            r#"{"k": 1, "n": 1, "families": {"T": [[[[1e999, 0.0]]]]}}"#,
        )
        .is_err());
    }

    #[test]
    fn roundtrip_is_bit_identical() {
        let inst = random_instance(
            GenKind::Pair,
            2,
            2,
            3,
            99,
            GenParams {
                epsilon: Some(0.1),
                ..Default::default()
            },
        )
        .unwrap();
        let text = inst.to_json();
        let reloaded = Instance::from_json(&text).unwrap();
        assert_eq!(text, reloaded.to_json());
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams::default();
        let a = random_instance(GenKind::Frame, 2, 2, 3, 7, p).unwrap();
        let b = random_instance(GenKind::Frame, 2, 2, 3, 7, p).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = random_instance(GenKind::Frame, 2, 2, 3, 8, p).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn parseval_generator_is_parseval() {
        for seed in 0..10 {
            let inst =
                random_instance(GenKind::Parseval, 2, 2, 3, seed, GenParams::default()).unwrap();
            let b = inst.family("T").unwrap().optimal_bounds().unwrap();
            assert!((b.lower - 1.0).abs() < 1e-9 && (b.upper - 1.0).abs() < 1e-9);
            assert_eq!(b.classification, Classification::Parseval);
        }
    }

    #[test]
    fn bessel_generator_hits_target() {
        let inst = random_instance(
            GenKind::Bessel,
            2,
            2,
            3,
            5,
            GenParams {
                target: Some(0.5),
                ..Default::default()
            },
        )
        .unwrap();
        let b = inst.family("T").unwrap().optimal_bounds().unwrap();
        assert!((b.upper - 0.5).abs() < 1e-10);
    }

    #[test]
    fn co_isometry_generator_residual() {
        let inst =
            random_instance(GenKind::KInstance, 2, 2, 3, 6, GenParams::default()).unwrap();
        assert!(inst.k_operator.unwrap().is_co_isometry(1e-10));
    }
}
