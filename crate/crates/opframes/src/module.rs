//! The free Hilbert module `H = A^n` and finite sequences in `l2(H)`.
//!
//! A module vector is stored through its flattening: the k-by-nk horizontal
//! concatenation `X = [x_1 ... x_n]` of its blocks. Under this convention
//! the A-valued inner product is `<x, y> = X * Y^H`.

use rand::Rng;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::sampling;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    k: usize,
    n: usize,
    flat: CMat, // k x nk
}

impl ModuleVector {
    pub fn from_blocks(blocks: &[AlgebraElement]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::ShapeMismatch("vector needs at least one block".into()));
        }
        let k = blocks[0].dim();
        for (i, b) in blocks.iter().enumerate() {
            if b.dim() != k {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} has dimension {}, expected {k}",
                    b.dim()
                )));
            }
        }
        let n = blocks.len();
        let mut flat = CMat::zeros(k, n * k);
        for (i, b) in blocks.iter().enumerate() {
            flat.view_mut((0, i * k), (k, k)).copy_from(b.matrix());
        }
        Ok(Self { k, n, flat })
    }

    pub fn from_flat(k: usize, n: usize, flat: CMat) -> Result<Self> {
        if flat.nrows() != k || flat.ncols() != n * k || k == 0 || n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "expected {k}x{} concatenation, got {}x{}",
                n * k,
                flat.nrows(),
                flat.ncols()
            )));
        }
        Ok(Self { k, n, flat })
    }

    pub fn zero(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            flat: CMat::zeros(k, n * k),
        }
    }

    /// Rank-one vector from `w` in C^{nk}: a single nonzero row carrying
    /// conj(w), so that `||<Sx, x>|| = w^H flatten(S) w` and `||x|| = |w|`.
    pub fn rank_one(k: usize, n: usize, w: &nalgebra::DVector<num_complex::Complex64>) -> Result<Self> {
        if w.len() != n * k {
            return Err(Error::ShapeMismatch(format!(
                "witness has length {}, expected {}",
                w.len(),
                n * k
            )));
        }
        let mut flat = CMat::zeros(k, n * k);
        for j in 0..n * k {
            flat[(0, j)] = w[j].conj();
        }
        Ok(Self { k, n, flat })
    }

    /// Gaussian vector normalized to scalar norm 1.
    pub fn random_unit(k: usize, n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let g = sampling::complex_gaussian(k, n * k, rng);
            let norm = linalg::sigma_max(&g);
            if norm > 1e-6 {
                return Self {
                    k,
                    n,
                    flat: linalg::scale_re(&g, 1.0 / norm),
                };
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flat(&self) -> &CMat {
        &self.flat
    }

    pub fn block(&self, i: usize) -> AlgebraElement {
        let b = self.flat.view((0, i * self.k), (self.k, self.k)).into_owned();
        AlgebraElement::new(b).expect("block is square by construction")
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k == other.k && self.n == other.n
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

    pub fn left_mul(&self, a: &AlgebraElement) -> Result<Self> {
        if a.dim() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "algebra element is {}x{}, module has k = {}",
                a.dim(),
                a.dim(),
                self.k
            )));
        }
        Ok(Self {
            k: self.k,
            n: self.n,
            flat: a.matrix() * &self.flat,
        })
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

    /// A-valued inner product `<x, y> = sum_i x_i y_i^* = X Y^H`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.check_shape(other)?;
        AlgebraElement::new(&self.flat * other.flat.adjoint())
    }

    /// Scalar norm `||x|| = ||<x, x>||^{1/2}`, i.e. the largest singular
    /// value of the concatenation.
    pub fn scalar_norm(&self) -> f64 {
        linalg::sigma_max(&self.flat)
    }
}

/// A finite element of `l2(H)`: an ordered list of module vectors of one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    items: Vec<ModuleVector>,
}

impl VectorSequence {
    pub fn new(items: Vec<ModuleVector>) -> Result<Self> {
        if let Some(first) = items.first() {
            for (i, x) in items.iter().enumerate() {
                if !first.same_shape(x) {
                    return Err(Error::ShapeMismatch(format!(
                        "sequence item {i} has (k, n) = ({}, {})",
                        x.k, x.n
                    )));
                }
            }
        }
        Ok(Self { items })
    }

    pub fn empty() -> Self {
        Self { items: Vec::new() }
    }

    pub fn items(&self) -> &[ModuleVector] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sum of the Gram elements `sum_i <x_i, x_i>`.
    pub fn gram_sum(&self) -> Option<AlgebraElement> {
        let first = self.items.first()?;
        let k = first.k;
        let mut acc = CMat::zeros(k, k);
        for x in &self.items {
            acc += &x.flat * x.flat.adjoint();
        }
        Some(AlgebraElement::new(acc).expect("square by construction"))
    }

    /// `||{x_i}|| = ||sum_i <x_i, x_i>||^{1/2}`; zero for the empty sequence.
    pub fn norm(&self) -> f64 {
        match self.gram_sum() {
            Some(g) => g.norm().sqrt(),
            None => 0.0,
        }
    }

    /// Elementwise sum, used by the perturbation arguments.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "sequence lengths {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let items = self
            .items
            .iter()
            .zip(&other.items)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    /// `l2(H)` inner product `sum_i <a_i, b_i>`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        if self.len() != other.len() || self.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "sequence lengths {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let k = self.items[0].k;
        let mut acc = CMat::zeros(k, k);
        for (a, b) in self.items.iter().zip(&other.items) {
            acc += a.inner_product(b)?.matrix();
        }
        AlgebraElement::new(acc)
    }
}
