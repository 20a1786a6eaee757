//! Operator-valued frames on finite Hilbert C*-modules over matrix algebras.
//!
//! The module `M_k(C)^n` is represented through a faithful flattening:
//! a vector becomes a `k x nk` matrix, an adjointable operator an
//! `nk x nk` matrix acting on the right, and every operator-valued
//! inequality in the theory reduces to an ordinary positive-semidefinite
//! comparison of flattened matrices. On top of that sit optimal frame and
//! K-frame bound computation, Douglas-style factorization checks, and
//! certificate producers for a collection of perturbation and stability
//! theorems, each cross-checked against independent brute-force oracles.

pub use nalgebra;
pub use num_complex;

pub mod error;
pub mod tol;
pub mod linalg;
pub mod sampling;
pub mod algebra;
pub mod module;
pub mod adjointable;
pub mod frame;
pub mod perturb;
pub mod instance;
pub mod oracle;

pub use adjointable::{douglas_check, AdjointableOp, BlockOperator, DouglasReport};
pub use algebra::AlgebraElement;
pub use error::{Error, Result};
pub use frame::{
    vector_frame_bounds, weighted_family_sum, Classification, FrameBounds, KFrameBounds,
    OperatorFamily, ProbeResult,
};
pub use instance::{load_instance, random_instance, save_instance, GenKind, GenParams, Instance, KKind};
pub use module::{ModuleVector, VectorSequence};
pub use perturb::{
    certify_alpha_beta, certify_bessel_perturbation, certify_confined_perturbation,
    certify_l_operator_sum, certify_min_constant, certify_scalar_sum, derive_min_constant,
    derive_sum_lambda, ActualBounds, Certificate, ConfinedSequence, HypothesisMode, Sign,
};
