//! Seeded complex Gaussian sampling shared by generators and probes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMat;

/// Deterministic generator for a given seed.
pub fn rng_for_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derived stream for parallel or per-index work under one seed.
pub fn rng_for_seed_stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// i.i.d. standard complex Gaussian entries.
pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Haar-ish random unitary: QR of a complex Gaussian with the diagonal of R
/// phase-corrected.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = complex_gaussian(dim, dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j).map(|v| v * phase);
        q.set_column(j, &col);
    }
    q
}
