//! Tolerance thresholds used across the crate.
//!
//! All dense problems here are at most 12x12, so accumulated rounding stays
//! within a few hundred ulps; thresholds are chosen relative to the natural
//! scale of each test.

/// Default relative tolerance for positivity checks of algebra elements.
pub const POSITIVITY: f64 = 1e-9;

/// Relative tolerance for PSD hypothesis tests in certifiers.
pub const PSD_REL: f64 = 1e-9;

/// Relative singular-value threshold for rank decisions (pseudo-inverse,
/// Douglas range inclusion).
pub const RANK_REL: f64 = 1e-10;

/// Relative residual allowed in factorization and intertwining identities.
pub const RESIDUAL_REL: f64 = 1e-8;

/// Absolute slack allowed when validating certified intervals against
/// actual optimal bounds.
pub const CERT_SLACK: f64 = 1e-9;

/// Frame decision threshold: a family is a frame when
/// `lower > FRAME_DECISION * max(upper, 1)`.
pub const FRAME_DECISION: f64 = 1e-9;

/// Absolute slack added to the right-hand side of sampled hypotheses.
pub const SAMPLED_SLACK: f64 = 1e-10;
