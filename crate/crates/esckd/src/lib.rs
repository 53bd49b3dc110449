//! Equiangular spherical codes for key distribution: numerical construction
//! of the codes, exact analytics of the intercept/resend attack, capacity of
//! decoder variants, and a seeded Monte Carlo simulator that cross-checks
//! every closed form.
//!
//! Modules:
//! - [`linalg`], [`info`]: dense complex linear algebra and entropy measures.
//! - [`frames`]: code construction (simplex, numerical search, unbiased
//!   bases), verification, derived measurements, frame file I/O.
//! - [`protocol`]: sift rates, key-rate bounds, noise conversions, and
//!   security thresholds of the spherical-code protocol.
//! - [`mub`]: closed-form comparison curves for unbiased-basis protocols.
//! - [`capacity`]: encoder/decoder mutual information and decoder search.
//! - [`mcsim`]: reproducible round-by-round simulation.
//! - [`figures`]: sweep datasets and CSV emission.

pub mod capacity;
pub mod error;
pub mod figures;
pub mod frames;
pub mod info;
pub mod linalg;
pub mod mcsim;
pub mod mub;
pub mod protocol;

pub use error::{Error, Result};
