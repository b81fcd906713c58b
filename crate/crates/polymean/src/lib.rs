//! Files, command line and experiments around [`polymean_core`].
//!
//! * [`format`]: JSON manifests with raw little-endian `f64` payloads for
//!   datasets and images, plus PGM and CSV previews.
//! * [`exec`]: a rayon-backed [`Executor`](polymean_core::Executor).
//! * [`metrics`]: relative L∞ and L² errors between images.
//! * [`setup`]: domain strings and the declared test phantoms.
//! * [`study`]: truncation and convergence sweeps.
//! * [`cli`]: the `polymean` binary.

pub mod cli;
pub mod error;
pub mod exec;
pub mod format;
pub mod metrics;
pub mod setup;
pub mod study;

pub use error::{Error, Result};
pub use exec::Threads;
