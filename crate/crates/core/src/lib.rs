//! Explicit filtered-backprojection inversion of the spherical (3D) and
//! circular (2D) mean transforms with centers on the boundary of a cube, a
//! cuboid, a square, a rectangle, three special triangles, right prisms over
//! those triangles, and a tetrahedral pyramid.
//!
//! The crate is `no_std` (it only needs `alloc`). Everything here is pure
//! numerics: domain geometry, odd-reflection replication of boundary data,
//! analytic phantoms, dataset conversions, and the 2D/3D reconstruction
//! pipelines. File formats, the CLI and thread pools live in the `polymean`
//! companion crate, which plugs a parallel [`Executor`] into the kernels.
//!
//! ## Pipelines
//!
//! * 2D: circular means `m(y, r)` are filtered per detector with a
//!   principal-value kernel `r / (r² - s²)`, differentiated in `s`, and
//!   backprojected over the truncated family of replicated boundary lines
//!   ([`recon2d`]).
//! * 3D: spherical means `M(y, t)` are filtered as `(1/t) ∂t (t M)`,
//!   backprojected as a vector field over replicated boundary planes inside
//!   the ball `|x - y| < T`, and the divergence of that field is the image
//!   ([`recon3d`]).
//!
//! Wave data `P(y, t)` enters either pipeline through the Abel (2D) or
//! Kirchhoff (3D) relations in [`data`].

#![no_std]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod data;
pub mod error;
pub mod exec;
pub mod fft;
pub mod geometry;
pub mod grid;
pub mod numerics;
pub mod phantom;
pub mod recon2d;
pub mod recon3d;
pub mod replication;
pub mod vector;

pub use data::{MeansDataset, Quantity, RadialGrid, Samples, WaveDataset};
pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use geometry::{build_domain, Domain, DomainKind, DomainSpec, Face, TriangleKind};
pub use grid::{GridSpec, ImageGrid};
pub use phantom::{Component, Phantom, Profile};
pub use recon2d::{invert_means_2d, invert_wave_2d, Params2D};
pub use recon3d::{invert_means_3d, invert_wave_3d, Params3D};
pub use replication::{fold, replicate_1d, replicate_2d, SourceRef};
pub use vector::Vec3;
