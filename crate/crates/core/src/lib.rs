//! Best-case SNR versus compression factor for progressive and
//! random-projection capture, computed in the coefficient domain.
//!
//! The crate is organized bottom-up:
//!
//! - [`signal`]: tensors, the NDF container, PGM input, manifests, light fields
//! - [`bases`]: DCT, DFT, Haar and Daubechies-4 transforms plus progressive orderings
//! - [`pca`]: learned bases
//! - [`coders`]: TC / SC1 / SC4 truncation and SNR
//! - [`sweep`]: experiment grids, aggregation, envelopes, win regions, synthetic data
//! - [`cs`]: Gaussian measurements and orthogonal matching pursuit
//! - [`cli`]: the `sparsecap` command line, with [`selftest`] behind it
//!
//! See `examples/` for one runnable program per capability.

pub mod bases;
pub mod cli;
pub mod coders;
pub mod cs;
pub mod error;
mod fsutil;
pub mod pca;
pub mod rng;
pub mod selftest;
pub mod signal;
pub mod sweep;

pub use bases::{forward, inverse, progressive_order, BasisSpec, CoefficientTensor, ProgressiveOrdering};
pub use coders::{compute_snr, measurements_for, Method, TruncationResult, Truncator};
pub use error::{Error, Result};
pub use pca::{train_pca, PcaBasis};
pub use signal::{SignalKind, SignalTensor};
