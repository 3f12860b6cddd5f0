//! Incomplete multi-view clustering by decomposing every view's subspace
//! representation into a shared heredity matrix and a per-view variation
//! matrix, aligned through spectral cluster indicators.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] — complete/incomplete multi-view data, masks, loaders, generator.
//! * [`norms`] — the adjustable rank surrogate, its proximal operator, and the row penalty.
//! * [`graph`] — affinity and unnormalized Laplacian of a variation matrix.
//! * [`solver`] — the augmented-Lagrangian alternating solver.
//! * [`clustering`] — k-means and label extraction from the consensus embedding.
//! * [`metrics`] — ACC, NMI, purity.
//! * [`baselines`] — concatenation + k-means / spectral clustering.
//! * [`experiment`] — missing-rate sweeps and report emission used by the CLI.

pub mod baselines;
pub mod clustering;
pub mod dataset;
pub mod experiment;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod norms;
pub mod solver;
