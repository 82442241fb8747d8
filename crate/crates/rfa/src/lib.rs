//! Training-free node embeddings for sparse graphs.
//!
//! This crate embeds the nodes of an undirected graph by propagating a
//! random Gaussian matrix through a degree-corrected spectral filter — no
//! eigendecomposition, no feature extraction, and no training. A low-pass
//! filter produces *position* embeddings (nodes close in the graph get
//! similar vectors, e.g. community membership); a high-pass filter produces
//! *identity* embeddings (nodes with similar structural roles get similar
//! vectors, regardless of where they sit).
//!
//! The crate is organized as five areas:
//!
//! - [`graph`] / [`generate`]: compressed sparse graphs, edge-list and label
//!   IO, connected-component extraction, and deterministic synthetic
//!   generators (Erdős–Rényi, barbell, planted partition, role ring).
//! - [`spectral`]: the sparse propagation operator, its filter kernel, and
//!   dense eigendecomposition diagnostics (Gershgorin bounds, per-node
//!   eigenpair residuals, spectrum spread) for small graphs.
//! - [`embed`]: the embedding engine — seeded noise, iterated
//!   propagate → activate → normalize, dataset presets, and matrix IO.
//! - [`eval`]: a downstream-classification harness — stratified splits,
//!   deterministic logistic regression, micro/macro F1, and a normalized
//!   time/quality trade-off score.
//! - [`cli`]: reproducible command pipelines over files, used by the `rfa`
//!   binary and callable as a library.
//!
//! Determinism is a contract throughout: every randomized operation takes an
//! explicit 64-bit seed, and identical inputs produce byte-identical outputs
//! regardless of the worker-thread count.
//!
//! # Quick start
//!
//! ```
//! use rfa::embed::{rfa_embed, RfaConfig};
//! use rfa::generate::gen_barbell;
//!
//! let graph = gen_barbell(6, 3).unwrap();
//! let config = RfaConfig::high_pass(16, 20.0, 3).with_seed(7);
//! let out = rfa_embed(&graph, &config).unwrap();
//! assert_eq!((out.embedding.rows(), out.embedding.cols()), (15, 16));
//! ```
//!
//! The `examples/` directory holds one runnable walk-through per capability;
//! `cargo run --example` with no name lists them.

pub mod cli;
pub mod embed;
pub mod error;
pub mod eval;
pub mod generate;
pub mod graph;
pub mod spectral;

pub use error::{Error, Result};
