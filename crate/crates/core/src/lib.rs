//! Grouping research universities into statistically homogeneous sets.
//!
//! The pipeline reads a ranking-indicator table ([`ingest`]), computes
//! pairwise two-proportion statistics ([`pairstats`]), turns them into
//! indistinguishability networks ([`netbuild`]), decomposes those networks
//! ([`community`]) and compares the resulting classifications
//! ([`concordance`]). Networks, vectors and partitions are exchanged with
//! Pajek and VOSviewer through [`pajek`].
//!
//! Stability intervals for tables that lack published bounds come from
//! [`bootstrap`].

pub mod bootstrap;
pub mod community;
pub mod concordance;
mod error;
pub mod ingest;
pub mod netbuild;
pub mod pairstats;
pub mod pajek;

pub use error::{Error, Result};
