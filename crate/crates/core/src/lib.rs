//! Reachability labeling for directed graphs.
//!
//! An encoder gives every node a short bit string; [`scheme::query`] decides
//! whether `u` reaches `v` from the two strings alone. Three schemes are
//! provided: a half-table warm-up, the biclique-compressed main scheme, and a
//! variant of it that trades maximum size for average size.

pub mod bipartite;
pub mod biclique;
pub mod bitio;
pub mod dictionary;
pub mod error;
pub mod exec;
pub mod flatlabel;
pub mod flatten;
pub mod graph;
pub mod oracle;
pub mod probe;
pub mod scheme;
pub mod warmup;

pub use bitio::{BitString, SchemeId};
pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{Dag, Digraph};
pub use biclique::BicliqueProfile;
pub use scheme::{encode, query, stats, EncodeOptions, LabelSet};

