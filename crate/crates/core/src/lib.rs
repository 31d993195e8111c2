//! Edge-weighted characteristic graphs for distributed functional compression.
//!
//! Two encoders observe correlated sources `X1`, `X2`; a decoder wants
//! `f(X1, X2)`. Each encoder colors its characteristic graph so that a lookup
//! table on the pair of colors recovers `f`, and the edge weights say how many
//! colors two conflicting symbols must not share under b-fold colorings.
//!
//! ```
//! use ewcg::{fixtures, graph::Side};
//!
//! let g = fixtures::example1_graph(Side::First);
//! assert_eq!(g.edge_count(), 5);
//! ```

pub mod coloring;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod pipeline;
pub mod prob;
pub mod rates;
pub mod report;
pub mod reproduce;
pub mod spec;

pub use error::{Error, ErrorKind, Result};
