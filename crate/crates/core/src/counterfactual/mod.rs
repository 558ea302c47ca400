//! Counterfactual collections and ranking divergence.
//!
//! [`cds_collection`] writes a copy of a collection with every gendered term
//! swapped; rankers are then re-run on it externally, and [`crbo`] measures
//! how far each query's ranking moved.

mod cds;
mod rbo;

pub use cds::{cds_collection, cds_stream, cds_transform, load_pos_annotations, PosAnnotations, TransformReport};
pub use rbo::{crbo, rbo, CrboReport, RboConfig, RboVariant};
