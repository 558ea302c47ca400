//! Group-representation fairness for ranked document lists.
//!
//! Documents are linked to groups through lexicons of representative terms.
//! The crate indexes a collection into per-document term statistics and
//! scores rankings with NFaiRR, AWRF and TExFAIR, a term-exposure measure
//! that discounts bias by how much of the ranking mentions any group at all.
//! It also builds counterfactual collections (every gendered term swapped)
//! and compares rankings with rank-biased overlap.
//!
//! ```
//! use texfair::{CorpusIndex, FairnessConfig, GroupLexicon, RankedList};
//!
//! let lexicon = GroupLexicon::new(
//!     vec![
//!         ("female".into(), vec!["she".into(), "her".into()]),
//!         ("male".into(), vec!["he".into(), "him".into()]),
//!     ],
//!     None,
//! )?;
//! let index = CorpusIndex::from_documents(
//!     [("d1", "he scored twice"), ("d2", "she was the captain"), ("d3", "the match ended")],
//!     &lexicon,
//! )?;
//! let cfg = FairnessConfig::for_lexicon(&lexicon);
//! let ranking = RankedList::from_ids("q1", ["d1", "d2", "d3"])?;
//! let score = texfair::metrics::texfair(&ranking, &index, &cfg)?;
//! assert!(score > 0.0 && score < 1.0);
//! # Ok::<(), texfair::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod counterfactual;
mod error;
pub mod io;
pub mod lexicon;
pub mod metrics;
pub mod rankings;

pub use corpus::{build_index, load_index, save_index, tokenize, CorpusIndex, DocStats};
pub use error::{Error, Result};
pub use lexicon::{load_cds_mapping, load_lexicon, CdsMapping, GroupLexicon, PosTag};
pub use metrics::{evaluate_query, FairnessConfig, QueryFairness};
pub use rankings::{parse_qrels, parse_run, truncate, Qrels, RankedList, Run};
