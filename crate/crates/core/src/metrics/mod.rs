//! Fairness measures for a single ranked list.
//!
//! All measures share the position bias `1 / log_b(r + 1)` for rank `r`
//! and read documents only through their [`DocStats`].

mod awrf;
mod nfairr;
mod texfair;

use serde::{Deserialize, Serialize};

pub use awrf::{awrf, doc_association, Distance};
pub use nfairr::{fairr, ideal_neutralities, ifairr, neutrality, nfairr};
pub use texfair::{group_representation, max_ted, rbdf, ted, term_exposure_sum, texfair};

use crate::corpus::{CorpusIndex, DocStats};
use crate::error::{Error, Result};
use crate::lexicon::GroupLexicon;
use crate::rankings::RankedList;

/// Parameters shared by every fairness measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessConfig {
    /// Ranking cut-off.
    pub k: usize,
    /// Documents with at most this many group terms are neutral.
    pub tau: u64,
    /// Base of the logarithm in the position bias.
    pub log_base: f64,
    /// Target share per group, in index group order.
    pub target: Vec<(String, f64)>,
}

impl FairnessConfig {
    pub const DEFAULT_K: usize = 10;
    pub const DEFAULT_TAU: u64 = 0;
    pub const DEFAULT_LOG_BASE: f64 = 2.0;

    /// Defaults (k = 10, tau = 0, base 2) with the lexicon's target.
    pub fn for_lexicon(lexicon: &GroupLexicon) -> Self {
        FairnessConfig {
            k: Self::DEFAULT_K,
            tau: Self::DEFAULT_TAU,
            log_base: Self::DEFAULT_LOG_BASE,
            target: lexicon.group_ids().into_iter().zip(lexicon.target().iter().copied()).collect(),
        }
    }

    /// Equal target over the given groups, default parameters.
    pub fn uniform<S: Into<String>>(groups: impl IntoIterator<Item = S>) -> Self {
        let ids: Vec<String> = groups.into_iter().map(Into::into).collect();
        let share = 1.0 / ids.len() as f64;
        FairnessConfig {
            k: Self::DEFAULT_K,
            tau: Self::DEFAULT_TAU,
            log_base: Self::DEFAULT_LOG_BASE,
            target: ids.into_iter().map(|g| (g, share)).collect(),
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_tau(mut self, tau: u64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_log_base(mut self, base: f64) -> Self {
        self.log_base = base;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.log_base > 1.0 && self.log_base.is_finite()) {
            return Err(Error::Config(format!("log base must exceed 1, got {}", self.log_base)));
        }
        if self.target.len() < 2 {
            return Err(Error::Config("target needs at least two groups".into()));
        }
        let sum: f64 = self.target.iter().map(|(_, t)| t).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("target sums to {sum}, expected 1")));
        }
        if let Some((g, t)) = self.target.iter().find(|(_, t)| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::Config(format!("target for {g:?} must lie in (0, 1), got {t}")));
        }
        Ok(())
    }

    pub fn shares(&self) -> Vec<f64> {
        self.target.iter().map(|(_, t)| *t).collect()
    }

    /// Checks that the target lists exactly the index's groups, in order.
    pub fn check_index(&self, index: &CorpusIndex) -> Result<()> {
        let same = self.target.len() == index.groups().len()
            && self.target.iter().zip(index.groups()).all(|((a, _), b)| a == b);
        if same {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "target groups {:?} do not match index groups {:?}",
                self.target.iter().map(|(g, _)| g).collect::<Vec<_>>(),
                index.groups()
            )))
        }
    }

    /// Position bias `1 / log_base(rank + 1)` for a 1-based rank.
    pub fn position_bias(&self, rank: usize) -> f64 {
        position_bias(rank, self.log_base)
    }
}

pub fn position_bias(rank: usize, log_base: f64) -> f64 {
    1.0 / ((rank + 1) as f64).log(log_base)
}

/// Resolves the first `min(k, n)` documents of `list`.
fn top_k<'a>(list: &RankedList, index: &'a CorpusIndex, cfg: &FairnessConfig) -> Result<Vec<&'a DocStats>> {
    cfg.check_index(index)?;
    let ids: Vec<&str> = list.entries.iter().take(cfg.k).map(|e| e.doc_id.as_str()).collect();
    index.resolve(&ids)
}

/// Every per-query fairness value. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryFairness {
    pub query_id: String,
    pub nfairr: Option<f64>,
    pub texfair: Option<f64>,
    pub texfair_no_rbdf: Option<f64>,
    pub awrf_doc: Option<f64>,
    pub ted: Option<f64>,
    pub ted_no_rbdf: Option<f64>,
    pub rbdf: Option<f64>,
    pub group_representation: Option<Vec<(String, f64)>>,
    /// No group term appears in the top-k.
    pub undefined_representation: bool,
    /// NFaiRR came out above 1: a ranked document scores better than the
    /// background allows.
    pub background_violation: bool,
}

impl QueryFairness {
    fn undefined(query_id: &str) -> Self {
        QueryFairness {
            query_id: query_id.to_owned(),
            nfairr: None,
            texfair: None,
            texfair_no_rbdf: None,
            awrf_doc: None,
            ted: None,
            ted_no_rbdf: None,
            rbdf: None,
            group_representation: None,
            undefined_representation: true,
            background_violation: false,
        }
    }

    /// True when the query carries no defined metric at all.
    pub fn is_empty(&self) -> bool {
        self.nfairr.is_none() && self.texfair.is_none()
    }
}

/// Computes every fairness measure for one ranked list.
pub fn evaluate_query(
    list: &RankedList,
    index: &CorpusIndex,
    background_ifairr: f64,
    cfg: &FairnessConfig,
) -> Result<QueryFairness> {
    let docs = top_k(list, index, cfg)?;
    if docs.is_empty() {
        log::warn!("query {:?} has an empty ranking; excluded from aggregates", list.query_id);
        return Ok(QueryFairness::undefined(&list.query_id));
    }
    let shares = cfg.shares();
    let weights: Vec<f64> = (1..=docs.len()).map(|r| cfg.position_bias(r)).collect();

    let nfairr_value = nfairr::nfairr_of(&docs, &weights, background_ifairr, cfg, &shares)?;
    let representation = texfair::representation_of(&docs, &weights);
    let rbdf_value = texfair::rbdf_of(&docs, &weights);
    let divergence = representation.as_ref().map(|p| texfair::divergence(p, &shares)).unwrap_or(0.0);
    let ted_rbdf = divergence * rbdf_value;
    let max = max_ted(&shares);

    let alignments: Vec<Vec<f64>> = docs.iter().map(|d| doc_association(d, shares.len())).collect();
    let awrf_doc = awrf::awrf_weighted(&alignments, &weights, &shares, Distance::TotalVariation);

    Ok(QueryFairness {
        query_id: list.query_id.clone(),
        nfairr: Some(nfairr_value),
        texfair: Some(max - ted_rbdf),
        texfair_no_rbdf: Some(max - divergence),
        awrf_doc,
        ted: Some(ted_rbdf),
        ted_no_rbdf: Some(divergence),
        rbdf: Some(rbdf_value),
        undefined_representation: representation.is_none(),
        group_representation: representation
            .map(|p| index.groups().iter().cloned().zip(p).collect()),
        background_violation: nfairr_value > 1.0,
    })
}
