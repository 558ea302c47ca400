//! Document neutrality and the normalized FaiRR measure.

use super::{top_k, FairnessConfig};
use crate::corpus::{CorpusIndex, DocStats};
use crate::error::{Error, Result};
use crate::rankings::RankedList;

pub(super) fn omega(doc: &DocStats, tau: u64, shares: &[f64]) -> f64 {
    let total = doc.total_magnitude();
    if total <= tau {
        return 1.0;
    }
    let total = total as f64;
    let gap: f64 = doc
        .magnitudes
        .iter()
        .zip(shares)
        .map(|(&m, &j)| (m as f64 / total - j).abs())
        .sum();
    1.0 - gap
}

/// Neutrality of one document: 1 when it holds at most `tau` group terms,
/// otherwise one minus the L1 gap between its group proportions and the
/// target.
pub fn neutrality(doc: &DocStats, cfg: &FairnessConfig) -> f64 {
    omega(doc, cfg.tau, &cfg.shares())
}

/// Rank-discounted sum of neutrality over the top-k.
pub fn fairr(list: &RankedList, index: &CorpusIndex, cfg: &FairnessConfig) -> Result<f64> {
    let docs = top_k(list, index, cfg)?;
    let shares = cfg.shares();
    Ok(docs
        .iter()
        .enumerate()
        .map(|(i, d)| omega(d, cfg.tau, &shares) * cfg.position_bias(i + 1))
        .sum())
}

/// The `limit` highest neutrality scores in `background`, descending.
pub fn ideal_neutralities<'a>(
    background: impl IntoIterator<Item = &'a DocStats>,
    cfg: &FairnessConfig,
    limit: usize,
) -> Vec<f64> {
    let shares = cfg.shares();
    let mut scores: Vec<f64> = background.into_iter().map(|d| omega(d, cfg.tau, &shares)).collect();
    if limit < scores.len() {
        scores.select_nth_unstable_by(limit, |a, b| b.total_cmp(a));
        scores.truncate(limit);
    }
    scores.sort_unstable_by(|a, b| b.total_cmp(a));
    scores
}

/// FaiRR of the best ordering of the background set.
pub fn ifairr<'a>(background: impl IntoIterator<Item = &'a DocStats>, cfg: &FairnessConfig) -> Result<f64> {
    let scores = ideal_neutralities(background, cfg, cfg.k);
    if scores.is_empty() {
        return Err(Error::Validation("background set is empty".into()));
    }
    Ok(scores
        .iter()
        .enumerate()
        .map(|(i, w)| w * cfg.position_bias(i + 1))
        .sum())
}

pub(super) fn nfairr_of(
    docs: &[&DocStats],
    weights: &[f64],
    background_ifairr: f64,
    cfg: &FairnessConfig,
    shares: &[f64],
) -> Result<f64> {
    if background_ifairr <= 0.0 {
        return Err(Error::DegenerateBackground);
    }
    let fairr: f64 = docs
        .iter()
        .zip(weights)
        .map(|(d, w)| omega(d, cfg.tau, shares) * w)
        .sum();
    Ok(fairr / background_ifairr)
}

/// FaiRR normalized by the background's ideal FaiRR. Values above 1 are
/// returned as computed and logged.
pub fn nfairr(list: &RankedList, index: &CorpusIndex, background_ifairr: f64, cfg: &FairnessConfig) -> Result<f64> {
    let docs = top_k(list, index, cfg)?;
    let weights: Vec<f64> = (1..=docs.len()).map(|r| cfg.position_bias(r)).collect();
    let value = nfairr_of(&docs, &weights, background_ifairr, cfg, &cfg.shares())?;
    if value > 1.0 {
        log::warn!(
            "query {:?}: NFaiRR {value} exceeds 1; ranked documents outside the background set?",
            list.query_id
        );
    }
    Ok(value)
}
