//! Term exposure, group representation, RBDF, TED and TExFAIR.
//!
//! A group's exposure in a ranking is the sum over ranked documents of its
//! terms' share of the document (`M / |d|`) weighted by position bias. The
//! representation of a group is its share of the total exposure, and TED is
//! the L1 gap between representation and target, optionally scaled by the
//! rank-weighted fraction of documents that mention any group at all.

use super::{top_k, FairnessConfig};
use crate::corpus::{CorpusIndex, DocStats};
use crate::error::{Error, Result};
use crate::rankings::RankedList;

fn exposures(docs: &[&DocStats], weights: &[f64]) -> Vec<f64> {
    let groups = docs.first().map(|d| d.magnitudes.len()).unwrap_or(0);
    let mut exposure = vec![0.0; groups];
    for (d, w) in docs.iter().zip(weights) {
        if d.length == 0 {
            continue;
        }
        let len = d.length as f64;
        for (e, &m) in exposure.iter_mut().zip(&d.magnitudes) {
            *e += m as f64 / len * w;
        }
    }
    exposure
}

pub(super) fn representation_of(docs: &[&DocStats], weights: &[f64]) -> Option<Vec<f64>> {
    let exposure = exposures(docs, weights);
    let total: f64 = exposure.iter().sum();
    if total > 0.0 {
        Some(exposure.into_iter().map(|e| e / total).collect())
    } else {
        None
    }
}

/// Caller guarantees `docs` is nonempty.
pub(super) fn rbdf_of(docs: &[&DocStats], weights: &[f64]) -> f64 {
    let mut hit = 0.0;
    let mut all = 0.0;
    for (d, w) in docs.iter().zip(weights) {
        if d.is_representative() {
            hit += w;
        }
        all += w;
    }
    hit / all
}

pub(super) fn divergence(representation: &[f64], shares: &[f64]) -> f64 {
    representation.iter().zip(shares).map(|(p, t)| (p - t).abs()).sum()
}

/// Largest attainable TED for the given target: all representation on the
/// group with the smallest target.
pub fn max_ted(shares: &[f64]) -> f64 {
    let min = shares.iter().copied().fold(f64::INFINITY, f64::min);
    2.0 * (1.0 - min)
}

fn weights(n: usize, cfg: &FairnessConfig) -> Vec<f64> {
    (1..=n).map(|r| cfg.position_bias(r)).collect()
}

/// Exposure of `group`'s terms in the top-k of `list`.
pub fn term_exposure_sum(list: &RankedList, index: &CorpusIndex, group: &str, cfg: &FairnessConfig) -> Result<f64> {
    let g = index
        .groups()
        .iter()
        .position(|id| id == group)
        .ok_or_else(|| Error::Validation(format!("unknown group {group:?}")))?;
    let docs = top_k(list, index, cfg)?;
    Ok(exposures(&docs, &weights(docs.len(), cfg))
        .get(g)
        .copied()
        .unwrap_or(0.0))
}

/// Share of total term exposure per group, in index group order. `None`
/// when no group term appears in the top-k.
pub fn group_representation(list: &RankedList, index: &CorpusIndex, cfg: &FairnessConfig) -> Result<Option<Vec<f64>>> {
    let docs = top_k(list, index, cfg)?;
    Ok(representation_of(&docs, &weights(docs.len(), cfg)))
}

/// Rank-weighted fraction of top-k documents holding any group term.
/// `None` for an empty list.
pub fn rbdf(list: &RankedList, index: &CorpusIndex, cfg: &FairnessConfig) -> Result<Option<f64>> {
    let docs = top_k(list, index, cfg)?;
    if docs.is_empty() {
        return Ok(None);
    }
    Ok(Some(rbdf_of(&docs, &weights(docs.len(), cfg))))
}

/// Term exposure divergence. When no group term is exposed the divergence
/// is 0 in both variants.
pub fn ted(list: &RankedList, index: &CorpusIndex, cfg: &FairnessConfig, apply_rbdf: bool) -> Result<f64> {
    let docs = top_k(list, index, cfg)?;
    if docs.is_empty() {
        return Ok(0.0);
    }
    let w = weights(docs.len(), cfg);
    let Some(p) = representation_of(&docs, &w) else {
        return Ok(0.0);
    };
    let gap = divergence(&p, &cfg.shares());
    Ok(if apply_rbdf { gap * rbdf_of(&docs, &w) } else { gap })
}

/// `max_ted - TED` with RBDF applied.
pub fn texfair(list: &RankedList, index: &CorpusIndex, cfg: &FairnessConfig) -> Result<f64> {
    Ok(max_ted(&cfg.shares()) - ted(list, index, cfg, true)?)
}
