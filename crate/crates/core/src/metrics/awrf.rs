//! Attention-weighted rank fairness over per-document alignment vectors.

use serde::{Deserialize, Serialize};

use super::FairnessConfig;
use crate::corpus::DocStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// Half the L1 distance.
    #[default]
    TotalVariation,
    L1,
    Euclidean,
}

impl Distance {
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            Distance::TotalVariation => 0.5 * diffs.map(f64::abs).sum::<f64>(),
            Distance::L1 => diffs.map(f64::abs).sum(),
            Distance::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

impl std::str::FromStr for Distance {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "tv" | "total_variation" => Ok(Distance::TotalVariation),
            "l1" => Ok(Distance::L1),
            "l2" | "euclidean" => Ok(Distance::Euclidean),
            other => Err(crate::Error::Config(format!("unknown distance {other:?}"))),
        }
    }
}

/// Association of a document with each group: its share of group-term
/// mentions, or an equal split when it mentions no group.
pub fn doc_association(doc: &DocStats, groups: usize) -> Vec<f64> {
    let total = doc.total_magnitude();
    if total == 0 {
        return vec![1.0 / groups as f64; groups];
    }
    let total = total as f64;
    doc.magnitudes.iter().map(|&m| m as f64 / total).collect()
}

pub(super) fn awrf_weighted(alignments: &[Vec<f64>], weights: &[f64], target: &[f64], distance: Distance) -> Option<f64> {
    let mut exposure = vec![0.0; target.len()];
    for (a, w) in alignments.iter().zip(weights) {
        for (e, x) in exposure.iter_mut().zip(a) {
            *e += w * x;
        }
    }
    let norm: f64 = exposure.iter().map(|e| e.abs()).sum();
    if norm == 0.0 {
        return None;
    }
    for e in &mut exposure {
        *e /= norm;
    }
    Some(distance.between(&exposure, target))
}

/// Distance between the normalized exposure that the top-k alignment
/// vectors accumulate and the configured target. `alignments` are given in
/// rank order; `None` when the accumulated exposure is all zero.
pub fn awrf(alignments: &[Vec<f64>], cfg: &FairnessConfig, distance: Distance) -> Option<f64> {
    let n = alignments.len().min(cfg.k);
    let weights: Vec<f64> = (1..=n).map(|r| cfg.position_bias(r)).collect();
    awrf_weighted(&alignments[..n], &weights, &cfg.shares(), distance)
}
