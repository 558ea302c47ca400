//! Rank-biased overlap and its counterfactual aggregate.

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rankings::Run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RboVariant {
    /// Adds the agreement at the evaluation depth, weighted by the
    /// remaining tail mass.
    #[default]
    Extrapolated,
    /// Prefix sum only; a lower bound of the extrapolated value.
    Truncated,
}

impl std::str::FromStr for RboVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extrapolated" | "ext" => Ok(RboVariant::Extrapolated),
            "truncated" | "min" => Ok(RboVariant::Truncated),
            other => Err(Error::Config(format!("unknown RBO variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RboConfig {
    /// Persistence.
    pub p: f64,
    /// Evaluation depth.
    pub depth: usize,
    pub variant: RboVariant,
}

impl Default for RboConfig {
    fn default() -> Self {
        RboConfig {
            p: 0.9,
            depth: 10,
            variant: RboVariant::Extrapolated,
        }
    }
}

impl RboConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Config(format!("RBO persistence must lie in (0, 1), got {}", self.p)));
        }
        if self.depth == 0 {
            return Err(Error::Config("RBO depth must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_unique<T: Eq + Hash + std::fmt::Debug>(list: &[T]) -> Result<()> {
    let mut seen = HashSet::with_capacity(list.len());
    for item in list {
        if !seen.insert(item) {
            return Err(Error::DuplicateInList(format!("{item:?}")));
        }
    }
    Ok(())
}

/// Rank-biased overlap of two duplicate-free rankings, evaluated to depth
/// `min(cfg.depth, max(|a|, |b|))`. Two empty rankings are identical.
pub fn rbo<T: Eq + Hash + std::fmt::Debug>(a: &[T], b: &[T], cfg: &RboConfig) -> Result<f64> {
    cfg.validate()?;
    check_unique(a)?;
    check_unique(b)?;
    let depth = cfg.depth.min(a.len().max(b.len()));
    if depth == 0 {
        return Ok(1.0);
    }

    let mut seen_a: HashSet<&T> = HashSet::with_capacity(depth);
    let mut seen_b: HashSet<&T> = HashSet::with_capacity(depth);
    let mut overlap = 0usize;
    let mut sum = 0.0;
    let mut weight = 1.0 - cfg.p;
    for d in 0..depth {
        let x = a.get(d);
        let y = b.get(d);
        match (x, y) {
            (Some(x), Some(y)) if x == y => overlap += 1,
            _ => {
                if let Some(x) = x {
                    if seen_b.contains(x) {
                        overlap += 1;
                    }
                }
                if let Some(y) = y {
                    if seen_a.contains(y) {
                        overlap += 1;
                    }
                }
            }
        }
        if let Some(x) = x {
            seen_a.insert(x);
        }
        if let Some(y) = y {
            seen_b.insert(y);
        }
        sum += weight * overlap as f64 / (d + 1) as f64;
        weight *= cfg.p;
    }

    Ok(match cfg.variant {
        RboVariant::Truncated => sum,
        RboVariant::Extrapolated => sum + overlap as f64 / depth as f64 * cfg.p.powi(depth as i32),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrboReport {
    /// `(query_id, rbo)` in query id order.
    pub per_query: Vec<(String, f64)>,
    pub mean: f64,
    /// Queries present in only one of the two runs.
    pub skipped: Vec<String>,
}

/// Per-query RBO between the original and counterfactual runs, averaged
/// over the queries both runs share.
pub fn crbo(original: &Run, counterfactual: &Run, cfg: &RboConfig) -> Result<CrboReport> {
    cfg.validate()?;
    let mut per_query = Vec::new();
    let mut skipped = Vec::new();
    for (qid, list) in original {
        match counterfactual.get(qid) {
            Some(other) => per_query.push((qid.clone(), rbo(&list.doc_ids(), &other.doc_ids(), cfg)?)),
            None => skipped.push(qid.clone()),
        }
    }
    skipped.extend(counterfactual.keys().filter(|q| !original.contains_key(*q)).cloned());
    skipped.sort();
    if per_query.is_empty() {
        return Err(Error::Validation("runs share no query ids".into()));
    }
    if !skipped.is_empty() {
        log::warn!("{} queries appear in only one run and are skipped", skipped.len());
    }
    let mean = per_query.iter().map(|(_, v)| v).sum::<f64>() / per_query.len() as f64;
    Ok(CrboReport {
        per_query,
        mean,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankings::RankedList;
    use proptest::prelude::*;

    fn cfg(depth: usize) -> RboConfig {
        RboConfig {
            depth,
            ..RboConfig::default()
        }
    }

    #[test]
    fn identical_and_disjoint() {
        let a: Vec<u32> = (0..12).collect();
        assert!((rbo(&a, &a, &cfg(10)).unwrap() - 1.0).abs() < 1e-12);
        let short = [1, 2, 3];
        assert!((rbo(&short, &short, &cfg(10)).unwrap() - 1.0).abs() < 1e-12);
        let b: Vec<u32> = (100..112).collect();
        assert_eq!(rbo(&a, &b, &cfg(10)).unwrap(), 0.0);
    }

    #[test]
    fn swapped_tail_example() {
        let v = rbo(&["a", "b", "c"], &["a", "c", "b"], &cfg(3)).unwrap();
        assert!((v - 0.955).abs() < 1e-12, "{v}");
        let t = rbo(
            &["a", "b", "c"],
            &["a", "c", "b"],
            &RboConfig {
                variant: RboVariant::Truncated,
                ..cfg(3)
            },
        )
        .unwrap();
        assert!((t - 0.226).abs() < 1e-12, "{t}");
    }

    #[test]
    fn duplicates_and_bad_config() {
        assert!(matches!(rbo(&[1, 1], &[1, 2], &cfg(3)), Err(Error::DuplicateInList(_))));
        let bad = RboConfig { p: 1.0, ..cfg(3) };
        assert!(rbo(&[1], &[1], &bad).is_err());
        assert_eq!(rbo::<u8>(&[], &[], &cfg(3)).unwrap(), 1.0);
    }

    fn run(lists: &[(&str, &[&str])]) -> Run {
        lists
            .iter()
            .map(|(q, ids)| (q.to_string(), RankedList::from_ids(*q, ids.iter().copied()).unwrap()))
            .collect()
    }

    #[test]
    fn crbo_examples() {
        let orig = run(&[("q1", &["a", "b", "c"]), ("q2", &["a", "b", "c"])]);
        let same = crbo(&orig, &orig, &cfg(3)).unwrap();
        assert!((same.mean - 1.0).abs() < 1e-12);

        let disjoint = run(&[("q1", &["x", "y", "z"]), ("q2", &["u", "v", "w"])]);
        assert_eq!(crbo(&orig, &disjoint, &cfg(3)).unwrap().mean, 0.0);

        let cf = run(&[("q1", &["a", "b", "c"]), ("q2", &["a", "c", "b"]), ("q3", &["a"])]);
        let r = crbo(&orig, &cf, &cfg(3)).unwrap();
        assert!((r.mean - 0.9775).abs() < 1e-12);
        assert_eq!(r.skipped, vec!["q3"]);

        let other = run(&[("z", &["a"])]);
        assert!(crbo(&orig, &other, &cfg(3)).is_err());
    }

    fn perm() -> impl Strategy<Value = Vec<u8>> {
        Just((0u8..8).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_flat_map(|v| (0..=v.len()).prop_map(move |n| v[..n].to_vec()))
    }

    proptest! {
        #[test]
        fn symmetric_bounded_and_ordered(a in perm(), b in perm(), p in 0.05f64..0.95, depth in 1usize..10) {
            let ext = RboConfig { p, depth, variant: RboVariant::Extrapolated };
            let tr = RboConfig { variant: RboVariant::Truncated, ..ext };
            let ab = rbo(&a, &b, &ext).unwrap();
            prop_assert!((ab - rbo(&b, &a, &ext).unwrap()).abs() < 1e-15);
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&ab));
            prop_assert!(rbo(&a, &b, &tr).unwrap() <= ab + 1e-15);
        }

        #[test]
        fn renaming_invariant(a in perm(), b in perm()) {
            let rename = |v: &[u8]| v.iter().map(|x| x * 7 + 3).collect::<Vec<u8>>();
            let c = cfg(10);
            prop_assert_eq!(rbo(&a, &b, &c).unwrap(), rbo(&rename(&a), &rename(&b), &c).unwrap());
        }
    }
}
