use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{check_run_docs, Aggregate};
use crate::corpus::{CorpusIndex, DocStats};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_query, ideal_neutralities, FairnessConfig};
use crate::rankings::Run;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub nfairr: Option<f64>,
    pub texfair: Option<f64>,
    pub texfair_no_rbdf: Option<f64>,
    /// Queries with defined values at this cut-off.
    pub queries: usize,
}

/// Mean NFaiRR and TExFAIR (with and without RBDF) of `run` at each
/// cut-off in `ks`. The ideal FaiRR of `background` is recomputed per k.
pub fn cutoff_sweep(
    run: &Run,
    index: &CorpusIndex,
    background: &[DocStats],
    cfg: &FairnessConfig,
    ks: &[usize],
) -> Result<Vec<SweepRow>> {
    if ks.is_empty() {
        return Err(Error::Config("no cut-offs given".into()));
    }
    if ks.contains(&0) {
        return Err(Error::Config("cut-offs must be at least 1".into()));
    }
    cfg.validate()?;
    cfg.check_index(index)?;
    check_run_docs(run, index)?;
    if background.is_empty() {
        return Err(Error::Validation("background set is empty".into()));
    }

    let deepest = ks.iter().copied().max().unwrap_or(1);
    let ideal = ideal_neutralities(background, cfg, deepest);

    ks.iter()
        .map(|&k| {
            let cfg_k = cfg.clone().with_k(k);
            let ifairr: f64 = ideal
                .iter()
                .take(k)
                .enumerate()
                .map(|(i, w)| w * cfg_k.position_bias(i + 1))
                .sum();
            if ifairr <= 0.0 {
                return Err(Error::DegenerateBackground);
            }
            let per_query = run
                .par_iter()
                .map(|(_, list)| evaluate_query(list, index, ifairr, &cfg_k))
                .collect::<Result<Vec<_>>>()?;
            let nfairr = Aggregate::of(per_query.iter().map(|q| q.nfairr));
            Ok(SweepRow {
                k,
                nfairr: nfairr.mean,
                texfair: Aggregate::of(per_query.iter().map(|q| q.texfair)).mean,
                texfair_no_rbdf: Aggregate::of(per_query.iter().map(|q| q.texfair_no_rbdf)).mean,
                queries: nfairr.n,
            })
        })
        .collect()
}

/// `sweep.csv`: one row per cut-off.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,nfairr,texfair,texfair_no_rbdf,queries\n");
    let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_else(|| "NA".into());
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            cell(r.nfairr),
            cell(r.texfair),
            cell(r.texfair_no_rbdf),
            r.queries
        );
    }
    out
}
