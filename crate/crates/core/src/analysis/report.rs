//! Per-run evaluation reports and cross-run comparisons.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::effectiveness::{mrr, ndcg};
use super::stats::{bonferroni, paired_t_test, pearson_pairwise, Correlation, TTest};
use crate::corpus::CorpusIndex;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_query, FairnessConfig, QueryFairness};
use crate::rankings::{Qrels, Run};

/// Metric columns, in output order.
pub const METRICS: &[&str] = &[
    "nfairr",
    "texfair",
    "texfair_no_rbdf",
    "ted",
    "ted_no_rbdf",
    "rbdf",
    "awrf_doc",
    "mrr",
    "ndcg",
];

/// Metrics compared across runs with paired t-tests.
pub const COMPARED: &[&str] = &["nfairr", "texfair", "texfair_no_rbdf", "mrr", "ndcg"];

/// Metric pairs correlated per query within one run.
pub const CORRELATED: &[(&str, &str)] = &[
    ("texfair", "nfairr"),
    ("texfair_no_rbdf", "nfairr"),
    ("texfair", "awrf_doc"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    #[serde(flatten)]
    pub fairness: QueryFairness,
    pub mrr: Option<f64>,
    pub ndcg: Option<f64>,
}

impl QueryRecord {
    pub fn metric(&self, name: &str) -> Option<f64> {
        let f = &self.fairness;
        match name {
            "nfairr" => f.nfairr,
            "texfair" => f.texfair,
            "texfair_no_rbdf" => f.texfair_no_rbdf,
            "ted" => f.ted,
            "ted_no_rbdf" => f.ted_no_rbdf,
            "rbdf" => f.rbdf,
            "awrf_doc" => f.awrf_doc,
            "mrr" => self.mrr,
            "ndcg" => self.ndcg,
            _ => None,
        }
    }
}

/// Arithmetic mean over the queries where a metric is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub n: usize,
    pub excluded: usize,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let (mut sum, mut n, mut excluded) = (0.0, 0usize, 0usize);
        for v in values {
            match v {
                Some(v) => {
                    sum += v;
                    n += 1;
                }
                None => excluded += 1,
            }
        }
        Aggregate {
            mean: (n > 0).then(|| sum / n as f64),
            n,
            excluded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub run_tag: String,
    pub config: FairnessConfig,
    pub groups: Vec<String>,
    pub per_query: Vec<QueryRecord>,
    pub aggregates: BTreeMap<String, Aggregate>,
    /// Keyed `"a~b"`; `None` when there were too few defined pairs.
    pub correlations: BTreeMap<String, Option<Correlation>>,
}

impl MetricReport {
    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.aggregates.get(metric).and_then(|a| a.mean)
    }

    pub fn column(&self, metric: &str) -> Vec<Option<f64>> {
        self.per_query.iter().map(|q| q.metric(metric)).collect()
    }
}

/// Fails with every document id in `run` that the index lacks.
pub fn check_run_docs(run: &Run, index: &CorpusIndex) -> Result<()> {
    let mut missing: Vec<String> = run
        .values()
        .flat_map(|l| l.entries.iter())
        .filter(|e| index.get(&e.doc_id).is_none())
        .map(|e| e.doc_id.clone())
        .collect();
    missing.sort();
    missing.dedup();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingDocs(missing))
    }
}

/// Evaluates every query of `run` in parallel; records come back in query
/// id order. Queries whose evaluation fails are logged and left undefined.
pub fn evaluate_run(
    run_tag: &str,
    run: &Run,
    index: &CorpusIndex,
    background_ifairr: f64,
    cfg: &FairnessConfig,
    qrels: Option<&Qrels>,
) -> Result<MetricReport> {
    cfg.validate()?;
    cfg.check_index(index)?;
    if background_ifairr <= 0.0 {
        return Err(Error::DegenerateBackground);
    }
    check_run_docs(run, index)?;

    let per_query: Vec<QueryRecord> = run
        .par_iter()
        .map(|(qid, list)| {
            let fairness = evaluate_query(list, index, background_ifairr, cfg).unwrap_or_else(|e| {
                log::warn!("query {qid:?}: {e}");
                QueryFairness {
                    query_id: qid.clone(),
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
            });
            if fairness.background_violation {
                log::warn!("query {qid:?}: NFaiRR above 1; ranked documents outside the background?");
            }
            let (m, n) = match qrels {
                Some(q) => (mrr(list, q, cfg.k), ndcg(list, q, cfg.k)),
                None => (None, None),
            };
            QueryRecord {
                fairness,
                mrr: m,
                ndcg: n,
            }
        })
        .collect();

    let aggregates = METRICS
        .iter()
        .map(|m| (m.to_string(), Aggregate::of(per_query.iter().map(|q| q.metric(m)))))
        .collect();

    let mut correlations = BTreeMap::new();
    for (a, b) in CORRELATED {
        let x: Vec<Option<f64>> = per_query.iter().map(|q| q.metric(a)).collect();
        let y: Vec<Option<f64>> = per_query.iter().map(|q| q.metric(b)).collect();
        correlations.insert(format!("{a}~{b}"), pearson_pairwise(&x, &y).ok());
    }

    Ok(MetricReport {
        run_tag: run_tag.to_owned(),
        config: cfg.clone(),
        groups: index.groups().to_vec(),
        per_query,
        aggregates,
        correlations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    pub run_a: String,
    pub run_b: String,
    pub test: TTest,
    /// Bonferroni-adjusted over the run pairs compared for this metric.
    pub p_adjusted: Option<f64>,
}

/// Paired t-tests between every pair of runs for each compared metric, on
/// the queries where both runs define the metric.
pub fn compare_runs(reports: &[MetricReport]) -> Vec<Comparison> {
    let mut out = Vec::new();
    for metric in COMPARED {
        let mut tests = Vec::new();
        for i in 0..reports.len() {
            for j in i + 1..reports.len() {
                let (a, b) = (&reports[i], &reports[j]);
                let lookup: BTreeMap<&str, f64> = b
                    .per_query
                    .iter()
                    .filter_map(|q| Some((q.fairness.query_id.as_str(), q.metric(metric)?)))
                    .collect();
                let (xs, ys): (Vec<f64>, Vec<f64>) = a
                    .per_query
                    .iter()
                    .filter_map(|q| Some((q.metric(metric)?, *lookup.get(q.fairness.query_id.as_str())?)))
                    .unzip();
                if let Ok(test) = paired_t_test(&xs, &ys) {
                    tests.push((a.run_tag.clone(), b.run_tag.clone(), test));
                }
            }
        }
        let m = tests.len();
        for (run_a, run_b, test) in tests {
            let p_adjusted = test.p_value.map(|p| bonferroni(&[p], m)[0]);
            out.push(Comparison {
                metric: metric.to_string(),
                run_a,
                run_b,
                test,
                p_adjusted,
            });
        }
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "NA".into())
}

/// `per_query.csv`: one row per run and query.
pub fn per_query_csv(reports: &[MetricReport]) -> String {
    let groups = reports.first().map(|r| r.groups.clone()).unwrap_or_default();
    let mut out = String::from("run,qid");
    for m in METRICS {
        out.push(',');
        out.push_str(m);
    }
    for g in &groups {
        let _ = write!(out, ",p_{g}");
    }
    out.push_str(",undefined_representation\n");
    for r in reports {
        for q in &r.per_query {
            let _ = write!(out, "{},{}", r.run_tag, q.fairness.query_id);
            for m in METRICS {
                let _ = write!(out, ",{}", cell(q.metric(m)));
            }
            for (i, _) in groups.iter().enumerate() {
                let p = q.fairness.group_representation.as_ref().map(|p| p[i].1);
                let _ = write!(out, ",{}", cell(p));
            }
            let _ = writeln!(out, ",{}", q.fairness.undefined_representation);
        }
    }
    out
}

#[derive(Serialize)]
struct RunSummary<'a> {
    aggregates: &'a BTreeMap<String, Aggregate>,
    correlations: &'a BTreeMap<String, Option<Correlation>>,
}

#[derive(Serialize)]
struct StatsFile<'a, C: Serialize> {
    config: &'a C,
    runs: BTreeMap<&'a str, RunSummary<'a>>,
    comparisons: &'a [Comparison],
}

/// `stats.json`: effective configuration, per-run aggregates and
/// correlations, and cross-run significance tests.
pub fn stats_json<C: Serialize>(config: &C, reports: &[MetricReport], comparisons: &[Comparison]) -> String {
    let file = StatsFile {
        config,
        runs: reports
            .iter()
            .map(|r| {
                (
                    r.run_tag.as_str(),
                    RunSummary {
                        aggregates: &r.aggregates,
                        correlations: &r.correlations,
                    },
                )
            })
            .collect(),
        comparisons,
    };
    serde_json::to_string_pretty(&file).expect("stats serialize")
}
