//! Effectiveness metrics, significance testing and cut-off sweeps.

mod effectiveness;
mod report;
mod stats;
mod sweep;

pub use effectiveness::{mrr, ndcg};
pub use report::{
    check_run_docs, compare_runs, evaluate_run, per_query_csv, stats_json, Aggregate, Comparison, MetricReport,
    QueryRecord, COMPARED, CORRELATED, METRICS,
};
pub use stats::{bonferroni, paired_t_test, pearson, pearson_pairwise, Correlation, TTest};
pub use sweep::{cutoff_sweep, sweep_csv, SweepRow};
