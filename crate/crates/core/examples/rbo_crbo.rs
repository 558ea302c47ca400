//! Rank-biased overlap between two rankings, and its mean over the queries
//! of an original and a counterfactual run.
//!
//!     cargo run --example rbo_crbo

use texfair::counterfactual::{crbo, rbo, RboConfig, RboVariant};
use texfair::{RankedList, Run};

fn main() -> texfair::Result<()> {
    let ext = RboConfig::default();
    let trunc = RboConfig {
        variant: RboVariant::Truncated,
        ..ext
    };
    let a = ["d1", "d2", "d3"];
    let b = ["d1", "d3", "d2"];
    println!("extrapolated {:.4}", rbo(&a, &b, &ext)?);
    println!("truncated    {:.4}", rbo(&a, &b, &trunc)?);

    let run = |lists: &[(&str, &[&str])]| -> texfair::Result<Run> {
        lists
            .iter()
            .map(|(q, ids)| Ok((q.to_string(), RankedList::from_ids(*q, ids.iter().copied())?)))
            .collect()
    };
    let original = run(&[("q1", &a), ("q2", &["x", "y", "z"]), ("q3", &["u"])])?;
    let counterfactual = run(&[("q1", &b), ("q2", &["x", "y", "z"])])?;
    let report = crbo(&original, &counterfactual, &ext)?;
    for (q, v) in &report.per_query {
        println!("{q}: {v:.4}");
    }
    println!("CRBO {:.4} (skipped {:?})", report.mean, report.skipped);
    Ok(())
}
