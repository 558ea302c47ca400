//! Full evaluation of two runs: per-query fairness and effectiveness,
//! aggregates, correlations and paired significance tests.
//!
//!     cargo run --example evaluate_run

use texfair::analysis::{compare_runs, evaluate_run, per_query_csv};
use texfair::metrics::ifairr;
use texfair::{CorpusIndex, FairnessConfig, GroupLexicon, Qrels, RankedList, Run};

fn main() -> texfair::Result<()> {
    let lexicon = GroupLexicon::new(
        vec![
            ("female".into(), vec!["she".into(), "her".into(), "woman".into()]),
            ("male".into(), vec!["he".into(), "his".into(), "man".into()]),
        ],
        None,
    )?;
    let texts = [
        ("d1", "she won the race"),
        ("d2", "he won the race"),
        ("d3", "the race was won by a woman and a man"),
        ("d4", "the race started late"),
        ("d5", "his bike broke and he stopped"),
        ("d6", "her time was a record"),
    ];
    let index = CorpusIndex::from_documents(texts, &lexicon)?;
    let cfg = FairnessConfig::for_lexicon(&lexicon).with_k(3);
    let background = ifairr(index.docs(), &cfg)?;

    let mut qrels = Qrels::default();
    for (q, d) in [("q1", "d1"), ("q2", "d3"), ("q3", "d6")] {
        qrels.insert(q, d, 1);
    }
    let run = |lists: [(&str, [&str; 3]); 3]| -> texfair::Result<Run> {
        lists
            .into_iter()
            .map(|(q, ids)| Ok((q.to_string(), RankedList::from_ids(q, ids)?)))
            .collect()
    };
    let balanced = run([("q1", ["d1", "d2", "d4"]), ("q2", ["d3", "d4", "d5"]), ("q3", ["d6", "d5", "d4"])])?;
    let skewed = run([("q1", ["d2", "d5", "d1"]), ("q2", ["d5", "d2", "d3"]), ("q3", ["d5", "d2", "d6"])])?;

    let reports = vec![
        evaluate_run("balanced", &balanced, &index, background, &cfg, Some(&qrels))?,
        evaluate_run("skewed", &skewed, &index, background, &cfg, Some(&qrels))?,
    ];
    print!("{}", per_query_csv(&reports));
    for r in &reports {
        println!(
            "{}: texfair {:.4} nfairr {:.4} ndcg {:.4}",
            r.run_tag,
            r.mean("texfair").unwrap_or(f64::NAN),
            r.mean("nfairr").unwrap_or(f64::NAN),
            r.mean("ndcg").unwrap_or(f64::NAN),
        );
    }
    for c in compare_runs(&reports).iter().filter(|c| c.metric == "texfair") {
        println!("{} vs {} on {}: t {:?}, adjusted p {:?}", c.run_a, c.run_b, c.metric, c.test.t, c.p_adjusted);
    }
    Ok(())
}
