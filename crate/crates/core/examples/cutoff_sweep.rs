//! How the fairness scores of a run move with the cut-off. Biased documents
//! are scattered down the ranking, so the score without the RBDF factor
//! swings more than the discounted one.
//!
//!     cargo run --example cutoff_sweep

use texfair::analysis::{cutoff_sweep, sweep_csv};
use texfair::{CorpusIndex, DocStats, FairnessConfig, RankedList, Run};

fn main() -> texfair::Result<()> {
    let mut docs = Vec::new();
    let mut run = Run::new();
    for q in 0..5 {
        let mut ids = Vec::new();
        for rank in 1..=100usize {
            let id = format!("q{q}d{rank:03}");
            let magnitudes = match rank {
                1..=4 => vec![(rank % 2) as u32, 1 - (rank % 2) as u32],
                r if (r + q) % 12 == 0 => vec![0, 3],
                _ => vec![0, 0],
            };
            docs.push(DocStats::new(id.clone(), 25, magnitudes));
            ids.push(id);
        }
        run.insert(format!("q{q}"), RankedList::from_ids(format!("q{q}"), ids)?);
    }
    let index = CorpusIndex::from_stats(vec!["female".into(), "male".into()], "synthetic".into(), docs)?;
    let cfg = FairnessConfig::uniform(["female", "male"]);
    let ks: Vec<usize> = (1..=10).map(|i| i * 10).collect();
    let rows = cutoff_sweep(&run, &index, index.docs(), &cfg, &ks)?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
