//! AWRF with documents softly attributed to groups by their share of group
//! terms, under each supported distance.
//!
//!     cargo run --example awrf_association

use texfair::metrics::{awrf, doc_association, Distance};
use texfair::{DocStats, FairnessConfig};

fn main() {
    let cfg = FairnessConfig::uniform(["female", "male"]).with_k(4);
    let ranking = [
        DocStats::new("a", 20, vec![3, 1]),
        DocStats::new("b", 20, vec![0, 2]),
        DocStats::new("c", 20, vec![0, 0]),
        DocStats::new("d", 20, vec![1, 0]),
    ];
    let alignments: Vec<Vec<f64>> = ranking.iter().map(|d| doc_association(d, 2)).collect();
    for (d, a) in ranking.iter().zip(&alignments) {
        println!("{} -> {:?}", d.doc_id, a);
    }
    for distance in [Distance::TotalVariation, Distance::L1, Distance::Euclidean] {
        println!("{distance:?}: {:.4}", awrf(&alignments, &cfg, distance).unwrap());
    }
}
