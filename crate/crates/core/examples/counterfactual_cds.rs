//! Swap gendered terms and names, with and without POS annotations for
//! the ambiguous "her" and "his".
//!
//!     cargo run --example counterfactual_cds

use std::collections::HashMap;
use std::path::Path;

use texfair::counterfactual::cds_transform;
use texfair::{load_cds_mapping, PosTag};

fn main() -> texfair::Result<()> {
    let mapping = load_cds_mapping(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/gender_cds.tsv"))?;
    for text in [
        "He gave her his book.",
        "Mary told John that the car was hers.",
        "HIS MOTHER called him back",
    ] {
        let once = cds_transform(text, &mapping, None);
        println!("{text}\n  -> {once}\n  -> {}", cds_transform(&once, &mapping, None));
    }

    // the next-word heuristic reads token 2 as a possessive; the annotation
    // marks it as a pronoun
    let text = "they saw her leave, his was first";
    let tags: HashMap<usize, PosTag> = [(2, PosTag::Pron), (4, PosTag::Pron)].into_iter().collect();
    println!("{text}\n  -> {}", cds_transform(text, &mapping, None));
    println!("  -> {} (annotated)", cds_transform(text, &mapping, Some(&tags)));
    Ok(())
}
