//! Two four-document rankings that NFaiRR cannot tell apart: every document
//! holds terms of a single group, so each has neutrality 0. TExFAIR looks at
//! the ranking as a whole and rewards the one that mixes both groups.
//!
//!     cargo run --example figure1

use std::path::Path;

use texfair::metrics::{ifairr, nfairr, rbdf, texfair};
use texfair::{build_index, load_lexicon, parse_run, FairnessConfig};

fn main() -> texfair::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/figure1");
    let lexicon = load_lexicon(data.join("lexicon.json"), None)?;
    let index = build_index(data.join("collection.tsv"), &lexicon)?;
    let cfg = FairnessConfig::for_lexicon(&lexicon);
    let background = ifairr(index.docs(), &cfg)?;

    println!("{:<6} {:>7} {:>8} {:>6}", "run", "nfairr", "texfair", "rbdf");
    for name in ["left", "right"] {
        let run = parse_run(data.join(format!("{name}.run")))?;
        let list = &run["q1"];
        println!(
            "{:<6} {:>7.4} {:>8.4} {:>6.3}",
            name,
            nfairr(list, &index, background, &cfg)?,
            texfair(list, &index, &cfg)?,
            rbdf(list, &index, &cfg)?.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
