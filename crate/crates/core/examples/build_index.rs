//! Index a collection, save it, and read it back.
//!
//!     cargo run --example build_index -- [collection.tsv] [lexicon.json] [out.idx]

use std::path::PathBuf;

use texfair::{build_index, load_index, load_lexicon, save_index};

fn main() -> texfair::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut args = std::env::args().skip(1);
    let collection = args.next().map(PathBuf::from).unwrap_or_else(|| data.join("figure1/collection.tsv"));
    let lexicon = args.next().map(PathBuf::from).unwrap_or_else(|| data.join("gender_lexicon.json"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("texfair-example.idx"));

    let lexicon = load_lexicon(&lexicon, None)?;
    let index = build_index(&collection, &lexicon)?;
    save_index(&index, &out)?;
    let loaded = load_index(&out)?;
    loaded.check_lexicon(&lexicon)?;

    println!("{} documents, groups {:?}", loaded.len(), loaded.groups());
    println!("tokenizer {}, lexicon {}", loaded.tokenizer_id(), &loaded.lexicon_fingerprint()[..12]);
    let representative = loaded.docs().iter().filter(|d| d.is_representative()).count();
    println!("{representative} documents mention a group term");
    for d in loaded.docs().iter().take(5) {
        println!("  {:<6} len {:>3} magnitudes {:?}", d.doc_id, d.length, d.magnitudes);
    }
    println!("written to {}", out.display());
    Ok(())
}
