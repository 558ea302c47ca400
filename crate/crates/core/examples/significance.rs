//! Query-level correlation between two metrics and a paired t-test with
//! Bonferroni adjustment.
//!
//!     cargo run --example significance

use texfair::analysis::{bonferroni, paired_t_test, pearson};

fn main() -> texfair::Result<()> {
    let texfair = [0.91, 0.72, 0.85, 0.64, 0.99, 0.78];
    let nfairr = [0.88, 0.70, 0.90, 0.61, 0.97, 0.74];
    let c = pearson(&texfair, &nfairr)?;
    println!("pearson r {:.4}, p {:.4}, n {}", c.r.unwrap(), c.p_value.unwrap(), c.n);

    let other = [0.85, 0.70, 0.80, 0.66, 0.93, 0.70];
    let t = paired_t_test(&texfair, &other)?;
    println!("paired t {:.4}, p {:?}", t.t.unwrap(), t.p_value);
    let adjusted = bonferroni(&[t.p_value.unwrap()], 3);
    println!("bonferroni over 3 comparisons: {:.4}", adjusted[0]);
    Ok(())
}
