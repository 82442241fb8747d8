//! Scoring the speed/quality trade-off across embedding configurations
//! with the normalized trade-off score (NToS).
//!
//! NToS min-max-normalizes inference time (inverted: fastest → 1) and
//! quality (highest → 1) across the methods being compared, then multiplies
//! the two. A method at 1.0 dominates both axes; a method slowest or worst
//! scores 0 regardless of the other axis.
//!
//! Run with `cargo run --example ntos_tradeoff`.

use rfa::embed::{rfa_embed, RfaConfig};
use rfa::eval::{ntos, run_protocol, LabelSet};
use rfa::generate::gen_sbm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A block model hard enough that extra propagation iterations actually
    // buy quality — otherwise there would be no trade-off to score.
    let (graph, blocks) = gen_sbm(&[150, 150, 150], 0.055, 0.02, 3)?;
    println!(
        "SBM: {} nodes, {} edges, 3 blocks, modest contrast\n",
        graph.n(),
        graph.m()
    );
    let labels = LabelSet::multiclass(blocks)?;

    let variants = [1usize, 4, 10, 25];
    let mut times = Vec::new();
    let mut qualities = Vec::new();
    for &iters in &variants {
        let cfg = RfaConfig::low_pass(64, 5.0, iters).with_seed(7);
        let out = rfa_embed(&graph, &cfg)?;
        let report = run_protocol(&out.embedding, &labels, 5, 0.2, 123)?;
        times.push(out.loop_seconds);
        qualities.push(report.micro_f1.mean);
    }

    let scores = ntos(&times, &qualities)?;
    println!(
        "{:>8} {:>12} {:>10} {:>8}",
        "iters", "time_sec", "micro-F1", "NToS"
    );
    for (((iters, t), q), s) in variants.iter().zip(&times).zip(&qualities).zip(&scores) {
        println!("{iters:>8} {t:>12.5} {q:>10.4} {s:>8.4}");
    }
    let best = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    println!(
        "\nbest trade-off: K = {} — more iterations than that buy little\n\
         quality for the extra propagation time",
        variants[best]
    );

    // The formula on paper-and-pencil numbers: the fastest method has the
    // worst quality and the best method is slowest, so both corners zero
    // out and only the middle method earns a score.
    let hand = ntos(&[1.0, 5.0, 10.0], &[0.4, 0.6, 0.8])?;
    println!(
        "\nhand example — times [1, 5, 10], qualities [0.4, 0.6, 0.8] → \
         [{:.4}, {:.4}, {:.4}]",
        hand[0], hand[1], hand[2]
    );
    Ok(())
}
