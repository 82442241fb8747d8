//! Node classification on planted communities: the smooth filter is the
//! right tool, and the evaluation harness quantifies by how much.
//!
//! A stochastic block model hides three communities in edge density alone.
//! Smooth-filtered noise mixes along edges, so each community drifts toward
//! its own region of embedding space; sharp-filtered noise amplifies local
//! degree contrast instead, which carries no community signal here.
//!
//! Run with `cargo run --example classify_communities`.

use rfa::embed::{rfa_embed, RfaConfig};
use rfa::eval::{run_protocol, LabelSet};
use rfa::generate::gen_sbm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (graph, blocks) = gen_sbm(&[100, 100, 100], 0.1, 0.01, 1)?;
    println!(
        "SBM: {} nodes, {} edges, 3 planted blocks of 100",
        graph.n(),
        graph.m()
    );
    let labels = LabelSet::multiclass(blocks)?;

    // Same dimensions, same seed, same iteration count — only the filter
    // (and its natural activation) differs.
    let smooth = RfaConfig::low_pass(128, 20.0, 10).with_seed(7);
    let sharp = RfaConfig::high_pass(128, 20.0, 10).with_seed(7);

    for (tag, cfg) in [("smooth (position)", smooth), ("sharp (identity)", sharp)] {
        let out = rfa_embed(&graph, &cfg)?;
        // Protocol: 10 independent trials; each samples a stratified 20%
        // training split, fits a linear classifier, and scores the rest.
        let report = run_protocol(&out.embedding, &labels, 10, 0.2, 123)?;
        println!(
            "{tag:>18}: micro-F1 {:.4} ± {:.4}, macro-F1 {:.4} ± {:.4}  (embedded in {:.3}s)",
            report.micro_f1.mean,
            report.micro_f1.std,
            report.macro_f1.mean,
            report.macro_f1.std,
            out.loop_seconds,
        );
    }

    println!("\nOn community labels the smooth filter should win by a wide margin.");
    Ok(())
}
