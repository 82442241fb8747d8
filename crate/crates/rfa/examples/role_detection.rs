//! Structural-role classification on a ring of stars: where the sharp
//! filter wins, and where its signal is fragile.
//!
//! Every hub looks like every other hub (degree 7), every leaf like every
//! other leaf (degree 1), but hubs on opposite sides of the ring are many
//! hops apart. Position-style embeddings cannot group them; identity-style
//! (sharp-filtered) embeddings can.
//!
//! The second half of the demo shows a real sensitivity: strong degree
//! correction (large τ) flattens the degree contrast the sharp filter
//! feeds on, and per-iteration column standardization rescales away much of
//! what remains — the measured scores below put numbers on that.
//!
//! Run with `cargo run --example role_detection`.

use rfa::embed::{rfa_embed, RfaConfig};
use rfa::eval::{run_protocol, LabelSet};
use rfa::generate::gen_role_ring;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (graph, roles) = gen_role_ring(50, 5)?;
    println!(
        "role ring: {} nodes ({} hubs, {} leaves), {} edges",
        graph.n(),
        roles.iter().filter(|&&r| r == 0).count(),
        roles.iter().filter(|&&r| r == 1).count(),
        graph.m()
    );
    let labels = LabelSet::multiclass(roles)?;

    let score = |tag: &str, cfg: &RfaConfig| -> Result<f64, Box<dyn std::error::Error>> {
        let emb = rfa_embed(&graph, cfg)?.embedding;
        let report = run_protocol(&emb, &labels, 10, 0.2, 123)?;
        println!(
            "{tag:>28}: micro-F1 {:.4} ± {:.4}",
            report.micro_f1.mean, report.micro_f1.std
        );
        Ok(report.micro_f1.mean)
    };

    // Head-to-head at a strongly corrected setting (τ = 20).
    let sharp_20 = RfaConfig::high_pass(64, 20.0, 3).with_seed(7);
    let smooth_20 = RfaConfig::low_pass(64, 20.0, 3).with_seed(7);
    let s_sharp = score("sharp, τ=20", &sharp_20)?;
    let s_smooth = score("smooth, τ=20", &smooth_20)?;
    println!(
        "  → sharp beats smooth on roles ({:.4} vs {:.4}), but neither is clean at τ=20\n",
        s_sharp, s_smooth
    );

    // The same sharp pipeline with the correction turned off: the raw
    // degree contrast comes back and the task becomes near-trivial.
    let sharp_0 = RfaConfig::high_pass(64, 0.0, 3).with_seed(7);
    score("sharp, τ=0", &sharp_0)?;

    // Depth matters too: a single sharp pass barely beats guessing the
    // majority class (250 of the 300 nodes are leaves → 0.8333 for free);
    // the role signal needs a few rounds of contrast to build up.
    let sharp_one = RfaConfig::high_pass(64, 0.0, 1).with_seed(7);
    score("sharp, τ=0, single pass", &sharp_one)?;

    println!(
        "\nTakeaway: the sharp filter carries the role signal, and the degree\n\
         correction that stabilizes community tasks actively hurts here —\n\
         pick τ per task, not globally."
    );
    Ok(())
}
