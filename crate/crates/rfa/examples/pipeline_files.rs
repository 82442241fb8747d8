//! The full file-based pipeline: edge list in, embedding and evaluation
//! report out — with every round-trip checked bitwise.
//!
//! This is the library view of what the `rfa` binary's `gen → embed →
//! eval` chain does, including the two embedding file formats and the
//! label file format.
//!
//! Run with `cargo run --example pipeline_files`.

use rfa::embed::{rfa_embed, EmbeddingMatrix, RfaConfig};
use rfa::eval::{align_labels, load_labels, run_protocol, save_multiclass_labels, LabelKind};
use rfa::generate::gen_sbm;
use rfa::graph::{load_edge_list, save_edge_list, LoadOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let edges_path = dir.path().join("graph.edges");
    let labels_path = dir.path().join("graph.labels");
    let csv_path = dir.path().join("embedding.csv");
    let bin_path = dir.path().join("embedding.bin");
    let report_path = dir.path().join("report.json");

    // 1. Generate and persist a labeled graph.
    let (graph, blocks) = gen_sbm(&[80, 80], 0.1, 0.01, 5)?;
    save_edge_list(&graph, &edges_path, None)?;
    save_multiclass_labels(&labels_path, &blocks)?;
    println!("wrote {} edges to {}", graph.m(), edges_path.display());

    // 2. Load it back. The loader accepts arbitrary (even non-contiguous)
    //    node ids and returns the id of each compact row alongside the graph.
    let (loaded, ids) = load_edge_list(&edges_path, LoadOptions::default())?;
    assert_eq!((loaded.n(), loaded.m()), (graph.n(), graph.m()));
    println!("loaded back: {} nodes, {} edges", loaded.n(), loaded.m());

    // 3. Embed, then persist as both CSV (portable, node ids in the first
    //    column) and the binary format (compact, exact doubles).
    let cfg = RfaConfig::low_pass(32, 5.0, 5).with_seed(9);
    let embedding = rfa_embed(&loaded, &cfg)?.embedding;
    embedding.write_csv(&csv_path, Some(&ids))?;
    embedding.write_binary(&bin_path)?;

    let (from_csv, csv_ids) = EmbeddingMatrix::read_csv(&csv_path)?;
    let from_bin = EmbeddingMatrix::read_binary(&bin_path)?;
    assert_eq!(from_csv, embedding, "CSV round-trips the exact doubles");
    assert_eq!(from_bin, embedding, "binary round-trips the exact doubles");
    assert_eq!(csv_ids, ids);
    println!("CSV and binary formats round-trip bitwise ✓");

    // 4. Load labels, align them to the embedding's rows, and evaluate.
    let raw = load_labels(&labels_path, LabelKind::Multiclass)?;
    let labels = align_labels(&raw, &csv_ids)?;
    let report = run_protocol(&from_csv, &labels, 5, 0.2, 0)?;
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    println!(
        "evaluation: micro-F1 {:.4} ± {:.4} over {} trials → {}",
        report.micro_f1.mean,
        report.micro_f1.std,
        report.trials,
        report_path.display()
    );

    // 5. The report file parses back into the same structure.
    let parsed: rfa::eval::EvalReport =
        serde_json::from_str(&std::fs::read_to_string(&report_path)?)?;
    assert_eq!(parsed, report);
    println!("report JSON round-trips ✓");

    Ok(())
}
