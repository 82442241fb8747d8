//! Command-line binding of the library: graph generation, embedding,
//! spectral diagnostics, downstream evaluation, and the scalability
//! benchmark.
//!
//! Every run writes a JSON manifest next to its main output
//! (`<out>.manifest.json`, or `manifest.json` inside an output directory)
//! recording the command, the fully resolved configuration, SHA-256
//! digests of the input files, the seed, and per-phase wall-clock timings.
//! Re-running a command with its manifest's configuration reproduces the
//! output byte for byte.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numeric
//! error.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::embed::{
    preset_config, Activation, EmbeddingMatrix, Normalization, RfaConfig, PRESET_NAMES,
};
use crate::error::{Error, Result};
use crate::eval::{
    align_labels, load_labels, run_protocol, save_multiclass_labels, LabelKind,
};
use crate::generate::{gen_barbell, gen_erdos_renyi, gen_role_ring, gen_sbm};
use crate::graph::{
    largest_connected_component, load_edge_list, save_edge_list, Graph, IndexBase, LoadOptions,
};
use crate::spectral::{dense_spectrum, gershgorin_interval, spectrum_spread};

/// Training-free node embeddings from degree-corrected spectral
/// propagation of random noise.
#[derive(Debug, Parser)]
#[command(name = "rfa", version, about)]
pub struct Cli {
    /// Worker threads (0 = one per core). Output never depends on this.
    #[arg(long, global = true, env = "RFA_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic graph (and labels, where the model has them).
    Gen(GenArgs),
    /// Embed a graph from an edge-list file.
    Embed(EmbedArgs),
    /// Dense spectral diagnostics over a sweep of degree corrections.
    Spectrum(SpectrumArgs),
    /// Evaluate an embedding by downstream classification.
    Eval(EvalArgs),
    /// Scalability benchmark over a sweep of graph sizes.
    Bench(BenchArgs),
}

/// Shared flags for commands that read an edge-list file.
#[derive(Debug, Args)]
pub struct LoadArgs {
    /// Input edge-list file (`u v` per line, `#` comments).
    #[arg(long)]
    pub input: PathBuf,

    /// Treat input node ids as starting at 1 instead of 0.
    #[arg(long)]
    pub one_indexed: bool,

    /// Skip malformed lines instead of failing on them.
    #[arg(long)]
    pub lenient: bool,
}

impl LoadArgs {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            base: if self.one_indexed {
                IndexBase::One
            } else {
                IndexBase::Zero
            },
            strict: !self.lenient,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub model: GenModel,
}

#[derive(Debug, Subcommand)]
pub enum GenModel {
    /// Two n-cliques joined by a path of c nodes (deterministic).
    Barbell {
        /// Clique size n ≥ 3.
        #[arg(long)]
        n: usize,
        /// Path length c ≥ 1.
        #[arg(long)]
        c: usize,
        /// Output edge-list path.
        #[arg(long, default_value = "barbell.edges")]
        out: PathBuf,
    },
    /// Erdős–Rényi graph with a constant expected average degree.
    Er {
        /// Node count.
        #[arg(long)]
        n: usize,
        /// Expected average degree (0 < avg ≤ n−1).
        #[arg(long)]
        avg_deg: f64,
        /// Generation seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output edge-list path.
        #[arg(long, default_value = "er.edges")]
        out: PathBuf,
    },
    /// Planted-partition block model; writes a block-label file too.
    Sbm {
        /// Comma-separated block sizes, e.g. 100,100,100.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        /// Within-block edge probability.
        #[arg(long)]
        pin: f64,
        /// Between-block edge probability.
        #[arg(long)]
        pout: f64,
        /// Generation seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output edge-list path.
        #[arg(long, default_value = "sbm.edges")]
        out: PathBuf,
        /// Label-file path (default: out path with a .labels extension).
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Ring of hub nodes, each with pendant leaves; writes hub/leaf labels.
    RoleRing {
        /// Number of hubs on the ring.
        #[arg(long)]
        stars: usize,
        /// Leaves per hub.
        #[arg(long)]
        leaves: usize,
        /// Output edge-list path.
        #[arg(long, default_value = "role_ring.edges")]
        out: PathBuf,
        /// Label-file path (default: out path with a .labels extension).
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    /// Low-pass: smooth, position-flavored embeddings.
    Low,
    /// High-pass: sign-alternating, identity-flavored embeddings.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// `node_id,v0,...` text with lossless float formatting.
    Csv,
    /// Little-endian `n, d, n·d doubles`.
    Bin,
}

fn parse_activation(s: &str) -> Result<Activation> {
    s.parse()
}

fn parse_normalization(s: &str) -> Result<Normalization> {
    s.parse()
}

fn parse_label_kind(s: &str) -> Result<LabelKind> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub load: LoadArgs,

    /// Spectral filter direction.
    #[arg(long, value_enum, default_value_t = FilterArg::Low)]
    pub filter: FilterArg,

    /// Embedding dimensionality d.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,

    /// Degree-correction term τ ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,

    /// Propagation iterations K (0 = raw seeded noise).
    #[arg(long, default_value_t = 10)]
    pub iters: usize,

    /// Activation: tanh, exp, or none (default pairs with the filter:
    /// tanh for low, exp for high).
    #[arg(long, value_parser = parse_activation)]
    pub act: Option<Activation>,

    /// Normalization: l2_row, zscore_col, or none (default zscore_col).
    #[arg(long, value_parser = parse_normalization)]
    pub norm: Option<Normalization>,

    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Named preset; overrides filter/dim/tau/iters/act/norm.
    #[arg(long)]
    pub preset: Option<String>,

    /// Output embedding path.
    #[arg(long, default_value = "embedding.csv")]
    pub out: PathBuf,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub load: LoadArgs,

    /// Degree-correction values to sweep.
    #[arg(long, value_delimiter = ',', default_value = "0,1,5,10,50,100")]
    pub tau_list: Vec<f64>,

    /// Also write per-τ eigenvector matrices (`node_id,u0,...`).
    #[arg(long)]
    pub eigenvectors: bool,

    /// Output directory (created if missing).
    #[arg(long, default_value = "spectrum")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Embedding file produced by `embed`.
    #[arg(long)]
    pub embeddings: PathBuf,

    /// Embedding file format (binary carries no node ids; rows are taken
    /// as nodes 0..n−1).
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,

    /// Label file: `node_id label`, or `node_id l1,l2,...` for multilabel.
    #[arg(long)]
    pub labels: PathBuf,

    /// Task kind.
    #[arg(long, value_parser = parse_label_kind, default_value = "multiclass")]
    pub kind: LabelKind,

    /// Number of split/fit/score trials.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,

    /// Training fraction of the labeled nodes.
    #[arg(long, default_value_t = 0.2)]
    pub ratio: f64,

    /// Master seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output report path (JSON).
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated node counts to sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,

    /// Average degree of the generated graphs.
    #[arg(long, default_value_t = 10.0)]
    pub avg_deg: f64,

    /// Embedding dimensionality.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    /// Degree-correction term.
    #[arg(long, default_value_t = 20.0)]
    pub tau: f64,

    /// Propagation iterations.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,

    /// Spectral filter direction (activation pairs with it).
    #[arg(long, value_enum, default_value_t = FilterArg::Low)]
    pub filter: FilterArg,

    /// Seed for both generation and noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Repetitions per size; timings are averaged.
    #[arg(long, default_value_t = 5)]
    pub repeat: usize,

    /// Output CSV path.
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

/// One run's reproducibility record.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Subcommand that produced the outputs.
    pub command: String,
    /// Crate version that produced the outputs.
    pub artifact_version: String,
    /// Seed in effect, if the command uses one.
    pub seed: Option<u64>,
    /// Fully resolved configuration, all defaults materialized.
    pub config: serde_json::Value,
    /// Input path → SHA-256 digest of the file content.
    pub input_digests: BTreeMap<String, String>,
    /// Phase → wall-clock seconds.
    pub timings_sec: BTreeMap<String, f64>,
}

/// Parse the process arguments and run; returns the process exit code.
///
/// Usage errors exit 1 (including malformed flags), data and parse errors
/// exit 2, numeric errors exit 3 — see [`Error::exit_code`].
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; those print to stdout and
            // exit 0. Real usage errors exit 1 (not clap's default 2, the
            // exit-code contract reserves 2 for data errors).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Execute one parsed command.
pub fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        // Ignore the error from a pool that is already initialized (tests
        // call run() repeatedly in one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Embed(args) => run_embed(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Eval(args) => run_eval(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn run_gen(args: GenArgs) -> Result<()> {
    let started = Instant::now();
    let (name, graph, labels, seed, out, labels_out, config) = match args.model {
        GenModel::Barbell { n, c, out } => {
            let g = gen_barbell(n, c)?;
            let config = serde_json::json!({ "n": n, "c": c, "out": out });
            ("barbell", g, None, None, out, None, config)
        }
        GenModel::Er {
            n,
            avg_deg,
            seed,
            out,
        } => {
            let g = gen_erdos_renyi(n, avg_deg, seed)?;
            let config = serde_json::json!({ "n": n, "avg_deg": avg_deg, "out": out });
            ("er", g, None, Some(seed), out, None, config)
        }
        GenModel::Sbm {
            blocks,
            pin,
            pout,
            seed,
            out,
            labels_out,
        } => {
            let (g, classes) = gen_sbm(&blocks, pin, pout, seed)?;
            let labels_out = labels_out.unwrap_or_else(|| out.with_extension("labels"));
            let config = serde_json::json!({
                "blocks": blocks, "pin": pin, "pout": pout,
                "out": out, "labels_out": labels_out,
            });
            (
                "sbm",
                g,
                Some(classes),
                Some(seed),
                out,
                Some(labels_out),
                config,
            )
        }
        GenModel::RoleRing {
            stars,
            leaves,
            out,
            labels_out,
        } => {
            let (g, classes) = gen_role_ring(stars, leaves)?;
            let labels_out = labels_out.unwrap_or_else(|| out.with_extension("labels"));
            let config = serde_json::json!({
                "stars": stars, "leaves": leaves,
                "out": out, "labels_out": labels_out,
            });
            (
                "role-ring",
                g,
                Some(classes),
                None,
                out,
                Some(labels_out),
                config,
            )
        }
    };
    let generate_sec = started.elapsed().as_secs_f64();

    let write_started = Instant::now();
    save_edge_list(&graph, &out, None)?;
    if let (Some(classes), Some(labels_path)) = (&labels, &labels_out) {
        save_multiclass_labels(labels_path, classes)?;
    }
    let write_sec = write_started.elapsed().as_secs_f64();

    println!("n={} m={}", graph.n(), graph.m());
    let manifest = RunManifest {
        command: format!("gen {name}"),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config,
        input_digests: BTreeMap::new(),
        timings_sec: BTreeMap::from([
            ("generate".to_string(), generate_sec),
            ("write".to_string(), write_sec),
        ]),
    };
    write_manifest(&manifest_path(&out), &manifest)
}

fn run_embed(args: EmbedArgs) -> Result<()> {
    let load_started = Instant::now();
    let (full_graph, file_ids) = load_edge_list(&args.load.input, args.load.options())?;
    let load_sec = load_started.elapsed().as_secs_f64();

    let lcc_started = Instant::now();
    let (graph, row_ids, lcc_extracted) = extract_lcc_if_needed(full_graph, &file_ids);
    let lcc_sec = lcc_started.elapsed().as_secs_f64();

    let cfg = resolve_embed_config(&args)?;
    let output = crate::embed::rfa_embed(&graph, &cfg)?;
    println!("inference_sec={}", output.loop_seconds);

    let write_started = Instant::now();
    match args.format {
        FormatArg::Csv => output.embedding.write_csv(&args.out, Some(&row_ids))?,
        FormatArg::Bin => output.embedding.write_binary(&args.out)?,
    }
    let write_sec = write_started.elapsed().as_secs_f64();

    let manifest = RunManifest {
        command: "embed".to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: Some(cfg.seed),
        config: serde_json::json!({
            "input": args.load.input,
            "one_indexed": args.load.one_indexed,
            "lenient": args.load.lenient,
            "preset": args.preset,
            "embedding": cfg,
            "lcc_extracted": lcc_extracted,
            "nodes_embedded": graph.n(),
            "out": args.out,
            "format": match args.format {
                FormatArg::Csv => "csv",
                FormatArg::Bin => "bin",
            },
        }),
        input_digests: digest_inputs(&[&args.load.input])?,
        timings_sec: BTreeMap::from([
            ("load".to_string(), load_sec),
            ("lcc".to_string(), lcc_sec),
            ("inference".to_string(), output.loop_seconds),
            ("write".to_string(), write_sec),
        ]),
    };
    write_manifest(&manifest_path(&args.out), &manifest)
}

/// Extract the largest connected component when the graph is disconnected,
/// warning on stderr; returns the working graph, its per-row original
/// ids, and whether extraction happened.
fn extract_lcc_if_needed(graph: Graph, file_ids: &[u64]) -> (Graph, Vec<u64>, bool) {
    if graph.is_connected() {
        return (graph, file_ids.to_vec(), false);
    }
    let n_before = graph.n();
    let (sub, map) = largest_connected_component(&graph);
    eprintln!(
        "warning: input graph is disconnected ({} components); \
         embedding the largest connected component ({} of {} nodes)",
        map.num_components(),
        sub.n(),
        n_before,
    );
    let row_ids: Vec<u64> = map
        .extracted_old_ids()
        .into_iter()
        .map(|old| file_ids[old])
        .collect();
    (sub, row_ids, true)
}

/// Materialize the embedding configuration from flags or a preset.
fn resolve_embed_config(args: &EmbedArgs) -> Result<RfaConfig> {
    let mut cfg = match &args.preset {
        Some(name) => preset_config(name)?,
        None => {
            let mut cfg = match args.filter {
                FilterArg::Low => RfaConfig::low_pass(args.dim, args.tau, args.iters),
                FilterArg::High => RfaConfig::high_pass(args.dim, args.tau, args.iters),
            };
            if let Some(act) = args.act {
                cfg = cfg.with_activation(act);
            }
            if let Some(norm) = args.norm {
                cfg = cfg.with_normalization(norm);
            }
            cfg
        }
    };
    cfg.seed = args.seed;
    cfg.validate()?;
    Ok(cfg)
}

fn run_spectrum(args: SpectrumArgs) -> Result<()> {
    if args.tau_list.is_empty() {
        return Err(Error::InvalidParameter("empty tau list".into()));
    }
    let load_started = Instant::now();
    let (graph, file_ids) = load_edge_list(&args.load.input, args.load.options())?;
    let load_sec = load_started.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let sweep_started = Instant::now();
    let summary_path = args.out_dir.join("summary.csv");
    let mut summary =
        BufWriter::new(File::create(&summary_path).map_err(|e| Error::io(&summary_path, e))?);
    writeln!(summary, "tau,spread,gershgorin_radius")
        .map_err(|e| Error::io(&summary_path, e))?;
    for &tau in &args.tau_list {
        let spectrum = dense_spectrum(&graph, tau)?;
        let spread = spectrum_spread(&spectrum);
        let (lo, hi) = gershgorin_interval(&graph, tau);
        let radius = (hi - lo) / 2.0;

        let eig_path = args.out_dir.join(format!("eigenvalues_tau{tau}.csv"));
        let mut w =
            BufWriter::new(File::create(&eig_path).map_err(|e| Error::io(&eig_path, e))?);
        (|| -> std::io::Result<()> {
            writeln!(w, "index,eigenvalue")?;
            for (r, lambda) in spectrum.eigenvalues.iter().enumerate() {
                writeln!(w, "{r},{lambda}")?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(&eig_path, e))?;

        if args.eigenvectors {
            let vec_path = args.out_dir.join(format!("eigenvectors_tau{tau}.csv"));
            write_eigenvectors(&vec_path, &spectrum.eigenvectors, &file_ids)?;
        }

        writeln!(summary, "{tau},{spread},{radius}")
            .map_err(|e| Error::io(&summary_path, e))?;
        println!("tau={tau} spread={spread} gershgorin_radius={radius}");
    }
    summary.flush().map_err(|e| Error::io(&summary_path, e))?;
    let sweep_sec = sweep_started.elapsed().as_secs_f64();

    let manifest = RunManifest {
        command: "spectrum".to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: None,
        config: serde_json::json!({
            "input": args.load.input,
            "one_indexed": args.load.one_indexed,
            "lenient": args.load.lenient,
            "tau_list": args.tau_list,
            "eigenvectors": args.eigenvectors,
            "out_dir": args.out_dir,
        }),
        input_digests: digest_inputs(&[&args.load.input])?,
        timings_sec: BTreeMap::from([
            ("load".to_string(), load_sec),
            ("sweep".to_string(), sweep_sec),
        ]),
    };
    write_manifest(&args.out_dir.join("manifest.json"), &manifest)
}

/// Write an eigenvector matrix node-major: row per node, column r holds
/// the node's entry in eigenvector r.
fn write_eigenvectors(path: &Path, vectors: &EmbeddingMatrix, ids: &[u64]) -> Result<()> {
    let n = vectors.rows();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write!(w, "node_id")?;
        for r in 0..n {
            write!(w, ",u{r}")?;
        }
        writeln!(w)?;
        for i in 0..n {
            write!(w, "{}", ids[i])?;
            for r in 0..n {
                // Eigenvectors are stored one per row; transpose on the way
                // out so readers get one row per node.
                write!(w, ",{}", vectors.get(r, i))?;
            }
            writeln!(w)?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let load_started = Instant::now();
    let (embedding, row_ids) = match args.format {
        FormatArg::Csv => EmbeddingMatrix::read_csv(&args.embeddings)?,
        FormatArg::Bin => {
            let m = EmbeddingMatrix::read_binary(&args.embeddings)?;
            let ids = (0..m.rows() as u64).collect();
            (m, ids)
        }
    };
    let raw = load_labels(&args.labels, args.kind)?;
    let labels = align_labels(&raw, &row_ids)?;
    let load_sec = load_started.elapsed().as_secs_f64();

    let protocol_started = Instant::now();
    let report = run_protocol(&embedding, &labels, args.trials, args.ratio, args.seed)?;
    let protocol_sec = protocol_started.elapsed().as_secs_f64();

    let json = serde_json::to_string_pretty(&report)
        .expect("report serialization cannot fail");
    fs::write(&args.out, json).map_err(|e| Error::io(&args.out, e))?;
    println!(
        "micro_f1 mean={} std={}\nmacro_f1 mean={} std={}",
        report.micro_f1.mean, report.micro_f1.std, report.macro_f1.mean, report.macro_f1.std
    );

    let manifest = RunManifest {
        command: "eval".to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: Some(args.seed),
        config: serde_json::json!({
            "embeddings": args.embeddings,
            "format": match args.format {
                FormatArg::Csv => "csv",
                FormatArg::Bin => "bin",
            },
            "labels": args.labels,
            "kind": args.kind.to_string(),
            "trials": args.trials,
            "ratio": args.ratio,
            "out": args.out,
        }),
        input_digests: digest_inputs(&[&args.embeddings, &args.labels])?,
        timings_sec: BTreeMap::from([
            ("load".to_string(), load_sec),
            ("protocol".to_string(), protocol_sec),
        ]),
    };
    write_manifest(&manifest_path(&args.out), &manifest)
}

fn run_bench(args: BenchArgs) -> Result<()> {
    if args.n_list.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    if args.repeat == 0 {
        return Err(Error::InvalidParameter("repeat must be ≥ 1".into()));
    }
    let started = Instant::now();
    let file = File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "n,m,gen_sec,embed_sec").map_err(|e| Error::io(&args.out, e))?;
    println!("n,m,gen_sec,embed_sec");
    for &n in &args.n_list {
        match bench_one(&args, n) {
            Ok((m, gen_sec, embed_sec)) => {
                writeln!(w, "{n},{m},{gen_sec},{embed_sec}")
                    .map_err(|e| Error::io(&args.out, e))?;
                println!("{n},{m},{gen_sec},{embed_sec}");
            }
            Err(e) => {
                // A size that fails (e.g. out of memory) is recorded and
                // the sweep moves on to the remaining sizes.
                eprintln!("warning: n={n} failed: {e}");
                writeln!(w, "{n},ERROR,ERROR,ERROR").map_err(|e| Error::io(&args.out, e))?;
                println!("{n},ERROR,ERROR,ERROR");
            }
        }
    }
    w.flush().map_err(|e| Error::io(&args.out, e))?;

    let manifest = RunManifest {
        command: "bench".to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: Some(args.seed),
        config: serde_json::json!({
            "n_list": args.n_list,
            "avg_deg": args.avg_deg,
            "dim": args.dim,
            "tau": args.tau,
            "iters": args.iters,
            "filter": match args.filter {
                FilterArg::Low => "low",
                FilterArg::High => "high",
            },
            "repeat": args.repeat,
            "out": args.out,
        }),
        input_digests: BTreeMap::new(),
        timings_sec: BTreeMap::from([("total".to_string(), started.elapsed().as_secs_f64())]),
    };
    write_manifest(&manifest_path(&args.out), &manifest)
}

/// Generate+embed one size `repeat` times; returns (m, mean generation
/// seconds, mean inference seconds). Every repetition reuses the same
/// seeds, so the graph and the embedding are identical across reps.
fn bench_one(args: &BenchArgs, n: usize) -> Result<(usize, f64, f64)> {
    let cfg = match args.filter {
        FilterArg::Low => RfaConfig::low_pass(args.dim, args.tau, args.iters),
        FilterArg::High => RfaConfig::high_pass(args.dim, args.tau, args.iters),
    }
    .with_seed(args.seed);
    let mut m = 0usize;
    let mut gen_total = 0.0;
    let mut embed_total = 0.0;
    for _ in 0..args.repeat {
        let gen_started = Instant::now();
        let graph = gen_erdos_renyi(n, args.avg_deg, args.seed)?;
        gen_total += gen_started.elapsed().as_secs_f64();
        m = graph.m();
        let output = crate::embed::rfa_embed(&graph, &cfg)?;
        embed_total += output.loop_seconds;
    }
    Ok((
        m,
        gen_total / args.repeat as f64,
        embed_total / args.repeat as f64,
    ))
}

/// `<out>.manifest.json` next to the main output file.
fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let json =
        serde_json::to_string_pretty(manifest).expect("manifest serialization cannot fail");
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// SHA-256 digests of the input files, keyed by their given paths.
fn digest_inputs(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    let mut digests = BTreeMap::new();
    for &path in paths {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let hex: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        digests.insert(path.display().to_string(), hex);
    }
    Ok(digests)
}

/// List the built-in preset names (used by `--preset` error messages and
/// the library examples).
pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_documented_invocations() {
        for argv in [
            vec!["rfa", "gen", "barbell", "--n", "6", "--c", "3"],
            vec!["rfa", "gen", "er", "--n", "1000", "--avg-deg", "10", "--seed", "7"],
            vec![
                "rfa", "gen", "sbm", "--blocks", "100,100,100", "--pin", "0.1", "--pout",
                "0.01", "--seed", "1",
            ],
            vec!["rfa", "gen", "role-ring", "--stars", "50", "--leaves", "5"],
            vec!["rfa", "embed", "--input", "g.edges", "--filter", "high", "--dim", "64"],
            vec!["rfa", "embed", "--input", "g.edges", "--preset", "europe"],
            vec!["rfa", "spectrum", "--input", "g.edges", "--tau-list", "0,1,5"],
            vec![
                "rfa", "eval", "--embeddings", "e.csv", "--labels", "l.txt", "--kind",
                "multilabel",
            ],
            vec!["rfa", "bench", "--n-list", "100,1000", "--repeat", "2"],
            vec!["rfa", "--threads", "2", "embed", "--input", "g.edges"],
        ] {
            Cli::try_parse_from(&argv).unwrap_or_else(|e| panic!("{argv:?}: {e}"));
        }
    }

    #[test]
    fn cli_rejects_bad_flag_values() {
        assert!(Cli::try_parse_from(["rfa", "embed"]).is_err(), "missing --input");
        assert!(
            Cli::try_parse_from(["rfa", "embed", "--input", "g", "--act", "sigmoid"]).is_err()
        );
        assert!(
            Cli::try_parse_from(["rfa", "eval", "--embeddings", "e", "--labels", "l", "--kind", "x"])
                .is_err()
        );
        assert!(Cli::try_parse_from(["rfa", "gen", "sbm", "--pin", "0.1"]).is_err());
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("out/emb.csv")),
            Path::new("out/emb.csv.manifest.json")
        );
        assert_eq!(
            manifest_path(Path::new("bench.csv")),
            Path::new("bench.csv.manifest.json")
        );
    }

    #[test]
    fn sha256_digest_matches_known_vector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abc.txt");
        fs::write(&path, "abc").unwrap();
        let digests = digest_inputs(&[path.as_path()]).unwrap();
        assert_eq!(
            digests.values().next().unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn embed_config_resolution_prefers_preset() {
        let args = Cli::try_parse_from([
            "rfa", "embed", "--input", "g.edges", "--preset", "europe", "--dim", "999",
            "--seed", "42",
        ])
        .unwrap();
        let Command::Embed(embed) = args.command else {
            panic!("expected embed");
        };
        let cfg = resolve_embed_config(&embed).unwrap();
        assert_eq!(cfg.dim, 64, "preset wins over --dim");
        assert_eq!(cfg.iters, 3);
        assert_eq!(cfg.filter.tau, 20.0);
        assert_eq!(cfg.seed, 42, "seed is not part of the preset");
    }

    #[test]
    fn embed_config_defaults_pair_with_filter() {
        let args =
            Cli::try_parse_from(["rfa", "embed", "--input", "g.edges", "--filter", "high"])
                .unwrap();
        let Command::Embed(embed) = args.command else {
            panic!("expected embed");
        };
        let cfg = resolve_embed_config(&embed).unwrap();
        assert_eq!(cfg.activation, Activation::Exp);
        assert_eq!(cfg.normalization, Normalization::ZscoreCol);
        assert_eq!(cfg.filter.alpha, -1.0);
    }
}
