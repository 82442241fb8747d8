//! Acceptance gate: twelve numbered behavioral guarantees, one test each.
//!
//! Every test prints exactly one `criterion N: PASS/FAIL — detail` line, so
//! `cargo test --test acceptance -- --nocapture` reads as a checklist. The
//! tests share a lock: several measure wall-clock time or allocate large
//! matrices, and interleaving them would distort both.

use std::fs;
use std::process::Command;
use std::sync::{Mutex, MutexGuard};

use rfa::embed::{
    init_noise, preset_config, rfa_embed, Activation, EmbeddingMatrix, Normalization, RfaConfig,
};
use rfa::eval::{align_labels, load_labels, ntos, run_protocol, LabelKind, LabelSet};
use rfa::generate::{gen_barbell, gen_erdos_renyi, gen_role_ring, gen_sbm};
use rfa::graph::{largest_connected_component, load_edge_list, Graph, LoadOptions};
use rfa::spectral::{
    build_propagator, dense_spectrum, gershgorin_interval, kernel_response,
    laplacian_identity_residual, spectrum_spread, FilterConfig, Spectrum,
};

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    // A failed criterion poisons the lock; the remaining criteria still run.
    LOCK.lock().unwrap_or_else(|p| p.into_inner())
}

/// Print the checklist line, then fail the test if the criterion does not hold.
fn check(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} — {detail}");
    assert!(pass, "criterion {criterion} failed — {detail}");
}

/// Largest connected component of an Erdős–Rényi sample: a random connected
/// graph with no isolated nodes, reproducible from the seed.
fn connected_fixture(n: usize, avg_deg: f64, seed: u64) -> Graph {
    let raw = gen_erdos_renyi(n, avg_deg, seed).expect("generator arguments are valid");
    let (lcc, _) = largest_connected_component(&raw);
    assert!(lcc.is_connected() && lcc.n() >= 3);
    lcc
}

/// Apply the filter spectrally: `y = U g(Λ)^power Uᵀ x`, with the
/// eigendecomposition taken at the filter's own τ. The sparse propagator
/// must agree with this dense reference.
fn dense_filter_apply(
    spec: &Spectrum,
    cfg: &FilterConfig,
    x: &EmbeddingMatrix,
    power: i32,
) -> EmbeddingMatrix {
    let n = x.rows();
    let d = x.cols();
    assert_eq!(spec.len(), n, "complete eigenbasis required");
    let mut coeffs = vec![0.0f64; n * d];
    for r in 0..n {
        let u = spec.eigenvector(r);
        let c = &mut coeffs[r * d..(r + 1) * d];
        for i in 0..n {
            let xi = x.row(i);
            let w = u[i];
            for k in 0..d {
                c[k] += w * xi[k];
            }
        }
    }
    let mut out = EmbeddingMatrix::zeros(n, d).unwrap();
    for r in 0..n {
        let gain = kernel_response(cfg, spec.eigenvalues[r]).powi(power);
        let u = spec.eigenvector(r);
        for i in 0..n {
            let row = out.row_mut(i);
            let w = gain * u[i];
            for k in 0..d {
                row[k] += w * coeffs[r * d + k];
            }
        }
    }
    out
}

fn max_abs_diff(a: &EmbeddingMatrix, b: &EmbeddingMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Eigenvalue gap below which two neighbors are treated as a degenerate
/// cluster when selecting "simple" eigenpairs. Near-degenerate eigenvectors
/// are numerically free to rotate inside their subspace, which inflates the
/// per-node identity residual, so the margin is deliberately generous.
const SIMPLE_GAP_TOL: f64 = 1e-4;

#[test]
fn criterion_01_barbell_top_eigenvector_levels() {
    let _g = serial();
    let graph = gen_barbell(6, 3).unwrap();
    let spec = dense_spectrum(&graph, 0.0).unwrap();
    let u = spec.eigenvector(14);

    // Orient so the ten clique-interior nodes carry the negative level.
    let s = if u[0] > 0.0 { -1.0 } else { 1.0 };
    let interior: Vec<f64> = [0usize, 1, 2, 3, 4, 10, 11, 12, 13, 14]
        .iter()
        .map(|&i| s * u[i])
        .collect();
    let gateways = [s * u[5], s * u[9]];

    let interior_flat = interior
        .iter()
        .all(|v| (v - interior[0]).abs() <= 1e-6);
    let gateway_flat = (gateways[0] - gateways[1]).abs() <= 1e-6;
    let rounded = (
        (interior[0] * 100.0).round() / 100.0,
        (gateways[0] * 100.0).round() / 100.0,
    );
    let pass = interior_flat && gateway_flat && rounded == (-0.02, 0.21);
    check(
        1,
        pass,
        &format!(
            "u_14 on B(6,3): interior level {:.6} across 10 nodes, gateway level {:.6}, \
             rounded ({:.2}, {:.2}) vs (-0.02, 0.21)",
            interior[0], gateways[0], rounded.0, rounded.1
        ),
    );
}

#[test]
fn criterion_02_barbell_fiedler_vector_separates_cliques() {
    let _g = serial();
    let graph = gen_barbell(6, 3).unwrap();
    let spec = dense_spectrum(&graph, 0.0).unwrap();
    assert!(spec.eigenvalues[1] > 1e-9, "second eigenvalue is nonzero");
    let u = spec.eigenvector(1);

    let left: Vec<f64> = (0..6).map(|i| u[i]).collect();
    let right: Vec<f64> = (9..15).map(|i| u[i]).collect();
    let separated = left.iter().all(|v| *v > 0.0) && right.iter().all(|v| *v < 0.0)
        || left.iter().all(|v| *v < 0.0) && right.iter().all(|v| *v > 0.0);

    let min_idx = (0..15)
        .min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
        .unwrap();
    let pass = separated && min_idx == 7;
    check(
        2,
        pass,
        &format!(
            "u_1 on B(6,3): cliques sign-separated = {separated}, minimum-magnitude entry at \
             node {min_idx} (|u| = {:.2e}, path midpoint expected)",
            u[min_idx].abs()
        ),
    );
}

#[test]
fn criterion_03_propagation_matches_dense_spectral_filtering() {
    let _g = serial();
    let mut worst_single = 0.0f64;
    let mut worst_kfold = 0.0f64;
    let mut graphs = 0;
    for seed in 0..20u64 {
        let graph = connected_fixture(120, 4.0, seed);
        assert!(graph.n() <= 200);
        graphs += 1;
        for tau in [0.0, 1.0, 20.0] {
            let spec = dense_spectrum(&graph, tau).unwrap();
            for high in [false, true] {
                let fcfg = if high {
                    FilterConfig::high_pass(tau)
                } else {
                    FilterConfig::low_pass(tau)
                };
                let prop = build_propagator(&graph, &fcfg).unwrap();
                let x = init_noise(graph.n(), 6, 1_000 + seed).unwrap();
                let sparse = prop.apply(&x).unwrap();
                let dense = dense_filter_apply(&spec, &fcfg, &x, 1);
                worst_single = worst_single.max(max_abs_diff(&sparse, &dense));

                // Three raw iterations through the full engine collapse to
                // the cubed kernel when activation and normalization are off.
                let rcfg = if high {
                    RfaConfig::high_pass(6, tau, 3)
                } else {
                    RfaConfig::low_pass(6, tau, 3)
                }
                .with_seed(2_000 + seed)
                .with_activation(Activation::None)
                .with_normalization(Normalization::None);
                let out = rfa_embed(&graph, &rcfg).unwrap();
                let z0 = init_noise(graph.n(), 6, 2_000 + seed).unwrap();
                let dense3 = dense_filter_apply(&spec, &fcfg, &z0, 3);
                worst_kfold = worst_kfold.max(max_abs_diff(&out.embedding, &dense3));
            }
        }
    }
    let pass = worst_single <= 1e-6 && worst_kfold <= 1e-5;
    check(
        3,
        pass,
        &format!(
            "{graphs} connected graphs × 2 filters × τ ∈ {{0,1,20}}: max |sparse − dense| = \
             {worst_single:.2e} (≤ 1e-6), max 3-fold deviation = {worst_kfold:.2e} (≤ 1e-5)"
        ),
    );
}

#[test]
fn criterion_04_gershgorin_containment_is_exact() {
    let _g = serial();
    let mut checked = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let mut scan = |graph: &Graph, tag: &str, taus: &[f64]| {
        for &tau in taus {
            let spec = dense_spectrum(graph, tau).unwrap();
            let (lo, hi) = gershgorin_interval(graph, tau);
            for &lam in &spec.eigenvalues {
                checked += 1;
                if !(lo <= lam && lam <= hi) {
                    violations.push(format!("{tag} τ={tau}: λ={lam:.17} ∉ [{lo:.17}, {hi:.17}]"));
                }
            }
        }
    };

    for seed in 0..20u64 {
        let graph = connected_fixture(120, 4.0, seed);
        scan(&graph, &format!("er-{seed}"), &[0.0, 1.0, 20.0]);
    }
    scan(&gen_barbell(6, 3).unwrap(), "barbell", &[0.0, 1.0, 5.0, 10.0, 50.0, 100.0]);
    for k in 0..10u64 {
        let graph = connected_fixture(60, 4.0, 100 + k);
        scan(&graph, &format!("small-{k}"), &[0.0]);
    }

    let pass = violations.is_empty();
    check(
        4,
        pass,
        &format!(
            "{checked} eigenvalues across every tested graph/τ pair inside [1−r, 1+r] with zero \
             tolerance{}",
            if pass {
                String::new()
            } else {
                format!("; violations: {}", violations.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_05_degree_correction_compresses_the_spectrum() {
    let _g = serial();
    let graph = gen_barbell(6, 3).unwrap();
    let taus = [0.0, 1.0, 5.0, 10.0, 50.0, 100.0];
    let spreads: Vec<f64> = taus
        .iter()
        .map(|&tau| spectrum_spread(&dense_spectrum(&graph, tau).unwrap()))
        .collect();
    let monotone = spreads.windows(2).all(|w| w[1] <= w[0]);
    let collapsed = spreads[5] < 0.2 * spreads[0];
    check(
        5,
        monotone && collapsed,
        &format!(
            "B(6,3) spread over τ = {taus:?}: {spreads:.4?}; non-increasing = {monotone}, \
             spread(τ=100) = {:.4} < 20% of spread(τ=0) = {:.4}",
            spreads[5],
            0.2 * spreads[0]
        ),
    );
}

#[test]
fn criterion_06_per_node_eigenpair_identity() {
    let _g = serial();
    let mut graphs: Vec<(String, Graph)> = vec![("barbell".into(), gen_barbell(6, 3).unwrap())];
    for k in 0..10u64 {
        let graph = connected_fixture(60, 4.0, 100 + k);
        assert!(graph.n() <= 100);
        graphs.push((format!("small-{k}"), graph));
    }

    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    let mut nodes = 0usize;
    for (_, graph) in &graphs {
        let spec = dense_spectrum(graph, 0.0).unwrap();
        for r in spec.simple_eigenvalue_indices(SIMPLE_GAP_TOL) {
            pairs += 1;
            let u = spec.eigenvector(r);
            let residuals = laplacian_identity_residual(&spec, graph, r).unwrap();
            for (i, res) in residuals.iter().enumerate() {
                if u[i].abs() > 1e-6 {
                    nodes += 1;
                    worst = worst.max(res.expect("defined wherever |u_i| > 1e-6"));
                }
            }
        }
    }
    let pass = worst <= 1e-6;
    check(
        6,
        pass,
        &format!(
            "{pairs} simple eigenpairs over {} graphs, {nodes} node identities: max residual \
             {worst:.2e} (≤ 1e-6)",
            graphs.len()
        ),
    );
}

#[test]
fn criterion_07_low_pass_wins_on_community_labels() {
    let _g = serial();
    let (graph, classes) = gen_sbm(&[100, 100, 100], 0.1, 0.01, 1).unwrap();
    let labels = LabelSet::multiclass(classes).unwrap();

    let low = RfaConfig::low_pass(128, 20.0, 10)
        .with_seed(7)
        .with_activation(Activation::Tanh)
        .with_normalization(Normalization::ZscoreCol);
    let high = RfaConfig::high_pass(128, 20.0, 10)
        .with_seed(7)
        .with_activation(Activation::Exp)
        .with_normalization(Normalization::ZscoreCol);

    let emb_low = rfa_embed(&graph, &low).unwrap().embedding;
    let emb_high = rfa_embed(&graph, &high).unwrap().embedding;
    let micro_low = run_protocol(&emb_low, &labels, 10, 0.2, 123).unwrap().micro_f1.mean;
    let micro_high = run_protocol(&emb_high, &labels, 10, 0.2, 123).unwrap().micro_f1.mean;

    let pass = micro_low >= 0.90 && micro_low - micro_high >= 0.10;
    check(
        7,
        pass,
        &format!(
            "SBM(3×100): smooth filter micro-F1 {micro_low:.4} (≥ 0.90 required), sharp filter \
             {micro_high:.4}, margin {:.4} (≥ 0.10 required)",
            micro_low - micro_high
        ),
    );
}

/// Guards the sharp filter's advantage on structural-role labels.
///
/// Known sensitivity: with column standardization applied inside every
/// iteration, strong degree correction (τ = 20) leaves the hub/leaf contrast
/// encoded mostly in column dispersion, which the standardization rescales
/// away. On this fixture the pinned configuration plateaus near 0.87
/// micro-F1 — below the 0.95 floor asserted here. The assertion is kept as
/// stated rather than tuned to pass; the printed line carries the measured
/// scores. Moving the standardization after the final iteration, or dropping
/// τ toward 0, pushes the same pipeline above 0.99 on this fixture.
#[test]
fn criterion_08_high_pass_wins_on_role_labels() {
    let _g = serial();
    let (graph, roles) = gen_role_ring(50, 5).unwrap();
    let labels = LabelSet::multiclass(roles).unwrap();

    let high = RfaConfig::high_pass(64, 20.0, 3)
        .with_seed(7)
        .with_activation(Activation::Exp)
        .with_normalization(Normalization::ZscoreCol);
    let low = RfaConfig::low_pass(64, 20.0, 3)
        .with_seed(7)
        .with_activation(Activation::Tanh)
        .with_normalization(Normalization::ZscoreCol);

    let emb_high = rfa_embed(&graph, &high).unwrap().embedding;
    let emb_low = rfa_embed(&graph, &low).unwrap().embedding;
    let micro_high = run_protocol(&emb_high, &labels, 10, 0.2, 123).unwrap().micro_f1.mean;
    let micro_low = run_protocol(&emb_low, &labels, 10, 0.2, 123).unwrap().micro_f1.mean;

    let pass = micro_high >= 0.95 && micro_high > micro_low;
    check(
        8,
        pass,
        &format!(
            "role-ring(50,5): sharp filter micro-F1 {micro_high:.4} (≥ 0.95 required), smooth \
             filter {micro_low:.4} (must be exceeded)"
        ),
    );
}

#[test]
fn criterion_09_embedding_scales_linearly() {
    let _g = serial();
    let cfg = RfaConfig::low_pass(64, 20.0, 10).with_seed(0);

    let t_small = {
        let graph = gen_erdos_renyi(100_000, 10.0, 42).unwrap();
        rfa_embed(&graph, &cfg).unwrap().loop_seconds
    };
    let t_large = {
        let graph = gen_erdos_renyi(1_000_000, 10.0, 42).unwrap();
        rfa_embed(&graph, &cfg).unwrap().loop_seconds
    };

    let ratio = t_large / t_small;
    let pass = ratio <= 15.0 && t_small > 0.0;
    check(
        9,
        pass,
        &format!(
            "d̄=10, d=64, K=10: {t_small:.2}s at n=10⁵, {t_large:.2}s at n=10⁶ — ratio \
             {ratio:.1}× for 10× nodes (≤ 15 required)"
        ),
    );
}

#[test]
fn criterion_10_trade_off_score_hand_example() {
    let _g = serial();
    let scores = ntos(&[1.0, 5.0, 10.0], &[0.4, 0.6, 0.8]).unwrap();
    let expected = [0.0, 0.2778, 0.0];
    let hand_ok = scores
        .iter()
        .zip(expected)
        .all(|(s, e)| (s - e).abs() <= 1e-4);

    // Extremal exactness: a method best on both axes scores exactly 1,
    // a method worst on either axis scores exactly 0.
    let extremal = ntos(&[1.0, 2.0], &[0.9, 0.1]).unwrap();
    let extremal_ok = extremal[0] == 1.0 && extremal[1] == 0.0;

    check(
        10,
        hand_ok && extremal_ok,
        &format!(
            "hand example → {scores:.4?} vs {expected:?} (±1e-4); extremal pair → \
             [{}, {}] exactly",
            extremal[0], extremal[1]
        ),
    );
}

#[test]
fn criterion_11_embed_command_is_byte_deterministic() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_rfa");
    let edges = dir.path().join("er.edges");

    let out = Command::new(bin)
        .args([
            "gen", "er", "--n", "2000", "--avg-deg", "8", "--seed", "3",
            "--out", edges.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut outputs = Vec::new();
    for (name, threads) in [("t1.csv", "1"), ("t2.csv", "2"), ("t4.csv", "4"), ("again.csv", "2")] {
        let path = dir.path().join(name);
        let out = Command::new(bin)
            .args([
                "embed", "--input", edges.to_str().unwrap(), "--filter", "high",
                "--dim", "32", "--tau", "1", "--iters", "5", "--seed", "7",
                "--threads", threads, "--out", path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read(&path).unwrap());
    }
    let pass = outputs[0] == outputs[1] && outputs[0] == outputs[2] && outputs[1] == outputs[3];
    check(
        11,
        pass,
        &format!(
            "embed at --threads 1/2/4 plus a repeated run: {} bytes, all byte-identical = {pass}",
            outputs[0].len()
        ),
    );
}

/// Reproduction against a user-supplied airport-network dataset: set
/// `RFA_EUROPE_EDGES` and `RFA_EUROPE_LABELS` to the edge-list and label
/// files, then run with `--ignored`.
#[test]
#[ignore = "requires a user-supplied dataset: set RFA_EUROPE_EDGES and RFA_EUROPE_LABELS"]
fn criterion_12_europe_airports_band() {
    let _g = serial();
    let edges_path = std::env::var("RFA_EUROPE_EDGES").expect(
        "set RFA_EUROPE_EDGES to the europe-airports edge list (node pairs, whitespace separated)",
    );
    let labels_path = std::env::var("RFA_EUROPE_LABELS")
        .expect("set RFA_EUROPE_LABELS to the matching `node_id label` file");

    let (graph, mut ids) = load_edge_list(&edges_path, LoadOptions::default()).unwrap();
    let graph = if graph.is_connected() {
        graph
    } else {
        let (lcc, map) = largest_connected_component(&graph);
        ids = map
            .extracted_old_ids()
            .iter()
            .map(|&old| ids[old as usize])
            .collect();
        lcc
    };

    let cfg = preset_config("europe").unwrap();
    let embedding = rfa_embed(&graph, &cfg).unwrap().embedding;
    let raw = load_labels(&labels_path, LabelKind::Multiclass).unwrap();
    let labels = align_labels(&raw, &ids).unwrap();
    let report = run_protocol(&embedding, &labels, 10, 0.2, 0).unwrap();

    let micro = report.micro_f1.mean;
    let pass = (0.5166..=0.6166).contains(&micro);
    check(
        12,
        pass,
        &format!("europe airports micro-F1 {micro:.4} vs band [0.5166, 0.6166] (56.66 ± 5pp)"),
    );
}
