//! Downstream evaluation: label handling, train/test splits, logistic
//! regression, micro/macro F1, and the time-quality trade-off score.
//!
//! The protocol is the classic embedding benchmark loop: sample a stratified
//! train split, fit an L2-regularized logistic regression on the frozen
//! embeddings, score micro/macro F1 on the held-out nodes, repeat over
//! several seeds, and report means and standard deviations. Multi-class
//! tasks use one softmax model; multi-label tasks train one binary model
//! per label and predict, for each test node, the top-k labels by score
//! where k is that node's true label count.
//!
//! Everything is deterministic: splits come from a seeded generator,
//! classifiers start at zero weights and use a deterministic line-searched
//! gradient descent, and trials derive their seeds from the master seed.
//!
//! [`ntos`] computes the normalized trade-off score that combines inference
//! time ε and quality σ: with ε̃ = (ε_max−ε)/(ε_max−ε_min) and
//! σ̃ = (σ−σ_min)/(σ_max−σ_min), the score is ε̃·σ̃ — 1 for a method that is
//! both fastest and best, 0 for one that is slowest or worst.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Display;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Regularization weight on the classifier weights (never the bias).
pub const CLASSIFIER_L2: f64 = 1e-4;
/// Gradient-norm (Frobenius) stopping tolerance.
pub const CLASSIFIER_TOL: f64 = 1e-5;
/// Epoch cap for the full-batch descent.
pub const CLASSIFIER_MAX_EPOCHS: usize = 500;

/// Task discriminator: one label per node vs. a set per labeled node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Multiclass,
    Multilabel,
}

impl FromStr for LabelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiclass" => Ok(LabelKind::Multiclass),
            "multilabel" => Ok(LabelKind::Multilabel),
            other => Err(Error::InvalidParameter(format!(
                "unknown label kind '{other}' (expected multiclass or multilabel)"
            ))),
        }
    }
}

impl Display for LabelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LabelKind::Multiclass => "multiclass",
            LabelKind::Multilabel => "multilabel",
        })
    }
}

/// Node labels for one task, aligned to embedding rows.
///
/// Class ids are compact (`0..C−1`). Multiclass assigns exactly one label
/// to every node; multilabel assigns a non-empty sorted set to each
/// labeled node and leaves unlabeled nodes with an empty set (they are
/// excluded from splits and scoring).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    kind: LabelKind,
    /// Per node: sorted distinct class ids; empty = unlabeled.
    labels: Vec<Vec<u32>>,
    num_classes: usize,
    /// Compact class id → original label value (identity when constructed
    /// from already-compact ids).
    class_ids: Vec<u64>,
}

impl LabelSet {
    /// Multiclass labels from one compact class id per node.
    pub fn multiclass(class_of: Vec<u32>) -> Result<Self> {
        if class_of.is_empty() {
            return Err(Error::Data("label set covers zero nodes".into()));
        }
        let num_classes = *class_of.iter().max().unwrap() as usize + 1;
        let class_ids = (0..num_classes as u64).collect();
        Ok(LabelSet {
            kind: LabelKind::Multiclass,
            labels: class_of.into_iter().map(|c| vec![c]).collect(),
            num_classes,
            class_ids,
        })
    }

    /// Validated constructor from per-node label lists.
    pub fn new(kind: LabelKind, labels: Vec<Vec<u32>>, num_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Data("label set covers zero nodes".into()));
        }
        if num_classes == 0 {
            return Err(Error::Data("label set has zero classes".into()));
        }
        let mut labels = labels;
        for (i, set) in labels.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if kind == LabelKind::Multiclass && set.len() != 1 {
                return Err(Error::Data(format!(
                    "multiclass requires exactly one label per node, node {i} has {}",
                    set.len()
                )));
            }
            if set.last().is_some_and(|&c| c as usize >= num_classes) {
                return Err(Error::Data(format!(
                    "node {i} has label {} outside 0..{num_classes}",
                    set.last().unwrap()
                )));
            }
        }
        let class_ids = (0..num_classes as u64).collect();
        Ok(LabelSet {
            kind,
            labels,
            num_classes,
            class_ids,
        })
    }

    /// Task kind.
    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    /// Number of nodes the set is aligned to (labeled or not).
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct classes C.
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Sorted class ids of node `i`; empty when unlabeled.
    pub fn labels_of(&self, i: usize) -> &[u32] {
        &self.labels[i]
    }

    /// Whether node `i` carries at least one label.
    pub fn is_labeled(&self, i: usize) -> bool {
        !self.labels[i].is_empty()
    }

    /// Ids of labeled nodes, ascending.
    pub fn labeled_ids(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_labeled(i)).collect()
    }

    /// Compact class id → original label value from the source file.
    pub fn class_ids(&self) -> &[u64] {
        &self.class_ids
    }

    /// Per-class labeled-node counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for set in &self.labels {
            for &c in set {
                counts[c as usize] += 1;
            }
        }
        counts
    }
}

/// Labels exactly as read from a file, keyed by original node id, before
/// alignment to an embedding's node order.
#[derive(Debug, Clone)]
pub struct RawLabels {
    pub kind: LabelKind,
    /// `(node id, sorted distinct label values)` in file order.
    pub entries: Vec<(u64, Vec<u64>)>,
}

/// Parse a label file: one line per labeled node, `node_id label` for
/// multiclass or `node_id l1,l2,...` (comma-separated, no spaces) for
/// multilabel. Blank lines and lines starting with `#` are skipped.
pub fn load_labels(path: impl AsRef<Path>, kind: LabelKind) -> Result<RawLabels> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut entries: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(id_tok), Some(label_tok), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 'node_id labels', got '{trimmed}'"),
            ));
        };
        let id: u64 = id_tok.parse().map_err(|_| {
            Error::parse(path, lineno, format!("invalid node id '{id_tok}'"))
        })?;
        let mut values = Vec::new();
        for tok in label_tok.split(',') {
            let v: u64 = tok.parse().map_err(|_| {
                Error::parse(path, lineno, format!("invalid label '{tok}'"))
            })?;
            values.push(v);
        }
        if kind == LabelKind::Multiclass && values.len() != 1 {
            return Err(Error::parse(
                path,
                lineno,
                format!("multiclass expects one label per node, got {}", values.len()),
            ));
        }
        values.sort_unstable();
        values.dedup();
        if let Some(first) = seen.insert(id, lineno) {
            return Err(Error::parse(
                path,
                lineno,
                format!("duplicate label line for node {id} (first at line {first})"),
            ));
        }
        entries.push((id, values));
    }
    if entries.is_empty() {
        return Err(Error::Data(format!(
            "{}: no label lines found",
            path.display()
        )));
    }
    Ok(RawLabels { kind, entries })
}

/// Align raw file labels to an embedding's node list (original ids, in row
/// order), compacting label values to class ids `0..C−1` by sorted order.
///
/// Errors list the first offending ids when the file mentions nodes the
/// embedding lacks, or (multiclass) the embedding has nodes the file never
/// labels. Multilabel tolerates unlabeled embedding nodes.
pub fn align_labels(raw: &RawLabels, node_ids: &[u64]) -> Result<LabelSet> {
    let by_id: HashMap<u64, &Vec<u64>> =
        raw.entries.iter().map(|(id, v)| (*id, v)).collect();
    let known: BTreeSet<u64> = node_ids.iter().copied().collect();
    let unknown: Vec<u64> = raw
        .entries
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| !known.contains(id))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Data(format!(
            "label file mentions {} node id(s) absent from the embedding, first: {}",
            unknown.len(),
            preview(&unknown)
        )));
    }
    if raw.kind == LabelKind::Multiclass {
        let missing: Vec<u64> = node_ids
            .iter()
            .copied()
            .filter(|id| !by_id.contains_key(id))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Data(format!(
                "{} embedding node(s) have no label line, first: {}",
                missing.len(),
                preview(&missing)
            )));
        }
    }

    let mut distinct: BTreeSet<u64> = BTreeSet::new();
    for id in node_ids {
        if let Some(values) = by_id.get(id) {
            distinct.extend(values.iter().copied());
        }
    }
    if distinct.is_empty() {
        return Err(Error::Data(
            "label file assigns no labels to any embedding node".into(),
        ));
    }
    let class_ids: Vec<u64> = distinct.into_iter().collect();
    let compact: HashMap<u64, u32> = class_ids
        .iter()
        .enumerate()
        .map(|(c, &v)| (v, c as u32))
        .collect();
    let labels: Vec<Vec<u32>> = node_ids
        .iter()
        .map(|id| match by_id.get(id) {
            // Sorted raw values map to sorted class ids: the compaction is
            // monotone by construction.
            Some(values) => values.iter().map(|v| compact[v]).collect(),
            None => Vec::new(),
        })
        .collect();
    Ok(LabelSet {
        kind: raw.kind,
        labels,
        num_classes: class_ids.len(),
        class_ids,
    })
}

fn preview(ids: &[u64]) -> String {
    let shown: Vec<String> = ids.iter().take(5).map(|v| v.to_string()).collect();
    let ellipsis = if ids.len() > 5 { ", ..." } else { "" };
    format!("{}{}", shown.join(", "), ellipsis)
}

/// Write a multiclass label file (`node_id label` per node, ids 0..n−1).
pub fn save_multiclass_labels(path: impl AsRef<Path>, class_of: &[u32]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (i, c) in class_of.iter().enumerate() {
        writeln!(w, "{i} {c}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Sample one train/test split of the labeled nodes.
///
/// Multiclass splits are stratified: each class contributes
/// `⌈ratio·count⌉` training nodes. Multilabel splits sample
/// `⌈ratio·labeled⌉` nodes uniformly. Both partitions come back sorted,
/// are disjoint, and cover every labeled node. Deterministic per seed.
///
/// Errors when any class has fewer than 2 labeled nodes.
pub fn split(labels: &LabelSet, train_ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train ratio {train_ratio} outside (0, 1)"
        )));
    }
    for (c, count) in labels.class_counts().iter().enumerate() {
        if *count < 2 {
            return Err(Error::Data(format!(
                "class {c} has {count} labeled node(s); need at least 2 to split"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    match labels.kind() {
        LabelKind::Multiclass => {
            for c in 0..labels.num_classes() as u32 {
                let mut ids: Vec<usize> =
                    (0..labels.n()).filter(|&i| labels.labels_of(i) == [c]).collect();
                ids.shuffle(&mut rng);
                let k = (train_ratio * ids.len() as f64).ceil() as usize;
                train.extend_from_slice(&ids[..k]);
                test.extend_from_slice(&ids[k..]);
            }
        }
        LabelKind::Multilabel => {
            let mut ids = labels.labeled_ids();
            ids.shuffle(&mut rng);
            let k = (train_ratio * ids.len() as f64).ceil() as usize;
            train.extend_from_slice(&ids[..k]);
            test.extend_from_slice(&ids[k..]);
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// A fitted logistic-regression model over embedding features.
///
/// Multiclass holds one softmax model; multilabel holds one independent
/// binary model per label. Weight layout: C rows of `dim + 1` values, bias
/// last.
#[derive(Debug, Clone)]
pub struct Classifier {
    kind: LabelKind,
    dim: usize,
    num_classes: usize,
    weights: Vec<f64>,
}

impl Classifier {
    /// Feature dimensionality the model was trained on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat weight matrix, C rows × (dim + 1), bias last per row.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Raw per-class scores (pre-softmax / pre-sigmoid) for one node.
    fn scores(&self, x: &EmbeddingMatrix, i: usize, out: &mut [f64]) {
        let dp1 = self.dim + 1;
        let row = x.row(i);
        for (c, s) in out.iter_mut().enumerate() {
            let w = &self.weights[c * dp1..(c + 1) * dp1];
            let mut z = w[self.dim];
            for (wv, xv) in w[..self.dim].iter().zip(row) {
                z += wv * xv;
            }
            *s = z;
        }
    }

    /// Predict label sets for the given node ids.
    ///
    /// Multiclass: the argmax class (ties → lowest class id), as a
    /// one-element set. Multilabel: the top-k labels by score, where k is
    /// the node's true label count in `truth` (ties → lower label id);
    /// unlabeled nodes get the empty set.
    pub fn predict(
        &self,
        x: &EmbeddingMatrix,
        ids: &[usize],
        truth: &LabelSet,
    ) -> Result<Vec<Vec<u32>>> {
        if x.cols() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "classifier expects {} features, embedding has {}",
                self.dim,
                x.cols()
            )));
        }
        if truth.n() != x.rows() {
            return Err(Error::InvalidParameter(
                "label set and embedding node counts differ".into(),
            ));
        }
        let mut scores = vec![0.0; self.num_classes];
        let mut out = Vec::with_capacity(ids.len());
        for &i in ids {
            if i >= x.rows() {
                return Err(Error::InvalidParameter(format!(
                    "node id {i} out of range for {} rows",
                    x.rows()
                )));
            }
            self.scores(x, i, &mut scores);
            match self.kind {
                LabelKind::Multiclass => {
                    let mut best = 0usize;
                    for (c, &s) in scores.iter().enumerate() {
                        if s > scores[best] {
                            best = c;
                        }
                    }
                    out.push(vec![best as u32]);
                }
                LabelKind::Multilabel => {
                    let k = truth.labels_of(i).len();
                    out.push(top_k_by_score(&scores, k));
                }
            }
        }
        Ok(out)
    }
}

/// The k highest-scoring labels, ties broken toward the lower label id;
/// returned sorted ascending.
fn top_k_by_score(scores: &[f64], k: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    let mut picked = order[..k.min(order.len())].to_vec();
    picked.sort_unstable();
    picked
}

/// Deterministic full-batch gradient descent with a backtracking
/// (Armijo) line search.
///
/// `loss_grad` evaluates the objective and its gradient. Starts from `w0`,
/// stops when the gradient's Frobenius norm falls below the tolerance or
/// after the epoch cap. The accepted step doubles into the next epoch's
/// first trial step (capped at 1e4); a step is halved at most 50 times and
/// the final candidate is accepted regardless, mirroring a plain
/// line-searched descent.
fn descend(loss_grad: impl Fn(&[f64]) -> (f64, Vec<f64>), w0: Vec<f64>) -> Vec<f64> {
    const ARMIJO_C: f64 = 1e-4;
    const MAX_HALVINGS: usize = 50;
    const MAX_STEP: f64 = 1e4;
    let mut w = w0;
    let (mut f, mut g) = loss_grad(&w);
    let mut step = 1.0f64;
    for _ in 0..CLASSIFIER_MAX_EPOCHS {
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn <= CLASSIFIER_TOL {
            break;
        }
        let mut t = step;
        let mut accepted: Option<(Vec<f64>, f64, Vec<f64>)> = None;
        for _ in 0..MAX_HALVINGS {
            let w2: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - t * gi).collect();
            let (f2, g2) = loss_grad(&w2);
            let ok = f2 <= f - ARMIJO_C * t * gn * gn;
            accepted = Some((w2, f2, g2));
            if ok {
                break;
            }
            t *= 0.5;
        }
        let (w2, f2, g2) = accepted.expect("at least one line-search probe");
        w = w2;
        f = f2;
        g = g2;
        step = (t * 2.0).min(MAX_STEP);
    }
    w
}

/// Gather the feature rows of `ids` into a dense `len(ids) × dim` block.
fn gather_rows(x: &EmbeddingMatrix, ids: &[usize]) -> Vec<f64> {
    let d = x.cols();
    let mut out = Vec::with_capacity(ids.len() * d);
    for &i in ids {
        out.extend_from_slice(x.row(i));
    }
    out
}

/// Fit the downstream classifier on the training nodes.
///
/// Multiclass fits one softmax model; multilabel fits an independent
/// binary model per label. Both minimize mean cross-entropy plus
/// `0.5·λ·‖weights‖²` (bias unregularized, λ = 1e−4) by deterministic
/// line-searched gradient descent from zero weights.
///
/// Errors when a class never occurs among the training nodes.
pub fn fit_classifier(
    x: &EmbeddingMatrix,
    labels: &LabelSet,
    train: &[usize],
) -> Result<Classifier> {
    if train.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    if labels.n() != x.rows() {
        return Err(Error::InvalidParameter(
            "label set and embedding node counts differ".into(),
        ));
    }
    if let Some(&bad) = train.iter().find(|&&i| i >= x.rows()) {
        return Err(Error::InvalidParameter(format!(
            "train id {bad} out of range for {} rows",
            x.rows()
        )));
    }
    if !x.all_finite() {
        return Err(Error::Numeric(
            "embedding contains non-finite values".into(),
        ));
    }
    let c_total = labels.num_classes();
    let mut present = vec![false; c_total];
    for &i in train {
        for &c in labels.labels_of(i) {
            present[c as usize] = true;
        }
    }
    if let Some(missing) = present.iter().position(|&p| !p) {
        return Err(Error::Data(format!(
            "class {missing} has no training nodes in this split"
        )));
    }

    let d = x.cols();
    let ntr = train.len();
    let xtr = gather_rows(x, train);
    let weights = match labels.kind() {
        LabelKind::Multiclass => {
            let ytr: Vec<u32> = train.iter().map(|&i| labels.labels_of(i)[0]).collect();
            fit_softmax(&xtr, &ytr, ntr, d, c_total)
        }
        LabelKind::Multilabel => {
            // Independent binary problems share the gathered features;
            // each label trains on its own worker.
            let per_label: Vec<Vec<f64>> = (0..c_total as u32)
                .into_par_iter()
                .map(|c| {
                    let ytr: Vec<f64> = train
                        .iter()
                        .map(|&i| f64::from(labels.labels_of(i).binary_search(&c).is_ok()))
                        .collect();
                    fit_binary(&xtr, &ytr, ntr, d)
                })
                .collect();
            per_label.concat()
        }
    };
    Ok(Classifier {
        kind: labels.kind(),
        dim: d,
        num_classes: c_total,
        weights,
    })
}

/// Softmax (multinomial) logistic regression; returns C rows × (d+1).
fn fit_softmax(xtr: &[f64], ytr: &[u32], ntr: usize, d: usize, c_total: usize) -> Vec<f64> {
    let dp1 = d + 1;
    let loss_grad = |w: &[f64]| -> (f64, Vec<f64>) {
        let mut loss = 0.0;
        let mut grad = vec![0.0; c_total * dp1];
        let mut scores = vec![0.0; c_total];
        for i in 0..ntr {
            let xi = &xtr[i * d..(i + 1) * d];
            for (c, s) in scores.iter_mut().enumerate() {
                let wc = &w[c * dp1..(c + 1) * dp1];
                let mut z = wc[d];
                for (wv, xv) in wc[..d].iter().zip(xi) {
                    z += wv * xv;
                }
                *s = z;
            }
            let zmax = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for s in scores.iter_mut() {
                *s = (*s - zmax).exp();
                total += *s;
            }
            let y = ytr[i] as usize;
            loss -= (scores[y] / total).max(1e-300).ln();
            for (c, &e) in scores.iter().enumerate() {
                let p = e / total;
                let coef = (p - f64::from(c == y)) / ntr as f64;
                let gc = &mut grad[c * dp1..(c + 1) * dp1];
                for (gv, xv) in gc[..d].iter_mut().zip(xi) {
                    *gv += coef * xv;
                }
                gc[d] += coef;
            }
        }
        loss /= ntr as f64;
        for c in 0..c_total {
            for t in 0..d {
                let wv = w[c * dp1 + t];
                loss += 0.5 * CLASSIFIER_L2 * wv * wv;
                grad[c * dp1 + t] += CLASSIFIER_L2 * wv;
            }
        }
        (loss, grad)
    };
    descend(loss_grad, vec![0.0; c_total * dp1])
}

/// Binary logistic regression for one label; returns one row of (d+1).
fn fit_binary(xtr: &[f64], ytr: &[f64], ntr: usize, d: usize) -> Vec<f64> {
    let dp1 = d + 1;
    let loss_grad = |w: &[f64]| -> (f64, Vec<f64>) {
        let mut loss = 0.0;
        let mut grad = vec![0.0; dp1];
        for i in 0..ntr {
            let xi = &xtr[i * d..(i + 1) * d];
            let mut z = w[d];
            for (wv, xv) in w[..d].iter().zip(xi) {
                z += wv * xv;
            }
            let y = ytr[i];
            // Stable binary cross-entropy: max(z,0) − y·z + ln(1+e^{−|z|}).
            loss += z.max(0.0) - y * z + (-z.abs()).exp().ln_1p();
            let p = if z >= 0.0 {
                1.0 / (1.0 + (-z).exp())
            } else {
                let e = z.exp();
                e / (1.0 + e)
            };
            let coef = (p - y) / ntr as f64;
            for (gv, xv) in grad[..d].iter_mut().zip(xi) {
                *gv += coef * xv;
            }
            grad[d] += coef;
        }
        loss /= ntr as f64;
        for t in 0..d {
            loss += 0.5 * CLASSIFIER_L2 * w[t] * w[t];
            grad[t] += CLASSIFIER_L2 * w[t];
        }
        (loss, grad)
    };
    descend(loss_grad, vec![0.0; dp1])
}

/// Micro and macro F1 from predicted and true label sets.
///
/// Micro pools per-label TP/FP/FN counts into one F1. Macro averages
/// per-label F1 over the labels that occur at all (in truth or
/// predictions); a label with support but nothing correct contributes 0.
pub fn f1_scores(
    predictions: &[Vec<u32>],
    truth: &[Vec<u32>],
    num_classes: usize,
) -> Result<(f64, f64)> {
    if predictions.len() != truth.len() {
        return Err(Error::InvalidParameter(format!(
            "{} predictions for {} truth sets",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidParameter("empty test set".into()));
    }
    let mut tp = vec![0u64; num_classes];
    let mut fp = vec![0u64; num_classes];
    let mut fnc = vec![0u64; num_classes];
    for (pred, tru) in predictions.iter().zip(truth) {
        for &c in pred {
            if tru.binary_search(&c).is_ok() {
                tp[c as usize] += 1;
            } else {
                fp[c as usize] += 1;
            }
        }
        for &c in tru {
            if pred.binary_search(&c).is_err() {
                fnc[c as usize] += 1;
            }
        }
    }
    let (tps, fps, fns) = (
        tp.iter().sum::<u64>() as f64,
        fp.iter().sum::<u64>() as f64,
        fnc.iter().sum::<u64>() as f64,
    );
    let micro = if tps + fps + fns == 0.0 {
        0.0
    } else {
        2.0 * tps / (2.0 * tps + fps + fns)
    };
    let mut per_label = Vec::new();
    for c in 0..num_classes {
        let (tpc, fpc, fnc) = (tp[c] as f64, fp[c] as f64, fnc[c] as f64);
        if tpc + fpc + fnc == 0.0 {
            continue; // absent from truth and predictions alike
        }
        per_label.push(2.0 * tpc / (2.0 * tpc + fpc + fnc));
    }
    let macro_f1 = if per_label.is_empty() {
        0.0
    } else {
        per_label.iter().sum::<f64>() / per_label.len() as f64
    };
    Ok((micro, macro_f1))
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// A mean with its population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// One trial's scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialScores {
    pub micro: f64,
    #[serde(rename = "macro")]
    pub macro_f1: f64,
}

/// Aggregated protocol results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub micro_f1: MeanStd,
    pub macro_f1: MeanStd,
    pub trials: usize,
    pub train_ratio: f64,
    /// Wall-clock of the embedding inference that produced the features,
    /// when the caller timed one (not measured by the protocol itself).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inference_time_sec: Option<f64>,
    pub per_trial: Vec<TrialScores>,
}

/// The full protocol: repeated split → fit → predict → score.
///
/// Trial `t` uses seed `seed + t` (wrapping); trials run in parallel and
/// aggregate into means and population standard deviations. The report's
/// `inference_time_sec` is left unset.
pub fn run_protocol(
    x: &EmbeddingMatrix,
    labels: &LabelSet,
    trials: usize,
    train_ratio: f64,
    seed: u64,
) -> Result<EvalReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    if labels.n() != x.rows() {
        return Err(Error::InvalidParameter(format!(
            "label set covers {} nodes, embedding has {} rows",
            labels.n(),
            x.rows()
        )));
    }
    let per_trial: Vec<TrialScores> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial_seed = seed.wrapping_add(t);
            let (train, test) = split(labels, train_ratio, trial_seed)?;
            let clf = fit_classifier(x, labels, &train)?;
            let predictions = clf.predict(x, &test, labels)?;
            let truth: Vec<Vec<u32>> =
                test.iter().map(|&i| labels.labels_of(i).to_vec()).collect();
            let (micro, macro_f1) = f1_scores(&predictions, &truth, labels.num_classes())?;
            Ok(TrialScores { micro, macro_f1 })
        })
        .collect::<Result<_>>()?;
    let (micro_mean, micro_std) =
        mean_std(&per_trial.iter().map(|s| s.micro).collect::<Vec<_>>());
    let (macro_mean, macro_std) =
        mean_std(&per_trial.iter().map(|s| s.macro_f1).collect::<Vec<_>>());
    Ok(EvalReport {
        micro_f1: MeanStd {
            mean: micro_mean,
            std: micro_std,
        },
        macro_f1: MeanStd {
            mean: macro_mean,
            std: macro_std,
        },
        trials,
        train_ratio,
        inference_time_sec: None,
        per_trial,
    })
}

/// Normalized trade-off scores from per-method times and qualities.
///
/// ε̃ = (ε_max−ε)/(ε_max−ε_min), σ̃ = (σ−σ_min)/(σ_max−σ_min), score = ε̃·σ̃.
/// Requires at least two methods and a non-degenerate spread on both axes.
pub fn ntos(times: &[f64], qualities: &[f64]) -> Result<Vec<f64>> {
    if times.len() != qualities.len() {
        return Err(Error::InvalidParameter(format!(
            "{} times for {} qualities",
            times.len(),
            qualities.len()
        )));
    }
    if times.len() < 2 {
        return Err(Error::InvalidParameter(
            "trade-off score needs at least 2 methods".into(),
        ));
    }
    if times.iter().chain(qualities).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "times and qualities must be finite".into(),
        ));
    }
    let (tmin, tmax) = min_max(times);
    let (qmin, qmax) = min_max(qualities);
    if tmin == tmax {
        return Err(Error::Data(
            "all times equal: time normalization is degenerate".into(),
        ));
    }
    if qmin == qmax {
        return Err(Error::Data(
            "all qualities equal: quality normalization is degenerate".into(),
        ));
    }
    Ok(times
        .iter()
        .zip(qualities)
        .map(|(&t, &q)| ((tmax - t) / (tmax - tmin)) * ((q - qmin) / (qmax - qmin)))
        .collect())
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// One row of a method-comparison results table.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub method: String,
    pub time_sec: f64,
    pub metric: f64,
}

/// Read a results table: header `method,time_sec,metric`, one method per
/// row. Blank lines and `#` comments are skipped.
pub fn read_results_table(path: impl AsRef<Path>) -> Result<Vec<MethodRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            if trimmed != "method,time_sec,metric" {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected header 'method,time_sec,metric', got '{trimmed}'"),
                ));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 3 comma-separated fields, got {}", fields.len()),
            ));
        }
        let time_sec: f64 = fields[1].trim().parse().map_err(|_| {
            Error::parse(path, lineno, format!("invalid time '{}'", fields[1]))
        })?;
        let metric: f64 = fields[2].trim().parse().map_err(|_| {
            Error::parse(path, lineno, format!("invalid metric '{}'", fields[2]))
        })?;
        rows.push(MethodRow {
            method: fields[0].trim().to_string(),
            time_sec,
            metric,
        });
    }
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "{}: no data rows found",
            path.display()
        )));
    }
    Ok(rows)
}

/// Trade-off scores for a results table, by method name.
pub fn ntos_table(rows: &[MethodRow]) -> Result<Vec<(String, f64)>> {
    let times: Vec<f64> = rows.iter().map(|r| r.time_sec).collect();
    let qualities: Vec<f64> = rows.iter().map(|r| r.metric).collect();
    let scores = ntos(&times, &qualities)?;
    Ok(rows
        .iter()
        .zip(scores)
        .map(|(r, s)| (r.method.clone(), s))
        .collect())
}
