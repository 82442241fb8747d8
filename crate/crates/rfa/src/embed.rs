//! The embedding engine: seeded Gaussian noise pushed through K rounds of
//! propagate → activate → normalize.
//!
//! There is nothing to train. The embedding of a graph is a deterministic
//! function of the graph and an [`RfaConfig`]: a seeded `n×d` noise matrix
//! is repeatedly multiplied by the degree-corrected propagation operator
//! (see [`crate::spectral`]), passed through an elementwise nonlinearity,
//! and renormalized. A low-pass filter smooths the noise along edges so
//! nearby nodes converge to similar rows (position embeddings); a high-pass
//! filter does the opposite, pushing structurally similar nodes together
//! regardless of distance (identity embeddings).
//!
//! Determinism contracts: the noise stream is a fixed row-major draw from a
//! seeded PRNG, every parallel stage partitions work identically regardless
//! of thread count, and repeated runs are byte-identical on one platform.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{build_propagator, FilterConfig};

/// Elementwise nonlinearity applied after each propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// Hyperbolic tangent; output in [−1, 1].
    Tanh,
    /// Exponential; inputs are saturated at +30 so the output stays finite.
    Exp,
    /// Identity.
    None,
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "exp" => Ok(Activation::Exp),
            "none" => Ok(Activation::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown activation {other:?} (expected tanh, exp, or none)"
            ))),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Activation::Tanh => "tanh",
            Activation::Exp => "exp",
            Activation::None => "none",
        })
    }
}

/// Renormalization applied after each activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Each row is scaled to unit Euclidean norm (zero rows stay zero).
    L2Row,
    /// Each column is standardized to mean 0 and population standard
    /// deviation 1 (exactly constant columns become all-zero).
    ZscoreCol,
    /// Identity.
    None,
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" | "l2_row" => Ok(Normalization::L2Row),
            "zscore" | "zscore_col" => Ok(Normalization::ZscoreCol),
            "none" => Ok(Normalization::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown normalization {other:?} (expected l2, zscore, or none)"
            ))),
        }
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::L2Row => "l2_row",
            Normalization::ZscoreCol => "zscore_col",
            Normalization::None => "none",
        })
    }
}

/// Full configuration of one embedding run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfaConfig {
    /// Embedding dimensionality d (columns of the output matrix).
    pub dim: usize,
    /// Number of propagate → activate → normalize iterations K; 0 returns
    /// the raw noise.
    pub iters: usize,
    /// Spectral filter: kernel constants and degree correction.
    pub filter: FilterConfig,
    /// Elementwise nonlinearity per iteration.
    pub activation: Activation,
    /// Renormalization per iteration.
    pub normalization: Normalization,
    /// Seed for the noise matrix.
    pub seed: u64,
}

impl RfaConfig {
    /// Low-pass (position) configuration with the conventional pairing:
    /// tanh activation and column z-scoring.
    pub fn low_pass(dim: usize, tau: f64, iters: usize) -> Self {
        RfaConfig {
            dim,
            iters,
            filter: FilterConfig::low_pass(tau),
            activation: Activation::Tanh,
            normalization: Normalization::ZscoreCol,
            seed: 0,
        }
    }

    /// High-pass (identity) configuration with the conventional pairing:
    /// exp activation and column z-scoring.
    pub fn high_pass(dim: usize, tau: f64, iters: usize) -> Self {
        RfaConfig {
            dim,
            iters,
            filter: FilterConfig::high_pass(tau),
            activation: Activation::Exp,
            normalization: Normalization::ZscoreCol,
            seed: 0,
        }
    }

    /// Replace the seed (builder style).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Replace the activation (builder style).
    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    /// Replace the normalization (builder style).
    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Check parameter domains.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimensionality must be ≥ 1".into(),
            ));
        }
        self.filter.validate()
    }
}

/// Dense row-major `rows × cols` matrix of 64-bit floats.
///
/// Used for embeddings (`n × d`), eigenvector sets, and classifier
/// features. Row `i` is the vector of node `i` and is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Zero-filled matrix. Fails (rather than aborting) when the buffer
    /// cannot be allocated, so benchmark sweeps can record the failure and
    /// continue with smaller sizes.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::InvalidParameter("matrix dimensions overflow".into()))?;
        let mut data = Vec::new();
        data.try_reserve_exact(len).map_err(|_| {
            Error::Data(format!(
                "cannot allocate a {rows}×{cols} matrix ({} bytes)",
                len * std::mem::size_of::<f64>()
            ))
        })?;
        data.resize(len, 0.0);
        Ok(EmbeddingMatrix { rows, cols, data })
    }

    /// Wrap an existing row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "buffer length {} does not match {rows}×{cols}",
                data.len()
            )));
        }
        Ok(EmbeddingMatrix { rows, cols, data })
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable row `i`.
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// The whole row-major buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable row-major buffer.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// True when every entry is finite (no NaN/Inf).
    pub fn all_finite(&self) -> bool {
        self.data
            .par_chunks(self.cols.max(1))
            .all(|chunk| chunk.iter().all(|v| v.is_finite()))
    }

    /// Write as CSV: header `node_id,v0,...,v{d−1}`, then one row per node.
    /// `original_ids` supplies the id column (identity when `None`).
    /// Floats use the shortest representation that parses back exactly, so
    /// a CSV round-trip is lossless.
    pub fn write_csv(&self, path: impl AsRef<Path>, original_ids: Option<&[u64]>) -> Result<()> {
        let path = path.as_ref();
        if let Some(ids) = original_ids {
            if ids.len() != self.rows {
                return Err(Error::InvalidParameter(format!(
                    "id column length {} does not match {} rows",
                    ids.len(),
                    self.rows
                )));
            }
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            write!(w, "node_id")?;
            for j in 0..self.cols {
                write!(w, ",v{j}")?;
            }
            writeln!(w)?;
            let mut line = String::new();
            for i in 0..self.rows {
                line.clear();
                let id = original_ids.map_or(i as u64, |ids| ids[i]);
                line.push_str(&id.to_string());
                for v in self.row(i) {
                    line.push(',');
                    line.push_str(&format!("{v}"));
                }
                writeln!(w, "{line}")?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }

    /// Read the CSV format written by [`Self::write_csv`]. Returns the
    /// matrix and the node-id column.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<(Self, Vec<u64>)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut ids = Vec::new();
        let mut data = Vec::new();
        let mut cols: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || (lineno == 1 && trimmed.starts_with("node_id")) {
                continue;
            }
            let mut fields = trimmed.split(',');
            let id_tok = fields.next().unwrap_or("");
            let id: u64 = id_tok
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad node id {id_tok:?}")))?;
            let mut row = 0usize;
            for tok in fields {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad float {tok:?}")))?;
                data.push(v);
                row += 1;
            }
            match cols {
                None => cols = Some(row),
                Some(c) if c != row => {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("expected {c} values, found {row}"),
                    ));
                }
                _ => {}
            }
            ids.push(id);
        }
        let cols = cols.ok_or_else(|| Error::Data(format!("{}: empty matrix", path.display())))?;
        let rows = ids.len();
        Ok((EmbeddingMatrix { rows, cols, data }, ids))
    }

    /// Write the raw binary format: `rows` and `cols` as little-endian u64,
    /// followed by the row-major entries as little-endian f64.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            w.write_all(&(self.rows as u64).to_le_bytes())?;
            w.write_all(&(self.cols as u64).to_le_bytes())?;
            for v in &self.data {
                w.write_all(&v.to_le_bytes())?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }

    /// Read the binary format written by [`Self::write_binary`].
    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut u64buf = [0u8; 8];
        let mut read_u64 = |r: &mut BufReader<File>| -> Result<u64> {
            r.read_exact(&mut u64buf).map_err(|e| Error::io(path, e))?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let rows = read_u64(&mut r)? as usize;
        let cols = read_u64(&mut r)? as usize;
        let mut out = EmbeddingMatrix::zeros(rows, cols)?;
        let mut fbuf = [0u8; 8];
        for v in out.data.iter_mut() {
            r.read_exact(&mut fbuf).map_err(|e| Error::io(path, e))?;
            *v = f64::from_le_bytes(fbuf);
        }
        // Trailing garbage means the header lied about the shape.
        let mut probe = [0u8; 1];
        match r.read(&mut probe) {
            Ok(0) => Ok(out),
            Ok(_) => Err(Error::Data(format!(
                "{}: file longer than its {rows}×{cols} header",
                path.display()
            ))),
            Err(e) => Err(Error::io(path, e)),
        }
    }
}

/// Seeded i.i.d. Gaussian matrix with mean 0 and variance `1/dim`,
/// drawn in row-major order so the stream is reproducible.
pub fn init_noise(n: usize, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "noise matrix needs n ≥ 1 and dim ≥ 1".into(),
        ));
    }
    let mut out = EmbeddingMatrix::zeros(n, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (1.0 / dim as f64).sqrt())
        .expect("standard deviation is positive and finite");
    for v in out.data_mut() {
        *v = normal.sample(&mut rng);
    }
    Ok(out)
}

/// Apply the nonlinearity elementwise, in place.
pub fn activate(x: &mut EmbeddingMatrix, kind: Activation) {
    /// Saturation bound for exp inputs: exp(30) ≈ 1.07e13 stays far from
    /// overflow while preserving the ordering of saturated entries.
    const EXP_SATURATION: f64 = 30.0;
    let cols = x.cols().max(1);
    match kind {
        Activation::Tanh => x
            .data_mut()
            .par_chunks_mut(cols)
            .for_each(|row| row.iter_mut().for_each(|v| *v = v.tanh())),
        Activation::Exp => x
            .data_mut()
            .par_chunks_mut(cols)
            .for_each(|row| row.iter_mut().for_each(|v| *v = v.min(EXP_SATURATION).exp())),
        Activation::None => {}
    }
}

/// Apply the renormalization in place.
///
/// `L2Row`: rows scaled to unit norm, zero rows untouched. `ZscoreCol`:
/// columns centered and scaled by the population standard deviation;
/// exactly constant columns (including all-zero) become all-zero.
pub fn normalize(x: &mut EmbeddingMatrix, kind: Normalization) {
    let (rows, cols) = (x.rows(), x.cols());
    if rows == 0 || cols == 0 {
        return;
    }
    match kind {
        Normalization::None => {}
        Normalization::L2Row => {
            x.data_mut().par_chunks_mut(cols).for_each(|row| {
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|v| *v /= norm);
                }
            });
        }
        Normalization::ZscoreCol => {
            // Pass 1: mean, population σ, and an exact constancy flag per
            // column. The flag matters: a column of identical large values
            // can pick up a tiny nonzero σ from summation rounding, and
            // dividing by it would turn a constant column into ±1s instead
            // of the required zeros.
            //
            // The traversal is row-major with per-column accumulators —
            // streaming reads instead of a stride-`cols` walk down each
            // column, which thrashes once the matrix outgrows the cache.
            // Each column's values are still added in ascending row order,
            // one sequential reduction per column, so the stats are
            // independent of the thread count.
            let data = x.data();
            let mut sums = vec![0.0f64; cols];
            let mut constants = vec![true; cols];
            let first = &data[..cols];
            for row in data.chunks_exact(cols) {
                for (j, &v) in row.iter().enumerate() {
                    constants[j] &= v == first[j];
                    sums[j] += v;
                }
            }
            let means: Vec<f64> = sums.iter().map(|s| s / rows as f64).collect();
            let mut ss = vec![0.0f64; cols];
            for row in data.chunks_exact(cols) {
                for (j, &v) in row.iter().enumerate() {
                    let d = v - means[j];
                    ss[j] += d * d;
                }
            }
            let stats: Vec<(f64, f64, bool)> = (0..cols)
                .map(|j| (means[j], (ss[j] / rows as f64).sqrt(), constants[j]))
                .collect();
            // Pass 2: elementwise update, parallel over rows.
            x.data_mut().par_chunks_mut(cols).for_each(|row| {
                for (v, &(mean, sigma, constant)) in row.iter_mut().zip(&stats) {
                    *v = if constant || sigma == 0.0 {
                        0.0
                    } else {
                        (*v - mean) / sigma
                    };
                }
            });
        }
    }
}

/// Result of an embedding run: the matrix plus the wall-clock seconds of
/// the inference loop (noise generation + all K iterations, excluding graph
/// construction and IO).
#[derive(Debug, Clone)]
pub struct RfaOutput {
    /// Final `n × d` embedding.
    pub embedding: EmbeddingMatrix,
    /// Wall-clock seconds of noise generation plus the K iterations.
    pub loop_seconds: f64,
}

/// Run the full embedding pipeline on a graph.
///
/// `Z⁰` is the seeded noise; each iteration computes
/// `Zᵏ = Norm(f_act(P · Zᵏ⁻¹))` with the propagation operator `P` built
/// from `cfg.filter`. `iters = 0` returns the raw noise. The caller is
/// responsible for passing a connected graph (extract the largest
/// component first); embedding a disconnected graph is well-defined but
/// mixes unrelated components into shared normalization statistics.
///
/// Deterministic: a pure function of `(g, cfg)` on a fixed platform, with
/// byte-identical output at any worker-thread count.
pub fn rfa_embed(g: &Graph, cfg: &RfaConfig) -> Result<RfaOutput> {
    cfg.validate()?;
    let propagator = build_propagator(g, &cfg.filter)?;
    let started = Instant::now();
    let mut z = init_noise(g.n(), cfg.dim, cfg.seed)?;
    if cfg.iters > 0 {
        let mut buf = EmbeddingMatrix::zeros(g.n(), cfg.dim)?;
        for k in 1..=cfg.iters {
            propagator.apply_into(&z, &mut buf)?;
            activate(&mut buf, cfg.activation);
            normalize(&mut buf, cfg.normalization);
            if !buf.all_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite embedding entries after iteration {k}"
                )));
            }
            std::mem::swap(&mut z, &mut buf);
        }
    }
    Ok(RfaOutput {
        embedding: z,
        loop_seconds: started.elapsed().as_secs_f64(),
    })
}

/// All dataset preset names accepted by [`preset_config`].
pub const PRESET_NAMES: [&str; 10] = [
    "europe",
    "usa",
    "reality-call",
    "actor",
    "film",
    "ppi",
    "blogcatalog",
    "flickr",
    "youtube",
    "orkut",
];

/// Recommended configuration for a named benchmark dataset.
///
/// Identity datasets (airport roles, call/collaboration roles) use the
/// high-pass filter; position datasets (community membership) use the
/// low-pass filter. The seed defaults to 0; override with
/// [`RfaConfig::with_seed`].
pub fn preset_config(name: &str) -> Result<RfaConfig> {
    use Activation as A;
    use Normalization as N;
    // (dim, tau, iters, activation, normalization, high_pass?)
    let (dim, tau, iters, act, norm, high) = match name {
        "europe" => (64, 20.0, 3, A::Exp, N::ZscoreCol, true),
        "usa" => (64, 20.0, 7, A::Exp, N::None, true),
        "reality-call" => (128, 20.0, 2, A::Exp, N::None, true),
        "actor" => (128, 20.0, 2, A::Exp, N::None, true),
        "film" => (256, 10.0, 12, A::Exp, N::ZscoreCol, true),
        "ppi" => (256, 20.0, 10, A::Tanh, N::ZscoreCol, false),
        "blogcatalog" => (512, 0.0, 9, A::Tanh, N::ZscoreCol, false),
        "flickr" => (512, 1.0, 7, A::Tanh, N::ZscoreCol, false),
        "youtube" => (128, 10.0, 14, A::Tanh, N::L2Row, false),
        "orkut" => (64, 20.0, 8, A::Tanh, N::ZscoreCol, false),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?}; valid presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let filter = if high {
        FilterConfig::high_pass(tau)
    } else {
        FilterConfig::low_pass(tau)
    };
    Ok(RfaConfig {
        dim,
        iters,
        filter,
        activation: act,
        normalization: norm,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_barbell, gen_erdos_renyi};

    #[test]
    fn noise_is_deterministic_and_seed_sensitive() {
        let a = init_noise(50, 8, 7).unwrap();
        let b = init_noise(50, 8, 7).unwrap();
        let c = init_noise(50, 8, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn noise_matches_target_moments() {
        // n·d = 10^5 × 64 samples: mean within ±0.002, variance within 5%
        // of 1/d.
        let x = init_noise(100_000, 64, 3).unwrap();
        let len = x.data().len() as f64;
        let mean = x.data().iter().sum::<f64>() / len;
        let var = x.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
        assert!(mean.abs() < 0.002, "mean {mean}");
        let target = 1.0 / 64.0;
        assert!((var - target).abs() < 0.05 * target, "variance {var}");
    }

    #[test]
    fn noise_variance_is_one_at_dim_one() {
        let x = init_noise(100_000, 1, 9).unwrap();
        let len = x.data().len() as f64;
        let mean = x.data().iter().sum::<f64>() / len;
        let var = x.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn activations_elementwise_identities() {
        let mut x = EmbeddingMatrix::from_vec(1, 2, vec![0.0, 1.0]).unwrap();
        activate(&mut x, Activation::Tanh);
        assert_eq!(x.get(0, 0), 0.0);
        assert!((x.get(0, 1) - 1.0f64.tanh()).abs() < 1e-15);

        let mut x = EmbeddingMatrix::from_vec(1, 2, vec![0.0, 1.0]).unwrap();
        activate(&mut x, Activation::Exp);
        assert_eq!(x.get(0, 0), 1.0);
        assert!((x.get(0, 1) - 1.0f64.exp()).abs() < 1e-15);

        let mut x = EmbeddingMatrix::from_vec(1, 2, vec![0.25, -3.5]).unwrap();
        let before = x.clone();
        activate(&mut x, Activation::None);
        assert_eq!(x, before);
    }

    #[test]
    fn exp_saturates_instead_of_overflowing() {
        let mut x = EmbeddingMatrix::from_vec(1, 3, vec![29.0, 30.0, 1e6]).unwrap();
        activate(&mut x, Activation::Exp);
        assert!(x.all_finite());
        assert_eq!(x.get(0, 1), x.get(0, 2), "saturated entries match exp(30)");
        assert!(x.get(0, 0) < x.get(0, 1), "ordering preserved below the cap");
    }

    #[test]
    fn tanh_output_range() {
        let mut x = init_noise(100, 16, 5).unwrap();
        for v in x.data_mut() {
            *v *= 100.0;
        }
        activate(&mut x, Activation::Tanh);
        assert!(x.data().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn l2_row_unit_norms_and_zero_rows() {
        let mut x = EmbeddingMatrix::from_vec(2, 2, vec![3.0, 4.0, 0.0, 0.0]).unwrap();
        normalize(&mut x, Normalization::L2Row);
        assert_eq!(x.row(0), &[0.6, 0.8]);
        assert_eq!(x.row(1), &[0.0, 0.0], "zero row left alone");
    }

    #[test]
    fn zscore_col_hand_value() {
        // Column [1, 2, 3]: population σ = √(2/3), entries → ±√(3/2).
        let mut x = EmbeddingMatrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        normalize(&mut x, Normalization::ZscoreCol);
        let root = (1.5f64).sqrt();
        assert!((x.get(0, 0) + root).abs() < 1e-12);
        assert!(x.get(1, 0).abs() < 1e-12);
        assert!((x.get(2, 0) - root).abs() < 1e-12);
    }

    #[test]
    fn zscore_constant_columns_become_zero() {
        let mut x = EmbeddingMatrix::from_vec(3, 2, vec![5.0, 1.0, 5.0, 2.0, 5.0, 3.0]).unwrap();
        normalize(&mut x, Normalization::ZscoreCol);
        assert_eq!(x.get(0, 0), 0.0);
        assert_eq!(x.get(1, 0), 0.0);
        assert_eq!(x.get(2, 0), 0.0);
        assert!(x.get(2, 1) > 0.0, "non-constant column standardized");

        // A constant column of large identical values must also become
        // zero, even though its floating-point σ may be nonzero.
        let big = 30.0f64.exp();
        let mut x = EmbeddingMatrix::from_vec(300, 1, vec![big; 300]).unwrap();
        normalize(&mut x, Normalization::ZscoreCol);
        assert!(x.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zscore_postconditions_on_random_input() {
        let mut x = init_noise(200, 7, 11).unwrap();
        normalize(&mut x, Normalization::ZscoreCol);
        for j in 0..7 {
            let col: Vec<f64> = (0..200).map(|i| x.get(i, j)).collect();
            let mean = col.iter().sum::<f64>() / 200.0;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 200.0;
            assert!(mean.abs() < 1e-6, "column {j} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-6, "column {j} σ {}", var.sqrt());
        }
    }

    #[test]
    fn embed_zero_iterations_returns_noise() {
        let g = gen_barbell(6, 3).unwrap();
        let cfg = RfaConfig::low_pass(8, 20.0, 0).with_seed(5);
        let out = rfa_embed(&g, &cfg).unwrap();
        assert_eq!(out.embedding, init_noise(15, 8, 5).unwrap());
    }

    #[test]
    fn embed_output_shape_and_finiteness() {
        let g = gen_erdos_renyi(300, 6.0, 1).unwrap();
        for act in [Activation::Tanh, Activation::Exp, Activation::None] {
            for norm in [
                Normalization::L2Row,
                Normalization::ZscoreCol,
                Normalization::None,
            ] {
                let cfg = RfaConfig::low_pass(12, 5.0, 4)
                    .with_seed(2)
                    .with_activation(act)
                    .with_normalization(norm);
                let out = rfa_embed(&g, &cfg).unwrap();
                assert_eq!((out.embedding.rows(), out.embedding.cols()), (300, 12));
                assert!(out.embedding.all_finite(), "{act} {norm}");
            }
        }
    }

    #[test]
    fn embed_is_deterministic() {
        let g = gen_erdos_renyi(200, 8.0, 3).unwrap();
        let cfg = RfaConfig::high_pass(16, 20.0, 3).with_seed(42);
        let a = rfa_embed(&g, &cfg).unwrap();
        let b = rfa_embed(&g, &cfg).unwrap();
        // Bitwise identity, not just approximate equality.
        let bits = |m: &EmbeddingMatrix| -> Vec<u64> {
            m.data().iter().map(|v| v.to_bits()).collect()
        };
        assert_eq!(bits(&a.embedding), bits(&b.embedding));
    }

    #[test]
    fn embed_rejects_invalid_config() {
        let g = gen_barbell(3, 1).unwrap();
        let mut cfg = RfaConfig::low_pass(0, 1.0, 2);
        assert!(rfa_embed(&g, &cfg).is_err());
        cfg.dim = 4;
        cfg.filter.alpha = 0.0;
        assert!(rfa_embed(&g, &cfg).is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let x = init_noise(40, 5, 13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.csv");
        x.write_csv(&path, None).unwrap();
        let (back, ids) = EmbeddingMatrix::read_csv(&path).unwrap();
        assert_eq!(back, x);
        assert_eq!(ids, (0..40).collect::<Vec<u64>>());
    }

    #[test]
    fn csv_preserves_original_ids() {
        let x = EmbeddingMatrix::from_vec(2, 2, vec![1.5, -2.25, 0.0, 3.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.csv");
        x.write_csv(&path, Some(&[700, 900])).unwrap();
        let (back, ids) = EmbeddingMatrix::read_csv(&path).unwrap();
        assert_eq!(back, x);
        assert_eq!(ids, vec![700, 900]);
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let x = init_noise(33, 7, 21).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        x.write_binary(&path).unwrap();
        let back = EmbeddingMatrix::read_binary(&path).unwrap();
        let bits = |m: &EmbeddingMatrix| -> Vec<u64> {
            m.data().iter().map(|v| v.to_bits()).collect()
        };
        assert_eq!(bits(&back), bits(&x));
        assert_eq!((back.rows(), back.cols()), (33, 7));
    }

    #[test]
    fn binary_rejects_truncated_and_oversized_files() {
        let x = init_noise(4, 3, 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        x.write_binary(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(EmbeddingMatrix::read_binary(&path).is_err());
        let mut longer = bytes.clone();
        longer.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, &longer).unwrap();
        assert!(EmbeddingMatrix::read_binary(&path).is_err());
    }

    #[test]
    fn presets_round_trip_the_published_table() {
        let europe = preset_config("europe").unwrap();
        assert_eq!(
            (europe.dim, europe.filter.tau, europe.iters),
            (64, 20.0, 3)
        );
        assert_eq!(europe.activation, Activation::Exp);
        assert_eq!(europe.normalization, Normalization::ZscoreCol);
        assert!(europe.filter.alpha < 0.0, "identity preset is high-pass");

        let ppi = preset_config("ppi").unwrap();
        assert_eq!((ppi.dim, ppi.filter.tau, ppi.iters), (256, 20.0, 10));
        assert_eq!(ppi.activation, Activation::Tanh);
        assert_eq!(ppi.normalization, Normalization::ZscoreCol);
        assert!(ppi.filter.alpha > 0.0, "position preset is low-pass");

        let usa = preset_config("usa").unwrap();
        assert_eq!((usa.dim, usa.filter.tau, usa.iters), (64, 20.0, 7));
        assert_eq!(usa.activation, Activation::Exp);
        assert_eq!(usa.normalization, Normalization::None);

        for name in PRESET_NAMES {
            assert!(preset_config(name).is_ok(), "{name}");
        }
        let err = preset_config("not-a-dataset").unwrap_err().to_string();
        assert!(err.contains("europe"), "error lists valid presets: {err}");
    }

    #[test]
    fn activation_and_normalization_parse_from_flags() {
        assert_eq!("tanh".parse::<Activation>().unwrap(), Activation::Tanh);
        assert_eq!("exp".parse::<Activation>().unwrap(), Activation::Exp);
        assert_eq!("none".parse::<Activation>().unwrap(), Activation::None);
        assert!("relu".parse::<Activation>().is_err());
        assert_eq!("l2".parse::<Normalization>().unwrap(), Normalization::L2Row);
        assert_eq!(
            "zscore_col".parse::<Normalization>().unwrap(),
            Normalization::ZscoreCol
        );
        assert!("batch".parse::<Normalization>().is_err());
    }
}
