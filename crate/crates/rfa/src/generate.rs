//! Deterministic synthetic graph generators.
//!
//! Four families used as benchmarks and test fixtures:
//!
//! - [`gen_barbell`]: two cliques joined by a path — the canonical fixture
//!   for structural-role (identity) claims, with a fully known spectrum.
//! - [`gen_erdos_renyi`]: G(n, p) at a target average degree, sampled in
//!   O(n + m) expected time by geometric edge skipping, so linear-scaling
//!   benchmarks are measurable at millions of nodes.
//! - [`gen_sbm`]: planted-partition graphs with ground-truth communities —
//!   the position-label benchmark.
//! - [`gen_role_ring`]: hubs on a ring, each with pendant leaves — the
//!   identity-label benchmark (two structural roles, hub and leaf).
//!
//! Every generator is a pure function of its arguments: the same arguments
//! (including the seed) always produce the identical graph.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Two `n`-cliques joined by a path of `c` intermediate nodes.
///
/// Layout: clique 1 occupies ids `0..n` with gateway `n−1`; the path
/// occupies `n..n+c`; clique 2 occupies `n+c..2n+c` with gateway `n+c`.
/// Total: `2n+c` nodes and `n(n−1) + c + 1` edges.
pub fn gen_barbell(n: usize, c: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "barbell clique size must be ≥ 3, got {n}"
        )));
    }
    if c < 1 {
        return Err(Error::InvalidParameter(
            "barbell path length must be ≥ 1".into(),
        ));
    }
    let total = 2 * n + c;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * (n - 1) + c + 1);
    let clique = |edges: &mut Vec<(u32, u32)>, start: usize| {
        for i in start..start + n {
            for j in (i + 1)..start + n {
                edges.push((i as u32, j as u32));
            }
        }
    };
    clique(&mut edges, 0);
    clique(&mut edges, n + c);
    // Path from gateway n−1 through the c intermediate nodes to gateway n+c.
    for k in 0..=c {
        let a = if k == 0 { n - 1 } else { n + k - 1 };
        let b = n + k;
        edges.push((a as u32, b as u32));
    }
    Graph::from_edges(total, &edges)
}

/// Emit each pair index in `0..total` independently with probability `p`,
/// using geometric skip lengths so the expected cost is O(p·total).
fn skip_sample(total: u64, p: f64, rng: &mut ChaCha8Rng, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        for t in 0..total {
            emit(t);
        }
        return;
    }
    let ln_q = (1.0 - p).ln();
    let mut t: i128 = -1;
    loop {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / ln_q).floor() as i128;
        t += 1 + skip;
        if t >= total as i128 {
            return;
        }
        emit(t as u64);
    }
}

/// Erdős–Rényi sample G(n, p) with `p = avg_degree/(n−1)`.
///
/// Pairs are visited in a fixed order with geometric skips, so generation
/// is O(n + m) expected time and fully determined by the seed. The raw
/// sample may be disconnected; callers wanting a connected graph extract
/// the largest component afterwards.
pub fn gen_erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "Erdős–Rényi needs n ≥ 2, got {n}"
        )));
    }
    let p = avg_degree / (n as f64 - 1.0);
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "average degree {avg_degree} gives edge probability {p}, outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = (0.5 * avg_degree * n as f64) as usize;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(expected + expected / 8 + 16);

    if p >= 1.0 {
        for v in 0..n {
            for w in 0..v {
                edges.push((w as u32, v as u32));
            }
        }
    } else {
        // Geometric skipping over pairs (w, v), w < v, in ascending (v, w)
        // order.
        let ln_q = (1.0 - p).ln();
        let mut v: u64 = 1;
        let mut w: i128 = -1;
        while v < n as u64 {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / ln_q).floor() as i128;
            w += 1 + skip;
            while w >= v as i128 && v < n as u64 {
                w -= v as i128;
                v += 1;
            }
            if v < n as u64 {
                edges.push((w as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Planted-partition (stochastic block model) sample.
///
/// Nodes of block `b` are consecutive, starting at the sum of the previous
/// block sizes. Each within-block pair is an edge with probability `p_in`,
/// each between-block pair with probability `p_out`. Returns the graph and
/// the ground-truth block label per node.
pub fn gen_sbm(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Vec<u32>)> {
    if block_sizes.is_empty() {
        return Err(Error::InvalidParameter("no blocks given".into()));
    }
    if block_sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidParameter("block sizes must be ≥ 1".into()));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {p} outside [0, 1]"
            )));
        }
    }
    let k = block_sizes.len();
    let n: usize = block_sizes.iter().sum();
    let mut offsets = vec![0usize; k + 1];
    for b in 0..k {
        offsets[b + 1] = offsets[b] + block_sizes[b];
    }
    let labels: Vec<u32> = (0..k)
        .flat_map(|b| std::iter::repeat(b as u32).take(block_sizes[b]))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for b in 0..k {
        // Within-block pairs (i < j), linearized over the triangle.
        let s = block_sizes[b] as u64;
        let off = offsets[b] as u64;
        skip_sample(s * (s - 1) / 2, p_in, &mut rng, |t| {
            let (i, j) = triangle_pair(t);
            edges.push(((off + i) as u32, (off + j) as u32));
        });
        // Between-block rectangles against every later block.
        for b2 in (b + 1)..k {
            let s2 = block_sizes[b2] as u64;
            let off2 = offsets[b2] as u64;
            skip_sample(s * s2, p_out, &mut rng, |t| {
                let (i, j) = (t / s2, t % s2);
                edges.push(((off + i) as u32, (off2 + j) as u32));
            });
        }
    }
    let graph = Graph::from_edges(n, &edges)?;
    Ok((graph, labels))
}

/// Invert the triangular linearization: `t` = index into the sequence
/// (1,0), (2,0), (2,1), (3,0), ... returns `(smaller, larger)`.
fn triangle_pair(t: u64) -> (u64, u64) {
    // j is the largest integer with j(j−1)/2 ≤ t; solve via the quadratic
    // formula, then fix up any floating-point off-by-one.
    let mut j = ((0.25 + 2.0 * t as f64).sqrt() + 0.5).floor() as u64;
    while j * (j - 1) / 2 > t {
        j -= 1;
    }
    while (j + 1) * j / 2 <= t {
        j += 1;
    }
    let i = t - j * (j - 1) / 2;
    (i, j)
}

/// Hubs arranged in a ring, each with `leaves_per_star` pendant leaves.
///
/// Ids: hubs `0..num_stars` (hub `i` adjacent to hub `(i+1) % num_stars`);
/// the leaves of hub `i` are `num_stars + i·L .. num_stars + (i+1)·L`.
/// Labels: hub = 0, leaf = 1. Deterministic and connected by construction.
pub fn gen_role_ring(num_stars: usize, leaves_per_star: usize) -> Result<(Graph, Vec<u32>)> {
    if num_stars < 3 {
        return Err(Error::InvalidParameter(format!(
            "role ring needs ≥ 3 stars, got {num_stars}"
        )));
    }
    if leaves_per_star < 1 {
        return Err(Error::InvalidParameter(
            "role ring needs ≥ 1 leaf per star".into(),
        ));
    }
    let n = num_stars * (1 + leaves_per_star);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n);
    for i in 0..num_stars {
        edges.push((i as u32, ((i + 1) % num_stars) as u32));
    }
    for i in 0..num_stars {
        for l in 0..leaves_per_star {
            let leaf = num_stars + i * leaves_per_star + l;
            edges.push((i as u32, leaf as u32));
        }
    }
    let labels: Vec<u32> = (0..n)
        .map(|i| if i < num_stars { 0 } else { 1 })
        .collect();
    let graph = Graph::from_edges(n, &edges)?;
    Ok((graph, labels))
}
