//! Tour of the four graph generators and the structure each one plants.
//!
//! Run with `cargo run --example generate_graphs`.

use rfa::generate::{gen_barbell, gen_erdos_renyi, gen_role_ring, gen_sbm};
use rfa::graph::{largest_connected_component, Graph};

fn describe(name: &str, g: &Graph) {
    let degrees = g.degrees();
    let max_deg = degrees.iter().copied().max().unwrap_or(0);
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    println!(
        "{name:>12}  n={:<7} m={:<8} avg_deg={:<6.2} max_deg={:<5} isolated={:<4} connected={}",
        g.n(),
        g.m(),
        2.0 * g.m() as f64 / g.n() as f64,
        max_deg,
        isolated,
        g.is_connected(),
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Barbell B(6,3): two 6-cliques joined by a 3-node path. The canonical
    // fixture for telling structural roles apart from communities — the two
    // cliques are far apart yet structurally identical.
    let barbell = gen_barbell(6, 3)?;
    describe("barbell", &barbell);

    // Erdős–Rényi G(n, p) with p chosen for a target average degree.
    // Generation skips over absent edges geometrically, so the cost is
    // O(n + m), not O(n²) — the same seed always gives the same graph.
    let er = gen_erdos_renyi(10_000, 8.0, 7)?;
    describe("erdos-renyi", &er);
    let (lcc, map) = largest_connected_component(&er);
    println!(
        "{:>12}  the sample splits into {} components; the largest keeps {:.1}% of nodes",
        "",
        map.num_components(),
        100.0 * lcc.n() as f64 / er.n() as f64,
    );

    // Stochastic block model: planted communities. Returns the block id of
    // every node, which downstream classification treats as ground truth.
    let (sbm, blocks) = gen_sbm(&[200, 200, 200], 0.05, 0.005, 7)?;
    describe("sbm", &sbm);
    let per_block: Vec<usize> = (0..3)
        .map(|b| blocks.iter().filter(|&&x| x == b).count())
        .collect();
    println!("{:>12}  block sizes: {per_block:?}", "");

    // Role ring: a cycle of star graphs. Hubs and leaves are perfect
    // structural-role labels — every hub looks like every other hub no
    // matter how far apart they sit on the ring.
    let (ring, roles) = gen_role_ring(50, 5)?;
    describe("role-ring", &ring);
    let hubs = roles.iter().filter(|&&r| r == 0).count();
    println!(
        "{:>12}  {} hubs and {} leaves",
        "",
        hubs,
        roles.len() - hubs
    );

    Ok(())
}
