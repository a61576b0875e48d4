//! Hull of random points through the quadtree filter, against the brute-force hull.
//!
//! cargo run --release --example convex_hull -- [n] [d]

use std::time::Instant;

use randgeo::hull::{hull_bruteforce, hull_quadtree};
use randgeo::points::sample_points;

fn main() -> randgeo::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(200_000);
    let d = args.get(1).copied().unwrap_or(2);

    for seed in 1..=5 {
        let points = sample_points(n, d, seed)?;
        let t = Instant::now();
        let hull = hull_quadtree(&points)?;
        let fast = t.elapsed();
        let t = Instant::now();
        let reference = hull_bruteforce(&points)?;
        let slow = t.elapsed();
        println!(
            "seed {seed}: {} hull vertices, {} facets, quadtree {fast:.2?}, direct {slow:.2?}, equal {}",
            hull.len(),
            hull.facets().len(),
            hull.vertex_set() == reference.vertex_set()
        );
    }
    println!("expected size grows like ln(n)^(d-1); ln n = {:.1}", (n as f64).ln());
    Ok(())
}
