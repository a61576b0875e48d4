//! Counts pairs within distance r in the plane, on both evaluation paths.
//!
//! cargo run --release --example distance_count -- [n] [r]

use std::time::Instant;

use randgeo::distsel::{count_pairs_bruteforce, count_pairs_within, count_pairs_within_with_grid, default_grid_side};
use randgeo::points::sample_points;

fn main() -> randgeo::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(4000);
    let r: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);

    let points = sample_points(n, 2, 1)?;
    let t = Instant::now();
    let auto = count_pairs_within(&points, r)?;
    println!("default grid ({} per side): {} pairs via {:?} in {:.2?}", default_grid_side(n), auto.count, auto.path, t.elapsed());

    // Cells small enough that r exceeds eight cell sides.
    let side = (8.0 * 2f64.sqrt() / r).floor() as usize + 1;
    let t = Instant::now();
    let forced = count_pairs_within_with_grid(&points, r, side)?;
    println!("grid {side} per side: {} pairs via {:?} in {:.2?}", forced.count, forced.path, t.elapsed());

    if n <= 20_000 {
        let t = Instant::now();
        println!("all pairs: {} in {:.2?}", count_pairs_bruteforce(&points, r)?, t.elapsed());
    }
    Ok(())
}
