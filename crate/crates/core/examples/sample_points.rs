//! Draws a seeded uniform sample and prints it as CSV.
//!
//! cargo run --release --example sample_points -- [n] [d] [seed]

use randgeo::io::write_points_csv;
use randgeo::points::{sample_points, Params};

fn main() -> randgeo::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(20) as usize;
    let d = args.get(1).copied().unwrap_or(2) as usize;
    let seed = args.get(2).copied().unwrap_or(1);

    let points = sample_points(n, d, seed)?;
    write_points_csv(std::io::stdout().lock(), &points)?;
    if let Ok(p) = Params::with_default_c(n, d) {
        eprintln!("phi={:.5} delta={:.5} (c_d={})", p.phi, p.delta, p.c_d);
    }
    Ok(())
}
