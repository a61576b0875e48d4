//! Builds the Delaunay triangulation of random points from local stars and
//! checks it against the empty-circumsphere property.
//!
//! cargo run --release --example delaunay_star -- [n] [d] [seed]

use std::time::Instant;

use randgeo::delaunay::{dt_build, dt_small, verify_delaunay, VerifyMode};
use randgeo::points::sample_points;
use randgeo::Params;

fn main() -> randgeo::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (n, d, seed) = (arg(0, 20_000) as usize, arg(1, 2) as usize, arg(2, 1));

    let points = sample_points(n, d, seed)?;
    let params = Params::with_default_c(n, d)?;
    let t = Instant::now();
    let dt = dt_build(&points, &params)?;
    let built = t.elapsed();
    println!("n={n} d={d} delta={:.4} built in {built:.2?}", params.delta);
    println!("{}", serde_json::to_string_pretty(&dt.stats).unwrap());

    let report = verify_delaunay(&dt.complex, &points, VerifyMode::Sampled { count: 2000, seed })?;
    println!("sampled verification: {report:?}");

    if n <= 50_000 {
        let t = Instant::now();
        let global = dt_small(&points)?;
        println!(
            "incremental triangulation in {:.2?}; identical: {}",
            t.elapsed(),
            global.top_simplices() == dt.complex.top_simplices()
        );
    }
    Ok(())
}
