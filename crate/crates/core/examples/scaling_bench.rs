//! Median running time against n, with doubling ratios.
//!
//! cargo run --release --example scaling_bench -- [n_min] [steps] [reps]

use randgeo::cli::{bench_row, BenchAlgo};

fn main() -> randgeo::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n_min = args.first().copied().unwrap_or(25_000);
    let steps = args.get(1).copied().unwrap_or(3);
    let reps = args.get(2).copied().unwrap_or(5);

    println!("{:<10} {:>9} {:>11} {:>7}", "algorithm", "n", "median ms", "ratio");
    for algo in [BenchAlgo::Hull, BenchAlgo::Delaunay, BenchAlgo::MstDc, BenchAlgo::MstNlogn, BenchAlgo::Distsel] {
        let mut prev: Option<f64> = None;
        for k in 0..steps {
            let n = n_min << k;
            let row = bench_row(algo, n, 2, 0.5, reps, 1)?;
            let ratio = prev.map_or(String::new(), |p| format!("{:.2}", row.median_ms / p));
            println!("{:<10} {:>9} {:>11.1} {:>7}", row.algorithm, n, row.median_ms, ratio);
            prev = Some(row.median_ms);
        }
    }
    println!("linear work doubles per step; the pair count at fixed r grows like n^(4/3)");
    Ok(())
}
