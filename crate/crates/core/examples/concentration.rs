//! Spread of the close-pair count across independent samples, single-coordinate
//! sensitivity, and ball-count discrepancy.
//!
//! cargo run --release --example concentration -- [n] [r] [trials]

use randgeo::concentration::{epsilon_sample_check, perturbation_experiment, run_trials, Metric};
use randgeo::points::sample_points;

fn main() -> randgeo::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let r: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let trials: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);

    let stats = run_trials(n, 2, r, trials, 1)?;
    let nlogn = n as f64 * (n as f64).ln();
    println!(
        "f_r over {trials} trials: mean {:.1}, std {:.1} ({:.3} n), max |f_r - mean| {:.1} ({:.4} n ln n)",
        stats.mean,
        stats.std,
        stats.std / n as f64,
        stats.max_deviation,
        stats.max_deviation / nlogn
    );

    let pert = perturbation_experiment(n, 2, r, 1000, 7, Metric::Toroidal)?;
    println!("moving one coordinate: p50 {}, p99 {}, max {} (reference {:.0})", pert.p50, pert.p99, pert.max, pert.bound);

    let points = sample_points(n, 2, 3)?;
    let eps = epsilon_sample_check(&points, r, 5000, 3)?;
    println!("ball counts vs v n = {:.1}: max gap {:.1} (reference {:.1})", eps.volume * n as f64, eps.max_discrepancy, eps.bound);
    Ok(())
}
