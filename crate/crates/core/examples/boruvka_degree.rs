//! Mean degree of the contracted graph across Boruvka rounds, on Delaunay and
//! Yao-graph inputs. Degrees staying bounded is what makes plain Boruvka linear here.
//!
//! cargo run --release --example boruvka_degree -- [n] [d] [trials]

use randgeo::mst::{boruvka_degree_experiment, DegreeInput};

fn main() -> randgeo::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(20_000);
    let d = args.get(1).copied().unwrap_or(2);
    let trials = args.get(2).copied().unwrap_or(3);

    for input in [DegreeInput::Delaunay, DegreeInput::Yao] {
        if input == DegreeInput::Delaunay && d > 3 {
            continue;
        }
        println!("{input:?} input");
        let rows = boruvka_degree_experiment(n, d, trials, 1, input)?;
        for row in rows.iter().filter(|r| r.trial == 0) {
            println!("  round {:>2}: {:>7} components, mean degree {:.2}", row.round, row.components, row.mean_degree);
        }
        let max = rows.iter().map(|r| r.mean_degree).fold(0.0, f64::max);
        println!("  largest mean degree over {trials} trials: {max:.2}");
    }
    Ok(())
}
