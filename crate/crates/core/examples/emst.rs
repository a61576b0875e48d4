//! Euclidean minimum spanning tree by both Yao-graph routes.
//!
//! cargo run --release --example emst -- [n] [d] [seed]

use std::time::Instant;

use randgeo::mst::{complete_graph, kruskal_oracle, mst_divide_conquer, mst_nlogn};
use randgeo::points::sample_points;
use randgeo::Params;

fn main() -> randgeo::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(100_000) as usize;
    let d = args.get(1).copied().unwrap_or(2) as usize;
    let seed = args.get(2).copied().unwrap_or(1);

    let points = sample_points(n, d, seed)?;
    let params = Params::with_default_c(n, d)?;

    let t = Instant::now();
    let dc = mst_divide_conquer(&points, &params)?;
    println!("divide and conquer: {:.2?}", t.elapsed());
    println!("{}", serde_json::to_string_pretty(&dc.stats).unwrap());

    let t = Instant::now();
    let nl = mst_nlogn(&points, &params)?;
    println!("sort + Boruvka: {:.2?}, same tree {}", t.elapsed(), nl.tree.edges == dc.tree.edges);

    let longest = dc.tree.longest_edge();
    println!("longest edge {longest:.5}, delta {:.5}", params.delta);

    if n <= 3000 {
        let k = kruskal_oracle(n, &complete_graph(&points));
        println!("complete-graph Kruskal weight {:.12} vs {:.12}", k.total_weight, dc.tree.total_weight);
    }
    Ok(())
}
