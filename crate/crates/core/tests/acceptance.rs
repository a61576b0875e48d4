//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the criteria execute one after another
//! (the timing criteria need a quiet machine). Pass criterion numbers to run a
//! subset: `cargo test --release --test acceptance -- 7 8`.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use randgeo::cli::{time_algorithm, BenchAlgo};
use randgeo::concentration::{
    epsilon_sample_check, perturbation_difference, perturbation_experiment, run_trials_with_seeds, Metric,
};
use randgeo::delaunay::{dt_build, dt_small, verify_delaunay, VerifyMode};
use randgeo::distsel::{count_pairs_within, count_pairs_within_with_grid, DistPath};
use randgeo::hull::{hull_bruteforce, hull_quadtree};
use randgeo::mst::{complete_graph, kruskal_oracle, mst_divide_conquer, mst_nlogn, SpanningTree};
use randgeo::points::{default_c_d, sample_points, seeded_rng, unit_f64, Params};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

fn c01_hull_oracle() -> Verdict {
    let mut rng = seeded_rng(0xc01);
    let mut bad = Vec::new();
    let mut cases = Vec::new();
    for k in 0..200u64 {
        cases.push((2, 100 + (unit_f64(&mut rng) * 4901.0) as usize, 1000 + k));
    }
    for k in 0..50u64 {
        cases.push((3, 100 + (unit_f64(&mut rng) * 901.0) as usize, 2000 + k));
    }
    for &(d, n, seed) in &cases {
        let p = sample_points(n, d, seed).map_err(|e| e.to_string())?;
        let got = hull_quadtree(&p).map_err(|e| e.to_string())?.vertex_set();
        let want = hull_bruteforce(&p).map_err(|e| e.to_string())?.vertex_set();
        let independent = d != 2 || common::planar_hull_oracle(&p) == want;
        if got != want || !independent {
            bad.push(format!("d={d} n={n} seed={seed}"));
        }
    }
    check(bad.is_empty(), format!("{} instances, mismatches {:?}", cases.len(), bad))
}

fn c02_hull_size() -> Verdict {
    let n = 100_000;
    let bound = 10.0 * ln(n);
    let mut sizes = Vec::new();
    for seed in 1..=20 {
        let p = sample_points(n, 2, seed).map_err(|e| e.to_string())?;
        sizes.push(hull_quadtree(&p).map_err(|e| e.to_string())?.vertex_set().len());
    }
    let max = *sizes.iter().max().unwrap();
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    check(
        max as f64 <= bound,
        format!("mean |CH| {mean:.2}, max {max}, bound 10 ln n = {bound:.1}"),
    )
}

fn c03_delaunay_oracle() -> Verdict {
    let cases: Vec<(usize, usize)> = vec![(2, 500), (2, 2000), (2, 5000), (3, 500), (3, 1000)];
    let mut bad = Vec::new();
    let mut worst_fallback: f64 = 0.0;
    let mut total = 0;
    for &(d, n) in &cases {
        for seed in 1..=50 {
            let p = sample_points(n, d, seed).map_err(|e| e.to_string())?;
            let params = Params::with_default_c(n, d).map_err(|e| e.to_string())?;
            let dt = dt_build(&p, &params).map_err(|e| e.to_string())?;
            let want = dt_small(&p).map_err(|e| e.to_string())?.top_simplices();
            let report = verify_delaunay(&dt.complex, &p, VerifyMode::Exhaustive).map_err(|e| e.to_string())?;
            let frac = dt.stats.fallback_events as f64 / n as f64;
            worst_fallback = worst_fallback.max(frac);
            if dt.complex.top_simplices() != want || report.violations != 0 || frac > 0.01 {
                bad.push(format!("d={d} n={n} seed={seed}"));
            }
            total += 1;
        }
    }
    check(
        bad.is_empty(),
        format!("{total} instances, worst fallback fraction {worst_fallback:.4}, failures {bad:?}"),
    )
}

fn c04_delaunay_size() -> Verdict {
    let n = 5000;
    let mut ratios = Vec::new();
    for seed in 1..=20 {
        let p = sample_points(n, 3, seed).map_err(|e| e.to_string())?;
        let params = Params::with_default_c(n, 3).map_err(|e| e.to_string())?;
        let dt = dt_build(&p, &params).map_err(|e| e.to_string())?;
        ratios.push(dt.complex.top_simplices().len() as f64 / n as f64);
    }
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    check(max <= 12.0, format!("tetrahedra/n mean {mean:.3}, max {max:.3}, bound 12"))
}

fn tree_key(t: &SpanningTree) -> Vec<(u32, u32)> {
    t.edges.iter().map(|e| (e.i, e.j)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn c05_mst_exact() -> Verdict {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for &(d, n, seeds) in &[(2usize, 2000usize, 100u64), (3, 1000, 50)] {
        for seed in 1..=seeds {
            let p = sample_points(n, d, seed).map_err(|e| e.to_string())?;
            let params = Params::with_default_c(n, d).map_err(|e| e.to_string())?;
            let dc = mst_divide_conquer(&p, &params).map_err(|e| e.to_string())?.tree;
            let nl = mst_nlogn(&p, &params).map_err(|e| e.to_string())?.tree;
            let kr = kruskal_oracle(n, &complete_graph(&p));
            let (prim_edges, prim_w) = common::prim(&p);
            let w = [dc.total_weight, nl.total_weight, kr.total_weight];
            let err = w.iter().map(|&x| rel(x, prim_w)).fold(0.0, f64::max);
            worst = worst.max(err);
            let same = tree_key(&dc) == prim_edges && tree_key(&nl) == prim_edges && tree_key(&kr) == prim_edges;
            if !same || err > 1e-12 {
                bad.push(format!("d={d} n={n} seed={seed}"));
            }
            total += 1;
        }
    }
    check(
        bad.is_empty(),
        format!("{total} instances, worst relative weight gap {worst:.1e}, failures {bad:?}"),
    )
}

fn c06_longest_edge() -> Verdict {
    let n = 5000;
    let delta = (default_c_d(2) * ln(n) / n as f64).sqrt();
    let mut violations = 0;
    let mut longest: f64 = 0.0;
    for seed in 1..=200 {
        let p = sample_points(n, 2, seed).map_err(|e| e.to_string())?;
        let params = Params::with_default_c(n, 2).map_err(|e| e.to_string())?;
        let run = mst_divide_conquer(&p, &params).map_err(|e| e.to_string())?;
        let l = run.tree.edges.iter().map(|e| e.w).fold(0.0, f64::max);
        longest = longest.max(l);
        violations += (l > delta) as usize;
    }
    check(
        violations == 0,
        format!("200 trials, {violations} violations, longest {longest:.4} vs delta {delta:.4}"),
    )
}

fn c07_distsel_exact() -> Verdict {
    let mut paths: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bad = Vec::new();
    let mut total = 0;
    for &n in &[500usize, 1000, 2000, 4000] {
        for &r in &[0.05, 0.1, 0.3] {
            // A grid fine enough that r > 8 * cell side, so the main path runs too.
            let fine = (8.0 * 2f64.sqrt() / r).floor() as usize + 1;
            for seed in 1..=50 {
                let p = sample_points(n, 2, seed).map_err(|e| e.to_string())?;
                let want = common::pairs_within(&p, r, false);
                let default = count_pairs_within(&p, r).map_err(|e| e.to_string())?;
                let forced = count_pairs_within_with_grid(&p, r, fine).map_err(|e| e.to_string())?;
                for res in [&default, &forced] {
                    *paths
                        .entry(match res.path {
                            DistPath::Main => "main",
                            DistPath::SmallRFallback => "fallback",
                        })
                        .or_default() += 1;
                    if res.count != want {
                        bad.push(format!("n={n} r={r} seed={seed}: {} vs {want}", res.count));
                    }
                }
                total += 2;
            }
        }
    }
    let fallback = paths.get("fallback").copied().unwrap_or(0);
    let main = paths.get("main").copied().unwrap_or(0);
    check(
        bad.is_empty() && fallback >= 10 && main >= 10,
        format!("{total} counts ({main} main path, {fallback} fallback), mismatches {bad:?}"),
    )
}

/// Median time per size. Sizes are interleaved within each repetition so that
/// slow spells on a shared machine hit every size alike.
fn ratios(algo: BenchAlgo, ns: &[usize], r: f64, reps: usize) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut times = vec![Vec::with_capacity(reps); ns.len()];
    for rep in 0..reps as u64 {
        for (k, &n) in ns.iter().enumerate() {
            let t = time_algorithm(algo, n, 2, r, 1, 1 + rep).map_err(|e| e.to_string())?;
            times[k].push(t[0]);
        }
    }
    let med: Vec<f64> = times
        .iter_mut()
        .map(|t| {
            t.sort_unstable_by(f64::total_cmp);
            t[t.len() / 2]
        })
        .collect();
    Ok((med.windows(2).map(|w| w[1] / w[0]).collect(), med))
}

fn c08_distsel_scaling() -> Verdict {
    let (q, med) = ratios(BenchAlgo::Distsel, &[200_000, 400_000, 800_000], 0.5, 5)?;
    check(
        q.iter().all(|&x| (2.2..=3.2).contains(&x)),
        format!("r=0.5 medians {med:.0?} ms, ratios {q:.2?}, band [2.2, 3.2]"),
    )
}

fn c09_linear_scaling() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for algo in [BenchAlgo::Hull, BenchAlgo::Delaunay, BenchAlgo::MstDc] {
        let (q, med) = ratios(algo, &[100_000, 200_000, 400_000], 0.0, 5)?;
        ok &= q.iter().all(|&x| (1.6..=2.6).contains(&x));
        parts.push(format!("{} {med:.0?} ms ratios {q:.2?}", algo.name()));
    }
    check(ok, format!("{}; band [1.6, 2.6]", parts.join("; ")))
}

fn c10_concentration() -> Verdict {
    let (n, r) = (2000, 0.25);
    let seeds: Vec<u64> = (1..=200).collect();
    let stats = run_trials_with_seeds(n, 2, r, &seeds, Metric::Toroidal).map_err(|e| e.to_string())?;
    for k in 0..3 {
        let p = sample_points(n, 2, seeds[k]).map_err(|e| e.to_string())?;
        if common::pairs_within(&p, r, true) != stats.values[k] {
            return Err(format!("trial {k} disagrees with the brute-force count"));
        }
    }
    let v: Vec<f64> = stats.values.iter().map(|&x| x as f64).collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let max_dev = v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
    let dev_bound = n as f64 * ln(n);
    let std_bound = 5.0 * n as f64;
    check(
        max_dev <= dev_bound && std <= std_bound,
        format!(
            "mean {mean:.1}, max |f_r - mean| {max_dev:.1} (bound {dev_bound:.0}, margin {:.1}x), std {std:.1} (bound {std_bound:.0}, margin {:.1}x)",
            dev_bound / max_dev,
            std_bound / std
        ),
    )
}

fn c11_perturbation() -> Verdict {
    let (n, r) = (2000, 0.25);
    let stats = perturbation_experiment(n, 2, r, 1000, 11, Metric::Toroidal).map_err(|e| e.to_string())?;
    // Spot-check the O(n) difference against two full recounts.
    let p = sample_points(n, 2, 11).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(0xc11);
    for _ in 0..3 {
        let i = (unit_f64(&mut rng) * n as f64) as usize;
        let axis = (unit_f64(&mut rng) * 2.0) as usize;
        let value = unit_f64(&mut rng);
        let fast = perturbation_difference(&p, r, i, axis, value, Metric::Toroidal).map_err(|e| e.to_string())?;
        let mut q = p.clone();
        q.set_coord(i, axis, value).map_err(|e| e.to_string())?;
        let slow = common::pairs_within(&p, r, true).abs_diff(common::pairs_within(&q, r, true));
        if fast != slow {
            return Err(format!("difference {fast} but recount gives {slow}"));
        }
    }
    let bound = 10.0 * (n as f64 * ln(n)).sqrt();
    check(
        stats.samples == 1000 && stats.max as f64 <= bound,
        format!("max {} (p50 {}, p99 {}), bound 10 sqrt(n ln n) = {bound:.0}", stats.max, stats.p50, stats.p99),
    )
}

fn c12_epsilon_sample() -> Verdict {
    let (n, r) = (5000, 0.25);
    let p = sample_points(n, 2, 12).map_err(|e| e.to_string())?;
    let rep = epsilon_sample_check(&p, r, 10_000, 12).map_err(|e| e.to_string())?;
    let volume = std::f64::consts::PI * r * r;
    if (rep.volume - volume).abs() > 1e-12 {
        return Err(format!("ball volume {} but pi r^2 = {volume}", rep.volume));
    }
    let bound = (4.0 * n as f64 * ln(n)).sqrt();
    check(
        rep.probes == 10_000 && rep.max_discrepancy <= bound,
        format!("max discrepancy {:.1}, bound sqrt(4 n ln n) = {bound:.1}", rep.max_discrepancy),
    )
}

/// Result files of a run directory, minus the run metadata.
fn result_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| !matches!(e.file_name().to_str(), Some("manifest.json" | "timing.json")))
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect()
}

fn c13_determinism() -> Verdict {
    let runs: &[&[&str]] = &[
        &["sample", "--n", "500", "--d", "3"],
        &["--format", "json", "sample", "--n", "300", "--d", "2"],
        &["hull", "--n", "3000", "--d", "2"],
        &["--format", "json", "hull", "--n", "1000", "--d", "3"],
        &["delaunay", "--n", "1500", "--d", "2"],
        &["--format", "json", "delaunay", "--n", "400", "--d", "3"],
        &["mst", "--n", "3000", "--d", "2", "--algo", "dc"],
        &["mst", "--n", "1000", "--d", "3", "--algo", "nlogn"],
        &["--format", "json", "mst", "--n", "800", "--d", "2", "--algo", "kruskal"],
        &["distsel", "--n", "3000", "--r", "0.1"],
        &["--format", "json", "distsel", "--n", "3000", "--r", "0.1", "--grid", "120"],
        &["concentrate", "--n", "1000", "--r", "0.1", "--trials", "20"],
        &["--format", "json", "concentrate", "--n", "500", "--d", "3", "--r", "0.2", "--trials", "8", "--metric", "euclidean"],
        &["perturb", "--n", "1000", "--r", "0.1", "--samples", "200"],
        &["epsilon", "--n", "2000", "--r", "0.25", "--probes", "1000"],
        &["bench", "--algo", "hull", "mst-dc", "--n-min", "1000", "--n-max", "4000", "--reps", "5"],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_randgeo");
    let mut bad = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (tag, threads) in [("a", "1"), ("b", "1"), ("c", "8")] {
            let dir = tmp.path().join(format!("{k}{tag}"));
            let status = Command::new(exe)
                .args(["--threads", threads, "--out"])
                .arg(&dir)
                .args(*args)
                .env_remove("RANDGEO_SEED")
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{args:?} exited with {}", status.status));
            }
            let mut files = result_files(&dir);
            if let Some(csv) = files.get_mut("bench.csv") {
                // Timings differ run to run; the table layout must not.
                let layout: String = String::from_utf8_lossy(csv)
                    .lines()
                    .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(",") + "\n")
                    .collect();
                *csv = layout.into_bytes();
            }
            outputs.push(files);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2] {
            bad.push(args.join(" "));
        }
    }
    check(
        bad.is_empty(),
        format!("{} subcommand configurations, two runs plus 8 threads, differing {bad:?}", runs.len()),
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict);

const CRITERIA: &[Criterion] = &[
    (1, "hull matches brute force", c01_hull_oracle),
    (2, "hull size within 10 ln n", c02_hull_size),
    (3, "Delaunay matches reference", c03_delaunay_oracle),
    (4, "tetrahedra at most 12n", c04_delaunay_size),
    (5, "MST routes agree exactly", c05_mst_exact),
    (6, "longest MST edge within delta", c06_longest_edge),
    (7, "pair counts match brute force", c07_distsel_exact),
    (8, "pair counting scaling band", c08_distsel_scaling),
    (9, "hull/DT/MST linear scaling band", c09_linear_scaling),
    (10, "close-pair count concentration", c10_concentration),
    (11, "single-coordinate differences", c11_perturbation),
    (12, "ball-count discrepancy", c12_epsilon_sample),
    (13, "CLI output determinism", c13_determinism),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let listing = std::env::args().any(|a| a == "--list");
    let mut failed = 0;
    for &(k, name, f) in CRITERIA {
        if listing {
            println!("criterion_{k:02}: test");
            continue;
        }
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {k:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k:>2} FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
