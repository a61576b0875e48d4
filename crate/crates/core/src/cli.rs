//! Command-line front end: one subcommand per capability, each writing result
//! files plus `manifest.json` (resolved configuration) and `timing.json`.
//!
//! Result files depend only on the configuration. Wall-clock times and the
//! thread count live in `timing.json`, and `bench` output is timing by nature.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::concentration::{epsilon_sample_check, perturbation_experiment, run_trials_with_seeds, Metric};
use crate::delaunay::{dt_build, dt_small, verify_delaunay, VerifyMode};
use crate::distsel::{count_pairs_bruteforce, count_pairs_within, count_pairs_within_with_grid};
use crate::error::{param, Error, Result};
use crate::hull::{hull_bruteforce, hull_quadtree};
use crate::io;
use crate::mst::{complete_graph, kruskal_oracle, mst_divide_conquer, mst_nlogn, MstRun, MstStats, SpanningTree};
use crate::points::{default_c_d, sample_points, Params};

/// Largest `n` for which the complete-graph Kruskal route is offered.
pub const KRUSKAL_MAX_N: usize = 5000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MstAlgo {
    Dc,
    Nlogn,
    Kruskal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgo {
    Hull,
    Delaunay,
    MstDc,
    MstNlogn,
    Distsel,
}

impl BenchAlgo {
    pub fn name(self) -> &'static str {
        match self {
            BenchAlgo::Hull => "hull",
            BenchAlgo::Delaunay => "delaunay",
            BenchAlgo::MstDc => "mst-dc",
            BenchAlgo::MstNlogn => "mst-nlogn",
            BenchAlgo::Distsel => "distsel",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "randgeo", version, about = "Geometry on uniformly random point sets")]
pub struct Cli {
    /// Worker threads; 0 uses the rayon default.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Directory for result files.
    #[arg(long, global = true, default_value = "randgeo-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Shape {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, env = "RANDGEO_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Constant in `phi = c_d ln n / n`; defaults per dimension.
    #[arg(long)]
    pub c_d: Option<f64>,
}

#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Sample a point set.
    Sample(Shape),
    /// Convex hull (d = 2, 3).
    Hull {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        verify: bool,
    },
    /// Delaunay triangulation (d = 2, 3).
    Delaunay {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        verify: bool,
    },
    /// Euclidean minimum spanning tree.
    Mst {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = MstAlgo::Dc)]
        algo: MstAlgo,
        #[arg(long)]
        verify: bool,
    },
    /// Count pairs within distance r (d = 2).
    Distsel {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        r: f64,
        /// Coarse grid side; defaults to ceil((n / ln n)^(1/3)).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        verify: bool,
    },
    /// Close-pair counts over independent trials.
    Concentrate {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Metric::Toroidal)]
        metric: Metric,
    },
    /// Changes of the close-pair count under single-coordinate moves.
    Perturb {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Metric::Toroidal)]
        metric: Metric,
    },
    /// Ball-count discrepancy at random probe centres.
    Epsilon {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
    },
    /// Timing sweep over n = n_min, 2 n_min, ... up to n_max.
    Bench {
        #[arg(long, value_enum, num_args = 1.., default_values_t = [BenchAlgo::Hull, BenchAlgo::Delaunay, BenchAlgo::MstDc])]
        algo: Vec<BenchAlgo>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 25_000)]
        n_min: usize,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Radius for the distsel benchmark.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, env = "RANDGEO_SEED", default_value_t = 1)]
        seed: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Hull { .. } => "hull",
            Command::Delaunay { .. } => "delaunay",
            Command::Mst { .. } => "mst",
            Command::Distsel { .. } => "distsel",
            Command::Concentrate { .. } => "concentrate",
            Command::Perturb { .. } => "perturb",
            Command::Epsilon { .. } => "epsilon",
            Command::Bench { .. } => "bench",
        }
    }

    fn shape(&self) -> Option<&Shape> {
        match self {
            Command::Sample(s)
            | Command::Hull { shape: s, .. }
            | Command::Delaunay { shape: s, .. }
            | Command::Mst { shape: s, .. }
            | Command::Distsel { shape: s, .. }
            | Command::Concentrate { shape: s, .. }
            | Command::Perturb { shape: s, .. }
            | Command::Epsilon { shape: s, .. } => Some(s),
            Command::Bench { .. } => None,
        }
    }
}

/// Fully resolved configuration, echoed to `manifest.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub n: Option<usize>,
    pub d: usize,
    pub seed: u64,
    pub c_d: Option<f64>,
    pub r: Option<f64>,
    pub trials: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
    pub threads: usize,
    pub options: Value,
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Self {
        let cmd = &cli.command;
        let (n, d, seed, c_d) = match (cmd.shape(), cmd) {
            (Some(s), _) => (Some(s.n), s.d, s.seed, Some(s.c_d.unwrap_or_else(|| default_c_d(s.d)))),
            (None, Command::Bench { d, seed, .. }) => (None, *d, *seed, Some(default_c_d(*d))),
            _ => unreachable!("every command without a shape is bench"),
        };
        let (r, trials) = match cmd {
            Command::Distsel { r, .. } | Command::Perturb { r, .. } | Command::Epsilon { r, .. } => (Some(*r), None),
            Command::Concentrate { r, trials, .. } => (Some(*r), Some(*trials)),
            Command::Bench { r, .. } => (Some(*r), None),
            _ => (None, None),
        };
        RunConfig {
            subcommand: cmd.name().to_string(),
            n,
            d,
            seed,
            c_d,
            r,
            trials,
            out: cli.out.clone(),
            format: cli.format,
            threads: cli.threads,
            options: serde_json::to_value(cmd).unwrap_or(Value::Null),
        }
    }
}

/// What a command reports back: a JSON summary for stdout, and a failure
/// description when a verification step disagreed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: Value,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(summary: Value) -> Self {
        Outcome { summary, failure: None }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn params_for(shape: &Shape) -> Result<Params> {
    Params::new(shape.n, shape.d, shape.c_d.unwrap_or_else(|| default_c_d(shape.d)))
}

fn diff_report(label: &str, missing: &[String], extra: &[String]) -> String {
    let head = |v: &[String]| v.iter().take(20).cloned().collect::<Vec<_>>().join(" ");
    format!(
        "{label}: {} missing [{}], {} extra [{}]",
        missing.len(),
        head(missing),
        extra.len(),
        head(extra)
    )
}

fn set_diff<T: Ord + Clone + std::fmt::Debug>(want: &[T], got: &[T]) -> (Vec<String>, Vec<String>) {
    let missing = want.iter().filter(|x| got.binary_search(x).is_err()).map(|x| format!("{x:?}")).collect();
    let extra = got.iter().filter(|x| want.binary_search(x).is_err()).map(|x| format!("{x:?}")).collect();
    (missing, extra)
}

pub fn cmd_sample(cfg: &RunConfig, shape: &Shape) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "points.csv")?;
            io::write_points_csv(&mut w, &p)?;
            w
        })?,
        Format::Json => {
            let rows: Vec<&[f64]> = p.iter().collect();
            io::write_json(
                create(&cfg.out, "points.json")?,
                &json!({"d": p.dim(), "n": p.len(), "seed": p.seed(), "points": rows}),
            )?
        }
    }
    Ok(Outcome::ok(json!({"n": p.len(), "d": p.dim(), "seed": p.seed()})))
}

pub fn cmd_hull(cfg: &RunConfig, shape: &Shape, verify: bool) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    let hull = hull_quadtree(&p)?;
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "hull.csv")?;
            io::write_hull_csv(&mut w, &hull)?;
            w
        })?,
        Format::Json => io::write_hull_json(create(&cfg.out, "hull.json")?, &hull)?,
    }
    let mut out = Outcome::ok(json!({"n": p.len(), "d": p.dim(), "hull_vertices": hull.len(), "facets": hull.facets().len()}));
    if verify {
        let want = hull_bruteforce(&p)?.vertex_set();
        let got = hull.vertex_set();
        if want != got {
            let (m, e) = set_diff(&want, &got);
            out.failure = Some(diff_report("hull vertices", &m, &e));
        }
        out.summary["verified"] = json!(out.failure.is_none());
    }
    Ok(out)
}

pub fn cmd_delaunay(cfg: &RunConfig, shape: &Shape, verify: bool) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    let params = params_for(shape)?;
    let dt = dt_build(&p, &params)?;
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "complex.csv")?;
            io::write_complex_csv(&mut w, &dt.complex)?;
            w
        })?,
        Format::Json => io::write_complex_json(create(&cfg.out, "complex.json")?, &dt.complex)?,
    }
    io::write_json(create(&cfg.out, "stats.json")?, &dt.stats)?;
    let mut out = Outcome::ok(serde_json::to_value(&dt.stats)?);
    if verify {
        let report = verify_delaunay(&dt.complex, &p, VerifyMode::Exhaustive)?;
        let want = dt_small(&p)?.top_simplices();
        let got = dt.complex.top_simplices();
        let mut problems = Vec::new();
        if want != got {
            let (m, e) = set_diff(&want, &got);
            problems.push(diff_report("top simplices", &m, &e));
        }
        if !report.passed() {
            problems.push(format!("{} simplices with a point inside the circumball", report.violations));
        }
        io::write_json(create(&cfg.out, "verify.json")?, &report)?;
        out.summary["verified"] = json!(problems.is_empty());
        out.failure = (!problems.is_empty()).then(|| problems.join("; "));
    }
    Ok(out)
}

fn kruskal_run(p: &crate::points::PointSet) -> Result<MstRun> {
    if p.len() > KRUSKAL_MAX_N {
        return param(format!("complete-graph Kruskal is limited to n <= {KRUSKAL_MAX_N}"));
    }
    let tree = kruskal_oracle(p.len(), &complete_graph(p));
    Ok(MstRun {
        stats: MstStats {
            total_weight: tree.total_weight,
            ..MstStats::default()
        },
        tree,
    })
}

fn compare_trees(want: &SpanningTree, got: &SpanningTree) -> Option<String> {
    let key = |t: &SpanningTree| t.edges.iter().map(|e| (e.i, e.j)).collect::<Vec<_>>();
    let (a, b) = (key(want), key(got));
    let rel = (want.total_weight - got.total_weight).abs() / want.total_weight.abs().max(f64::MIN_POSITIVE);
    if a == b && rel <= 1e-12 {
        return None;
    }
    let (m, e) = set_diff(&a, &b);
    Some(format!(
        "{}; weights {} vs {} (relative {rel:e})",
        diff_report("tree edges", &m, &e),
        want.total_weight,
        got.total_weight
    ))
}

pub fn cmd_mst(cfg: &RunConfig, shape: &Shape, algo: MstAlgo, verify: bool) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    let params = params_for(shape)?;
    let run = match algo {
        MstAlgo::Dc => mst_divide_conquer(&p, &params)?,
        MstAlgo::Nlogn => mst_nlogn(&p, &params)?,
        MstAlgo::Kruskal => kruskal_run(&p)?,
    };
    let edges = run.tree.edges.iter().map(|e| (e.i, e.j, e.w));
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "mst.csv")?;
            io::write_edges_csv(&mut w, edges)?;
            w
        })?,
        Format::Json => io::write_json(create(&cfg.out, "mst.json")?, &run.tree.edges)?,
    }
    io::write_json(create(&cfg.out, "stats.json")?, &run.stats)?;
    let mut out = Outcome::ok(serde_json::to_value(&run.stats)?);
    if verify {
        let reference = if p.len() <= KRUSKAL_MAX_N {
            kruskal_run(&p)?
        } else if algo == MstAlgo::Dc {
            mst_nlogn(&p, &params)?
        } else {
            mst_divide_conquer(&p, &params)?
        };
        out.failure = compare_trees(&reference.tree, &run.tree);
        out.summary["verified"] = json!(out.failure.is_none());
        out.summary["reference_weight"] = json!(reference.tree.total_weight);
    }
    Ok(out)
}

pub fn cmd_distsel(cfg: &RunConfig, shape: &Shape, r: f64, grid: Option<usize>, verify: bool) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    let t = Instant::now();
    let res = match grid {
        Some(g) => count_pairs_within_with_grid(&p, r, g)?,
        None => count_pairs_within(&p, r)?,
    };
    let elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
    let result = json!({"n": p.len(), "r": r, "count": res.count, "path": res.path});
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "distsel.csv")?;
            writeln!(w, "n,r,count,path")?;
            writeln!(w, "{},{},{},{}", p.len(), io::fmt_f64(r), res.count, result["path"].as_str().unwrap_or(""))?;
            w
        })?,
        Format::Json => io::write_json(create(&cfg.out, "distsel.json")?, &result)?,
    }
    let mut out = Outcome::ok(json!({"n": p.len(), "r": r, "count": res.count, "elapsed_ms": elapsed_ms, "path": res.path}));
    if verify {
        let want = count_pairs_bruteforce(&p, r)?;
        if want != res.count {
            out.failure = Some(format!("count {} but brute force finds {want}", res.count));
        }
        out.summary["verified"] = json!(out.failure.is_none());
    }
    Ok(out)
}

pub fn cmd_concentrate(cfg: &RunConfig, shape: &Shape, r: f64, trials: usize, metric: Metric) -> Result<Outcome> {
    let seeds: Vec<u64> = (0..trials as u64).map(|k| shape.seed.wrapping_add(k)).collect();
    let stats = run_trials_with_seeds(shape.n, shape.d, r, &seeds, metric)?;
    match cfg.format {
        Format::Csv => finish({
            let mut w = create(&cfg.out, "trials.csv")?;
            writeln!(w, "seed,f_r")?;
            for (s, v) in stats.seeds.iter().zip(&stats.values) {
                writeln!(w, "{s},{v}")?;
            }
            w
        })?,
        Format::Json => {
            let rows: Vec<Value> = stats.seeds.iter().zip(&stats.values).map(|(s, v)| json!({"seed": s, "f_r": v})).collect();
            io::write_json(create(&cfg.out, "trials.json")?, &rows)?
        }
    }
    io::write_json(create(&cfg.out, "summary.json")?, &stats)?;
    Ok(Outcome::ok(json!({
        "n": stats.n, "d": stats.d, "r": stats.r, "trials": stats.trials,
        "mean": stats.mean, "std": stats.std, "max_deviation": stats.max_deviation,
        "max_normalized": stats.max_normalized(),
    })))
}

pub fn cmd_perturb(cfg: &RunConfig, shape: &Shape, r: f64, samples: usize, metric: Metric) -> Result<Outcome> {
    let stats = perturbation_experiment(shape.n, shape.d, r, samples, shape.seed, metric)?;
    if cfg.format == Format::Csv {
        let mut w = create(&cfg.out, "perturb.csv")?;
        writeln!(w, "k,difference")?;
        for (k, v) in stats.differences.iter().enumerate() {
            writeln!(w, "{k},{v}")?;
        }
        finish(w)?;
    }
    io::write_json(create(&cfg.out, "perturb.json")?, &stats)?;
    Ok(Outcome::ok(json!({
        "n": stats.n, "samples": stats.samples, "max": stats.max, "p50": stats.p50,
        "p90": stats.p90, "p99": stats.p99, "bound": stats.bound,
    })))
}

pub fn cmd_epsilon(cfg: &RunConfig, shape: &Shape, r: f64, probes: usize) -> Result<Outcome> {
    let p = sample_points(shape.n, shape.d, shape.seed)?;
    let report = epsilon_sample_check(&p, r, probes, shape.seed)?;
    io::write_json(create(&cfg.out, "epsilon.json")?, &report)?;
    Ok(Outcome::ok(serde_json::to_value(&report)?))
}

/// One line of the benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub algorithm: &'static str,
    pub median_ms: f64,
    pub p10_ms: f64,
    pub p90_ms: f64,
}

/// Nearest-rank quantile of sorted samples.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    sorted[((q * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1)]
}

/// Wall-clock times of `reps` runs on samples with seeds `seed..seed + reps`;
/// sampling is not timed.
pub fn time_algorithm(algo: BenchAlgo, n: usize, d: usize, r: f64, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(reps);
    for k in 0..reps as u64 {
        let p = sample_points(n, d, seed.wrapping_add(k))?;
        let params = Params::with_default_c(n, d)?;
        let t = Instant::now();
        match algo {
            BenchAlgo::Hull => drop(hull_quadtree(&p)?),
            BenchAlgo::Delaunay => drop(dt_build(&p, &params)?),
            BenchAlgo::MstDc => drop(mst_divide_conquer(&p, &params)?),
            BenchAlgo::MstNlogn => drop(mst_nlogn(&p, &params)?),
            BenchAlgo::Distsel => drop(count_pairs_within(&p, r)?),
        }
        out.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(out)
}

pub fn bench_row(algo: BenchAlgo, n: usize, d: usize, r: f64, reps: usize, seed: u64) -> Result<BenchRow> {
    if reps == 0 {
        return param("need at least one repetition");
    }
    let mut t = time_algorithm(algo, n, d, r, reps, seed)?;
    t.sort_unstable_by(f64::total_cmp);
    Ok(BenchRow {
        n,
        algorithm: algo.name(),
        median_ms: quantile(&t, 0.5),
        p10_ms: quantile(&t, 0.1),
        p90_ms: quantile(&t, 0.9),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_bench(cfg: &RunConfig, algos: &[BenchAlgo], d: usize, n_min: usize, n_max: usize, reps: usize, r: f64, seed: u64) -> Result<Outcome> {
    if n_min == 0 || n_max < n_min {
        return param("need 0 < n_min <= n_max");
    }
    let mut ladder = vec![n_min];
    while let Some(&last) = ladder.last() {
        if last * 2 > n_max {
            break;
        }
        ladder.push(last * 2);
    }
    let mut rows = Vec::new();
    for &algo in algos {
        for &n in &ladder {
            let row = bench_row(algo, n, d, r, reps, seed)?;
            log::info!("{} n={} median {:.1} ms", row.algorithm, n, row.median_ms);
            rows.push(row);
        }
    }
    let mut w = create(&cfg.out, "bench.csv")?;
    writeln!(w, "n,algorithm,median_ms,p10_ms,p90_ms")?;
    for row in &rows {
        writeln!(w, "{},{},{:.3},{:.3},{:.3}", row.n, row.algorithm, row.median_ms, row.p10_ms, row.p90_ms)?;
    }
    finish(w)?;
    Ok(Outcome::ok(serde_json::to_value(&rows)?))
}

fn dispatch(cfg: &RunConfig, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Sample(s) => cmd_sample(cfg, s),
        Command::Hull { shape, verify } => cmd_hull(cfg, shape, *verify),
        Command::Delaunay { shape, verify } => cmd_delaunay(cfg, shape, *verify),
        Command::Mst { shape, algo, verify } => cmd_mst(cfg, shape, *algo, *verify),
        Command::Distsel { shape, r, grid, verify } => cmd_distsel(cfg, shape, *r, *grid, *verify),
        Command::Concentrate { shape, r, trials, metric } => cmd_concentrate(cfg, shape, *r, *trials, *metric),
        Command::Perturb { shape, r, samples, metric } => cmd_perturb(cfg, shape, *r, *samples, *metric),
        Command::Epsilon { shape, r, probes } => cmd_epsilon(cfg, shape, *r, *probes),
        Command::Bench { algo, d, n_min, n_max, reps, r, seed } => cmd_bench(cfg, algo, *d, *n_min, *n_max, *reps, *r, *seed),
    }
}

/// Runs a parsed command line: writes the manifest, the results and the timing file.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(cli);
    fs::create_dir_all(&cfg.out)?;
    io::write_json(
        create(&cfg.out, "manifest.json")?,
        &json!({"library": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION"), "config": &cfg}),
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let t = Instant::now();
    let out = pool.install(|| dispatch(&cfg, &cli.command))?;
    io::write_json(
        create(&cfg.out, "timing.json")?,
        &json!({"elapsed_ms": t.elapsed().as_secs_f64() * 1e3, "threads": pool.current_num_threads()}),
    )?;
    Ok(out)
}

/// Entry point for the binary; returns the process exit status
/// (0 success, 1 error, 2 verification mismatch).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.summary).unwrap_or_default());
            match out.failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    2
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
