//! Close-pair counts `f_r` on random point sets, and how tightly they concentrate.
//!
//! The default metric is the flat-torus distance, which removes boundary effects;
//! the Euclidean metric is available as an option with no bound attached.

use rand_core::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::points::{dist2, sample_points, seeded_rng, torus_dist2, unit_f64, PointSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Toroidal,
    Euclidean,
}

impl Metric {
    #[inline]
    fn dist2(self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Metric::Toroidal => torus_dist2(p, q),
            Metric::Euclidean => dist2(p, q),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return param(format!("radius r={r} must be positive and finite"));
    }
    Ok(())
}

/// Buckets of side at least `r`; the torus wraps neighbour indices.
struct PairGrid {
    side: usize,
    dim: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl PairGrid {
    /// `None` when fewer than 3 cells per axis fit, where wrapped neighbourhoods repeat.
    fn new(points: &PointSet, r: f64) -> Option<Self> {
        let (n, dim) = (points.len(), points.dim());
        let mut side = (1.0 / r).floor().min(1e6) as usize;
        while side >= 3 && (side as f64).powi(dim as i32) > 4.0 * n as f64 + 64.0 {
            side -= 1;
        }
        if side < 3 {
            return None;
        }
        let cells = side.pow(dim as u32);
        let mut start = vec![0u32; cells + 1];
        let cell: Vec<usize> = points.iter().map(|p| Self::cell_of(side, p)).collect();
        for &c in &cell {
            start[c + 1] += 1;
        }
        for c in 0..cells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; n];
        for (k, &c) in cell.iter().enumerate() {
            items[fill[c] as usize] = k as u32;
            fill[c] += 1;
        }
        Some(PairGrid {
            side,
            dim,
            start,
            items,
        })
    }

    fn cell_of(side: usize, p: &[f64]) -> usize {
        p.iter()
            .rev()
            .fold(0, |acc, &x| acc * side + ((x * side as f64) as usize).min(side - 1))
    }

    fn bucket(&self, c: usize) -> &[u32] {
        &self.items[self.start[c] as usize..self.start[c + 1] as usize]
    }

    /// Cells adjacent to `c` (itself included) under `metric`, deduplicated and sorted.
    fn neighbours(&self, c: usize, metric: Metric, out: &mut Vec<usize>) {
        out.clear();
        let s = self.side as isize;
        let mut coord = [0isize; 8];
        let mut rest = c;
        for a in coord.iter_mut().take(self.dim) {
            *a = (rest % self.side) as isize;
            rest /= self.side;
        }
        'offsets: for code in 0..3usize.pow(self.dim as u32) {
            let mut k = code;
            let mut idx = 0usize;
            let mut stride = 1usize;
            for &a in coord.iter().take(self.dim) {
                let mut x = a + (k % 3) as isize - 1;
                k /= 3;
                if !(0..s).contains(&x) {
                    if metric == Metric::Euclidean {
                        continue 'offsets;
                    }
                    x = x.rem_euclid(s);
                }
                idx += x as usize * stride;
                stride *= self.side;
            }
            out.push(idx);
        }
        out.sort_unstable();
        out.dedup();
    }

    /// Points of `points` within `r` of `center`.
    fn count_ball(&self, points: &PointSet, center: &[f64], r: f64, metric: Metric, scratch: &mut Vec<usize>) -> u64 {
        self.neighbours(Self::cell_of(self.side, center), metric, scratch);
        let r2 = r * r;
        scratch
            .iter()
            .map(|&c| {
                self.bucket(c)
                    .iter()
                    .filter(|&&q| metric.dist2(center, points.point(q as usize)) <= r2)
                    .count() as u64
            })
            .sum()
    }
}

/// Quadratic count of pairs `i < j` with distance at most `r`.
pub fn f_r_bruteforce(points: &PointSet, r: f64, metric: Metric) -> Result<u64> {
    check_radius(r)?;
    let (n, r2) = (points.len(), r * r);
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let p = points.point(i);
            (i + 1..n)
                .filter(|&j| metric.dist2(p, points.point(j)) <= r2)
                .count() as u64
        })
        .sum())
}

/// `f_r` under the toroidal metric.
pub fn f_r_count(points: &PointSet, r: f64) -> Result<u64> {
    f_r_count_with(points, r, Metric::Toroidal)
}

/// `f_r` under `metric`, on a grid of cells at least `r` wide; a pair is counted
/// from the lower-indexed of its two cells.
pub fn f_r_count_with(points: &PointSet, r: f64, metric: Metric) -> Result<u64> {
    check_radius(r)?;
    let Some(grid) = PairGrid::new(points, r) else {
        return f_r_bruteforce(points, r, metric);
    };
    let r2 = r * r;
    let cells = grid.start.len() - 1;
    Ok((0..cells)
        .into_par_iter()
        .map_init(Vec::new, |nb, c| {
            let own = grid.bucket(c);
            if own.is_empty() {
                return 0;
            }
            grid.neighbours(c, metric, nb);
            let mut total = 0u64;
            for &c2 in nb.iter().filter(|&&c2| c2 >= c) {
                let other = grid.bucket(c2);
                for (k, &p) in own.iter().enumerate() {
                    let rest = if c2 == c { &own[k + 1..] } else { other };
                    let pp = points.point(p as usize);
                    total += rest
                        .iter()
                        .filter(|&&q| metric.dist2(pp, points.point(q as usize)) <= r2)
                        .count() as u64;
                }
            }
            total
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    pub metric: Metric,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub values: Vec<u64>,
    pub mean: f64,
    pub std: f64,
    pub max_deviation: f64,
    /// `|f_r - mean| / (n ln n)` per trial.
    pub normalized: Vec<f64>,
}

impl TrialStats {
    pub fn max_normalized(&self) -> f64 {
        self.normalized.iter().copied().fold(0.0, f64::max)
    }
}

/// `f_r` on `t` samples with seeds `base_seed..base_seed + t`.
pub fn run_trials(n: usize, d: usize, r: f64, t: usize, base_seed: u64) -> Result<TrialStats> {
    let seeds: Vec<u64> = (0..t as u64).map(|k| base_seed.wrapping_add(k)).collect();
    run_trials_with_seeds(n, d, r, &seeds, Metric::Toroidal)
}

/// `f_r` on one sample per seed; seeds must be distinct and at least two.
pub fn run_trials_with_seeds(n: usize, d: usize, r: f64, seeds: &[u64], metric: Metric) -> Result<TrialStats> {
    check_radius(r)?;
    if seeds.len() < 2 {
        return param("at least two trials are needed");
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return param("trial seeds must be distinct");
    }
    let values = seeds
        .par_iter()
        .map(|&s| f_r_count_with(&sample_points(n, d, s)?, r, metric))
        .collect::<Result<Vec<u64>>>()?;
    let t = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / t;
    let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let scale = n as f64 * (n as f64).ln();
    let normalized: Vec<f64> = values.iter().map(|&v| (v as f64 - mean).abs() / scale).collect();
    let max_deviation = values.iter().map(|&v| (v as f64 - mean).abs()).fold(0.0, f64::max);
    Ok(TrialStats {
        n,
        d,
        r,
        metric,
        trials: values.len(),
        seeds: seeds.to_vec(),
        values,
        mean,
        std: var.sqrt(),
        max_deviation,
        normalized,
    })
}

fn partners(points: &PointSet, i: usize, p: &[f64], r2: f64, metric: Metric) -> u64 {
    (0..points.len())
        .filter(|&j| j != i && metric.dist2(p, points.point(j)) <= r2)
        .count() as u64
}

/// `|f_r(P) - f_r(P')|` where `P'` has coordinate `axis` of point `i` set to `value`.
/// Only pairs through point `i` change, so this costs `O(n)`.
pub fn perturbation_difference(
    points: &PointSet,
    r: f64,
    i: usize,
    axis: usize,
    value: f64,
    metric: Metric,
) -> Result<u64> {
    check_radius(r)?;
    if i >= points.len() || axis >= points.dim() {
        return param(format!("no coordinate ({i}, {axis})"));
    }
    if !(0.0..1.0).contains(&value) {
        return param(format!("coordinate {value} is outside [0,1)"));
    }
    let r2 = r * r;
    let before = partners(points, i, points.point(i), r2, metric);
    let mut moved = points.point(i).to_vec();
    moved[axis] = value;
    let after = partners(points, i, &moved, r2, metric);
    Ok(before.abs_diff(after))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationStats {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    pub samples: usize,
    pub max: u64,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    /// `10 sqrt(n ln n)`, the reference line the maximum is compared against.
    pub bound: f64,
    pub differences: Vec<u64>,
}

/// `samples` random single-coordinate perturbations of one sample of size `n`.
pub fn perturbation_experiment(
    n: usize,
    d: usize,
    r: f64,
    samples: usize,
    seed: u64,
    metric: Metric,
) -> Result<PerturbationStats> {
    if samples == 0 {
        return param("need at least one perturbation");
    }
    let points = sample_points(n, d, seed)?;
    let mut rng = seeded_rng(seed ^ 0x5eed_0f_9e27);
    let moves: Vec<(usize, usize, f64)> = (0..samples)
        .map(|_| {
            let i = (rng.next_u64() % n as u64) as usize;
            let axis = (rng.next_u64() % d as u64) as usize;
            (i, axis, unit_f64(&mut rng))
        })
        .collect();
    let differences = moves
        .par_iter()
        .map(|&(i, axis, v)| perturbation_difference(&points, r, i, axis, v, metric))
        .collect::<Result<Vec<u64>>>()?;
    let mut sorted = differences.clone();
    sorted.sort_unstable();
    let q = |f: f64| sorted[((f * (samples - 1) as f64).round() as usize).min(samples - 1)];
    Ok(PerturbationStats {
        n,
        d,
        r,
        samples,
        max: *sorted.last().unwrap_or(&0),
        p50: q(0.5),
        p90: q(0.9),
        p99: q(0.99),
        bound: 10.0 * (n as f64 * (n as f64).ln()).sqrt(),
        differences,
    })
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * std::f64::consts::TAU / d as f64,
    }
}

/// Volume of a radius-`r` ball on the torus: closed form for `r <= 1/2`,
/// otherwise a `10^6`-sample estimate (second component `true`).
pub fn torus_ball_volume(d: usize, r: f64, seed: u64) -> (f64, bool) {
    if r <= 0.5 {
        return (unit_ball_volume(d) * r.powi(d as i32), false);
    }
    const SAMPLES: usize = 1_000_000;
    let mut rng = seeded_rng(seed);
    let origin = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..SAMPLES {
        for v in x.iter_mut() {
            *v = unit_f64(&mut rng);
        }
        if torus_dist2(&origin, &x) <= r * r {
            hits += 1;
        }
    }
    (hits as f64 / SAMPLES as f64, true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    pub probes: usize,
    pub volume: f64,
    pub volume_estimated: bool,
    pub max_discrepancy: f64,
    /// `sqrt(4 n ln n)`.
    pub bound: f64,
}

/// Largest `| |P cap ball_T(c, r)| - volume * n |` over the given centres.
pub fn discrepancy_at(points: &PointSet, r: f64, volume: f64, centres: &[Vec<f64>]) -> Result<f64> {
    check_radius(r)?;
    let n = points.len() as f64;
    let grid = PairGrid::new(points, r);
    let r2 = r * r;
    Ok(centres
        .par_iter()
        .map_init(Vec::new, |scratch, c| {
            let k = match &grid {
                Some(g) => g.count_ball(points, c, r, Metric::Toroidal, scratch),
                None => points.iter().filter(|q| torus_dist2(c, q) <= r2).count() as u64,
            };
            (k as f64 - volume * n).abs()
        })
        .reduce(|| 0.0, f64::max))
}

/// Discrepancy of `P` against toroidal balls of radius `r` at `m` uniform centres.
pub fn epsilon_sample_check(points: &PointSet, r: f64, m: usize, seed: u64) -> Result<EpsilonReport> {
    if m == 0 {
        return param("need at least one probe");
    }
    check_radius(r)?;
    let d = points.dim();
    let mut rng = seeded_rng(seed);
    let centres: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d).map(|_| unit_f64(&mut rng)).collect())
        .collect();
    let (volume, volume_estimated) = torus_ball_volume(d, r, seed.wrapping_add(1));
    let n = points.len();
    Ok(EpsilonReport {
        n,
        d,
        r,
        probes: m,
        volume,
        volume_estimated,
        max_discrepancy: discrepancy_at(points, r, volume, &centres)?,
        bound: (4.0 * n as f64 * (n as f64).ln()).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_pair_and_all_pairs() {
        let p = PointSet::from_rows(2, &[[0.05, 0.05], [0.95, 0.95]]).unwrap();
        assert_eq!(f_r_count(&p, 0.15).unwrap(), 1);
        assert_eq!(f_r_count_with(&p, 0.15, Metric::Euclidean).unwrap(), 0);
        let p = sample_points(60, 3, 2).unwrap();
        assert_eq!(f_r_count(&p, 3f64.sqrt() / 2.0).unwrap(), 60 * 59 / 2);
        assert!(f_r_count(&p, 0.0).is_err());
    }

    #[test]
    fn grid_matches_scan() {
        for (d, seed) in [(2, 1u64), (2, 2), (3, 3), (4, 4)] {
            let p = sample_points(800, d, seed).unwrap();
            for r in [0.02, 0.07, 0.15, 0.26, 0.4] {
                for metric in [Metric::Toroidal, Metric::Euclidean] {
                    assert_eq!(
                        f_r_count_with(&p, r, metric).unwrap(),
                        f_r_bruteforce(&p, r, metric).unwrap(),
                        "d={d} r={r} {metric:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn translation_invariant_and_monotone() {
        let p = sample_points(1000, 2, 5).unwrap();
        let shifted: Vec<Vec<f64>> = p
            .iter()
            .map(|x| x.iter().map(|&v| (v + 0.375) % 1.0).collect())
            .collect();
        let q = PointSet::from_rows(2, &shifted).unwrap();
        let mut last = 0;
        for k in 1..=20 {
            let r = 0.025 * k as f64;
            let f = f_r_count(&p, r).unwrap();
            assert_eq!(f, f_r_count(&q, r).unwrap(), "r={r}");
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn trials_contract() {
        assert!(run_trials_with_seeds(100, 2, 0.1, &[4, 4], Metric::Toroidal).is_err());
        assert!(run_trials(100, 2, 0.1, 1, 0).is_err());
        let s = run_trials(300, 2, 0.1, 8, 10).unwrap();
        assert_eq!(s.seeds, (10..18).collect::<Vec<_>>());
        assert!(s.values.iter().all(|&v| v <= 300 * 299 / 2));
        assert!(s.max_normalized() * 300.0 * 300f64.ln() >= s.max_deviation - 1e-6);
        assert!(s.std > 0.0);
    }

    #[test]
    fn perturbation_basics() {
        let p = sample_points(200, 2, 3).unwrap();
        let same = p.point(7)[1];
        assert_eq!(perturbation_difference(&p, 0.2, 7, 1, same, Metric::Toroidal).unwrap(), 0);
        let two = sample_points(2, 2, 3).unwrap();
        for v in [0.0, 0.3, 0.99] {
            assert!(perturbation_difference(&two, 0.4, 0, 0, v, Metric::Toroidal).unwrap() <= 1);
        }
        // direct recount
        let (i, axis, v, r) = (11, 0, 0.42, 0.15);
        let mut q = p.clone();
        q.set_coord(i, axis, v).unwrap();
        let direct = f_r_bruteforce(&p, r, Metric::Toroidal)
            .unwrap()
            .abs_diff(f_r_bruteforce(&q, r, Metric::Toroidal).unwrap());
        assert_eq!(perturbation_difference(&p, r, i, axis, v, Metric::Toroidal).unwrap(), direct);
        let stats = perturbation_experiment(200, 2, 0.15, 50, 1, Metric::Toroidal).unwrap();
        assert_eq!(stats.differences.len(), 50);
        assert!(stats.p50 <= stats.p90 && stats.p90 <= stats.max);
    }

    #[test]
    fn volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        let (v, est) = torus_ball_volume(2, 0.25, 1);
        assert!(!est && (v - std::f64::consts::PI / 16.0).abs() < 1e-15);
        // r = sqrt(2)/2 covers the whole torus
        let (v, est) = torus_ball_volume(2, 0.75, 1);
        assert!(est && v == 1.0);
        let (v, est) = torus_ball_volume(2, 0.6, 1);
        let exact_disk = std::f64::consts::PI * 0.36;
        assert!(est && v < exact_disk && v > 0.9);
    }

    #[test]
    fn epsilon_degenerate_and_contract() {
        let rows = vec![[0.1, 0.1]; 50];
        let p = PointSet::from_rows(2, &rows).unwrap();
        let r = 0.05;
        let vol = unit_ball_volume(2) * r * r;
        let far = discrepancy_at(&p, r, vol, &[vec![0.6, 0.6]]).unwrap();
        assert!((far - vol * 50.0).abs() < 1e-12);
        assert!(epsilon_sample_check(&p, r, 0, 1).is_err());
        let q = sample_points(2000, 2, 6).unwrap();
        let rep = epsilon_sample_check(&q, 0.25, 500, 2).unwrap();
        assert!(rep.max_discrepancy <= rep.bound, "{rep:?}");
    }
}
