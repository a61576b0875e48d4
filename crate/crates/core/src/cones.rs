//! Cone covers, nearest-in-cone search, reach and ward, and the truncated Yao graph.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::grid::UniformGrid;
use crate::points::{dist, seeded_rng, unit_f64, Params, PointSet};

pub const DEFAULT_HALF_ANGLE: f64 = PI / 12.0;
/// Half-angle of the sampled covers used for `d >= 4` (only the degree experiment needs them).
pub const HIGH_DIM_HALF_ANGLE: f64 = PI / 6.0;

const MESH_POINTS: usize = 20_480;
const MESH_MARGIN: f64 = 1.5 * PI / 180.0;
const CERT_SAMPLES: usize = 100_000;
const Z_BINS: usize = 32;
const AZ_BINS: usize = 64;

/// A finite set of cones with a common apex-independent axis list and half-angle.
///
/// Membership is closed: `q - p` lies in cone `j` when its angle to `direction(j)`
/// is at most the half-angle.
#[derive(Clone, Debug)]
pub struct ConeSet {
    dim: usize,
    half_angle: f64,
    cos_half: f64,
    dirs: Vec<f64>,
    lookup: Lookup,
}

#[derive(Clone, Debug)]
enum Lookup {
    Circle,
    Bins(Vec<Vec<u16>>),
    Scan,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gaussian(rng: &mut impl rand_core::RngCore) -> f64 {
    // Box-Muller, one output per call
    let u = 1.0 - unit_f64(rng);
    let v = unit_f64(rng);
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

fn random_unit(d: usize, rng: &mut impl rand_core::RngCore) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = norm(&v);
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn fibonacci_sphere(m: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Greedy set cover: picks sample points as axes until every sample is within
/// `cos_cap` of a chosen axis. `nbrs[c]` lists the samples a cap at `c` covers.
fn greedy_cover(nbrs: &[Vec<u32>]) -> Vec<usize> {
    let m = nbrs.len();
    let mut covered = vec![false; m];
    let mut left = m;
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        nbrs.iter().enumerate().map(|(c, n)| (n.len(), Reverse(c))).collect();
    let mut chosen = Vec::new();
    while left > 0 {
        let Some((g, Reverse(c))) = heap.pop() else {
            break;
        };
        let gain = nbrs[c].iter().filter(|&&s| !covered[s as usize]).count();
        if gain == 0 {
            continue;
        }
        if gain < g {
            heap.push((gain, Reverse(c)));
            continue;
        }
        chosen.push(c);
        for &s in &nbrs[c] {
            if !covered[s as usize] {
                covered[s as usize] = true;
                left -= 1;
            }
        }
    }
    chosen
}

fn sphere_cover(half_angle: f64) -> Vec<f64> {
    let mesh = fibonacci_sphere(MESH_POINTS);
    let cap = half_angle - MESH_MARGIN;
    let cos_cap = cap.cos();
    // mesh is sorted by decreasing z; an angle <= cap bounds |dz| by 2 sin(cap / 2) <= cap
    let dz = cap + 1e-9;
    let nbrs: Vec<Vec<u32>> = (0..MESH_POINTS)
        .map(|i| {
            let zi = mesh[i][2];
            let lo = mesh.partition_point(|p| p[2] > zi + dz);
            let hi = mesh.partition_point(|p| p[2] >= zi - dz);
            (lo..hi)
                .filter(|&j| dot(&mesh[i], &mesh[j]) >= cos_cap)
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    greedy_cover(&nbrs)
        .into_iter()
        .flat_map(|c| mesh[c])
        .collect()
}

fn sampled_cover(d: usize, half_angle: f64) -> Vec<f64> {
    let m = match d {
        4 => 8_000,
        _ => 16_000,
    };
    let mut rng = seeded_rng(0x5eed_c0de ^ d as u64);
    let samples: Vec<Vec<f64>> = (0..m).map(|_| random_unit(d, &mut rng)).collect();
    let cos_cap = (0.9 * half_angle).cos();
    let nbrs: Vec<Vec<u32>> = samples
        .iter()
        .map(|a| {
            samples
                .iter()
                .enumerate()
                .filter(|(_, b)| dot(a, b) >= cos_cap)
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    greedy_cover(&nbrs)
        .into_iter()
        .flat_map(|c| samples[c].clone())
        .collect()
}

/// Cone cover of the directions of `R^d`. `d = 2` uses `ceil(pi / half_angle)`
/// evenly rotated axes; `d = 3` greedily covers a 20480-point sphere mesh and
/// certifies the result against 10^5 random directions.
pub fn build_cone_cover(d: usize, half_angle: f64) -> Result<ConeSet> {
    if !(2..=3).contains(&d) {
        return param(format!("cone covers are built for d in {{2,3}}, got {d}"));
    }
    if !(half_angle > 0.0 && half_angle <= PI / 4.0 + 1e-15) {
        return param(format!("half-angle {half_angle} outside (0, pi/4]"));
    }
    let dirs = if d == 2 {
        let k = (PI / half_angle - 1e-9).ceil() as usize;
        (0..k)
            .flat_map(|j| {
                let t = 2.0 * PI * j as f64 / k as f64;
                [t.cos(), t.sin()]
            })
            .collect()
    } else {
        if half_angle <= MESH_MARGIN * 2.0 {
            return param(format!("half-angle {half_angle} too narrow for the sphere mesh"));
        }
        sphere_cover(half_angle)
    };
    let set = ConeSet::assemble(d, half_angle, dirs);
    set.certify()?;
    Ok(set)
}

/// Greedy cover of a random sample of directions for `d >= 4`. Only the
/// nearest-axis guarantee holds: a direction always belongs to its closest axis.
pub fn build_sampled_cone_cover(d: usize, half_angle: f64) -> Result<ConeSet> {
    if !(4..=8).contains(&d) {
        return param(format!("sampled covers are for 4 <= d <= 8, got {d}"));
    }
    Ok(ConeSet::assemble(d, half_angle, sampled_cover(d, half_angle)))
}

/// The default cover for dimension `d`, built once per process.
pub fn default_cones(d: usize) -> Result<&'static ConeSet> {
    static CACHE: [OnceLock<std::result::Result<ConeSet, String>>; 9] =
        [const { OnceLock::new() }; 9];
    if !(2..=8).contains(&d) {
        return param(format!("no cone cover for d={d}"));
    }
    CACHE[d]
        .get_or_init(|| {
            let r = if d <= 3 {
                build_cone_cover(d, DEFAULT_HALF_ANGLE)
            } else {
                build_sampled_cone_cover(d, HIGH_DIM_HALF_ANGLE)
            };
            r.map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(|e| Error::Construction(e.clone()))
}

impl ConeSet {
    fn assemble(dim: usize, half_angle: f64, dirs: Vec<f64>) -> Self {
        let mut set = ConeSet {
            dim,
            half_angle,
            cos_half: half_angle.cos(),
            dirs,
            lookup: Lookup::Scan,
        };
        set.lookup = match dim {
            2 => Lookup::Circle,
            3 => Lookup::Bins(set.bin_candidates()),
            _ => Lookup::Scan,
        };
        set
    }

    fn bin_of(v: &[f64]) -> usize {
        let z = (v[2] / norm(v)).clamp(-1.0, 1.0);
        let zb = (((z + 1.0) * 0.5 * Z_BINS as f64) as usize).min(Z_BINS - 1);
        let az = v[1].atan2(v[0]) + PI;
        let ab = ((az / (2.0 * PI) * AZ_BINS as f64) as usize).min(AZ_BINS - 1);
        zb * AZ_BINS + ab
    }

    fn bin_candidates(&self) -> Vec<Vec<u16>> {
        let at = |z: f64, a: f64| {
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = a - PI;
            [r * t.cos(), r * t.sin(), z]
        };
        let mut out = Vec::with_capacity(Z_BINS * AZ_BINS);
        for zb in 0..Z_BINS {
            let (z0, z1) = (
                -1.0 + 2.0 * zb as f64 / Z_BINS as f64,
                -1.0 + 2.0 * (zb + 1) as f64 / Z_BINS as f64,
            );
            for ab in 0..AZ_BINS {
                let (a0, a1) = (
                    2.0 * PI * ab as f64 / AZ_BINS as f64,
                    2.0 * PI * (ab + 1) as f64 / AZ_BINS as f64,
                );
                let c = at(0.5 * (z0 + z1), 0.5 * (a0 + a1));
                let mut rad: f64 = 0.0;
                for s in 0..=8 {
                    let t = s as f64 / 8.0;
                    for p in [
                        at(z0, a0 + t * (a1 - a0)),
                        at(z1, a0 + t * (a1 - a0)),
                        at(z0 + t * (z1 - z0), a0),
                        at(z0 + t * (z1 - z0), a1),
                    ] {
                        rad = rad.max(dot(&c, &p).clamp(-1.0, 1.0).acos());
                    }
                }
                let reach = (self.half_angle + 1.1 * rad + 1e-3).min(PI);
                let cos_r = reach.cos();
                out.push(
                    (0..self.len())
                        .filter(|&j| dot(&c, self.direction(j)) >= cos_r)
                        .map(|j| j as u16)
                        .collect(),
                );
            }
        }
        out
    }

    fn certify(&self) -> Result<()> {
        let mut rng = seeded_rng(0xc0fe_u64);
        let tol = (self.half_angle * (1.0 + 1e-9)).cos();
        for _ in 0..CERT_SAMPLES {
            let v = random_unit(self.dim, &mut rng);
            let ok = (0..self.len()).any(|j| dot(&v, self.direction(j)) >= tol);
            if !ok {
                return Err(Error::Construction(format!(
                    "cone cover with {} axes leaves direction {v:?} uncovered",
                    self.len()
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn direction(&self, j: usize) -> &[f64] {
        &self.dirs[j * self.dim..(j + 1) * self.dim]
    }

    /// Does the nonzero vector `v` lie in cone `j`?
    #[inline]
    pub fn contains(&self, j: usize, v: &[f64]) -> bool {
        dot(v, self.direction(j)) >= norm(v) * self.cos_half
    }

    /// Writes every cone holding the nonzero vector `v` into `out`. At least one
    /// cone is always reported: the one whose axis is closest to `v`.
    pub fn cones_containing(&self, v: &[f64], out: &mut Vec<u16>) {
        out.clear();
        let nv = norm(v);
        let lim = nv * self.cos_half;
        let mut best = (f64::NEG_INFINITY, 0u16);
        let mut consider = |j: usize, out: &mut Vec<u16>| {
            let s = dot(v, self.direction(j));
            if s >= lim {
                out.push(j as u16);
            }
            if s > best.0 {
                best = (s, j as u16);
            }
        };
        match &self.lookup {
            Lookup::Circle => {
                let k = self.len();
                let t = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
                let j0 = ((t * k as f64 / (2.0 * PI)).round() as usize) % k;
                for j in [(j0 + k - 1) % k, j0, (j0 + 1) % k] {
                    consider(j, out);
                }
            }
            Lookup::Bins(bins) => {
                for &j in &bins[Self::bin_of(v)] {
                    consider(j as usize, out);
                }
            }
            Lookup::Scan => {
                for j in 0..self.len() {
                    consider(j, out);
                }
            }
        }
        if out.is_empty() || (self.dim == 2 && !out.contains(&best.1)) {
            out.push(best.1);
        }
    }
}

/// Is `q` in the closed cone with apex `apex`, axis `dir` and the given half-angle?
pub fn in_cone(apex: &[f64], dir: &[f64], half_angle: f64, q: &[f64]) -> Result<bool> {
    let v: Vec<f64> = q.iter().zip(apex).map(|(a, b)| a - b).collect();
    let nv = norm(&v);
    if nv == 0.0 {
        return param("query point coincides with the apex");
    }
    let c = (dot(&v, dir) / (nv * norm(dir))).clamp(-1.0, 1.0);
    Ok(c.acos() <= half_angle)
}

/// Nearest point found in each cone: `(index, distance)`.
pub type ConeHits = Vec<Option<(u32, f64)>>;

#[inline]
fn better(cand: (u32, f64), cur: Option<(u32, f64)>) -> bool {
    match cur {
        None => true,
        Some((i, d)) => cand.1 < d || (cand.1 == d && cand.0 < i),
    }
}

/// Doubling search around `P[p]` with radii `2^i / N`. Stops once every cone
/// (restricted to `only`, if given) has a hit no farther than the current radius,
/// or once the radius reaches `cutoff`. Hits at distance `>= cutoff` are dropped.
fn cone_search(
    grid: &UniformGrid,
    points: &PointSet,
    p: usize,
    cones: &ConeSet,
    cutoff: f64,
    only: Option<usize>,
) -> ConeHits {
    let k = cones.len();
    let mut hits: ConeHits = vec![None; k];
    if cutoff <= 0.0 {
        return hits;
    }
    let center = points.point(p);
    let d = points.dim();
    let mut v = vec![0.0; d];
    let mut member = Vec::with_capacity(8);
    let mut r = 1.0 / grid.cells_per_axis() as f64;
    let mut prev = -1.0f64;
    loop {
        let rr = r.min(cutoff);
        grid.for_each_in_ball(points, center, rr, |q, dq| {
            if dq <= prev || q as usize == p || dq == 0.0 {
                return;
            }
            let qp = points.point(q as usize);
            for t in 0..d {
                v[t] = qp[t] - center[t];
            }
            cones.cones_containing(&v, &mut member);
            for &j in &member {
                let j = j as usize;
                if only.is_none_or(|o| o == j) && better((q, dq), hits[j]) {
                    hits[j] = Some((q, dq));
                }
            }
        });
        let settled = |h: &Option<(u32, f64)>| matches!(h, Some((_, dd)) if *dd <= rr);
        let done = match only {
            Some(j) => settled(&hits[j]),
            None => hits.iter().all(settled),
        };
        if done || rr >= cutoff {
            break;
        }
        prev = rr;
        r *= 2.0;
    }
    for h in hits.iter_mut() {
        if matches!(h, Some((_, dd)) if *dd >= cutoff) {
            *h = None;
        }
    }
    hits
}

/// Nearest-in-cone hits for every cone of `cones` around `P[p]`, each strictly within `cutoff`.
pub fn nearest_in_cones(
    grid: &UniformGrid,
    points: &PointSet,
    p: usize,
    cones: &ConeSet,
    cutoff: f64,
) -> ConeHits {
    cone_search(grid, points, p, cones, cutoff, None)
}

/// Closest `q != p` in cone `cone` of `cones` with `dist(p, q) < cutoff`.
pub fn nearest_in_cone(
    grid: &UniformGrid,
    points: &PointSet,
    p: usize,
    cones: &ConeSet,
    cone: usize,
    cutoff: f64,
) -> Result<Option<u32>> {
    if !(cutoff > 0.0) {
        return param("cutoff must be positive");
    }
    if cone >= cones.len() {
        return param(format!("cone {cone} out of range"));
    }
    Ok(cone_search(grid, points, p, cones, cutoff, Some(cone))[cone].map(|h| h.0))
}

/// Largest nearest-in-cone distance over all cones, or `None` if some cone has
/// no point strictly within `cutoff`.
pub fn reach(
    grid: &UniformGrid,
    points: &PointSet,
    p: usize,
    cones: &ConeSet,
    cutoff: f64,
) -> Option<f64> {
    reach_of_hits(&nearest_in_cones(grid, points, p, cones, cutoff))
}

pub(crate) fn reach_of_hits(hits: &ConeHits) -> Option<f64> {
    hits.iter()
        .try_fold(0.0f64, |acc, h| h.map(|(_, d)| acc.max(d)))
}

/// Points within `2 * reach` of `P[p]`, `p` included, sorted.
pub fn ward(grid: &UniformGrid, points: &PointSet, p: usize, reach: f64) -> Vec<u32> {
    grid.ball_scan(points, points.point(p), 2.0 * reach)
}

/// Per-cone nearest-neighbor graph with every edge shorter than `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct YaoGraph {
    pub n: usize,
    pub edges: Vec<(u32, u32, f64)>,
    pub cutoff: f64,
}

impl YaoGraph {
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n.max(1) as f64
    }
}

pub fn yao_graph_truncated(points: &PointSet, params: &Params) -> Result<YaoGraph> {
    let cones = default_cones(points.dim())?;
    yao_graph_with(points, cones, params.delta)
}

pub fn yao_graph_with(points: &PointSet, cones: &ConeSet, cutoff: f64) -> Result<YaoGraph> {
    if cones.dim() != points.dim() {
        return param("cone cover and point set dimensions differ");
    }
    let side = grid_side(points.len(), points.dim());
    let grid = UniformGrid::new(points, side)?;
    let mut edges: Vec<(u32, u32, f64)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|p| {
            nearest_in_cones(&grid, points, p, cones, cutoff)
                .into_iter()
                .flatten()
                .map(move |(q, w)| {
                    let (a, b) = if (p as u32) < q { (p as u32, q) } else { (q, p as u32) };
                    (a, b, w)
                })
        })
        .collect();
    edges.sort_unstable_by_key(|x| (x.0, x.1));
    edges.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    Ok(YaoGraph {
        n: points.len(),
        edges,
        cutoff,
    })
}

/// `ceil(n^(1/d))`, reduced if the grid would exceed the cell limit.
pub(crate) fn grid_side(n: usize, d: usize) -> usize {
    let mut s = UniformGrid::side_for(n, d);
    while (s as u128).pow(d as u32) > crate::grid::MAX_CELLS as u128 {
        s -= 1;
    }
    s
}

/// Brute-force Yao graph: every `(p, cone)` pair scans all of `P`.
pub fn yao_bruteforce(points: &PointSet, cones: &ConeSet, cutoff: f64) -> Vec<(u32, u32)> {
    let n = points.len();
    let d = points.dim();
    let mut edges = Vec::new();
    let mut member = Vec::new();
    for p in 0..n {
        let mut hits: ConeHits = vec![None; cones.len()];
        for q in 0..n {
            if q == p {
                continue;
            }
            let dq = dist(points.point(p), points.point(q));
            if dq >= cutoff || dq == 0.0 {
                continue;
            }
            let v: Vec<f64> = (0..d).map(|t| points.point(q)[t] - points.point(p)[t]).collect();
            cones.cones_containing(&v, &mut member);
            for &j in &member {
                if better((q as u32, dq), hits[j as usize]) {
                    hits[j as usize] = Some((q as u32, dq));
                }
            }
        }
        for (q, _) in hits.into_iter().flatten() {
            edges.push(((p as u32).min(q), (p as u32).max(q)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}
