//! Counting pairs of planar points within distance `r`.
//!
//! A coarse `N x N` grid with `N = ceil((n / ln n)^(1/3))` splits the work per
//! cell: pairs reaching cells deep inside the radius-`r` disk are counted from
//! cell sizes alone, pairs reaching the ring of cells near the disk boundary are
//! counted point by point against a depth structure over the cell's own points.
//! When `r <= 8 * Delta` a fine grid of side at least `r` is scanned instead.
//!
//! Every distance test is `dist2(p, q) <= r * r` on the original coordinates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::points::{dist2, PointSet};

/// Coarse grid over `[0,1)^2`, points stored cell by cell in row-major order.
#[derive(Clone, Debug)]
pub struct SelGrid {
    pub n_g: usize,
    /// Diameter of one cell, `sqrt(2) / n_g`.
    pub delta: f64,
    start: Vec<u32>,
    order: Vec<u32>,
    xy: Vec<[f64; 2]>,
}

/// Which counting route produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistPath {
    Main,
    SmallRFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistCount {
    pub count: u64,
    pub path: DistPath,
}

/// `ceil((n / ln n)^(1/3))`, at least 1.
pub fn default_grid_side(n: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let n = n as f64;
    ((n / n.ln()).cbrt().ceil() as usize).max(1)
}

#[inline]
fn axis(x: f64, side: usize) -> usize {
    ((x * side as f64) as usize).min(side - 1)
}

fn check_planar(points: &PointSet) -> Result<()> {
    if points.dim() != 2 {
        return param(format!("pair counting needs d=2, got d={}", points.dim()));
    }
    Ok(())
}

impl SelGrid {
    pub fn new(points: &PointSet, n_g: usize) -> Result<Self> {
        check_planar(points)?;
        if n_g == 0 {
            return param("grid side must be positive");
        }
        let cells = n_g * n_g;
        let cell_of = |p: &[f64]| axis(p[1], n_g) * n_g + axis(p[0], n_g);
        let mut start = vec![0u32; cells + 1];
        for p in points.iter() {
            start[cell_of(p) + 1] += 1;
        }
        for c in 0..cells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; points.len()];
        for (k, p) in points.iter().enumerate() {
            let c = cell_of(p);
            order[fill[c] as usize] = k as u32;
            fill[c] += 1;
        }
        let xy = order
            .iter()
            .map(|&k| {
                let p = points.point(k as usize);
                [p[0], p[1]]
            })
            .collect();
        Ok(SelGrid {
            n_g,
            delta: std::f64::consts::SQRT_2 / n_g as f64,
            start,
            order,
            xy,
        })
    }

    pub fn with_default_side(points: &PointSet) -> Result<Self> {
        Self::new(points, default_grid_side(points.len()))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `n_{i,j}`: points with column `i` and row `j`.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        let c = j * self.n_g + i;
        (self.start[c + 1] - self.start[c]) as u64
    }

    /// Points in row `j`, columns `lo..=hi`, as a range into the cell-ordered storage.
    fn span(&self, j: usize, lo: usize, hi: usize) -> std::ops::Range<usize> {
        let row = j * self.n_g;
        self.start[row + lo] as usize..self.start[row + hi + 1] as usize
    }

    /// Point indices of cell `(i, j)`.
    pub fn cell_points(&self, i: usize, j: usize) -> &[u32] {
        &self.order[self.span(j, i, i)]
    }
}

/// One grid row of [`CellBallSets`]: column interval meeting the outer disk and,
/// if any, the interval of cells inside the inner disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowSpan {
    pub row: usize,
    pub outer: (usize, usize),
    pub inner: Option<(usize, usize)>,
}

impl RowSpan {
    /// Column intervals of ring cells in this row.
    pub fn ring(&self) -> impl Iterator<Item = (usize, usize)> {
        let (lo, hi) = self.outer;
        let parts = match self.inner {
            None => [Some((lo, hi)), None],
            Some((a, b)) => [(a > lo).then(|| (lo, a - 1)), (b < hi).then(|| (b + 1, hi))],
        };
        parts.into_iter().flatten()
    }
}

/// Cells inside `ball(center, r - 2 Delta)` and cells meeting `ball(center, r + 2 Delta)`
/// for the cell `(i, j)`, row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellBallSets {
    pub rows: Vec<RowSpan>,
}

/// Largest `k` in `0..=cap` with `ok(k)`, for `ok` true on a prefix; `None` if `!ok(0)`.
fn extent(guess: f64, cap: usize, ok: impl Fn(usize) -> bool) -> Option<usize> {
    if !ok(0) {
        return None;
    }
    let mut k = if guess.is_finite() && guess > 0.0 {
        (guess as usize).min(cap)
    } else {
        0
    };
    while k > 0 && !ok(k) {
        k -= 1;
    }
    while k < cap && ok(k + 1) {
        k += 1;
    }
    Some(k)
}

pub fn cell_ball_sets(sg: &SelGrid, i: usize, j: usize, r: f64) -> CellBallSets {
    let n = sg.n_g;
    let w = 1.0 / n as f64;
    let (cx, cy) = ((i as f64 + 0.5) * w, (j as f64 + 0.5) * w);
    let (r_in, r_out) = (r - 2.0 * sg.delta, r + 2.0 * sg.delta);
    let lo_edge = |u: usize| u as f64 * w;
    let hi_edge = |u: usize| (u + 1) as f64 * w;
    let far = |u: usize, c: f64| (lo_edge(u) - c).abs().max((hi_edge(u) - c).abs());
    let near = |u: usize, c: f64| (lo_edge(u) - c).max(c - hi_edge(u)).max(0.0);
    let inside = |u: usize, v: usize| {
        let (dx, dy) = (far(u, cx), far(v, cy));
        r_in > 0.0 && dx * dx + dy * dy <= r_in * r_in
    };
    let meets = |u: usize, v: usize| {
        let (dx, dy) = (near(u, cx), near(v, cy));
        dx * dx + dy * dy <= r_out * r_out
    };
    let span = |v: usize, test: &dyn Fn(usize, usize) -> bool, radius: f64| {
        if !test(i, v) {
            return None;
        }
        let guess = radius * n as f64;
        let left = extent(guess, i, |k| test(i - k, v))?;
        let right = extent(guess, n - 1 - i, |k| test(i + k, v))?;
        Some((i - left, i + right))
    };
    let mut rows = Vec::new();
    for v in 0..n {
        let Some(outer) = span(v, &meets, r_out) else {
            continue;
        };
        let inner = span(v, &inside, r_in);
        rows.push(RowSpan { row: v, outer, inner });
    }
    CellBallSets { rows }
}

/// Ordered pairs `(p, q)`, `p` in cell `(i, j)`, `q != p` in a cell inside
/// `ball(center, r - 2 Delta)`: `n_ij * (S - 1)` with `S` the point count of those cells.
pub fn alpha_ij(sg: &SelGrid, i: usize, j: usize, r: f64) -> u64 {
    let n_ij = sg.count(i, j);
    if n_ij == 0 {
        return 0;
    }
    alpha_from(sg, n_ij, &cell_ball_sets(sg, i, j, r))
}

fn alpha_from(sg: &SelGrid, n_ij: u64, sets: &CellBallSets) -> u64 {
    let s: u64 = sets
        .rows
        .iter()
        .filter_map(|row| row.inner.map(|(lo, hi)| sg.span(row.row, lo, hi).len() as u64))
        .sum();
    // the cell itself lies in the inner set once r > 8 Delta
    n_ij * s.saturating_sub(1)
}

/// Point indices in the ring cells of `(i, j)`.
pub fn ring_points(sg: &SelGrid, i: usize, j: usize, r: f64) -> Vec<u32> {
    let sets = cell_ball_sets(sg, i, j, r);
    let mut out = Vec::new();
    for row in &sets.rows {
        for (lo, hi) in row.ring() {
            out.extend_from_slice(&sg.order[sg.span(row.row, lo, hi)]);
        }
    }
    out
}

/// Depth of a query point in the arrangement of radius-`r` disks centred at `A`.
///
/// Directions around the centre `c` of `A` are cut into `K = |A|` equal bins. For
/// a query `b = c + s u`, with `|a - c| < r` and `s >= 0`, `b` lies in the disk of
/// `a` iff `s <= s_a(u) = u.(a-c) + sqrt(r^2 - (u_perp.(a-c))^2)`. Per bin each
/// `s_a` is bracketed by `[L_a, L_a + w]`; queries binary search the sorted `L`
/// and test exactly only the few centres whose bracket contains `s`.
struct DiskDepth<'a> {
    a: &'a [[f64; 2]],
    c: [f64; 2],
    r2: f64,
    bins: usize,
    h: f64,
    w: f64,
    low: Vec<f64>,
    idx: Vec<u32>,
}

const DEPTH_SLACK: f64 = 1e-12;

impl<'a> DiskDepth<'a> {
    /// `None` when `A` is too spread out relative to `r` for the bracketing to apply.
    fn new(a: &'a [[f64; 2]], r: f64) -> Option<Self> {
        if a.is_empty() {
            return None;
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in a {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let rel: Vec<[f64; 2]> = a.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
        let rho = rel.iter().map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt()).fold(0.0, f64::max);
        if rho > 0.5 * r {
            return None;
        }
        let m = a.len();
        let bins = m.clamp(4, 4096);
        let h = std::f64::consts::TAU / bins as f64;
        let lambda = rho * (1.0 + rho / (r * r - rho * rho).sqrt());
        let half = 0.5 * lambda * h + DEPTH_SLACK;
        let mut order: Vec<u32> = (0..m as u32).collect();
        let mut vals = vec![0.0; m];
        let mut low = Vec::with_capacity(bins * m);
        let mut idx = Vec::with_capacity(bins * m);
        for t in 0..bins {
            let (sn, cs) = ((t as f64 + 0.5) * h).sin_cos();
            for (k, p) in rel.iter().enumerate() {
                let along = cs * p[0] + sn * p[1];
                let perp = cs * p[1] - sn * p[0];
                vals[k] = along + (r * r - perp * perp).sqrt() - half;
            }
            // neighbouring bins are nearly sorted already
            for x in 1..m {
                let mut y = x;
                let key = order[x];
                while y > 0 && vals[order[y - 1] as usize] > vals[key as usize] {
                    order[y] = order[y - 1];
                    y -= 1;
                }
                order[y] = key;
            }
            low.extend(order.iter().map(|&k| vals[k as usize]));
            idx.extend_from_slice(&order);
        }
        Some(DiskDepth {
            a,
            c,
            r2: r * r,
            bins,
            h,
            w: 2.0 * half + DEPTH_SLACK,
            low,
            idx,
        })
    }

    fn count(&self, b: &[f64; 2]) -> u64 {
        let (dx, dy) = (b[0] - self.c[0], b[1] - self.c[1]);
        let s = (dx * dx + dy * dy).sqrt();
        if s <= self.w {
            return self.a.iter().filter(|p| dist2(&p[..], &b[..]) <= self.r2).count() as u64;
        }
        let mut theta = dy.atan2(dx);
        if theta < 0.0 {
            theta += std::f64::consts::TAU;
        }
        let t = ((theta / self.h) as usize).min(self.bins - 1);
        let m = self.a.len();
        let low = &self.low[t * m..(t + 1) * m];
        let idx = &self.idx[t * m..(t + 1) * m];
        let first_in = low.partition_point(|&l| l < s);
        let mut hits = (m - first_in) as u64;
        let mut k = first_in;
        while k > 0 && low[k - 1] + self.w >= s {
            k -= 1;
            if dist2(&self.a[idx[k] as usize][..], &b[..]) <= self.r2 {
                hits += 1;
            }
        }
        hits
    }
}

/// Pairs `(a, b)` in `A x B` with `dist(a, b) <= r`; the sets must be disjoint.
pub fn count_close_pairs(a: &[[f64; 2]], b: &[[f64; 2]], r: f64) -> u64 {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    match DiskDepth::new(a, r) {
        Some(depth) => b.iter().map(|q| depth.count(q)).sum(),
        None => {
            let r2 = r * r;
            a.iter()
                .map(|p| b.iter().filter(|q| dist2(&p[..], &q[..]) <= r2).count() as u64)
                .sum()
        }
    }
}

/// `xi_{i,j}`: ordered pairs `(p, q)` with `p` in cell `(i, j)`, `q != p`, `dist <= r`.
fn xi(sg: &SelGrid, i: usize, j: usize, r: f64) -> u64 {
    let n_ij = sg.count(i, j);
    if n_ij == 0 {
        return 0;
    }
    let sets = cell_ball_sets(sg, i, j, r);
    let mut total = alpha_from(sg, n_ij, &sets);
    let own = &sg.xy[sg.span(j, i, i)];
    let depth = DiskDepth::new(own, r);
    let r2 = r * r;
    for row in &sets.rows {
        for (lo, hi) in row.ring() {
            let ring = &sg.xy[sg.span(row.row, lo, hi)];
            total += match &depth {
                Some(dd) => ring.iter().map(|q| dd.count(q)).sum::<u64>(),
                None => own
                    .iter()
                    .map(|p| ring.iter().filter(|q| dist2(&p[..], &q[..]) <= r2).count() as u64)
                    .sum(),
            };
        }
    }
    total
}

/// All `xi_{i,j}`, indexed `j * n_g + i`. Requires `r > 8 Delta`.
pub fn xi_table(sg: &SelGrid, r: f64) -> Result<Vec<u64>> {
    if r <= 8.0 * sg.delta {
        return param(format!("r={r} is not above 8 Delta={}", 8.0 * sg.delta));
    }
    let n = sg.n_g;
    Ok((0..n * n)
        .into_par_iter()
        .map(|c| xi(sg, c % n, c / n, r))
        .collect())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return param(format!("radius r={r} must be positive and finite"));
    }
    Ok(())
}

/// Scans a grid of side at least `r`, each cell against itself and four forward neighbours.
fn count_small_r(points: &PointSet, r: f64) -> u64 {
    let n = points.len();
    let side = ((1.0 / r).floor() as usize).clamp(1, ((n as f64).sqrt() as usize).max(1));
    let sg = SelGrid::new(points, side).expect("planar input checked by caller");
    let r2 = r * r;
    (0..side)
        .into_par_iter()
        .map(|j| {
            let mut total = 0u64;
            for i in 0..side {
                let own = &sg.xy[sg.span(j, i, i)];
                for (k, p) in own.iter().enumerate() {
                    total += own[k + 1..]
                        .iter()
                        .filter(|q| dist2(&p[..], &q[..]) <= r2)
                        .count() as u64;
                }
                let mut other = |u: isize, v: usize| {
                    if u < 0 || u as usize >= side || v >= side {
                        return;
                    }
                    let cell = &sg.xy[sg.span(v, u as usize, u as usize)];
                    for p in own {
                        total += cell.iter().filter(|q| dist2(&p[..], &q[..]) <= r2).count() as u64;
                    }
                };
                let ii = i as isize;
                other(ii + 1, j);
                other(ii - 1, j + 1);
                other(ii, j + 1);
                other(ii + 1, j + 1);
            }
            total
        })
        .sum()
}

/// Number of unordered pairs at distance at most `r`, on the default coarse grid.
pub fn count_pairs_within(points: &PointSet, r: f64) -> Result<DistCount> {
    check_planar(points)?;
    count_pairs_within_with_grid(points, r, default_grid_side(points.len()))
}

/// As [`count_pairs_within`] with coarse grid side `n_g`.
pub fn count_pairs_within_with_grid(points: &PointSet, r: f64, n_g: usize) -> Result<DistCount> {
    check_planar(points)?;
    check_radius(r)?;
    let n = points.len() as u64;
    if r >= std::f64::consts::SQRT_2 {
        return Ok(DistCount {
            count: n * n.saturating_sub(1) / 2,
            path: DistPath::Main,
        });
    }
    let sg = SelGrid::new(points, n_g)?;
    if r <= 8.0 * sg.delta {
        return Ok(DistCount {
            count: count_small_r(points, r),
            path: DistPath::SmallRFallback,
        });
    }
    let sum: u64 = xi_table(&sg, r)?.iter().sum();
    debug_assert!(sum.is_multiple_of(2));
    Ok(DistCount {
        count: sum / 2,
        path: DistPath::Main,
    })
}

/// Quadratic reference count.
pub fn count_pairs_bruteforce(points: &PointSet, r: f64) -> Result<u64> {
    check_planar(points)?;
    check_radius(r)?;
    let r2 = r * r;
    let n = points.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let p = points.point(i);
            (i + 1..n).filter(|&j| dist2(p, points.point(j)) <= r2).count() as u64
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{sample_points, seeded_rng, unit_f64};

    fn fine_side(r: f64) -> usize {
        (8.0 * std::f64::consts::SQRT_2 / r).floor() as usize + 1
    }

    #[test]
    fn trivial_counts() {
        let p = PointSet::from_rows(2, &[[0.1, 0.1], [0.4, 0.1]]).unwrap();
        assert_eq!(count_pairs_within(&p, 0.5).unwrap().count, 1);
        assert_eq!(count_pairs_within(&p, 0.2).unwrap().count, 0);
        let p = sample_points(100, 2, 1).unwrap();
        assert_eq!(count_pairs_within(&p, 2.0).unwrap().count, 4950);
        assert!(count_pairs_within(&sample_points(10, 3, 1).unwrap(), 0.1).is_err());
        assert!(count_pairs_within(&p, 0.0).is_err());
    }

    #[test]
    fn default_paths_match_bruteforce() {
        let p = sample_points(3000, 2, 4).unwrap();
        for r in [0.05, 0.1, 0.3] {
            let got = count_pairs_within(&p, r).unwrap();
            assert_eq!(got.count, count_pairs_bruteforce(&p, r).unwrap(), "r={r}");
        }
    }

    #[test]
    fn main_path_matches_bruteforce() {
        for seed in 0..4 {
            let p = sample_points(3000, 2, seed).unwrap();
            for r in [0.05, 0.1, 0.3] {
                let got = count_pairs_within_with_grid(&p, r, fine_side(r)).unwrap();
                assert_eq!(got.path, DistPath::Main);
                assert_eq!(got.count, count_pairs_bruteforce(&p, r).unwrap(), "seed={seed} r={r}");
            }
        }
    }

    #[test]
    fn ball_sets_are_sound() {
        let p = sample_points(10, 2, 1).unwrap();
        let sg = SelGrid::new(&p, 40).unwrap();
        let r = 0.4;
        let w = 1.0 / 40.0;
        for (i, j) in [(0, 0), (20, 20), (39, 5), (7, 33)] {
            let sets = cell_ball_sets(&sg, i, j, r);
            let c = [(i as f64 + 0.5) * w, (j as f64 + 0.5) * w];
            for v in 0..40 {
                for u in 0..40 {
                    let (lo, hi) = ([u as f64 * w, v as f64 * w], [(u + 1) as f64 * w, (v + 1) as f64 * w]);
                    let far: f64 = (0..2).map(|k| (lo[k] - c[k]).abs().max((hi[k] - c[k]).abs()).powi(2)).sum();
                    let near: f64 = (0..2).map(|k| (lo[k] - c[k]).max(c[k] - hi[k]).max(0.0).powi(2)).sum();
                    let row = sets.rows.iter().find(|x| x.row == v);
                    let in_inner = row.and_then(|x| x.inner).is_some_and(|(a, b)| (a..=b).contains(&u));
                    let in_outer = row.is_some_and(|x| (x.outer.0..=x.outer.1).contains(&u));
                    let r_in = r - 2.0 * sg.delta;
                    let r_out = r + 2.0 * sg.delta;
                    assert_eq!(in_inner, far <= r_in * r_in, "inner ({u},{v}) of ({i},{j})");
                    assert_eq!(in_outer, near <= r_out * r_out, "outer ({u},{v}) of ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn alpha_and_ring_match_enumeration() {
        let p = sample_points(2000, 2, 8).unwrap();
        let r = 0.3;
        let sg = SelGrid::new(&p, fine_side(r)).unwrap();
        let n = sg.n_g;
        let w = 1.0 / n as f64;
        let cell_of = |q: &[f64]| (axis(q[0], n), axis(q[1], n));
        for (i, j) in [(0, 0), (n / 2, n / 3), (n - 1, n - 1), (3, n - 2)] {
            let c = [(i as f64 + 0.5) * w, (j as f64 + 0.5) * w];
            let far = |u: usize, v: usize| -> f64 {
                let (lo, hi) = ([u as f64 * w, v as f64 * w], [(u + 1) as f64 * w, (v + 1) as f64 * w]);
                (0..2).map(|k| (lo[k] - c[k]).abs().max((hi[k] - c[k]).abs()).powi(2)).sum()
            };
            let near = |u: usize, v: usize| -> f64 {
                let (lo, hi) = ([u as f64 * w, v as f64 * w], [(u + 1) as f64 * w, (v + 1) as f64 * w]);
                (0..2).map(|k| (lo[k] - c[k]).max(c[k] - hi[k]).max(0.0).powi(2)).sum()
            };
            let r_in = r - 2.0 * sg.delta;
            let r_out = r + 2.0 * sg.delta;
            let own: Vec<usize> = (0..p.len()).filter(|&k| cell_of(p.point(k)) == (i, j)).collect();
            let inner: Vec<usize> = (0..p.len())
                .filter(|&k| {
                    let (u, v) = cell_of(p.point(k));
                    far(u, v) <= r_in * r_in
                })
                .collect();
            let pairs = own.len() * inner.len() - own.len();
            assert_eq!(alpha_ij(&sg, i, j, r), pairs as u64);
            let mut ring: Vec<u32> = (0..p.len() as u32)
                .filter(|&k| {
                    let (u, v) = cell_of(p.point(k as usize));
                    near(u, v) <= r_out * r_out && far(u, v) > r_in * r_in
                })
                .collect();
            ring.sort_unstable();
            let mut got = ring_points(&sg, i, j, r);
            got.sort_unstable();
            assert_eq!(got, ring);
        }
        let empty = PointSet::from_rows(2, &[[0.9, 0.9]]).unwrap();
        let sg = SelGrid::new(&empty, fine_side(r)).unwrap();
        assert_eq!(alpha_ij(&sg, 0, 0, r), 0);
        assert!(ring_points(&sg, 0, 0, r).is_empty());
    }

    #[test]
    fn one_point_in_one_ring_cell() {
        let r = 0.3;
        let side = fine_side(r);
        let p = PointSet::from_rows(2, &[[0.01, 0.01], [0.01 + r, 0.01]]).unwrap();
        let sg = SelGrid::new(&p, side).unwrap();
        assert_eq!(ring_points(&sg, 0, 0, r), vec![1]);
    }

    #[test]
    fn all_in_one_cell() {
        let rows: Vec<[f64; 2]> = (0..30).map(|k| [0.5 + 1e-4 * k as f64, 0.5]).collect();
        let p = PointSet::from_rows(2, &rows).unwrap();
        let sg = SelGrid::new(&p, 20).unwrap();
        let (i, j) = (10, 10);
        assert_eq!(sg.count(i, j), 30);
        assert_eq!(alpha_ij(&sg, i, j, 0.9), 30 * 29);
    }

    #[test]
    fn close_pairs_match_bruteforce() {
        let a = [[0.5, 0.5]];
        let b = [[0.7, 0.5]];
        assert_eq!(count_close_pairs(&a, &b, 0.3), 1);
        assert_eq!(count_close_pairs(&a, &b, 0.1), 0);
        let mut rng = seeded_rng(12);
        for trial in 0..100 {
            let r = 0.1 + 0.2 * unit_f64(&mut rng);
            let spread = if trial % 2 == 0 { 0.02 } else { 0.3 };
            let a: Vec<[f64; 2]> = (0..40)
                .map(|_| [0.4 + spread * unit_f64(&mut rng), 0.4 + spread * unit_f64(&mut rng)])
                .collect();
            let b: Vec<[f64; 2]> = (0..400).map(|_| [unit_f64(&mut rng), unit_f64(&mut rng)]).collect();
            let r2 = r * r;
            let brute: u64 = a
                .iter()
                .map(|p| b.iter().filter(|q| dist2(&p[..], &q[..]) <= r2).count() as u64)
                .sum();
            assert_eq!(count_close_pairs(&a, &b, r), brute, "trial {trial}");
            assert_eq!(count_close_pairs(&b, &a, r), brute);
        }
    }

    #[test]
    fn xi_is_sandwiched_and_sums_even() {
        let p = sample_points(1500, 2, 21).unwrap();
        let r = 0.3;
        let sg = SelGrid::new(&p, fine_side(r)).unwrap();
        let xis = xi_table(&sg, r).unwrap();
        assert_eq!(xis.iter().sum::<u64>() % 2, 0);
        let n = sg.n_g;
        let r2 = r * r;
        for j in 0..n {
            for i in 0..n {
                let sets = cell_ball_sets(&sg, i, j, r);
                let own = sg.cell_points(i, j);
                let mut beta = 0u64;
                let mut direct = 0u64;
                for &a in own {
                    for row in &sets.rows {
                        beta += sg.span(row.row, row.outer.0, row.outer.1).len() as u64;
                    }
                    beta -= 1;
                    direct += (0..p.len())
                        .filter(|&q| q != a as usize && dist2(p.point(a as usize), p.point(q)) <= r2)
                        .count() as u64;
                }
                let c = j * n + i;
                assert!(alpha_ij(&sg, i, j, r) <= xis[c] && xis[c] <= beta);
                assert_eq!(xis[c], direct, "cell ({i},{j})");
            }
        }
    }
}
