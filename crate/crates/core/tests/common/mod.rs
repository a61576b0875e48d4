//! Brute-force reference implementations, written independently of the library.
#![allow(dead_code)]

use randgeo::PointSet;

pub fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn torus_dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let t = (a - b).abs();
            let t = t.min(1.0 - t);
            t * t
        })
        .sum()
}

pub fn pairs_within(p: &PointSet, r: f64, torus: bool) -> u64 {
    let r2 = r * r;
    let mut c = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d2 = if torus {
                torus_dist2(p.point(i), p.point(j))
            } else {
                dist2(p.point(i), p.point(j))
            };
            c += (d2 <= r2) as u64;
        }
    }
    c
}

/// Dense Prim; returns sorted `(i, j)` pairs with `i < j` and the total length.
pub fn prim(p: &PointSet) -> (Vec<(u32, u32)>, f64) {
    let n = p.len();
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut total = 0.0;
    best[0] = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !done[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        done[u] = true;
        if parent[u] != usize::MAX {
            let (a, b) = (parent[u].min(u) as u32, parent[u].max(u) as u32);
            edges.push((a, b));
            total += best[u].sqrt();
        }
        for v in 0..n {
            if !done[v] {
                let w = dist2(p.point(u), p.point(v));
                if w < best[v] {
                    best[v] = w;
                    parent[v] = u;
                }
            }
        }
    }
    edges.sort_unstable();
    (edges, total)
}

/// Planar hull vertices by gift wrapping on exact orientation signs.
pub fn planar_hull_oracle(p: &PointSet) -> Vec<u32> {
    let orient = |a: &[f64], b: &[f64], c: &[f64]| {
        robust_sign(
            (b[0] - a[0]) * (c[1] - a[1]),
            (b[1] - a[1]) * (c[0] - a[0]),
        )
    };
    let n = p.len();
    let start = (0..n)
        .min_by(|&a, &b| p.point(a)[0].total_cmp(&p.point(b)[0]))
        .unwrap();
    let mut hull = vec![start as u32];
    let mut cur = start;
    loop {
        let mut next = if cur == 0 { 1 } else { 0 };
        for k in 0..n {
            if k == cur || k == next {
                continue;
            }
            let s = orient(p.point(cur), p.point(next), p.point(k));
            let farther = s == 0
                && dist2(p.point(cur), p.point(k)) > dist2(p.point(cur), p.point(next));
            if s < 0 || farther {
                next = k;
            }
        }
        if next == start {
            break;
        }
        hull.push(next as u32);
        cur = next;
    }
    hull.sort_unstable();
    hull
}

/// Sign of `x - y`, trusting the floating difference only when it clearly exceeds rounding.
fn robust_sign(x: f64, y: f64) -> i32 {
    let diff = x - y;
    let tol = 8.0 * f64::EPSILON * (x.abs() + y.abs());
    if diff > tol {
        1
    } else if diff < -tol {
        -1
    } else {
        0
    }
}
