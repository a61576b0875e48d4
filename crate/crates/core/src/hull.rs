//! Convex hulls in the plane and in space: a direct oracle and the bottom-up quadtree scheme.

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{param, Result};
use crate::points::PointSet;
use crate::predicates::{orient2d, orient3d};
use crate::quadtree::{build_quadtree, default_height};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hull {
    /// Counterclockwise vertex cycle starting at the lexicographically smallest vertex.
    Planar { vertices: Vec<u32> },
    /// Sorted vertex set and outward-oriented triangles, each rotated so its smallest
    /// index comes first.
    Spatial {
        vertices: Vec<u32>,
        facets: Vec<[u32; 3]>,
    },
    /// The input spans only `dim` dimensions; `vertices` are the extreme points of
    /// that lower-dimensional hull (cycle order when `dim == 2`).
    Degenerate { dim: usize, vertices: Vec<u32> },
}

impl Hull {
    /// Sorted hull vertex indices.
    pub fn vertex_set(&self) -> Vec<u32> {
        let mut v = match self {
            Hull::Planar { vertices } => vertices.clone(),
            Hull::Spatial { vertices, .. } => vertices.clone(),
            Hull::Degenerate { vertices, .. } => vertices.clone(),
        };
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        match self {
            Hull::Planar { vertices } => vertices.len(),
            Hull::Spatial { vertices, .. } => vertices.len(),
            Hull::Degenerate { vertices, .. } => vertices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn facets(&self) -> &[[u32; 3]] {
        match self {
            Hull::Spatial { facets, .. } => facets,
            _ => &[],
        }
    }
}

fn check_input(points: &PointSet) -> Result<()> {
    if !(2..=3).contains(&points.dim()) {
        return param(format!("hulls are computed for d in {{2,3}}, got {}", points.dim()));
    }
    if points.is_empty() {
        return param("hull of an empty point set");
    }
    Ok(())
}

/// Monotone chain in the plane, incremental construction in space.
pub fn hull_bruteforce(points: &PointSet) -> Result<Hull> {
    check_input(points)?;
    let idx: Vec<u32> = (0..points.len() as u32).collect();
    Ok(hull_of(points, &idx))
}

pub(crate) fn hull_of(points: &PointSet, idx: &[u32]) -> Hull {
    match points.dim() {
        2 => {
            let pt = |i: u32| {
                let p = points.point(i as usize);
                [p[0], p[1]]
            };
            planar_hull(idx, pt)
        }
        _ => spatial_hull(points, idx),
    }
}

/// Unique points by coordinates (smallest index wins), sorted lexicographically.
fn lex_unique<const D: usize>(idx: &[u32], pt: impl Fn(u32) -> [f64; D]) -> Vec<u32> {
    let mut v: Vec<u32> = idx.to_vec();
    v.sort_unstable_by(|&a, &b| {
        let (pa, pb) = (pt(a), pt(b));
        pa.iter()
            .zip(&pb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    v.dedup_by(|a, b| pt(*a) == pt(*b));
    v
}

fn planar_hull(idx: &[u32], pt: impl Fn(u32) -> [f64; 2]) -> Hull {
    let v = lex_unique(idx, &pt);
    if v.len() <= 1 {
        return Hull::Degenerate {
            dim: 0,
            vertices: v,
        };
    }
    let turn = |a: u32, b: u32, c: u32| orient2d(&pt(a), &pt(b), &pt(c));
    let mut lower: Vec<u32> = Vec::new();
    for &p in &v {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<u32> = Vec::new();
    for &p in v.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() <= 2 {
        return Hull::Degenerate {
            dim: 1,
            vertices: lower,
        };
    }
    Hull::Planar { vertices: lower }
}

fn spatial_hull(points: &PointSet, idx: &[u32]) -> Hull {
    let pt = |i: u32| {
        let p = points.point(i as usize);
        [p[0], p[1], p[2]]
    };
    let mut v = lex_unique(idx, pt);
    loop {
        match incremental_hull(&v, &pt) {
            Seed::Done(facets) => {
                let (keep, drop) = extreme_split(&facets, &pt);
                if drop.is_empty() {
                    return finish_spatial(facets, keep);
                }
                let gone: FxHashSet<u32> = drop.into_iter().collect();
                v.retain(|i| !gone.contains(i));
            }
            Seed::Line(a, b) => {
                return Hull::Degenerate {
                    dim: 1,
                    vertices: if a == b { vec![a] } else { vec![a, b] },
                };
            }
            Seed::Plane(a, b, c) => {
                let (pa, pb, pc) = (pt(a), pt(b), pt(c));
                let u = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
                let w = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
                let n = [
                    (u[1] * w[2] - u[2] * w[1]).abs(),
                    (u[2] * w[0] - u[0] * w[2]).abs(),
                    (u[0] * w[1] - u[1] * w[0]).abs(),
                ];
                let drop = if n[0] >= n[1] && n[0] >= n[2] {
                    0
                } else if n[1] >= n[2] {
                    1
                } else {
                    2
                };
                let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
                let proj = |i: u32| {
                    let p = pt(i);
                    [p[keep[0]], p[keep[1]]]
                };
                let vertices = match planar_hull(&v, proj) {
                    Hull::Planar { vertices } => vertices,
                    Hull::Degenerate { vertices, .. } => vertices,
                    Hull::Spatial { .. } => unreachable!(),
                };
                return Hull::Degenerate { dim: 2, vertices };
            }
        }
    }
}

enum Seed {
    Done(Vec<[u32; 3]>),
    Line(u32, u32),
    Plane(u32, u32, u32),
}

fn collinear3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> bool {
    let pr = |p: &[f64; 3], i: usize, j: usize| [p[i], p[j]];
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(i, j)| orient2d(&pr(a, i, j), &pr(b, i, j), &pr(c, i, j)) == 0.0)
}

fn incremental_hull(v: &[u32], pt: &impl Fn(u32) -> [f64; 3]) -> Seed {
    if v.len() < 2 {
        return Seed::Line(v[0], v[0]);
    }
    let a = v[0];
    let b = v[v.len() - 1];
    let Some(&c) = v.iter().find(|&&c| !collinear3(&pt(a), &pt(b), &pt(c))) else {
        return Seed::Line(a, b);
    };
    let Some(&d) = v
        .iter()
        .find(|&&d| orient3d(&pt(a), &pt(b), &pt(c), &pt(d)) != 0.0)
    else {
        return Seed::Plane(a, b, c);
    };
    // outward facets have the interior on their positive side
    let mut facets: Vec<[u32; 3]> = if orient3d(&pt(a), &pt(b), &pt(c), &pt(d)) > 0.0 {
        vec![[a, b, c], [a, d, b], [b, d, c], [c, d, a]]
    } else {
        vec![[a, c, b], [a, b, d], [b, c, d], [c, a, d]]
    };
    let mut visible = Vec::new();
    let mut edges: FxHashSet<(u32, u32)> = FxHashSet::default();
    for &p in v {
        if p == a || p == b || p == c || p == d {
            continue;
        }
        let pp = pt(p);
        visible.clear();
        visible.extend(facets.iter().map(|f| orient3d(&pt(f[0]), &pt(f[1]), &pt(f[2]), &pp) < 0.0));
        if !visible.iter().any(|&x| x) {
            continue;
        }
        edges.clear();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &s)| s) {
            for k in 0..3 {
                edges.insert((f[k], f[(k + 1) % 3]));
            }
        }
        let mut next = Vec::with_capacity(facets.len() + 4);
        for (f, &s) in facets.iter().zip(&visible) {
            if !s {
                next.push(*f);
            }
        }
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &s)| s) {
            for k in 0..3 {
                let (x, y) = (f[k], f[(k + 1) % 3]);
                if !edges.contains(&(y, x)) {
                    next.push([x, y, p]);
                }
            }
        }
        facets = next;
    }
    Seed::Done(facets)
}

/// Splits hull vertices into extreme ones and those whose incident facets lie in
/// at most two planes (points inside a face or on an edge).
fn extreme_split(facets: &[[u32; 3]], pt: &impl Fn(u32) -> [f64; 3]) -> (Vec<u32>, Vec<u32>) {
    let mut inc: rustc_hash::FxHashMap<u32, Vec<usize>> = Default::default();
    for (fi, f) in facets.iter().enumerate() {
        for &x in f {
            inc.entry(x).or_default().push(fi);
        }
    }
    let coplanar = |f: &[u32; 3], g: &[u32; 3]| {
        g.iter()
            .all(|&x| orient3d(&pt(f[0]), &pt(f[1]), &pt(f[2]), &pt(x)) == 0.0)
    };
    let mut keep = Vec::new();
    let mut drop = Vec::new();
    let mut verts: Vec<u32> = inc.keys().copied().collect();
    verts.sort_unstable();
    for x in verts {
        let mut planes: Vec<usize> = Vec::new();
        for &fi in &inc[&x] {
            if !planes.iter().any(|&g| coplanar(&facets[g], &facets[fi])) {
                planes.push(fi);
                if planes.len() >= 3 {
                    break;
                }
            }
        }
        if planes.len() >= 3 {
            keep.push(x);
        } else {
            drop.push(x);
        }
    }
    (keep, drop)
}

fn finish_spatial(facets: Vec<[u32; 3]>, vertices: Vec<u32>) -> Hull {
    let mut facets: Vec<[u32; 3]> = facets
        .into_iter()
        .map(|f| {
            let m = (0..3).min_by_key(|&k| f[k]).unwrap();
            [f[m], f[(m + 1) % 3], f[(m + 2) % 3]]
        })
        .collect();
    facets.sort_unstable();
    Hull::Spatial { vertices, facets }
}

/// Bottom-up hull over a quadtree of height `ceil(log2(n) / d)`: brute force in
/// every leaf, then at each internal node the hull of the children's hull vertices.
pub fn hull_quadtree(points: &PointSet) -> Result<Hull> {
    check_input(points)?;
    let n = points.len();
    let d = points.dim();
    let h = default_height(n, d);
    if h == 0 {
        return hull_bruteforce(points);
    }
    let tree = build_quadtree(points, h)?;
    let leaves = tree.occupied(h);
    // (key, hull vertices) per occupied cell of the current level, in key order
    let mut level: Vec<(u64, Vec<u32>)> = leaves
        .par_iter()
        .map(|run| (run.key, hull_of(points, tree.run_items(run)).vertex_set()))
        .collect();
    for _ in 0..h {
        let mut groups: Vec<(u64, Vec<u32>)> = Vec::new();
        for (key, verts) in level {
            let parent = key >> d;
            match groups.last_mut() {
                Some((k, acc)) if *k == parent => acc.extend(verts),
                _ => groups.push((parent, verts)),
            }
        }
        if groups.len() == 1 {
            return Ok(hull_of(points, &groups[0].1));
        }
        level = groups
            .into_par_iter()
            .map(|(k, union)| (k, hull_of(points, &union).vertex_set()))
            .collect();
    }
    let all: Vec<u32> = level.into_iter().flat_map(|(_, v)| v).collect();
    Ok(hull_of(points, &all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::sample_points;

    fn pts(rows: &[[f64; 2]]) -> PointSet {
        PointSet::from_rows(2, rows).unwrap()
    }

    /// Jarvis march, excluding collinear boundary points.
    fn gift_wrap(p: &PointSet) -> Vec<u32> {
        let n = p.len();
        let start = (0..n)
            .min_by(|&a, &b| p.point(a).partial_cmp(p.point(b)).unwrap())
            .unwrap();
        let mut out = vec![start as u32];
        let mut cur = start;
        loop {
            let mut next = if cur == 0 { 1 } else { 0 };
            for q in 0..n {
                if q == cur {
                    continue;
                }
                let o = orient2d(p.point(cur), p.point(next), p.point(q));
                let farther = crate::points::dist(p.point(cur), p.point(q))
                    > crate::points::dist(p.point(cur), p.point(next));
                if o < 0.0 || (o == 0.0 && farther) {
                    next = q;
                }
            }
            if next == start {
                break;
            }
            out.push(next as u32);
            cur = next;
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn square_with_center() {
        let p = pts(&[[0.0, 0.0], [0.9, 0.0], [0.0, 0.9], [0.9, 0.9], [0.45, 0.45]]);
        let h = hull_bruteforce(&p).unwrap();
        assert_eq!(h, Hull::Planar { vertices: vec![0, 1, 3, 2] });
        assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn triangle_and_degenerate() {
        let p = pts(&[[0.1, 0.1], [0.8, 0.2], [0.3, 0.7]]);
        assert_eq!(hull_bruteforce(&p).unwrap().vertex_set(), vec![0, 1, 2]);
        let p = pts(&[[0.1, 0.1], [0.2, 0.2], [0.3, 0.3]]);
        assert_eq!(
            hull_bruteforce(&p).unwrap(),
            Hull::Degenerate { dim: 1, vertices: vec![0, 2] }
        );
        let p = pts(&[[0.1, 0.1], [0.1, 0.1]]);
        assert_eq!(
            hull_bruteforce(&p).unwrap(),
            Hull::Degenerate { dim: 0, vertices: vec![0] }
        );
        let p = pts(&[[0.0, 0.0], [0.5, 0.0], [0.9, 0.0], [0.9, 0.9], [0.0, 0.9], [0.45, 0.9]]);
        assert_eq!(hull_bruteforce(&p).unwrap().vertex_set(), vec![0, 2, 3, 4]);
    }

    #[test]
    fn matches_gift_wrapping() {
        let p = sample_points(1000, 2, 3).unwrap();
        assert_eq!(hull_bruteforce(&p).unwrap().vertex_set(), gift_wrap(&p));
    }

    #[test]
    fn spatial_cube() {
        let mut rows = Vec::new();
        for &(x, y, z) in &[
            (0.5, 0.5, 0.5),
            (0.5, 0.0, 0.0),
            (0.0, 0.0, 0.5),
            (0.9, 0.9, 0.45),
        ] {
            rows.push([x, y, z]);
        }
        for c in 0..8 {
            rows.push([
                if c & 1 == 0 { 0.0 } else { 0.9 },
                if c & 2 == 0 { 0.0 } else { 0.9 },
                if c & 4 == 0 { 0.0 } else { 0.9 },
            ]);
        }
        let p = PointSet::from_rows(3, &rows).unwrap();
        let h = hull_bruteforce(&p).unwrap();
        assert_eq!(h.vertex_set(), (4..12).collect::<Vec<u32>>());
        // every point is on the inner side of every facet
        for f in h.facets() {
            for q in p.iter() {
                let o = orient3d(p.point(f[0] as usize), p.point(f[1] as usize), p.point(f[2] as usize), q);
                assert!(o >= 0.0);
            }
        }
        assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), h.vertex_set());
    }

    #[test]
    fn spatial_degenerate() {
        let p = PointSet::from_rows(3, &[[0.1, 0.1, 0.5], [0.8, 0.1, 0.5], [0.1, 0.8, 0.5], [0.3, 0.3, 0.5]])
            .unwrap();
        assert_eq!(
            hull_bruteforce(&p).unwrap(),
            Hull::Degenerate { dim: 2, vertices: vec![0, 1, 2] }
        );
        let p = PointSet::from_rows(3, &[[0.1, 0.1, 0.1], [0.2, 0.2, 0.2], [0.4, 0.4, 0.4]]).unwrap();
        assert_eq!(
            hull_bruteforce(&p).unwrap(),
            Hull::Degenerate { dim: 1, vertices: vec![0, 2] }
        );
    }

    #[test]
    fn spatial_random_contains_all() {
        let p = sample_points(400, 3, 17).unwrap();
        let h = hull_bruteforce(&p).unwrap();
        let Hull::Spatial { facets, vertices } = &h else { panic!() };
        // Euler: V - E + F = 2 with E = 3F/2 for a simplicial polytope
        assert_eq!(vertices.len() as i64 - (3 * facets.len() / 2) as i64 + facets.len() as i64, 2);
        for f in facets {
            for q in p.iter() {
                let o = orient3d(p.point(f[0] as usize), p.point(f[1] as usize), p.point(f[2] as usize), q);
                assert!(o >= 0.0);
            }
        }
    }

    #[test]
    fn quadtree_matches_oracle() {
        for seed in 0..10 {
            let p = sample_points(100 + 300 * seed as usize, 2, seed).unwrap();
            assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), hull_bruteforce(&p).unwrap().vertex_set());
            let p = sample_points(100 + 50 * seed as usize, 3, seed).unwrap();
            assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), hull_bruteforce(&p).unwrap().vertex_set());
        }
        for n in 1..=4 {
            let p = sample_points(n, 2, 9).unwrap();
            assert_eq!(hull_quadtree(&p).unwrap(), hull_bruteforce(&p).unwrap());
        }
    }

    #[test]
    fn corners_plus_interior() {
        let mut rows = vec![[0.0, 0.0], [0.99, 0.0], [0.0, 0.99], [0.99, 0.99]];
        let inner = sample_points(100, 2, 5).unwrap();
        for q in inner.iter() {
            rows.push([0.01 + 0.97 * q[0], 0.01 + 0.97 * q[1]]);
        }
        let p = pts(&rows);
        assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), vec![0, 1, 2, 3]);
    }
}
