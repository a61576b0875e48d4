//! Delaunay triangulations from local stars.
//!
//! Points of the fortress `[delta, 1 - delta]^d` triangulate the ball of radius
//! twice their reach; moat points triangulate their vicinity (found through a
//! k-d tree over the moat) together with the ball of radius `2 delta`. The
//! complex is the union of all stars.
//!
//! Every local triangulation inserts candidates nearest first and stops as soon
//! as no remaining candidate can reach a circumball of the current star. Stars
//! not covered by the locality guarantee (moat stars and empty-cone fallbacks)
//! are certified against the whole point set; any point found inside a
//! circumball or beyond a hull facet is added and the star recomputed.

mod complex;
mod kdtree;
mod triangulation;
mod verify;
mod vicinity;

use rayon::prelude::*;
use serde::Serialize;

use crate::cones::{default_cones, grid_side, nearest_in_cones, reach_of_hits, ConeSet};
use crate::error::{param, Error, Result};
use crate::grid::UniformGrid;
use crate::points::{dist, Params, PointSet};
use crate::predicates::{circumsphere, insphere, orient, orient2d};
use crate::quadtree::leaf_key;

pub use complex::{star, Simplex, SimplicialComplex};
pub use kdtree::KdTree;
pub use verify::{verify_delaunay, VerifyMode, VerifyReport};
pub use vicinity::{box_volume, in_vicinity, vicinity_boxes, vicinity_tau, AaBox};

use triangulation::{Seeded, Triangulation, INF};

fn check_dim(points: &PointSet) -> Result<()> {
    if !(2..=3).contains(&points.dim()) {
        return param(format!("Delaunay triangulations need d in {{2,3}}, got {}", points.dim()));
    }
    Ok(())
}

/// Delaunay triangulation of a whole (small or moderate) point set by randomized
/// incremental insertion in Morton order. In the plane, cocircular quadruples
/// take the diagonal with the lexicographically smaller index pair.
pub fn dt_small(points: &PointSet) -> Result<SimplicialComplex> {
    check_dim(points)?;
    let d = points.dim();
    let tops = dt_tops(points)?;
    Ok(SimplicialComplex::from_top(d, points.len(), &tops))
}

fn dt_tops(points: &PointSet) -> Result<Vec<Simplex>> {
    let d = points.dim();
    let bits = if d == 2 { 16 } else { 10 };
    let mut order: Vec<(u64, u32)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (leaf_key(p, bits), i as u32))
        .collect();
    order.sort_unstable();
    let order: Vec<u32> = order.into_iter().map(|x| x.1).collect();
    let mut tri = Triangulation::new(points);
    let (seeded, chosen) = tri.seed(&order);
    if let Seeded::Degenerate = seeded {
        return Err(Error::Degenerate(format!(
            "fewer than {} affinely independent points",
            d + 1
        )));
    }
    for &q in &order {
        if !chosen.contains(&q) {
            tri.insert(q);
        }
    }
    let mut tops: Vec<[u32; 4]> = tri.finite_simplices();
    if d == 2 {
        let mut t: Vec<[u32; 3]> = tops.iter().map(|s| [s[0], s[1], s[2]]).collect();
        resolve_cocircular(points, &mut t);
        tops = t.into_iter().map(|s| [s[0], s[1], s[2], INF]).collect();
    }
    let mut out: Vec<Simplex> = tops.iter().map(|s| Simplex::new(&s[..d + 1])).collect();
    out.sort_unstable();
    Ok(out)
}

/// Flips every cocircular diagonal to the lexicographically smaller one until stable.
fn resolve_cocircular(points: &PointSet, tris: &mut [[u32; 3]]) {
    use rustc_hash::FxHashMap;
    let pt = |i: u32| points.point(i as usize);
    loop {
        let mut edges: FxHashMap<(u32, u32), Vec<(usize, u32)>> = FxHashMap::default();
        for (ti, t) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push((ti, t[(k + 2) % 3]));
            }
        }
        let mut keys: Vec<(u32, u32)> = edges.keys().copied().collect();
        keys.sort_unstable();
        let mut flipped = false;
        for e in keys {
            let side = &edges[&e];
            if side.len() != 2 {
                continue;
            }
            let (a1, a2) = (side[0].1, side[1].1);
            let alt = (a1.min(a2), a1.max(a2));
            if alt >= e {
                continue;
            }
            let mut tri = [pt(e.0), pt(e.1), pt(a1)];
            if orient2d(tri[0], tri[1], tri[2]) < 0.0 {
                tri.swap(0, 1);
            }
            if insphere(&tri, pt(a2)) != 0.0 {
                continue;
            }
            tris[side[0].0] = [e.0, a1, a2];
            tris[side[1].0] = [e.1, a1, a2];
            flipped = true;
            break;
        }
        if !flipped {
            return;
        }
    }
}

/// The top-dimensional simplices incident to one vertex, with bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct Star {
    pub p: u32,
    pub top: Vec<Simplex>,
    /// Some cone was empty within `delta`; the star came from the `2 delta` ball.
    pub empty_cone: bool,
    /// Certification rounds that found a missing point.
    pub repairs: u32,
    /// Size of the gathered candidate set.
    pub gathered: usize,
    /// Candidates actually inserted before the star was final.
    pub inserted: usize,
    /// Reach of a fortress point, when finite.
    pub reach: Option<f64>,
}

impl Star {
    /// Every simplex containing `p`, all dimensions, sorted.
    pub fn simplices(&self) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self
            .top
            .iter()
            .flat_map(|t| t.faces().collect::<Vec<_>>())
            .filter(|f| f.contains(self.p))
            .collect();
        out.push(Simplex::new(&[self.p]));
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn fallback_event(&self) -> bool {
        self.empty_cone || self.repairs > 0
    }
}

const SORT_CHUNK: usize = 8;

/// Makes `v[..want]` hold the `want` smallest entries in order, given `v[..*sorted]` already does.
fn sort_prefix(v: &mut [(f64, u32)], sorted: &mut usize, want: usize) {
    let want = want.min(v.len());
    if want <= *sorted {
        return;
    }
    let cmp = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    let rest = &mut v[*sorted..];
    let k = want - *sorted;
    if k < rest.len() {
        rest.select_nth_unstable_by(k - 1, cmp);
    }
    rest[..k].sort_unstable_by(cmp);
    *sorted = want;
}

/// Ball candidates around a point, handed out in growing shells up to `limit`.
struct Shells<'g> {
    grid: &'g UniformGrid,
    points: &'g PointSet,
    center: u32,
    /// Everything within this distance has been handed out.
    done: f64,
    limit: f64,
}

impl Shells<'_> {
    /// Appends the next shell if something out to `want` may still be missing.
    fn grow(&mut self, order: &mut Vec<(f64, u32)>, want: f64) -> bool {
        if self.done >= self.limit || want <= self.done {
            return false;
        }
        let to = (2.0 * self.done).min(self.limit);
        let from = self.done;
        let c = self.points.point(self.center as usize);
        self.grid.for_each_in_ball(self.points, c, to, |q, dq| {
            if dq > from {
                order.push((dq, q));
            }
        });
        self.done = to;
        true
    }
}

struct LocalStar<'a> {
    tri: Triangulation<'a>,
    p: u32,
    inserted: Vec<u32>,
    seeded: bool,
    /// Candidates looked at, `p` included.
    gathered: usize,
}

/// A star simplex with how far from `p` its conflict region extends.
struct Region {
    s: u32,
    reach: f64,
    filter: Filter,
}

#[derive(Clone, Copy)]
enum Filter {
    Ball { c: [f64; 3], r2: f64 },
    Half { n: [f64; 3], off: f64 },
    Exact,
}

struct StarShape {
    top: Vec<Simplex>,
    /// Ghost simplices around `p`, as vertex arrays with `INF` in place.
    ghosts: Vec<Vec<u32>>,
}

impl<'a> LocalStar<'a> {
    /// Triangulates candidates nearest-first around `p`, stopping once the star
    /// of `p` is final for the whole candidate set. `order` holds distinct
    /// `(distance to p, index)` pairs (`p` itself is skipped); `shells`, if
    /// given, supplies the candidates beyond `order` on demand.
    fn build(
        points: &'a PointSet,
        p: u32,
        mut order: Vec<(f64, u32)>,
        mut shells: Option<Shells<'_>>,
    ) -> Self {
        order.retain(|x| x.1 != p);
        // sorted lazily: most stars close after a few dozen candidates
        let mut sorted = 0;
        sort_prefix(&mut order, &mut sorted, 4 * SORT_CHUNK);
        let mut tri = Triangulation::new(points);
        tri.watch = p;
        let seq = |order: &[(f64, u32)]| std::iter::once(p).chain(order.iter().map(|x| x.1)).collect::<Vec<_>>();
        let (mut seeded, mut chosen) = tri.seed(&seq(&order[..sorted]));
        if matches!(seeded, Seeded::Degenerate) {
            if let Some(sh) = shells.as_mut() {
                while sh.grow(&mut order, f64::INFINITY) {}
            }
            let all = order.len();
            sort_prefix(&mut order, &mut sorted, all);
            (seeded, chosen) = tri.seed(&seq(&order));
        }
        let mut me = LocalStar {
            tri,
            p,
            inserted: chosen.clone(),
            seeded: matches!(seeded, Seeded::Ok),
            gathered: order.len(),
        };
        if !me.seeded {
            return me;
        }
        let mut done = vec![false; order.len()];
        let mut star: Vec<Region> = Vec::new();
        let mut dirty = true;
        let mut i = 0;
        loop {
            if dirty {
                star = me.tri.star_handles(me.p).into_iter().map(|s| me.region(s)).collect();
                dirty = false;
            }
            if i == order.len() {
                let far = star.iter().map(|r| r.reach).fold(0.0, f64::max);
                if shells.as_mut().is_some_and(|sh| sh.grow(&mut order, far)) {
                    done.resize(order.len(), false);
                    continue;
                }
                break;
            }
            if i == sorted {
                let want = 2 * sorted;
                sort_prefix(&mut order, &mut sorted, want);
            }
            let (dq, q) = order[i];
            if done[i] || chosen.contains(&q) {
                i += 1;
                continue;
            }
            let mut next = i;
            let open: Vec<&Region> = star.iter().filter(|r| r.reach >= dq).collect();
            if open.is_empty() {
                break;
            }
            if open.len() < star.len() {
                // only simplices that can still reach this far matter; test them directly
                let hit = (i..order.len()).find(|&j| {
                    !done[j] && open.iter().any(|r| me.conflict(r, points.point(order[j].1 as usize)))
                });
                match hit {
                    Some(j) => next = j,
                    None => {
                        // nothing gathered so far conflicts; look further out if needed
                        let far = open.iter().map(|r| r.reach).fold(0.0, f64::max);
                        if shells.as_mut().is_some_and(|sh| sh.grow(&mut order, far)) {
                            done.resize(order.len(), false);
                            continue;
                        }
                        break;
                    }
                }
            }
            let q = order[next].1;
            done[next] = true;
            me.tri.insert(q);
            me.inserted.push(q);
            if me.tri.touched {
                dirty = true;
            }
        }
        me.gathered = order.len() + 1;
        me
    }

    /// Conflict region of simplex `s` with a floating-point filter.
    fn region(&self, s: u32) -> Region {
        let v = self.tri.simplex(s);
        let pts = self.tri.points();
        let d = pts.dim();
        if v.contains(&INF) {
            let f: Vec<&[f64]> = v.iter().filter(|&&x| x != INF).map(|&x| pts.point(x as usize)).collect();
            let mut n = [0.0; 3];
            if d == 2 {
                n[0] = f[1][1] - f[0][1];
                n[1] = f[0][0] - f[1][0];
            } else {
                let a: Vec<f64> = (0..3).map(|k| f[1][k] - f[0][k]).collect();
                let b: Vec<f64> = (0..3).map(|k| f[2][k] - f[0][k]).collect();
                n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            }
            let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut filter = Filter::Exact;
            if len > 1e-150 {
                n.iter_mut().for_each(|x| *x /= len);
                let probe: Vec<f64> = (0..d).map(|k| f[0][k] + n[k]).collect();
                if !self.tri.conflict(s, &probe) {
                    n.iter_mut().for_each(|x| *x = -*x);
                }
                let off = (0..d).map(|k| n[k] * f[0][k]).sum();
                filter = Filter::Half { n, off };
            }
            Region { s, reach: f64::INFINITY, filter }
        } else {
            let p: Vec<&[f64]> = v.iter().map(|&x| pts.point(x as usize)).collect();
            let (c, r2) = circumsphere(&p);
            let r = r2.sqrt();
            let filter = if r.is_finite() { Filter::Ball { c, r2 } } else { Filter::Exact };
            Region {
                s,
                reach: if r.is_finite() { 2.0 * r * (1.0 + 1e-9) } else { f64::INFINITY },
                filter,
            }
        }
    }

    fn conflict(&self, r: &Region, q: &[f64]) -> bool {
        match r.filter {
            Filter::Ball { c, r2 } => {
                let e: f64 = q.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                if e > r2 * (1.0 + 1e-6) + 1e-12 {
                    return false;
                }
                if e < r2 * (1.0 - 1e-6) - 1e-12 {
                    return true;
                }
            }
            Filter::Half { n, off } => {
                let e: f64 = q.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>() - off;
                if e < -1e-9 {
                    return false;
                }
                if e > 1e-9 {
                    return true;
                }
            }
            Filter::Exact => {}
        }
        self.tri.conflict(r.s, q)
    }

    fn shape(&mut self) -> StarShape {
        let mut top = Vec::new();
        let mut ghosts = Vec::new();
        for s in self.tri.star_handles(self.p) {
            let v = self.tri.simplex(s);
            if v.contains(&INF) {
                ghosts.push(v.to_vec());
            } else {
                top.push(Simplex::new(v));
            }
        }
        top.sort_unstable();
        StarShape { top, ghosts }
    }

    fn add(&mut self, qs: &[u32]) {
        if !self.seeded {
            return;
        }
        for &q in qs {
            if !self.inserted.contains(&q) {
                self.tri.insert(q);
                self.inserted.push(q);
            }
        }
    }
}

/// Points of `P` that show a star is not part of the Delaunay triangulation:
/// points strictly inside a circumball, or strictly beyond a hull facet at `p`.
fn offenders(grid: &UniformGrid, points: &PointSet, shape: &StarShape) -> Vec<u32> {
    let mut out = Vec::new();
    let pt = |i: u32| points.point(i as usize);
    for s in &shape.top {
        let mut v: Vec<&[f64]> = s.vertices().iter().map(|&i| pt(i)).collect();
        if orient(&v) < 0.0 {
            v.swap(0, 1);
        }
        let (c, r2) = circumsphere(&v);
        let r = r2.sqrt();
        let c = &c[..points.dim()];
        if !r.is_finite() {
            continue;
        }
        grid.for_each_in_ball(points, c, r * (1.0 + 1e-9) + 1e-15, |q, _| {
            if !s.contains(q) && insphere(&v, pt(q)) > 0.0 {
                out.push(q);
            }
        });
    }
    for g in &shape.ghosts {
        let inf = g.iter().position(|&x| x == INF).unwrap();
        let beyond = |x: &[f64]| {
            let mut v: Vec<&[f64]> = g.iter().map(|&i| if i == INF { x } else { pt(i) }).collect();
            v[inf] = x;
            orient(&v)
        };
        let d = points.dim();
        let anchor = pt(g[if inf == 0 { 1 } else { 0 }]);
        let starts = grid.block_around(anchor);
        let mut corner = vec![0.0; d];
        grid.flood(
            &starts,
            |lo, hi| {
                (0..1usize << d).any(|m| {
                    for k in 0..d {
                        corner[k] = if m >> k & 1 == 0 { lo[k] } else { hi[k] };
                    }
                    beyond(&corner) > 0.0
                })
            },
            |cell| {
                for &q in grid.bucket_linear(cell) {
                    if beyond(pt(q)) > 0.0 {
                        out.push(q);
                    }
                }
            },
        );
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Builds the star of `p` from `cands`, optionally certifying and repairing it.
fn star_from(
    grid: &UniformGrid,
    points: &PointSet,
    p: u32,
    cands: Vec<(f64, u32)>,
    shells: Option<Shells<'_>>,
    certify: bool,
) -> Star {
    let mut local = LocalStar::build(points, p, cands, shells);
    let mut repairs = 0;
    if !local.seeded {
        // too few independent candidates: fall back to everything
        let c = points.point(p as usize);
        let all = points.iter().enumerate().map(|(i, q)| (dist(c, q), i as u32)).collect();
        local = LocalStar::build(points, p, all, None);
        repairs += 1;
    }
    let mut shape = local.shape();
    if certify && local.seeded {
        loop {
            let bad = offenders(grid, points, &shape);
            if bad.is_empty() {
                break;
            }
            log::debug!("star of {p}: {} offending points, repairing", bad.len());
            repairs += 1;
            local.add(&bad);
            shape = local.shape();
        }
    }
    Star {
        p,
        top: shape.top,
        empty_cone: false,
        repairs,
        gathered: local.gathered,
        inserted: local.inserted.len(),
        reach: None,
    }
}

fn gather(grid: &UniformGrid, points: &PointSet, c: &[f64], r: f64) -> Vec<(f64, u32)> {
    let mut out = Vec::new();
    grid.for_each_in_ball(points, c, r, |q, dq| out.push((dq, q)));
    out
}

/// Star of a fortress point: triangulate the points within twice its reach. If
/// a cone is empty within `delta`, the `2 delta` ball is used instead and the
/// result is certified.
pub fn fortress_star(
    grid: &UniformGrid,
    points: &PointSet,
    p: u32,
    params: &Params,
    cones: &ConeSet,
) -> Result<Star> {
    check_dim(points)?;
    if !params.in_fortress(points.point(p as usize)) {
        return param(format!("point {p} is not in the fortress"));
    }
    let hits = nearest_in_cones(grid, points, p as usize, cones, params.delta);
    let c = points.point(p as usize);
    Ok(match reach_of_hits(&hits) {
        Some(r) => {
            let shells = Shells {
                grid,
                points,
                center: p,
                done: r,
                limit: 2.0 * r,
            };
            let mut s = star_from(grid, points, p, gather(grid, points, c, r), Some(shells), false);
            s.reach = Some(r);
            s
        }
        None => {
            log::debug!("point {p}: empty cone within delta, using the 2 delta ball");
            let cands = gather(grid, points, c, 2.0 * params.delta);
            let mut s = star_from(grid, points, p, cands, None, true);
            s.empty_cone = true;
            s
        }
    })
}

/// Orthogonal range reporting over the moat points.
#[derive(Clone, Debug)]
pub struct MoatRangeStructure {
    tree: KdTree,
}

impl MoatRangeStructure {
    pub fn new(points: &PointSet, params: &Params) -> Self {
        let moat: Vec<u32> = (0..points.len() as u32)
            .filter(|&i| !params.in_fortress(points.point(i as usize)))
            .collect();
        MoatRangeStructure {
            tree: KdTree::new(points, &moat),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// Moat points inside the closed box.
    pub fn range_query(&self, b: &AaBox) -> Vec<u32> {
        let mut out = Vec::new();
        self.tree.query(&b.lo, &b.hi, &mut out);
        out.sort_unstable();
        out
    }

    /// Moat points in the vicinity of `p`, sorted.
    pub fn vicinity(&self, points: &PointSet, p: u32, params: &Params) -> Vec<u32> {
        let mut out = self.vicinity_unsorted(points, p, params);
        out.sort_unstable();
        out
    }

    fn vicinity_unsorted(&self, points: &PointSet, p: u32, params: &Params) -> Vec<u32> {
        let c = points.point(p as usize);
        let mut hits = Vec::new();
        let mut out = Vec::new();
        SEEN.with(|seen| {
            let mut seen = seen.borrow_mut();
            seen.next(points.len());
            for b in vicinity_boxes(c, params) {
                hits.clear();
                self.tree.query(&b.lo, &b.hi, &mut hits);
                for &q in &hits {
                    if seen.first(q) && in_vicinity(c, points.point(q as usize), params.phi) {
                        out.push(q);
                    }
                }
            }
        });
        out
    }
}

/// Epoch-stamped membership marks, one set per thread.
struct Seen {
    epoch: u32,
    mark: Vec<u32>,
}

impl Seen {
    fn next(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    /// True the first time `q` is seen in this epoch.
    fn first(&mut self, q: u32) -> bool {
        let m = &mut self.mark[q as usize];
        if *m == self.epoch {
            false
        } else {
            *m = self.epoch;
            true
        }
    }
}

thread_local! {
    static SEEN: std::cell::RefCell<Seen> = const {
        std::cell::RefCell::new(Seen { epoch: 0, mark: Vec::new() })
    };
}

/// Star of a moat point from its moat vicinity plus the `2 delta` ball, certified.
pub fn moat_star(
    p: u32,
    mrs: &MoatRangeStructure,
    grid: &UniformGrid,
    points: &PointSet,
    params: &Params,
) -> Result<Star> {
    check_dim(points)?;
    if params.in_fortress(points.point(p as usize)) {
        return param(format!("point {p} is in the fortress, not the moat"));
    }
    let c = points.point(p as usize);
    let r = 2.0 * params.delta;
    let mut cands = gather(grid, points, c, r);
    cands.extend(
        mrs.vicinity_unsorted(points, p, params)
            .into_iter()
            .map(|q| (dist(c, points.point(q as usize)), q))
            .filter(|x| x.0 > r),
    );
    Ok(star_from(grid, points, p, cands, None, true))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DtStats {
    pub n: usize,
    pub d: usize,
    /// Simplex counts by dimension.
    pub simplex_counts: Vec<usize>,
    /// Stars that needed a fallback: an empty cone or a certification repair.
    pub fallback_events: usize,
    pub empty_cone_events: usize,
    pub repair_events: usize,
    /// Top simplices not reported by all of their vertices' stars.
    pub inconsistencies: usize,
    pub fortress_points: usize,
    pub moat_points: usize,
    pub mean_gathered: f64,
    pub mean_inserted: f64,
}

#[derive(Clone, Debug)]
pub struct Delaunay {
    pub complex: SimplicialComplex,
    pub stats: DtStats,
    pub stars: Vec<Star>,
}

/// Delaunay triangulation as the union of per-point stars.
pub fn dt_build(points: &PointSet, params: &Params) -> Result<Delaunay> {
    check_dim(points)?;
    let n = points.len();
    let d = points.dim();
    if params.d != d || params.n != n {
        return param("parameters were derived for a different (n, d)");
    }
    if n <= d + 2 {
        let complex = dt_small(points)?;
        let stats = DtStats {
            n,
            d,
            simplex_counts: complex.counts(),
            ..Default::default()
        };
        return Ok(Delaunay {
            complex,
            stats,
            stars: Vec::new(),
        });
    }
    let grid = UniformGrid::new(points, grid_side(n, d))?;
    let cones = default_cones(d)?;
    let mrs = MoatRangeStructure::new(points, params);
    let stars: Vec<Star> = (0..n as u32)
        .into_par_iter()
        .map(|p| {
            if params.in_fortress(points.point(p as usize)) {
                fortress_star(&grid, points, p, params, cones)
            } else {
                moat_star(p, &mrs, &grid, points, params)
            }
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<u128> = stars.iter().flat_map(|s| s.top.iter().map(|t| t.key())).collect();
    all.sort_unstable();
    let mut tops = Vec::with_capacity(all.len() / (d + 1));
    let mut inconsistencies = 0;
    for run in all.chunk_by(|a, b| a == b) {
        let s = Simplex::from_key(run[0]);
        if run.len() == d + 1 {
            tops.push(s);
        } else {
            inconsistencies += 1;
            log::debug!("simplex {:?} reported by {} of {} stars", s.vertices(), run.len(), d + 1);
            if empty_circumball(&grid, points, &s) {
                tops.push(s);
            }
        }
    }
    let complex = SimplicialComplex::from_top(d, n, &tops);
    let empty_cone_events = stars.iter().filter(|s| s.empty_cone).count();
    let repair_events = stars.iter().filter(|s| s.repairs > 0).count();
    let stats = DtStats {
        n,
        d,
        simplex_counts: complex.counts(),
        fallback_events: stars.iter().filter(|s| s.fallback_event()).count(),
        empty_cone_events,
        repair_events,
        inconsistencies,
        fortress_points: stars.iter().filter(|s| params.in_fortress(points.point(s.p as usize))).count(),
        moat_points: mrs.len(),
        mean_gathered: stars.iter().map(|s| s.gathered as f64).sum::<f64>() / n as f64,
        mean_inserted: stars.iter().map(|s| s.inserted as f64).sum::<f64>() / n as f64,
    };
    Ok(Delaunay {
        complex,
        stats,
        stars,
    })
}

fn empty_circumball(grid: &UniformGrid, points: &PointSet, s: &Simplex) -> bool {
    let pt = |i: u32| points.point(i as usize);
    let mut v: Vec<&[f64]> = s.vertices().iter().map(|&i| pt(i)).collect();
    if orient(&v) < 0.0 {
        v.swap(0, 1);
    }
    let (c, r2) = circumsphere(&v);
    let r = r2.sqrt();
    let mut empty = true;
    grid.for_each_in_ball(points, &c[..points.dim()], r * (1.0 + 1e-9) + 1e-15, |q, _| {
        if !s.contains(q) && insphere(&v, pt(q)) > 0.0 {
            empty = false;
        }
    });
    empty
}
