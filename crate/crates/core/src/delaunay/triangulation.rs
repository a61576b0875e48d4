//! Incremental Bowyer-Watson triangulation in the plane and in space.
//!
//! The convex hull is closed off with ghost simplices that share the vertex
//! [`INF`]. A ghost is oriented so that replacing `INF` by a point `q` gives a
//! positive orientation exactly when `q` lies strictly beyond its hull facet.

use rustc_hash::FxHashMap;

use crate::points::PointSet;
use crate::predicates::{inside_facet_circumsphere, insphere, orient};

pub(crate) const INF: u32 = u32::MAX;

pub(crate) struct Triangulation<'a> {
    d: usize,
    points: &'a PointSet,
    verts: Vec<[u32; 4]>,
    nbr: Vec<[u32; 4]>,
    alive: Vec<bool>,
    free: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    hint: u32,
    vsimp: FxHashMap<u32, u32>,
    /// Set by `insert` when the cavity destroyed a simplex incident to `watch`.
    pub touched: bool,
    pub watch: u32,
    cavity: Vec<u32>,
    boundary: Vec<(u32, usize)>,
    stack: Vec<u32>,
    fresh: Vec<u32>,
    ridges: FxHashMap<u64, (u32, usize)>,
}

/// Outcome of trying to start a triangulation.
pub(crate) enum Seeded {
    Ok,
    /// The candidate list spans fewer than `d` dimensions.
    Degenerate,
}

impl<'a> Triangulation<'a> {
    pub fn new(points: &'a PointSet) -> Self {
        Triangulation {
            d: points.dim(),
            points,
            verts: Vec::new(),
            nbr: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            hint: 0,
            vsimp: FxHashMap::default(),
            touched: false,
            watch: INF,
            cavity: Vec::new(),
            boundary: Vec::new(),
            stack: Vec::new(),
            fresh: Vec::new(),
            ridges: FxHashMap::default(),
        }
    }

    pub fn points(&self) -> &'a PointSet {
        self.points
    }

    #[inline]
    fn pt(&self, i: u32) -> &'a [f64] {
        self.points.point(i as usize)
    }

    #[inline]
    fn k(&self) -> usize {
        self.d + 1
    }

    #[inline]
    pub fn is_ghost(&self, s: u32) -> bool {
        self.verts[s as usize][..self.k()].contains(&INF)
    }

    /// Picks `d + 1` affinely independent points from `order` (in that order of
    /// preference) and builds the first simplex. Returns the chosen seeds.
    pub fn seed(&mut self, order: &[u32]) -> (Seeded, Vec<u32>) {
        let d = self.d;
        let mut chosen: Vec<u32> = Vec::with_capacity(d + 1);
        for &c in order {
            if chosen.len() == d + 1 {
                break;
            }
            let ok = match chosen.len() {
                0 => true,
                1 => self.pt(chosen[0]) != self.pt(c),
                2 if d == 2 => orient(&[self.pt(chosen[0]), self.pt(chosen[1]), self.pt(c)]) != 0.0,
                2 => !collinear(self.pt(chosen[0]), self.pt(chosen[1]), self.pt(c)),
                _ => {
                    orient(&[self.pt(chosen[0]), self.pt(chosen[1]), self.pt(chosen[2]), self.pt(c)])
                        != 0.0
                }
            };
            if ok {
                chosen.push(c);
            }
        }
        if chosen.len() < d + 1 {
            return (Seeded::Degenerate, chosen);
        }
        let mut v = [INF; 4];
        v[..d + 1].copy_from_slice(&chosen);
        if self.orient_of(&v[..d + 1]) < 0.0 {
            v.swap(0, 1);
        }
        let mut all = vec![v];
        for i in 0..=d {
            let mut g = v;
            g[i] = INF;
            let others: Vec<usize> = (0..=d).filter(|&j| j != i).collect();
            g.swap(others[0], others[1]);
            all.push(g);
        }
        let ids: Vec<u32> = all.iter().map(|&s| self.alloc(s)).collect();
        let mut faces: FxHashMap<Vec<u32>, (u32, usize)> = FxHashMap::default();
        for &s in &ids {
            for i in 0..=d {
                let mut f: Vec<u32> = (0..=d).filter(|&j| j != i).map(|j| self.verts[s as usize][j]).collect();
                f.sort_unstable();
                if let Some((t, j)) = faces.remove(&f) {
                    self.nbr[s as usize][i] = t;
                    self.nbr[t as usize][j] = s;
                } else {
                    faces.insert(f, (s, i));
                }
            }
        }
        self.hint = ids[0];
        (Seeded::Ok, chosen)
    }

    fn orient_of(&self, v: &[u32]) -> f64 {
        let p: Vec<&[f64]> = v.iter().map(|&i| self.pt(i)).collect();
        orient(&p)
    }

    fn alloc(&mut self, v: [u32; 4]) -> u32 {
        let s = if let Some(s) = self.free.pop() {
            self.verts[s as usize] = v;
            self.nbr[s as usize] = [INF; 4];
            self.alive[s as usize] = true;
            s
        } else {
            self.verts.push(v);
            self.nbr.push([INF; 4]);
            self.alive.push(true);
            self.stamp.push(0);
            (self.verts.len() - 1) as u32
        };
        for &x in &v[..self.k()] {
            if x != INF {
                self.vsimp.insert(x, s);
            }
        }
        s
    }

    /// Orientation of simplex `s` with its vertex at position `i` replaced by `q`.
    #[inline]
    fn orient_with(&self, s: u32, i: usize, q: &[f64]) -> f64 {
        let v = &self.verts[s as usize];
        let mut p: [&[f64]; 4] = [q; 4];
        for j in 0..self.k() {
            if j != i {
                p[j] = self.pt(v[j]);
            }
        }
        orient(&p[..self.k()])
    }

    /// Is `q` inside the circumball of `s`, or beyond the hull facet of a ghost `s`?
    pub fn conflict(&self, s: u32, q: &[f64]) -> bool {
        let k = self.k();
        let v = &self.verts[s as usize];
        if let Some(i) = v[..k].iter().position(|&x| x == INF) {
            let o = self.orient_with(s, i, q);
            if o != 0.0 {
                return o > 0.0;
            }
            let mut f: [&[f64]; 3] = [q; 3];
            let mut m = 0;
            for j in (0..k).filter(|&j| j != i) {
                f[m] = self.pt(v[j]);
                m += 1;
            }
            inside_facet_circumsphere(&f[..m], q)
        } else {
            let mut p: [&[f64]; 4] = [q; 4];
            for j in 0..k {
                p[j] = self.pt(v[j]);
            }
            insphere(&p[..k], q) > 0.0
        }
    }

    fn any_alive(&self) -> u32 {
        (0..self.verts.len() as u32).find(|&s| self.alive[s as usize]).unwrap()
    }

    /// A simplex in conflict with `q`, or `None` if `q` duplicates a vertex.
    fn locate(&self, q: &[f64]) -> Option<u32> {
        let k = self.k();
        let mut s = if self.alive[self.hint as usize] {
            self.hint
        } else {
            self.any_alive()
        };
        if self.is_ghost(s) {
            let i = self.verts[s as usize][..k].iter().position(|&x| x == INF).unwrap();
            s = self.nbr[s as usize][i];
        }
        let limit = 4 * self.verts.len() + 64;
        for step in 0..limit {
            let v = self.verts[s as usize];
            if v[..k].iter().any(|&x| self.pt(x) == q) {
                return None;
            }
            let mut moved = false;
            for t in 0..k {
                let i = (step + t) % k;
                if self.orient_with(s, i, q) < 0.0 {
                    let nb = self.nbr[s as usize][i];
                    if self.is_ghost(nb) {
                        return Some(nb);
                    }
                    s = nb;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Some(s);
            }
        }
        log::debug!("point location walk did not terminate; scanning all simplices");
        self.locate_scan(q)
    }

    fn locate_scan(&self, q: &[f64]) -> Option<u32> {
        let k = self.k();
        for s in 0..self.verts.len() as u32 {
            if !self.alive[s as usize] {
                continue;
            }
            let v = &self.verts[s as usize];
            if v[..k].iter().any(|&x| x != INF && self.pt(x) == q) {
                return None;
            }
        }
        (0..self.verts.len() as u32).find(|&s| self.alive[s as usize] && self.conflict(s, q))
    }

    /// Inserts point `qi`; returns false when it duplicates an existing vertex.
    pub fn insert(&mut self, qi: u32) -> bool {
        let q = self.pt(qi);
        let Some(seed) = self.locate(q) else {
            return false;
        };
        let k = self.k();
        self.epoch += 2;
        let (inside, outside) = (self.epoch, self.epoch + 1);
        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.stamp[seed as usize] = inside;
        self.stack.push(seed);
        self.touched = false;
        while let Some(s) = self.stack.pop() {
            self.cavity.push(s);
            if self.verts[s as usize][..k].contains(&self.watch) {
                self.touched = true;
            }
            for i in 0..k {
                let nb = self.nbr[s as usize][i];
                let st = self.stamp[nb as usize];
                if st == inside {
                    continue;
                }
                if st == outside {
                    self.boundary.push((s, i));
                    continue;
                }
                if self.conflict(nb, q) {
                    self.stamp[nb as usize] = inside;
                    self.stack.push(nb);
                } else {
                    self.stamp[nb as usize] = outside;
                    self.boundary.push((s, i));
                }
            }
        }
        self.fresh.clear();
        self.ridges.clear();
        let boundary = std::mem::take(&mut self.boundary);
        for &(c, i) in &boundary {
            let mut v = self.verts[c as usize];
            v[i] = qi;
            let out = self.nbr[c as usize][i];
            let s = self.alloc(v);
            self.nbr[s as usize][i] = out;
            let back = self.nbr[out as usize][..k].iter().position(|&x| x == c).unwrap();
            self.nbr[out as usize][back] = s;
            for j in 0..k {
                if j == i {
                    continue;
                }
                let mut r = [0u32; 2];
                let mut m = 0;
                for t in 0..k {
                    if t != i && t != j {
                        r[m] = v[t];
                        m += 1;
                    }
                }
                let key = if m == 1 {
                    r[0] as u64
                } else {
                    let (a, b) = (r[0].min(r[1]), r[0].max(r[1]));
                    ((a as u64) << 32) | b as u64
                };
                if let Some((t, tj)) = self.ridges.remove(&key) {
                    self.nbr[s as usize][j] = t;
                    self.nbr[t as usize][tj] = s;
                } else {
                    self.ridges.insert(key, (s, j));
                }
            }
            self.fresh.push(s);
        }
        debug_assert!(self.ridges.is_empty());
        self.boundary = boundary;
        for &s in &self.cavity {
            self.alive[s as usize] = false;
            self.free.push(s);
        }
        self.hint = *self.fresh.last().unwrap();
        true
    }

    /// All live simplices (ghosts included) incident to vertex `p`.
    pub fn star_handles(&mut self, p: u32) -> Vec<u32> {
        let Some(&s0) = self.vsimp.get(&p) else {
            return Vec::new();
        };
        let k = self.k();
        self.epoch += 2;
        let mark = self.epoch;
        let mut out = vec![s0];
        self.stamp[s0 as usize] = mark;
        let mut head = 0;
        while head < out.len() {
            let s = out[head];
            head += 1;
            let v = self.verts[s as usize];
            let at = v[..k].iter().position(|&x| x == p).unwrap();
            for j in 0..k {
                if j == at {
                    continue;
                }
                let nb = self.nbr[s as usize][j];
                if self.stamp[nb as usize] != mark {
                    self.stamp[nb as usize] = mark;
                    out.push(nb);
                }
            }
        }
        out
    }

    pub fn simplex(&self, s: u32) -> &[u32] {
        &self.verts[s as usize][..self.k()]
    }

    /// Sorted vertex tuples of every finite simplex.
    pub fn finite_simplices(&self) -> Vec<[u32; 4]> {
        let k = self.k();
        let mut out = Vec::new();
        for s in 0..self.verts.len() {
            if self.alive[s] && !self.verts[s][..k].contains(&INF) {
                let mut v = self.verts[s];
                v[..k].sort_unstable();
                out.push(v);
            }
        }
        out
    }
}

fn collinear(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    use crate::predicates::orient2d;
    let pr = |p: &[f64], i: usize, j: usize| [p[i], p[j]];
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(i, j)| orient2d(&pr(a, i, j), &pr(b, i, j), &pr(c, i, j)) == 0.0)
}
