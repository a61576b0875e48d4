use std::cmp::Ordering;

use crate::error::{param, Result};

/// A simplex as a sorted tuple of 1 to 4 vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Simplex {
    v: [u32; 4],
    len: u8,
}

impl Simplex {
    /// Builds a simplex from distinct vertex indices in any order.
    pub fn new(vertices: &[u32]) -> Self {
        assert!((1..=4).contains(&vertices.len()));
        let mut v = [0u32; 4];
        v[..vertices.len()].copy_from_slice(vertices);
        v[..vertices.len()].sort_unstable();
        Simplex {
            v,
            len: vertices.len() as u8,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.v[..self.len as usize]
    }

    /// Dimension: vertex count minus one.
    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    pub fn contains(&self, p: u32) -> bool {
        self.vertices().contains(&p)
    }

    /// All non-empty faces, the simplex itself included.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let k = self.len as usize;
        (1u32..(1 << k)).map(move |mask| {
            let sub: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| self.v[i]).collect();
            Simplex::new(&sub)
        })
    }
}

impl Simplex {
    /// Packs the vertices so that integer order is lexicographic order of the
    /// vertex tuples. Unused slots are zero, which sorts a face before its
    /// extensions because later vertices of a sorted tuple are never zero.
    #[inline]
    pub(crate) fn key(&self) -> u128 {
        let v = &self.v;
        let pad = |i: usize| if i < self.len as usize { v[i] as u128 } else { 0 };
        pad(0) << 96 | pad(1) << 64 | pad(2) << 32 | pad(3)
    }

    pub(crate) fn from_key(key: u128) -> Self {
        let v = [(key >> 96) as u32, (key >> 64) as u32, (key >> 32) as u32, key as u32];
        let len = 1 + v[1..].iter().take_while(|&&x| x != 0).count();
        Simplex { v, len: len as u8 }
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A face-closed set of simplices over vertices `0..n`, with a per-vertex star index.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    dim: usize,
    n: usize,
    simplices: Vec<Simplex>,
    star_start: Vec<u32>,
    star_items: Vec<u32>,
}

impl SimplicialComplex {
    /// Closure of `tops` under taking faces. Every vertex `0..n` is present as a 0-simplex.
    pub fn from_top(dim: usize, n: usize, tops: &[Simplex]) -> Self {
        let mut keys: Vec<u128> = (0..n as u32).map(|i| Simplex::new(&[i]).key()).collect();
        for t in tops {
            keys.extend(t.faces().filter(|f| f.len > 1).map(|f| f.key()));
        }
        keys.sort_unstable();
        keys.dedup();
        let all: Vec<Simplex> = keys.into_iter().map(Simplex::from_key).collect();
        let mut count = vec![0u32; n + 1];
        for s in &all {
            for &v in s.vertices() {
                count[v as usize + 1] += 1;
            }
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut items = vec![0u32; count[n] as usize];
        for (si, s) in all.iter().enumerate() {
            for &v in s.vertices() {
                items[fill[v as usize] as usize] = si as u32;
                fill[v as usize] += 1;
            }
        }
        SimplicialComplex {
            dim,
            n,
            simplices: all,
            star_start: count,
            star_items: items,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.binary_search(s).is_ok()
    }

    /// Simplices of dimension `k`.
    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> + '_ {
        self.simplices.iter().filter(move |s| s.dim() == k)
    }

    /// Full-dimensional simplices, sorted.
    pub fn top_simplices(&self) -> Vec<Simplex> {
        self.of_dim(self.dim).copied().collect()
    }

    /// Simplex counts indexed by dimension `0..=d`.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.dim + 1];
        for s in &self.simplices {
            c[s.dim()] += 1;
        }
        c
    }

    /// All simplices containing vertex `p`, of every dimension.
    pub fn star(&self, p: u32) -> Result<Vec<Simplex>> {
        if p as usize >= self.n {
            return param(format!("vertex {p} not in complex"));
        }
        let (a, b) = (
            self.star_start[p as usize] as usize,
            self.star_start[p as usize + 1] as usize,
        );
        Ok(self.star_items[a..b]
            .iter()
            .map(|&i| self.simplices[i as usize])
            .collect())
    }

    /// Vertices sharing an edge with `p`.
    pub fn neighbors(&self, p: u32) -> Result<Vec<u32>> {
        Ok(self
            .star(p)?
            .into_iter()
            .filter(|s| s.dim() == 1)
            .map(|s| if s.vertices()[0] == p { s.vertices()[1] } else { s.vertices()[0] })
            .collect())
    }

    /// Edges as `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        self.of_dim(1)
            .map(|s| (s.vertices()[0], s.vertices()[1]))
            .collect()
    }
}

/// Every simplex of `c` containing `p`, by a linear filter.
pub fn star(c: &SimplicialComplex, p: u32) -> Result<Vec<Simplex>> {
    c.star(p)
}
