//! Fixed-height quadtree stored implicitly through Morton keys.
//!
//! A cell at level `l` is addressed by the interleaved bits of its integer
//! coordinates (`l` bits per axis, most significant first), so the parent of a
//! key is `key >> d` and the occupied leaves sorted by key list every subtree
//! as a contiguous run.

use rustc_hash::FxHashMap;

use crate::error::{param, Result};
use crate::points::PointSet;

/// Most key bits a tree may use.
pub const MAX_KEY_BITS: usize = 62;

/// Bits of the fixed-point encoding used by [`segment_level`].
const FIXED_BITS: u32 = 52;

#[derive(Clone, Debug)]
pub struct Quadtree {
    height: usize,
    dim: usize,
    keys: Vec<u64>,
    starts: Vec<u32>,
    items: Vec<u32>,
    slot: FxHashMap<u64, u32>,
}

/// One occupied cell at some level: its key and the range of leaf slots below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellRun {
    pub key: u64,
    pub leaves: (usize, usize),
}

/// `ceil(log2(n) / d)`, the height used for the hull and MST recursions.
pub fn default_height(n: usize, d: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let bits = usize::BITS - (n - 1).leading_zeros();
    (bits as usize).div_ceil(d)
}

pub fn build_quadtree(points: &PointSet, height: usize) -> Result<Quadtree> {
    Quadtree::new(points, height)
}

/// Interleaves `coords` (each below `2^bits`) into a Morton key.
pub fn morton_key(coords: &[usize], bits: usize) -> u64 {
    let d = coords.len();
    let mut key = 0u64;
    for b in (0..bits).rev() {
        for &c in coords {
            key = (key << 1) | ((c >> b) & 1) as u64;
        }
    }
    debug_assert!(bits * d <= 64);
    key
}

/// Inverse of [`morton_key`].
pub fn morton_decode(key: u64, bits: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0usize; d];
    let mut shift = bits * d;
    for _ in 0..bits {
        for c in out.iter_mut() {
            shift -= 1;
            *c = (*c << 1) | ((key >> shift) & 1) as usize;
        }
    }
    out
}

impl Quadtree {
    pub fn new(points: &PointSet, height: usize) -> Result<Self> {
        let dim = points.dim();
        if height * dim > MAX_KEY_BITS {
            return param(format!(
                "quadtree height {height} in d={dim} needs more than {MAX_KEY_BITS} key bits"
            ));
        }
        let mut tagged: Vec<(u64, u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (leaf_key(p, height), i as u32))
            .collect();
        tagged.sort_unstable();
        let mut keys = Vec::new();
        let mut starts = Vec::new();
        let mut items = Vec::with_capacity(tagged.len());
        for (idx, &(k, i)) in tagged.iter().enumerate() {
            if keys.last() != Some(&k) {
                keys.push(k);
                starts.push(idx as u32);
            }
            items.push(i);
        }
        starts.push(items.len() as u32);
        let slot = keys.iter().enumerate().map(|(s, &k)| (k, s as u32)).collect();
        Ok(Quadtree {
            height,
            dim,
            keys,
            starts,
            items,
            slot,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of leaves in the full tree, `2^(h d)`.
    pub fn leaf_capacity(&self) -> u64 {
        1u64 << (self.height * self.dim)
    }

    pub fn occupied_leaves(&self) -> usize {
        self.keys.len()
    }

    /// Leaf coordinates of `p`: `floor(p * 2^h)` componentwise.
    pub fn leaf_of(&self, p: &[f64]) -> Vec<usize> {
        p.iter().map(|&x| axis_cell(x, self.height)).collect()
    }

    /// Points in the leaf with integer coordinates `cell`.
    pub fn leaf_bucket(&self, cell: &[usize]) -> &[u32] {
        match self.slot.get(&morton_key(cell, self.height)) {
            Some(&s) => self.slot_items(s as usize),
            None => &[],
        }
    }

    /// Points stored in the occupied leaf at position `slot` of the key order.
    pub fn slot_items(&self, slot: usize) -> &[u32] {
        &self.items[self.starts[slot] as usize..self.starts[slot + 1] as usize]
    }

    /// Points below a run of leaves.
    pub fn run_items(&self, run: &CellRun) -> &[u32] {
        &self.items[self.starts[run.leaves.0] as usize..self.starts[run.leaves.1] as usize]
    }

    /// All points in leaf-key order.
    pub fn items(&self) -> &[u32] {
        &self.items
    }

    /// Occupied cells at `level`, in key order.
    pub fn occupied(&self, level: usize) -> Vec<CellRun> {
        assert!(level <= self.height);
        let shift = (self.height - level) * self.dim;
        let mut out: Vec<CellRun> = Vec::new();
        for (s, &k) in self.keys.iter().enumerate() {
            let key = if shift >= 64 { 0 } else { k >> shift };
            match out.last_mut() {
                Some(run) if run.key == key => run.leaves.1 = s + 1,
                _ => out.push(CellRun {
                    key,
                    leaves: (s, s + 1),
                }),
            }
        }
        out
    }

    /// Occupied children (at `level + 1`) of the occupied cell `run` at `level`.
    pub fn children(&self, level: usize, run: &CellRun) -> Vec<CellRun> {
        assert!(level < self.height);
        let shift = (self.height - level - 1) * self.dim;
        let mut out: Vec<CellRun> = Vec::new();
        for s in run.leaves.0..run.leaves.1 {
            let key = self.keys[s] >> shift;
            match out.last_mut() {
                Some(c) if c.key == key => c.leaves.1 = s + 1,
                _ => out.push(CellRun {
                    key,
                    leaves: (s, s + 1),
                }),
            }
        }
        out
    }

    /// Key of the level-`level` cell holding `p`.
    pub fn cell_key(&self, p: &[f64], level: usize) -> u64 {
        let shift = (self.height - level) * self.dim;
        if shift >= 64 {
            0
        } else {
            leaf_key(p, self.height) >> shift
        }
    }

    /// Integer coordinates and closed box `[lo, hi]` of the cell `key` at `level`.
    pub fn cell_box(&self, level: usize, key: u64) -> (Vec<f64>, Vec<f64>) {
        let c = morton_decode(key, level, self.dim);
        let w = 0.5f64.powi(level as i32);
        let lo = c.iter().map(|&x| x as f64 * w).collect();
        let hi = c.iter().map(|&x| (x + 1) as f64 * w).collect();
        (lo, hi)
    }
}

#[inline]
fn axis_cell(x: f64, height: usize) -> usize {
    let side = 1usize << height;
    ((x * side as f64) as usize).min(side - 1)
}

#[inline]
pub(crate) fn leaf_key(p: &[f64], height: usize) -> u64 {
    let mut c = [0usize; 8];
    for (k, &x) in p.iter().enumerate() {
        c[k] = axis_cell(x, height);
    }
    morton_key(&c[..p.len()], height)
}

#[inline]
fn fixed(x: f64) -> u64 {
    (x * (1u64 << FIXED_BITS) as f64) as u64
}

/// Deepest level `l <= h` whose cell contains both `p` and `q`.
///
/// Each coordinate is encoded as a 52-bit fixed-point integer; the common
/// prefix length of the two encodings is the number of levels on which that
/// axis agrees.
pub fn segment_level(p: &[f64], q: &[f64], height: usize) -> usize {
    let mut level = height;
    for (&a, &b) in p.iter().zip(q) {
        let x = fixed(a) ^ fixed(b);
        if x != 0 {
            // highest differing bit sits at position 63 - lz; the prefix above it agrees
            let common = (x.leading_zeros() - (64 - FIXED_BITS)) as usize;
            level = level.min(common);
        }
    }
    level
}
