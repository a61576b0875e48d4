//! Uniform grid bucketing with flood-fill region scans and per-row prefix sums.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::error::{param, Result};
use crate::points::{dist, PointSet};

/// Largest number of cells a grid may allocate.
pub const MAX_CELLS: usize = 1 << 28;

/// An `N x .. x N` grid over `[0,1)^d`. Each point sits in the cell
/// `(floor(p_1 N), .., floor(p_d N))`.
///
/// Buckets are stored as one contiguous index array with per-cell offsets
/// (cells are addressed by their linearized id, axis 0 fastest), so bucket
/// retrieval is a constant-time slice.
#[derive(Clone, Debug)]
pub struct UniformGrid {
    cells_per_axis: usize,
    dim: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

/// Componentwise `floor(p_i * N)`.
pub fn cell_id(p: &[f64], cells_per_axis: usize) -> Result<Vec<usize>> {
    if cells_per_axis == 0 {
        return param("cells per axis must be at least 1");
    }
    p.iter()
        .map(|&x| {
            if !(0.0..1.0).contains(&x) {
                return param(format!("coordinate {x} outside [0,1)"));
            }
            Ok(axis_cell(x, cells_per_axis))
        })
        .collect()
}

#[inline]
pub(crate) fn axis_cell(x: f64, n: usize) -> usize {
    ((x * n as f64) as usize).min(n - 1)
}

fn clamped_axis_cell(x: f64, n: usize) -> usize {
    if x <= 0.0 {
        0
    } else if x >= 1.0 {
        n - 1
    } else {
        axis_cell(x, n)
    }
}

pub fn build_grid(points: &PointSet, cells_per_axis: usize) -> Result<UniformGrid> {
    UniformGrid::new(points, cells_per_axis)
}

impl UniformGrid {
    pub fn new(points: &PointSet, cells_per_axis: usize) -> Result<Self> {
        let dim = points.dim();
        if cells_per_axis == 0 {
            return param("cells per axis must be at least 1");
        }
        let total = (cells_per_axis as u128).pow(dim as u32);
        if total > MAX_CELLS as u128 {
            return param(format!(
                "grid of {cells_per_axis}^{dim} cells exceeds the {MAX_CELLS} cell limit"
            ));
        }
        let total = total as usize;
        let mut grid = UniformGrid {
            cells_per_axis,
            dim,
            starts: vec![0; total + 1],
            items: vec![0; points.len()],
        };
        let ids: Vec<usize> = points.iter().map(|p| grid.linear_of_point(p)).collect();
        for &c in &ids {
            grid.starts[c + 1] += 1;
        }
        for c in 0..total {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in ids.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Ok(grid)
    }

    /// Grid side chosen for `n` points: `ceil(n^(1/d))`.
    pub fn side_for(n: usize, d: usize) -> usize {
        let mut s = (n as f64).powf(1.0 / d as f64).ceil().max(1.0) as usize;
        // fix float error at perfect powers
        while s > 1 && (s as u128 - 1).pow(d as u32) >= n as u128 {
            s -= 1;
        }
        while (s as u128).pow(d as u32) < n as u128 {
            s += 1;
        }
        s
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point_count(&self) -> usize {
        self.items.len()
    }

    pub fn cell_count(&self) -> usize {
        self.starts.len() - 1
    }

    #[inline]
    pub(crate) fn linear_of_point(&self, p: &[f64]) -> usize {
        let n = self.cells_per_axis;
        let mut idx = 0;
        for &x in p.iter().rev() {
            idx = idx * n + axis_cell(x, n);
        }
        idx
    }

    #[inline]
    pub(crate) fn linear(&self, cell: &[usize]) -> usize {
        cell.iter()
            .rev()
            .fold(0, |acc, &c| acc * self.cells_per_axis + c)
    }

    #[inline]
    pub(crate) fn decode(&self, mut idx: usize, out: &mut [usize]) {
        for o in out.iter_mut().take(self.dim) {
            *o = idx % self.cells_per_axis;
            idx /= self.cells_per_axis;
        }
    }

    /// Point indices stored in the cell with the given id.
    pub fn bucket(&self, cell: &[usize]) -> &[u32] {
        self.bucket_linear(self.linear(cell))
    }

    #[inline]
    pub(crate) fn bucket_linear(&self, idx: usize) -> &[u32] {
        &self.items[self.starts[idx] as usize..self.starts[idx + 1] as usize]
    }

    /// Non-empty buckets as `(linear id, indices)`.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, &[u32])> + '_ {
        (0..self.cell_count())
            .map(move |c| (c, self.bucket_linear(c)))
            .filter(|(_, b)| !b.is_empty())
    }

    pub fn max_bucket(&self) -> usize {
        self.starts.windows(2).map(|w| (w[1] - w[0]) as usize).max().unwrap_or(0)
    }

    /// Breadth-first flood over the cells for which `meets(lo, hi)` holds, seeded
    /// with the linear cell ids in `starts`. `lo`/`hi` are the closed box corners
    /// of a cell. For a convex region this visits exactly the cells whose closed
    /// box touches it, provided some start touches it.
    pub(crate) fn flood(
        &self,
        starts: &[usize],
        mut meets: impl FnMut(&[f64], &[f64]) -> bool,
        mut visit: impl FnMut(usize),
    ) {
        let d = self.dim;
        let n = self.cells_per_axis;
        let w = 1.0 / n as f64;
        let mut lo = [0.0; 8];
        let mut hi = [0.0; 8];
        let mut cell = [0usize; 8];
        let box_of = |idx: usize, lo: &mut [f64; 8], hi: &mut [f64; 8], cell: &mut [usize; 8]| {
            self.decode(idx, cell);
            for k in 0..d {
                lo[k] = cell[k] as f64 * w;
                hi[k] = (cell[k] + 1) as f64 * w;
            }
        };
        let mut seen = FxHashSet::default();
        let mut queue = VecDeque::new();
        for &s in starts {
            if seen.contains(&s) {
                continue;
            }
            box_of(s, &mut lo, &mut hi, &mut cell);
            if meets(&lo[..d], &hi[..d]) {
                seen.insert(s);
                queue.push_back(s);
            }
        }
        let mut stride = [1usize; 8];
        for k in 1..d {
            stride[k] = stride[k - 1] * n;
        }
        while let Some(c) = queue.pop_front() {
            visit(c);
            self.decode(c, &mut cell);
            let here = cell;
            for k in 0..d {
                for up in [false, true] {
                    let nb = if up {
                        if here[k] + 1 >= n {
                            continue;
                        }
                        c + stride[k]
                    } else {
                        if here[k] == 0 {
                            continue;
                        }
                        c - stride[k]
                    };
                    if seen.contains(&nb) {
                        continue;
                    }
                    box_of(nb, &mut lo, &mut hi, &mut cell);
                    if meets(&lo[..d], &hi[..d]) {
                        seen.insert(nb);
                        queue.push_back(nb);
                    }
                }
            }
        }
    }

    /// Linear ids of the cell holding `p` (clamped into the cube) and its
    /// neighbors across faces, edges and corners.
    pub(crate) fn block_around(&self, p: &[f64]) -> Vec<usize> {
        let c = self.clamped_cell(p);
        let n = self.cells_per_axis as isize;
        let mut out = Vec::new();
        let total = 3usize.pow(self.dim as u32);
        'outer: for code in 0..total {
            let mut m = code;
            let mut cell = vec![0usize; self.dim];
            for k in 0..self.dim {
                let off = (m % 3) as isize - 1;
                m /= 3;
                let x = c[k] as isize + off;
                if x < 0 || x >= n {
                    continue 'outer;
                }
                cell[k] = x as usize;
            }
            out.push(self.linear(&cell));
        }
        out
    }

    /// Cell closest to an arbitrary location (coordinates clamped into the cube).
    pub(crate) fn clamped_cell(&self, p: &[f64]) -> Vec<usize> {
        let n = self.cells_per_axis;
        p.iter().map(|&x| clamped_axis_cell(x, n)).collect()
    }

    /// Calls `f` for every point `q` with `dist(center, q) <= radius`.
    pub(crate) fn for_each_in_ball(
        &self,
        points: &PointSet,
        center: &[f64],
        radius: f64,
        mut f: impl FnMut(u32, f64),
    ) {
        let d = self.dim;
        let n = self.cells_per_axis;
        let w = 1.0 / n as f64;
        let reach = radius * (1.0 + 1e-9) + 1e-12;
        let r2 = reach * reach;
        let mut lo = [0usize; 8];
        let mut hi = [0usize; 8];
        for k in 0..d {
            lo[k] = clamped_axis_cell(center[k] - reach, n);
            hi[k] = clamped_axis_cell(center[k] + reach, n);
        }
        let mut stride = [1usize; 8];
        for k in 1..d {
            stride[k] = stride[k - 1] * n;
        }
        // odometer over the cell box, axis 0 fastest
        let mut cell = lo;
        let (mut blo, mut bhi) = ([0.0; 8], [0.0; 8]);
        loop {
            for k in 0..d {
                blo[k] = cell[k] as f64 * w;
                bhi[k] = (cell[k] + 1) as f64 * w;
            }
            if box_dist2(center, &blo[..d], &bhi[..d]) <= r2 {
                let idx: usize = (0..d).map(|k| cell[k] * stride[k]).sum();
                for &i in self.bucket_linear(idx) {
                    let dq = dist(center, points.point(i as usize));
                    if dq <= radius {
                        f(i, dq);
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                if cell[k] < hi[k] {
                    cell[k] += 1;
                    break;
                }
                cell[k] = lo[k];
                k += 1;
            }
        }
    }

    /// Indices of all points within closed distance `radius` of `center`, sorted.
    pub fn ball_scan(&self, points: &PointSet, center: &[f64], radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        if radius < 0.0 {
            return out;
        }
        self.for_each_in_ball(points, center, radius, |i, _| out.push(i));
        out.sort_unstable();
        out
    }
}

#[inline]
pub(crate) fn box_dist2(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..lo.len() {
        let t = if p[k] < lo[k] {
            lo[k] - p[k]
        } else if p[k] > hi[k] {
            p[k] - hi[k]
        } else {
            0.0
        };
        s += t * t;
    }
    s
}

/// Per-row cumulative point counts of a planar grid. Row `i` holds the cells
/// `(i, 0..N)`, i.e. a fixed first coordinate.
#[derive(Clone, Debug)]
pub struct RowPrefixSums {
    side: usize,
    prefix: Vec<u32>,
}

impl RowPrefixSums {
    pub fn new(grid: &UniformGrid) -> Result<Self> {
        if grid.dim() != 2 {
            return param("row prefix sums need a planar grid");
        }
        let n = grid.cells_per_axis();
        let mut prefix = vec![0u32; n * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                let c = grid.bucket(&[i, j]).len() as u32;
                prefix[i * (n + 1) + j + 1] = prefix[i * (n + 1) + j] + c;
            }
        }
        Ok(Self { side: n, prefix })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Points in cells `(row, j0..=j1)`, in constant time.
    pub fn row_range_count(&self, row: usize, j0: usize, j1: usize) -> Result<usize> {
        if row >= self.side || j0 > j1 || j1 >= self.side {
            return param(format!(
                "row range ({row}, {j0}..={j1}) outside a {} grid",
                self.side
            ));
        }
        Ok(self.count_unchecked(row, j0, j1))
    }

    #[inline]
    pub(crate) fn count_unchecked(&self, row: usize, j0: usize, j1: usize) -> usize {
        let base = row * (self.side + 1);
        (self.prefix[base + j1 + 1] - self.prefix[base + j0]) as usize
    }
}

pub fn row_range_count(ps: &RowPrefixSums, row: usize, j0: usize, j1: usize) -> Result<usize> {
    ps.row_range_count(row, j0, j1)
}
