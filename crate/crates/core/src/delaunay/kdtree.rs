//! Static k-d tree answering closed axis-parallel box reporting queries.

use crate::points::PointSet;

const LEAF: usize = 8;

#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    /// Point indices, permuted so every node owns a contiguous range.
    items: Vec<u32>,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    start: u32,
    end: u32,
    /// Children, or `u32::MAX` for a leaf.
    left: u32,
    right: u32,
    axis: u8,
    split: f64,
}

impl KdTree {
    pub fn new(points: &PointSet, indices: &[u32]) -> Self {
        let dim = points.dim();
        let mut items = indices.to_vec();
        items.sort_unstable();
        let mut tree = KdTree {
            dim,
            coords: Vec::new(),
            items,
            nodes: Vec::new(),
        };
        if !tree.items.is_empty() {
            let n = tree.items.len();
            tree.build(points, 0, n, 0);
        }
        tree.coords = tree
            .items
            .iter()
            .flat_map(|&i| points.point(i as usize).iter().copied())
            .collect();
        tree
    }

    fn build(&mut self, points: &PointSet, start: usize, end: usize, depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            start: start as u32,
            end: end as u32,
            left: u32::MAX,
            right: u32::MAX,
            axis: 0,
            split: 0.0,
        });
        if end - start <= LEAF {
            return id;
        }
        let axis = depth % self.dim;
        let mid = (start + end) / 2;
        self.items[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.point(a as usize)[axis]
                .total_cmp(&points.point(b as usize)[axis])
                .then(a.cmp(&b))
        });
        let split = points.point(self.items[mid] as usize)[axis];
        let l = self.build(points, start, mid, depth + 1);
        let r = self.build(points, mid, end, depth + 1);
        let node = &mut self.nodes[id as usize];
        node.left = l;
        node.right = r;
        node.axis = axis as u8;
        node.split = split;
        id
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends to `out` every stored index whose point lies in `[lo, hi]`.
    pub fn query(&self, lo: &[f64], hi: &[f64], out: &mut Vec<u32>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = self.nodes[id as usize];
            if node.left == u32::MAX {
                for k in node.start as usize..node.end as usize {
                    let p = &self.coords[k * self.dim..(k + 1) * self.dim];
                    if (0..self.dim).all(|t| p[t] >= lo[t] && p[t] <= hi[t]) {
                        out.push(self.items[k]);
                    }
                }
                continue;
            }
            let a = node.axis as usize;
            // left holds coordinates <= split, right holds coordinates >= split
            if lo[a] <= node.split {
                stack.push(node.left);
            }
            if hi[a] >= node.split {
                stack.push(node.right);
            }
        }
    }
}
