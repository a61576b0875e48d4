//! Euclidean minimum spanning trees.
//!
//! Three routes to the same tree: Kruskal on an explicit edge list, Borůvka on
//! the truncated Yao graph, and a bottom-up quadtree recursion that runs
//! Borůvka with portals in every cell. Edges are always compared by
//! `(weight, min endpoint, max endpoint)`, so the cheapest edge of any cut is unique.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cones::{default_cones, yao_graph_truncated, yao_graph_with, YaoGraph};
use crate::delaunay::dt_build;
use crate::error::{param, Error, Result};
use crate::points::{dist, sample_points, Params, PointSet};
use crate::quadtree::{default_height, segment_level, CellRun, Quadtree, MAX_KEY_BITS};

/// Cells with at most this many points are solved directly.
pub const BASE_CASE: usize = 64;

const NONE: u32 = u32::MAX;

/// Undirected weighted edge with `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: f64,
}

impl Edge {
    pub fn new(a: u32, b: u32, w: f64) -> Self {
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        Edge { i, j, w }
    }

    /// Total order `(w, i, j)`.
    pub fn order(&self, o: &Edge) -> Ordering {
        self.w
            .total_cmp(&o.w)
            .then(self.i.cmp(&o.i))
            .then(self.j.cmp(&o.j))
    }
}

/// A spanning tree (or forest) with edges sorted by `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    pub edges: Vec<Edge>,
    pub total_weight: f64,
}

impl SpanningTree {
    fn from_edges(mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable_by_key(|e| (e.i, e.j));
        let total_weight = edges.iter().map(|e| e.w).sum();
        SpanningTree {
            edges,
            total_weight,
        }
    }

    pub fn longest_edge(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MstStats {
    pub total_weight: f64,
    /// Borůvka rounds; summed over all cells for the quadtree route.
    pub rounds: usize,
    /// Largest portal count of any cell, per quadtree level (empty for the flat routes).
    pub portals_per_level: Vec<usize>,
    pub fallback_events: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MstRun {
    pub tree: SpanningTree,
    pub stats: MstStats,
}

#[derive(Clone, Debug)]
struct Dsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns `(new root, absorbed root)`.
    fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.rank[ra as usize] < self.rank[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
        Some((ra, rb))
    }
}

/// Union-find over points where a component is frozen once it holds a portal.
///
/// Portal status is encoded by `stop[v]`, the shallowest level at which `v` has
/// an incident candidate edge; `v` is a portal of its level-`l` cell exactly when
/// `stop[v] < l`. Each root keeps the minimum over its members, so with the level
/// fixed a component can only go from active to frozen.
#[derive(Clone, Debug)]
pub struct PortalForest {
    dsu: Dsu,
    stop: Vec<u32>,
    level: u32,
    chosen: Vec<Edge>,
}

impl PortalForest {
    pub fn new(stop: Vec<u32>) -> Self {
        PortalForest {
            dsu: Dsu::new(stop.len()),
            stop,
            level: 0,
            chosen: Vec::new(),
        }
    }

    pub fn set_level(&mut self, level: usize) {
        self.level = level as u32;
    }

    pub fn find(&mut self, x: u32) -> u32 {
        self.dsu.find(x)
    }

    pub fn is_frozen(&mut self, x: u32) -> bool {
        let r = self.dsu.find(x);
        self.stop[r as usize] < self.level
    }

    /// Accepts `e` unless it closes a cycle.
    pub fn accept(&mut self, e: Edge) -> bool {
        match self.dsu.union(e.i, e.j) {
            Some((r, gone)) => {
                self.stop[r as usize] = self.stop[r as usize].min(self.stop[gone as usize]);
                self.chosen.push(e);
                true
            }
            None => false,
        }
    }

    pub fn chosen(&self) -> &[Edge] {
        &self.chosen
    }
}

/// Edge of a collapsed graph: current component ids plus the original edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgEdge {
    pub a: u32,
    pub b: u32,
    pub edge: Edge,
}

/// Components left after restricted Borůvka, joined by their cheapest connecting edges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollapsedGraph {
    pub vertices: Vec<u32>,
    /// Aligned with `vertices`.
    pub portal: Vec<bool>,
    pub edges: Vec<CgEdge>,
}

/// Outcome of one restricted Borůvka call.
#[derive(Clone, Debug, PartialEq)]
pub struct PortalRun {
    /// Edges accepted in each round.
    pub rounds: Vec<Vec<Edge>>,
    pub graph: CollapsedGraph,
}

impl PortalRun {
    pub fn accepted(&self) -> Vec<Edge> {
        self.rounds.iter().flatten().copied().collect()
    }
}

/// Kruskal with `(w, i, j)` tie-breaking; a spanning forest if the graph is disconnected.
pub fn kruskal_oracle(n: usize, edges: &[Edge]) -> SpanningTree {
    let mut order: Vec<Edge> = edges.iter().map(|e| Edge::new(e.i, e.j, e.w)).collect();
    order.sort_unstable_by(Edge::order);
    let mut dsu = Dsu::new(n);
    let tree = order
        .into_iter()
        .filter(|e| dsu.union(e.i, e.j).is_some())
        .collect();
    SpanningTree::from_edges(tree)
}

/// Every pair of points with its Euclidean length.
pub fn complete_graph(points: &PointSet) -> Vec<Edge> {
    let n = points.len() as u32;
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..n {
        let p = points.point(i as usize);
        for j in i + 1..n {
            out.push(Edge::new(i, j, dist(p, points.point(j as usize))));
        }
    }
    out
}

/// Borůvka over endpoint pairs `ends`, with `cheaper(x, y)` a strict total order on
/// edge indices. Returns the chosen edge indices and the number of rounds.
/// `observe(round, dsu, live)` runs before every round.
fn boruvka_by(
    n: usize,
    ends: &[(u32, u32)],
    cheaper: impl Fn(usize, usize) -> bool,
    mut observe: impl FnMut(usize, &mut Dsu, &[usize]),
) -> (Vec<usize>, usize) {
    let mut dsu = Dsu::new(n);
    let mut live: Vec<usize> = (0..ends.len()).filter(|&k| ends[k].0 != ends[k].1).collect();
    let mut best = vec![NONE; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut picked: Vec<usize> = Vec::new();
    let mut tree = Vec::new();
    let mut rounds = 0;
    loop {
        live.retain(|&k| dsu.find(ends[k].0) != dsu.find(ends[k].1));
        observe(rounds, &mut dsu, &live);
        if live.is_empty() {
            break;
        }
        for &k in &live {
            for r in [dsu.find(ends[k].0), dsu.find(ends[k].1)] {
                let b = &mut best[r as usize];
                if *b == NONE {
                    touched.push(r);
                    *b = k as u32;
                } else if cheaper(k, *b as usize) {
                    *b = k as u32;
                }
            }
        }
        picked.extend(touched.drain(..).map(|r| {
            let k = best[r as usize] as usize;
            best[r as usize] = NONE;
            k
        }));
        picked.sort_unstable();
        picked.dedup();
        for k in picked.drain(..) {
            if dsu.union(ends[k].0, ends[k].1).is_some() {
                tree.push(k);
            }
        }
        rounds += 1;
    }
    (tree, rounds)
}

/// Plain Borůvka; returns the tree and the number of rounds.
pub fn boruvka(n: usize, edges: &[Edge]) -> (SpanningTree, usize) {
    let edges: Vec<Edge> = edges.iter().map(|e| Edge::new(e.i, e.j, e.w)).collect();
    let ends: Vec<(u32, u32)> = edges.iter().map(|e| (e.i, e.j)).collect();
    let (tree, rounds) = boruvka_by(
        n,
        &ends,
        |x, y| edges[x].order(&edges[y]) == Ordering::Less,
        |_, _, _| {},
    );
    (
        SpanningTree::from_edges(tree.into_iter().map(|k| edges[k]).collect()),
        rounds,
    )
}

/// One row of the component-degree experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub trial: usize,
    pub round: usize,
    pub components: usize,
    pub mean_degree: f64,
}

/// Components and mean component degree (distinct neighbouring components)
/// at the start of every Borůvka round, plus a final row once no edge is left.
pub fn boruvka_degree_trace(n: usize, edges: &[Edge]) -> Vec<DegreeRow> {
    let ends: Vec<(u32, u32)> = edges.iter().map(|e| (e.i.min(e.j), e.i.max(e.j))).collect();
    let mut rows = Vec::new();
    let mut components = n;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    boruvka_by(
        n,
        &ends,
        |x, y| Edge::new(ends[x].0, ends[x].1, edges[x].w).order(&Edge::new(ends[y].0, ends[y].1, edges[y].w)) == Ordering::Less,
        |round, dsu, live| {
            if round > 0 {
                let roots: rustc_hash::FxHashSet<u32> = (0..n as u32).map(|v| dsu.find(v)).collect();
                components = roots.len();
            }
            pairs.clear();
            pairs.extend(live.iter().map(|&k| {
                let (a, b) = (dsu.find(ends[k].0), dsu.find(ends[k].1));
                (a.min(b), a.max(b))
            }));
            pairs.sort_unstable();
            pairs.dedup();
            rows.push(DegreeRow {
                trial: 0,
                round,
                components,
                mean_degree: 2.0 * pairs.len() as f64 / components.max(1) as f64,
            });
        },
    );
    rows
}

/// Graph fed to [`boruvka_degree_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeInput {
    /// Delaunay edges; `d <= 3` only.
    Delaunay,
    /// Yao graph truncated at `delta`.
    Yao,
}

/// Runs [`boruvka_degree_trace`] on `trials` samples (seeds `seed..seed + trials`).
pub fn boruvka_degree_experiment(
    n: usize,
    d: usize,
    trials: usize,
    seed: u64,
    input: DegreeInput,
) -> Result<Vec<DegreeRow>> {
    if !(2..=5).contains(&d) {
        return param(format!("degree experiment supports d in 2..=5, got {d}"));
    }
    if input == DegreeInput::Delaunay && d > 3 {
        return param("Delaunay input needs d <= 3");
    }
    let mut out = Vec::new();
    for t in 0..trials {
        let points = sample_points(n, d, seed + t as u64)?;
        let params = Params::with_default_c(n, d)?;
        let edges: Vec<Edge> = match input {
            DegreeInput::Delaunay => dt_build(&points, &params)?
                .complex
                .edges()
                .into_iter()
                .map(|(a, b)| Edge::new(a, b, dist(points.point(a as usize), points.point(b as usize))))
                .collect(),
            DegreeInput::Yao => yao_graph_truncated(&points, &params)?
                .edges
                .iter()
                .map(|&(a, b, w)| Edge::new(a, b, w))
                .collect(),
        };
        out.extend(
            boruvka_degree_trace(n, &edges)
                .into_iter()
                .map(|r| DegreeRow { trial: t, ..r }),
        );
    }
    Ok(out)
}

fn check_params(points: &PointSet, params: &Params) -> Result<()> {
    if params.d != points.dim() {
        return param(format!(
            "params are for d={}, points have d={}",
            params.d,
            points.dim()
        ));
    }
    if !(params.delta > 0.0) {
        return param("delta must be positive");
    }
    Ok(())
}

/// Runs `solve` on the Yao graph truncated at `delta`, doubling the cutoff while
/// the result is not spanning.
fn with_fallback(
    points: &PointSet,
    params: &Params,
    mut solve: impl FnMut(&YaoGraph) -> Result<(Vec<Edge>, MstStats)>,
) -> Result<MstRun> {
    check_params(points, params)?;
    let n = points.len();
    let cones = default_cones(points.dim())?;
    let diameter = (points.dim() as f64).sqrt();
    let mut cutoff = params.delta;
    let mut fallback_events = 0;
    loop {
        let yao = yao_graph_with(points, cones, cutoff)?;
        let (edges, stats) = solve(&yao)?;
        if edges.len() + 1 >= n {
            let tree = SpanningTree::from_edges(edges);
            let stats = MstStats {
                total_weight: tree.total_weight,
                fallback_events,
                ..stats
            };
            return Ok(MstRun { tree, stats });
        }
        if cutoff > diameter {
            return Err(Error::Construction(format!(
                "Yao graph with cutoff {cutoff} spans only {} edges of {n} points",
                edges.len()
            )));
        }
        fallback_events += 1;
        log::warn!(
            "truncated Yao graph disconnected at cutoff {cutoff}; retrying at {}",
            2.0 * cutoff
        );
        cutoff *= 2.0;
    }
}

/// Borůvka on the Yao graph truncated at `delta`.
pub fn mst_nlogn(points: &PointSet, params: &Params) -> Result<MstRun> {
    with_fallback(points, params, |yao| {
        let edges: Vec<Edge> = yao.edges.iter().map(|&(a, b, w)| Edge::new(a, b, w)).collect();
        let (tree, rounds) = boruvka(yao.n, &edges);
        Ok((
            tree.edges,
            MstStats {
                rounds,
                ..MstStats::default()
            },
        ))
    })
}

fn in_box(p: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    p.iter()
        .zip(lo.iter().zip(hi))
        .all(|(&x, (&l, &h))| x >= l && (x < h || (h >= 1.0 && x <= h)))
}

/// Points of `subset` with a Yao edge to a point outside the half-open box `[lo, hi)`.
pub fn portals_of(lo: &[f64], hi: &[f64], points: &PointSet, yao: &YaoGraph, subset: &[u32]) -> Vec<u32> {
    let mut mark = vec![false; points.len()];
    for &v in subset {
        mark[v as usize] = true;
    }
    let mut out: Vec<u32> = Vec::new();
    for &(a, b, _) in &yao.edges {
        for (u, v) in [(a, b), (b, a)] {
            if mark[u as usize] && !in_box(points.point(v as usize), lo, hi) {
                out.push(u);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Restricted Borůvka on `forest` at its current level.
fn restricted(forest: &mut PortalForest, vertices: &[u32], edges: Vec<Edge>) -> PortalRun {
    let mut live = edges;
    let mut best: FxHashMap<u32, usize> = FxHashMap::default();
    let mut rounds = Vec::new();
    loop {
        live.retain(|e| forest.find(e.i) != forest.find(e.j));
        best.clear();
        for (k, e) in live.iter().enumerate() {
            for v in [e.i, e.j] {
                if forest.is_frozen(v) {
                    continue;
                }
                let r = forest.find(v);
                best.entry(r)
                    .and_modify(|b| {
                        if e.order(&live[*b]) == Ordering::Less {
                            *b = k;
                        }
                    })
                    .or_insert(k);
            }
        }
        if best.is_empty() {
            break;
        }
        let mut picked: Vec<usize> = best.values().copied().collect();
        picked.sort_unstable();
        picked.dedup();
        let mut round: Vec<Edge> = picked
            .into_iter()
            .filter_map(|k| forest.accept(live[k]).then_some(live[k]))
            .collect();
        round.sort_unstable_by(Edge::order);
        rounds.push(round);
    }
    let mut roots: Vec<u32> = vertices.iter().map(|&v| forest.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    let portal = roots.iter().map(|&r| forest.is_frozen(r)).collect();
    let mut cheapest: FxHashMap<(u32, u32), Edge> = FxHashMap::default();
    for e in live {
        let (a, b) = (forest.find(e.i), forest.find(e.j));
        cheapest
            .entry((a.min(b), a.max(b)))
            .and_modify(|c| {
                if e.order(c) == Ordering::Less {
                    *c = e;
                }
            })
            .or_insert(e);
    }
    let mut cg_edges: Vec<CgEdge> = cheapest
        .into_iter()
        .map(|((a, b), edge)| CgEdge { a, b, edge })
        .collect();
    cg_edges.sort_unstable_by(|x, y| x.edge.order(&y.edge));
    PortalRun {
        rounds,
        graph: CollapsedGraph {
            vertices: roots,
            portal,
            edges: cg_edges,
        },
    }
}

/// Borůvka restricted to components without a portal, run until every
/// component is frozen or has no edge left. Vertex ids must be below the
/// largest id mentioned plus one; they also serve as initial component ids.
pub fn boruvka_with_portals(vertices: &[u32], edges: &[Edge], portals: &[u32]) -> PortalRun {
    let n = vertices
        .iter()
        .chain(portals)
        .copied()
        .chain(edges.iter().flat_map(|e| [e.i, e.j]))
        .max()
        .map_or(0, |m| m as usize + 1);
    let mut stop = vec![1u32; n];
    for &p in portals {
        stop[p as usize] = 0;
    }
    let mut forest = PortalForest::new(stop);
    forest.set_level(1);
    let edges = edges.iter().map(|e| Edge::new(e.i, e.j, e.w)).collect();
    restricted(&mut forest, vertices, edges)
}

/// Keeps only the edges of the minimum spanning forest of `cg`.
pub fn prune(cg: &CollapsedGraph) -> CollapsedGraph {
    let index: FxHashMap<u32, u32> = cg
        .vertices
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u32))
        .collect();
    let ends: Vec<(u32, u32)> = cg.edges.iter().map(|e| (index[&e.a], index[&e.b])).collect();
    let (keep, _) = boruvka_by(
        cg.vertices.len(),
        &ends,
        |x, y| cg.edges[x].edge.order(&cg.edges[y].edge) == Ordering::Less,
        |_, _, _| {},
    );
    let mut edges: Vec<CgEdge> = keep.into_iter().map(|k| cg.edges[k]).collect();
    edges.sort_unstable_by(|x, y| x.edge.order(&y.edge));
    CollapsedGraph {
        vertices: cg.vertices.clone(),
        portal: cg.portal.clone(),
        edges,
    }
}

struct Recursion<'a> {
    qt: &'a Quadtree,
    height: usize,
    yao: &'a YaoGraph,
    level_of: Vec<u32>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    cut: FxHashMap<(u32, u64), Vec<Edge>>,
    forest: PortalForest,
    portals_per_level: Vec<usize>,
    rounds: usize,
}

impl Recursion<'_> {
    fn solve(&mut self, level: usize, run: CellRun) -> CollapsedGraph {
        let items = self.qt.run_items(&run);
        let portals = items
            .iter()
            .filter(|&&v| (self.forest.stop[v as usize] as usize) < level)
            .count();
        self.portals_per_level[level] = self.portals_per_level[level].max(portals);
        let mut vertices: Vec<u32> = Vec::new();
        let mut edges: Vec<Edge> = Vec::new();
        if level == self.height || items.len() <= BASE_CASE {
            vertices.extend_from_slice(items);
            for &v in items {
                let (s, t) = (self.adj_start[v as usize], self.adj_start[v as usize + 1]);
                for &k in &self.adj[s as usize..t as usize] {
                    let (a, b, w) = self.yao.edges[k as usize];
                    if a == v && self.level_of[k as usize] as usize >= level {
                        edges.push(Edge::new(a, b, w));
                    }
                }
            }
        } else {
            for child in self.qt.children(level, &run) {
                let g = self.solve(level + 1, child);
                vertices.extend(g.vertices);
                edges.extend(g.edges.iter().map(|e| e.edge));
            }
            if let Some(cut) = self.cut.get(&(level as u32, run.key)) {
                edges.extend_from_slice(cut);
            }
        }
        self.forest.set_level(level);
        let out = restricted(&mut self.forest, &vertices, edges);
        self.rounds += out.rounds.len();
        prune(&out.graph)
    }
}

fn divide_conquer_on(points: &PointSet, yao: &YaoGraph) -> Result<(Vec<Edge>, MstStats)> {
    let (n, d) = (points.len(), points.dim());
    let height = default_height(n, d).min(MAX_KEY_BITS / d);
    let qt = Quadtree::new(points, height)?;
    let m = yao.edges.len();
    let mut stop = vec![height as u32; n];
    let mut level_of = Vec::with_capacity(m);
    let mut cut: FxHashMap<(u32, u64), Vec<Edge>> = FxHashMap::default();
    let mut degree = vec![0u32; n + 1];
    for &(a, b, w) in &yao.edges {
        let (pa, pb) = (points.point(a as usize), points.point(b as usize));
        let l = segment_level(pa, pb, height) as u32;
        level_of.push(l);
        stop[a as usize] = stop[a as usize].min(l);
        stop[b as usize] = stop[b as usize].min(l);
        cut.entry((l, qt.cell_key(pa, l as usize)))
            .or_default()
            .push(Edge::new(a, b, w));
        degree[a as usize + 1] += 1;
        degree[b as usize + 1] += 1;
    }
    for v in 0..n {
        degree[v + 1] += degree[v];
    }
    let adj_start = degree.clone();
    let mut adj = vec![0u32; 2 * m];
    for (k, &(a, b, _)) in yao.edges.iter().enumerate() {
        for v in [a, b] {
            adj[degree[v as usize] as usize] = k as u32;
            degree[v as usize] += 1;
        }
    }
    let mut rec = Recursion {
        qt: &qt,
        height,
        yao,
        level_of,
        adj_start,
        adj,
        cut,
        forest: PortalForest::new(stop),
        portals_per_level: vec![0; height + 1],
        rounds: 0,
    };
    if let Some(&root) = qt.occupied(0).first() {
        rec.solve(0, root);
    }
    Ok((
        rec.forest.chosen,
        MstStats {
            rounds: rec.rounds,
            portals_per_level: rec.portals_per_level,
            ..MstStats::default()
        },
    ))
}

/// Quadtree divide and conquer over the Yao graph truncated at `delta`.
///
/// Each Yao edge is registered at the deepest cell holding both endpoints. A
/// cell solves its children (or, with at most [`BASE_CASE`] points, its own
/// local edges), adds the edges registered at itself, runs restricted Borůvka
/// with its own portals and hands the pruned collapsed graph upward. The root
/// has no portals. Cells are processed sequentially.
pub fn mst_divide_conquer(points: &PointSet, params: &Params) -> Result<MstRun> {
    with_fallback(points, params, |yao| divide_conquer_on(points, yao))
}
