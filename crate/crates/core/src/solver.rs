//! Dijkstra's algorithm on grid graphs and geodesic path assembly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::{segments_intersect, Point2, Segment};
use crate::graph::{Adjacency, GridGraph};

#[derive(Clone, Copy, Debug)]
struct Entry {
    dist: f64,
    id: u32,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed so that BinaryHeap pops the smallest (dist, id)
    fn cmp(&self, o: &Self) -> Ordering {
        o.dist.total_cmp(&self.dist).then_with(|| o.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Distances and predecessors from one source.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPathTree {
    pub source: usize,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPathTree {
    pub fn distance(&self, v: usize) -> f64 {
        self.dist[v]
    }

    /// Vertex ids from the source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut ids = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            ids.push(p);
            cur = p;
        }
        ids.reverse();
        debug_assert_eq!(ids[0], self.source);
        Some(ids)
    }
}

fn run<F: Fn(usize, usize) -> bool>(
    adj: &Adjacency,
    source: usize,
    target: Option<usize>,
    allow: F,
) -> Result<ShortestPathTree> {
    let n = adj.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if source >= n || target.is_some_and(|t| t >= n) {
        return Err(Error::param(
            "source",
            format!("vertex id out of range for {n} vertices"),
        ));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        id: source as u32,
    });
    while let Some(Entry { dist: du, id }) = heap.pop() {
        let u = id as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        if Some(u) == target {
            break;
        }
        for (v, w) in adj.neighbors(u) {
            if !(w >= 0.0) {
                return Err(Error::NegativeWeight { u, v, weight: w });
            }
            if !allow(u, v) {
                continue;
            }
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(u);
                heap.push(Entry { dist: nd, id: v as u32 });
            }
        }
    }
    Ok(ShortestPathTree { source, dist, pred })
}

/// Single-source shortest paths to every vertex.
pub fn dijkstra(adj: &Adjacency, source: usize) -> Result<ShortestPathTree> {
    run(adj, source, None, |_, _| true)
}

/// Like [`dijkstra`] but stops once `target` is settled. Only the entries on
/// settled vertices are final.
pub fn dijkstra_to(adj: &Adjacency, source: usize, target: usize) -> Result<ShortestPathTree> {
    run(adj, source, Some(target), |_, _| true)
}

/// [`dijkstra_to`] restricted to the edges `(u, v)` for which `allow(u, v)` holds.
pub fn dijkstra_filtered<F: Fn(usize, usize) -> bool>(
    adj: &Adjacency,
    source: usize,
    target: usize,
    allow: F,
) -> Result<ShortestPathTree> {
    run(adj, source, Some(target), allow)
}

/// Id of the vertex nearest to `p`; ties go to the smallest id.
pub fn snap_to_vertex(g: &GridGraph, p: Point2) -> Result<usize> {
    nearest(g.vertices(), p).ok_or(Error::EmptyGraph)
}

pub(crate) fn nearest(vertices: &[Point2], p: Point2) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in vertices.iter().enumerate() {
        let d = v.dist(p);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|b| b.1)
}

/// An approximate geodesic: a vertex path of a grid graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub vertex_ids: Vec<usize>,
    pub points: Vec<Point2>,
    pub edge_weights: Vec<f64>,
    pub total_length: f64,
    /// Direction angle of each step, in `[-π, π]`.
    pub edge_arguments: Vec<f64>,
}

impl GeodesicPath {
    /// Assembles a path from consecutive vertex ids of `g`.
    pub fn from_ids(g: &GridGraph, ids: Vec<usize>) -> Result<Self> {
        let points: Vec<Point2> = ids.iter().map(|&i| g.vertex(i)).collect();
        let mut edge_weights = Vec::with_capacity(ids.len().saturating_sub(1));
        for w in ids.windows(2) {
            let wt = g
                .adjacency()
                .weight(w[0], w[1])
                .ok_or_else(|| Error::param("path", format!("vertices {} and {} are not adjacent", w[0], w[1])))?;
            edge_weights.push(wt);
        }
        let total_length = edge_weights.iter().fold(0.0, |acc, w| acc + w);
        let edge_arguments = points.windows(2).map(|w| (w[1] - w[0]).arg()).collect();
        Ok(GeodesicPath {
            vertex_ids: ids,
            points,
            edge_weights,
            total_length,
            edge_arguments,
        })
    }

    /// Path to `target` in a tree computed on `g`.
    pub fn from_tree(g: &GridGraph, tree: &ShortestPathTree, target: usize) -> Result<Self> {
        let ids = tree.path_to(target).ok_or(Error::NoPath {
            from: tree.source,
            to: target,
        })?;
        Self::from_ids(g, ids)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        *self.points.last().expect("nonempty path")
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> GeodesicPath {
        let mut ids = self.vertex_ids.clone();
        ids.reverse();
        let mut points = self.points.clone();
        points.reverse();
        let mut edge_weights = self.edge_weights.clone();
        edge_weights.reverse();
        let total_length = edge_weights.iter().fold(0.0, |acc, w| acc + w);
        let edge_arguments = points.windows(2).map(|w| (w[1] - w[0]).arg()).collect();
        GeodesicPath {
            vertex_ids: ids,
            points,
            edge_weights,
            total_length,
            edge_arguments,
        }
    }

    /// Writes `index,x,y,cumulative_length` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,x,y,cumulative_length")?;
        let mut cum = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                cum += self.edge_weights[i - 1];
            }
            writeln!(w, "{i},{},{},{}", g17(p.x), g17(p.y), g17(cum))?;
        }
        Ok(())
    }
}

/// Snaps both points and returns the shortest vertex path between them.
pub fn shortest_path(g: &GridGraph, p1: Point2, p2: Point2) -> Result<GeodesicPath> {
    let s = snap_to_vertex(g, p1)?;
    let t = snap_to_vertex(g, p2)?;
    let tree = dijkstra_to(g.adjacency(), s, t)?;
    GeodesicPath::from_tree(g, &tree, t)
}

/// Shortest path that crosses none of the `barriers`.
///
/// Barriers constrain the homotopy class of the route without changing the
/// metric: an edge is unusable when its segment meets a barrier segment.
pub fn shortest_path_avoiding(g: &GridGraph, p1: Point2, p2: Point2, barriers: &[Segment]) -> Result<GeodesicPath> {
    if barriers.is_empty() {
        return shortest_path(g, p1, p2);
    }
    let s = snap_to_vertex(g, p1)?;
    let t = snap_to_vertex(g, p2)?;
    let verts = g.vertices();
    let tree = dijkstra_filtered(g.adjacency(), s, t, |u, v| {
        !barriers
            .iter()
            .any(|b| segments_intersect(verts[u], verts[v], b.a, b.b))
    })?;
    GeodesicPath::from_tree(g, &tree, t)
}
