//! Grid graphs on `hℤ²`-type lattices restricted to a domain.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::{Domain, Point2, Rect};
use crate::metric::{self, MetricSpec};

/// Relative tolerance of the annulus test in [`layer_neighbors`].
pub const ANNULUS_TOL: f64 = 1e-9;
/// Lattice points within `VERTEX_CLEARANCE·h` of the boundary are treated as
/// boundary points: they are mathematically on `∂G` up to rounding.
pub const VERTEX_CLEARANCE: f64 = 1e-9;

/// Slack used when counting lattice steps inside a window.
const FLOOR_SLACK: f64 = 1e-9;

/// Where the lattice is anchored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAnchor {
    /// Points `x_min + j·h`, `y_min + k·h` of the window.
    #[default]
    WindowCorner,
    /// Points of `hℤ²` falling inside the window.
    Origin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub h: f64,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Rect>,
    #[serde(default)]
    pub anchor: GridAnchor,
}

impl GridParams {
    pub fn new(h: f64, m: u32) -> Self {
        GridParams {
            h,
            m,
            window: None,
            anchor: GridAnchor::WindowCorner,
        }
    }

    pub fn with_window(mut self, window: Rect) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_anchor(mut self, anchor: GridAnchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::param("h", format!("must be positive, got {}", self.h)));
        }
        if self.m == 0 {
            return Err(Error::param("m", "must be at least 1"));
        }
        if let Some(w) = &self.window {
            if !w.is_valid() {
                return Err(Error::param("window", format!("invalid rectangle {w:?}")));
            }
        }
        Ok(())
    }

    /// The explicit window, or the domain's bounding box.
    pub fn effective_window(&self, d: &Domain) -> Result<Rect> {
        self.window
            .or_else(|| d.bounding_box())
            .ok_or_else(|| Error::param("window", "an unbounded domain needs an explicit window"))
    }
}

/// Margins, in grid steps, added around the query points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margins {
    pub x_min: u32,
    pub x_max: u32,
    pub y_min: u32,
    pub y_max: u32,
}

impl Margins {
    pub const fn uniform(k: u32) -> Self {
        Margins {
            x_min: k,
            x_max: k,
            y_min: k,
            y_max: k,
        }
    }
}

impl Default for Margins {
    fn default() -> Self {
        Margins::uniform(10)
    }
}

/// Axis-aligned window spanned by `a` and `b`, padded by `margins` grid steps.
pub fn local_window(a: Point2, b: Point2, h: f64, margins: Margins) -> Rect {
    local_window_of(&[a, b], h, margins).expect("two points given")
}

/// Like [`local_window`] for any nonempty point set.
pub fn local_window_of(points: &[Point2], h: f64, margins: Margins) -> Option<Rect> {
    let r = Rect::bounding(points.iter().copied())?;
    Some(Rect::new(
        r.x_min - margins.x_min as f64 * h,
        r.x_max + margins.x_max as f64 * h,
        r.y_min - margins.y_min as f64 * h,
        r.y_max + margins.y_max as f64 * h,
    ))
}

/// Integer lattice range `[lo, hi]` of steps inside `[a, b]`.
fn lattice_range(a: f64, b: f64, h: f64, anchor: GridAnchor) -> (i64, i64) {
    match anchor {
        GridAnchor::WindowCorner => (0, ((b - a) / h + FLOOR_SLACK).floor() as i64),
        GridAnchor::Origin => (
            (a / h - FLOOR_SLACK).ceil() as i64,
            (b / h + FLOOR_SLACK).floor() as i64,
        ),
    }
}

fn lattice_coord(origin: f64, k: i64, h: f64, anchor: GridAnchor) -> f64 {
    match anchor {
        GridAnchor::WindowCorner => origin + k as f64 * h,
        GridAnchor::Origin => k as f64 * h,
    }
}

struct Lattice {
    points: Vec<Point2>,
    /// Lattice indices `(j, k)` relative to the window's lowest row and column.
    cells: Vec<(u32, u32)>,
    cols: usize,
    rows: usize,
}

fn lattice(d: &Domain, p: &GridParams) -> Result<Lattice> {
    p.validate()?;
    let w = p.effective_window(d)?;
    let (j0, j1) = lattice_range(w.x_min, w.x_max, p.h, p.anchor);
    let (k0, k1) = lattice_range(w.y_min, w.y_max, p.h, p.anchor);
    if j1 < j0 || k1 < k0 {
        return Err(Error::EmptyVertexSet);
    }
    let cols = (j1 - j0 + 1) as usize;
    let rows = (k1 - k0 + 1) as usize;
    if cols.saturating_mul(rows) > 400_000_000 {
        return Err(Error::param("h", format!("grid of {cols}x{rows} points is too large")));
    }
    let row_hits: Vec<Vec<(Point2, (u32, u32))>> = (0..rows)
        .into_par_iter()
        .map(|kr| {
            let y = lattice_coord(w.y_min, k0 + kr as i64, p.h, p.anchor);
            (0..cols)
                .filter_map(|jc| {
                    let x = lattice_coord(w.x_min, j0 + jc as i64, p.h, p.anchor);
                    let q = Point2::new(x, y);
                    (d.contains(q) && d.dist_to_boundary(q) > VERTEX_CLEARANCE * p.h)
                        .then_some((q, (jc as u32, kr as u32)))
                })
                .collect()
        })
        .collect();
    let (points, cells): (Vec<_>, Vec<_>) = row_hits.into_iter().flatten().unzip();
    if points.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    Ok(Lattice {
        points,
        cells,
        cols,
        rows,
    })
}

/// Grid points of the window lying in the domain, in row-major `(k, j)` order.
pub fn generate_vertices(d: &Domain, p: &GridParams) -> Result<Vec<Point2>> {
    Ok(lattice(d, p)?.points)
}

/// Integer offsets `(i, j)` with `m² ≤ i² + j² ≤ 2m²`.
pub fn annulus_offsets(m: u32) -> Vec<(i32, i32)> {
    let m = m as i64;
    let (lo, hi) = (m * m, 2 * m * m);
    let reach = (std::f64::consts::SQRT_2 * m as f64).ceil() as i64;
    let mut out = Vec::new();
    for j in -reach..=reach {
        for i in -reach..=reach {
            let s = i * i + j * j;
            if (lo..=hi).contains(&s) {
                out.push((i as i32, j as i32));
            }
        }
    }
    out
}

/// Brute-force annulus neighbors of vertex `v`: every `q ≠ v` with
/// `m·h·(1-τ) ≤ |p_v - p_q| ≤ √2·m·h·(1+τ)`.
pub fn layer_neighbors(vertices: &[Point2], p: &GridParams, v: usize) -> Vec<usize> {
    let mh = p.m as f64 * p.h;
    let (lo, hi) = (
        mh * (1.0 - ANNULUS_TOL),
        std::f64::consts::SQRT_2 * mh * (1.0 + ANNULUS_TOL),
    );
    let pv = vertices[v];
    vertices
        .iter()
        .enumerate()
        .filter(|&(q, &pq)| {
            let dist = pv.dist(pq);
            q != v && dist >= lo && dist <= hi
        })
        .map(|(q, _)| q)
        .collect()
}

/// Compressed adjacency of an undirected weighted graph.
///
/// Neighbors of every vertex are sorted by id and each undirected edge is
/// stored in both directions with the same weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Adjacency {
    /// Builds from undirected edges `(u, v, w)`; duplicate pairs keep the smaller weight.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut directed: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::param(
                    "edges",
                    format!("edge {u}-{v} out of range for {n} vertices"),
                ));
            }
            if !(w >= 0.0) {
                return Err(Error::NegativeWeight { u, v, weight: w });
            }
            if u == v {
                continue;
            }
            directed.push((u as u32, v as u32, w));
            directed.push((v as u32, u as u32, w));
        }
        directed.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        directed.dedup_by(|later, earlier| later.0 == earlier.0 && later.1 == earlier.1);
        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Adjacency {
            offsets,
            targets: directed.iter().map(|e| e.1).collect(),
            weights: directed.iter().map(|e| e.2).collect(),
        })
    }

    /// Builds from per-vertex lists of upper neighbors `v > u` with weights.
    fn from_upper(upper: Vec<Vec<(u32, f64)>>) -> Self {
        let n = upper.len();
        let mut degree = vec![0usize; n];
        for (u, list) in upper.iter().enumerate() {
            degree[u] += list.len();
            for &(v, _) in list {
                degree[v as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let total = offsets[n];
        let mut targets = vec![0u32; total];
        let mut weights = vec![0f64; total];
        let mut fill = offsets[..n].to_vec();
        // Lower neighbors arrive in increasing id order because u increases.
        for (u, list) in upper.iter().enumerate() {
            for &(v, w) in list {
                let slot = &mut fill[v as usize];
                targets[*slot] = u as u32;
                weights[*slot] = w;
                *slot += 1;
            }
        }
        for (u, list) in upper.into_iter().enumerate() {
            for (k, (v, w)) in list.into_iter().enumerate() {
                targets[fill[u] + k] = v;
                weights[fill[u] + k] = w;
            }
        }
        Adjacency {
            offsets,
            targets,
            weights,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&v, &w)| (v as usize, w))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let r = self.offsets[u]..self.offsets[u + 1];
        let t = &self.targets[r.clone()];
        t.binary_search(&(v as u32)).ok().map(|i| self.weights[r.start + i])
    }

    /// All undirected edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }
}

/// Per-vertex data the weight rule needs, computed once.
enum VertexCache {
    None,
    BoundaryDistance(Vec<f64>),
    Preimage(Vec<Point2>),
}

/// The weighted grid graph of a domain.
#[derive(Clone, Debug)]
pub struct GridGraph {
    vertices: Vec<Point2>,
    adjacency: Adjacency,
    params: GridParams,
    metric: MetricSpec,
    domain: Domain,
    window: Rect,
}

impl GridGraph {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> Point2 {
        self.vertices[id]
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The window the lattice was generated in.
    pub fn window(&self) -> Rect {
        self.window
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency.neighbors(u)
    }

    /// Writes `id,x,y` rows.
    pub fn write_vertices_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "id,x,y")?;
        for (i, p) in self.vertices.iter().enumerate() {
            writeln!(w, "{i},{},{}", g17(p.x), g17(p.y))?;
        }
        Ok(())
    }

    /// Writes `u_id,v_id,weight` rows, one per undirected edge.
    pub fn write_edges_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "u_id,v_id,weight")?;
        for (u, v, wt) in self.adjacency.edges() {
            writeln!(w, "{u},{v},{}", g17(wt))?;
        }
        Ok(())
    }
}

/// Builds the grid graph: lattice vertices inside `d`, annulus edges whose
/// segments miss the boundary, weighted by `spec`.
pub fn build_graph(d: &Domain, p: &GridParams, spec: &MetricSpec) -> Result<GridGraph> {
    spec.check_domain(d)?;
    let window = p.effective_window(d)?;
    let lat = lattice(d, p)?;
    let n = lat.points.len();
    let mut index = vec![u32::MAX; lat.cols * lat.rows];
    for (id, &(j, k)) in lat.cells.iter().enumerate() {
        index[k as usize * lat.cols + j as usize] = id as u32;
    }

    let cache = match spec {
        MetricSpec::Quasihyperbolic | MetricSpec::DistanceRatio => {
            VertexCache::BoundaryDistance(lat.points.par_iter().map(|&q| d.dist_to_boundary(q)).collect())
        }
        MetricSpec::HyperbolicPullback(map) => {
            let pre: Vec<Result<Point2>> = lat.points.par_iter().map(|&q| map.inverse(q)).collect();
            let mut out = Vec::with_capacity(n);
            for (vertex, r) in pre.into_iter().enumerate() {
                out.push(r.map_err(|e| Error::VertexInversion {
                    vertex,
                    source: Box::new(e),
                })?);
            }
            VertexCache::Preimage(out)
        }
        MetricSpec::HyperbolicDisk | MetricSpec::HyperbolicHalfPlane | MetricSpec::QuasihyperbolicQuadrature => {
            VertexCache::None
        }
    };

    let offsets = annulus_offsets(p.m);
    let (cols, rows) = (lat.cols as i64, lat.rows as i64);
    let upper: Vec<Result<Vec<(u32, f64)>>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let (j, k) = lat.cells[u];
            let a = lat.points[u];
            let mut list = Vec::new();
            for &(di, dj) in &offsets {
                let (jj, kk) = (j as i64 + di as i64, k as i64 + dj as i64);
                if jj < 0 || kk < 0 || jj >= cols || kk >= rows {
                    continue;
                }
                let v = index[(kk * cols + jj) as usize];
                if v == u32::MAX || (v as usize) <= u {
                    continue;
                }
                let b = lat.points[v as usize];
                if !d.segment_clear(a, b) {
                    continue;
                }
                let w = match &cache {
                    VertexCache::BoundaryDistance(dist) => {
                        let (da, db) = (dist[u], dist[v as usize]);
                        match spec {
                            MetricSpec::DistanceRatio => metric::j_from_distances(a, b, da, db),
                            _ => metric::qh_from_distances(a, b, da, db),
                        }
                    }
                    VertexCache::Preimage(pre) => metric::rho_halfplane(pre[u], pre[v as usize])?,
                    VertexCache::None => metric::edge_weight(spec, d, a, b)?,
                };
                list.push((v, w));
            }
            list.sort_by_key(|e| e.0);
            Ok(list)
        })
        .collect();
    let upper = upper.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GridGraph {
        vertices: lat.points,
        adjacency: Adjacency::from_upper(upper),
        params: p.clone(),
        metric: spec.clone(),
        domain: d.clone(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn vertex_counts() {
        let sq = Domain::rectangle(0., 1., 0., 1.).unwrap();
        let v = generate_vertices(&sq, &GridParams::new(0.5, 1)).unwrap();
        assert_eq!(v, vec![p(0.5, 0.5)]);
        let rect = Domain::rectangle(-3., 3., -1., 1.).unwrap();
        assert_eq!(generate_vertices(&rect, &GridParams::new(1.0, 1)).unwrap().len(), 5);
        let disk = Domain::unit_disk();
        let v = generate_vertices(&disk, &GridParams::new(0.5, 1)).unwrap();
        assert_eq!(v.len(), 9);
        // row-major: y outer, x inner
        assert_eq!(v[0], p(-0.5, -0.5));
        assert_eq!(v[1], p(0.0, -0.5));
        assert_eq!(v[3], p(-0.5, 0.0));
    }

    #[test]
    fn empty_vertex_set() {
        let sq = Domain::rectangle(0., 1., 0., 1.).unwrap();
        let r = generate_vertices(&sq, &GridParams::new(2.0, 1));
        assert!(matches!(r, Err(Error::EmptyVertexSet)));
        let unbounded = generate_vertices(&Domain::upper_half_plane(), &GridParams::new(0.5, 1));
        assert!(unbounded.is_err());
    }

    #[test]
    fn origin_anchor() {
        let d = Domain::rectangle(-3., 3., -1., 1.).unwrap();
        let prm = GridParams::new(0.4, 1)
            .with_window(Rect::new(-0.5, 0.5, -0.5, 0.5))
            .with_anchor(GridAnchor::Origin);
        let v = generate_vertices(&d, &prm).unwrap();
        assert!(v.contains(&p(0.0, 0.0)));
        assert_eq!(v.len(), 9);
    }

    #[test]
    fn annulus_counts() {
        assert_eq!(annulus_offsets(1).len(), 8);
        let brute = (-8i32..=8)
            .flat_map(|i| (-8i32..=8).map(move |j| i * i + j * j))
            .filter(|s| (16..=32).contains(s))
            .count();
        assert_eq!(annulus_offsets(4).len(), brute);
    }

    #[test]
    fn rectangle_path_graph() {
        let d = Domain::rectangle(-3., 3., -1., 1.).unwrap();
        let g = build_graph(&d, &GridParams::new(1.0, 1), &MetricSpec::Quasihyperbolic).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
        for (u, v, w) in g.adjacency().edges() {
            assert_eq!(v, u + 1);
            assert_eq!(w, 1.0);
        }
    }

    #[test]
    fn lattice_matches_brute_force() {
        let d = Domain::unit_disk();
        let prm = GridParams::new(0.1, 3);
        let g = build_graph(&d, &prm, &MetricSpec::Quasihyperbolic).unwrap();
        for u in 0..g.vertex_count() {
            let mut brute: Vec<usize> = layer_neighbors(g.vertices(), &prm, u)
                .into_iter()
                .filter(|&v| d.segment_clear(g.vertex(u), g.vertex(v)))
                .collect();
            brute.sort();
            let got: Vec<usize> = g.neighbors(u).map(|e| e.0).collect();
            assert_eq!(got, brute, "vertex {u}");
        }
    }

    #[test]
    fn adjacency_from_edges() {
        let a = Adjacency::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(a.edge_count(), 2);
        assert_eq!(a.weight(0, 1), Some(0.5));
        assert_eq!(a.weight(2, 1), Some(2.0));
        assert_eq!(a.weight(0, 2), None);
        assert!(matches!(
            Adjacency::from_edges(2, &[(0, 1, -1.0)]),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn window_formula() {
        let w = local_window(p(0.9, 0.), p(0.495, 0.495), 0.01, Margins::uniform(10));
        assert!((w.x_min - 0.395).abs() < 1e-15);
        assert!((w.x_max - 1.0).abs() < 1e-15);
        assert!((w.y_min + 0.1).abs() < 1e-15);
        assert!((w.y_max - 0.595).abs() < 1e-15);
        let z = local_window(p(0., 0.), p(0., 0.), 0.3, Margins::uniform(0));
        assert_eq!(z, Rect::new(0., 0., 0., 0.));
    }
}
