use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Analysis, DomainSpec, GridSpec, MetricConfig, PointSpec, Scenario, WindowSpec};
use crate::analysis::{self, BifurcationResult};
use crate::conformal::{QuadParams, QuadrilateralMap};
use crate::error::{Error, Result};
use crate::geometry::segments_intersect;
use crate::geometry::{Domain, NamedDomain, Point2, Rect, Segment};
use crate::graph::{build_graph, GridAnchor, GridGraph, Margins};
use crate::metric::{self, MetricSpec};
use crate::solver::{dijkstra, dijkstra_filtered, dijkstra_to, snap_to_vertex, GeodesicPath};

/// Environment variable capping the number of worker threads; 0 means automatic.
pub const THREADS_ENV: &str = "GEOWALK_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
}

impl RunOptions {
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        RunOptions { threads }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryStatus {
    Ok,
    NoPath,
    NumericFailure,
    Failed,
}

impl QueryStatus {
    fn of(e: &Error) -> Self {
        match e {
            Error::NoPath { .. } => QueryStatus::NoPath,
            e if e.is_numeric() => QueryStatus::NumericFailure,
            _ => QueryStatus::Failed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QueryStatus::Ok => "ok",
            QueryStatus::NoPath => "no_path",
            QueryStatus::NumericFailure => "numeric_failure",
            QueryStatus::Failed => "failed",
        }
    }
}

/// Parameters that reproduce one graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphReport {
    pub index: usize,
    pub group: Option<String>,
    pub h: f64,
    pub m: u32,
    pub anchor: GridAnchor,
    pub metric: &'static str,
    pub window: Option<Rect>,
    pub margins: Option<Margins>,
    pub vertices: usize,
    pub edges: usize,
    pub build_seconds: f64,
    pub queries: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryReport {
    pub name: String,
    pub group: Option<String>,
    pub graph: Option<usize>,
    pub h: f64,
    pub m: u32,
    pub anchor: GridAnchor,
    pub metric: &'static str,
    pub from: Option<Point2>,
    pub to: Option<Point2>,
    pub snapped_from: Option<Point2>,
    pub snapped_to: Option<Point2>,
    pub length: Option<f64>,
    pub validated_length: Option<f64>,
    pub path_vertices: Option<usize>,
    pub graph_vertices: Option<usize>,
    pub graph_edges: Option<usize>,
    pub wall_seconds: f64,
    pub status: QueryStatus,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedValue {
    pub key: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub index: usize,
    pub kind: &'static str,
    pub queries: Vec<String>,
    pub values: Vec<NamedValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bifurcations: Vec<BifurcationResult>,
    pub error: Option<String>,
}

impl AnalysisReport {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|v| v.key == key).map(|v| v.value)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub scenario_hash: String,
    pub graphs: Vec<GraphReport>,
    pub queries: Vec<QueryReport>,
    pub analyses: Vec<AnalysisReport>,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub paths: Vec<Option<GeodesicPath>>,
    #[serde(skip)]
    pub domain: Option<Domain>,
}

impl RunReport {
    pub fn query(&self, name: &str) -> Option<&QueryReport> {
        self.queries.iter().find(|q| q.name == name)
    }

    pub fn path(&self, name: &str) -> Option<&GeodesicPath> {
        let i = self.queries.iter().position(|q| q.name == name)?;
        self.paths[i].as_ref()
    }

    pub fn length(&self, name: &str) -> Option<f64> {
        self.query(name).and_then(|q| q.length)
    }

    /// Process exit code: 4 on any numeric failure, 3 on any missing path,
    /// 2 on any other query failure, else 0.
    pub fn exit_code(&self) -> i32 {
        let has = |st: QueryStatus| self.queries.iter().any(|q| q.status == st);
        if has(QueryStatus::NumericFailure) {
            4
        } else if has(QueryStatus::NoPath) {
            3
        } else if has(QueryStatus::Failed) {
            2
        } else {
            0
        }
    }
}

fn metric_spec(m: MetricConfig, map: Option<&Arc<QuadrilateralMap>>) -> Result<MetricSpec> {
    Ok(match m {
        MetricConfig::Quasihyperbolic => MetricSpec::Quasihyperbolic,
        MetricConfig::QuasihyperbolicQuadrature => MetricSpec::QuasihyperbolicQuadrature,
        MetricConfig::HyperbolicDisk => MetricSpec::HyperbolicDisk,
        MetricConfig::HyperbolicHalfPlane => MetricSpec::HyperbolicHalfPlane,
        MetricConfig::DistanceRatio => MetricSpec::DistanceRatio,
        MetricConfig::HyperbolicPullback => MetricSpec::HyperbolicPullback(
            map.cloned()
                .ok_or_else(|| Error::scenario("/metric", "hyperbolic_pullback needs a quadrilateral domain"))?,
        ),
    })
}

struct GraphKey {
    group: Option<String>,
    grid: GridSpec,
    metric: MetricConfig,
    members: Vec<usize>,
}

/// Endpoints of a query in the plane, plus half-plane preimages when given.
#[derive(Clone, Copy)]
struct Endpoints {
    from: Point2,
    to: Point2,
    pre_from: Option<Point2>,
    pre_to: Option<Point2>,
}

fn resolve(p: PointSpec, map: Option<&Arc<QuadrilateralMap>>, domain: &Domain) -> Result<(Point2, Option<Point2>)> {
    match p {
        PointSpec::Plane(q) => Ok((q, None)),
        PointSpec::Preimage { preimage } => {
            let map = map.ok_or_else(|| Error::param("preimage", "no quadrilateral map"))?;
            let w = map.forward_point(preimage)?;
            if !domain.contains(w) {
                return Err(Error::OutsideDomain { x: w.x, y: w.y });
            }
            Ok((w, Some(preimage)))
        }
    }
}

struct QueryOutcome {
    path: Result<GeodesicPath>,
    seconds: f64,
}

pub fn run_scenario(s: &Scenario) -> Result<RunReport> {
    run_scenario_with(s, &RunOptions::from_env())
}

pub fn run_scenario_with(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    if opts.threads == 0 {
        return run_inner(s);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    pool.install(|| run_inner(s))
}

fn run_inner(s: &Scenario) -> Result<RunReport> {
    let started = Instant::now();
    s.validate()?;
    let domain = s.domain.build()?;
    let map = match s.domain {
        DomainSpec::Named(NamedDomain::Quadrilateral { a, b, c, r }) => {
            Some(Arc::new(QuadrilateralMap::new(QuadParams { a, b, c, r })?))
        }
        _ => None,
    };

    let endpoints: Vec<Result<Endpoints>> = s
        .queries
        .par_iter()
        .map(|q| {
            let (from, pre_from) = resolve(q.from, map.as_ref(), &domain)?;
            let (to, pre_to) = resolve(q.to, map.as_ref(), &domain)?;
            Ok(Endpoints {
                from,
                to,
                pre_from,
                pre_to,
            })
        })
        .collect();

    let mut keys: Vec<GraphKey> = Vec::new();
    for (i, q) in s.queries.iter().enumerate() {
        let grid = q.grid.clone().unwrap_or_else(|| s.grid.clone());
        let metric = q.metric.unwrap_or(s.metric);
        match keys
            .iter_mut()
            .find(|k| k.group == q.group && k.grid == grid && k.metric == metric)
        {
            Some(k) => k.members.push(i),
            None => keys.push(GraphKey {
                group: q.group.clone(),
                grid,
                metric,
                members: vec![i],
            }),
        }
    }
    if keys.is_empty() {
        keys.push(GraphKey {
            group: None,
            grid: s.grid.clone(),
            metric: s.metric,
            members: Vec::new(),
        });
    }

    let n = s.queries.len();
    let mut paths: Vec<Option<GeodesicPath>> = vec![None; n];
    let mut reports: Vec<Option<QueryReport>> = vec![None; n];
    let mut graphs = Vec::with_capacity(keys.len());

    for (gi, key) in keys.iter().enumerate() {
        let points: Vec<Point2> = key
            .members
            .iter()
            .filter_map(|&i| endpoints[i].as_ref().ok())
            .flat_map(|e| [e.from, e.to])
            .collect();
        let params = key.grid.params(&points);
        let margins = match key.grid.window {
            WindowSpec::Local { margins } => Some(margins),
            _ => None,
        };
        let t0 = Instant::now();
        let built = metric_spec(key.metric, map.as_ref()).and_then(|spec| {
            if matches!(key.grid.window, WindowSpec::Local { .. }) && points.is_empty() && !key.members.is_empty() {
                return Err(Error::param(
                    "window",
                    "no resolvable query points for the local window",
                ));
            }
            build_graph(&domain, &params, &spec)
        });
        let build_seconds = t0.elapsed().as_secs_f64();
        let mut gr = GraphReport {
            index: gi,
            group: key.group.clone(),
            h: key.grid.h,
            m: key.grid.m,
            anchor: key.grid.anchor,
            metric: key.metric.name(),
            window: params.window.or_else(|| domain.bounding_box()),
            margins,
            vertices: 0,
            edges: 0,
            build_seconds,
            queries: key.members.iter().map(|&i| s.queries[i].name.clone()).collect(),
            error: None,
        };
        let blank = |i: usize| QueryReport {
            name: s.queries[i].name.clone(),
            group: key.group.clone(),
            graph: Some(gi),
            h: key.grid.h,
            m: key.grid.m,
            anchor: key.grid.anchor,
            metric: key.metric.name(),
            from: endpoints[i].as_ref().ok().map(|e| e.from),
            to: endpoints[i].as_ref().ok().map(|e| e.to),
            snapped_from: None,
            snapped_to: None,
            length: None,
            validated_length: None,
            path_vertices: None,
            graph_vertices: None,
            graph_edges: None,
            wall_seconds: 0.0,
            status: QueryStatus::Ok,
            error: None,
        };
        let g = match built {
            Ok(g) => g,
            Err(e) => {
                gr.error = Some(e.to_string());
                for &i in &key.members {
                    let mut r = blank(i);
                    r.status = QueryStatus::of(&e);
                    r.error = Some(e.to_string());
                    reports[i] = Some(r);
                }
                graphs.push(gr);
                continue;
            }
        };
        gr.vertices = g.vertex_count();
        gr.edges = g.edge_count();

        let outcomes = run_queries(&g, s, key, &endpoints);
        for (&i, out) in key.members.iter().zip(outcomes) {
            let mut r = blank(i);
            r.graph_vertices = Some(g.vertex_count());
            r.graph_edges = Some(g.edge_count());
            r.wall_seconds = out.seconds;
            let checked = out.path.and_then(|p| {
                let v = metric::polyline_weighted_length(g.metric(), &domain, &p.points)?;
                Ok((p, v))
            });
            match checked {
                Ok((p, validated)) => {
                    r.snapped_from = Some(p.start());
                    r.snapped_to = Some(p.end());
                    r.length = Some(p.total_length);
                    r.validated_length = Some(validated);
                    r.path_vertices = Some(p.len());
                    paths[i] = Some(p);
                }
                Err(e) => {
                    r.status = QueryStatus::of(&e);
                    r.error = Some(e.to_string());
                }
            }
            reports[i] = Some(r);
        }
        graphs.push(gr);
    }

    // queries whose endpoints failed to resolve never reached a graph
    for (i, e) in endpoints.iter().enumerate() {
        if let Err(e) = e {
            if let Some(r) = reports[i].as_mut() {
                r.status = QueryStatus::of(e);
                r.error = Some(e.to_string());
            }
        }
    }

    let queries: Vec<QueryReport> = reports.into_iter().map(|r| r.expect("every query reported")).collect();
    let analyses = s
        .analyses
        .iter()
        .enumerate()
        .map(|(i, a)| evaluate(i, a, s, &queries, &paths, &endpoints, &domain, map.as_ref()))
        .collect();

    Ok(RunReport {
        scenario: s.name.clone(),
        scenario_hash: s.hash(),
        graphs,
        queries,
        analyses,
        wall_seconds: started.elapsed().as_secs_f64(),
        paths,
        domain: Some(domain),
    })
}

/// Runs the queries of one graph. Barrier-free queries sharing a source
/// vertex reuse a single full Dijkstra sweep.
fn run_queries(g: &GridGraph, s: &Scenario, key: &GraphKey, endpoints: &[Result<Endpoints>]) -> Vec<QueryOutcome> {
    let snapped: Vec<Result<(usize, usize)>> = key
        .members
        .iter()
        .map(|&i| {
            let e = endpoints[i]
                .as_ref()
                .map_err(|e| Error::param("endpoint", e.to_string()))?;
            Ok((snap_to_vertex(g, e.from)?, snap_to_vertex(g, e.to)?))
        })
        .collect();

    // jobs: (source, member positions)
    let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut single: Vec<usize> = Vec::new();
    for (pos, sn) in snapped.iter().enumerate() {
        let Ok((src, _)) = sn else { continue };
        if !s.queries[key.members[pos]].barriers.is_empty() {
            single.push(pos);
            continue;
        }
        match jobs.iter_mut().find(|j| j.0 == *src) {
            Some(j) => j.1.push(pos),
            None => jobs.push((*src, vec![pos])),
        }
    }
    for j in jobs.iter_mut().filter(|j| j.1.len() == 1) {
        single.push(j.1[0]);
        j.1.clear();
    }
    jobs.retain(|j| !j.1.is_empty());
    single.sort_unstable();

    let shared: Vec<Vec<(usize, QueryOutcome)>> = jobs
        .par_iter()
        .map(|(src, members)| {
            let t0 = Instant::now();
            let tree = dijkstra(g.adjacency(), *src);
            let seconds = t0.elapsed().as_secs_f64();
            members
                .iter()
                .map(|&pos| {
                    let (_, t) = *snapped[pos].as_ref().expect("snapped");
                    let path = match &tree {
                        Ok(tree) => GeodesicPath::from_tree(g, tree, t),
                        Err(e) => Err(Error::param("dijkstra", e.to_string())),
                    };
                    (pos, QueryOutcome { path, seconds })
                })
                .collect()
        })
        .collect();

    let singles: Vec<(usize, QueryOutcome)> = single
        .par_iter()
        .map(|&pos| {
            let t0 = Instant::now();
            let (src, t) = *snapped[pos].as_ref().expect("snapped");
            let barriers: &[Segment] = &s.queries[key.members[pos]].barriers;
            let verts = g.vertices();
            let tree = if barriers.is_empty() {
                dijkstra_to(g.adjacency(), src, t)
            } else {
                dijkstra_filtered(g.adjacency(), src, t, |u, v| {
                    !barriers
                        .iter()
                        .any(|b| segments_intersect(verts[u], verts[v], b.a, b.b))
                })
            };
            let path = tree.and_then(|tree| GeodesicPath::from_tree(g, &tree, t));
            (
                pos,
                QueryOutcome {
                    path,
                    seconds: t0.elapsed().as_secs_f64(),
                },
            )
        })
        .collect();

    let mut out: Vec<Option<QueryOutcome>> = (0..key.members.len()).map(|_| None).collect();
    for (pos, o) in shared.into_iter().flatten().chain(singles) {
        out[pos] = Some(o);
    }
    out.into_iter()
        .zip(snapped)
        .map(|(o, sn)| match (o, sn) {
            (Some(o), _) => o,
            (None, Err(e)) => QueryOutcome {
                path: Err(e),
                seconds: 0.0,
            },
            (None, Ok(_)) => unreachable!("every snapped query has a job"),
        })
        .collect()
}

fn winding_number(points: &[Point2], center: Point2) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let n = points.len();
    for k in 0..n {
        let a = points[k] - center;
        let b = points[(k + 1) % n] - center;
        total += a.cross(b).atan2(a.dot(b));
    }
    (total / (2.0 * PI)).round() + 0.0
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    index: usize,
    a: &Analysis,
    s: &Scenario,
    queries: &[QueryReport],
    paths: &[Option<GeodesicPath>],
    endpoints: &[Result<Endpoints>],
    domain: &Domain,
    map: Option<&Arc<QuadrilateralMap>>,
) -> AnalysisReport {
    let names: Vec<String> = a.queries().iter().map(|q| q.to_string()).collect();
    let mut report = AnalysisReport {
        index,
        kind: a.kind(),
        queries: names.clone(),
        values: Vec::new(),
        bifurcations: Vec::new(),
        error: None,
    };
    let lookup = |name: &str| -> Result<(usize, &GeodesicPath)> {
        let i = s.query_index(name).expect("validated reference");
        paths[i].as_ref().map(|p| (i, p)).ok_or_else(|| {
            Error::param(
                "query",
                format!(
                    "query `{name}` has no path: {}",
                    queries[i].error.as_deref().unwrap_or("unknown error")
                ),
            )
        })
    };
    let mut put = |key: &str, value: f64| {
        report.values.push(NamedValue {
            key: key.to_string(),
            value,
        })
    };
    let result: Result<()> = (|| {
        match a {
            Analysis::Bifurcation { first, second, all } => {
                let (_, p1) = lookup(first)?;
                let (_, p2) = lookup(second)?;
                let mut found = analysis::find_bifurcations(p1, p2);
                if !all {
                    found.truncate(1);
                }
                put("count", found.len() as f64);
                for (k, b) in found.iter().enumerate() {
                    let w = b.location().expect("points only");
                    let suffix = if k == 0 { String::new() } else { format!("_{k}") };
                    put(&format!("x{suffix}"), w.x);
                    put(&format!("y{suffix}"), w.y);
                }
                if found.is_empty() {
                    found.push(BifurcationResult::NotFound);
                }
                report.bifurcations = found;
            }
            Analysis::SectorArcError { query, l, r } => {
                let (_, p) = lookup(query)?;
                put("arc_error", analysis::sector_arc_error(p, *l, *r)?);
            }
            Analysis::InscribedRadius { queries: qs } => {
                let ps: Vec<GeodesicPath> = qs
                    .iter()
                    .map(|q| lookup(q).map(|x| x.1.clone()))
                    .collect::<Result<_>>()?;
                put("radius", analysis::inscribed_radius(&ps)?);
            }
            Analysis::MedialAxisFraction { query, tau } => {
                let (_, p) = lookup(query)?;
                put("fraction", analysis::medial_axis_fraction(p, domain, *tau)?);
            }
            Analysis::ReferenceError { query, reference } => {
                let (_, p) = lookup(query)?;
                put("error", analysis::path_to_reference_error(p, reference)?);
            }
            Analysis::ExactDistance { query } => {
                let (i, p) = lookup(query)?;
                let e = endpoints[i]
                    .as_ref()
                    .map_err(|e| Error::param("endpoint", e.to_string()))?;
                let exact = match s.queries[i].metric.unwrap_or(s.metric) {
                    MetricConfig::HyperbolicDisk => metric::rho_disk(e.from, e.to)?,
                    MetricConfig::HyperbolicHalfPlane => metric::rho_halfplane(e.from, e.to)?,
                    MetricConfig::DistanceRatio => metric::j_metric(domain, e.from, e.to)?,
                    MetricConfig::HyperbolicPullback => {
                        let map = map.ok_or_else(|| Error::param("metric", "no quadrilateral map"))?;
                        let z1 = match e.pre_from {
                            Some(z) => z,
                            None => map.inverse(e.from)?,
                        };
                        let z2 = match e.pre_to {
                            Some(z) => z,
                            None => map.inverse(e.to)?,
                        };
                        metric::rho_halfplane(z1, z2)?
                    }
                    m => return Err(Error::param("metric", format!("{} has no closed form", m.name()))),
                };
                put("exact", exact);
                put("approx", p.total_length);
                put("error", (exact - p.total_length).abs());
                // distance between the lattice points actually joined
                let snapped = match s.queries[i].metric.unwrap_or(s.metric) {
                    MetricConfig::HyperbolicDisk => Some(metric::rho_disk(p.start(), p.end())?),
                    MetricConfig::HyperbolicHalfPlane => Some(metric::rho_halfplane(p.start(), p.end())?),
                    MetricConfig::DistanceRatio => Some(metric::j_metric(domain, p.start(), p.end())?),
                    _ => None,
                };
                if let Some(v) = snapped {
                    put("exact_snapped", v);
                }
            }
            Analysis::Ratio { numerator, denominator } => {
                let (_, p) = lookup(numerator)?;
                let (_, q) = lookup(denominator)?;
                put("ratio", p.total_length / q.total_length);
                put("numerator", p.total_length);
                put("denominator", q.total_length);
            }
            Analysis::HoleWinding { query, hole } => {
                let (_, p) = lookup(query)?;
                let verts = domain.holes()[*hole].vertices();
                let center = verts.iter().fold(Point2::ORIGIN, |acc, &v| acc + v) * (1.0 / verts.len() as f64);
                put("winding", winding_number(&p.points, center));
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        report.error = Some(e.to_string());
    }
    report
}
