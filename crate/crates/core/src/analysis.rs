//! Post-processing of geodesic paths: bifurcation points, reference-curve
//! errors, inscribed radii and medial-axis overlap.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{closest_point_on_segment, Domain, Point2};
use crate::solver::GeodesicPath;

/// Two step arguments are equal when they differ by less than this, mod 2π.
pub const ARG_TOL: f64 = 1e-9;

pub fn arguments_equal(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d) < ARG_TOL
}

/// Which bifurcation case produced a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationCase {
    /// The paths merge: the shared run starts at the point (near endpoint).
    EndpointA,
    /// The paths separate: the shared run ends at the point (far endpoint).
    EndpointB,
}

impl BifurcationCase {
    pub fn tag(self) -> &'static str {
        match self {
            BifurcationCase::EndpointA => "a",
            BifurcationCase::EndpointB => "b",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BifurcationResult {
    Point { location: Point2, case: BifurcationCase },
    NotFound,
}

impl BifurcationResult {
    pub fn location(&self) -> Option<Point2> {
        match *self {
            BifurcationResult::Point { location, .. } => Some(location),
            BifurcationResult::NotFound => None,
        }
    }
}

/// A maximal stretch both paths traverse together, in arclength coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
struct SharedRun {
    s1: (f64, f64),
    s2: (f64, f64),
}

fn cumulative(points: &[Point2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in points.windows(2) {
        acc += w[0].dist(w[1]);
        out.push(acc);
    }
    out
}

fn scale_of(p1: &[Point2], p2: &[Point2]) -> f64 {
    p1.iter().chain(p2).fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
}

fn point_at(points: &[Point2], cum: &[f64], s: f64) -> Point2 {
    let i = match cum.binary_search_by(|c| c.total_cmp(&s)) {
        Ok(i) => return points[i],
        Err(i) => i.clamp(1, points.len() - 1),
    };
    let (a, b) = (points[i - 1], points[i]);
    let len = cum[i] - cum[i - 1];
    if len == 0.0 {
        return a;
    }
    a + (b - a) * ((s - cum[i - 1]) / len)
}

fn shared_runs(z: &[Point2], w: &[Point2], eps: f64) -> Vec<SharedRun> {
    let (cz, cw) = (cumulative(z), cumulative(w));
    let mut pieces = Vec::new();
    for i in 0..z.len().saturating_sub(1) {
        let (a0, a1) = (z[i], z[i + 1]);
        let la = cz[i + 1] - cz[i];
        if la == 0.0 {
            continue;
        }
        let dir = (a1 - a0) * (1.0 / la);
        let arg_a = (a1 - a0).arg();
        for j in 0..w.len().saturating_sub(1) {
            let (b0, b1) = (w[j], w[j + 1]);
            if b0 == b1 || !arguments_equal(arg_a, (b1 - b0).arg()) {
                continue;
            }
            if dir.cross(b0 - a0).abs() > eps || dir.cross(b1 - a0).abs() > eps {
                continue;
            }
            let (t0, t1) = (dir.dot(b0 - a0), dir.dot(b1 - a0));
            let (lo, hi) = (t0.max(0.0), t1.min(la));
            if hi - lo <= eps {
                continue;
            }
            pieces.push(SharedRun {
                s1: (cz[i] + lo, cz[i] + hi),
                s2: (cw[j] + (lo - t0), cw[j] + (hi - t0)),
            });
        }
    }
    pieces.sort_by(|a, b| a.s1.0.total_cmp(&b.s1.0).then(a.s2.0.total_cmp(&b.s2.0)));
    let mut runs: Vec<SharedRun> = Vec::new();
    for p in pieces {
        if let Some(last) = runs.last_mut() {
            if (p.s1.0 - last.s1.1).abs() <= eps && (p.s2.0 - last.s2.1).abs() <= eps {
                last.s1.1 = p.s1.1;
                last.s2.1 = p.s2.1;
                continue;
            }
        }
        runs.push(p);
    }
    runs
}

fn snap_to_vertices(p: Point2, z: &[Point2], w: &[Point2], eps: f64) -> Point2 {
    z.iter()
        .chain(w)
        .copied()
        .filter(|v| v.dist(p) <= eps)
        .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
        .unwrap_or(p)
}

/// Every bifurcation point along `path1`, in order.
///
/// Each maximal stretch the two paths share contributes a merge point at its
/// start when both paths arrive from different directions, and a separation
/// point at its end when both paths leave in different directions.
pub fn find_bifurcations(path1: &GeodesicPath, path2: &GeodesicPath) -> Vec<BifurcationResult> {
    let (z, w) = (&path1.points, &path2.points);
    if z.is_empty() || w.is_empty() {
        return Vec::new();
    }
    let eps = 1e-9 * scale_of(z, w);
    let (cz, cw) = (cumulative(z), cumulative(w));
    let (lz, lw) = (*cz.last().unwrap(), *cw.last().unwrap());
    let mut out = Vec::new();
    for run in shared_runs(z, w, eps) {
        if run.s1.0 > eps && run.s2.0 > eps {
            out.push(BifurcationResult::Point {
                location: snap_to_vertices(point_at(z, &cz, run.s1.0), z, w, eps),
                case: BifurcationCase::EndpointA,
            });
        }
        if run.s1.1 < lz - eps && run.s2.1 < lw - eps {
            out.push(BifurcationResult::Point {
                location: snap_to_vertices(point_at(z, &cz, run.s1.1), z, w, eps),
                case: BifurcationCase::EndpointB,
            });
        }
    }
    out
}

/// The first bifurcation point along `path1`, or `NotFound`.
pub fn find_bifurcation(path1: &GeodesicPath, path2: &GeodesicPath) -> BifurcationResult {
    find_bifurcations(path1, path2)
        .into_iter()
        .next()
        .unwrap_or(BifurcationResult::NotFound)
}

/// One primitive of a reference curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurvePiece {
    Segment {
        a: Point2,
        b: Point2,
    },
    /// Counterclockwise arc from `start` to `end` (radians).
    Arc {
        center: Point2,
        radius: f64,
        start: f64,
        end: f64,
    },
}

impl CurvePiece {
    pub fn distance(&self, p: Point2) -> f64 {
        match *self {
            CurvePiece::Segment { a, b } => p.dist(closest_point_on_segment(p, a, b)),
            CurvePiece::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let sweep = (end - start).rem_euclid(2.0 * PI);
                let v = p - center;
                let full = (end - start).abs() >= 2.0 * PI;
                let inside = full || (v.norm() > 0.0 && (v.arg() - start).rem_euclid(2.0 * PI) <= sweep);
                if inside {
                    (v.norm() - radius).abs()
                } else {
                    let e0 = center + Point2::polar(radius, start);
                    let e1 = center + Point2::polar(radius, start + sweep);
                    p.dist(e0).min(p.dist(e1))
                }
            }
        }
    }
}

/// `Σ d(z_i, γ)` over all path points.
pub fn path_to_reference_error(path: &GeodesicPath, reference: &[CurvePiece]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::param("reference", "reference curve is empty"));
    }
    Ok(path
        .points
        .iter()
        .map(|&p| reference.iter().map(|c| c.distance(p)).fold(f64::INFINITY, f64::min))
        .sum())
}

/// Mean distance of the off-bisector path points from the tangency circles
/// centered at `(l, r)` (upper points) and `(l, -r)` (lower points).
pub fn sector_arc_error(path: &GeodesicPath, l: f64, r: f64) -> Result<f64> {
    let (upper, lower) = (Point2::new(l, r), Point2::new(l, -r));
    let mut sum = 0.0;
    let mut count = 0usize;
    for &p in &path.points {
        if p.y == 0.0 {
            continue;
        }
        let c = if p.y > 0.0 { upper } else { lower };
        sum += (p.dist(c) - r).abs();
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyArcSet);
    }
    Ok(sum / count as f64)
}

/// Smallest distance from the origin over all points of all paths.
pub fn inscribed_radius(paths: &[GeodesicPath]) -> Result<f64> {
    if paths.iter().all(|p| p.points.is_empty()) {
        return Err(Error::param("paths", "no path points given"));
    }
    Ok(paths
        .iter()
        .flat_map(|p| p.points.iter())
        .map(|p| p.norm())
        .fold(f64::INFINITY, f64::min))
}

/// Whether `p` has two distinct closest boundary points up to `tau`.
pub fn on_medial_axis(d: &Domain, p: Point2, tau: f64) -> bool {
    let mut near: Vec<(f64, Point2)> = d
        .boundary_pieces()
        .iter()
        .map(|piece| {
            let q = piece.closest_point(p);
            (piece.distance(p), q)
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    let Some(&(d1, q1)) = near.first() else {
        return false;
    };
    let same = 1e-12 * 1f64.max(q1.norm());
    near.iter()
        .skip(1)
        .find(|(_, q)| q.dist(q1) > same)
        .is_some_and(|&(d2, _)| d2 - d1 < tau)
}

/// Fraction of path points lying on the medial axis of `d`.
pub fn medial_axis_fraction(path: &GeodesicPath, d: &Domain, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", format!("must be positive, got {tau}")));
    }
    if path.points.is_empty() {
        return Ok(0.0);
    }
    let hits = path.points.iter().filter(|&&p| on_medial_axis(d, p, tau)).count();
    Ok(hits as f64 / path.points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(pts: &[(f64, f64)]) -> GeodesicPath {
        let points: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        let edge_weights: Vec<f64> = points.windows(2).map(|w| w[0].dist(w[1])).collect();
        GeodesicPath {
            vertex_ids: (0..points.len()).collect(),
            edge_arguments: points.windows(2).map(|w| (w[1] - w[0]).arg()).collect(),
            total_length: edge_weights.iter().sum(),
            edge_weights,
            points,
        }
    }

    #[test]
    fn identical_paths_have_no_bifurcation() {
        let p = path(&[(0., 0.), (1., 0.), (2., 1.)]);
        assert_eq!(find_bifurcation(&p, &p), BifurcationResult::NotFound);
    }

    #[test]
    fn divergence_after_shared_prefix() {
        let p1 = path(&[(0., 0.), (1., 0.), (2., 0.), (3., 1.)]);
        let p2 = path(&[(0., 0.), (2., 0.), (3., -1.)]);
        let r = find_bifurcation(&p1, &p2);
        assert_eq!(
            r,
            BifurcationResult::Point {
                location: Point2::new(2., 0.),
                case: BifurcationCase::EndpointB
            }
        );
        assert_eq!(find_bifurcation(&p2, &p1).location(), r.location());
    }

    #[test]
    fn split_and_merge() {
        let p1 = path(&[(0., 0.), (1., 0.), (2., 1.), (3., 0.), (4., 0.)]);
        let p2 = path(&[(0., 0.), (1., 0.), (2., -1.), (3., 0.), (4., 0.)]);
        let all = find_bifurcations(&p1, &p2);
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].location(), Some(Point2::new(1., 0.)));
        assert_eq!(all[1].location(), Some(Point2::new(3., 0.)));
        assert!(matches!(
            all[1],
            BifurcationResult::Point {
                case: BifurcationCase::EndpointA,
                ..
            }
        ));
    }

    #[test]
    fn prefix_path_is_not_a_bifurcation() {
        let p1 = path(&[(0., 0.), (1., 0.)]);
        let p2 = path(&[(0., 0.), (1., 0.), (2., 0.)]);
        assert_eq!(find_bifurcation(&p1, &p2), BifurcationResult::NotFound);
        let apart = path(&[(0., 5.), (1., 5.)]);
        assert_eq!(find_bifurcation(&p1, &apart), BifurcationResult::NotFound);
    }

    #[test]
    fn mod_two_pi_arguments() {
        assert!(arguments_equal(PI, -PI));
        assert!(!arguments_equal(0.0, 1e-6));
    }

    #[test]
    fn reference_errors() {
        let seg = [CurvePiece::Segment {
            a: Point2::new(0., 0.),
            b: Point2::new(10., 0.),
        }];
        assert_eq!(
            path_to_reference_error(&path(&[(1., 0.), (2., 0.)]), &seg).unwrap(),
            0.0
        );
        assert_eq!(path_to_reference_error(&path(&[(1., 1.)]), &seg).unwrap(), 1.0);
        let e = path_to_reference_error(&path(&[(1., 0.3), (2., -0.4)]), &seg).unwrap();
        assert!((e - 0.7).abs() < 1e-15);
        let arc = CurvePiece::Arc {
            center: Point2::ORIGIN,
            radius: 1.0,
            start: 0.0,
            end: PI / 2.0,
        };
        assert!((arc.distance(Point2::new(0., 2.)) - 1.0).abs() < 1e-15);
        assert!((arc.distance(Point2::new(0., -1.)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sector_error_basics() {
        let (l, r) = (3.0, 1.5);
        let on = path(&[(0.5, 0.), (3., 0.), (3. + 1.5, 1.5), (3. + 1.5, -1.5)]);
        assert!(sector_arc_error(&on, l, r).unwrap() < 1e-15);
        let axis = path(&[(0.5, 0.), (3., 0.)]);
        assert!(matches!(sector_arc_error(&axis, l, r), Err(Error::EmptyArcSet)));
    }

    #[test]
    fn radius_and_medial() {
        let p = path(&[(-1., 0.), (0., 0.), (1., 0.)]);
        assert_eq!(inscribed_radius(std::slice::from_ref(&p)).unwrap(), 0.0);
        let d = Domain::rectangle(-3., 3., -1., 1.).unwrap();
        assert_eq!(medial_axis_fraction(&p, &d, 1e-9).unwrap(), 1.0);
        let hug = path(&[(-1., -0.9), (0., -0.9), (1., -0.9)]);
        assert_eq!(medial_axis_fraction(&hug, &d, 1e-9).unwrap(), 0.0);
        // a point at the corner bisector near (-3,-1) is equidistant from two edges
        assert!(on_medial_axis(&d, Point2::new(-2.5, -0.5), 1e-9));
    }
}
