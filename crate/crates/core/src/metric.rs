//! Closed-form metrics and the edge-weight rules used to build grid graphs.

use std::sync::Arc;

use crate::conformal::QuadrilateralMap;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Outer, Point2};

/// The weight rule attached to graph edges.
#[derive(Clone, Debug)]
pub enum MetricSpec {
    /// `|a-b| / min(d(a), d(b))`.
    Quasihyperbolic,
    /// Exact hyperbolic distance of the unit disk.
    HyperbolicDisk,
    /// Exact hyperbolic distance of the upper half-plane.
    HyperbolicHalfPlane,
    /// `|a-b|` times the mean of `1/d` along the segment, by 8-point Gauss–Legendre.
    QuasihyperbolicQuadrature,
    /// Half-plane hyperbolic distance of the preimages under a quadrilateral map.
    HyperbolicPullback(Arc<QuadrilateralMap>),
    /// The distance-ratio metric `j`.
    DistanceRatio,
}

impl MetricSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpec::Quasihyperbolic => "quasihyperbolic",
            MetricSpec::QuasihyperbolicQuadrature => "quasihyperbolic_quadrature",
            MetricSpec::HyperbolicDisk => "hyperbolic_disk",
            MetricSpec::HyperbolicHalfPlane => "hyperbolic_half_plane",
            MetricSpec::HyperbolicPullback(_) => "hyperbolic_pullback",
            MetricSpec::DistanceRatio => "distance_ratio",
        }
    }

    /// Checks that the metric makes sense on `d`.
    pub fn check_domain(&self, d: &Domain) -> Result<()> {
        let plain = d.holes().is_empty() && d.slits().is_empty() && d.punctures().is_empty();
        match self {
            MetricSpec::HyperbolicDisk => {
                let unit = matches!(d.outer(), Outer::Circle(c) if c.center == Point2::ORIGIN && c.radius == 1.0);
                if !(unit && plain) {
                    return Err(Error::param("metric", "hyperbolic_disk requires the unit disk"));
                }
            }
            MetricSpec::HyperbolicHalfPlane => {
                if !(matches!(d.outer(), Outer::UpperHalfPlane) && plain) {
                    return Err(Error::param(
                        "metric",
                        "hyperbolic_half_plane requires the upper half-plane",
                    ));
                }
            }
            MetricSpec::HyperbolicPullback(_) => {
                if !matches!(d.outer(), Outer::Polygon(_)) {
                    return Err(Error::param(
                        "metric",
                        "hyperbolic_pullback requires a polygonal quadrilateral domain",
                    ));
                }
            }
            MetricSpec::Quasihyperbolic | MetricSpec::QuasihyperbolicQuadrature | MetricSpec::DistanceRatio => {}
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn nearly_coincident(a: Point2, b: Point2, dist: f64) -> bool {
    dist < 1e-15 * 1f64.max(a.norm()).max(b.norm())
}

/// Hyperbolic distance in the unit disk.
pub fn rho_disk(a: Point2, b: Point2) -> Result<f64> {
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    for (p, n) in [(a, na), (b, nb)] {
        if !(n < 1.0) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
    }
    let dist = a.dist(b);
    if nearly_coincident(a, b, dist) {
        return Ok(0.0);
    }
    Ok(2.0 * (dist / ((1.0 - na) * (1.0 - nb)).sqrt()).asinh())
}

/// Hyperbolic distance in the upper half-plane.
///
/// Uses `2·asinh(|a-b| / (2√(a.y·b.y)))`, which equals the usual arcosh form
/// without losing precision for close points.
pub fn rho_halfplane(a: Point2, b: Point2) -> Result<f64> {
    for p in [a, b] {
        if !(p.y > 0.0) || !p.is_finite() {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
    }
    let dist = a.dist(b);
    if nearly_coincident(a, b, dist) {
        return Ok(0.0);
    }
    Ok(2.0 * (dist / (2.0 * (a.y * b.y).sqrt())).asinh())
}

/// Distance-ratio metric `log(1 + |a-b| / min(d(a), d(b)))`.
pub fn j_metric(d: &Domain, a: Point2, b: Point2) -> Result<f64> {
    let (da, db) = (boundary_distance_checked(d, a)?, boundary_distance_checked(d, b)?);
    Ok(j_from_distances(a, b, da, db))
}

fn boundary_distance_checked(d: &Domain, p: Point2) -> Result<f64> {
    if !d.contains(p) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    Ok(d.dist_to_boundary(p))
}

#[inline]
pub(crate) fn qh_from_distances(a: Point2, b: Point2, da: f64, db: f64) -> f64 {
    let dist = a.dist(b);
    if nearly_coincident(a, b, dist) {
        return 0.0;
    }
    dist / da.min(db)
}

#[inline]
pub(crate) fn j_from_distances(a: Point2, b: Point2, da: f64, db: f64) -> f64 {
    let dist = a.dist(b);
    if nearly_coincident(a, b, dist) {
        return 0.0;
    }
    (dist / da.min(db)).ln_1p()
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫ ds / d(s)` over `[a, b]` with the 8-point Gauss–Legendre rule.
pub(crate) fn qh_quadrature(d: &Domain, a: Point2, b: Point2) -> f64 {
    let dist = a.dist(b);
    if nearly_coincident(a, b, dist) {
        return 0.0;
    }
    // evaluate in a canonical direction so that the weight is exactly symmetric
    let (a, b) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        acc += w * (1.0 / d.dist_to_boundary(mid - half * *x) + 1.0 / d.dist_to_boundary(mid + half * *x));
    }
    dist * 0.5 * acc
}

/// Weight of the straight edge `[a, b]` under `spec`.
pub fn edge_weight(spec: &MetricSpec, d: &Domain, a: Point2, b: Point2) -> Result<f64> {
    match spec {
        MetricSpec::Quasihyperbolic => {
            let (da, db) = (boundary_distance_checked(d, a)?, boundary_distance_checked(d, b)?);
            Ok(qh_from_distances(a, b, da, db))
        }
        MetricSpec::QuasihyperbolicQuadrature => {
            boundary_distance_checked(d, a)?;
            boundary_distance_checked(d, b)?;
            Ok(qh_quadrature(d, a, b))
        }
        MetricSpec::HyperbolicDisk => rho_disk(a, b),
        MetricSpec::HyperbolicHalfPlane => rho_halfplane(a, b),
        MetricSpec::HyperbolicPullback(map) => map.pullback_weight(a, b),
        MetricSpec::DistanceRatio => j_metric(d, a, b),
    }
}

/// Sum of edge weights along `pts`, validating membership and segment clearance.
pub fn polyline_weighted_length(spec: &MetricSpec, d: &Domain, pts: &[Point2]) -> Result<f64> {
    for p in pts {
        if !d.contains(*p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
    }
    for (index, w) in pts.windows(2).enumerate() {
        if !d.segment_clear(w[0], w[1]) {
            return Err(Error::SegmentNotClear { index });
        }
    }
    polyline_weighted_length_trusted(spec, d, pts)
}

/// Like [`polyline_weighted_length`] but skips the clearance checks.
pub fn polyline_weighted_length_trusted(spec: &MetricSpec, d: &Domain, pts: &[Point2]) -> Result<f64> {
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += edge_weight(spec, d, w[0], w[1])?;
    }
    Ok(total)
}

/// Samples the hyperbolic geodesic of the upper half-plane from `a` to `b`
/// with Euclidean spacing at most `step`. Endpoints are returned exactly.
pub fn halfplane_geodesic_points(a: Point2, b: Point2, step: f64) -> Result<Vec<Point2>> {
    for p in [a, b] {
        if !(p.y > 0.0) || !p.is_finite() {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
    }
    if !(step > 0.0) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    if a == b {
        return Ok(vec![a]);
    }
    let scale = a.norm().max(b.norm()).max(1.0);
    let mut out = Vec::new();
    if (a.x - b.x).abs() <= 1e-14 * scale {
        let n = (a.dist(b) / step).ceil().max(1.0) as usize;
        out.push(a);
        for k in 1..n {
            let t = k as f64 / n as f64;
            out.push(Point2::new(a.x, a.y + (b.y - a.y) * t));
        }
        out.push(b);
        return Ok(out);
    }
    let x0 = (a.norm_sq() - b.norm_sq()) / (2.0 * (a.x - b.x));
    let center = Point2::new(x0, 0.0);
    let radius = a.dist(center);
    let ta = (a - center).arg();
    let tb = (b - center).arg();
    let n = (radius * (tb - ta).abs() / step).ceil().max(1.0) as usize;
    out.push(a);
    for k in 1..n {
        let t = ta + (tb - ta) * (k as f64 / n as f64);
        out.push(center + Point2::polar(radius, t));
    }
    out.push(b);
    Ok(out)
}
