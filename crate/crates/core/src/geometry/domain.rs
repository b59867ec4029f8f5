use serde::{Deserialize, Serialize};

use super::{closest_point_on_segment, orient, point_segment_distance, segments_intersect, Point2, Rect, Segment};
use crate::error::{Error, Result};

/// Snap distance below which a segment is considered to pass through a puncture.
pub(crate) const PUNCTURE_SNAP: f64 = 1e-12;

/// A simple closed polygon. Orientation is normalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Builds a simple polygon oriented counterclockwise.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        Self::with_orientation(vertices, true)
    }

    /// Builds a simple polygon oriented counterclockwise (`ccw = true`) or clockwise.
    pub fn with_orientation(mut vertices: Vec<Point2>, ccw: bool) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDomain(format!("non-finite polygon vertex {p:?}")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidDomain(format!(
                    "consecutive polygon vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        let poly = Polygon { vertices };
        poly.check_simple()?;
        let mut poly = poly;
        if (poly.signed_area() > 0.0) != ccw {
            poly.vertices.reverse();
        }
        Ok(poly)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            for j in (i + 1)..n {
                let (c, d) = self.edge(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // shared vertex only; reject a fold-back onto the previous edge
                    let shared = if j == i + 1 { b } else { a };
                    let (u, v) = if j == i + 1 { (a, d) } else { (c, b) };
                    if orient(u, shared, v) == 0.0 && (u - shared).dot(v - shared) > 0.0 {
                        return Err(Error::InvalidDomain(format!("polygon edges {i} and {j} overlap")));
                    }
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidDomain(format!(
                        "polygon is not simple: edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1 (mod n)`.
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// Crossing-number test. Points on the boundary may go either way.
    pub fn winds_around(&self, p: Point2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> Rect {
        Rect::bounding(self.vertices.iter().copied()).expect("polygon has vertices")
    }

    fn segment_meets_boundary(&self, a: Point2, b: Point2) -> bool {
        self.edges().any(|(c, d)| segments_intersect(a, b, c, d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidDomain(format!("invalid circle radius {radius}")));
        }
        Ok(Circle { center, radius })
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        (self.radius - p.dist(self.center)).abs()
    }

    fn segment_meets(&self, a: Point2, b: Point2) -> bool {
        let near = point_segment_distance(self.center, a, b);
        let far = a.dist(self.center).max(b.dist(self.center));
        near <= self.radius && self.radius <= far
    }
}

/// The outer boundary of a domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Outer {
    Polygon(Polygon),
    Circle(Circle),
    /// `{ y > 0 }`, bounded by the real axis.
    UpperHalfPlane,
}

/// Boundary primitives as they appear in domain literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryPrimitive {
    PolygonLoop {
        vertices: Vec<Point2>,
        /// Orientation of the input list; informational, orientation is normalized.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ccw: Option<bool>,
    },
    Circle {
        center: Point2,
        radius: f64,
    },
    SlitSegment {
        a: Point2,
        b: Point2,
    },
    Puncture {
        point: Point2,
    },
    UpperHalfPlane,
}

/// Serializable description of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainLiteral {
    pub outer: BoundaryPrimitive,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<BoundaryPrimitive>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slits: Vec<BoundaryPrimitive>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub punctures: Vec<BoundaryPrimitive>,
}

/// One indivisible piece of `∂G`, used by the medial-axis test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPiece {
    Edge(Segment),
    Circle(Circle),
    RealAxis,
    Point(Point2),
}

impl BoundaryPiece {
    pub fn closest_point(&self, p: Point2) -> Point2 {
        match *self {
            BoundaryPiece::Edge(s) => closest_point_on_segment(p, s.a, s.b),
            BoundaryPiece::Circle(c) => {
                let v = p - c.center;
                let n = v.norm();
                if n == 0.0 {
                    c.center + Point2::new(c.radius, 0.0)
                } else {
                    c.center + v * (c.radius / n)
                }
            }
            BoundaryPiece::RealAxis => Point2::new(p.x, 0.0),
            BoundaryPiece::Point(q) => q,
        }
    }

    pub fn distance(&self, p: Point2) -> f64 {
        match *self {
            BoundaryPiece::Circle(c) => c.boundary_distance(p),
            BoundaryPiece::RealAxis => p.y.abs(),
            _ => p.dist(self.closest_point(p)),
        }
    }
}

/// A planar domain: an outer region minus polygonal holes, slits and punctures.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    outer: Outer,
    holes: Vec<Polygon>,
    slits: Vec<Segment>,
    punctures: Vec<Point2>,
}

impl Domain {
    pub fn new(outer: Outer, holes: Vec<Polygon>, slits: Vec<Segment>, punctures: Vec<Point2>) -> Result<Self> {
        let outer = match outer {
            Outer::Polygon(p) if !p.is_ccw() => Outer::Polygon(Polygon::with_orientation(p.vertices, true)?),
            o => o,
        };
        let holes = holes
            .into_iter()
            .map(|h| Polygon::with_orientation(h.vertices, false))
            .collect::<Result<Vec<_>>>()?;
        let d = Domain {
            outer,
            holes,
            slits,
            punctures,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        Domain::new(Outer::Polygon(Polygon::new(vertices)?), vec![], vec![], vec![])
    }

    pub fn disk(center: Point2, radius: f64) -> Result<Self> {
        Domain::new(Outer::Circle(Circle::new(center, radius)?), vec![], vec![], vec![])
    }

    pub fn unit_disk() -> Self {
        Domain::disk(Point2::ORIGIN, 1.0).expect("unit disk is valid")
    }

    pub fn upper_half_plane() -> Self {
        Domain::new(Outer::UpperHalfPlane, vec![], vec![], vec![]).expect("half-plane is valid")
    }

    /// Open rectangle `(x_min, x_max) × (y_min, y_max)`.
    pub fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) {
            return Err(Error::InvalidDomain("empty rectangle".into()));
        }
        Domain::polygon(rect_loop(x_min, x_max, y_min, y_max))
    }

    fn validate(&self) -> Result<()> {
        for (i, s) in self.slits.iter().enumerate() {
            if s.a == s.b || !s.a.is_finite() || !s.b.is_finite() {
                return Err(Error::InvalidDomain(format!("slit {i} is degenerate")));
            }
        }
        for (i, h) in self.holes.iter().enumerate() {
            if !h.vertices().iter().all(|&v| self.strictly_inside_outer(v)) {
                return Err(Error::InvalidDomain(format!(
                    "hole {i} is not inside the outer boundary"
                )));
            }
            let crosses = match &self.outer {
                Outer::Polygon(p) => h.edges().any(|(a, b)| p.segment_meets_boundary(a, b)),
                Outer::Circle(c) => h.edges().any(|(a, b)| c.segment_meets(a, b)),
                Outer::UpperHalfPlane => false,
            };
            if crosses {
                return Err(Error::InvalidDomain(format!("hole {i} crosses the outer boundary")));
            }
            for (j, g) in self.holes.iter().enumerate().skip(i + 1) {
                let overlap = h.edges().any(|(a, b)| g.segment_meets_boundary(a, b))
                    || g.winds_around(h.vertices()[0])
                    || h.winds_around(g.vertices()[0]);
                if overlap {
                    return Err(Error::InvalidDomain(format!("holes {i} and {j} overlap")));
                }
            }
        }
        let in_closure = |p: Point2| self.strictly_inside_outer(p) || self.outer_distance(p) <= 1e-12;
        let in_hole = |p: Point2| {
            self.holes
                .iter()
                .any(|h| h.winds_around(p) && h.boundary_distance(p) > 0.0)
        };
        for (i, s) in self.slits.iter().enumerate() {
            if !(in_closure(s.a) && in_closure(s.b)) || in_hole(s.a) || in_hole(s.b) {
                return Err(Error::InvalidDomain(format!("slit {i} lies outside the domain")));
            }
        }
        for (i, &p) in self.punctures.iter().enumerate() {
            if !p.is_finite() || !self.strictly_inside_outer(p) || in_hole(p) {
                return Err(Error::InvalidDomain(format!("puncture {i} lies outside the domain")));
            }
        }
        Ok(())
    }

    pub fn outer(&self) -> &Outer {
        &self.outer
    }

    pub fn holes(&self) -> &[Polygon] {
        &self.holes
    }

    pub fn slits(&self) -> &[Segment] {
        &self.slits
    }

    pub fn punctures(&self) -> &[Point2] {
        &self.punctures
    }

    fn strictly_inside_outer(&self, p: Point2) -> bool {
        match &self.outer {
            Outer::Polygon(poly) => poly.winds_around(p) && poly.boundary_distance(p) > 0.0,
            Outer::Circle(c) => p.dist(c.center) < c.radius,
            Outer::UpperHalfPlane => p.y > 0.0,
        }
    }

    fn outer_distance(&self, p: Point2) -> f64 {
        match &self.outer {
            Outer::Polygon(poly) => poly.boundary_distance(p),
            Outer::Circle(c) => c.boundary_distance(p),
            Outer::UpperHalfPlane => p.y.abs(),
        }
    }

    /// Euclidean distance from `p` to the boundary set `∂G`.
    pub fn dist_to_boundary(&self, p: Point2) -> f64 {
        let mut d = self.outer_distance(p);
        for h in &self.holes {
            d = d.min(h.boundary_distance(p));
        }
        for s in &self.slits {
            d = d.min(s.distance(p));
        }
        for &q in &self.punctures {
            d = d.min(p.dist(q));
        }
        d
    }

    /// Strict membership: inside the outer boundary, outside every hole, off every slit and puncture.
    pub fn contains(&self, p: Point2) -> bool {
        if !p.is_finite() || !self.strictly_inside_outer(p) {
            return false;
        }
        if self.holes.iter().any(|h| h.winds_around(p)) {
            return false;
        }
        self.dist_to_boundary(p) > 0.0
    }

    /// Whether the segment `[a, b]` misses every boundary primitive.
    pub fn segment_clear(&self, a: Point2, b: Point2) -> bool {
        let outer_hit = match &self.outer {
            Outer::Polygon(poly) => poly.segment_meets_boundary(a, b),
            Outer::Circle(c) => c.segment_meets(a, b),
            Outer::UpperHalfPlane => a.y <= 0.0 || b.y <= 0.0,
        };
        if outer_hit {
            return false;
        }
        if self.holes.iter().any(|h| h.segment_meets_boundary(a, b)) {
            return false;
        }
        if self.slits.iter().any(|s| segments_intersect(a, b, s.a, s.b)) {
            return false;
        }
        !self
            .punctures
            .iter()
            .any(|&q| point_segment_distance(q, a, b) <= PUNCTURE_SNAP)
    }

    /// Bounding box of the closure; `None` for unbounded domains.
    pub fn bounding_box(&self) -> Option<Rect> {
        match &self.outer {
            Outer::Polygon(p) => Some(p.bounding_box()),
            Outer::Circle(c) => Some(Rect::new(
                c.center.x - c.radius,
                c.center.x + c.radius,
                c.center.y - c.radius,
                c.center.y + c.radius,
            )),
            Outer::UpperHalfPlane => None,
        }
    }

    /// Every indivisible boundary piece: each polygon edge separately, circles, slits, punctures.
    pub fn boundary_pieces(&self) -> Vec<BoundaryPiece> {
        let mut out = Vec::new();
        match &self.outer {
            Outer::Polygon(p) => out.extend(p.edges().map(|(a, b)| BoundaryPiece::Edge(Segment::new(a, b)))),
            Outer::Circle(c) => out.push(BoundaryPiece::Circle(*c)),
            Outer::UpperHalfPlane => out.push(BoundaryPiece::RealAxis),
        }
        for h in &self.holes {
            out.extend(h.edges().map(|(a, b)| BoundaryPiece::Edge(Segment::new(a, b))));
        }
        out.extend(self.slits.iter().map(|&s| BoundaryPiece::Edge(s)));
        out.extend(self.punctures.iter().map(|&p| BoundaryPiece::Point(p)));
        out
    }

    pub fn to_literal(&self) -> DomainLiteral {
        let poly_lit = |p: &Polygon| BoundaryPrimitive::PolygonLoop {
            vertices: p.vertices().to_vec(),
            ccw: Some(p.is_ccw()),
        };
        DomainLiteral {
            outer: match &self.outer {
                Outer::Polygon(p) => poly_lit(p),
                Outer::Circle(c) => BoundaryPrimitive::Circle {
                    center: c.center,
                    radius: c.radius,
                },
                Outer::UpperHalfPlane => BoundaryPrimitive::UpperHalfPlane,
            },
            holes: self.holes.iter().map(poly_lit).collect(),
            slits: self
                .slits
                .iter()
                .map(|s| BoundaryPrimitive::SlitSegment { a: s.a, b: s.b })
                .collect(),
            punctures: self
                .punctures
                .iter()
                .map(|&point| BoundaryPrimitive::Puncture { point })
                .collect(),
        }
    }

    pub fn from_literal(lit: &DomainLiteral) -> Result<Self> {
        let outer = match &lit.outer {
            BoundaryPrimitive::PolygonLoop { vertices, .. } => Outer::Polygon(Polygon::new(vertices.clone())?),
            BoundaryPrimitive::Circle { center, radius } => Outer::Circle(Circle::new(*center, *radius)?),
            BoundaryPrimitive::UpperHalfPlane => Outer::UpperHalfPlane,
            other => {
                return Err(Error::InvalidDomain(format!(
                    "outer boundary must be a polygon, circle or half-plane, got {other:?}"
                )))
            }
        };
        let holes = lit
            .holes
            .iter()
            .map(|h| match h {
                BoundaryPrimitive::PolygonLoop { vertices, .. } => Polygon::with_orientation(vertices.clone(), false),
                other => Err(Error::InvalidDomain(format!("hole must be a polygon, got {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let slits = lit
            .slits
            .iter()
            .map(|s| match s {
                BoundaryPrimitive::SlitSegment { a, b } => Ok(Segment::new(*a, *b)),
                other => Err(Error::InvalidDomain(format!("expected a slit, got {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let punctures = lit
            .punctures
            .iter()
            .map(|s| match s {
                BoundaryPrimitive::Puncture { point } => Ok(*point),
                other => Err(Error::InvalidDomain(format!("expected a puncture, got {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Domain::new(outer, holes, slits, punctures)
    }
}

pub(crate) fn rect_loop(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Vec<Point2> {
    vec![
        Point2::new(x_min, y_min),
        Point2::new(x_max, y_min),
        Point2::new(x_max, y_max),
        Point2::new(x_min, y_max),
    ]
}
