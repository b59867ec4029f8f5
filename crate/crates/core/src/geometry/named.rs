use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::domain::rect_loop;
use super::{Domain, Outer, Point2, Polygon, Segment};
use crate::conformal::{QuadParams, QuadrilateralMap};
use crate::error::{Error, Result};

fn default_side_length() -> f64 {
    1e4
}

/// Domains of the reference experiments, selected by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum NamedDomain {
    UnitDisk,
    UpperHalfPlane,
    /// `(-1, (n-2)√3 + 1) × (-1, 1)` minus punctures `k√3` and vertical slits between them.
    PuncturedStrip {
        n: usize,
    },
    /// Triangle `0, L·e^{-iφ/2}, L·e^{iφ/2}` approximating an infinite sector of opening `φ`.
    Sector {
        phi: f64,
        #[serde(default = "default_side_length")]
        side_length: f64,
    },
    /// Non-convex L-shaped octagon.
    Octagon,
    /// `(-3, 3) × (-1, 1)`.
    Rectangle,
    Asterisk {
        n: usize,
        l1: f64,
        l2: f64,
        l3: f64,
    },
    /// `(0, 15) × (0, 8)` minus the closed obstacle `[3, 6] × [1, 5]`.
    ObstacleRectangle,
    /// Image of the upper half-plane under the hypergeometric quadrilateral map.
    Quadrilateral {
        a: f64,
        b: f64,
        c: f64,
        r: f64,
    },
}

impl NamedDomain {
    pub fn build(&self) -> Result<Domain> {
        build_named_domain(self)
    }
}

pub fn build_named_domain(spec: &NamedDomain) -> Result<Domain> {
    match *spec {
        NamedDomain::UnitDisk => Ok(Domain::unit_disk()),
        NamedDomain::UpperHalfPlane => Ok(Domain::upper_half_plane()),
        NamedDomain::PuncturedStrip { n } => punctured_strip(n),
        NamedDomain::Sector { phi, side_length } => SectorGeometry::new(phi, 0.0, side_length)?.domain(),
        NamedDomain::Octagon => Domain::polygon(
            [
                (-4., 1.),
                (-1., 1.),
                (-1., 4.),
                (4., 4.),
                (4., -4.),
                (-1., -4.),
                (-1., -1.),
                (-4., -1.),
            ]
            .iter()
            .map(|&(x, y)| Point2::new(x, y))
            .collect(),
        ),
        NamedDomain::Rectangle => Domain::rectangle(-3., 3., -1., 1.),
        NamedDomain::Asterisk { n, l1, l2, l3 } => AsteriskGeometry::new(n, l1, l2, l3)?.domain(),
        NamedDomain::ObstacleRectangle => Domain::new(
            Outer::Polygon(Polygon::new(rect_loop(0., 15., 0., 8.))?),
            vec![Polygon::new(rect_loop(3., 6., 1., 5.))?],
            vec![],
            vec![],
        ),
        NamedDomain::Quadrilateral { a, b, c, r } => QuadrilateralMap::new(QuadParams { a, b, c, r })?.domain(),
    }
}

fn punctured_strip(n: usize) -> Result<Domain> {
    if n < 2 {
        return Err(Error::param("n", format!("punctured strip needs n >= 2, got {n}")));
    }
    let s3 = 3f64.sqrt();
    let x_max = (n as f64 - 2.0) * s3 + 1.0;
    let outer = Outer::Polygon(Polygon::new(rect_loop(-1., x_max, -1., 1.))?);
    let punctures = (0..=n - 2).map(|k| Point2::new(k as f64 * s3, 0.0)).collect();
    let slits = (0..n.saturating_sub(2))
        .flat_map(|k| {
            let x = k as f64 * s3 + 0.5 * s3;
            [
                Segment::new(Point2::new(x, -1.0), Point2::new(x, -0.5)),
                Segment::new(Point2::new(x, 0.5), Point2::new(x, 1.0)),
            ]
        })
        .collect();
    Domain::new(outer, vec![], slits, punctures)
}

/// Parameters of the `n`-asterisk and its arm points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsteriskGeometry {
    pub n: usize,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    /// `2π/n`.
    pub theta: f64,
    /// `π/n`.
    pub beta: f64,
    /// `π/2 - π/n`; part of the construction but unused by the vertex formulas.
    pub alpha: f64,
    /// Radius of the inner vertices `B_j`.
    pub r: f64,
    /// Radius of the arm-tip vertices `A_j`, `C_j`.
    pub rho: f64,
    pub phi: f64,
}

impl AsteriskGeometry {
    pub fn new(n: usize, l1: f64, l2: f64, l3: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("n", format!("asterisk needs n >= 3, got {n}")));
        }
        for (name, v) in [("l1", l1), ("l2", l2), ("l3", l3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        let theta = 2.0 * PI / n as f64;
        let beta = PI / n as f64;
        let r = l3 / beta.sin();
        let rho = (l1 * l1 + r * r + 2.0 * l1 * r * beta.cos()).sqrt();
        let phi = (l3 / (r * beta.cos() + l1)).atan();
        Ok(AsteriskGeometry {
            n,
            l1,
            l2,
            l3,
            theta,
            beta,
            alpha: PI / 2.0 - beta,
            r,
            rho,
            phi,
        })
    }

    pub fn a(&self, j: usize) -> Point2 {
        Point2::polar(self.rho, self.phi + j as f64 * self.theta)
    }

    pub fn b(&self, j: usize) -> Point2 {
        Point2::polar(self.r, self.beta + j as f64 * self.theta)
    }

    pub fn c(&self, j: usize) -> Point2 {
        Point2::polar(self.rho, -self.phi + j as f64 * self.theta)
    }

    /// Counterclockwise vertex list `C_1, A_1, B_1, ..., C_n, A_n, B_n`.
    pub fn vertices(&self) -> Vec<Point2> {
        (1..=self.n).flat_map(|j| [self.c(j), self.a(j), self.b(j)]).collect()
    }

    /// Distance of the arm points from the origin: the arm-tip abscissa minus `l2`.
    pub fn point_radius(&self) -> f64 {
        self.r * self.beta.cos() + self.l1 - self.l2
    }

    /// `p_j = |p|·e^{ijθ}` for `j = 1..n`, one per arm.
    pub fn points(&self) -> Vec<Point2> {
        let rad = self.point_radius();
        (1..=self.n)
            .map(|j| Point2::polar(rad, j as f64 * self.theta))
            .collect()
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::polygon(self.vertices())
    }
}

/// The truncated sector with its tangency circle and end points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorGeometry {
    pub phi: f64,
    /// Abscissa of the tangency point on the bisector.
    pub l: f64,
    /// `l·tan(φ/2)`.
    pub r: f64,
    pub side_length: f64,
}

impl SectorGeometry {
    pub fn new(phi: f64, l: f64, side_length: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < PI) {
            return Err(Error::param("phi", format!("must lie in (0, π), got {phi}")));
        }
        if !(side_length > 0.0 && side_length.is_finite()) {
            return Err(Error::param(
                "side_length",
                format!("must be positive, got {side_length}"),
            ));
        }
        if !(l >= 0.0 && l < side_length) {
            return Err(Error::param("l", format!("must lie in [0, side_length), got {l}")));
        }
        Ok(SectorGeometry {
            phi,
            l,
            r: l * (phi / 2.0).tan(),
            side_length,
        })
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::polygon(vec![
            Point2::ORIGIN,
            Point2::polar(self.side_length, -self.phi / 2.0),
            Point2::polar(self.side_length, self.phi / 2.0),
        ])
    }

    /// `θ_j = (j/n)(π + φ)/2`.
    pub fn theta(&self, j: usize, n: usize) -> f64 {
        j as f64 / n as f64 * (PI + self.phi) / 2.0
    }

    /// `z_j = (l - r·i) + r·e^{i(-φ/2 + θ_j)}` on the lower tangency circle.
    pub fn z(&self, j: usize, n: usize) -> Point2 {
        Point2::new(self.l, -self.r) + Point2::polar(self.r, -self.phi / 2.0 + self.theta(j, n))
    }

    /// Mirror image of `z_j` in the bisector.
    pub fn z_star(&self, j: usize, n: usize) -> Point2 {
        self.z(j, n).conj()
    }
}
