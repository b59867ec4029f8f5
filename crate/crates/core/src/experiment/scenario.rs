use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::CurvePiece;
use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainLiteral, NamedDomain, Outer, Point2, Rect, Segment};
use crate::graph::{GridAnchor, GridParams, Margins};

pub const SCHEMA_VERSION: u32 = 1;

/// A complete experiment description, as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub domain: DomainSpec,
    pub grid: GridSpec,
    pub metric: MetricConfig,
    #[serde(default)]
    pub queries: Vec<Query>,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Named(NamedDomain),
    Literal(DomainLiteral),
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::Named(n) => n.build(),
            DomainSpec::Literal(l) => Domain::from_literal(l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    pub m: u32,
    #[serde(default)]
    pub anchor: GridAnchor,
    #[serde(default)]
    pub window: WindowSpec,
}

impl GridSpec {
    pub fn new(h: f64, m: u32, window: WindowSpec) -> Self {
        GridSpec {
            h,
            m,
            anchor: GridAnchor::WindowCorner,
            window,
        }
    }

    pub fn with_anchor(mut self, anchor: GridAnchor) -> Self {
        self.anchor = anchor;
        self
    }

    /// Grid parameters with the window resolved against the given query points.
    pub fn params(&self, points: &[Point2]) -> GridParams {
        let p = GridParams::new(self.h, self.m).with_anchor(self.anchor);
        match self.window {
            WindowSpec::Domain => p,
            WindowSpec::Explicit { rect } => p.with_window(rect),
            WindowSpec::Local { margins } => match crate::graph::local_window_of(points, self.h, margins) {
                Some(w) => p.with_window(w),
                None => p,
            },
        }
    }
}

/// How the lattice window is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    /// Bounding box of the domain.
    #[default]
    Domain,
    /// Bounding box of the query points padded by `margins` grid steps.
    Local {
        #[serde(default)]
        margins: Margins,
    },
    Explicit {
        rect: Rect,
    },
}

impl WindowSpec {
    pub fn local(k: u32) -> Self {
        WindowSpec::Local {
            margins: Margins::uniform(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricConfig {
    Quasihyperbolic,
    QuasihyperbolicQuadrature,
    HyperbolicDisk,
    HyperbolicHalfPlane,
    /// Pullback of the half-plane metric; needs a `quadrilateral` domain.
    HyperbolicPullback,
    DistanceRatio,
}

impl MetricConfig {
    pub fn name(self) -> &'static str {
        match self {
            MetricConfig::Quasihyperbolic => "quasihyperbolic",
            MetricConfig::QuasihyperbolicQuadrature => "quasihyperbolic_quadrature",
            MetricConfig::HyperbolicDisk => "hyperbolic_disk",
            MetricConfig::HyperbolicHalfPlane => "hyperbolic_half_plane",
            MetricConfig::HyperbolicPullback => "hyperbolic_pullback",
            MetricConfig::DistanceRatio => "distance_ratio",
        }
    }
}

/// An endpoint: a point of the domain, or a half-plane point pushed forward
/// through the quadrilateral map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Plane(Point2),
    Preimage { preimage: Point2 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub name: String,
    pub from: PointSpec,
    pub to: PointSpec,
    /// Edges crossing any of these segments are ignored for this query.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub barriers: Vec<Segment>,
    /// Queries with different groups never share a graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig>,
}

impl Query {
    pub fn new(name: impl Into<String>, from: Point2, to: Point2) -> Self {
        Query {
            name: name.into(),
            from: PointSpec::Plane(from),
            to: PointSpec::Plane(to),
            barriers: Vec::new(),
            group: None,
            grid: None,
            metric: None,
        }
    }

    pub fn group(mut self, g: impl Into<String>) -> Self {
        self.group = Some(g.into());
        self
    }

    pub fn grid(mut self, g: GridSpec) -> Self {
        self.grid = Some(g);
        self
    }

    pub fn metric(mut self, m: MetricConfig) -> Self {
        self.metric = Some(m);
        self
    }

    pub fn barriers(mut self, b: Vec<Segment>) -> Self {
        self.barriers = b;
        self
    }
}

fn default_tau() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    /// Bifurcation points of two paths; only the first unless `all`.
    Bifurcation {
        first: String,
        second: String,
        #[serde(default)]
        all: bool,
    },
    SectorArcError {
        query: String,
        l: f64,
        r: f64,
    },
    InscribedRadius {
        queries: Vec<String>,
    },
    MedialAxisFraction {
        query: String,
        #[serde(default = "default_tau")]
        tau: f64,
    },
    ReferenceError {
        query: String,
        reference: Vec<CurvePiece>,
    },
    /// Closed-form distance of the endpoints, for metrics that have one.
    ExactDistance {
        query: String,
    },
    Ratio {
        numerator: String,
        denominator: String,
    },
    /// Winding number about a hole of the loop formed by the path and the
    /// straight chord back to its start.
    HoleWinding {
        query: String,
        hole: usize,
    },
}

impl Analysis {
    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Bifurcation { .. } => "bifurcation",
            Analysis::SectorArcError { .. } => "sector_arc_error",
            Analysis::InscribedRadius { .. } => "inscribed_radius",
            Analysis::MedialAxisFraction { .. } => "medial_axis_fraction",
            Analysis::ReferenceError { .. } => "reference_error",
            Analysis::ExactDistance { .. } => "exact_distance",
            Analysis::Ratio { .. } => "ratio",
            Analysis::HoleWinding { .. } => "hole_winding",
        }
    }

    /// Referenced query names; the first is the row the result is attached to.
    pub fn queries(&self) -> Vec<&str> {
        match self {
            Analysis::Bifurcation { first, second, .. } => vec![first, second],
            Analysis::Ratio { numerator, denominator } => vec![numerator, denominator],
            Analysis::InscribedRadius { queries } => queries.iter().map(String::as_str).collect(),
            Analysis::SectorArcError { query, .. }
            | Analysis::MedialAxisFraction { query, .. }
            | Analysis::ReferenceError { query, .. }
            | Analysis::ExactDistance { query }
            | Analysis::HoleWinding { query, .. } => vec![query],
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "yes")]
    pub summary: bool,
    #[serde(default = "yes")]
    pub paths: bool,
    #[serde(default = "yes")]
    pub svg: bool,
    #[serde(default = "yes")]
    pub report: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            summary: true,
            paths: true,
            svg: true,
            report: true,
        }
    }
}

pub(crate) fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment as S;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            S::Seq { index } => out.push_str(&format!("/{index}")),
            S::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            S::Enum { variant } => out.push_str(&format!("/{variant}")),
            S::Unknown => {}
        }
    }
    out
}

impl Scenario {
    /// Parses and validates a scenario; errors carry a JSON pointer.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::scenario(pointer_of(e.path()), e.inner().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the compact serialized form.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("scenario serializes");
        Sha256::digest(canon.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn query_index(&self, name: &str) -> Option<usize> {
        self.queries.iter().position(|q| q.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::scenario(
                "/schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(Error::scenario("/name", "must not be empty"));
        }
        let domain = self
            .domain
            .build()
            .map_err(|e| Error::scenario("/domain", e.to_string()))?;
        let quadrilateral = matches!(self.domain, DomainSpec::Named(NamedDomain::Quadrilateral { .. }));
        validate_grid(&self.grid, &domain, "/grid")?;
        validate_metric(self.metric, &domain, quadrilateral, "/metric")?;

        let mut names = HashSet::new();
        for (i, q) in self.queries.iter().enumerate() {
            let at = format!("/queries/{i}");
            if q.name.trim().is_empty() {
                return Err(Error::scenario(format!("{at}/name"), "must not be empty"));
            }
            if !names.insert(q.name.as_str()) {
                return Err(Error::scenario(
                    format!("{at}/name"),
                    format!("duplicate query name `{}`", q.name),
                ));
            }
            for (field, p) in [("from", &q.from), ("to", &q.to)] {
                validate_point(p, &domain, quadrilateral, &format!("{at}/{field}"))?;
            }
            for (k, b) in q.barriers.iter().enumerate() {
                if !(b.a.is_finite() && b.b.is_finite()) {
                    return Err(Error::scenario(
                        format!("{at}/barriers/{k}"),
                        "coordinates must be finite",
                    ));
                }
            }
            if let Some(g) = &q.grid {
                validate_grid(g, &domain, &format!("{at}/grid"))?;
            }
            if let Some(m) = q.metric {
                validate_metric(m, &domain, quadrilateral, &format!("{at}/metric"))?;
            }
        }

        for (i, a) in self.analyses.iter().enumerate() {
            let at = format!("/analyses/{i}");
            let field = |f: &str| format!("{at}/{f}");
            let known = |name: &str, f: &str| -> Result<()> {
                if names.contains(name) {
                    Ok(())
                } else {
                    Err(Error::scenario(field(f), format!("unknown query `{name}`")))
                }
            };
            match a {
                Analysis::Bifurcation { first, second, .. } => {
                    known(first, "first")?;
                    known(second, "second")?;
                }
                Analysis::SectorArcError { query, l, r } => {
                    known(query, "query")?;
                    if !(*l > 0.0 && l.is_finite()) {
                        return Err(Error::scenario(field("l"), "must be positive"));
                    }
                    if !(*r > 0.0 && r.is_finite()) {
                        return Err(Error::scenario(field("r"), "must be positive"));
                    }
                }
                Analysis::InscribedRadius { queries } => {
                    if queries.is_empty() {
                        return Err(Error::scenario(field("queries"), "must name at least one query"));
                    }
                    for (k, q) in queries.iter().enumerate() {
                        known(q, &format!("queries/{k}"))?;
                    }
                }
                Analysis::MedialAxisFraction { query, tau } => {
                    known(query, "query")?;
                    if !(*tau > 0.0 && tau.is_finite()) {
                        return Err(Error::scenario(field("tau"), "must be positive"));
                    }
                }
                Analysis::ReferenceError { query, reference } => {
                    known(query, "query")?;
                    if reference.is_empty() {
                        return Err(Error::scenario(field("reference"), "must not be empty"));
                    }
                }
                Analysis::ExactDistance { query } => {
                    known(query, "query")?;
                    let q = &self.queries[self.query_index(query).expect("known")];
                    match q.metric.unwrap_or(self.metric) {
                        MetricConfig::HyperbolicDisk
                        | MetricConfig::HyperbolicHalfPlane
                        | MetricConfig::HyperbolicPullback
                        | MetricConfig::DistanceRatio => {}
                        m => {
                            return Err(Error::scenario(
                                field("query"),
                                format!("metric {} has no closed form", m.name()),
                            ))
                        }
                    }
                }
                Analysis::Ratio { numerator, denominator } => {
                    known(numerator, "numerator")?;
                    known(denominator, "denominator")?;
                }
                Analysis::HoleWinding { query, hole } => {
                    known(query, "query")?;
                    if *hole >= domain.holes().len() {
                        return Err(Error::scenario(
                            field("hole"),
                            format!("domain has {} holes", domain.holes().len()),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_grid(g: &GridSpec, domain: &Domain, at: &str) -> Result<()> {
    if !(g.h > 0.0 && g.h.is_finite()) {
        return Err(Error::scenario(
            format!("{at}/h"),
            format!("must be positive, got {}", g.h),
        ));
    }
    if g.m == 0 {
        return Err(Error::scenario(format!("{at}/m"), "must be at least 1"));
    }
    match g.window {
        WindowSpec::Domain if domain.bounding_box().is_none() => Err(Error::scenario(
            format!("{at}/window"),
            "an unbounded domain needs a local or explicit window",
        )),
        WindowSpec::Explicit { rect } if !rect.is_valid() => {
            Err(Error::scenario(format!("{at}/window/rect"), "invalid rectangle"))
        }
        _ => Ok(()),
    }
}

fn validate_metric(m: MetricConfig, domain: &Domain, quadrilateral: bool, at: &str) -> Result<()> {
    let plain = domain.holes().is_empty() && domain.slits().is_empty() && domain.punctures().is_empty();
    let ok = match m {
        MetricConfig::HyperbolicDisk => {
            plain && matches!(domain.outer(), Outer::Circle(c) if c.center == Point2::ORIGIN && c.radius == 1.0)
        }
        MetricConfig::HyperbolicHalfPlane => plain && matches!(domain.outer(), Outer::UpperHalfPlane),
        MetricConfig::HyperbolicPullback => quadrilateral,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::scenario(
            at,
            format!("metric {} does not apply to this domain", m.name()),
        ))
    }
}

fn validate_point(p: &PointSpec, domain: &Domain, quadrilateral: bool, at: &str) -> Result<()> {
    match *p {
        PointSpec::Plane(q) => {
            if !q.is_finite() || !domain.contains(q) {
                return Err(Error::scenario(
                    at,
                    format!("point ({}, {}) is not inside the domain", q.x, q.y),
                ));
            }
        }
        PointSpec::Preimage { preimage } => {
            if !quadrilateral {
                return Err(Error::scenario(at, "preimage points need a quadrilateral domain"));
            }
            if !(preimage.is_finite() && preimage.y > 0.0) {
                return Err(Error::scenario(at, "preimage must lie in the upper half-plane"));
            }
        }
    }
    Ok(())
}
