//! The reference experiments as ready-made scenarios.

use super::scenario::{
    Analysis, DomainSpec, GridSpec, MetricConfig, OutputSpec, PointSpec, Query, Scenario, WindowSpec, SCHEMA_VERSION,
};
use crate::geometry::{AsteriskGeometry, NamedDomain, Point2, SectorGeometry, Segment};
use crate::graph::GridAnchor;

/// Grid steps added around the query points for local windows.
pub const DEFAULT_MARGIN: u32 = 10;

/// `(h, m)` rows of the unit-disk convergence table.
pub const DISK_ROWS: [(f64, u32); 9] = [
    (0.01, 3),
    (0.01, 6),
    (0.01, 8),
    (0.005, 3),
    (0.005, 6),
    (0.005, 8),
    (0.005, 10),
    (0.0025, 6),
    (0.0025, 8),
];

/// `(h, m)` rows of the octagon bifurcation table.
pub const OCTAGON_ROWS: [(f64, u32); 10] = [
    (0.05, 2),
    (0.05, 4),
    (0.025, 2),
    (0.025, 4),
    (0.025, 8),
    (0.02, 8),
    (0.01, 2),
    (0.01, 4),
    (0.01, 8),
    (0.01, 10),
];

/// Half-plane endpoint pairs of the quadrilateral experiment.
pub const QUADRILATERAL_PAIRS: [((f64, f64), (f64, f64)); 10] = [
    ((-2., 4.), (0., 2.)),
    ((-7., 4.), (4., 2.)),
    ((-6., 6.), (2., 2.)),
    ((-6., 4.), (2., 4.)),
    ((-4., 4.), (2., 3.)),
    ((-2., 4.), (1., 2.)),
    ((-2., 3.), (4., 3.)),
    ((-4., 4.), (2., 5.)),
    ((-7., 4.), (0., 6.)),
    ((-3., 4.), (1., 4.)),
];

/// Quadrilateral map parameters used for the pullback experiment.
pub const QUADRILATERAL_PARAMS: (f64, f64, f64, f64) = (0.4, 0.5, 1.1, 0.5);

pub const SECTOR_L: f64 = 3.0;
pub const SECTOR_N: usize = 9;
/// Offset moving `z_0` off the sector side into the domain.
pub const SECTOR_Z0_OFFSET: f64 = 1e-8;

pub const STRIP_N: usize = 5;

const NAMES: [&str; 15] = [
    "disk_convergence",
    "octagon_bifurcation",
    "punctured_strip",
    "sector_bisector",
    "rectangle_medial",
    "asterisk_n3",
    "asterisk_n4",
    "asterisk_n5",
    "asterisk_n6",
    "asterisk_n7",
    "asterisk_n8",
    "asterisk_n9",
    "route_flip_h0.2",
    "route_flip_h0.1",
    "quadrilateral_pairs",
];

pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

pub fn builtin(name: &str) -> Option<Scenario> {
    Some(match name {
        "disk_convergence" => disk_convergence(),
        "octagon_bifurcation" => octagon_bifurcation(),
        "punctured_strip" => punctured_strip(),
        "sector_bisector" => sector_bisector(),
        "rectangle_medial" => rectangle_medial(),
        "route_flip_h0.2" => route_flip(0.2),
        "route_flip_h0.1" => route_flip(0.1),
        "quadrilateral_pairs" => quadrilateral_pairs(),
        _ => {
            let n: usize = name.strip_prefix("asterisk_n")?.parse().ok()?;
            if !(3..=9).contains(&n) {
                return None;
            }
            asterisk(n)
        }
    })
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn scenario(name: &str, description: &str, domain: NamedDomain, grid: GridSpec, metric: MetricConfig) -> Scenario {
    Scenario {
        schema: SCHEMA_VERSION,
        name: name.into(),
        description: description.into(),
        domain: DomainSpec::Named(domain),
        grid,
        metric,
        queries: Vec::new(),
        analyses: Vec::new(),
        outputs: OutputSpec::default(),
    }
}

fn tag(h: f64, m: u32) -> String {
    format!("{h}_{m}")
}

pub fn disk_convergence() -> Scenario {
    let mut s = scenario(
        "disk_convergence",
        "Unit disk, p1 = 0.9, p2 = 0.495 + 0.495i: quasihyperbolic and hyperbolic lengths over a range of (h, m).",
        NamedDomain::UnitDisk,
        GridSpec::new(0.005, 6, WindowSpec::local(DEFAULT_MARGIN)),
        MetricConfig::QuasihyperbolicQuadrature,
    );
    let (a, b) = (p(0.9, 0.0), p(0.495, 0.495));
    for &(h, m) in &DISK_ROWS {
        let t = tag(h, m);
        let grid = GridSpec::new(h, m, WindowSpec::local(DEFAULT_MARGIN));
        s.queries.push(
            Query::new(format!("rho_{t}"), a, b)
                .grid(grid.clone())
                .metric(MetricConfig::HyperbolicDisk),
        );
        s.queries.push(
            Query::new(format!("k_{t}"), a, b)
                .grid(grid)
                .metric(MetricConfig::QuasihyperbolicQuadrature),
        );
        s.analyses.push(Analysis::ExactDistance {
            query: format!("rho_{t}"),
        });
        s.analyses.push(Analysis::Ratio {
            numerator: format!("rho_{t}"),
            denominator: format!("k_{t}"),
        });
    }
    // the endpoint-minimum quasihyperbolic rule, for comparison
    s.queries.push(
        Query::new("kmin_0.005_6", a, b)
            .grid(GridSpec::new(0.005, 6, WindowSpec::local(DEFAULT_MARGIN)))
            .metric(MetricConfig::Quasihyperbolic),
    );
    s
}

pub fn octagon_bifurcation() -> Scenario {
    let mut s = scenario(
        "octagon_bifurcation",
        "Non-convex octagon: bifurcation of the geodesics from x = -2 to i and -i.",
        NamedDomain::Octagon,
        GridSpec::new(0.01, 10, WindowSpec::local(DEFAULT_MARGIN)),
        MetricConfig::Quasihyperbolic,
    );
    let x = p(-2.0, 0.0);
    for &(h, m) in &OCTAGON_ROWS {
        let t = tag(h, m);
        let grid = GridSpec::new(h, m, WindowSpec::local(DEFAULT_MARGIN));
        s.queries.push(
            Query::new(format!("upper_{t}"), x, p(0.0, 1.0))
                .group(t.clone())
                .grid(grid.clone()),
        );
        s.queries.push(
            Query::new(format!("lower_{t}"), x, p(0.0, -1.0))
                .group(t.clone())
                .grid(grid),
        );
        s.analyses.push(Analysis::Bifurcation {
            first: format!("upper_{t}"),
            second: format!("lower_{t}"),
            all: false,
        });
    }
    s
}

/// Ray from puncture `k` away from the side the path must take.
fn strip_barrier(k: usize, above: bool) -> Segment {
    let x = k as f64 * 3f64.sqrt();
    let y = if above { -3.0 } else { 3.0 };
    Segment::new(p(x, 0.0), p(x, y))
}

pub fn punctured_strip() -> Scenario {
    let mut s = scenario(
        "punctured_strip",
        "Punctured strip with five punctures: two geodesics passing the punctures on different sides.",
        NamedDomain::PuncturedStrip { n: STRIP_N },
        GridSpec::new(0.025, 4, WindowSpec::Domain),
        MetricConfig::Quasihyperbolic,
    );
    let s3 = 3f64.sqrt();
    let (x, y) = (p(-0.5, 0.0), p((STRIP_N as f64 - 2.0) * s3 + 0.5, 0.0));
    let routes: [(&str, [bool; 4]); 2] = [
        ("over_all", [true, true, true, true]),
        ("split", [true, false, false, true]),
    ];
    for (name, sides) in routes {
        let barriers = sides.iter().enumerate().map(|(k, &a)| strip_barrier(k, a)).collect();
        s.queries.push(Query::new(name, x, y).barriers(barriers));
    }
    s.queries.push(Query::new("free", x, y));
    s.analyses.push(Analysis::Bifurcation {
        first: "over_all".into(),
        second: "split".into(),
        all: true,
    });
    s
}

pub fn sector_geometry() -> SectorGeometry {
    SectorGeometry::new(2.0 * 0.5f64.atan(), SECTOR_L, 1e4).expect("valid sector")
}

/// `z_j` for the sector experiment, with `z_0` moved into the domain.
pub fn sector_endpoint(j: usize) -> (Point2, Point2) {
    let g = sector_geometry();
    let (mut z, mut zs) = (g.z(j, SECTOR_N), g.z_star(j, SECTOR_N));
    if j == 0 {
        z.y += SECTOR_Z0_OFFSET;
        zs.y -= SECTOR_Z0_OFFSET;
    }
    (z, zs)
}

pub fn sector_bisector() -> Scenario {
    let g = sector_geometry();
    let mut s = scenario(
        "sector_bisector",
        "Sector of opening 2 atan(1/2): geodesics from x = 0.5 to z_j and its mirror image.",
        NamedDomain::Sector {
            phi: g.phi,
            side_length: g.side_length,
        },
        GridSpec::new(0.025, 8, WindowSpec::local(DEFAULT_MARGIN)).with_anchor(GridAnchor::Origin),
        MetricConfig::Quasihyperbolic,
    );
    let x = p(0.5, 0.0);
    for j in 0..=SECTOR_N {
        let (z, zs) = sector_endpoint(j);
        let group = format!("j{j}");
        s.queries.push(Query::new(format!("z{j}"), x, z).group(group.clone()));
        s.queries.push(Query::new(format!("z{j}_star"), x, zs).group(group));
        s.analyses.push(Analysis::Bifurcation {
            first: format!("z{j}"),
            second: format!("z{j}_star"),
            all: false,
        });
        s.analyses.push(Analysis::SectorArcError {
            query: format!("z{j}"),
            l: g.l,
            r: g.r,
        });
    }
    s
}

pub fn rectangle_medial() -> Scenario {
    let mut s = scenario(
        "rectangle_medial",
        "Rectangle (-3, 3) x (-1, 1): eight geodesics from w = 2.5 - 0.5i, sharing one sweep.",
        NamedDomain::Rectangle,
        GridSpec::new(0.025, 8, WindowSpec::Domain),
        MetricConfig::Quasihyperbolic,
    );
    let w = p(2.5, -0.5);
    for k in 1..=8 {
        let y = -(k as f64) / 10.0;
        let name = format!("z_{k}");
        s.queries.push(Query::new(name.clone(), w, p(-2.9, y)));
        s.analyses.push(Analysis::MedialAxisFraction { query: name, tau: 1e-9 });
    }
    s
}

pub fn asterisk(n: usize) -> Scenario {
    let g = AsteriskGeometry::new(n, 6.0, 1.0, 1.0).expect("valid asterisk");
    let mut s = scenario(
        &format!("asterisk_n{n}"),
        "Asterisk with l1 = 6, l2 = l3 = 1: the quasihyperbolic polygon through the arm points.",
        NamedDomain::Asterisk {
            n,
            l1: g.l1,
            l2: g.l2,
            l3: g.l3,
        },
        GridSpec::new(0.05, 4, WindowSpec::Domain),
        MetricConfig::Quasihyperbolic,
    );
    let pts = g.points();
    let mut names = Vec::new();
    for j in 0..n {
        let name = format!("side_{}", j + 1);
        s.queries.push(Query::new(name.clone(), pts[j], pts[(j + 1) % n]));
        names.push(name);
    }
    s.analyses.push(Analysis::InscribedRadius { queries: names });
    s
}

pub fn route_flip(h: f64) -> Scenario {
    let mut s = scenario(
        &format!("route_flip_h{h}"),
        "Rectangle with a rectangular obstacle: the geodesic from (2, 1) to (7, 1) changes sides with h.",
        NamedDomain::ObstacleRectangle,
        GridSpec::new(h, 4, WindowSpec::Domain),
        MetricConfig::Quasihyperbolic,
    );
    s.queries.push(Query::new("geodesic", p(2.0, 1.0), p(7.0, 1.0)));
    s.analyses.push(Analysis::HoleWinding {
        query: "geodesic".into(),
        hole: 0,
    });
    s
}

pub fn quadrilateral_pairs() -> Scenario {
    let (a, b, c, r) = QUADRILATERAL_PARAMS;
    let mut s = scenario(
        "quadrilateral_pairs",
        "Hypergeometric quadrilateral with a = 0.4, b = 0.5, c = 1.1, r = 0.5: pulled-back hyperbolic lengths.",
        NamedDomain::Quadrilateral { a, b, c, r },
        GridSpec::new(0.005, 4, WindowSpec::local(DEFAULT_MARGIN)),
        MetricConfig::HyperbolicPullback,
    );
    for (k, &((x1, y1), (x2, y2))) in QUADRILATERAL_PAIRS.iter().enumerate() {
        let name = format!("pair_{}", k + 1);
        let mut q = Query::new(name.clone(), Point2::ORIGIN, Point2::ORIGIN).group(name.clone());
        q.from = PointSpec::Preimage { preimage: p(x1, y1) };
        q.to = PointSpec::Preimage { preimage: p(x2, y2) };
        s.queries.push(q);
        s.analyses.push(Analysis::ExactDistance { query: name });
    }
    s
}
