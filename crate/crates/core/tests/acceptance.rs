//! End-to-end acceptance checks. Every test prints one `criterion N PASS|FAIL`
//! line (written straight to stdout so it survives output capture) and then
//! asserts the verdict.

use std::io::Write;
use std::time::Instant;

use geowalk::analysis::find_bifurcations;
use geowalk::conformal::{hyp2f1, QuadParams, QuadrilateralMap};
use geowalk::experiment::{self, run_scenario_with, RunOptions, RunReport, Scenario};
use geowalk::geometry::{Domain, Point2};
use geowalk::graph::{build_graph, Adjacency, GridParams};
use geowalk::metric::{edge_weight, rho_disk, rho_halfplane, MetricSpec};
use geowalk::solver::dijkstra;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn verdict(n: u32, title: &str, checks: Vec<(bool, String)>) {
    let ok = checks.iter().all(|c| c.0);
    let detail: Vec<String> = checks
        .iter()
        .map(|(pass, d)| if *pass { d.clone() } else { format!("[miss] {d}") })
        .collect();
    let line = format!(
        "criterion {n:>2} {}: {title}: {}\n",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "{line}");
}

/// Lattice coordinates such as 124 * 0.025 carry one ulp of representation
/// error, so the bound gets a relative slack of 1e-12.
fn within(label: &str, value: f64, target: f64, tol: f64) -> (bool, String) {
    (
        (value - target).abs() <= tol * (1.0 + 1e-12),
        format!("{label} = {value:.6} (target {target} ± {tol:e})"),
    )
}

/// The builtin restricted to the named queries and the analyses using only them.
fn subset(mut s: Scenario, keep: &[&str]) -> Scenario {
    s.queries.retain(|q| keep.contains(&q.name.as_str()));
    s.analyses.retain(|a| a.queries().iter().all(|q| keep.contains(q)));
    s
}

fn run(s: &Scenario) -> RunReport {
    run_scenario_with(s, &RunOptions::default()).expect("scenario runs")
}

fn value(r: &RunReport, kind: &str, query: &str, key: &str) -> Option<f64> {
    r.analyses
        .iter()
        .find(|a| a.kind == kind && a.queries.first().map(String::as_str) == Some(query))
        .and_then(|a| a.value(key))
}

#[test]
fn criterion_01_unit_disk() {
    let s = subset(
        experiment::disk_convergence(),
        &["rho_0.005_6", "k_0.005_6", "kmin_0.005_6"],
    );
    let t0 = Instant::now();
    let r = run_scenario_with(&s, &RunOptions { threads: 1 }).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let rho = r.length("rho_0.005_6").unwrap();
    let k = r.length("k_0.005_6").unwrap();
    let exact = value(&r, "exact_distance", "rho_0.005_6", "exact").unwrap();
    let ratio = value(&r, "ratio", "rho_0.005_6", "ratio").unwrap();
    let kmin = r.length("kmin_0.005_6").unwrap();
    verdict(
        1,
        "unit disk h=0.005 m=6",
        vec![
            within("k*", k, 2.5210, 2e-3),
            within("rho*", rho, 2.9367, 2e-3),
            within("rho*/k*", ratio, 1.1645, 5e-3),
            within("rho", exact, 2.9357, 1e-4),
            (secs < 60.0, format!("single-threaded {secs:.2} s < 60 s")),
            (true, format!("endpoint-minimum rule gives {kmin:.5}")),
        ],
    );
}

#[test]
fn criterion_02_convergence_trend() {
    let s = subset(
        experiment::disk_convergence(),
        &["rho_0.01_3", "rho_0.005_6", "rho_0.0025_8"],
    );
    let r = run(&s);
    let eps = |q: &str| value(&r, "exact_distance", q, "error").unwrap();
    let (e1, e2, e3) = (eps("rho_0.01_3"), eps("rho_0.005_6"), eps("rho_0.0025_8"));
    verdict(
        2,
        "disk convergence",
        vec![
            (
                e3 < e2 && e2 < e1,
                format!("eps(0.0025,8) = {e3:.3e} < eps(0.005,6) = {e2:.3e} < eps(0.01,3) = {e1:.3e}"),
            ),
            (e3 <= 1.5e-3, format!("eps(0.0025,8) = {e3:.3e} <= 1.5e-3")),
        ],
    );
}

#[test]
fn criterion_03_octagon() {
    let r = run(&experiment::octagon_bifurcation());
    let w = |t: &str| value(&r, "bifurcation", &format!("upper_{t}"), "x").unwrap();
    let errs: Vec<f64> = [2, 4, 8, 10]
        .iter()
        .map(|m| (w(&format!("0.01_{m}")) + 1.0).abs())
        .collect();
    let monotone = errs.windows(2).all(|p| p[1] < p[0]);
    verdict(
        3,
        "octagon bifurcation",
        vec![
            within("w(0.01,10)", w("0.01_10"), -1.0, 0.005),
            within("w(0.02,8)", w("0.02_8"), -1.02, 0.02),
            (monotone, format!("|y-w| along m=2,4,8,10: {errs:.3?}")),
        ],
    );
}

#[test]
fn criterion_04_punctured_strip() {
    let r = run(&experiment::punctured_strip());
    let found = find_bifurcations(r.path("over_all").unwrap(), r.path("split").unwrap());
    let xs: Vec<f64> = found.iter().filter_map(|b| b.location()).map(|p| p.x).collect();
    let s3 = 3f64.sqrt();
    let mut checks = vec![(xs.len() >= 2, format!("bifurcation abscissas {xs:?}"))];
    if xs.len() >= 2 {
        checks.push(within("first", xs[0], s3 / 2.0, 0.01));
        checks.push(within("last", *xs.last().unwrap(), 5.0 * s3 / 2.0, 0.01));
    }
    verdict(4, "punctured strip bifurcations", checks);
}

#[test]
fn criterion_05_sector() {
    let r = run(&experiment::sector_bisector());
    let mut checks = Vec::new();
    for j in 0..=experiment::SECTOR_N {
        let (a, b) = (format!("z{j}"), format!("z{j}_star"));
        let (pa, pb) = (r.path(&a).unwrap(), r.path(&b).unwrap());
        // identical paths (z_9 on the bisector) bifurcate at their common end
        let w = match value(&r, "bifurcation", &a, "x") {
            Some(x) => x,
            None if pa.points == pb.points => pa.end().x,
            None => f64::NAN,
        };
        checks.push(within(&format!("w_{j}"), w, 3.0, 0.1));
        let tol = if j == 0 { 0.12 } else { 0.04 };
        match value(&r, "sector_arc_error", &a, "arc_error") {
            Some(e) => checks.push((e <= tol, format!("arc_{j} = {e:.4} <= {tol}"))),
            None => {
                let on_axis = pa.points.iter().all(|p| p.y == 0.0);
                checks.push((
                    on_axis,
                    format!("arc_{j}: path lies on the bisector, no off-axis points"),
                ));
            }
        }
    }
    verdict(5, "sector bifurcation and arc error", checks);
}

#[test]
fn criterion_06_asterisk() {
    let mut rk = Vec::new();
    for n in 3..=9 {
        let r = run(&experiment::asterisk(n));
        rk.push(r.analyses[0].value("radius").unwrap());
    }
    let increasing = rk.windows(2).all(|p| p[1] > p[0]);
    verdict(
        6,
        "asterisk inscribed radii",
        vec![
            within("r_k(3)", rk[0], 0.17860, 0.05),
            within("r_k(9)", rk[6], 1.9082, 0.05),
            (increasing, format!("strictly increasing {rk:.5?}")),
        ],
    );
}

#[test]
fn criterion_07_route_flip() {
    let coarse = run(&experiment::route_flip(0.2));
    let fine = run(&experiment::route_flip(0.1));
    let wc = coarse.analyses[0].value("winding").unwrap();
    let wf = fine.analyses[0].value("winding").unwrap();
    verdict(
        7,
        "route flip around the obstacle",
        vec![
            within("k*(0.2,4)", coarse.length("geodesic").unwrap(), 11.22949, 0.1),
            within("k*(0.1,4)", fine.length("geodesic").unwrap(), 10.04478, 0.1),
            (wc != wf, format!("winding about the obstacle {wc} vs {wf}")),
        ],
    );
}

#[test]
fn criterion_08_quadrilateral_map() {
    let ln4 = hyp2f1(1.0, 1.0, 2.0, Complex64::new(0.5, 0.0)).unwrap().re;
    let mut worst_vertex = 0.0f64;
    let mut count = 0;
    for &a in &[0.3f64, 0.45, 0.6] {
        for &b in &[0.3f64, 0.45, 0.6] {
            let (lo, hi) = ((a + b).max(1.0), 1.0 + f64::min(a, b));
            let c = 0.5 * (lo + hi);
            for &r in &[0.3, 0.5, 0.8] {
                let map = QuadrilateralMap::new(QuadParams { a, b, c, r }).unwrap();
                let f1 = map.forward(Complex64::new(1.0, 0.0)).unwrap();
                let exact = hyp2f1(a, b, c, Complex64::new(r * r, 0.0)).unwrap();
                worst_vertex = worst_vertex.max((f1 - exact).norm());
                count += 1;
            }
        }
    }
    let map = QuadrilateralMap::new(QuadParams {
        a: 0.4,
        b: 0.5,
        c: 1.1,
        r: 0.5,
    })
    .unwrap();
    let mut worst_trip = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let z = Complex64::new(-3.0 + 6.0 * i as f64 / 19.0, 0.1 + 3.9 * j as f64 / 19.0);
            let back = map.inverse_complex(map.forward(z).unwrap()).unwrap();
            worst_trip = worst_trip.max((back - z).norm());
        }
    }
    verdict(
        8,
        "hypergeometric quadrilateral map",
        vec![
            within("F(1,1;2;0.5)", ln4, 1.3862944, 1e-7),
            (
                (ln4 - 4f64.ln()).abs() <= 1e-10,
                format!("|F(1,1;2;0.5) - ln 4| = {:.1e} <= 1e-10", (ln4 - 4f64.ln()).abs()),
            ),
            (
                worst_vertex <= 1e-8 && count == 27,
                format!("max |f(1) - F(a,b;c;r^2)| = {worst_vertex:.1e} over {count} parameter sets"),
            ),
            (
                worst_trip < 1e-8,
                format!("max Newton round trip error {worst_trip:.1e} on 20x20"),
            ),
        ],
    );
}

#[test]
fn criterion_09_pullback_spot_check() {
    let s = subset(experiment::quadrilateral_pairs(), &["pair_1"]);
    let t0 = Instant::now();
    let r = run(&s);
    let secs = t0.elapsed().as_secs_f64();
    let len = r.length("pair_1").unwrap();
    let exact = value(&r, "exact_distance", "pair_1", "exact").unwrap();
    verdict(
        9,
        "pullback metric, a=0.4 b=0.5 c=1.1 r=0.5",
        vec![
            within("rho*(f(-2+4i), f(2i))", len, 0.96242, 5e-3),
            within("rho(-2+4i, 2i)", exact, 0.96242, 1e-5),
            (secs < 600.0, format!("{secs:.1} s < 600 s")),
        ],
    );
}

fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], s: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n];
    d[s] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in edges {
            for (a, b) in [(u, v), (v, u)] {
                if d[a] + w < d[b] {
                    d[b] = d[a] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

#[test]
fn criterion_10_property_summary() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=200);
        let m = rng.gen_range(0..=4 * n);
        let edges: Vec<(usize, usize, f64)> = (0..m)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0.0..10.0)))
            .filter(|e| e.0 != e.1)
            .collect();
        let adj = Adjacency::from_edges(n, &edges).unwrap();
        let s = rng.gen_range(0..n);
        let tree = dijkstra(&adj, s).unwrap();
        let bf = bellman_ford(n, &edges, s);
        for (v, &b) in bf.iter().enumerate() {
            let a = tree.distance(v);
            let diff = if a.is_infinite() && b.is_infinite() {
                0.0
            } else {
                (a - b).abs()
            };
            worst = worst.max(diff);
        }
    }
    checks.push((
        worst <= 1e-12,
        format!("Dijkstra vs Bellman-Ford on 100 graphs: max diff {worst:.1e}"),
    ));

    let mut metric_ok = true;
    for _ in 0..500 {
        let pt = |rng: &mut StdRng| Point2::polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.3));
        let (a, b, c) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let (ab, ba) = (rho_disk(a, b).unwrap(), rho_disk(b, a).unwrap());
        let (ac, cb) = (rho_disk(a, c).unwrap(), rho_disk(c, b).unwrap());
        metric_ok &= ab == ba && ab <= ac + cb + 1e-12;
        // Möbius invariance z -> (z - c) / (1 - conj(c) z)
        let mobius = |z: Point2| {
            let (z, c) = (z.to_complex(), c.to_complex());
            Point2::from((z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z))
        };
        metric_ok &= (rho_disk(mobius(a), mobius(b)).unwrap() - ab).abs() <= 1e-9 * ab.max(1.0);
        let up = |p: Point2| Point2::new(3.0 * p.x + 1.0, 3.0 * p.y + 3.0);
        let (u, v) = (up(a), up(b));
        let ruv = rho_halfplane(u, v).unwrap();
        metric_ok &= (rho_halfplane(
            Point2::new(2.0 * u.x - 5.0, 2.0 * u.y),
            Point2::new(2.0 * v.x - 5.0, 2.0 * v.y),
        )
        .unwrap()
            - ruv)
            .abs()
            <= 1e-9 * ruv.max(1.0);
        let d = Domain::unit_disk();
        metric_ok &= edge_weight(&MetricSpec::Quasihyperbolic, &d, a, b).unwrap()
            == edge_weight(&MetricSpec::Quasihyperbolic, &d, b, a).unwrap();
    }
    checks.push((
        metric_ok,
        "metric symmetry, triangle and invariance on 500 samples".to_string(),
    ));

    let d = geowalk::geometry::NamedDomain::ObstacleRectangle.build().unwrap();
    let p = GridParams::new(0.25, 3);
    let g = build_graph(&d, &p, &MetricSpec::Quasihyperbolic).unwrap();
    let mut graph_ok = true;
    for (u, v, w) in g.adjacency().edges() {
        let (a, b) = (g.vertex(u), g.vertex(v));
        let len = a.dist(b);
        graph_ok &= g.adjacency().weight(v, u) == Some(w);
        graph_ok &= len >= 3.0 * 0.25 * (1.0 - 1e-9) && len <= 2f64.sqrt() * 3.0 * 0.25 * (1.0 + 1e-9);
        graph_ok &= d.segment_clear(a, b);
    }
    checks.push((
        graph_ok,
        format!(
            "{} edges symmetric, in the annulus and clear of the boundary",
            g.edge_count()
        ),
    ));

    let s = experiment::route_flip(0.2);
    let (r1, r2) = (run(&s), run(&s));
    let same = experiment::summary_csv(&r1).unwrap() == experiment::summary_csv(&r2).unwrap()
        && experiment::path_csv(r1.path("geodesic").unwrap()).unwrap()
            == experiment::path_csv(r2.path("geodesic").unwrap()).unwrap();
    checks.push((same, "byte-identical CSV on rerun".to_string()));

    verdict(10, "property suites", checks);
}
