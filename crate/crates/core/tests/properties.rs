use geowalk::geometry::NamedDomain;
use geowalk::graph::{annulus_offsets, Adjacency};
use geowalk::metric::{edge_weight, j_metric, rho_disk, rho_halfplane};
use geowalk::solver::dijkstra;
use geowalk::{build_graph, shortest_path, Domain, GridParams, MetricSpec, Point2};
use num_complex::Complex64;
use proptest::prelude::*;

fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], s: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n];
    d[s] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in edges {
            if d[u] + w < d[v] {
                d[v] = d[u] + w;
                changed = true;
            }
            if d[v] + w < d[u] {
                d[u] = d[v] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>, usize)> {
    (1usize..60).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 0.0f64..10.0);
        (Just(n), prop::collection::vec(edge, 0..4 * n), 0..n)
    })
}

fn disk_point() -> impl Strategy<Value = Point2> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Point2::polar(r, t))
}

fn halfplane_point() -> impl Strategy<Value = Point2> {
    (-5.0f64..5.0, 0.05f64..5.0).prop_map(|(x, y)| Point2::new(x, y))
}

fn mobius(c: Point2) -> impl Fn(Point2) -> Point2 {
    move |z| {
        let (z, c) = (z.to_complex(), c.to_complex());
        Point2::from((z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dijkstra_agrees_with_bellman_ford((n, edges, s) in random_graph()) {
        let edges: Vec<_> = edges.into_iter().filter(|e| e.0 != e.1).collect();
        let adj = Adjacency::from_edges(n, &edges).unwrap();
        let tree = dijkstra(&adj, s).unwrap();
        let reference = bellman_ford(n, &edges, s);
        for (v, &b) in reference.iter().enumerate() {
            let a = tree.distance(v);
            if b.is_infinite() {
                prop_assert!(a.is_infinite());
                prop_assert!(tree.path_to(v).is_none());
            } else {
                prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0), "vertex {v}: {a} vs {b}");
                let path = tree.path_to(v).unwrap();
                prop_assert_eq!(path[0], s);
                prop_assert_eq!(*path.last().unwrap(), v);
                let total: f64 = path.windows(2).map(|e| adj.weight(e[0], e[1]).unwrap()).sum();
                prop_assert!((total - a).abs() <= 1e-9 * a.max(1.0));
            }
        }
    }

    #[test]
    fn disk_metric_is_a_metric(a in disk_point(), b in disk_point(), c in disk_point()) {
        let ab = rho_disk(a, b).unwrap();
        prop_assert_eq!(ab, rho_disk(b, a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert!(rho_disk(a, a).unwrap().abs() <= 1e-12);
        prop_assert!(ab <= rho_disk(a, c).unwrap() + rho_disk(c, b).unwrap() + 1e-9);
    }

    #[test]
    fn disk_metric_is_mobius_invariant(a in disk_point(), b in disk_point(), c in disk_point()) {
        let f = mobius(c);
        let ab = rho_disk(a, b).unwrap();
        let image = rho_disk(f(a), f(b)).unwrap();
        prop_assert!((image - ab).abs() <= 1e-8 * ab.max(1.0), "{ab} vs {image}");
    }

    #[test]
    fn halfplane_metric_is_invariant_under_affine_maps(
        a in halfplane_point(),
        b in halfplane_point(),
        s in 0.1f64..10.0,
        t in -10.0f64..10.0,
    ) {
        let ab = rho_halfplane(a, b).unwrap();
        prop_assert_eq!(ab, rho_halfplane(b, a).unwrap());
        let f = |p: Point2| Point2::new(s * p.x + t, s * p.y);
        let image = rho_halfplane(f(a), f(b)).unwrap();
        prop_assert!((image - ab).abs() <= 1e-9 * ab.max(1.0));
    }

    #[test]
    fn halfplane_and_disk_agree_through_the_cayley_map(a in disk_point(), b in disk_point()) {
        let cayley = |p: Point2| {
            let z = p.to_complex();
            let i = Complex64::new(0.0, 1.0);
            Point2::from(i * (Complex64::new(1.0, 0.0) + z) / (Complex64::new(1.0, 0.0) - z))
        };
        let disk = rho_disk(a, b).unwrap();
        let half = rho_halfplane(cayley(a), cayley(b)).unwrap();
        prop_assert!((disk - half).abs() <= 1e-8 * disk.max(1.0));
    }

    #[test]
    fn quasihyperbolic_weights_are_symmetric_and_dominate_j(a in disk_point(), b in disk_point()) {
        let d = Domain::unit_disk();
        let w = edge_weight(&MetricSpec::Quasihyperbolic, &d, a, b).unwrap();
        prop_assert_eq!(w, edge_weight(&MetricSpec::Quasihyperbolic, &d, b, a).unwrap());
        let q = edge_weight(&MetricSpec::QuasihyperbolicQuadrature, &d, a, b).unwrap();
        prop_assert!(q <= w * (1.0 + 1e-12));
        prop_assert!(j_metric(&d, a, b).unwrap() <= w + 1e-12);
    }

    #[test]
    fn routing_is_deterministic_and_reversible(
        i in 0usize..5,
        h in prop::sample::select(vec![0.1, 0.2]),
        m in 1u32..4,
    ) {
        let named = [
            NamedDomain::UnitDisk,
            NamedDomain::Octagon,
            NamedDomain::ObstacleRectangle,
            NamedDomain::Rectangle,
            NamedDomain::Asterisk { n: 4, l1: 6.0, l2: 1.0, l3: 1.0 },
        ][i]
            .clone();
        let d = named.build().unwrap();
        let g = build_graph(&d, &GridParams::new(h, m), &MetricSpec::Quasihyperbolic).unwrap();
        let (p, q) = (g.vertex(0), g.vertex(g.vertex_count() - 1));
        match shortest_path(&g, p, q) {
            Ok(fwd) => {
                let again = shortest_path(&g, p, q).unwrap();
                prop_assert_eq!(&fwd.vertex_ids, &again.vertex_ids);
                let back = shortest_path(&g, q, p).unwrap();
                prop_assert!((fwd.total_length - back.total_length).abs() <= 1e-9 * fwd.total_length.max(1.0));
            }
            Err(e) => prop_assert!(matches!(e, geowalk::Error::NoPath { .. }), "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graph_edges_lie_in_the_annulus_and_clear_the_boundary(
        i in 0usize..4,
        h in prop::sample::select(vec![0.1, 0.2, 0.25]),
        m in 1u32..5,
    ) {
        let named = [
            NamedDomain::UnitDisk,
            NamedDomain::ObstacleRectangle,
            NamedDomain::Asterisk { n: 5, l1: 6.0, l2: 1.0, l3: 1.0 },
            NamedDomain::PuncturedStrip { n: 3 },
        ][i]
            .clone();
        let d = named.build().unwrap();
        let p = GridParams::new(h, m);
        let g = build_graph(&d, &p, &MetricSpec::Quasihyperbolic).unwrap();
        let (lo, hi) = (m as f64 * h * (1.0 - 1e-9), 2f64.sqrt() * m as f64 * h * (1.0 + 1e-9));
        for v in g.vertices() {
            prop_assert!(d.contains(*v));
            prop_assert!(d.dist_to_boundary(*v) > geowalk::graph::VERTEX_CLEARANCE * h);
        }
        for (u, v, w) in g.adjacency().edges() {
            let (a, b) = (g.vertex(u), g.vertex(v));
            prop_assert!(a.dist(b) >= lo && a.dist(b) <= hi);
            prop_assert_eq!(g.adjacency().weight(v, u), Some(w));
            prop_assert!(w > 0.0 && w.is_finite());
            prop_assert!(d.segment_clear(a, b));
        }
        let degree_bound = annulus_offsets(m).len();
        prop_assert!((0..g.vertex_count()).all(|u| g.adjacency().degree(u) <= degree_bound));
    }
}
