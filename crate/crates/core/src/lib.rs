//! Approximate quasihyperbolic and hyperbolic geodesics on planar domains by
//! shortest paths in weighted grid graphs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod conformal;
pub mod error;
pub mod experiment;
pub mod fmt;
pub mod geometry;
pub mod graph;
pub mod metric;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Domain, Point2, Rect};
pub use graph::{build_graph, GridGraph, GridParams};
pub use metric::MetricSpec;
pub use solver::{shortest_path, GeodesicPath};
