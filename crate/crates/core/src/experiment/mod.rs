//! JSON scenarios, their execution, and CSV/SVG emission.

mod builtins;
mod output;
mod run;
mod scenario;

pub use builtins::*;
pub use output::{
    analyses_csv, decorations, path_csv, render_svg, report_view, summary_csv, write_outputs, Decoration,
};
pub use run::{
    run_scenario, run_scenario_with, AnalysisReport, GraphReport, NamedValue, QueryReport, QueryStatus, RunOptions,
    RunReport, THREADS_ENV,
};
pub use scenario::{
    Analysis, DomainSpec, GridSpec, MetricConfig, OutputSpec, PointSpec, Query, Scenario, WindowSpec, SCHEMA_VERSION,
};

use serde::Deserialize;

use crate::conformal::{QuadParams, QuadrilateralMap};
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::Point2;

/// Input of `map-eval`: map parameters and half-plane sample points.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEvalRequest {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    #[serde(default)]
    pub samples: Vec<Point2>,
}

/// CSV `kind,index,z_x,z_y,w_x,w_y`: the four vertices (preimages 0, 1, 1/r², ∞
/// with empty z columns for ∞), then one row per sample.
pub fn map_eval(json: &str) -> Result<String> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let req: MapEvalRequest = serde_path_to_error::deserialize(de).map_err(|e| Error::Scenario {
        pointer: scenario::pointer_of(e.path()),
        reason: e.inner().to_string(),
    })?;
    let map = QuadrilateralMap::new(QuadParams {
        a: req.a,
        b: req.b,
        c: req.c,
        r: req.r,
    })?;
    let mut out = String::from("kind,index,z_x,z_y,w_x,w_y\n");
    let pre = [Some(0.0), Some(1.0), Some(1.0 / (req.r * req.r)), None];
    for (k, (w, z)) in map.vertices().iter().zip(pre).enumerate() {
        let (zx, zy) = match z {
            Some(x) => (g17(x), "0".to_string()),
            None => ("inf".to_string(), String::new()),
        };
        out.push_str(&format!("vertex,{k},{zx},{zy},{},{}\n", g17(w.x), g17(w.y)));
    }
    for (k, z) in req.samples.iter().enumerate() {
        let w = map.forward_point(*z)?;
        out.push_str(&format!(
            "sample,{k},{},{},{},{}\n",
            g17(z.x),
            g17(z.y),
            g17(w.x),
            g17(w.y)
        ));
    }
    Ok(out)
}
