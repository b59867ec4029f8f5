use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::RunReport;
use super::scenario::{Analysis, Scenario};
use crate::analysis::BifurcationResult;
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::{Domain, Outer, Point2, Rect};
use crate::solver::GeodesicPath;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

/// Extra shapes drawn over the paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decoration {
    /// Largest circle about the origin avoided by the paths.
    Inscribed {
        radius: f64,
    },
    /// Reference circle, e.g. a tangency circle of the sector.
    Reference {
        center: Point2,
        radius: f64,
    },
    Marker {
        point: Point2,
    },
}

fn opt(v: Option<f64>) -> String {
    v.map(g17).unwrap_or_default()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One row per query with the analysis results attached to their first query.
pub fn summary_csv(report: &RunReport) -> Result<String> {
    let mut extra: Vec<String> = Vec::new();
    let mut cells: Vec<Vec<(String, String)>> = vec![Vec::new(); report.queries.len()];
    for a in &report.analyses {
        let Some(row) = a
            .queries
            .first()
            .and_then(|q| report.queries.iter().position(|r| &r.name == q))
        else {
            continue;
        };
        for v in &a.values {
            let mut col = format!("{}.{}", a.kind, v.key);
            if cells[row].iter().any(|(c, _)| *c == col) {
                col = format!("{}#{}.{}", a.kind, a.index, v.key);
            }
            if !extra.contains(&col) {
                extra.push(col.clone());
            }
            cells[row].push((col, g17(v.value)));
        }
    }

    let mut w = csv_writer();
    let mut header: Vec<String> = [
        "name",
        "group",
        "h",
        "m",
        "anchor",
        "metric",
        "from_x",
        "from_y",
        "to_x",
        "to_y",
        "snapped_from_x",
        "snapped_from_y",
        "snapped_to_x",
        "snapped_to_y",
        "length",
        "validated_length",
        "path_vertices",
        "graph_vertices",
        "graph_edges",
        "status",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(extra.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (q, row) in report.queries.iter().zip(&cells) {
        let anchor = serde_json::to_value(q.anchor)?;
        let mut rec = vec![
            q.name.clone(),
            q.group.clone().unwrap_or_default(),
            g17(q.h),
            q.m.to_string(),
            anchor.as_str().unwrap_or_default().to_string(),
            q.metric.to_string(),
            opt(q.from.map(|p| p.x)),
            opt(q.from.map(|p| p.y)),
            opt(q.to.map(|p| p.x)),
            opt(q.to.map(|p| p.y)),
            opt(q.snapped_from.map(|p| p.x)),
            opt(q.snapped_from.map(|p| p.y)),
            opt(q.snapped_to.map(|p| p.x)),
            opt(q.snapped_to.map(|p| p.y)),
            opt(q.length),
            opt(q.validated_length),
            q.path_vertices.map(|v| v.to_string()).unwrap_or_default(),
            q.graph_vertices.map(|v| v.to_string()).unwrap_or_default(),
            q.graph_edges.map(|v| v.to_string()).unwrap_or_default(),
            q.status.as_str().to_string(),
        ];
        for col in &extra {
            rec.push(
                row.iter()
                    .find(|(c, _)| c == col)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default(),
            );
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// Long format: `index,kind,queries,key,value`, one line per scalar.
pub fn analyses_csv(report: &RunReport) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["index", "kind", "queries", "key", "value"])
        .map_err(csv_err)?;
    for a in &report.analyses {
        let idx = a.index.to_string();
        let qs = a.queries.join(";");
        for v in &a.values {
            w.write_record([idx.as_str(), a.kind, &qs, &v.key, &g17(v.value)])
                .map_err(csv_err)?;
        }
        for (k, b) in a.bifurcations.iter().enumerate() {
            let key = if k == 0 {
                "case".to_string()
            } else {
                format!("case_{k}")
            };
            let val = match b {
                BifurcationResult::Point { case, .. } => case.tag(),
                BifurcationResult::NotFound => "not_found",
            };
            w.write_record([idx.as_str(), a.kind, &qs, &key, val])
                .map_err(csv_err)?;
        }
        if let Some(e) = &a.error {
            w.write_record([idx.as_str(), a.kind, &qs, "error", e])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

pub fn path_csv(path: &GeodesicPath) -> Result<String> {
    let mut buf = Vec::new();
    path.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Circles and markers implied by the scenario's analyses.
pub fn decorations(report: &RunReport, scenario: &Scenario) -> Vec<Decoration> {
    let mut out = Vec::new();
    for (a, r) in scenario.analyses.iter().zip(&report.analyses) {
        match a {
            Analysis::InscribedRadius { .. } => {
                if let Some(radius) = r.value("radius") {
                    out.push(Decoration::Inscribed { radius });
                }
            }
            Analysis::SectorArcError { l, r: rad, .. } => {
                for c in [Point2::new(*l, *rad), Point2::new(*l, -*rad)] {
                    let d = Decoration::Reference {
                        center: c,
                        radius: *rad,
                    };
                    if !out.contains(&d) {
                        out.push(d);
                    }
                }
            }
            Analysis::Bifurcation { .. } => {
                for b in &r.bifurcations {
                    if let Some(point) = b.location() {
                        out.push(Decoration::Marker { point });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn points_attr(pts: &[Point2]) -> String {
    pts.iter()
        .map(|p| format!("{},{}", num(p.x), num(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Standalone SVG of the domain boundary, the paths and the decorations.
///
/// `view` defaults to the domain's bounding box; in both cases 5% is added on
/// each side. Model coordinates are kept and flipped with a transform.
pub fn render_svg(domain: &Domain, paths: &[&GeodesicPath], decorations: &[Decoration], view: Option<Rect>) -> String {
    let base = view
        .or_else(|| domain.bounding_box())
        .or_else(|| Rect::bounding(paths.iter().flat_map(|p| p.points.iter().copied())))
        .unwrap_or(Rect::new(-1.0, 1.0, -1.0, 1.0));
    let v = base.expanded(0.05);
    let size = v.width().max(v.height());
    let stroke = size * 0.002;
    let mut s = String::new();
    let px_w = 800.0;
    let px_h = (800.0 * v.height() / v.width()).round().max(1.0);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(v.x_min),
        num(-v.y_max),
        num(v.width()),
        num(v.height()),
        px_w,
        px_h
    );
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        num(v.x_min),
        num(-v.y_max),
        num(v.width()),
        num(v.height())
    );
    let _ = writeln!(
        s,
        r#"<g transform="scale(1,-1)" fill="none" stroke-linejoin="round" stroke-linecap="round">"#
    );
    let bstroke = num(1.5 * stroke);
    match domain.outer() {
        Outer::Polygon(p) => {
            let _ = writeln!(
                s,
                r#"<polygon class="boundary" stroke="black" stroke-width="{bstroke}" points="{}"/>"#,
                points_attr(p.vertices())
            );
        }
        Outer::Circle(c) => {
            let _ = writeln!(
                s,
                r#"<circle class="boundary" stroke="black" stroke-width="{bstroke}" cx="{}" cy="{}" r="{}"/>"#,
                num(c.center.x),
                num(c.center.y),
                num(c.radius)
            );
        }
        Outer::UpperHalfPlane => {
            let _ = writeln!(
                s,
                r#"<line class="boundary" stroke="black" stroke-width="{bstroke}" x1="{}" y1="0" x2="{}" y2="0"/>"#,
                num(v.x_min),
                num(v.x_max)
            );
        }
    }
    for hole in domain.holes() {
        let _ = writeln!(
            s,
            r#"<polygon class="boundary" stroke="black" stroke-width="{bstroke}" points="{}"/>"#,
            points_attr(hole.vertices())
        );
    }
    for sl in domain.slits() {
        let _ = writeln!(
            s,
            r#"<line class="boundary" stroke="black" stroke-width="{bstroke}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(sl.a.x),
            num(sl.a.y),
            num(sl.b.x),
            num(sl.b.y)
        );
    }
    for p in domain.punctures() {
        let _ = writeln!(
            s,
            r#"<circle class="boundary" fill="black" cx="{}" cy="{}" r="{}"/>"#,
            num(p.x),
            num(p.y),
            num(2.0 * stroke)
        );
    }
    for d in decorations {
        match *d {
            Decoration::Inscribed { radius } => {
                let _ = writeln!(
                    s,
                    r##"<circle class="inscribed" stroke="#555555" stroke-width="{}" cx="0" cy="0" r="{}"/>"##,
                    num(stroke),
                    num(radius)
                );
            }
            Decoration::Reference { center, radius } => {
                let _ = writeln!(
                    s,
                    r##"<circle class="reference" stroke="#999999" stroke-dasharray="{} {}" stroke-width="{}" cx="{}" cy="{}" r="{}"/>"##,
                    num(4.0 * stroke),
                    num(3.0 * stroke),
                    num(stroke),
                    num(center.x),
                    num(center.y),
                    num(radius)
                );
            }
            Decoration::Marker { .. } => {}
        }
    }
    for (k, p) in paths.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<polyline class="path" stroke="{}" stroke-width="{}" points="{}"/>"#,
            PALETTE[k % PALETTE.len()],
            num(stroke),
            points_attr(&p.points)
        );
    }
    for d in decorations {
        if let Decoration::Marker { point } = *d {
            let _ = writeln!(
                s,
                r#"<circle class="marker" fill="black" cx="{}" cy="{}" r="{}"/>"#,
                num(point.x),
                num(point.y),
                num(3.0 * stroke)
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// View rectangle for a report: the domain box, unless the graph windows are
/// a tiny part of it (very large or unbounded domains).
pub fn report_view(report: &RunReport) -> Option<Rect> {
    let windows = report.graphs.iter().filter_map(|g| g.window).reduce(|a, b| a.union(&b));
    let bbox = report.domain.as_ref().and_then(|d| d.bounding_box());
    match (bbox, windows) {
        (Some(b), Some(w)) => {
            let area = |r: &Rect| r.width() * r.height();
            if area(&b) > 100.0 * area(&w) {
                Some(b.intersection(&w).unwrap_or(w))
            } else {
                Some(b)
            }
        }
        (b, w) => b.or(w),
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::param("path", format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `summary.csv`, `analyses.csv`, `path_<k>.csv`, `figure.svg` and
/// `report.json` into `dir`, as enabled by the scenario's output flags.
pub fn write_outputs(report: &RunReport, scenario: &Scenario, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: String, contents: String| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, &contents)?;
        written.push(p);
        Ok(())
    };
    let out = &scenario.outputs;
    if out.summary {
        emit("summary.csv".into(), summary_csv(report)?)?;
        emit("analyses.csv".into(), analyses_csv(report)?)?;
    }
    if out.paths {
        for (k, p) in report.paths.iter().enumerate() {
            if let Some(p) = p {
                emit(format!("path_{k}.csv"), path_csv(p)?)?;
            }
        }
    }
    if out.svg {
        if let Some(d) = &report.domain {
            let paths: Vec<&GeodesicPath> = report.paths.iter().flatten().collect();
            let svg = render_svg(d, &paths, &decorations(report, scenario), report_view(report));
            emit("figure.svg".into(), svg)?;
        }
    }
    if out.report {
        emit("report.json".into(), serde_json::to_string_pretty(report)? + "\n")?;
    }
    Ok(written)
}
