//! Scenario files: a flat keyed text format (section headers + `key = value`)
//! describing one measure, one constraint set, solver options, and the
//! analysis to run — plus the named built-in presets.

use std::collections::BTreeMap;

use crate::dimension::CurveKind;
use crate::error::{Error, Result};
use crate::geometry::{ConstraintSet, Shape};
use crate::measures::DiscreteMeasure;
use crate::point::Point;
use crate::quantizer::{Order, SolveOptions};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub curve: CurveKind,
    pub window: f64,
    pub box_scales: Vec<f64>,
    pub run_box: bool,
    pub u1_eps: Vec<f64>,
    pub run_u1: bool,
    pub u3_eps: Vec<f64>,
    /// `None` means: substitute the box-dimension estimate and label the
    /// verdict accordingly.
    pub u3_s: Option<f64>,
    pub run_u3: bool,
    pub ahlfors_d: Option<f64>,
    pub ahlfors_radii: Vec<f64>,
    pub ahlfors_centers: usize,
    pub run_ahlfors: bool,
    pub probe_count: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            curve: CurveKind::Hat,
            window: 0.5,
            box_scales: (3..=7).map(|k| 2f64.powi(-k)).collect(),
            run_box: true,
            u1_eps: vec![0.2, 0.1, 0.05, 0.025],
            run_u1: true,
            u3_eps: vec![0.2, 0.1, 0.05, 0.025],
            u3_s: None,
            run_u3: true,
            ahlfors_d: None,
            ahlfors_radii: (2..=10).map(|k| 2f64.powi(-k)).collect(),
            ahlfors_centers: 64,
            run_ahlfors: false,
            probe_count: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub dim: usize,
    pub r: Order,
    pub n_list: Vec<usize>,
    /// n used by the single-codebook `quantize` run.
    pub quantize_n: usize,
    pub measure: DiscreteMeasure,
    pub constraint: ConstraintSet,
    pub solver: SolveOptions,
    pub analysis: AnalysisOptions,
}

impl Scenario {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.solver.seed = seed;
        self
    }
}

pub const PRESET_NAMES: [&str; 5] = [
    "circle-disc",
    "cantor-line",
    "dirac-circle",
    "vshape",
    "circle-ball-half",
];

/// Builds one of the named presets.
pub fn preset(name: &str) -> Result<Scenario> {
    let mut analysis = AnalysisOptions::default();
    match name {
        "circle-disc" => {
            let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096)?;
            let constraint = ConstraintSet::new(
                Shape::ClosedBall {
                    center: Point::ORIGIN,
                    radius: 1.0,
                },
                2,
            )?;
            analysis.u3_s = Some(1.0);
            analysis.ahlfors_d = Some(1.0);
            analysis.run_ahlfors = true;
            Ok(Scenario {
                name: name.into(),
                seed: 0,
                dim: 2,
                r: Order::Finite(2.0),
                n_list: vec![2, 3, 4, 8, 16, 32, 64],
                quantize_n: 4,
                measure,
                constraint,
                solver: SolveOptions::default(),
                analysis,
            })
        }
        "circle-ball-half" => {
            let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096)?;
            let constraint = ConstraintSet::new(
                Shape::ClosedBall {
                    center: Point::ORIGIN,
                    radius: 0.5,
                },
                2,
            )?;
            analysis.u3_s = Some(1.0);
            analysis.ahlfors_d = Some(1.0);
            analysis.run_ahlfors = true;
            Ok(Scenario {
                name: name.into(),
                seed: 0,
                dim: 2,
                r: Order::Finite(2.0),
                n_list: vec![2, 4, 8, 16, 32],
                quantize_n: 4,
                measure,
                constraint,
                solver: SolveOptions::default(),
                analysis,
            })
        }
        "cantor-line" => {
            let measure = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 10)?;
            let constraint = ConstraintSet::new(
                Shape::Segment {
                    a: Point::xy(-1.0, 1.0),
                    b: Point::xy(2.0, 1.0),
                },
                2,
            )?;
            analysis.box_scales = (2..=8).map(|k| 3f64.powi(-k)).collect();
            analysis.u1_eps = (2..=5).map(|k| 3f64.powi(-k)).collect();
            analysis.u3_eps = analysis.u1_eps.clone();
            analysis.u3_s = None; // use the box estimate
            analysis.ahlfors_d = None;
            analysis.ahlfors_radii = (1..=8).map(|k| 3f64.powi(-k)).collect();
            analysis.run_ahlfors = true;
            Ok(Scenario {
                name: name.into(),
                seed: 0,
                dim: 2,
                r: Order::Finite(2.0),
                n_list: vec![2, 4, 8, 16, 32],
                quantize_n: 2,
                measure,
                constraint,
                solver: SolveOptions::default(),
                analysis,
            })
        }
        "dirac-circle" => {
            let measure = DiscreteMeasure::dirac(Point::ORIGIN);
            let constraint = ConstraintSet::new(Shape::circle(Point::ORIGIN, 1.0), 2)?;
            analysis.u1_eps = vec![0.5, 0.25, 0.1];
            analysis.u3_eps = analysis.u1_eps.clone();
            analysis.u3_s = Some(1.0);
            analysis.run_box = false;
            Ok(Scenario {
                name: name.into(),
                seed: 0,
                dim: 2,
                r: Order::Finite(2.0),
                n_list: vec![1, 2, 4, 8],
                quantize_n: 1,
                measure,
                constraint,
                solver: SolveOptions::default(),
                analysis,
            })
        }
        "vshape" => {
            let arm = 3.0;
            let right = Shape::Polyline {
                vertices: vec![
                    Point::xy(1.0 + arm, arm),
                    Point::xy(1.0, 0.0),
                    Point::xy(1.0 + arm, -arm),
                ],
            };
            let left = Shape::Polyline {
                vertices: vec![
                    Point::xy(-1.0 - arm, arm),
                    Point::xy(-1.0, 0.0),
                    Point::xy(-1.0 - arm, -arm),
                ],
            };
            let top = Shape::Polyline {
                vertices: vec![
                    Point::xy(-arm, 1.0 + arm),
                    Point::xy(0.0, 1.0),
                    Point::xy(arm, 1.0 + arm),
                ],
            };
            let measure = DiscreteMeasure::uniform_polyline(
                &[Point::xy(-1.0, -1.0), Point::ORIGIN, Point::xy(1.0, -1.0)],
                129,
            )?;
            let constraint = ConstraintSet::new(Shape::Union(vec![right, left, top]), 2)?;
            analysis.u1_eps = vec![0.5, 0.25, 0.1];
            analysis.u3_eps = analysis.u1_eps.clone();
            analysis.u3_s = Some(1.0);
            Ok(Scenario {
                name: name.into(),
                seed: 0,
                dim: 2,
                r: Order::Finite(2.0),
                n_list: vec![2, 4, 8, 16],
                quantize_n: 4,
                measure,
                constraint,
                solver: SolveOptions::default(),
                analysis,
            })
        }
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

// ---------------------------------------------------------------------------
// flat keyed config format

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            current = line[1..line.len() - 1].trim().to_lowercase();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value`",
                lineno + 1
            )));
        };
        if current.is_empty() {
            return Err(Error::Config(format!(
                "line {}: key outside any [section]",
                lineno + 1
            )));
        }
        sections
            .get_mut(&current)
            .unwrap()
            .insert(key.trim().to_lowercase(), value.trim().to_string());
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&'a str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("[{}] is missing key `{key}`", self.name)))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::Config(format!("[{}] {key} = {v:?} is not a number", self.name))
                })
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    Error::Config(format!("[{}] {key} = {v:?} is not an integer", self.name))
                })
            })
            .transpose()
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| {
                            Error::Config(format!("[{}] {key}: bad number {t:?}", self.name))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|_| {
                            Error::Config(format!("[{}] {key}: bad integer {t:?}", self.name))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn point(&self, key: &str) -> Result<Option<Point>> {
        self.get(key).map(parse_point).transpose()
    }
}

fn parse_point(text: &str) -> Result<Point> {
    let coords: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad coordinate {t:?}")))
        })
        .collect::<Result<_>>()?;
    match coords.len() {
        1 => Ok(Point::new(coords[0], 0.0, 0.0)),
        2 => Ok(Point::xy(coords[0], coords[1])),
        3 => Ok(Point::new(coords[0], coords[1], coords[2])),
        n => Err(Error::Config(format!(
            "point needs 1-3 coordinates, got {n}"
        ))),
    }
}

fn parse_point_list(text: &str) -> Result<Vec<Point>> {
    text.split(';').map(|t| parse_point(t.trim())).collect()
}

fn parse_f64(t: &str) -> Result<f64> {
    t.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("bad number {t:?}")))
}

/// Compact one-line shape expression `kind: arg; arg; ...`, used for union
/// members.
fn parse_shape_expr(text: &str) -> Result<Shape> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("shape expression {text:?} needs `kind: args`")))?;
    let kind = kind.trim().to_lowercase();
    let args: Vec<&str> = rest.split(';').map(|t| t.trim()).collect();
    let need = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(Error::Config(format!(
                "shape {kind} expects {n} args, got {}",
                args.len()
            )));
        }
        Ok(())
    };
    match kind.as_str() {
        "closed_ball" | "ball" => {
            need(2)?;
            Ok(Shape::ClosedBall {
                center: parse_point(args[0])?,
                radius: parse_f64(args[1])?,
            })
        }
        "circle" | "sphere" => {
            need(2)?;
            Ok(Shape::Sphere {
                center: parse_point(args[0])?,
                radius: parse_f64(args[1])?,
            })
        }
        "segment" => {
            need(2)?;
            Ok(Shape::Segment {
                a: parse_point(args[0])?,
                b: parse_point(args[1])?,
            })
        }
        "polyline" => Ok(Shape::Polyline {
            vertices: parse_point_list(rest)?,
        }),
        "cantor_segment" | "cantor" => {
            need(3)?;
            Ok(Shape::CantorSegment {
                a: parse_point(args[0])?,
                b: parse_point(args[1])?,
                depth: parse_f64(args[2])? as u32,
            })
        }
        "finite_points" | "points" => Ok(Shape::FinitePointSet {
            points: parse_point_list(rest)?,
        }),
        other => Err(Error::Config(format!("unknown shape kind {other:?}"))),
    }
}

fn shape_from_section(sec: &Section) -> Result<Shape> {
    let kind = sec.require("kind")?.to_lowercase();
    match kind.as_str() {
        "closed_ball" | "ball" => Ok(Shape::ClosedBall {
            center: sec.point("center")?.unwrap_or(Point::ORIGIN),
            radius: sec
                .f64("radius")?
                .ok_or_else(|| Error::Config("ball needs radius".into()))?,
        }),
        "circle" | "sphere" => Ok(Shape::Sphere {
            center: sec.point("center")?.unwrap_or(Point::ORIGIN),
            radius: sec
                .f64("radius")?
                .ok_or_else(|| Error::Config("circle needs radius".into()))?,
        }),
        "segment" => Ok(Shape::Segment {
            a: sec
                .point("a")?
                .ok_or_else(|| Error::Config("segment needs a".into()))?,
            b: sec
                .point("b")?
                .ok_or_else(|| Error::Config("segment needs b".into()))?,
        }),
        "polyline" => Ok(Shape::Polyline {
            vertices: parse_point_list(sec.require("vertices")?)?,
        }),
        "cantor_segment" | "cantor" => Ok(Shape::CantorSegment {
            a: sec
                .point("a")?
                .ok_or_else(|| Error::Config("cantor segment needs a".into()))?,
            b: sec
                .point("b")?
                .ok_or_else(|| Error::Config("cantor segment needs b".into()))?,
            depth: sec.usize("depth")?.unwrap_or(1) as u32,
        }),
        "finite_points" | "points" => Ok(Shape::FinitePointSet {
            points: parse_point_list(sec.require("points")?)?,
        }),
        "union" => {
            let mut members = Vec::new();
            for i in 1.. {
                match sec.get(&format!("member{i}")) {
                    Some(expr) => members.push(parse_shape_expr(expr)?),
                    None => break,
                }
            }
            if members.is_empty() {
                return Err(Error::Config(
                    "union needs member1, member2, ... entries".into(),
                ));
            }
            Ok(Shape::Union(members))
        }
        other => Err(Error::Config(format!("unknown constraint kind {other:?}"))),
    }
}

fn measure_from_section(
    sec: &Section,
    base_dir: Option<&std::path::Path>,
) -> Result<DiscreteMeasure> {
    let kind = sec.require("kind")?.to_lowercase();
    match kind.as_str() {
        "uniform_circle" => DiscreteMeasure::uniform_circle(
            sec.point("center")?.unwrap_or(Point::ORIGIN),
            sec.f64("radius")?.unwrap_or(1.0),
            sec.usize("nodes")?.unwrap_or(4096),
        ),
        "cantor" => DiscreteMeasure::cantor(
            sec.point("a")?.unwrap_or(Point::ORIGIN),
            sec.point("b")?.unwrap_or(Point::xy(1.0, 0.0)),
            sec.usize("depth")?.unwrap_or(10) as u32,
        ),
        "dirac" => Ok(DiscreteMeasure::dirac(
            sec.point("point")?.unwrap_or(Point::ORIGIN),
        )),
        "uniform_polyline" => DiscreteMeasure::uniform_polyline(
            &parse_point_list(sec.require("vertices")?)?,
            sec.usize("nodes_per_segment")?.unwrap_or(65),
        ),
        "file" => {
            let path = sec.require("path")?;
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => std::path::PathBuf::from(path),
            };
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::Config(format!("cannot read sample file {full:?}: {e}")))?;
            DiscreteMeasure::from_samples(&text)
        }
        other => Err(Error::Config(format!("unknown measure kind {other:?}"))),
    }
}

/// Parses a scenario document; `base_dir` anchors relative sample-file paths.
pub fn parse_scenario(text: &str, base_dir: Option<&std::path::Path>) -> Result<Scenario> {
    let sections = parse_sections(text)?;
    let known = ["scenario", "measure", "constraint", "solver", "analysis"];
    for name in sections.keys() {
        if !known.contains(&name.as_str()) {
            return Err(Error::Config(format!("unknown section [{name}]")));
        }
    }
    let empty = BTreeMap::new();
    let section = |name: &'static str| Section {
        name,
        map: sections.get(name).unwrap_or(&empty),
    };

    let sc = section("scenario");
    let name = sc.get("name").unwrap_or("scenario").to_string();
    let seed = sc.usize("seed")?.unwrap_or(0) as u64;
    let dim = sc.usize("dim")?.unwrap_or(2);
    let r = Order::parse(sc.get("r").unwrap_or("2"))?;
    let n_list = sc
        .usize_list("n_list")?
        .unwrap_or_else(|| vec![2, 4, 8, 16]);
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "n_list must be nonempty and strictly increasing".into(),
        ));
    }
    let quantize_n = sc.usize("n")?.unwrap_or(*n_list.last().unwrap());

    let measure_sec = sections
        .get("measure")
        .ok_or_else(|| Error::Config("missing [measure] section".into()))?;
    let measure = measure_from_section(
        &Section {
            name: "measure",
            map: measure_sec,
        },
        base_dir,
    )?;

    let constraint_sec = sections
        .get("constraint")
        .ok_or_else(|| Error::Config("missing [constraint] section".into()))?;
    let shape = shape_from_section(&Section {
        name: "constraint",
        map: constraint_sec,
    })?;
    let constraint = ConstraintSet::new(shape, dim)?;

    let sv = section("solver");
    let solver = SolveOptions {
        restarts: sv.usize("restarts")?.unwrap_or(16),
        max_iters: sv.usize("max_iters")?.unwrap_or(500),
        tol: sv.f64("tol")?.unwrap_or(1e-10),
        seed,
        extra_starts: Vec::new(),
    };

    let an = section("analysis");
    let mut analysis = AnalysisOptions::default();
    if let Some(kind) = an.get("curve") {
        analysis.curve = match kind.to_lowercase().as_str() {
            "hat" => CurveKind::Hat,
            "tilde" => CurveKind::Tilde,
            other => {
                return Err(Error::Config(format!(
                    "curve must be hat or tilde, got {other:?}"
                )))
            }
        };
    }
    if let Some(w) = an.f64("window")? {
        analysis.window = w;
    }
    if let Some(scales) = an.f64_list("box_scales")? {
        analysis.box_scales = scales;
    }
    if let Some(eps) = an.f64_list("u1_eps")? {
        analysis.u1_eps = eps;
    }
    if let Some(eps) = an.f64_list("u3_eps")? {
        analysis.u3_eps = eps;
    }
    match an.get("u3_s") {
        Some("auto") | None => analysis.u3_s = None,
        Some(v) => analysis.u3_s = Some(parse_f64(v)?),
    }
    match an.get("ahlfors_d") {
        None => {}
        Some("auto") => {
            analysis.ahlfors_d = None;
            analysis.run_ahlfors = true;
        }
        Some(v) => {
            analysis.ahlfors_d = Some(parse_f64(v)?);
            analysis.run_ahlfors = true;
        }
    }
    if let Some(radii) = an.f64_list("ahlfors_radii")? {
        analysis.ahlfors_radii = radii;
    }
    if let Some(c) = an.usize("ahlfors_centers")? {
        analysis.ahlfors_centers = c;
    }
    if let Some(pc) = an.usize("probe_count")? {
        analysis.probe_count = pc;
    }
    if let Some(list) = an.get("checks") {
        analysis.run_u1 = false;
        analysis.run_u3 = false;
        analysis.run_box = false;
        analysis.run_ahlfors = false;
        for item in list.split(',') {
            match item.trim().to_lowercase().as_str() {
                "u1" => analysis.run_u1 = true,
                "u3" => analysis.run_u3 = true,
                "box" => analysis.run_box = true,
                "ahlfors" => analysis.run_ahlfors = true,
                other => return Err(Error::Config(format!("unknown check {other:?}"))),
            }
        }
    }

    Ok(Scenario {
        name,
        seed,
        dim,
        r,
        n_list,
        quantize_n,
        measure,
        constraint,
        solver,
        analysis,
    })
}
