//! Discrete representations of compactly supported measures.
//!
//! Every measure is a finite list of weighted atoms. Quadrature constructors
//! discretize the analytic measures used by the built-in scenes; arbitrary
//! atom lists can be loaded from plain-text sample files.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::point::{weighted_mean, Point};

/// How the atoms were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    AnalyticQuadrature,
    Ifs,
    Dirac,
    File,
}

#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
    meta: Provenance,
}

impl DiscreteMeasure {
    pub fn from_parts(atoms: Vec<Point>, weights: Vec<f64>, meta: Provenance) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::Config(format!(
                "measure needs matching nonempty atom/weight lists ({} atoms, {} weights)",
                atoms.len(),
                weights.len()
            )));
        }
        for p in &atoms {
            if !p.is_finite() {
                return Err(Error::Config(
                    "measure atom has non-finite coordinates".into(),
                ));
            }
        }
        let mut total = 0.0;
        for w in &weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::Config(format!(
                    "measure weight {w} is negative or non-finite"
                )));
            }
            total += *w;
        }
        if total <= 0.0 {
            return Err(Error::Config("measure has zero total mass".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(DiscreteMeasure {
            atoms,
            weights,
            meta,
        })
    }

    /// Equal-weight nodes at equally spaced angles; quadrature error for
    /// Lipschitz integrands is O(1/nodes).
    pub fn uniform_circle(center: Point, radius: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::Config(format!(
                "uniform_circle needs at least 3 nodes, got {nodes}"
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::Config(format!(
                "uniform_circle radius must be positive, got {radius}"
            )));
        }
        let mut atoms = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            atoms.push(center + Point([radius * theta.cos(), radius * theta.sin(), 0.0]));
        }
        let w = 1.0 / nodes as f64;
        DiscreteMeasure::from_parts(atoms, vec![w; nodes], Provenance::AnalyticQuadrature)
    }

    /// The natural measure of the middle-third construction at level `depth`:
    /// `2^depth` atoms of weight `2^-depth` at the midpoints of the level
    /// intervals along `[a, b]`.
    pub fn cantor(a: Point, b: Point, depth: u32) -> Result<Self> {
        if depth < 1 {
            return Err(Error::Config("cantor measure needs depth >= 1".into()));
        }
        if depth > 24 {
            return Err(Error::Resource(format!(
                "cantor depth {depth} exceeds the supported maximum 24"
            )));
        }
        let axis = b - a;
        let n = 1usize << depth;
        let half = 0.5 * 3f64.powi(-(depth as i32));
        let mut atoms = Vec::with_capacity(n);
        for i in 0..n {
            let mut lo = 0.0;
            for k in 0..depth {
                if i >> (depth - 1 - k) & 1 == 1 {
                    lo += 2.0 * 3f64.powi(-(k as i32 + 1));
                }
            }
            atoms.push(a + axis * (lo + half));
        }
        let w = 1.0 / n as f64;
        DiscreteMeasure::from_parts(atoms, vec![w; n], Provenance::Ifs)
    }

    pub fn dirac(p: Point) -> Self {
        DiscreteMeasure {
            atoms: vec![p],
            weights: vec![1.0],
            meta: Provenance::Dirac,
        }
    }

    /// Arc-length-uniform quadrature on a polyline: trapezoid nodes per
    /// segment, shared vertices merged. Guarantees the vertices themselves
    /// appear as atoms.
    pub fn uniform_polyline(vertices: &[Point], nodes_per_segment: usize) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Config(
                "uniform_polyline needs at least 2 vertices".into(),
            ));
        }
        let k = nodes_per_segment.max(2) - 1;
        let mut atoms: Vec<Point> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut push = |p: Point, w: f64| {
            if let Some(j) = atoms.iter().position(|q| q.dist(p) < 1e-14) {
                weights[j] += w;
            } else {
                atoms.push(p);
                weights.push(w);
            }
        };
        for seg in vertices.windows(2) {
            let len = seg[0].dist(seg[1]);
            let axis = seg[1] - seg[0];
            let step_w = len / k as f64;
            for i in 0..=k {
                let w = if i == 0 || i == k {
                    0.5 * step_w
                } else {
                    step_w
                };
                push(seg[0] + axis * (i as f64 / k as f64), w);
            }
        }
        DiscreteMeasure::from_parts(atoms, weights, Provenance::AnalyticQuadrature)
    }

    /// Parses plain-text rows `x y [z] weight`. Rows with three fields are
    /// planar; NaN or negative entries are rejected and weights normalized.
    pub fn from_samples(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        Error::Config(format!("line {}: bad number {t:?}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            let (p, w) = match fields.len() {
                3 => (Point::xy(fields[0], fields[1]), fields[2]),
                4 => (Point::new(fields[0], fields[1], fields[2]), fields[3]),
                n => {
                    return Err(Error::Config(format!(
                        "line {}: expected 3 or 4 fields, got {n}",
                        lineno + 1
                    )));
                }
            };
            atoms.push(p);
            weights.push(w);
        }
        DiscreteMeasure::from_parts(atoms, weights, Provenance::File)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> Provenance {
        self.meta
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }

    pub fn mean(&self) -> Point {
        weighted_mean(&self.atoms, &self.weights).expect("measure has positive mass")
    }

    /// Total variance `E|X - E X|^2`.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|p| p.dist_sq(m))
    }

    pub fn support_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.atoms {
            for i in 0..3 {
                lo[i] = lo[i].min(p.0[i]);
                hi[i] = hi[i].max(p.0[i]);
            }
        }
        Point(hi).dist(Point(lo))
    }

    /// Push-forward under the deterministic projection selector: atoms are
    /// replaced by their selected projections with weights preserved, and
    /// coincident images (within `proj_tol`) merged.
    pub fn pushforward(&self, s: &ConstraintSet) -> Result<Self> {
        let (images, _) = s.project_set(&self.atoms)?;
        let tol = s.proj_tol();
        let mut atoms: Vec<Point> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (img, w) in images.into_iter().zip(&self.weights) {
            if let Some(j) = atoms.iter().position(|q| q.dist(img) <= tol) {
                weights[j] += *w;
            } else {
                atoms.push(img);
                weights.push(*w);
            }
        }
        DiscreteMeasure::from_parts(atoms, weights, self.meta)
    }
}
