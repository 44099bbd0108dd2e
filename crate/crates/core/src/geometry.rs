//! Closed constraint sets and the metric projection onto them.
//!
//! A constraint set is a closed subset of `R^D` (D ∈ {1,2,3}) built from a
//! small shape vocabulary. The projection is multivalued in general; every
//! query reports a deterministic representative (lexicographically smallest
//! minimizer), the full set of discrete minimizers found, and a flag for the
//! degenerate case where the minimizers form a continuum (projecting the
//! center of a sphere onto it).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::Point;

/// Hard cap on enumerated sample points in `sample_boundary`.
const SAMPLE_BUDGET: usize = 4_000_000;

/// Cap on reported minimizers; discrete ties in the supported scenes never
/// exceed three, continua are flagged instead of enumerated.
const MAX_MINIMIZERS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Solid ball `{x : |x - center| <= radius}`.
    ClosedBall {
        center: Point,
        radius: f64,
    },
    /// Metric sphere `{x : |x - center| = radius}`; a circle in planar scenes.
    Sphere {
        center: Point,
        radius: f64,
    },
    Segment {
        a: Point,
        b: Point,
    },
    Polyline {
        vertices: Vec<Point>,
    },
    Union(Vec<Shape>),
    /// Level-`depth` approximation of the middle-third Cantor set along the
    /// segment `[a, b]`: the union of `2^depth` closed subintervals.
    CantorSegment {
        a: Point,
        b: Point,
        depth: u32,
    },
    FinitePointSet {
        points: Vec<Point>,
    },
}

impl Shape {
    pub fn circle(center: Point, radius: f64) -> Shape {
        Shape::Sphere { center, radius }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Shape::ClosedBall { radius, .. } | Shape::Sphere { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config(format!(
                        "shape radius must be positive, got {radius}"
                    )));
                }
            }
            Shape::Segment { a, b } => {
                if a.dist_sq(*b) == 0.0 {
                    return Err(Error::Config("segment endpoints coincide".into()));
                }
            }
            Shape::Polyline { vertices } => {
                if vertices.len() < 2 {
                    return Err(Error::Config("polyline needs at least 2 vertices".into()));
                }
            }
            Shape::Union(members) => {
                if members.is_empty() {
                    return Err(Error::Config("union has no members".into()));
                }
                for m in members {
                    m.validate()?;
                }
            }
            Shape::CantorSegment { a, b, depth } => {
                if a.dist_sq(*b) == 0.0 {
                    return Err(Error::Config("cantor segment endpoints coincide".into()));
                }
                if *depth > 24 {
                    return Err(Error::Config(format!(
                        "cantor depth {depth} exceeds the supported maximum 24"
                    )));
                }
            }
            Shape::FinitePointSet { points } => {
                if points.is_empty() {
                    return Err(Error::Config("finite point set is empty".into()));
                }
            }
        }
        Ok(())
    }

    fn bbox(&self) -> (Point, Point) {
        fn of_points(pts: &[Point]) -> (Point, Point) {
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for p in pts {
                for i in 0..3 {
                    lo[i] = lo[i].min(p.0[i]);
                    hi[i] = hi[i].max(p.0[i]);
                }
            }
            (Point(lo), Point(hi))
        }
        match self {
            Shape::ClosedBall { center, radius } | Shape::Sphere { center, radius } => {
                (*center - Point([*radius; 3]), *center + Point([*radius; 3]))
            }
            Shape::Segment { a, b } | Shape::CantorSegment { a, b, .. } => of_points(&[*a, *b]),
            Shape::Polyline { vertices } => of_points(vertices),
            Shape::FinitePointSet { points } => of_points(points),
            Shape::Union(members) => {
                let boxes: Vec<_> = members.iter().map(|m| m.bbox()).collect();
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for (l, h) in boxes {
                    for i in 0..3 {
                        lo[i] = lo[i].min(l.0[i]);
                        hi[i] = hi[i].max(h.0[i]);
                    }
                }
                (Point(lo), Point(hi))
            }
        }
    }
}

/// Count of distinct projection minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TieCount {
    Finite(usize),
    /// The minimizers form a continuum (e.g. a whole sphere); only the
    /// deterministic representative is reported.
    Continuum,
}

impl TieCount {
    pub fn is_tie(&self) -> bool {
        !matches!(self, TieCount::Finite(1))
    }
}

impl std::fmt::Display for TieCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TieCount::Finite(k) => write!(f, "{k}"),
            TieCount::Continuum => write!(f, "continuum"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// Lexicographically smallest minimizer.
    pub representative: Point,
    pub distance: f64,
    pub tie_count: TieCount,
    /// Distinct minimizers within `proj_tol` of the optimum, capped at 16.
    pub all_minimizers: Vec<Point>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    point: Point,
    dist: f64,
    continuum: bool,
}

/// A closed constraint set with its projection tolerance.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    shape: Shape,
    dim: usize,
    proj_tol: f64,
}

impl ConstraintSet {
    /// Builds a constraint set in ambient dimension `dim`, validating the
    /// shape and deriving the default projection tolerance
    /// (`1e-12 ×` scene diameter, floored for point-like scenes).
    pub fn new(shape: Shape, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!(
                "ambient dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        shape.validate()?;
        let (lo, hi) = shape.bbox();
        let diameter = hi.dist(lo);
        let proj_tol = 1e-12 * diameter.max(1.0);
        Ok(ConstraintSet {
            shape,
            dim,
            proj_tol,
        })
    }

    pub fn with_proj_tol(mut self, tol: f64) -> Self {
        self.proj_tol = tol;
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn proj_tol(&self) -> f64 {
        self.proj_tol
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.shape.bbox();
        hi.dist(lo)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        self.shape.bbox()
    }

    /// Distance from `p` to the set.
    pub fn distance_to(&self, p: Point) -> f64 {
        let mut cands = Vec::new();
        collect_min_candidates(&self.shape, p, self.proj_tol, &mut cands);
        cands.iter().map(|c| c.dist).fold(f64::INFINITY, f64::min)
    }

    /// Membership test at tolerance `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.distance_to(p) <= tol
    }

    /// Metric projection of `p` onto the set.
    ///
    /// The representative is the lexicographically smallest global minimizer;
    /// all distinct minimizers within `proj_tol` of the optimal distance are
    /// reported, and a continuum of minimizers is flagged rather than
    /// enumerated.
    pub fn project(&self, p: Point) -> ProjectionResult {
        let tol = self.proj_tol;
        let mut cands = Vec::new();
        collect_min_candidates(&self.shape, p, tol, &mut cands);
        debug_assert!(!cands.is_empty());

        let dmin = cands.iter().map(|c| c.dist).fold(f64::INFINITY, f64::min);
        let mut kept: Vec<Candidate> = cands.into_iter().filter(|c| c.dist <= dmin + tol).collect();
        kept.sort_by(|a, b| a.point.lex_cmp(&b.point));

        let continuum = kept.iter().any(|c| c.continuum);
        let mut minimizers: Vec<Point> = Vec::new();
        for c in &kept {
            if !minimizers.iter().any(|m| m.dist(c.point) <= tol) {
                minimizers.push(c.point);
            }
        }
        let tie_count = if continuum {
            TieCount::Continuum
        } else {
            TieCount::Finite(minimizers.len())
        };
        minimizers.truncate(MAX_MINIMIZERS);
        let representative = minimizers[0];
        ProjectionResult {
            representative,
            distance: p.dist(representative),
            tie_count,
            all_minimizers: minimizers,
        }
    }

    /// Pointwise projection of a batch through the deterministic selector.
    /// Returns the image points and their distances; the image is a finite
    /// sample of the projected support.
    pub fn project_set(&self, pts: &[Point]) -> Result<(Vec<Point>, Vec<f64>)> {
        if pts.is_empty() {
            return Err(Error::Usage("project_set called with no points".into()));
        }
        let mut images = Vec::with_capacity(pts.len());
        let mut dists = Vec::with_capacity(pts.len());
        for &p in pts {
            let r = self.project(p);
            images.push(r.representative);
            dists.push(r.distance);
        }
        Ok((images, dists))
    }

    /// Finite net of the set: every point of the set (its level-`depth`
    /// approximation for Cantor segments) lies within `resolution` of some
    /// sample, and every sample lies on the set.
    pub fn sample_boundary(&self, resolution: f64) -> Result<Vec<Point>> {
        if !(resolution > 0.0) {
            return Err(Error::Usage(format!(
                "sampling resolution must be positive, got {resolution}"
            )));
        }
        let mut out = Vec::new();
        sample_shape(&self.shape, self.dim, resolution, &mut out)?;
        if out.len() > SAMPLE_BUDGET {
            return Err(Error::Resource(format!(
                "sampling produced {} points (budget {SAMPLE_BUDGET}); coarsen the resolution",
                out.len()
            )));
        }
        Ok(out)
    }
}

fn collect_min_candidates(shape: &Shape, p: Point, tol: f64, out: &mut Vec<Candidate>) {
    match shape {
        Shape::ClosedBall { center, radius } => {
            let d = p.dist(*center);
            if d <= *radius {
                out.push(Candidate {
                    point: p,
                    dist: 0.0,
                    continuum: false,
                });
            } else {
                let q = *center + (p - *center) * (*radius / d);
                out.push(Candidate {
                    point: q,
                    dist: d - radius,
                    continuum: false,
                });
            }
        }
        Shape::Sphere { center, radius } => {
            let v = p - *center;
            let d = v.norm();
            if d <= tol {
                // Center of the sphere: every surface point minimizes.
                // Report the angle-0 representative and flag the continuum.
                let q = *center + Point([*radius, 0.0, 0.0]);
                out.push(Candidate {
                    point: q,
                    dist: p.dist(q),
                    continuum: true,
                });
            } else {
                let q = *center + v * (*radius / d);
                out.push(Candidate {
                    point: q,
                    dist: (d - radius).abs(),
                    continuum: false,
                });
            }
        }
        Shape::Segment { a, b } => {
            let q = project_segment(p, *a, *b);
            out.push(Candidate {
                point: q,
                dist: p.dist(q),
                continuum: false,
            });
        }
        Shape::Polyline { vertices } => {
            for w in vertices.windows(2) {
                let q = project_segment(p, w[0], w[1]);
                out.push(Candidate {
                    point: q,
                    dist: p.dist(q),
                    continuum: false,
                });
            }
        }
        Shape::Union(members) => {
            for m in members {
                collect_min_candidates(m, p, tol, out);
            }
        }
        Shape::CantorSegment { a, b, depth } => {
            let axis = *b - *a;
            let len_sq = axis.norm_sq();
            let t = (p - *a).dot(axis) / len_sq;
            let mut best = f64::INFINITY;
            let mut ts = Vec::new();
            cantor_nearest_ts(t, 0.0, 1.0, *depth, &mut best, &mut ts);
            for tv in ts {
                let q = *a + axis * tv;
                out.push(Candidate {
                    point: q,
                    dist: p.dist(q),
                    continuum: false,
                });
            }
        }
        Shape::FinitePointSet { points } => {
            let dmin = points
                .iter()
                .map(|q| p.dist(*q))
                .fold(f64::INFINITY, f64::min);
            for q in points {
                let d = p.dist(*q);
                if d <= dmin + tol {
                    out.push(Candidate {
                        point: *q,
                        dist: d,
                        continuum: false,
                    });
                }
            }
        }
    }
}

fn project_segment(p: Point, a: Point, b: Point) -> Point {
    let axis = b - a;
    let t = ((p - a).dot(axis) / axis.norm_sq()).clamp(0.0, 1.0);
    a + axis * t
}

/// Nearest parameter values to `t` in the level-`depth` Cantor set on
/// `[lo, hi]`, with branch-and-bound pruning; equidistant minimizers from
/// both sides of a gap are all retained.
fn cantor_nearest_ts(t: f64, lo: f64, hi: f64, depth: u32, best: &mut f64, out: &mut Vec<f64>) {
    const TIE_EPS: f64 = 1e-13;
    let bound = if t < lo {
        lo - t
    } else if t > hi {
        t - hi
    } else {
        0.0
    };
    if bound > *best + TIE_EPS {
        return;
    }
    if depth == 0 {
        let c = t.clamp(lo, hi);
        let d = (t - c).abs();
        if d + TIE_EPS < *best {
            out.clear();
            out.push(c);
            *best = d;
        } else if d <= *best + TIE_EPS {
            out.push(c);
            *best = best.min(d);
        }
        return;
    }
    let third = (hi - lo) / 3.0;
    cantor_nearest_ts(t, lo, lo + third, depth - 1, best, out);
    cantor_nearest_ts(t, hi - third, hi, depth - 1, best, out);
}

fn sample_shape(shape: &Shape, dim: usize, res: f64, out: &mut Vec<Point>) -> Result<()> {
    match shape {
        Shape::ClosedBall { center, radius } => sample_ball(*center, *radius, dim, res, out),
        Shape::Sphere { center, radius } => sample_sphere(*center, *radius, dim, res, out),
        Shape::Segment { a, b } => {
            sample_segment(*a, *b, res, out);
            Ok(())
        }
        Shape::Polyline { vertices } => {
            for (i, w) in vertices.windows(2).enumerate() {
                let before = out.len();
                sample_segment(w[0], w[1], res, out);
                if i > 0 {
                    // shared vertex already emitted by the previous segment
                    out.remove(before);
                }
            }
            Ok(())
        }
        Shape::Union(members) => {
            for m in members {
                sample_shape(m, dim, res, out)?;
            }
            Ok(())
        }
        Shape::CantorSegment { a, b, depth } => sample_cantor(*a, *b, *depth, res, out),
        Shape::FinitePointSet { points } => {
            out.extend_from_slice(points);
            Ok(())
        }
    }
}

fn sample_segment(a: Point, b: Point, res: f64, out: &mut Vec<Point>) {
    let len = a.dist(b);
    let k = segment_steps(len, res);
    let axis = b - a;
    for i in 0..=k {
        out.push(a + axis * (i as f64 / k as f64));
    }
}

/// Number of equal subintervals so the spacing is at most `res`; exact
/// multiples are not bumped up by floating-point noise.
fn segment_steps(len: f64, res: f64) -> usize {
    let ratio = len / res;
    let k = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round()
    } else {
        ratio.ceil()
    };
    (k as usize).max(1)
}

fn sample_sphere(
    center: Point,
    radius: f64,
    dim: usize,
    res: f64,
    out: &mut Vec<Point>,
) -> Result<()> {
    match dim {
        1 => {
            out.push(center - Point([radius, 0.0, 0.0]));
            out.push(center + Point([radius, 0.0, 0.0]));
        }
        2 => {
            let n = segment_steps(2.0 * std::f64::consts::PI * radius, res);
            for j in 0..n {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                out.push(center + Point([radius * theta.cos(), radius * theta.sin(), 0.0]));
            }
        }
        _ => {
            let n_polar = segment_steps(std::f64::consts::PI * radius, res);
            for i in 0..=n_polar {
                let phi = std::f64::consts::PI * i as f64 / n_polar as f64;
                let ring_r = radius * phi.sin();
                let z = radius * phi.cos();
                let n_az = segment_steps((2.0 * std::f64::consts::PI * ring_r).max(res), res);
                for j in 0..n_az {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / n_az as f64;
                    out.push(center + Point([ring_r * theta.cos(), ring_r * theta.sin(), z]));
                    if ring_r == 0.0 {
                        break;
                    }
                }
            }
        }
    }
    Ok(())
}

fn sample_ball(
    center: Point,
    radius: f64,
    dim: usize,
    res: f64,
    out: &mut Vec<Point>,
) -> Result<()> {
    let k = (radius / res).ceil() as i64;
    let expect = (2 * k + 1).pow(dim as u32);
    if expect > SAMPLE_BUDGET as i64 {
        return Err(Error::Resource(format!(
            "ball grid would hold {expect} points (budget {SAMPLE_BUDGET}); coarsen the resolution"
        )));
    }
    let range = |active: bool| if active { -k..=k } else { 0..=0 };
    for ix in range(true) {
        for iy in range(dim >= 2) {
            for iz in range(dim >= 3) {
                let q = center + Point([ix as f64 * res, iy as f64 * res, iz as f64 * res]);
                if q.dist(center) <= radius {
                    out.push(q);
                }
            }
        }
    }
    // Boundary samples keep the net tight near the sphere where the grid
    // cells are clipped.
    sample_sphere(center, radius, dim, res, out)
}

fn sample_cantor(a: Point, b: Point, depth: u32, res: f64, out: &mut Vec<Point>) -> Result<()> {
    if depth >= 22 || 1u64 << depth > SAMPLE_BUDGET as u64 {
        return Err(Error::Resource(
            "cantor sampling budget exceeded; reduce the depth".into(),
        ));
    }
    let len = a.dist(b);
    let axis = b - a;
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (lo, hi) in intervals {
            let third = (hi - lo) / 3.0;
            next.push((lo, lo + third));
            next.push((hi - third, hi));
        }
        intervals = next;
    }
    for (lo, hi) in intervals {
        let ilen = (hi - lo) * len;
        if ilen > 2.0 * res {
            let pa = a + axis * lo;
            let pb = a + axis * hi;
            sample_segment(pa, pb, res, out);
        } else {
            // one representative covers the whole level interval
            out.push(a + axis * (0.5 * (lo + hi)));
        }
    }
    Ok(())
}
