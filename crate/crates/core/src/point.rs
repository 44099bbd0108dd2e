//! Points in ambient space.
//!
//! Every point is stored as `[f64; 3]`; scenes in dimension 1 or 2 leave the
//! trailing coordinates at zero. Keeping a single fixed-size representation
//! avoids generic dimension plumbing everywhere else.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    /// Planar point with `z = 0`.
    pub fn xy(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(*self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: Point) -> f64 {
        (*self - other).norm_sq()
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Lexicographic order on coordinates. Used as the deterministic
    /// tie-break among equidistant projection candidates.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for i in 0..3 {
            match self.0[i].partial_cmp(&other.0[i]) {
                Some(Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        Ordering::Equal
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Weighted mean of a point set; `None` when the total weight vanishes.
pub fn weighted_mean(points: &[Point], weights: &[f64]) -> Option<Point> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut acc = Point::ORIGIN;
    for (p, w) in points.iter().zip(weights) {
        acc = acc + *p * *w;
    }
    Some(acc * (1.0 / total))
}

/// Format a float with 12 significant digits, the precision used by all
/// file outputs.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.11e}", x);
    // Prefer plain decimal when the exponent is small, matching how the
    // outputs are read back by plotting scripts.
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let digits = (11 - exp).max(0) as usize;
        let t = format!("{:.*}", digits, x);
        let t = t.trim_end_matches('0').trim_end_matches('.').to_string();
        if t == "-0" {
            return "0".to_string();
        }
        return t;
    }
    s
}

/// Round to 12 significant decimal digits. Applied to report fields so that
/// serialized JSON carries the same precision as the text outputs.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    (x * scale).round() / scale
}
