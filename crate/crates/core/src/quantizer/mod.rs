//! Constrained n-quantizer errors and solvers.
//!
//! The error of a codebook `α ⊆ S` against a discrete measure is the r-th
//! moment of the nearest-codepoint distance; the `n → ∞` limit is computed
//! exactly from projection distances rather than by extrapolation.

mod solve;
mod weight;

pub use solve::{brute_force_solve, lloyd_step_r2, solve, SolveOptions};
pub use weight::{perturb_codebook, weight_decompose, PerturbReport, WeightDiagnostics};

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::measures::DiscreteMeasure;
use crate::point::{fmt_g12, Point};

/// Moment order `r >= 1`, or the sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub fn finite(r: f64) -> Result<Order> {
        if !r.is_finite() || r < 1.0 {
            return Err(Error::Usage(format!(
                "order r must satisfy r >= 1, got {r}"
            )));
        }
        Ok(Order::Finite(r))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Order::Infinity)
    }

    pub fn parse(text: &str) -> Result<Order> {
        match text.trim() {
            "inf" | "infinity" | "oo" => Ok(Order::Infinity),
            t => Order::finite(
                t.parse::<f64>()
                    .map_err(|_| Error::Config(format!("cannot parse order {t:?}")))?,
            ),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(r) => {
                if (r - r.round()).abs() < 1e-12 {
                    write!(f, "{}", *r as i64)
                } else {
                    write!(f, "{r}")
                }
            }
            Order::Infinity => write!(f, "inf"),
        }
    }
}

/// A finite quantizer confined to the constraint set.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub points: Vec<Point>,
    pub r: Order,
    pub seed: u64,
    pub converged: bool,
}

impl Codebook {
    pub fn new(points: Vec<Point>, r: Order) -> Self {
        Codebook {
            points,
            r,
            seed: 0,
            converged: true,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the codebook invariants against a constraint set: membership
    /// within `proj_tol` and pairwise-distinct points.
    pub fn validate(&self, s: &ConstraintSet) -> Result<()> {
        let tol = s.proj_tol();
        for p in &self.points {
            let d = s.distance_to(*p);
            if d > tol {
                return Err(Error::Usage(format!(
                    "codepoint {p:?} lies {d:.3e} outside the constraint set"
                )));
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                if p.dist(*q) <= tol {
                    return Err(Error::Usage("codebook has duplicate points".into()));
                }
            }
        }
        Ok(())
    }
}

/// Per-atom nearest-codepoint assignment (the Voronoi partition of the
/// atoms, ties to the lowest index).
#[derive(Debug, Clone)]
pub struct Assignment {
    pub owner: Vec<usize>,
    pub dist: Vec<f64>,
}

pub fn assign(p: &DiscreteMeasure, code: &Codebook) -> Result<Assignment> {
    if code.is_empty() {
        return Err(Error::Usage("assign called with an empty codebook".into()));
    }
    let mut owner = Vec::with_capacity(p.len());
    let mut dist = Vec::with_capacity(p.len());
    for atom in p.atoms() {
        let mut best = f64::INFINITY;
        let mut who = 0usize;
        for (i, c) in code.points.iter().enumerate() {
            let d = atom.dist_sq(*c);
            if d < best {
                best = d;
                who = i;
            }
        }
        owner.push(who);
        dist.push(best.sqrt());
    }
    Ok(Assignment { owner, dist })
}

/// r-th moment of per-atom distances: `(Σ w_j d_j^r)^(1/r)`, or the
/// essential sup for `r = ∞`.
pub fn moment(weights: &[f64], dists: &[f64], r: Order) -> f64 {
    match r {
        Order::Finite(r) => weights
            .iter()
            .zip(dists)
            .map(|(w, d)| w * d.powf(r))
            .sum::<f64>()
            .powf(1.0 / r),
        Order::Infinity => weights
            .iter()
            .zip(dists)
            .filter(|(w, _)| **w > 0.0)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max),
    }
}

/// Quantization error `e(P, α)` of a codebook at order `r`.
pub fn error(p: &DiscreteMeasure, code: &Codebook, r: Order) -> Result<f64> {
    let asg = assign(p, code)?;
    Ok(moment(p.weights(), &asg.dist, r))
}

/// The limit error `e_∞,r(P; S)`, computed directly from the projection
/// distances of the atoms (no extrapolation over n).
pub fn e_infinity(p: &DiscreteMeasure, s: &ConstraintSet, r: Order) -> Result<f64> {
    let (_, dists) = s.project_set(p.atoms())?;
    Ok(moment(p.weights(), &dists, r))
}

/// One row of an error curve.
#[derive(Debug, Clone)]
pub struct ErrorCurveRow {
    pub n: usize,
    pub e: f64,
    pub e_inf: f64,
    pub e_hat: f64,
    pub e_tilde: f64,
    pub iters: usize,
    pub restarts: usize,
    pub best_seed: u64,
    /// Set when the `e^r - e_inf^r` radicand was negative roundoff and was
    /// clamped to zero.
    pub clamped: bool,
    /// Codepoints lying on the sampled projected support (informational;
    /// quantizers avoiding the projected support is an assumption the solver
    /// can only observe, not enforce).
    pub on_projection: usize,
}

#[derive(Debug, Clone)]
pub struct ErrorCurve {
    pub r: Order,
    pub rows: Vec<ErrorCurveRow>,
}

impl ErrorCurve {
    pub const CSV_HEADER: &'static str =
        "n,r,e,e_inf,e_hat,e_tilde,iters,restarts,best_seed,clamped";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.n,
                self.r,
                fmt_g12(row.e),
                fmt_g12(row.e_inf),
                fmt_g12(row.e_hat),
                fmt_g12(row.e_tilde),
                row.iters,
                row.restarts,
                row.best_seed,
                row.clamped as u8,
            ));
        }
        out
    }
}

/// Derives `ê` and `ẽ` from `e` and `e_∞` at order `r`, clamping a negative
/// radicand (pure roundoff when `ê` is genuinely 0) to zero.
pub fn excess_errors(e: f64, e_inf: f64, r: Order) -> (f64, f64, bool) {
    let e_tilde = e - e_inf;
    match r {
        Order::Finite(r) => {
            let radicand = e.powf(r) - e_inf.powf(r);
            if radicand < 0.0 {
                (0.0, e_tilde, true)
            } else {
                (radicand.powf(1.0 / r), e_tilde, false)
            }
        }
        // r → ∞ limit of (e^r - e_inf^r)^(1/r): e itself when e exceeds
        // e_inf, zero when the two coincide (degenerate scenes).
        Order::Infinity => {
            if e_tilde <= 1e-12 * e.max(1.0) {
                (0.0, e_tilde, false)
            } else {
                (e, e_tilde, false)
            }
        }
    }
}

/// Solves per-n quantizers and assembles the error curve.
pub fn error_curve(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    r: Order,
    n_list: &[usize],
    opts: &SolveOptions,
) -> Result<ErrorCurve> {
    if n_list.is_empty() {
        return Err(Error::Usage("n_list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("n_list must be strictly increasing".into()));
    }
    let e_inf = e_infinity(p, s, r)?;
    let (images, _) = s.project_set(p.atoms())?;
    let on_tol = s.proj_tol().max(1e-9 * s.diameter().max(1.0));

    let mut rows = Vec::with_capacity(n_list.len());
    let mut warm: Option<Vec<Point>> = None;
    for &n in n_list {
        let mut local = opts.clone();
        if let Some(prev) = warm.take() {
            local.extra_starts.push(prev);
        }
        let detail = solve::solve_detailed(p, s, n, r, &local)?;
        let (e_hat, e_tilde, clamped) = excess_errors(detail.error, e_inf, r);
        let on_projection = detail
            .code
            .points
            .iter()
            .filter(|c| images.iter().any(|img| img.dist(**c) <= on_tol))
            .count();
        rows.push(ErrorCurveRow {
            n,
            e: detail.error,
            e_inf,
            e_hat,
            e_tilde,
            iters: detail.iters,
            restarts: local.restarts,
            best_seed: detail.code.seed,
            clamped,
            on_projection,
        });
        warm = Some(detail.code.points);
    }
    Ok(ErrorCurve { r, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;

    fn unit_circle_measure(nodes: usize) -> DiscreteMeasure {
        DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, nodes).unwrap()
    }

    #[test]
    fn self_assignment_has_zero_distance() {
        let m = unit_circle_measure(4);
        let code = Codebook::new(m.atoms().to_vec(), Order::Finite(2.0));
        let asg = assign(&m, &code).unwrap();
        assert!(asg.dist.iter().all(|d| *d < 1e-15));
        assert_eq!(asg.owner, vec![0, 1, 2, 3]);
    }

    #[test]
    fn singleton_codebook_owns_everything() {
        let m = unit_circle_measure(16);
        let code = Codebook::new(vec![Point::xy(1.0, 0.0)], Order::Finite(2.0));
        let asg = assign(&m, &code).unwrap();
        assert!(asg.owner.iter().all(|o| *o == 0));
    }

    #[test]
    fn midpoint_split_assignment() {
        let m = crate::measures::DiscreteMeasure::from_parts(
            vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)],
            vec![0.5, 0.5],
            crate::measures::Provenance::File,
        )
        .unwrap();
        let code = Codebook::new(
            vec![Point::xy(0.4, 0.0), Point::xy(0.6, 0.0)],
            Order::Finite(2.0),
        );
        let asg = assign(&m, &code).unwrap();
        assert_eq!(asg.owner, vec![0, 1]);
    }

    #[test]
    fn dirac_error_is_one_for_any_circle_codepoint() {
        let m = DiscreteMeasure::dirac(Point::ORIGIN);
        for theta in [0.0f64, 1.0, 2.5] {
            let code = Codebook::new(
                vec![Point::xy(theta.cos(), theta.sin())],
                Order::Finite(1.0),
            );
            for r in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
                let e = error(&m, &code, r).unwrap();
                assert!((e - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn square_codebook_error_matches_closed_form() {
        // four codepoints at the optimal radius (4/pi)sin(pi/4)
        let m = unit_circle_measure(4096);
        let rho = 4.0 / std::f64::consts::PI * (std::f64::consts::PI / 4.0).sin();
        let pts = (0..4)
            .map(|k| {
                let t = std::f64::consts::PI * (0.25 + 0.5 * k as f64);
                Point::xy(rho * t.cos(), rho * t.sin())
            })
            .collect();
        let e = error(
            &m,
            &Codebook::new(pts, Order::Finite(2.0)),
            Order::Finite(2.0),
        )
        .unwrap();
        assert!((e * e - (1.0 - rho * rho)).abs() < 1e-4, "e^2 = {}", e * e);
        assert!((e * e - 0.18943).abs() < 1e-4);
    }

    #[test]
    fn covering_radius_of_segment_midpoint() {
        let m =
            DiscreteMeasure::from_samples("0 0 1\n0.25 0 1\n0.5 0 1\n0.75 0 1\n1 0 1\n").unwrap();
        let code = Codebook::new(vec![Point::xy(0.5, 0.0)], Order::Infinity);
        let e = error(&m, &code, Order::Infinity).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn e_infinity_from_projection_distances() {
        let circle = unit_circle_measure(4096);
        let half_ball = ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 0.5,
            },
            2,
        )
        .unwrap();
        for r in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            let e = e_infinity(&circle, &half_ball, r).unwrap();
            assert!((e - 0.5).abs() < 1e-12, "r={r:?}: {e}");
        }

        let cantor = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 8).unwrap();
        let line = ConstraintSet::new(
            Shape::Segment {
                a: Point::xy(-1.0, 1.0),
                b: Point::xy(2.0, 1.0),
            },
            2,
        )
        .unwrap();
        for r in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            let e = e_infinity(&cantor, &line, r).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }

        // K inside S: the projection is the identity
        let unit_ball = ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 1.0,
            },
            2,
        )
        .unwrap();
        let e = e_infinity(&circle, &unit_ball, Order::Finite(2.0)).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn excess_error_clamps_roundoff() {
        let (e_hat, e_tilde, clamped) = excess_errors(1.0, 1.0 + 1e-15, Order::Finite(2.0));
        assert_eq!(e_hat, 0.0);
        assert!(clamped);
        assert!(e_tilde <= 0.0 && e_tilde > -1e-14);
    }

    #[test]
    fn order_validation() {
        assert!(Order::finite(0.5).is_err());
        assert!(Order::finite(1.0).is_ok());
        assert!(matches!(Order::parse("inf").unwrap(), Order::Infinity));
        assert_eq!(Order::parse("2").unwrap(), Order::Finite(2.0));
    }
}
