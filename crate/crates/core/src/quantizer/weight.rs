//! The bounded weight function `w_λ` and the perturbation of codepoints off
//! the projected support.
//!
//! For an atom `x` owned by codepoint `a`, with `y` the selected projection
//! of `x`,
//!
//! ```text
//! w_λ(x, a) = (ρ(x,a) − ρ(x,y)) / (λ + ρ(a,y))
//! ```
//!
//! satisfies `0 <= w_λ < 1`, and summing `w_λ·(ρ(a,y) + λ)` over the atoms
//! reproduces `e_1(P,α) − e_∞,1(P;S)` exactly on the discrete measure.

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::measures::DiscreteMeasure;
use crate::point::Point;

use super::{assign, moment, Codebook, Order};

/// Both terms of the weighted decomposition plus the level-set masses of the
/// owner weights.
#[derive(Debug, Clone)]
pub struct WeightDiagnostics {
    pub lambda: f64,
    /// `Σ_j P_j · w_λ(x_j, a_own) · ρ(a_own, y_j)`
    pub term_weighted: f64,
    /// `λ · Σ_j P_j · w_λ(x_j, a_own)`
    pub term_lambda: f64,
    /// `(δ, P{x : w_λ(x, a_own) ≥ δ})` over a fixed δ grid.
    pub level_masses: Vec<(f64, f64)>,
    pub max_abs_weight: f64,
    /// `e_1(P,α) − e_∞,1(P;S)` evaluated on the same codebook; the two terms
    /// above must reproduce it to roundoff.
    pub e_hat_one: f64,
}

impl WeightDiagnostics {
    pub fn residual(&self) -> f64 {
        (self.term_weighted + self.term_lambda) - self.e_hat_one
    }
}

pub fn weight_decompose(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    code: &Codebook,
    lambda: f64,
) -> Result<WeightDiagnostics> {
    if !(lambda > 0.0) {
        return Err(Error::Usage(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let asg = assign(p, code)?;
    let (images, proj_dists) = s.project_set(p.atoms())?;

    let deltas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let mut level = vec![0.0f64; deltas.len()];
    let mut term_weighted = 0.0;
    let mut term_lambda = 0.0;
    let mut max_abs = 0.0f64;
    for (j, (&w_meas, &owner)) in p.weights().iter().zip(&asg.owner).enumerate() {
        let a = code.points[owner];
        let y = images[j];
        let w = (asg.dist[j] - proj_dists[j]) / (lambda + a.dist(y));
        max_abs = max_abs.max(w.abs());
        term_weighted += w_meas * w * a.dist(y);
        term_lambda += lambda * w_meas * w;
        for (k, &d) in deltas.iter().enumerate() {
            if w >= d {
                level[k] += w_meas;
            }
        }
    }

    let e_one = moment(p.weights(), &asg.dist, Order::Finite(1.0));
    let e_inf_one = moment(p.weights(), &proj_dists, Order::Finite(1.0));
    Ok(WeightDiagnostics {
        lambda,
        term_weighted,
        term_lambda,
        level_masses: deltas.into_iter().zip(level).collect(),
        max_abs_weight: max_abs,
        e_hat_one: e_one - e_inf_one,
    })
}

/// Outcome of the displacement search per codepoint.
#[derive(Debug, Clone, Default)]
pub struct PerturbReport {
    pub moved: Vec<usize>,
    /// Codepoints on the projected support for which no admissible
    /// displacement was found (reported, not fatal).
    pub failed: Vec<usize>,
    pub max_displacement: f64,
}

/// Displaces every codepoint lying on the sampled projected support by at
/// most `ε·n^(-1/d)` to a point of the constraint off that sample;
/// codepoints already off the sample are returned unchanged.
pub fn perturb_codebook(
    code: &Codebook,
    s: &ConstraintSet,
    pisk_sample: &[Point],
    epsilon: f64,
    n: usize,
    d: f64,
) -> Result<(Codebook, PerturbReport)> {
    if !(epsilon > 0.0) || !(d > 0.0) || n == 0 {
        return Err(Error::Usage(
            "perturb_codebook needs epsilon > 0, d > 0, n >= 1".into(),
        ));
    }
    if pisk_sample.is_empty() {
        return Err(Error::Usage("projected-support sample is empty".into()));
    }
    let tol = s.proj_tol();
    let budget = epsilon * (n as f64).powf(-1.0 / d);
    let dist_to_sample = |q: Point| {
        pisk_sample
            .iter()
            .map(|y| q.dist(y.to_owned()))
            .fold(f64::INFINITY, f64::min)
    };

    // direction probes come from a coarse net of the constraint set
    let coarse = s.sample_boundary(s.diameter().max(1.0) / 64.0)?;

    let mut report = PerturbReport::default();
    let mut points = code.points.clone();
    for (i, pt) in code.points.iter().enumerate() {
        if dist_to_sample(*pt) > tol {
            continue; // already off the projected support
        }
        let mut dirs: Vec<Point> = coarse
            .iter()
            .filter(|q| q.dist(*pt) > tol)
            .map(|q| *q - *pt)
            .collect();
        dirs.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap().then(a.lex_cmp(b)));
        dirs.truncate(64);

        let mut accepted = None;
        'search: for dir in &dirs {
            let unit = *dir * (1.0 / dir.norm());
            for frac in [0.5, 0.25, 0.125] {
                let probe = *pt + unit * (budget * frac);
                let cand = s.project(probe).representative;
                let moved = cand.dist(*pt);
                if moved > tol && moved <= budget && dist_to_sample(cand) > tol {
                    accepted = Some((cand, moved));
                    break 'search;
                }
            }
        }
        match accepted {
            Some((cand, moved)) => {
                points[i] = cand;
                report.moved.push(i);
                report.max_displacement = report.max_displacement.max(moved);
            }
            None => report.failed.push(i),
        }
    }

    let out = Codebook {
        points,
        r: code.r,
        seed: code.seed,
        converged: code.converged,
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::quantizer::error;

    fn circle_measure(nodes: usize) -> DiscreteMeasure {
        DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, nodes).unwrap()
    }

    fn half_ball() -> ConstraintSet {
        ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 0.5,
            },
            2,
        )
        .unwrap()
    }

    #[test]
    fn decomposition_reproduces_the_first_order_excess() {
        let p = circle_measure(512);
        let s = half_ball();
        let code = Codebook::new(
            vec![
                Point::xy(0.3, 0.1),
                Point::xy(-0.2, -0.35),
                Point::xy(0.0, 0.45),
            ],
            Order::Finite(1.0),
        );
        for lambda in [1e-4, 1e-3, 1e-2, 1e-1] {
            let diag = weight_decompose(&p, &s, &code, lambda).unwrap();
            assert!(
                diag.residual().abs() < 1e-10,
                "residual {}",
                diag.residual()
            );
            assert!(diag.max_abs_weight < 1.0);
        }
    }

    #[test]
    fn weights_positive_when_codebook_avoids_projected_support() {
        // K inside S: the projection is the identity and every codepoint off
        // the support sees a positive weight at every atom it owns
        let p = circle_measure(128);
        let s = ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 1.0,
            },
            2,
        )
        .unwrap();
        let code = Codebook::new(
            vec![Point::xy(0.5, 0.0), Point::xy(-0.5, 0.0)],
            Order::Finite(1.0),
        );
        let asg = assign(&p, &code).unwrap();
        let (images, pd) = s.project_set(p.atoms()).unwrap();
        for j in 0..p.len() {
            let a = code.points[asg.owner[j]];
            let w = (asg.dist[j] - pd[j]) / (1e-3 + a.dist(images[j]));
            assert!(w > 0.0);
        }
    }

    #[test]
    fn weight_vanishes_when_codepoint_is_the_projection() {
        let p = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 4).unwrap();
        let s = ConstraintSet::new(
            Shape::Segment {
                a: Point::xy(-1.0, 1.0),
                b: Point::xy(2.0, 1.0),
            },
            2,
        )
        .unwrap();
        let first_image = s.project(p.atoms()[0]).representative;
        let code = Codebook::new(vec![first_image, Point::xy(0.9, 1.0)], Order::Finite(1.0));
        let asg = assign(&p, &code).unwrap();
        assert_eq!(asg.owner[0], 0);
        let diag = weight_decompose(&p, &s, &code, 1e-3).unwrap();
        // the owning atom contributes weight zero; the table stays consistent
        let w0 = (asg.dist[0] - 1.0) / (1e-3 + 0.0);
        assert!(w0.abs() < 1e-12);
        assert!(diag.max_abs_weight < 1.0);
    }

    #[test]
    fn codebook_off_support_is_unchanged() {
        let p = circle_measure(256);
        let s = ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 1.0,
            },
            2,
        )
        .unwrap();
        let (images, _) = s.project_set(p.atoms()).unwrap();
        // optimal-style codebook strictly inside the ball
        let code = Codebook::new(
            vec![Point::xy(0.6, 0.0), Point::xy(-0.6, 0.0)],
            Order::Finite(1.0),
        );
        let (out, report) = perturb_codebook(&code, &s, &images, 1e-2, 2, 1.0).unwrap();
        assert!(report.moved.is_empty() && report.failed.is_empty());
        assert_eq!(out.points, code.points);
    }

    #[test]
    fn boundary_codebook_moves_inward_within_budget() {
        let p = circle_measure(512);
        let s = half_ball();
        let images = p.pushforward(&s).unwrap().atoms().to_vec();
        let n = 4;
        let code_pts: Vec<Point> = (0..n).map(|k| images[k * images.len() / n]).collect();
        let code = Codebook::new(code_pts, Order::Finite(1.0));
        let eps = 4e-2; // budget eps/n = 1e-2
        let budget = eps / n as f64;
        let (out, report) = perturb_codebook(&code, &s, &images, eps, n, 1.0).unwrap();
        assert_eq!(report.moved.len(), n);
        assert!(report.failed.is_empty());
        assert!(report.max_displacement <= budget + 1e-12);
        for (old, new) in code.points.iter().zip(&out.points) {
            assert!(new.dist(*old) <= budget + 1e-12);
            assert!(new.norm() < 0.5); // strictly inside the ball now
            assert!(s.contains(*new, s.proj_tol()));
        }
        // error drift is bounded by the displacement budget
        let e_old = error(&p, &code, Order::Finite(1.0)).unwrap();
        let e_new = error(&p, &out, Order::Finite(1.0)).unwrap();
        assert!((e_new - e_old).abs() <= budget + 1e-9);
    }

    #[test]
    fn isolated_point_constraint_reports_failure() {
        let s = ConstraintSet::new(
            Shape::FinitePointSet {
                points: vec![Point::ORIGIN],
            },
            2,
        )
        .unwrap();
        let code = Codebook::new(vec![Point::ORIGIN], Order::Finite(1.0));
        let (out, report) = perturb_codebook(&code, &s, &[Point::ORIGIN], 1e-2, 1, 1.0).unwrap();
        assert_eq!(report.failed, vec![0]);
        assert_eq!(out.points, code.points);
    }

    #[test]
    fn parameter_validation() {
        let s = half_ball();
        let code = Codebook::new(vec![Point::xy(0.5, 0.0)], Order::Finite(1.0));
        assert!(perturb_codebook(&code, &s, &[Point::ORIGIN], 0.0, 1, 1.0).is_err());
        assert!(perturb_codebook(&code, &s, &[Point::ORIGIN], 1e-2, 1, 0.0).is_err());
        let p = DiscreteMeasure::dirac(Point::ORIGIN);
        assert!(weight_decompose(&p, &s, &code, 0.0).is_err());
    }
}
