//! Shared scenes and independent oracles for the integration suites.

#![allow(dead_code)]

use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;

pub struct Scene {
    pub measure: DiscreteMeasure,
    pub constraint: ConstraintSet,
}

/// Uniform measure on the unit circle, quantizers confined to the closed
/// unit disc (the projection is the identity on the support).
pub fn circle_disc(nodes: usize) -> Scene {
    Scene {
        measure: DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, nodes).unwrap(),
        constraint: ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 1.0,
            },
            2,
        )
        .unwrap(),
    }
}

/// Uniform measure on the unit circle, quantizers confined to the closed
/// ball of radius 1/2 (support and constraint are disjoint).
pub fn circle_ball_half(nodes: usize) -> Scene {
    Scene {
        measure: DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, nodes).unwrap(),
        constraint: ConstraintSet::new(
            Shape::ClosedBall {
                center: Point::ORIGIN,
                radius: 0.5,
            },
            2,
        )
        .unwrap(),
    }
}

/// Level-`depth` middle-third measure on `[0,1] x {0}`, quantizers confined
/// to a horizontal segment through `y = 1` spanning past the support.
pub fn cantor_line(depth: u32) -> Scene {
    Scene {
        measure: DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), depth).unwrap(),
        constraint: ConstraintSet::new(
            Shape::Segment {
                a: Point::xy(-1.0, 1.0),
                b: Point::xy(2.0, 1.0),
            },
            2,
        )
        .unwrap(),
    }
}

/// Point mass at the origin, quantizers confined to the unit circle.
pub fn dirac_circle() -> Scene {
    Scene {
        measure: DiscreteMeasure::dirac(Point::ORIGIN),
        constraint: ConstraintSet::new(Shape::circle(Point::ORIGIN, 1.0), 2).unwrap(),
    }
}

/// Uniform measure on the downward wedge `y = -|x|`, constraint made of
/// three polyline branches whose vertices (±1,0) and (0,1) all realize
/// distance 1 from the origin.
pub fn vshape(nodes_per_segment: usize) -> Scene {
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
    Scene {
        measure: DiscreteMeasure::uniform_polyline(
            &[Point::xy(-1.0, -1.0), Point::ORIGIN, Point::xy(1.0, -1.0)],
            nodes_per_segment,
        )
        .unwrap(),
        constraint: ConstraintSet::new(Shape::Union(vec![right, left, top]), 2).unwrap(),
    }
}

/// Closed-form optimal codebook radius for n quantizers of the uniform
/// circle measure inside the unit disc.
pub fn circle_optimal_radius(n: usize) -> f64 {
    n as f64 / std::f64::consts::PI * (std::f64::consts::PI / n as f64).sin()
}

/// Exact unconstrained 1-D r=2 quantization error (squared) of a weighted
/// atom list, by dynamic programming over contiguous cells. Independent of
/// the solver path: optimal r=2 cells in one dimension are intervals, and
/// each interval's cost has a closed prefix-sum form.
pub fn dp_quantize_1d_sq(xs: &[f64], ws: &[f64], n: usize) -> f64 {
    let m = xs.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let x: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let w: Vec<f64> = order.iter().map(|&i| ws[i]).collect();

    let mut pw = vec![0.0; m + 1];
    let mut pwx = vec![0.0; m + 1];
    let mut pwxx = vec![0.0; m + 1];
    for i in 0..m {
        pw[i + 1] = pw[i] + w[i];
        pwx[i + 1] = pwx[i] + w[i] * x[i];
        pwxx[i + 1] = pwxx[i] + w[i] * x[i] * x[i];
    }
    // cost of serving atoms [i, j] with their weighted mean
    let cost = |i: usize, j: usize| -> f64 {
        let mass = pw[j + 1] - pw[i];
        if mass <= 0.0 {
            return 0.0;
        }
        let sx = pwx[j + 1] - pwx[i];
        let sxx = pwxx[j + 1] - pwxx[i];
        (sxx - sx * sx / mass).max(0.0)
    };

    let inf = f64::INFINITY;
    let mut prev: Vec<f64> = (0..m).map(|j| cost(0, j)).collect();
    for _k in 2..=n.min(m) {
        let mut cur = vec![inf; m];
        for j in 0..m {
            let mut best = prev[j]; // reuse fewer cells
            for i in 1..=j {
                let c = prev[i - 1] + cost(i, j);
                if c < best {
                    best = c;
                }
            }
            cur[j] = best;
        }
        prev = cur;
    }
    prev[m - 1]
}

#[cfg(test)]
mod oracle_tests {
    use super::dp_quantize_1d_sq;

    #[test]
    fn dp_matches_hand_computed_two_atom_case() {
        // two equal atoms at 0 and 1: n=1 cost = 2*(1/2)^2 weights 1/2 -> 0.25
        let e2 = dp_quantize_1d_sq(&[0.0, 1.0], &[0.5, 0.5], 1);
        assert!((e2 - 0.25).abs() < 1e-15);
        assert!(dp_quantize_1d_sq(&[0.0, 1.0], &[0.5, 0.5], 2) < 1e-15);
    }
}
