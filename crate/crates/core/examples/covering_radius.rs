//! The sup-norm problem: covering the support with n constrained balls.
//! The heuristic solver (farthest-point seeding + 1-swap) against the
//! exhaustive subset optimum on a coarse candidate grid.

use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;
use cquant::quantizer::{brute_force_solve, solve, Order, SolveOptions};

fn main() {
    let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 16).unwrap();
    let disc = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 1.0,
        },
        2,
    )
    .unwrap();

    let h = 0.35;
    let cands = disc.sample_boundary(h).unwrap();
    println!("{} candidates at resolution {h}", cands.len());
    for n in [1usize, 2, 3] {
        let (_, exact) = brute_force_solve(&measure, &cands, n, Order::Infinity).unwrap();
        let (code, heur) = solve(
            &measure,
            &disc,
            n,
            Order::Infinity,
            &SolveOptions::default(),
        )
        .unwrap();
        println!(
            "n={n}: heuristic covering radius {heur:.6}, grid-exhaustive {exact:.6} ({} centers)",
            code.points.len()
        );
    }

    // one point covering a segment: the midpoint, radius 1/2
    let seg_measure = DiscreteMeasure::from_samples(
        "0 0 1\n0.125 0 1\n0.25 0 1\n0.375 0 1\n0.5 0 1\n0.625 0 1\n0.75 0 1\n0.875 0 1\n1 0 1\n",
    )
    .unwrap();
    let seg = ConstraintSet::new(
        Shape::Segment {
            a: Point::ORIGIN,
            b: Point::xy(1.0, 0.0),
        },
        2,
    )
    .unwrap();
    let (code, radius) = solve(
        &seg_measure,
        &seg,
        1,
        Order::Infinity,
        &SolveOptions::default(),
    )
    .unwrap();
    println!(
        "segment 1-center: ({:.4}, {:.4}) radius {:.4}",
        code.points[0].x(),
        code.points[0].y(),
        radius
    );
}
