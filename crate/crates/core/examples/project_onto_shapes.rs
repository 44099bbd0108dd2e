//! Metric projection onto the shape vocabulary: unique projections,
//! discrete ties, and the flagged continuum case.

use cquant::geometry::{ConstraintSet, Shape, TieCount};
use cquant::point::Point;

fn show(s: &ConstraintSet, label: &str, p: Point) {
    let r = s.project(p);
    println!(
        "{label}: project ({:.3}, {:.3}) -> ({:.6}, {:.6}), distance {:.6}, ties {}",
        p.x(),
        p.y(),
        r.representative.x(),
        r.representative.y(),
        r.distance,
        r.tie_count
    );
    if matches!(r.tie_count, TieCount::Finite(k) if k > 1) {
        for m in &r.all_minimizers {
            println!("    minimizer ({:.6}, {:.6})", m.x(), m.y());
        }
    }
}

fn main() {
    let half_ball = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 0.5,
        },
        2,
    )
    .unwrap();
    show(&half_ball, "half ball", Point::xy(0.8, 0.6));
    show(&half_ball, "half ball", Point::xy(0.1, -0.2));

    let circle = ConstraintSet::new(Shape::circle(Point::ORIGIN, 1.0), 2).unwrap();
    show(&circle, "circle", Point::xy(0.0, 2.0));
    // center of the circle: a continuum of minimizers, deterministic
    // representative at angle zero
    show(&circle, "circle", Point::ORIGIN);

    let cantor = ConstraintSet::new(
        Shape::CantorSegment {
            a: Point::ORIGIN,
            b: Point::xy(1.0, 0.0),
            depth: 4,
        },
        2,
    )
    .unwrap();
    // the gap center ties between the two flanking intervals
    show(&cantor, "cantor", Point::xy(0.5, 0.3));

    // three branches, all at distance 1 from the origin
    let arm = 3.0;
    let union = ConstraintSet::new(
        Shape::Union(vec![
            Shape::Polyline {
                vertices: vec![
                    Point::xy(1.0 + arm, arm),
                    Point::xy(1.0, 0.0),
                    Point::xy(1.0 + arm, -arm),
                ],
            },
            Shape::Polyline {
                vertices: vec![
                    Point::xy(-1.0 - arm, arm),
                    Point::xy(-1.0, 0.0),
                    Point::xy(-1.0 - arm, -arm),
                ],
            },
            Shape::Polyline {
                vertices: vec![
                    Point::xy(-arm, 1.0 + arm),
                    Point::xy(0.0, 1.0),
                    Point::xy(arm, 1.0 + arm),
                ],
            },
        ]),
        2,
    )
    .unwrap();
    show(&union, "three-branch union", Point::ORIGIN);

    // idempotence: projecting a projection is a fixed point
    let q = union.project(Point::xy(0.3, -0.4)).representative;
    println!(
        "idempotence check: residual {:.3e}",
        union.project(q).distance
    );
}
