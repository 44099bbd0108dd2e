//! Discrete measures and their push-forwards through the projection
//! selector, with box-dimension estimates of the images.

use cquant::dimension::box_dimension;
use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;

fn main() {
    // middle-third measure pushed onto a line above it: a translated copy
    let cantor = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 10).unwrap();
    let line = ConstraintSet::new(
        Shape::Segment {
            a: Point::xy(-1.0, 1.0),
            b: Point::xy(2.0, 1.0),
        },
        2,
    )
    .unwrap();
    let fwd = cantor.pushforward(&line).unwrap();
    println!(
        "cantor -> line: {} atoms, mass {:.12}, first atom ({:.6}, {:.6})",
        fwd.len(),
        fwd.total_weight(),
        fwd.atoms()[0].x(),
        fwd.atoms()[0].y()
    );
    let scales: Vec<f64> = (2..=8).map(|k| 3f64.powi(-k)).collect();
    let (dim, table) = box_dimension(fwd.atoms(), &scales).unwrap();
    println!(
        "box dimension of the image: {dim:.4} (log2/log3 = {:.4})",
        2f64.ln() / 3f64.ln()
    );
    for row in &table {
        println!("    delta {:.6}: {} boxes", row.delta, row.count);
    }

    // circle scaled onto the half ball: every image at radius 1/2
    let circle = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096).unwrap();
    let half_ball = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 0.5,
        },
        2,
    )
    .unwrap();
    let fwd = circle.pushforward(&half_ball).unwrap();
    let max_radius_err = fwd
        .atoms()
        .iter()
        .map(|p| (p.norm() - 0.5).abs())
        .fold(0.0, f64::max);
    println!(
        "circle -> half ball: {} atoms, mass {:.12}, max | |y|-1/2 | = {:.3e}",
        fwd.len(),
        fwd.total_weight(),
        max_radius_err
    );

    // point mass collapses to the selected representative
    let dirac = DiscreteMeasure::dirac(Point::ORIGIN);
    let circle_s = ConstraintSet::new(Shape::circle(Point::ORIGIN, 1.0), 2).unwrap();
    let fwd = dirac.pushforward(&circle_s).unwrap();
    println!(
        "dirac -> circle: image ({}, {}), mass {}",
        fwd.atoms()[0].x(),
        fwd.atoms()[0].y(),
        fwd.weights()[0]
    );
}
