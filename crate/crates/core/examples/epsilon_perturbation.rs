//! Displacing codepoints off the projected support while keeping the error
//! within an eps * n^(-1/d) budget.

use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;
use cquant::quantizer::{error, perturb_codebook, Codebook, Order};

fn main() {
    let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 2048).unwrap();
    let half_ball = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 0.5,
        },
        2,
    )
    .unwrap();
    let images = measure.pushforward(&half_ball).unwrap().atoms().to_vec();

    // a codebook sitting exactly on the projected support
    let n = 4usize;
    let pts: Vec<Point> = (0..n).map(|k| images[k * images.len() / n]).collect();
    let code = Codebook::new(pts, Order::Finite(1.0));
    let e_old = error(&measure, &code, Order::Finite(1.0)).unwrap();
    println!("codebook on the projected support, e_1 = {e_old:.10}");

    for eps in [1e-2, 1e-3] {
        let budget = eps * (n as f64).powf(-1.0);
        let (moved, report) = perturb_codebook(&code, &half_ball, &images, eps, n, 1.0).unwrap();
        let e_new = error(&measure, &moved, Order::Finite(1.0)).unwrap();
        println!(
            "eps {eps:.0e}: moved {} codepoints, max displacement {:.3e} (budget {budget:.3e}), |e drift| {:.3e}",
            report.moved.len(),
            report.max_displacement,
            (e_new - e_old).abs()
        );
        for p in &moved.points {
            assert!(half_ball.contains(*p, half_ball.proj_tol()));
            let gap = images
                .iter()
                .map(|y| p.dist(*y))
                .fold(f64::INFINITY, f64::min);
            assert!(gap > half_ball.proj_tol());
        }
    }

    // a codebook already strictly inside the constraint is left alone
    let inside = Codebook::new(
        vec![Point::xy(0.2, 0.0), Point::xy(-0.2, 0.0)],
        Order::Finite(1.0),
    );
    let (same, report) = perturb_codebook(&inside, &half_ball, &images, 1e-2, 2, 1.0).unwrap();
    println!(
        "interior codebook: {} moved, {} failed, points unchanged: {}",
        report.moved.len(),
        report.failed.len(),
        same.points == inside.points
    );
}
