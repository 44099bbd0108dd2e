//! The bounded weight function: |w| < 1 everywhere and the two-term
//! decomposition that reproduces the first-order excess error exactly.

use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;
use cquant::quantizer::{weight_decompose, Codebook, Order};

fn main() {
    let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 1024).unwrap();
    let half_ball = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 0.5,
        },
        2,
    )
    .unwrap();

    let code = Codebook::new(
        vec![
            Point::xy(0.3, 0.1),
            Point::xy(-0.25, -0.3),
            Point::xy(0.05, 0.42),
        ],
        Order::Finite(1.0),
    );

    println!(
        "{:>10} {:>16} {:>16} {:>16} {:>12}",
        "lambda", "weighted term", "lambda term", "e_hat_1", "residual"
    );
    for lambda in [1e-4, 1e-3, 1e-2, 1e-1] {
        let diag = weight_decompose(&measure, &half_ball, &code, lambda).unwrap();
        println!(
            "{lambda:>10.0e} {:>16.10} {:>16.10} {:>16.10} {:>12.2e}",
            diag.term_weighted,
            diag.term_lambda,
            diag.e_hat_one,
            diag.residual()
        );
        assert!(diag.max_abs_weight < 1.0);
    }

    let diag = weight_decompose(&measure, &half_ball, &code, 1e-3).unwrap();
    println!(
        "\nmax |w| over atoms: {:.6} (< 1 always)",
        diag.max_abs_weight
    );
    println!("level masses P(w >= delta):");
    for (delta, mass) in &diag.level_masses {
        println!("    delta {delta:.1}: {mass:.4}");
    }
}
