//! Optimal quantizers of the uniform circle measure inside the closed unit
//! disc, against the closed form: codebook radius (n/pi)sin(pi/n) and
//! squared excess 1 - ((n/pi)sin(pi/n))^2.

use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;
use cquant::quantizer::{solve, Order, SolveOptions};

fn main() {
    let measure = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096).unwrap();
    let disc = ConstraintSet::new(
        Shape::ClosedBall {
            center: Point::ORIGIN,
            radius: 1.0,
        },
        2,
    )
    .unwrap();
    let opts = SolveOptions::default();

    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "n", "radius", "closed form", "e^2", "closed form", "n*e"
    );
    for n in [2usize, 3, 4, 8, 16, 32, 64] {
        let (code, e) = solve(&measure, &disc, n, Order::Finite(2.0), &opts).unwrap();
        let mean_radius: f64 =
            code.points.iter().map(|p| p.norm()).sum::<f64>() / code.points.len() as f64;
        let rho = n as f64 / std::f64::consts::PI * (std::f64::consts::PI / n as f64).sin();
        println!(
            "{n:>4} {mean_radius:>12.8} {rho:>12.8} {:>12.4e} {:>12.4e} {:>10.5}",
            e * e,
            1.0 - rho * rho,
            n as f64 * e
        );
    }
    println!(
        "\nn*e approaches pi/sqrt(3) = {:.5} as the quantizers fill the circle",
        std::f64::consts::PI / 3f64.sqrt()
    );
}
