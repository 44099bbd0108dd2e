//! Error curves e_n, e_inf, e_hat, e_tilde over an n-list, and the
//! quantization-dimension estimates fitted from them.

use cquant::dimension::{fit_quant_dimension, CurveKind};
use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::DiscreteMeasure;
use cquant::point::Point;
use cquant::quantizer::{error_curve, Order, SolveOptions};

fn main() {
    let measure = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 10).unwrap();
    let line = ConstraintSet::new(
        Shape::Segment {
            a: Point::xy(-1.0, 1.0),
            b: Point::xy(2.0, 1.0),
        },
        2,
    )
    .unwrap();

    let curve = error_curve(
        &measure,
        &line,
        Order::Finite(2.0),
        &[2, 4, 8, 16, 32],
        &SolveOptions::default(),
    )
    .unwrap();
    print!("{}", curve.to_csv());

    let fit = fit_quant_dimension(&curve, CurveKind::Hat, 0.5).unwrap();
    println!("\nlocal slopes:");
    for s in &fit.local_slopes {
        println!("    n {} -> {}: {:.5}", s.n_from, s.n_to, s.slope);
    }
    println!(
        "dimension estimates: lower {:.4}, upper {:.4}, global {:.4} (log2/log3 = {:.4})",
        fit.quant_dim_lower,
        fit.quant_dim_upper,
        fit.global_slope_dim,
        2f64.ln() / 3f64.ln()
    );
}
