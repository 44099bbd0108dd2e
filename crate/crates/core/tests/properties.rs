//! Cross-module invariants: randomized structural properties plus the
//! deterministic geometric witnesses.

mod common;

use common::{cantor_line, circle_ball_half, circle_disc, circle_optimal_radius};
use cquant::dimension::{fit_quant_dimension, CurveKind};
use cquant::geometry::{ConstraintSet, Shape};
use cquant::measures::{DiscreteMeasure, Provenance};
use cquant::point::Point;
use cquant::quantizer::{
    error, error_curve, excess_errors, perturb_codebook, solve, Codebook, Order, SolveOptions,
};
use proptest::prelude::*;

fn arb_point(range: f64) -> impl Strategy<Value = Point> {
    (-range..range, -range..range).prop_map(|(x, y)| Point::xy(x, y))
}

fn arb_shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (arb_point(1.0), 0.2..1.5f64).prop_map(|(c, r)| Shape::ClosedBall {
            center: c,
            radius: r
        }),
        (arb_point(1.0), 0.2..1.5f64).prop_map(|(c, r)| Shape::Sphere {
            center: c,
            radius: r
        }),
        (arb_point(1.5), arb_point(1.5))
            .prop_filter("distinct endpoints", |(a, b)| a.dist(*b) > 1e-3)
            .prop_map(|(a, b)| Shape::Segment { a, b }),
        (arb_point(1.5), arb_point(1.5), 1u32..6)
            .prop_filter("distinct endpoints", |(a, b, _)| a.dist(*b) > 1e-3)
            .prop_map(|(a, b, depth)| Shape::CantorSegment { a, b, depth }),
        proptest::collection::vec(arb_point(1.5), 3..6)
            .prop_filter("consecutive vertices distinct", |v| {
                v.windows(2).all(|w| w[0].dist(w[1]) > 1e-3)
            })
            .prop_map(|vertices| Shape::Polyline { vertices }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_idempotent_and_minimal(shape in arb_shape(), p in arb_point(3.0)) {
        let s = ConstraintSet::new(shape, 2).unwrap();
        let r = s.project(p);
        // distance consistency with the representative
        prop_assert!((r.distance - p.dist(r.representative)).abs() <= 1e-12);
        // idempotence
        prop_assert!(s.project(r.representative).distance <= s.proj_tol());
        // no sampled point of the set beats the analytic minimum
        let net = s.sample_boundary(0.05).unwrap();
        let brute = net.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min);
        prop_assert!(brute + 1e-12 >= r.distance);
        prop_assert!(brute - r.distance <= 0.05);
    }

    #[test]
    fn pushforward_conserves_mass_onto_the_set(
        shape in arb_shape(),
        atoms in proptest::collection::vec((arb_point(2.0), 0.01..1.0f64), 1..20),
    ) {
        let s = ConstraintSet::new(shape, 2).unwrap();
        let (pts, ws): (Vec<Point>, Vec<f64>) = atoms.into_iter().unzip();
        let m = DiscreteMeasure::from_parts(pts, ws, Provenance::File).unwrap();
        let fwd = m.pushforward(&s).unwrap();
        prop_assert!((fwd.total_weight() - 1.0).abs() <= 1e-12);
        for a in fwd.atoms() {
            prop_assert!(s.contains(*a, s.proj_tol()));
        }
    }

    #[test]
    fn fixed_codebook_error_is_monotone_in_r(
        atoms in proptest::collection::vec((arb_point(2.0), 0.01..1.0f64), 2..24),
        codebook in proptest::collection::vec(arb_point(2.0), 1..5),
        r_pairs in proptest::sample::subsequence(vec![(1.0, 2.0), (1.5, 3.0), (2.0, 4.0)], 1..3),
    ) {
        let (pts, ws): (Vec<Point>, Vec<f64>) = atoms.into_iter().unzip();
        let m = DiscreteMeasure::from_parts(pts, ws, Provenance::File).unwrap();
        let code = Codebook::new(codebook, Order::Finite(1.0));
        for (r, s) in r_pairs {
            let er = error(&m, &code, Order::Finite(r)).unwrap();
            let es = error(&m, &code, Order::Finite(s)).unwrap();
            prop_assert!(er <= es + 1e-12, "e_{r} = {er} > e_{s} = {es}");
        }
        let e2 = error(&m, &code, Order::Finite(2.0)).unwrap();
        let einf = error(&m, &code, Order::Infinity).unwrap();
        prop_assert!(e2 <= einf + 1e-12);
    }

    #[test]
    fn excess_errors_are_ordered(
        e_inf in 0.0..2.0f64,
        excess in 0.0..1.0f64,
        r in 1.0..6.0f64,
    ) {
        let e = e_inf + excess;
        let (e_hat, e_tilde, _) = excess_errors(e, e_inf, Order::Finite(r));
        prop_assert!(e_tilde <= e_hat + 1e-12);
        let (h1, t1, _) = excess_errors(e, e_inf, Order::Finite(1.0));
        prop_assert!((h1 - t1).abs() <= 1e-12);
    }
}

/// When support and constraint are disjoint the projected support is nowhere
/// dense in the constraint: near every image point, at every scale, the set
/// sampler finds a set point away from the whole image sample.
#[test]
fn nowhere_density_witness_on_disjoint_scenes() {
    for scene in [circle_ball_half(1024), cantor_line(10)] {
        let s = &scene.constraint;
        let (images, _) = s.project_set(scene.measure.atoms()).unwrap();
        let tol = s.proj_tol();
        for rho in [0.05f64, 0.1, 0.2] {
            let net = s.sample_boundary(rho / 8.0).unwrap();
            for y in images.iter().step_by(images.len() / 24) {
                let witness = net
                    .iter()
                    .any(|q| q.dist(*y) <= rho && images.iter().all(|img| img.dist(*q) > tol));
                assert!(witness, "no off-image set point within {rho} of {y:?}");
            }
        }
    }
}

/// Solved codebooks approach the projected support as n grows: on the
/// circle-in-disc scene the Hausdorff distance to the image sample shrinks
/// and the codebook radius climbs toward 1.
#[test]
fn quantizers_approximate_the_projected_support() {
    let scene = circle_disc(2048);
    let (images, _) = scene.constraint.project_set(scene.measure.atoms()).unwrap();
    let opts = SolveOptions::default();
    let d_h = |code: &Codebook| -> f64 {
        let a = images
            .iter()
            .map(|y| {
                code.points
                    .iter()
                    .map(|c| y.dist(*c))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        let b = code
            .points
            .iter()
            .map(|c| {
                images
                    .iter()
                    .map(|y| y.dist(*c))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        a.max(b)
    };
    let (code4, _) = solve(
        &scene.measure,
        &scene.constraint,
        4,
        Order::Finite(2.0),
        &opts,
    )
    .unwrap();
    let (code64, _) = solve(
        &scene.measure,
        &scene.constraint,
        64,
        Order::Finite(2.0),
        &opts,
    )
    .unwrap();
    assert!(
        d_h(&code64) < d_h(&code4),
        "{} vs {}",
        d_h(&code64),
        d_h(&code4)
    );

    let mean_radius = |code: &Codebook| {
        code.points.iter().map(|p| p.norm()).sum::<f64>() / code.points.len() as f64
    };
    assert!(mean_radius(&code64) > mean_radius(&code4));
    assert!((mean_radius(&code64) - circle_optimal_radius(64)).abs() < 1e-3);
}

/// Doubling the quadrature node count moves downstream error values by at
/// most C/nodes (empirical Cauchy refinement).
#[test]
fn circle_quadrature_refinement_is_cauchy() {
    let rho = circle_optimal_radius(4);
    let square: Vec<Point> = (0..4)
        .map(|k| {
            let t = std::f64::consts::PI * (0.25 + 0.5 * k as f64);
            Point::xy(rho * t.cos(), rho * t.sin())
        })
        .collect();
    let code = Codebook::new(square, Order::Finite(2.0));
    let e_at = |nodes: usize| {
        let m = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, nodes).unwrap();
        error(&m, &code, Order::Finite(2.0)).unwrap()
    };
    let (e1, e2, e3) = (e_at(1024), e_at(2048), e_at(4096));
    assert!((e2 - e1).abs() <= 1.0 / 1024.0);
    assert!((e3 - e2).abs() <= 1.0 / 2048.0);
    assert!((e3 - e2).abs() <= (e2 - e1).abs() + 1e-12);
}

/// On monotone curves the dimension fitted from the plain difference stays
/// below the dimension fitted from the power difference (plus slack).
#[test]
fn tilde_dimension_does_not_exceed_hat_dimension() {
    let scene = cantor_line(10);
    let curve = error_curve(
        &scene.measure,
        &scene.constraint,
        Order::Finite(2.0),
        &[2, 4, 8, 16, 32],
        &SolveOptions::default(),
    )
    .unwrap();
    let hat = fit_quant_dimension(&curve, CurveKind::Hat, 0.5).unwrap();
    let tilde = fit_quant_dimension(&curve, CurveKind::Tilde, 0.5).unwrap();
    assert!(tilde.global_slope_dim <= hat.global_slope_dim + 0.05);
    for (t, h) in tilde.local_slopes.iter().zip(&hat.local_slopes) {
        assert!(t.slope <= h.slope + 0.05);
    }
}

/// The perturbation error budget also holds on the line scene.
#[test]
fn perturbation_budget_on_the_line_scene() {
    let scene = cantor_line(10);
    let images = scene
        .measure
        .pushforward(&scene.constraint)
        .unwrap()
        .atoms()
        .to_vec();
    let n = 2usize;
    let pts = vec![images[images.len() / 4], images[3 * images.len() / 4]];
    let code = Codebook::new(pts, Order::Finite(1.0));
    let e_old = error(&scene.measure, &code, Order::Finite(1.0)).unwrap();
    for eps in [1e-2, 1e-3] {
        let budget = eps / n as f64;
        let (moved, report) =
            perturb_codebook(&code, &scene.constraint, &images, eps, n, 1.0).unwrap();
        assert_eq!(report.moved.len(), n);
        let e_new = error(&scene.measure, &moved, Order::Finite(1.0)).unwrap();
        assert!((e_new - e_old).abs() <= budget + 1e-9);
        for p in &moved.points {
            let gap = images
                .iter()
                .map(|y| p.dist(*y))
                .fold(f64::INFINITY, f64::min);
            assert!(gap > scene.constraint.proj_tol());
        }
    }
}
