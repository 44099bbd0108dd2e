//! Positive-mass (U1) and lower-regularity (U3) checks of projected ball
//! masses across the built-in scenes, plus Ahlfors ratio diagnostics.

use cquant::dimension::{ahlfors_check, check_condition_u1, check_condition_u3};
use cquant::scenario::preset;

fn main() {
    for name in ["circle-ball-half", "cantor-line", "dirac-circle", "vshape"] {
        let sc = preset(name).unwrap();
        let an = &sc.analysis;
        let u1 =
            check_condition_u1(&sc.measure, &sc.constraint, &an.u1_eps, an.probe_count).unwrap();
        print!(
            "{name:>16}: U1 {}",
            if u1.verdict { "pass" } else { "FAIL" }
        );
        if let Some(p) = u1.failing_probe {
            print!(" at probe ({:.3}, {:.3})", p.x(), p.y());
        }

        let s_dim = an.u3_s.unwrap_or(2f64.ln() / 3f64.ln());
        let u3 = check_condition_u3(
            &sc.measure,
            &sc.constraint,
            s_dim,
            &an.u3_eps,
            an.probe_count,
        )
        .unwrap();
        println!(
            " | U3(s={s_dim:.4}) {} inf ratio {:.4e}",
            if u3.verdict { "pass" } else { "FAIL" },
            u3.inf_ratio
        );
    }

    // Ahlfors regularity of the push-forward measures at their dimensions
    println!();
    let circle = preset("circle-ball-half").unwrap();
    let fwd = circle.measure.pushforward(&circle.constraint).unwrap();
    let radii: Vec<f64> = (2..=10).map(|k| 2f64.powi(-k)).collect();
    let chk = ahlfors_check(&fwd, 1.0, &radii, 64).unwrap();
    println!(
        "circle image at d=1: ratios in [{:.4}, {:.4}], pass {}",
        chk.c_lower, chk.c_upper, chk.pass
    );

    let cantor = preset("cantor-line").unwrap();
    let fwd = cantor.measure.pushforward(&cantor.constraint).unwrap();
    let radii: Vec<f64> = (1..=8).map(|k| 3f64.powi(-k)).collect();
    let d = 2f64.ln() / 3f64.ln();
    let chk = ahlfors_check(&fwd, d, &radii, 64).unwrap();
    println!(
        "cantor image at d={d:.4}: ratios in [{:.4}, {:.4}], pass {}",
        chk.c_lower, chk.c_upper, chk.pass
    );
    let bad = ahlfors_check(&fwd, 1.0, &radii, 64).unwrap();
    println!(
        "cantor image at the wrong d=1: ratios in [{:.2e}, {:.2e}], pass {}",
        bad.c_lower, bad.c_upper, bad.pass
    );
}
