//! Parsing a scenario document and running the full analysis bundle, the
//! same path the `cquant` binary takes.

use cquant::runner::run_analyze;
use cquant::scenario::parse_scenario;

const SCENARIO: &str = "
[scenario]
name = cantor-demo
seed = 3
r = 2
n_list = 2,4,8,16
n = 2

[measure]
kind = cantor
a = 0 0
b = 1 0
depth = 8

[constraint]
kind = segment
a = -1 1
b = 2 1

[solver]
restarts = 8

[analysis]
curve = hat
box_scales = 0.111111111111,0.037037037037,0.012345679012,0.004115226337
u1_eps = 0.111111111111,0.037037037037
u3_s = auto
checks = u1,u3,box
";

fn main() {
    let sc = parse_scenario(SCENARIO, None).unwrap();
    println!(
        "scenario {:?}: {} atoms, r = 2, n_list {:?}",
        sc.name,
        sc.measure.len(),
        sc.n_list
    );

    let out = std::env::temp_dir().join("cquant-scenario-demo");
    let (report, files) = run_analyze(&sc, &out).unwrap();
    println!(
        "dimension estimates: lower {:.4}, upper {:.4}, global {:.4}, box {:.4}",
        report.quant_dim_lower, report.quant_dim_upper, report.global_slope_dim, report.box_dim
    );
    if let Some(u1) = &report.conditions.u1 {
        println!("U1 verdict: {}", u1.verdict);
    }
    if let Some(u3) = &report.conditions.u3 {
        println!("U3 verdict: {} (s from {})", u3.verdict, u3.s_source);
    }
    for f in files {
        println!("wrote {}", f.display());
    }
}
