//! Scenario execution: wires measures, constraints, solvers and dimension
//! estimators together and writes the output files.
//!
//! All floating-point output carries 12 significant digits, and a fixed
//! scenario + seed produces byte-identical files across runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dimension::{
    ahlfors_check, box_dimension, check_condition_u1, check_condition_u3, fit_quant_dimension,
    AhlforsCheck, BoxScale, ConditionU1, ConditionU3, Conditions, DimensionReport, QuantDimFit,
};
use crate::error::{Error, Result};
use crate::geometry::TieCount;
use crate::measures::DiscreteMeasure;
use crate::point::{fmt_g12, sig12, Point};
use crate::quantizer::{self, excess_errors, Codebook, ErrorCurve, Order};
use crate::scenario::Scenario;

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

fn fmt_point(p: Point, dim: usize) -> String {
    let mut cols: Vec<String> = vec![fmt_g12(p.x())];
    if dim >= 2 {
        cols.push(fmt_g12(p.y()));
    }
    if dim >= 3 {
        cols.push(fmt_g12(p.z()));
    }
    cols.join(" ")
}

fn codebook_file(code: &Codebook, dim: usize) -> String {
    let mut out = String::new();
    for p in &code.points {
        out.push_str(&fmt_point(*p, dim));
        out.push('\n');
    }
    out
}

fn summary_csv(r: Order, n: usize, code: &Codebook, e: f64, e_inf: f64, restarts: usize) -> String {
    let (e_hat, e_tilde, clamped) = excess_errors(e, e_inf, r);
    format!(
        "{}\n{},{},{},{},{},{},{},{},{},{}\n",
        ErrorCurve::CSV_HEADER,
        n,
        r,
        fmt_g12(e),
        fmt_g12(e_inf),
        fmt_g12(e_hat),
        fmt_g12(e_tilde),
        0,
        restarts,
        code.seed,
        clamped as u8,
    )
}

/// Solves one codebook and writes `codebook.txt` (`x y [z]` rows) plus a
/// one-row `summary.csv`.
pub fn run_quantize(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let (code, e) = quantizer::solve(&sc.measure, &sc.constraint, sc.quantize_n, sc.r, &sc.solver)?;
    let e_inf = quantizer::e_infinity(&sc.measure, &sc.constraint, sc.r)?;

    let codebook_path = out_dir.join("codebook.txt");
    write_file(&codebook_path, &codebook_file(&code, sc.dim))?;
    let summary_path = out_dir.join("summary.csv");
    write_file(
        &summary_path,
        &summary_csv(sc.r, sc.quantize_n, &code, e, e_inf, sc.solver.restarts),
    )?;
    Ok(vec![codebook_path, summary_path])
}

/// Writes the per-n error curve CSV.
pub fn run_curve(sc: &Scenario, out_dir: &Path) -> Result<(ErrorCurve, PathBuf)> {
    ensure_dir(out_dir)?;
    let curve = quantizer::error_curve(&sc.measure, &sc.constraint, sc.r, &sc.n_list, &sc.solver)?;
    let path = out_dir.join("curve.csv");
    write_file(&path, &curve.to_csv())?;
    Ok((curve, path))
}

fn rounded_fit(fit: &QuantDimFit) -> QuantDimFit {
    QuantDimFit {
        quant_dim_upper: sig12(fit.quant_dim_upper),
        quant_dim_lower: sig12(fit.quant_dim_lower),
        global_slope_dim: sig12(fit.global_slope_dim),
        local_slopes: fit
            .local_slopes
            .iter()
            .map(|s| crate::dimension::LocalSlope {
                n_from: s.n_from,
                n_to: s.n_to,
                slope: sig12(s.slope),
            })
            .collect(),
        verdict: fit.verdict.clone(),
    }
}

type AnalysisPieces = (
    f64,
    Vec<BoxScale>,
    Option<AhlforsCheck>,
    Option<ConditionU1>,
    Option<ConditionU3>,
);

fn analysis_pieces(sc: &Scenario, images: &DiscreteMeasure) -> Result<AnalysisPieces> {
    let an = &sc.analysis;
    let (box_dim, box_table) = if an.run_box {
        box_dimension(images.atoms(), &an.box_scales)?
    } else {
        (0.0, Vec::new())
    };

    let ahlfors = if an.run_ahlfors {
        let d = match an.ahlfors_d {
            Some(d) => d,
            None => box_dim,
        };
        if d > 0.0 {
            let chk = ahlfors_check(images, d, &an.ahlfors_radii, an.ahlfors_centers)?;
            Some(AhlforsCheck {
                d: sig12(chk.d),
                c_lower: sig12(chk.c_lower),
                c_upper: sig12(chk.c_upper),
                pass: chk.pass,
            })
        } else {
            None
        }
    } else {
        None
    };

    let u1 = if an.run_u1 {
        Some(check_condition_u1(
            &sc.measure,
            &sc.constraint,
            &an.u1_eps,
            an.probe_count,
        )?)
    } else {
        None
    };
    let u3 = if an.run_u3 {
        let (s_dim, source) = match an.u3_s {
            Some(s) => (s, "given"),
            None => (box_dim, "box_estimate"),
        };
        if s_dim > 0.0 {
            let mut chk = check_condition_u3(
                &sc.measure,
                &sc.constraint,
                s_dim,
                &an.u3_eps,
                an.probe_count,
            )?;
            chk.s_source = source.into();
            Some(chk)
        } else {
            None
        }
    } else {
        None
    };
    Ok((box_dim, box_table, ahlfors, u1, u3))
}

/// Full analysis bundle: error-curve CSV plus the dimension report document.
pub fn run_analyze(sc: &Scenario, out_dir: &Path) -> Result<(DimensionReport, Vec<PathBuf>)> {
    ensure_dir(out_dir)?;
    let (curve, curve_path) = run_curve(sc, out_dir)?;

    let fit = match fit_quant_dimension(&curve, sc.analysis.curve, sc.analysis.window) {
        Ok(fit) => fit,
        Err(Error::Degenerate(msg)) => QuantDimFit {
            quant_dim_upper: 0.0,
            quant_dim_lower: 0.0,
            global_slope_dim: 0.0,
            local_slopes: Vec::new(),
            verdict: format!("degenerate: {msg}"),
        },
        Err(e) => return Err(e),
    };
    let fit = rounded_fit(&fit);

    let images = sc.measure.pushforward(&sc.constraint)?;
    let (box_dim, box_table, ahlfors, u1, u3) = analysis_pieces(sc, &images)?;

    let report = DimensionReport {
        quant_dim_upper: fit.quant_dim_upper,
        quant_dim_lower: fit.quant_dim_lower,
        global_slope_dim: fit.global_slope_dim,
        verdict: fit.verdict.clone(),
        local_slopes: fit.local_slopes.clone(),
        box_dim: sig12(box_dim),
        box_table,
        ahlfors,
        conditions: Conditions { u1, u3 },
        on_projection_counts: curve.rows.iter().map(|r| (r.n, r.on_projection)).collect(),
    };

    let report_path = out_dir.join("report.json");
    write_file(&report_path, &to_json(&report)?)?;
    Ok((report, vec![curve_path, report_path]))
}

/// Regularity checks only (no solves): Ahlfors ratios and the mass
/// conditions, written as `checks.json`.
pub fn run_check(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let images = sc.measure.pushforward(&sc.constraint)?;
    let (box_dim, box_table, ahlfors, u1, u3) = analysis_pieces(sc, &images)?;

    #[derive(Serialize)]
    struct ChecksReport {
        box_dim: f64,
        box_table: Vec<BoxScale>,
        ahlfors: Option<AhlforsCheck>,
        conditions: Conditions,
    }
    let report = ChecksReport {
        box_dim: sig12(box_dim),
        box_table,
        ahlfors,
        conditions: Conditions { u1, u3 },
    };
    let path = out_dir.join("checks.json");
    write_file(&path, &to_json(&report)?)?;
    Ok(vec![path])
}

/// Projects points (the scenario measure's atoms, or an explicit list) and
/// writes `projection.csv`.
pub fn run_project(
    sc: &Scenario,
    points: Option<&[Point]>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let default_atoms;
    let pts: &[Point] = match points {
        Some(p) => p,
        None => {
            default_atoms = sc.measure.atoms().to_vec();
            &default_atoms
        }
    };
    let mut out = String::from("x,y,z,px,py,pz,dist,ties\n");
    for &p in pts {
        let r = sc.constraint.project(p);
        let ties = match r.tie_count {
            TieCount::Finite(k) => k.to_string(),
            TieCount::Continuum => "continuum".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_g12(p.x()),
            fmt_g12(p.y()),
            fmt_g12(p.z()),
            fmt_g12(r.representative.x()),
            fmt_g12(r.representative.y()),
            fmt_g12(r.representative.z()),
            fmt_g12(r.distance),
            ties,
        ));
    }
    let path = out_dir.join("projection.csv");
    write_file(&path, &out)?;
    Ok(vec![path])
}

/// `reproduce`: quantize + curve + dimension report + checks in one bundle.
pub fn run_reproduce(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut files = run_quantize(sc, out_dir)?;
    let (_, mut analyze_files) = run_analyze(sc, out_dir)?;
    files.append(&mut analyze_files);
    files.append(&mut run_check(sc, out_dir)?);
    Ok(files)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Degenerate(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}
