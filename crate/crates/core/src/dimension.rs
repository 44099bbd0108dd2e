//! Dimension estimates and regularity diagnostics.
//!
//! Quantization dimensions are fitted from error curves via the log-ratio
//! form `d ≈ log n / (−log ê_n)`; limsup/liminf are proxied by the extreme
//! local slopes over a tail window, reported as estimates rather than
//! certified bounds. Box counting uses an origin-anchored grid, and the
//! condition checks probe ball masses of the push-forward images.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::measures::DiscreteMeasure;
use crate::point::Point;
use crate::quantizer::ErrorCurve;

/// Noise floor applied to excess errors before taking logs; clamped rows
/// would otherwise produce -inf.
pub const NOISE_FLOOR: f64 = 1e-9;

/// Default admissible spread `c_upper / c_lower` for the Ahlfors check.
pub const AHLFORS_SPREAD_BOUND: f64 = 1e3;

/// Which excess-error sequence a fit reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Hat,
    Tilde,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalSlope {
    pub n_from: usize,
    pub n_to: usize,
    pub slope: f64,
}

/// Quantization-dimension estimates from one error curve.
#[derive(Debug, Clone, Serialize)]
pub struct QuantDimFit {
    pub quant_dim_upper: f64,
    pub quant_dim_lower: f64,
    pub global_slope_dim: f64,
    pub local_slopes: Vec<LocalSlope>,
    pub verdict: String,
}

impl QuantDimFit {
    fn degenerate() -> Self {
        QuantDimFit {
            quant_dim_upper: 0.0,
            quant_dim_lower: 0.0,
            global_slope_dim: 0.0,
            local_slopes: Vec::new(),
            verdict: "degenerate: excess error identically zero".into(),
        }
    }
}

/// Fits dimension estimates from the `ê` (or `ẽ`) column of a curve.
///
/// Local slope between consecutive rows: `log(n2/n1) / log(v1/v2)`; the
/// upper/lower estimates are the extreme local slopes over the last
/// `window` fraction of usable rows and the global estimate is `-1/slope`
/// of the least-squares fit of `log v` against `log n` on that tail.
pub fn fit_quant_dimension(
    curve: &ErrorCurve,
    which: CurveKind,
    window: f64,
) -> Result<QuantDimFit> {
    if !(0.0..=1.0).contains(&window) || window == 0.0 {
        return Err(Error::Usage(format!(
            "window must lie in (0, 1], got {window}"
        )));
    }
    let vals: Vec<(usize, f64)> = curve
        .rows
        .iter()
        .map(|row| {
            let v = match which {
                CurveKind::Hat => row.e_hat,
                CurveKind::Tilde => row.e_tilde,
            };
            (row.n, v)
        })
        .filter(|(_, v)| *v > NOISE_FLOOR)
        .collect();

    if vals.is_empty() {
        return Ok(QuantDimFit::degenerate());
    }
    if vals.len() < 4 {
        return Err(Error::Degenerate(format!(
            "only {} rows above the noise floor; need at least 4 for a dimension fit",
            vals.len()
        )));
    }

    let slopes: Vec<LocalSlope> = vals
        .windows(2)
        .map(|w| {
            let (n1, v1) = w[0];
            let (n2, v2) = w[1];
            // ratio form: scaling every value by a common factor cancels
            // before the log is taken
            let denom = (v1 / v2).ln();
            let slope = (n2 as f64 / n1 as f64).ln() / denom;
            LocalSlope {
                n_from: n1,
                n_to: n2,
                slope,
            }
        })
        .collect();

    let tail_rows = ((window * vals.len() as f64).ceil() as usize).clamp(2, vals.len());
    let tail = &vals[vals.len() - tail_rows..];
    let tail_slopes = &slopes[slopes.len() - (tail_rows - 1)..];

    let quant_dim_upper = tail_slopes
        .iter()
        .map(|s| s.slope)
        .fold(f64::NEG_INFINITY, f64::max);
    let quant_dim_lower = tail_slopes
        .iter()
        .map(|s| s.slope)
        .fold(f64::INFINITY, f64::min);

    let xs: Vec<f64> = tail.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, v)| v.ln()).collect();
    let b = least_squares_slope(&xs, &ys);
    let global_slope_dim = if b == 0.0 { f64::INFINITY } else { -1.0 / b };

    Ok(QuantDimFit {
        quant_dim_upper,
        quant_dim_lower,
        global_slope_dim,
        local_slopes: slopes,
        verdict: "ok".into(),
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxScale {
    pub delta: f64,
    pub count: usize,
}

/// Box-counting dimension of a point set over the given scales: occupied
/// axis-aligned boxes anchored at the origin, slope of `log N` vs `-log δ`.
pub fn box_dimension(pts: &[Point], scales: &[f64]) -> Result<(f64, Vec<BoxScale>)> {
    if pts.is_empty() {
        return Err(Error::Usage(
            "box_dimension needs a nonempty point set".into(),
        ));
    }
    if scales.len() < 2 || scales.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Usage(
            "box_dimension needs >= 2 positive scales".into(),
        ));
    }
    let mut table = Vec::with_capacity(scales.len());
    for &delta in scales {
        let mut boxes = std::collections::BTreeSet::new();
        for p in pts {
            let key = (
                (p.x() / delta).floor() as i64,
                (p.y() / delta).floor() as i64,
                (p.z() / delta).floor() as i64,
            );
            boxes.insert(key);
        }
        table.push(BoxScale {
            delta,
            count: boxes.len(),
        });
    }
    let xs: Vec<f64> = table.iter().map(|b| -b.delta.ln()).collect();
    let ys: Vec<f64> = table.iter().map(|b| (b.count as f64).ln()).collect();
    Ok((least_squares_slope(&xs, &ys), table))
}

#[derive(Debug, Clone, Serialize)]
pub struct AhlforsCheck {
    pub d: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub pass: bool,
}

/// Samples `μ(B(a,r))/r^d` over stride-sampled support centers and the
/// radius grid; passes when the ratio spread stays within
/// [`AHLFORS_SPREAD_BOUND`] and the lower constant is positive.
pub fn ahlfors_check(
    mu: &DiscreteMeasure,
    d: f64,
    radii: &[f64],
    centers: usize,
) -> Result<AhlforsCheck> {
    if !(d > 0.0) {
        return Err(Error::Usage(format!(
            "ahlfors dimension must be positive, got {d}"
        )));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Usage("ahlfors check needs positive radii".into()));
    }
    let centers = centers.clamp(1, mu.len());
    let stride = (mu.len() / centers).max(1);
    let atoms = mu.atoms();
    let weights = mu.weights();

    let mut c_lower = f64::INFINITY;
    let mut c_upper = 0.0f64;
    for ci in (0..mu.len()).step_by(stride).take(centers) {
        let a = atoms[ci];
        for &r in radii {
            let mass: f64 = atoms
                .iter()
                .zip(weights)
                .filter(|(x, _)| x.dist(a) <= r)
                .map(|(_, w)| *w)
                .sum();
            let ratio = mass / r.powf(d);
            c_lower = c_lower.min(ratio);
            c_upper = c_upper.max(ratio);
        }
    }
    let pass = c_lower > 0.0 && c_upper / c_lower <= AHLFORS_SPREAD_BOUND;
    Ok(AhlforsCheck {
        d,
        c_lower,
        c_upper,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeMass {
    pub probe: Point,
    pub eps: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionU1 {
    pub verdict: bool,
    /// Minimum probe mass per epsilon, coarsest first.
    pub min_mass: Vec<(f64, f64)>,
    pub failing_probe: Option<Point>,
    pub table: Vec<ProbeMass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionU3 {
    pub verdict: bool,
    pub s: f64,
    pub s_source: String,
    /// Infimum of `mass/eps^s` over probes, per epsilon (coarsest first).
    pub inf_ratio_per_eps: Vec<(f64, f64)>,
    pub inf_ratio: f64,
    pub table: Vec<ProbeMass>,
}

/// Probe points covering the projected support: the selected images and all
/// discrete projection minimizers of the atoms, plus set samples that attain
/// some atom's projection distance. Boundary samples keep witnesses that the
/// single-valued selector never visits (the whole sphere for a point mass at
/// its center, the apex of the three-branch scene).
fn projection_probe_pool(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    pool_res: f64,
) -> Result<(Vec<Point>, Vec<Point>)> {
    let atoms = p.atoms();
    let mut images = Vec::with_capacity(atoms.len());
    let mut pool: Vec<Point> = Vec::new();
    let mut proj_d = Vec::with_capacity(atoms.len());
    for &a in atoms {
        let r = s.project(a);
        images.push(r.representative);
        proj_d.push(r.distance);
        pool.extend_from_slice(&r.all_minimizers);
    }

    let member_tol = (8.0 * s.proj_tol()).max(1e-12);
    let reach_sq: Vec<f64> = proj_d
        .iter()
        .map(|d| (d + member_tol) * (d + member_tol))
        .collect();
    for b in s.sample_boundary(pool_res)? {
        let member = atoms
            .iter()
            .zip(&reach_sq)
            .any(|(x, r2)| x.dist_sq(b) <= *r2);
        if member {
            pool.push(b);
        }
    }
    pool.sort_by(|a, b| a.lex_cmp(b));
    Ok((pool, images))
}

/// Deterministic probe selection: pool points not represented by any
/// selected image come first (they are the potential failure witnesses),
/// then a stride over the rest.
fn select_probes(pool: &[Point], images: &[Point], probe_count: usize, tol: f64) -> Vec<Point> {
    let tol_sq = tol * tol;
    let (orphans, covered): (Vec<Point>, Vec<Point>) = pool
        .iter()
        .partition(|b| !images.iter().any(|img| img.dist_sq(**b) <= tol_sq));
    let mut probes = Vec::with_capacity(probe_count);
    let quota = (probe_count / 2).max(1);
    probes.extend(stride_take(&orphans, quota));
    probes.extend(stride_take(&covered, probe_count - probes.len()));
    if probes.is_empty() {
        probes.extend(stride_take(pool, probe_count));
    }
    probes
}

fn stride_take(list: &[Point], quota: usize) -> Vec<Point> {
    if list.is_empty() || quota == 0 {
        return Vec::new();
    }
    if list.len() <= quota {
        return list.to_vec();
    }
    (0..quota).map(|i| list[i * list.len() / quota]).collect()
}

fn probe_masses(
    probes: &[Point],
    images: &[Point],
    weights: &[f64],
    eps_list: &[f64],
) -> Vec<ProbeMass> {
    let mut table = Vec::with_capacity(probes.len() * eps_list.len());
    for &eps in eps_list {
        for &probe in probes {
            let mass: f64 = images
                .iter()
                .zip(weights)
                .filter(|(img, _)| img.dist(probe) <= eps)
                .map(|(_, w)| *w)
                .sum::<f64>()
                + 0.0; // empty sums yield -0.0
            table.push(ProbeMass { probe, eps, mass });
        }
    }
    table
}

fn sorted_eps(eps_list: &[f64]) -> Result<Vec<f64>> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Usage(
            "epsilon list must be nonempty and positive".into(),
        ));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eps.dedup();
    Ok(eps)
}

/// Checks that every ball around the projected support carries positive
/// mass under the selected projection, stably across the epsilon grid.
pub fn check_condition_u1(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    eps_list: &[f64],
    probe_count: usize,
) -> Result<ConditionU1> {
    let eps = sorted_eps(eps_list)?;
    let scale = s.diameter().max(p.support_diameter()).max(1e-9);
    let (pool, images) = projection_probe_pool(p, s, scale / 128.0)?;
    let probes = select_probes(
        &pool,
        &images,
        probe_count.max(1),
        (8.0 * s.proj_tol()).max(1e-12),
    );
    let table = probe_masses(&probes, &images, p.weights(), &eps);

    let mut min_mass = Vec::with_capacity(eps.len());
    let mut failing: Option<Point> = None;
    for &e in &eps {
        let rows = table.iter().filter(|r| r.eps == e);
        let mut min_v = f64::INFINITY;
        let mut min_p = None;
        for r in rows {
            if r.mass < min_v {
                min_v = r.mass;
                min_p = Some(r.probe);
            }
        }
        min_mass.push((e, min_v));
        if min_v <= 0.0 && failing.is_none() {
            failing = min_p;
        }
    }
    let verdict = min_mass.iter().all(|(_, m)| *m > 0.0);
    Ok(ConditionU1 {
        verdict,
        min_mass,
        failing_probe: failing,
        table,
    })
}

/// Lower-regularity check of the projected masses: `inf mass/eps^s` over
/// probes must stay positive and within a factor 10 between the coarsest
/// and finest epsilon.
pub fn check_condition_u3(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    s_dim: f64,
    eps_list: &[f64],
    probe_count: usize,
) -> Result<ConditionU3> {
    if !(s_dim > 0.0) {
        return Err(Error::Usage(format!(
            "condition exponent must be positive, got {s_dim}"
        )));
    }
    let eps = sorted_eps(eps_list)?;
    let scale = s.diameter().max(p.support_diameter()).max(1e-9);
    let (pool, images) = projection_probe_pool(p, s, scale / 128.0)?;
    let probes = select_probes(
        &pool,
        &images,
        probe_count.max(1),
        (8.0 * s.proj_tol()).max(1e-12),
    );
    let table = probe_masses(&probes, &images, p.weights(), &eps);

    let mut per_eps = Vec::with_capacity(eps.len());
    for &e in &eps {
        let inf = table
            .iter()
            .filter(|r| r.eps == e)
            .map(|r| r.mass / e.powf(s_dim))
            .fold(f64::INFINITY, f64::min);
        per_eps.push((e, inf));
    }
    let inf_ratio = per_eps
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let coarsest = per_eps.first().map(|(_, v)| *v).unwrap_or(0.0);
    let finest = per_eps.last().map(|(_, v)| *v).unwrap_or(0.0);
    let stable =
        coarsest > 0.0 && finest > 0.0 && coarsest.max(finest) / coarsest.min(finest) <= 10.0;
    Ok(ConditionU3 {
        verdict: inf_ratio > 0.0 && stable,
        s: s_dim,
        s_source: "given".into(),
        inf_ratio_per_eps: per_eps,
        inf_ratio,
        table,
    })
}

/// Aggregated analysis document with fixed key names.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub quant_dim_upper: f64,
    pub quant_dim_lower: f64,
    pub global_slope_dim: f64,
    pub verdict: String,
    pub local_slopes: Vec<LocalSlope>,
    pub box_dim: f64,
    pub box_table: Vec<BoxScale>,
    pub ahlfors: Option<AhlforsCheck>,
    pub conditions: Conditions,
    /// Per row of the fitted curve: codepoints observed on the sampled
    /// projected support.
    pub on_projection_counts: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conditions {
    #[serde(rename = "U1")]
    pub u1: Option<ConditionU1>,
    #[serde(rename = "U3")]
    pub u3: Option<ConditionU3>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::{ErrorCurveRow, Order};

    fn synthetic_curve(ns: &[usize], f: impl Fn(usize) -> f64) -> ErrorCurve {
        let rows = ns
            .iter()
            .map(|&n| {
                let e_hat = f(n);
                ErrorCurveRow {
                    n,
                    e: e_hat,
                    e_inf: 0.0,
                    e_hat,
                    e_tilde: e_hat,
                    iters: 0,
                    restarts: 0,
                    best_seed: 0,
                    clamped: false,
                    on_projection: 0,
                }
            })
            .collect();
        ErrorCurve {
            r: Order::Finite(2.0),
            rows,
        }
    }

    #[test]
    fn exact_power_law_recovers_exponent() {
        let curve = synthetic_curve(&[2, 4, 8, 16, 32, 64], |n| (n as f64).powf(-1.0 / 0.63));
        let fit = fit_quant_dimension(&curve, CurveKind::Hat, 0.5).unwrap();
        assert!((fit.quant_dim_upper - 0.63).abs() < 1e-12);
        assert!((fit.quant_dim_lower - 0.63).abs() < 1e-12);
        assert!((fit.global_slope_dim - 0.63).abs() < 1e-12);
        assert_eq!(fit.verdict, "ok");
    }

    #[test]
    fn scaling_the_curve_leaves_slopes_untouched() {
        let ns = [2usize, 4, 8, 16, 32];
        let base = synthetic_curve(&ns, |n| (n as f64).powf(-1.0 / 0.8) * 0.3127);
        // power-of-two factors scale floats exactly
        for factor in [4.0f64, 0.5, 1024.0] {
            let scaled = synthetic_curve(&ns, |n| factor * ((n as f64).powf(-1.0 / 0.8) * 0.3127));
            let f0 = fit_quant_dimension(&base, CurveKind::Hat, 0.5).unwrap();
            let f1 = fit_quant_dimension(&scaled, CurveKind::Hat, 0.5).unwrap();
            for (a, b) in f0.local_slopes.iter().zip(&f1.local_slopes) {
                assert_eq!(a.slope, b.slope);
            }
            assert_eq!(f0.quant_dim_upper, f1.quant_dim_upper);
            assert_eq!(f0.quant_dim_lower, f1.quant_dim_lower);
        }
    }

    #[test]
    fn degenerate_curve_yields_verdict_not_nan() {
        let curve = synthetic_curve(&[1, 2, 4, 8], |_| 0.0);
        let fit = fit_quant_dimension(&curve, CurveKind::Hat, 0.5).unwrap();
        assert!(fit.verdict.starts_with("degenerate"));
        assert_eq!(fit.quant_dim_upper, 0.0);
        assert_eq!(fit.quant_dim_lower, 0.0);
        assert!(!fit.global_slope_dim.is_nan());
    }

    #[test]
    fn too_few_usable_rows_is_an_error() {
        let curve = synthetic_curve(&[2, 4, 8, 16], |n| if n < 8 { 0.1 / n as f64 } else { 0.0 });
        assert!(fit_quant_dimension(&curve, CurveKind::Hat, 0.5).is_err());
    }

    #[test]
    fn cantor_box_counts_follow_log2_over_log3() {
        let m = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 12).unwrap();
        let scales: Vec<f64> = (2..=8).map(|k| 3f64.powi(-k)).collect();
        let (dim, table) = box_dimension(m.atoms(), &scales).unwrap();
        let want = 2f64.ln() / 3f64.ln();
        assert!((dim - want).abs() < 0.03, "box dim {dim}");
        for (k, row) in (2..=8).zip(&table) {
            assert_eq!(row.count, 1usize << k, "N(3^-{k})");
        }
        // counts nonincreasing as the box side grows
        for w in table.windows(2) {
            assert!(w[1].count >= w[0].count);
        }
    }

    #[test]
    fn circle_box_dimension_is_one() {
        let m = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096).unwrap();
        let scales: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
        let (dim, _) = box_dimension(m.atoms(), &scales).unwrap();
        assert!((dim - 1.0).abs() < 0.05, "box dim {dim}");
        // subsampling stability: halving the sample moves the estimate by < 0.05
        let half: Vec<Point> = m.atoms().iter().step_by(2).copied().collect();
        let (dim_half, _) = box_dimension(&half, &scales).unwrap();
        assert!((dim - dim_half).abs() < 0.05);
    }

    #[test]
    fn repeated_point_has_dimension_zero() {
        let pts = vec![Point::xy(0.3, 0.4); 10];
        let scales = [0.1, 0.01, 0.001];
        let (dim, table) = box_dimension(&pts, &scales).unwrap();
        assert_eq!(dim, 0.0);
        assert!(table.iter().all(|b| b.count == 1));
    }

    #[test]
    fn ahlfors_circle_passes_at_one_fails_at_two() {
        let m = DiscreteMeasure::uniform_circle(Point::ORIGIN, 1.0, 4096).unwrap();
        let radii: Vec<f64> = (2..=12).map(|k| 2f64.powi(-k)).collect();
        let ok = ahlfors_check(&m, 1.0, &radii, 32).unwrap();
        assert!(ok.pass, "spread {} / {}", ok.c_lower, ok.c_upper);
        // arc mass is about r/pi in the resolved regime, and the ratio tops
        // out at 1 once a ball holds a single atom
        assert!(ok.c_lower >= 0.2 && ok.c_upper <= 1.05, "{ok:?}");
        let bad = ahlfors_check(&m, 2.0, &radii, 32).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn ahlfors_cantor_measure_is_regular_at_its_dimension() {
        let m = DiscreteMeasure::cantor(Point::ORIGIN, Point::xy(1.0, 0.0), 10).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        let radii: Vec<f64> = (1..=8).map(|k| 3f64.powi(-k)).collect();
        let chk = ahlfors_check(&m, d, &radii, 64).unwrap();
        assert!(chk.pass, "{chk:?}");
        assert!(chk.c_upper / chk.c_lower < 5.0);
    }
}
