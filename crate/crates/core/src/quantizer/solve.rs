//! Multi-start solvers for the constrained n-quantizer problem.
//!
//! For r = 2 the per-cell objective is `Σ w‖x−a‖² = W‖a−c‖² + const`, so the
//! constrained cell minimizer is the projection of the weighted centroid —
//! exact for every closed constraint set, convex or not. General finite r
//! uses per-cell projected descent with backtracking; r = ∞ seeds with a
//! farthest-point sweep over set samples and polishes with 1-swap search.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::measures::DiscreteMeasure;
use crate::point::{weighted_mean, Point};

use super::{assign, moment, Assignment, Codebook, Order};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Multi-start count; restart 0 is a deterministic weighted-quantile
    /// seed, the rest are k-means++ draws.
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative change of the error at which iteration stops.
    pub tol: f64,
    pub seed: u64,
    /// Additional starting codebooks (e.g. the previous row of an error
    /// curve); padded up to n points and run like any other restart.
    pub extra_starts: Vec<Vec<Point>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 16,
            max_iters: 500,
            tol: 1e-10,
            seed: 0,
            extra_starts: Vec::new(),
        }
    }
}

pub(super) struct SolveDetail {
    pub code: Codebook,
    pub error: f64,
    pub iters: usize,
}

/// Best codebook over all restarts, together with its error.
pub fn solve(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    n: usize,
    r: Order,
    opts: &SolveOptions,
) -> Result<(Codebook, f64)> {
    solve_detailed(p, s, n, r, opts).map(|d| (d.code, d.error))
}

pub(super) fn solve_detailed(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    n: usize,
    r: Order,
    opts: &SolveOptions,
) -> Result<SolveDetail> {
    if n == 0 {
        return Err(Error::Usage("solve needs n >= 1".into()));
    }
    if p.atoms().iter().any(|a| !a.is_finite()) {
        return Err(Error::Usage("measure has non-finite atoms".into()));
    }
    match r {
        Order::Infinity => solve_infinity(p, s, n, opts),
        Order::Finite(rv) => solve_finite(p, s, n, rv, r, opts),
    }
}

fn solve_finite(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    n: usize,
    rv: f64,
    r: Order,
    opts: &SolveOptions,
) -> Result<SolveDetail> {
    let mut inits: Vec<(u64, Vec<Point>)> =
        Vec::with_capacity(opts.restarts + opts.extra_starts.len());
    inits.push((0, quantile_seed(p, s, n)));
    for k in 1..opts.restarts.max(1) {
        let seed = opts
            .seed
            .wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        inits.push((k as u64, kmeanspp_seed(p, s, n, seed)));
    }
    for (j, extra) in opts.extra_starts.iter().enumerate() {
        let mut pts: Vec<Point> = extra.iter().map(|q| s.project(*q).representative).collect();
        pad_with_farthest(p, s, n, &mut pts);
        dedupe(&mut pts, s.proj_tol());
        if !pts.is_empty() {
            inits.push((1000 + j as u64, pts));
        }
    }

    let runs: Vec<(u64, Vec<Point>, f64, usize, bool)> = inits
        .into_par_iter()
        .map(|(id, init)| {
            let (pts, e, iters, converged) = descend(p, s, init, rv, opts);
            (id, pts, e, iters, converged)
        })
        .collect();

    let mut best: Option<&(u64, Vec<Point>, f64, usize, bool)> = None;
    for run in &runs {
        if best.map_or(true, |b| run.2 < b.2) {
            best = Some(run);
        }
    }
    let (id, pts, e, iters, converged) = best.expect("at least one restart");
    let mut points = pts.clone();
    dedupe(&mut points, s.proj_tol());
    Ok(SolveDetail {
        code: Codebook {
            points,
            r,
            seed: *id,
            converged: *converged,
        },
        error: *e,
        iters: *iters,
    })
}

/// Iterates assignment/update until the error stalls. Monotone by
/// construction: each cell update cannot increase its cell cost and
/// reassignment never increases the total.
fn descend(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    init: Vec<Point>,
    rv: f64,
    opts: &SolveOptions,
) -> (Vec<Point>, f64, usize, bool) {
    let r = Order::Finite(rv);
    let mut pts = init;
    let mut prev = f64::INFINITY;
    let mut iters = 0;
    let mut converged = false;
    let code_stub = |points: Vec<Point>| Codebook {
        points,
        r,
        seed: 0,
        converged: false,
    };
    let mut code = code_stub(pts);
    loop {
        let asg = assign(p, &code).expect("nonempty codebook");
        let e = moment(p.weights(), &asg.dist, r);
        if (prev - e).abs() <= opts.tol * e.max(1e-300) {
            converged = true;
            return (code.points, e, iters, converged);
        }
        if iters >= opts.max_iters {
            return (code.points, e, iters, converged);
        }
        prev = e;
        iters += 1;
        pts = update_cells(p, s, &code.points, &asg, rv);
        code = code_stub(pts);
    }
}

/// One constrained update of every cell, with empty-cell repair: an empty
/// codepoint is reseeded at the projection of the atom currently farthest
/// from its owner, which keeps the objective nonincreasing because the
/// moved point was unused.
fn update_cells(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    pts: &[Point],
    asg: &Assignment,
    rv: f64,
) -> Vec<Point> {
    let n = pts.len();
    let atoms = p.atoms();
    let weights = p.weights();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, &o) in asg.owner.iter().enumerate() {
        if weights[j] > 0.0 {
            cells[o].push(j);
        }
    }

    let mut out = Vec::with_capacity(n);
    for (i, members) in cells.iter().enumerate() {
        if members.is_empty() {
            out.push(pts[i]);
            continue;
        }
        let new_pt = if rv == 2.0 {
            let cpts: Vec<Point> = members.iter().map(|&j| atoms[j]).collect();
            let cws: Vec<f64> = members.iter().map(|&j| weights[j]).collect();
            let c = weighted_mean(&cpts, &cws).expect("cell has mass");
            s.project(c).representative
        } else {
            minimize_cell(s, atoms, weights, members, rv, pts[i])
        };
        out.push(new_pt);
    }

    // repair empty cells at the farthest atoms
    let mut empties: Vec<usize> = (0..n).filter(|&i| cells[i].is_empty()).collect();
    if !empties.is_empty() {
        let mut order: Vec<usize> = (0..atoms.len()).filter(|&j| weights[j] > 0.0).collect();
        order.sort_by(|&a, &b| {
            asg.dist[b]
                .partial_cmp(&asg.dist[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        for (slot, j) in empties.drain(..).zip(order) {
            out[slot] = s.project(atoms[j]).representative;
        }
    }
    out
}

/// Projected gradient with backtracking (Armijo 1e-4, step halving) on one
/// cell's objective for finite r other than 2.
fn minimize_cell(
    s: &ConstraintSet,
    atoms: &[Point],
    weights: &[f64],
    members: &[usize],
    rv: f64,
    start: Point,
) -> Point {
    let f = |a: Point| -> f64 {
        members
            .iter()
            .map(|&j| weights[j] * atoms[j].dist(a).powf(rv))
            .sum()
    };
    let mut a = start;
    let mut fa = f(a);
    let mut t = 1.0f64;
    for _ in 0..100 {
        let mut g = Point::ORIGIN;
        for &j in members {
            let d = atoms[j].dist(a);
            if d > 1e-15 {
                g = g + (a - atoms[j]) * (weights[j] * rv * d.powf(rv - 2.0));
            }
        }
        let gn2 = g.norm_sq();
        if gn2 < 1e-30 {
            break;
        }
        t *= 2.0;
        let mut accepted = false;
        while t > 1e-18 {
            let cand = s.project(a - g * t).representative;
            let fc = f(cand);
            if fc <= fa - 1e-4 * t * gn2 {
                a = cand;
                fa = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    a
}

/// Exposed single constrained Lloyd step for r = 2.
pub fn lloyd_step_r2(p: &DiscreteMeasure, code: &Codebook, s: &ConstraintSet) -> Result<Codebook> {
    let is_r2 = matches!(code.r, Order::Finite(r) if r == 2.0);
    if !is_r2 {
        return Err(Error::Usage("lloyd_step_r2 requires order r = 2".into()));
    }
    let asg = assign(p, code)?;
    let total_cell_mass: f64 = p.weights().iter().sum();
    if total_cell_mass <= 0.0 {
        return Err(Error::Usage("every cell is empty".into()));
    }
    let pts = update_cells(p, s, &code.points, &asg, 2.0);
    Ok(Codebook {
        points: pts,
        r: code.r,
        seed: code.seed,
        converged: false,
    })
}

/// Deterministic weighted-quantile seeding: one atom per equal-mass slab,
/// projected onto the constraint.
fn quantile_seed(p: &DiscreteMeasure, s: &ConstraintSet, n: usize) -> Vec<Point> {
    let weights = p.weights();
    let atoms = p.atoms();
    let total: f64 = weights.iter().sum();
    let mut pts = Vec::with_capacity(n);
    let mut cum = 0.0;
    let mut j = 0usize;
    for k in 0..n {
        let target = total * (k as f64 + 0.5) / n as f64;
        while j + 1 < atoms.len() && cum + weights[j] < target {
            cum += weights[j];
            j += 1;
        }
        pts.push(s.project(atoms[j]).representative);
    }
    dedupe(&mut pts, s.proj_tol());
    pts
}

/// k-means++ style seeding: the first atom is drawn by weight, subsequent
/// atoms with probability proportional to `w · D²`.
fn kmeanspp_seed(p: &DiscreteMeasure, s: &ConstraintSet, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = p.atoms();
    let weights = p.weights();
    let total: f64 = weights.iter().sum();

    let pick = |rng: &mut ChaCha8Rng, scores: &[f64], total: f64| -> usize {
        let u = rng.gen::<f64>() * total;
        let mut cum = 0.0;
        for (j, sc) in scores.iter().enumerate() {
            cum += sc;
            if u < cum {
                return j;
            }
        }
        scores.len() - 1
    };

    let first = pick(&mut rng, weights, total);
    let mut chosen = vec![first];
    let mut d2: Vec<f64> = atoms.iter().map(|a| a.dist_sq(atoms[first])).collect();
    while chosen.len() < n {
        let scores: Vec<f64> = weights.iter().zip(&d2).map(|(w, d)| w * d).collect();
        let t: f64 = scores.iter().sum();
        if t <= 1e-300 {
            break;
        }
        let idx = pick(&mut rng, &scores, t);
        chosen.push(idx);
        for (j, a) in atoms.iter().enumerate() {
            d2[j] = d2[j].min(a.dist_sq(atoms[idx]));
        }
    }
    let mut pts: Vec<Point> = chosen
        .into_iter()
        .map(|j| s.project(atoms[j]).representative)
        .collect();
    dedupe(&mut pts, s.proj_tol());
    pts
}

/// Greedily appends projections of the atoms farthest from the current
/// codebook until it holds n points.
fn pad_with_farthest(p: &DiscreteMeasure, s: &ConstraintSet, n: usize, pts: &mut Vec<Point>) {
    let atoms = p.atoms();
    while pts.len() < n {
        let mut far_j = 0usize;
        let mut far_d = -1.0;
        for (j, a) in atoms.iter().enumerate() {
            if p.weights()[j] <= 0.0 {
                continue;
            }
            let d = pts.iter().map(|c| a.dist(*c)).fold(f64::INFINITY, f64::min);
            let d = if pts.is_empty() { a.norm() } else { d };
            if d > far_d {
                far_d = d;
                far_j = j;
            }
        }
        if far_d <= 0.0 {
            break;
        }
        pts.push(s.project(atoms[far_j]).representative);
    }
}

fn dedupe(pts: &mut Vec<Point>, tol: f64) {
    let mut kept: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts.iter() {
        if !kept.iter().any(|q| q.dist(*p) <= tol) {
            kept.push(*p);
        }
    }
    *pts = kept;
}

fn solve_infinity(
    p: &DiscreteMeasure,
    s: &ConstraintSet,
    n: usize,
    opts: &SolveOptions,
) -> Result<SolveDetail> {
    let diam = s.diameter().max(p.support_diameter()).max(1e-9);
    let mut best: Option<(Vec<Point>, f64)> = None;

    for extra in &opts.extra_starts {
        let mut pts: Vec<Point> = extra.iter().map(|q| s.project(*q).representative).collect();
        dedupe(&mut pts, s.proj_tol());
        if pts.is_empty() {
            continue;
        }
        let code = Codebook {
            points: pts.clone(),
            r: Order::Infinity,
            seed: 0,
            converged: false,
        };
        let asg = assign(p, &code)?;
        let radius = moment(p.weights(), &asg.dist, Order::Infinity);
        if best.as_ref().map_or(true, |(_, r0)| radius < *r0) {
            best = Some((pts, radius));
        }
    }

    let mut h = diam / 16.0;
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        let mut cands = s.sample_boundary(h)?;
        cap_candidates(&mut cands, p.len(), n);
        let (pts, radius) = gonzalez_swap(p, &cands, n);
        if best.as_ref().map_or(true, |(_, r0)| radius < *r0) {
            best = Some((pts, radius));
        }
        let incumbent = best.as_ref().unwrap().1;
        // candidate resolution tied to the incumbent covering radius
        let new_h = (incumbent / 8.0).max(diam * 1e-7);
        if rounds >= 4 || incumbent == 0.0 || new_h >= h * 0.95 {
            break;
        }
        h = new_h;
    }

    // nudge the polished codebook with one more swap pass at the final
    // resolution from the incumbent itself
    if let Some((pts, radius)) = &best {
        let mut cands = s.sample_boundary(h)?;
        cands.extend_from_slice(pts);
        cap_candidates(&mut cands, p.len(), n);
        let polished = swap_polish(p, &cands, seed_indices_of(&cands, pts));
        if polished.1 < *radius {
            best = Some(polished);
        }
    }

    let (mut pts, radius) = best.expect("at least one round");
    dedupe(&mut pts, s.proj_tol());
    Ok(SolveDetail {
        code: Codebook {
            points: pts,
            r: Order::Infinity,
            seed: opts.seed,
            converged: true,
        },
        error: radius,
        iters: rounds,
    })
}

/// Keeps the swap search affordable on dense sample sets.
fn cap_candidates(cands: &mut Vec<Point>, atom_count: usize, n: usize) {
    const WORK_BUDGET: usize = 200_000_000;
    let work = cands
        .len()
        .saturating_mul(atom_count)
        .saturating_mul(n.max(1));
    if work > WORK_BUDGET {
        let stride = work / WORK_BUDGET + 1;
        *cands = cands.iter().step_by(stride).copied().collect();
    }
}

/// Candidate indices nearest to the given points (used to re-polish an
/// incumbent codebook inside a fresh candidate set).
fn seed_indices_of(cands: &[Point], pts: &[Point]) -> Vec<usize> {
    pts.iter()
        .map(|p| {
            let mut best = 0usize;
            let mut bd = f64::INFINITY;
            for (ci, c) in cands.iter().enumerate() {
                let d = p.dist(*c);
                if d < bd {
                    bd = d;
                    best = ci;
                }
            }
            best
        })
        .collect()
}

/// Farthest-point seeding over the candidate set from several deterministic
/// starting atoms, each polished by best-improvement 1-swap search; the best
/// polished codebook wins. Multiple starts matter: a single seeding can
/// strand the max-min objective in a configuration no single swap improves.
fn gonzalez_swap(p: &DiscreteMeasure, cands: &[Point], n: usize) -> (Vec<Point>, f64) {
    let atoms = p.atoms();
    let weights = p.weights();
    let live: Vec<usize> = (0..atoms.len()).filter(|&j| weights[j] > 0.0).collect();
    let mean = crate::point::weighted_mean(atoms, weights).expect("measure has mass");

    // starting atoms: the one farthest from the mean plus fixed strides
    let mut starts: Vec<usize> = Vec::new();
    if let Some(&far) = live.iter().max_by(|&&a, &&b| {
        atoms[a]
            .dist(mean)
            .partial_cmp(&atoms[b].dist(mean))
            .unwrap()
            .then(b.cmp(&a))
    }) {
        starts.push(far);
    }
    for frac in [0usize, 1, 2] {
        let idx = live[frac * live.len() / 3];
        if !starts.contains(&idx) {
            starts.push(idx);
        }
    }

    let mut best: Option<(Vec<Point>, f64)> = None;
    for &start_atom in &starts {
        let chosen = gonzalez_seed(atoms, &live, cands, n, start_atom);
        let (pts, obj) = swap_polish(p, cands, chosen);
        if best.as_ref().map_or(true, |(_, o)| obj < *o) {
            best = Some((pts, obj));
        }
    }
    best.expect("at least one seeding start")
}

fn gonzalez_seed(
    atoms: &[Point],
    live: &[usize],
    cands: &[Point],
    n: usize,
    start_atom: usize,
) -> Vec<usize> {
    let nearest_cand = |target: Point, chosen: &[usize]| -> Option<usize> {
        let mut pick = None;
        let mut pick_d = f64::INFINITY;
        for (ci, c) in cands.iter().enumerate() {
            if chosen.contains(&ci) {
                continue;
            }
            let d = target.dist(*c);
            if d < pick_d {
                pick_d = d;
                pick = Some(ci);
            }
        }
        pick
    };

    let mut chosen: Vec<usize> = Vec::new();
    let Some(first) = nearest_cand(atoms[start_atom], &chosen) else {
        return chosen;
    };
    chosen.push(first);
    let mut dmin: Vec<f64> = atoms.iter().map(|a| a.dist(cands[first])).collect();

    while chosen.len() < n.min(cands.len()) {
        let far_j = *live
            .iter()
            .max_by(|&&a, &&b| dmin[a].partial_cmp(&dmin[b]).unwrap().then(b.cmp(&a)))
            .expect("measure nonempty");
        if dmin[far_j] == 0.0 {
            break;
        }
        let Some(ci) = nearest_cand(atoms[far_j], &chosen) else {
            break;
        };
        chosen.push(ci);
        for (j, a) in atoms.iter().enumerate() {
            dmin[j] = dmin[j].min(a.dist(cands[ci]));
        }
    }
    chosen
}

/// Best-improvement 1-swap local search on the max-min objective.
fn swap_polish(p: &DiscreteMeasure, cands: &[Point], mut chosen: Vec<usize>) -> (Vec<Point>, f64) {
    let atoms = p.atoms();
    let weights = p.weights();
    let live: Vec<usize> = (0..atoms.len()).filter(|&j| weights[j] > 0.0).collect();
    if chosen.is_empty() {
        chosen = vec![0];
    }

    for _pass in 0..50 {
        let k = chosen.len();
        let mut d1 = vec![f64::INFINITY; atoms.len()];
        let mut d2 = vec![f64::INFINITY; atoms.len()];
        let mut owner = vec![0usize; atoms.len()];
        for (slot, &ci) in chosen.iter().enumerate() {
            for (j, a) in atoms.iter().enumerate() {
                let d = a.dist(cands[ci]);
                if d < d1[j] {
                    d2[j] = d1[j];
                    d1[j] = d;
                    owner[j] = slot;
                } else if d < d2[j] {
                    d2[j] = d;
                }
            }
        }
        let obj = live.iter().map(|&j| d1[j]).fold(0.0, f64::max);
        let mut best_swap: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for (ci, c) in cands.iter().enumerate() {
                if chosen.contains(&ci) {
                    continue;
                }
                let cutoff = best_swap.map_or(obj, |(_, _, o)| o);
                let mut worst = 0.0f64;
                for &j in &live {
                    let base = if owner[j] == slot { d2[j] } else { d1[j] };
                    let d = base.min(atoms[j].dist(*c));
                    if d > worst {
                        worst = d;
                        if worst >= cutoff {
                            break;
                        }
                    }
                }
                if worst < cutoff - 1e-15 {
                    best_swap = Some((slot, ci, worst));
                }
            }
        }
        match best_swap {
            Some((slot, ci, _)) => chosen[slot] = ci,
            None => break,
        }
    }

    let pts: Vec<Point> = chosen.iter().map(|&ci| cands[ci]).collect();
    let obj = live
        .iter()
        .map(|&j| {
            pts.iter()
                .map(|c| atoms[j].dist(*c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    (pts, obj)
}

/// Exhaustive minimum over all n-subsets of the candidate list. The
/// acceptance oracle for small scenes.
pub fn brute_force_solve(
    p: &DiscreteMeasure,
    candidates: &[Point],
    n: usize,
    r: Order,
) -> Result<(Codebook, f64)> {
    if candidates.is_empty() || n == 0 {
        return Err(Error::Usage(
            "brute_force_solve needs candidates and n >= 1".into(),
        ));
    }
    let k = n.min(candidates.len());
    let combos = binomial(candidates.len(), k);
    if combos > 2e6 {
        return Err(Error::Resource(format!(
            "{} choose {k} = {combos:.3e} subsets exceeds the 2e6 budget",
            candidates.len()
        )));
    }

    // distance matrix atom x candidate
    let m = p.len();
    let atoms = p.atoms();
    let mut dist = vec![0.0f64; m * candidates.len()];
    for (j, a) in atoms.iter().enumerate() {
        for (ci, c) in candidates.iter().enumerate() {
            dist[j * candidates.len() + ci] = a.dist(*c);
        }
    }

    let weights = p.weights();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best_idx = idx.clone();
    let mut best_e = f64::INFINITY;
    let mut scratch = vec![0.0f64; m];
    loop {
        for j in 0..m {
            let row = &dist[j * candidates.len()..(j + 1) * candidates.len()];
            scratch[j] = idx.iter().map(|&ci| row[ci]).fold(f64::INFINITY, f64::min);
        }
        let e = moment(weights, &scratch, r);
        if e < best_e {
            best_e = e;
            best_idx.copy_from_slice(&idx);
        }
        // advance lexicographically
        let mut i = k;
        loop {
            if i == 0 {
                let points: Vec<Point> = best_idx.iter().map(|&ci| candidates[ci]).collect();
                return Ok((
                    Codebook {
                        points,
                        r,
                        seed: 0,
                        converged: true,
                    },
                    best_e,
                ));
            }
            i -= 1;
            if idx[i] != i + candidates.len() - k {
                idx[i] += 1;
                for t in i + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
        if acc > 1e18 {
            return acc;
        }
    }
    acc
}
