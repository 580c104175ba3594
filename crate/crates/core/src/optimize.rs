//! Derivative-free local minimization and low-discrepancy start points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    /// Stop once every vertex is this close to the best one.
    pub x_tolerance: f64,
    pub max_evaluations: usize,
    /// Fresh simplices built around the result after convergence.
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn key(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn simplex_run(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, budget: usize) -> Minimum {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| key(f(p))).collect();
    let mut evals = n + 1;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        let diameter = pts
            .iter()
            .map(|p| p.iter().zip(&pts[best]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt();
        if diameter < tol {
            converged = true;
            break;
        }
        if evals >= budget {
            break;
        }
        let mut c = vec![0.0; n];
        for &i in &order[..n] {
            for (cj, pj) in c.iter_mut().zip(&pts[i]) {
                *cj += pj / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { c.iter().zip(&pts[worst]).map(|(cj, wj)| cj + t * (cj - wj)).collect() };
        let xr = along(1.0);
        let fr = key(f(&xr));
        evals += 1;
        if fr < vals[best] {
            let xe = along(2.0);
            let fe = key(f(&xe));
            evals += 1;
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[worst] {
            let xc = along(0.5);
            let fc = key(f(&xc));
            (xc, fc, fc <= fr)
        } else {
            let xc = along(-0.5);
            let fc = key(f(&xc));
            (xc, fc, fc < vals[worst])
        };
        evals += 1;
        if accept {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &i in &order[1..] {
            for (pj, aj) in pts[i].iter_mut().zip(&anchor) {
                *pj = aj + 0.5 * (*pj - aj);
            }
            vals[i] = key(f(&pts[i]));
            evals += 1;
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    Minimum { point: pts[best].clone(), value: vals[best], evaluations: evals, converged }
}

/// Nelder–Mead minimization of `f` from `x0`. Non-finite values are treated
/// as `+inf`, so a barrier can be expressed by returning infinity.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let mut result = simplex_run(&mut f, x0, opts.initial_step, opts.x_tolerance, opts.max_evaluations);
    let restart_step = (opts.initial_step / 10.0).max(10.0 * opts.x_tolerance);
    for _ in 0..opts.restarts {
        if !result.converged {
            break;
        }
        let budget = opts.max_evaluations.saturating_sub(result.evaluations).max(1);
        let next = simplex_run(&mut f, &result.point, restart_step, opts.x_tolerance, budget);
        let moved = next.point.iter().zip(&result.point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let evaluations = result.evaluations + next.evaluations;
        let improved = next.value <= result.value;
        if improved {
            result = Minimum { evaluations, ..next };
        } else {
            result.evaluations = evaluations;
        }
        if !improved || moved < opts.x_tolerance {
            break;
        }
    }
    result
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Halton points in a ball with a seeded Cranley–Patterson rotation. Points
/// failing `accept` are skipped; at most `200 × count` candidates are tried.
pub fn halton_ball_points(
    center: &[f64],
    radius: f64,
    count: usize,
    seed: u64,
    mut accept: impl FnMut(&[f64]) -> bool,
) -> Vec<Vec<f64>> {
    let dim = center.len();
    assert!(dim <= PRIMES.len(), "Halton starts support up to {} dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    let limit = 200 * count.max(1) as u64;
    while out.len() < count && index <= limit {
        let u: Vec<f64> = (0..dim)
            .map(|j| 2.0 * (radical_inverse(index, PRIMES[j]) + shift[j]).fract() - 1.0)
            .collect();
        index += 1;
        if u.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            continue;
        }
        let p: Vec<f64> = center.iter().zip(&u).map(|(c, v)| c + radius * v).collect();
        if accept(&p) {
            out.push(p);
        }
    }
    out
}
