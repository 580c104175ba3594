//! How close a body is to a ball: minimal rings, asphericity and
//! bi-Hausdorff distance to balls.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::quadrature::SphereQuadrature;
use crate::shapes::{Shape, ShapeError};

/// Asphericity ignores candidates whose inradius is below this.
pub const MIN_INRADIUS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("no interior grid point found; the shape has empty sampled interior")]
    EmptyInterior,
    #[error("ball radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
}

/// Grid search followed by simplex refinement of the best candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingSearch {
    /// Grid points per axis across the bounding box.
    pub grid_resolution: usize,
    /// Number of grid candidates refined.
    pub candidates: usize,
    /// Minimizers within this of the best value are all reported.
    pub value_tolerance: f64,
    /// Reported minimizers closer than this fraction of the circumradius are merged.
    pub dedup_fraction: f64,
    pub max_evaluations: usize,
}

impl Default for RingSearch {
    fn default() -> Self {
        Self { grid_resolution: 64, candidates: 8, value_tolerance: 1e-6, dedup_fraction: 1e-3, max_evaluations: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalRingReport {
    pub centers: Vec<Vec<f64>>,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Asphericity {
    pub value: f64,
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub distance: f64,
}

/// φ(x) = R(x) - r(x), with r = 0 off the interior.
pub fn phi(shape: &Shape, x: &[f64], quad: &SphereQuadrature) -> f64 {
    shape.circumradius_at_with(x, quad) - shape.inradius_at(x, quad)
}

/// Bi-Hausdorff distance between the shape and the ball of radius `rho` at `x`.
pub fn bihausdorff_to_ball(shape: &Shape, x: &[f64], rho: f64, quad: &SphereQuadrature) -> Result<f64, RingError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(RingError::InvalidRadius(rho));
    }
    shape.check_point(x)?;
    let big_r = shape.circumradius_at_with(x, quad);
    let r = shape.inradius_at(x, quad);
    Ok((big_r - rho).max(rho - r).max(0.0))
}

/// Upper bound `diam(P)/ℓ` on the asphericity of the parallel body of `P`.
pub fn parallel_body_bound(points: &[Vec<f64>], ell: f64) -> f64 {
    let mut diam: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diam = diam.max(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
        }
    }
    diam / ell
}

struct Found {
    point: Vec<f64>,
    value: f64,
}

fn by_value_then_point(a: &Found, b: &Found) -> std::cmp::Ordering {
    a.value.total_cmp(&b.value).then_with(|| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Reference length: circumradius about the bounding box center.
fn scale_of(shape: &Shape, quad: &SphereQuadrature) -> Result<f64, RingError> {
    shape.ensure_bounded()?;
    let (c, _) = shape.bounding_ball().ok_or(ShapeError::Unbounded)?;
    Ok(shape.circumradius_at_with(&c, quad))
}

/// Minimizers of `objective`, refined from grid candidates, best first.
fn search<F>(shape: &Shape, opts: &RingSearch, objective: F) -> Result<Vec<Found>, RingError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    shape.ensure_bounded()?;
    let (lo, hi) = shape.bounding_box().ok_or(ShapeError::Unbounded)?;
    let n = shape.dim();
    let res = opts.grid_resolution.max(1);
    let cell: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / res as f64).collect();
    let total = res.pow(n as u32);
    let mut grid: Vec<Found> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut p = vec![0.0; n];
            for j in 0..n {
                p[j] = lo[j] + (idx % res) as f64 * cell[j] + 0.5 * cell[j];
                idx /= res;
            }
            if !shape.contains(&p) {
                return None;
            }
            let value = objective(&p);
            value.is_finite().then_some(Found { point: p, value })
        })
        .collect();
    if grid.is_empty() {
        return Err(RingError::EmptyInterior);
    }
    grid.sort_by(by_value_then_point);

    // Spread the refined candidates out so one basin cannot take every slot.
    let spacing = 3.0 * cell.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut picked: Vec<&Found> = Vec::new();
    for g in &grid {
        if picked.len() >= opts.candidates.max(1) {
            break;
        }
        if picked.iter().all(|p| distance(&p.point, &g.point) > spacing) {
            picked.push(g);
        }
    }

    let step = cell.iter().copied().fold(f64::INFINITY, f64::min);
    let size = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let nm = NelderMeadOptions {
        initial_step: step,
        x_tolerance: 1e-9 * size,
        max_evaluations: opts.max_evaluations,
        restarts: 2,
    };
    let mut refined: Vec<Found> = picked
        .par_iter()
        .map(|start| {
            let m = nelder_mead(&objective, &start.point, &nm);
            if m.value <= start.value {
                Found { point: m.point, value: m.value }
            } else {
                Found { point: start.point.clone(), value: start.value }
            }
        })
        .collect();
    refined.sort_by(by_value_then_point);
    Ok(refined)
}

/// Centers of minimal rings: minimizers of φ over the grid and refinement.
pub fn minimal_ring(shape: &Shape, opts: &RingSearch, quad: &SphereQuadrature) -> Result<MinimalRingReport, RingError> {
    let scale = scale_of(shape, quad)?;
    let found = search(shape, opts, |x| phi(shape, x, quad))?;
    let best = found[0].value;
    let mut centers: Vec<Vec<f64>> = Vec::new();
    for f in found.iter().take_while(|f| f.value <= best + opts.value_tolerance) {
        if centers.iter().all(|c| distance(c, &f.point) > opts.dedup_fraction * scale) {
            centers.push(f.point.clone());
        }
    }
    let x0 = &centers[0];
    let big_r = shape.circumradius_at_with(x0, quad);
    let r = shape.inradius_at(x0, quad);
    Ok(MinimalRingReport { phi: big_r - r, r, big_r, centers })
}

/// Dvoretzky asphericity: the least `R(x)/r(x) - 1` over interior points.
pub fn asphericity(shape: &Shape, opts: &RingSearch, quad: &SphereQuadrature) -> Result<Asphericity, RingError> {
    let found = search(shape, opts, |x| {
        let r = shape.inradius_at(x, quad);
        if r < MIN_INRADIUS {
            f64::INFINITY
        } else {
            shape.circumradius_at_with(x, quad) / r - 1.0
        }
    })?;
    let best = &found[0];
    Ok(Asphericity { value: best.value.max(0.0), center: best.point.clone() })
}

/// Ball whose sphere runs through the middle of the minimal ring.
pub fn best_ball(shape: &Shape, opts: &RingSearch, quad: &SphereQuadrature) -> Result<BestBall, RingError> {
    let ring = minimal_ring(shape, opts, quad)?;
    Ok(BestBall {
        center: ring.centers[0].clone(),
        radius: 0.5 * (ring.big_r + ring.r),
        distance: 0.5 * ring.phi,
    })
}
