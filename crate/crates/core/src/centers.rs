//! Multi-start search for maximizers of V̂ and the uniqueness sweep.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, EngineError};
use crate::optimize::{halton_ball_points, nelder_mead, NelderMeadOptions};
use crate::quadrature::SphereQuadrature;
use crate::rings::{self, RingError, RingSearch};
use crate::shapes::{Shape, ShapeError};

pub use crate::engine::centroid;

/// Iterates closer than this fraction of the circumradius to the boundary are rejected when λ <= 0.
pub const BARRIER_FRACTION: f64 = 1e-6;
pub const SIMPLEX_FRACTION: f64 = 0.05;
pub const TOLERANCE_FRACTION: f64 = 1e-6;
pub const CLUSTER_FRACTION: f64 = 1e-3;
/// Relative drop of V̂ along a segment that separates two maxima.
pub const VALLEY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CenterError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no strictly interior start point found")]
    NoInteriorStart,
    #[error("none of the {0} starts converged")]
    AllStartsFailed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterSearchConfig {
    pub lambda: f64,
    pub starts: usize,
    /// Defaults to 1e-3 times the circumradius.
    pub cluster_radius: Option<f64>,
    /// Evaluation budget for the simplex search, iteration cap for Newton.
    pub max_iterations: usize,
    pub seed: u64,
}

impl CenterSearchConfig {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, starts: 24, cluster_radius: None, max_iterations: 1000, seed: 0x5eed }
    }

    fn validate(&self) -> Result<(), CenterError> {
        if !self.lambda.is_finite() {
            return Err(CenterError::InvalidConfig("lambda must be finite".into()));
        }
        if self.starts == 0 {
            return Err(CenterError::InvalidConfig("starts must be at least 1".into()));
        }
        if let Some(r) = self.cluster_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CenterError::InvalidConfig("cluster_radius must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalMethod {
    NelderMead,
    Newton,
    NewtonThenNelderMead,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Center {
    pub point: Vec<f64>,
    pub v_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartOutcome {
    pub start: Vec<f64>,
    pub point: Vec<f64>,
    pub v_hat: f64,
    pub converged: bool,
    pub method: LocalMethod,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchDomain {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Starts and iterates restricted to the interior (λ <= 0).
    pub interior_only: bool,
    pub barrier: f64,
    pub circumradius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterReport {
    pub lambda: f64,
    pub centers: Vec<Center>,
    pub unique: bool,
    pub search_domain: SearchDomain,
    pub cluster_radius: f64,
    pub failed_starts: usize,
    pub starts: Vec<StartOutcome>,
}

struct Objective<'a> {
    shape: &'a Shape,
    quad: &'a SphereQuadrature,
    lambda: f64,
    barrier: Option<f64>,
}

impl Objective<'_> {
    /// V̂, or `None` where the search may not go.
    fn value(&self, x: &[f64]) -> Option<f64> {
        match self.barrier {
            Some(b) => match engine::v_hat_with_clearance(self.shape, x, self.lambda, self.quad) {
                Ok((Some(v), clearance)) if clearance >= b && v.is_finite() => Some(v),
                _ => None,
            },
            None => engine::v_hat(self.shape, x, self.lambda, self.quad).ok().filter(|v| v.is_finite()),
        }
    }

    fn penalty(&self, x: &[f64]) -> f64 {
        self.value(x).map_or(f64::INFINITY, |v| -v)
    }
}

fn simplex(obj: &Objective, start: &[f64], scale: f64, budget: usize) -> (Vec<f64>, f64, bool, usize) {
    let opts = NelderMeadOptions {
        initial_step: SIMPLEX_FRACTION * scale,
        x_tolerance: TOLERANCE_FRACTION * scale,
        max_evaluations: budget,
        restarts: 1,
    };
    let m = nelder_mead(|x| obj.penalty(x), start, &opts);
    (m.point, -m.value, m.converged && m.value.is_finite(), m.evaluations)
}

enum NewtonEnd {
    Converged(Vec<f64>, f64),
    Stalled(Vec<f64>),
}

fn newton(obj: &Objective, start: &[f64], scale: f64, max_iterations: usize, evals: &mut usize) -> NewtonEnd {
    let mut x = DVector::from_column_slice(start);
    let Some(mut fx) = obj.value(x.as_slice()) else {
        return NewtonEnd::Stalled(start.to_vec());
    };
    *evals += 1;
    for _ in 0..max_iterations {
        let (Ok(g), Ok(h)) = (
            engine::gradient(obj.shape, x.as_slice(), obj.lambda, obj.quad),
            engine::hessian(obj.shape, x.as_slice(), obj.lambda, obj.quad),
        ) else {
            return NewtonEnd::Stalled(x.as_slice().to_vec());
        };
        *evals += 2;
        let Some(chol) = (-h).cholesky() else {
            return NewtonEnd::Stalled(x.as_slice().to_vec());
        };
        let step = chol.solve(&g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = &x + alpha * &step;
            *evals += 1;
            if let Some(ft) = obj.value(trial.as_slice()) {
                if ft >= fx - 1e-15 * fx.abs() {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let moved = alpha * step.norm();
        match accepted {
            Some((trial, ft)) => {
                x = trial;
                fx = ft;
                if moved < 1e-3 * TOLERANCE_FRACTION * scale {
                    return NewtonEnd::Converged(x.as_slice().to_vec(), fx);
                }
            }
            None if step.norm() < TOLERANCE_FRACTION * scale => {
                return NewtonEnd::Converged(x.as_slice().to_vec(), fx);
            }
            None => return NewtonEnd::Stalled(x.as_slice().to_vec()),
        }
    }
    NewtonEnd::Stalled(x.as_slice().to_vec())
}

fn local_search(obj: &Objective, start: &[f64], scale: f64, max_iterations: usize) -> StartOutcome {
    let mut evaluations = 0;
    let mut method = LocalMethod::NelderMead;
    let mut from = start.to_vec();
    if obj.lambda > 2.0 {
        match newton(obj, start, scale, max_iterations, &mut evaluations) {
            NewtonEnd::Converged(point, v_hat) => {
                return StartOutcome {
                    start: start.to_vec(),
                    point,
                    v_hat,
                    converged: true,
                    method: LocalMethod::Newton,
                    evaluations,
                };
            }
            NewtonEnd::Stalled(point) => {
                method = LocalMethod::NewtonThenNelderMead;
                if obj.value(&point).is_some() {
                    from = point;
                }
            }
        }
    }
    let (point, v_hat, converged, used) = simplex(obj, &from, scale, max_iterations);
    StartOutcome { start: start.to_vec(), point, v_hat, converged, method, evaluations: evaluations + used }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Quadrature error estimate: change of V̂ under a shifted rule.
fn noise(obj: &Objective, shifted: &SphereQuadrature, c: &Center) -> f64 {
    let other = Objective { quad: shifted, ..*obj };
    other.value(&c.point).map_or(0.0, |v| (v - c.v_hat).abs())
}

/// True when V̂ does not dip between `a` and `b` by more than the relative
/// tolerance or the estimated quadrature error.
fn same_basin(obj: &Objective, a: &Center, b: &Center, slack: f64) -> bool {
    let floor = a.v_hat.min(b.v_hat) - (VALLEY_TOLERANCE * a.v_hat.abs().max(b.v_hat.abs())).max(slack);
    (1..8).all(|k| {
        let s = k as f64 / 8.0;
        let p: Vec<f64> = a.point.iter().zip(&b.point).map(|(x, y)| x + s * (y - x)).collect();
        obj.value(&p).is_some_and(|v| v >= floor)
    })
}

fn cluster(obj: &Objective, outcomes: &[StartOutcome], radius: f64) -> Vec<Center> {
    let mut sorted: Vec<&StartOutcome> = outcomes.iter().filter(|o| o.converged).collect();
    sorted.sort_by(|a, b| b.v_hat.total_cmp(&a.v_hat).then_with(|| lexicographic(&a.point, &b.point)));
    let mut centers: Vec<Center> = Vec::new();
    for o in sorted {
        if centers.iter().all(|c| distance(&c.point, &o.point) > radius) {
            centers.push(Center { point: o.point.clone(), v_hat: o.v_hat });
        }
    }
    if centers.len() < 2 {
        return centers;
    }
    let shifted = obj.quad.shifted();
    let slack: Vec<f64> = centers.iter().map(|c| noise(obj, &shifted, c)).collect();
    let mut kept: Vec<usize> = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        if !kept.iter().any(|&k| same_basin(obj, &centers[k], c, 2.0 * (slack[k] + slack[i]))) {
            kept.push(i);
        }
    }
    kept.into_iter().map(|i| centers[i].clone()).collect()
}

/// Finds the maximizers of V̂ by multi-start local search.
pub fn find_centers(shape: &Shape, config: &CenterSearchConfig, quad: &SphereQuadrature) -> Result<CenterReport, CenterError> {
    config.validate()?;
    shape.ensure_bounded()?;
    if quad.dim() != shape.dim() {
        return Err(EngineError::QuadratureDimension { expected: shape.dim(), found: quad.dim() }.into());
    }
    let (center, radius) = shape.bounding_ball().ok_or(ShapeError::Unbounded)?;
    let scale = shape.circumradius_at_with(&center, quad);
    let interior_only = config.lambda <= 0.0;
    let barrier = BARRIER_FRACTION * scale;
    let obj = Objective { shape, quad, lambda: config.lambda, barrier: interior_only.then_some(barrier) };

    let starts = halton_ball_points(&center, radius, config.starts, config.seed, |p| {
        !interior_only || shape.inradius_at(p, quad) > barrier
    });
    if starts.is_empty() {
        return Err(if interior_only {
            CenterError::NoInteriorStart
        } else {
            CenterError::AllStartsFailed(0)
        });
    }

    let outcomes: Vec<StartOutcome> = starts
        .par_iter()
        .map(|s| local_search(&obj, s, scale, config.max_iterations))
        .collect();
    let failed_starts = outcomes.iter().filter(|o| !o.converged).count();
    if failed_starts == outcomes.len() {
        return Err(CenterError::AllStartsFailed(outcomes.len()));
    }
    let cluster_radius = config.cluster_radius.unwrap_or(CLUSTER_FRACTION * scale);
    let centers = cluster(&obj, &outcomes, cluster_radius);
    Ok(CenterReport {
        lambda: config.lambda,
        unique: centers.len() == 1,
        centers,
        search_domain: SearchDomain { center, radius, interior_only, barrier, circumradius: scale },
        cluster_radius,
        failed_starts,
        starts: outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub lambda: f64,
    pub n_centers: usize,
    pub centers: Vec<Center>,
    pub asphericity: Option<f64>,
}

/// Runs [`find_centers`] over a parameter grid and a list of λ, recording the
/// number of centers and, when `rings` is given, the asphericity of each member.
pub fn uniqueness_sweep<F>(
    family: F,
    parameters: &[f64],
    lambdas: &[f64],
    config: &CenterSearchConfig,
    rings: Option<&RingSearch>,
    quad: &SphereQuadrature,
) -> Result<Vec<SweepRow>, CenterError>
where
    F: Fn(f64) -> Result<Shape, ShapeError>,
{
    if parameters.is_empty() || lambdas.is_empty() {
        return Err(CenterError::InvalidConfig("sweep grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(parameters.len() * lambdas.len());
    for &parameter in parameters {
        let shape = family(parameter)?;
        let asphericity = match rings {
            Some(opts) => Some(rings::asphericity(&shape, opts, quad)?.value),
            None => None,
        };
        for &lambda in lambdas {
            let report = find_centers(&shape, &CenterSearchConfig { lambda, ..*config }, quad)?;
            rows.push(SweepRow {
                parameter,
                lambda,
                n_centers: report.centers.len(),
                centers: report.centers,
                asphericity,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> SphereQuadrature {
        SphereQuadrature::circle(512)
    }

    #[test]
    fn ball_center_for_several_lambdas() {
        let disk = Shape::ball(&[0.5, -0.25], 2.0).unwrap();
        for lambda in [-1.0, 1.0, 2.0, 4.0] {
            let cfg = CenterSearchConfig { starts: 6, ..CenterSearchConfig::new(lambda) };
            let report = find_centers(&disk, &cfg, &quad()).unwrap();
            assert!(report.unique, "λ={lambda}: {:?}", report.centers);
            assert!(distance(&report.centers[0].point, &[0.5, -0.25]) < 1e-4, "λ={lambda}");
        }
    }

    #[test]
    fn newton_is_used_above_two() {
        let disk = Shape::ball(&[0.0, 0.0], 1.0).unwrap();
        let cfg = CenterSearchConfig { starts: 3, ..CenterSearchConfig::new(4.0) };
        let report = find_centers(&disk, &cfg, &quad()).unwrap();
        assert!(report.starts.iter().all(|s| s.method != LocalMethod::NelderMead));
    }

    #[test]
    fn two_separated_disks_have_two_centers_for_very_negative_lambda() {
        let two = crate::shapes::builtin("two-balls").unwrap();
        let cfg = CenterSearchConfig { starts: 12, ..CenterSearchConfig::new(-5.0) };
        let report = find_centers(&two, &cfg, &quad()).unwrap();
        assert_eq!(report.centers.len(), 2);
        assert!(!report.unique);
        let mut xs: Vec<f64> = report.centers.iter().map(|c| c.point[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 3.0).abs() < 1e-3 && (xs[1] - 3.0).abs() < 1e-3, "{xs:?}");
    }

    #[test]
    fn config_and_domain_errors() {
        let disk = Shape::ball(&[0.0, 0.0], 1.0).unwrap();
        let bad = CenterSearchConfig { starts: 0, ..CenterSearchConfig::new(1.0) };
        assert!(matches!(find_centers(&disk, &bad, &quad()), Err(CenterError::InvalidConfig(_))));
        let bad = CenterSearchConfig { cluster_radius: Some(0.0), ..CenterSearchConfig::new(1.0) };
        assert!(matches!(find_centers(&disk, &bad, &quad()), Err(CenterError::InvalidConfig(_))));
        let q3 = SphereQuadrature::fibonacci(64);
        assert!(matches!(
            find_centers(&disk, &CenterSearchConfig::new(1.0), &q3),
            Err(CenterError::Engine(EngineError::QuadratureDimension { .. }))
        ));
        // A hairline slab has no start point clear of the barrier.
        let hair = Shape::cuboid(&[0.0, 0.0], &[1.0, 1e-9]).unwrap();
        let cfg = CenterSearchConfig { starts: 2, ..CenterSearchConfig::new(-1.0) };
        assert_eq!(find_centers(&hair, &cfg, &quad()), Err(CenterError::NoInteriorStart));
    }

    #[test]
    fn reports_are_reproducible() {
        let s = crate::shapes::builtin("two-lobe-x").unwrap();
        let cfg = CenterSearchConfig { starts: 4, ..CenterSearchConfig::new(0.5) };
        let a = find_centers(&s, &cfg, &quad()).unwrap();
        let b = find_centers(&s, &cfg, &quad()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn sweep_rows_cover_the_grid() {
        let cfg = CenterSearchConfig { starts: 3, ..CenterSearchConfig::new(0.0) };
        let rows = uniqueness_sweep(
            |r| Shape::ball(&[0.0, 0.0], r),
            &[0.5, 1.0],
            &[-1.0, 1.0],
            &cfg,
            Some(&RingSearch { grid_resolution: 8, ..Default::default() }),
            &quad(),
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.n_centers == 1 && r.asphericity.unwrap() < 1e-6));
        assert!(uniqueness_sweep(|r| Shape::ball(&[0.0, 0.0], r), &[], &[1.0], &cfg, None, &quad()).is_err());
    }
}
