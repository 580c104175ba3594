//! Regularized Riesz potentials of CSG shapes by polar integration: a sphere
//! quadrature over directions times exact antiderivatives along each ray.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::SphereQuadrature;
use crate::shapes::{IntervalSet, Point, Shape, ShapeError, DEFAULT_WORLD_RADIUS};

/// A point is interior when every sampled ray stays inside for longer than this.
pub const INTERIOR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("quadrature is for dimension {found}, shape has dimension {expected}")]
    QuadratureDimension { expected: usize, found: usize },
    #[error("lambda must be finite")]
    InvalidLambda,
    #[error("point lies on the boundary; no regularized potential for lambda = {lambda} <= 0")]
    BoundaryPoint { lambda: f64 },
    #[error("gradient formula needs lambda > 1 or an exterior point (lambda = {lambda})")]
    GradientInvalid { lambda: f64 },
    #[error("hessian formula needs lambda > 2 or an exterior point (lambda = {lambda})")]
    HessianInvalid { lambda: f64 },
    #[error("complement form needs lambda < 0 (lambda = {lambda})")]
    ComplementLambda { lambda: f64 },
    #[error("complement form needs an interior point")]
    NotInterior,
}

type Result<T> = std::result::Result<T, EngineError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialValue {
    pub value: f64,
    /// Set when the finite part was needed: λ <= 0 at an interior point.
    pub regularized: bool,
    pub quadrature_size: usize,
    /// Monte Carlo standard error; `None` for deterministic rules.
    pub std_error: Option<f64>,
}

/// `∫_b^c r^{q-1} dr`, dropping the lower limit when `b = 0`.
fn span_moment(b: f64, c: f64, q: f64) -> f64 {
    if b == 0.0 {
        return if q == 0.0 { c.ln() } else { c.powf(q) / q };
    }
    let l = (c / b).ln();
    if q == 0.0 {
        l
    } else {
        b.powf(q) * (q * l).exp_m1() / q
    }
}

/// Finite-part integral of `r^p` over the intervals.
pub fn power_moment(intervals: &IntervalSet, p: f64) -> f64 {
    intervals.iter().map(|s| span_moment(s.lo, s.hi, p + 1.0)).sum()
}

/// Per-ray contribution. Power mode integrates `r^{λ-1}` with the finite part
/// at `r = 0`; log mode uses `F(r) = r^λ log(1/r)/λ + r^λ/λ²` with λ = n.
///
/// Panics if `log_mode` is set with `lambda <= 0`.
pub fn ray_contribution(intervals: &IntervalSet, lambda: f64, log_mode: bool) -> f64 {
    if !log_mode {
        return power_moment(intervals, lambda - 1.0);
    }
    assert!(lambda > 0.0, "log mode needs lambda = n > 0");
    let f = |r: f64| {
        if r == 0.0 {
            0.0
        } else {
            let rl = r.powf(lambda);
            -rl * r.ln() / lambda + rl / (lambda * lambda)
        }
    };
    intervals.iter().map(|s| f(s.hi) - f(s.lo)).sum()
}

fn check(shape: &Shape, x: &[f64], quad: &SphereQuadrature) -> Result<()> {
    shape.check_point(x)?;
    shape.ensure_bounded()?;
    if quad.dim() != shape.dim() {
        return Err(EngineError::QuadratureDimension { expected: shape.dim(), found: quad.dim() });
    }
    Ok(())
}

/// Maps every quadrature direction to a per-ray value, in direction order.
fn map_rays<T, F>(shape: &Shape, x: &[f64], quad: &SphereQuadrature, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&IntervalSet, &[f64]) -> T + Sync,
{
    (0..quad.len())
        .into_par_iter()
        .map(|k| {
            let d = quad.direction(k);
            f(&shape.cast(x, d), d)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct RaySample {
    value: f64,
    exit: Option<f64>,
}

/// Where `x` sits relative to the shape, judged from the rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Location {
    Interior,
    Boundary,
    Exterior,
}

fn locate(shape: &Shape, x: &[f64], samples: &[RaySample]) -> Location {
    let inside = samples.iter().filter(|s| s.exit.is_some()).count();
    if inside == 0 && !shape.contains(x) {
        return Location::Exterior;
    }
    let min_exit = samples.iter().filter_map(|s| s.exit).fold(f64::INFINITY, f64::min);
    if inside == samples.len() && min_exit > INTERIOR_TOLERANCE && shape.contains(x) {
        Location::Interior
    } else {
        Location::Boundary
    }
}

fn weighted_sum(samples: &[RaySample], quad: &SphereQuadrature) -> (f64, Option<f64>) {
    let mut total = 0.0;
    for (s, w) in samples.iter().zip(quad.weights()) {
        total += w * s.value;
    }
    if !quad.is_monte_carlo() {
        return (total, None);
    }
    let n = samples.len() as f64;
    let area: f64 = quad.weights().iter().sum();
    let mean = samples.iter().map(|s| s.value).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.value - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (total, Some(area * (var / n).sqrt()))
}

struct Evaluation {
    samples: Vec<RaySample>,
    location: Location,
}

impl Evaluation {
    fn run(shape: &Shape, x: &[f64], lambda: f64, log_mode: bool, quad: &SphereQuadrature) -> Result<Self> {
        check(shape, x, quad)?;
        if !lambda.is_finite() {
            return Err(EngineError::InvalidLambda);
        }
        let samples = map_rays(shape, x, quad, |iv, _| RaySample {
            value: ray_contribution(iv, lambda, log_mode),
            exit: iv.first_exit(),
        });
        let location = locate(shape, x, &samples);
        Ok(Self { samples, location })
    }

    fn clearance(&self) -> f64 {
        if self.location != Location::Interior {
            return 0.0;
        }
        self.samples.iter().filter_map(|s| s.exit).fold(f64::INFINITY, f64::min)
    }
}

fn evaluate(shape: &Shape, x: &[f64], lambda: f64, log_mode: bool, quad: &SphereQuadrature) -> Result<PotentialValue> {
    let e = Evaluation::run(shape, x, lambda, log_mode, quad)?;
    if lambda <= 0.0 && e.location == Location::Boundary {
        return Err(EngineError::BoundaryPoint { lambda });
    }
    let (value, std_error) = weighted_sum(&e.samples, quad);
    Ok(PotentialValue {
        value,
        regularized: lambda <= 0.0 && e.location == Location::Interior,
        quadrature_size: quad.len(),
        std_error,
    })
}

/// Regularized potential V^{(λ)}(x) = ∫ |x - y|^{λ-n} dy.
pub fn potential(shape: &Shape, x: &[f64], lambda: f64, quad: &SphereQuadrature) -> Result<PotentialValue> {
    evaluate(shape, x, lambda, false, quad)
}

/// Log potential ∫ log(1/|x - y|) dy.
pub fn log_potential(shape: &Shape, x: &[f64], quad: &SphereQuadrature) -> Result<PotentialValue> {
    evaluate(shape, x, shape.dim() as f64, true, quad)
}

/// Normalized potential V/(n - λ), or the log potential at λ = n.
pub fn v_hat(shape: &Shape, x: &[f64], lambda: f64, quad: &SphereQuadrature) -> Result<f64> {
    let n = shape.dim() as f64;
    if lambda == n {
        Ok(log_potential(shape, x, quad)?.value)
    } else {
        Ok(potential(shape, x, lambda, quad)?.value / (n - lambda))
    }
}

/// V̂ at `x` from a single sweep, with the shortest sampled exit distance
/// (zero unless `x` is interior). The value is `None` where the potential is
/// undefined, i.e. at boundary points for λ <= 0.
pub fn v_hat_with_clearance(
    shape: &Shape,
    x: &[f64],
    lambda: f64,
    quad: &SphereQuadrature,
) -> Result<(Option<f64>, f64)> {
    let n = shape.dim() as f64;
    let log_mode = lambda == n;
    let e = Evaluation::run(shape, x, if log_mode { n } else { lambda }, log_mode, quad)?;
    let clearance = e.clearance();
    if lambda <= 0.0 && e.location == Location::Boundary {
        return Ok((None, clearance));
    }
    let value = weighted_sum(&e.samples, quad).0;
    Ok((Some(if log_mode { value } else { value / (n - lambda) }), clearance))
}

/// `-∫_{Ω^c} |x - y|^{λ-n} dy` for λ < 0 at interior `x`; complement rays are
/// integrated up to `world_radius` and the tail beyond is added analytically.
pub fn potential_via_complement(
    shape: &Shape,
    x: &[f64],
    lambda: f64,
    quad: &SphereQuadrature,
    world_radius: f64,
) -> Result<f64> {
    check(shape, x, quad)?;
    if !(lambda < 0.0) {
        return Err(EngineError::ComplementLambda { lambda });
    }
    let tail = -world_radius.powf(lambda) / lambda;
    let samples = map_rays(shape, x, quad, |iv, _| RaySample {
        value: power_moment(&iv.complement_within(world_radius), lambda - 1.0) + tail,
        exit: iv.first_exit(),
    });
    if locate(shape, x, &samples) != Location::Interior {
        return Err(EngineError::NotInterior);
    }
    Ok(-weighted_sum(&samples, quad).0)
}

/// [`potential_via_complement`] with the default world radius.
pub fn potential_via_complement_default(shape: &Shape, x: &[f64], lambda: f64, quad: &SphereQuadrature) -> Result<f64> {
    potential_via_complement(shape, x, lambda, quad, DEFAULT_WORLD_RADIUS)
}

struct Moments {
    samples: Vec<(f64, Option<f64>)>,
}

impl Moments {
    fn new(shape: &Shape, x: &[f64], p: f64, quad: &SphereQuadrature) -> Self {
        Self { samples: map_rays(shape, x, quad, |iv, _| (power_moment(iv, p), iv.first_exit())) }
    }

    fn touches_interior(&self, shape: &Shape, x: &[f64]) -> bool {
        shape.contains(x) || self.samples.iter().any(|s| s.1.is_some())
    }
}

/// ∇V̂ with components `Σ w v_j ∫ r^{λ-2} dr`.
pub fn gradient(shape: &Shape, x: &[f64], lambda: f64, quad: &SphereQuadrature) -> Result<Point> {
    check(shape, x, quad)?;
    let m = Moments::new(shape, x, lambda - 2.0, quad);
    if !(lambda > 1.0) && m.touches_interior(shape, x) {
        return Err(EngineError::GradientInvalid { lambda });
    }
    let mut g = DVector::zeros(shape.dim());
    for (k, (moment, _)) in m.samples.iter().enumerate() {
        let w = quad.weight(k) * moment;
        for (gj, dj) in g.iter_mut().zip(quad.direction(k)) {
            *gj += w * dj;
        }
    }
    Ok(g)
}

/// Hessian of V̂ with entries `-Σ w ((λ-n-2) v_i v_j + δ_ij) ∫ r^{λ-3} dr`.
pub fn hessian(shape: &Shape, x: &[f64], lambda: f64, quad: &SphereQuadrature) -> Result<DMatrix<f64>> {
    check(shape, x, quad)?;
    let m = Moments::new(shape, x, lambda - 3.0, quad);
    if !(lambda > 2.0) && m.touches_interior(shape, x) {
        return Err(EngineError::HessianInvalid { lambda });
    }
    let n = shape.dim();
    let c = lambda - n as f64 - 2.0;
    let mut h = DMatrix::zeros(n, n);
    for (k, (moment, _)) in m.samples.iter().enumerate() {
        let w = quad.weight(k) * moment;
        let d = quad.direction(k);
        for i in 0..n {
            for j in i..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                h[(i, j)] -= w * (c * d[i] * d[j] + delta);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = h[(j, i)];
        }
    }
    Ok(h)
}

/// Volume `Σ w ∫ r^{n-1} dr` seen from `x`.
pub fn volume_from(shape: &Shape, x: &[f64], quad: &SphereQuadrature) -> Result<f64> {
    check(shape, x, quad)?;
    let n = shape.dim() as f64;
    let m = Moments::new(shape, x, n - 1.0, quad);
    Ok(m.samples.iter().zip(quad.weights()).map(|(s, w)| w * s.0).sum())
}

/// Center of mass from first moments `Σ w v ∫ r^n dr` about the bounding box center.
pub fn centroid(shape: &Shape, quad: &SphereQuadrature) -> Result<Point> {
    shape.ensure_bounded()?;
    let (lo, hi) = shape.bounding_box().ok_or(ShapeError::Unbounded)?;
    let x0: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    check(shape, &x0, quad)?;
    let n = shape.dim() as f64;
    let rays = map_rays(shape, &x0, quad, |iv, _| (power_moment(iv, n - 1.0), power_moment(iv, n)));
    let mut volume = 0.0;
    let mut first = DVector::zeros(shape.dim());
    for (k, (v, m)) in rays.iter().enumerate() {
        let w = quad.weight(k);
        volume += w * v;
        for (fj, dj) in first.iter_mut().zip(quad.direction(k)) {
            *fj += w * m * dj;
        }
    }
    Ok(DVector::from_vec(x0) + first / volume)
}
