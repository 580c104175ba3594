//! Closed-form regularized potentials of the unit ball B^n at x_t = t·e_1.

use std::f64::consts::PI;
use thiserror::Error;

use crate::specfun::{
    gamma, hyp2f1, hyp2f1_derivative, hyp2f1_second_derivative, pochhammer, HypergeomParams,
    SpecialFunctionError,
};

/// Points with `||t| - 1|` below this are treated as boundary points.
pub const BOUNDARY_GUARD: f64 = 1e-8;
/// Step in λ for the log potential difference quotient.
pub const LOG_POTENTIAL_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BallPotentialError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("no regularized value at |t| = 1 for lambda = {0} <= 0")]
    BoundaryExcluded(f64),
    #[error("{0}")]
    Domain(&'static str),
    #[error(transparent)]
    Special(#[from] SpecialFunctionError),
}

type Result<T> = std::result::Result<T, BallPotentialError>;

/// Area σ_{n-1} = 2π^{n/2}/Γ(n/2) of the unit sphere in R^n.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0).expect("n/2 is positive")
}

/// Volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPotentialQuery {
    pub n: usize,
    pub lambda: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Inside,
    Boundary,
    Outside,
}

impl BallPotentialQuery {
    pub fn new(n: usize, lambda: f64, t: f64) -> Result<Self> {
        let q = Self { n, lambda, t };
        q.region()?;
        Ok(q)
    }

    fn region(&self) -> Result<Region> {
        if self.n < 2 {
            return Err(BallPotentialError::InvalidDimension(self.n));
        }
        if !(self.lambda.is_finite() && self.t.is_finite()) {
            return Err(BallPotentialError::Domain("non-finite argument"));
        }
        let a = self.t.abs();
        if (a - 1.0).abs() < BOUNDARY_GUARD {
            if self.lambda <= 0.0 {
                return Err(BallPotentialError::BoundaryExcluded(self.lambda));
            }
            Ok(Region::Boundary)
        } else if a < 1.0 {
            Ok(Region::Inside)
        } else {
            Ok(Region::Outside)
        }
    }

    pub fn potential(&self) -> Result<f64> {
        ball_potential(self.n, self.lambda, self.t)
    }

    pub fn derivative(&self) -> Result<f64> {
        ball_potential_derivative(self.n, self.lambda, self.t)
    }

    pub fn second_derivative(&self) -> Result<f64> {
        ball_potential_second_derivative(self.n, self.lambda, self.t)
    }
}

fn inner_params(n: usize, lambda: f64) -> Result<HypergeomParams> {
    Ok(HypergeomParams::new(-lambda / 2.0, (n as f64 - lambda) / 2.0, n as f64 / 2.0)?)
}

fn outer_params(n: usize, lambda: f64) -> Result<HypergeomParams> {
    Ok(HypergeomParams::new(1.0 - lambda / 2.0, (n as f64 - lambda) / 2.0, n as f64 / 2.0 + 1.0)?)
}

/// Value, first and second t-derivatives for t > 0 (or the requested subset).
fn jet(n: usize, lambda: f64, t: f64, order: usize) -> Result<[f64; 3]> {
    let q = BallPotentialQuery { n, lambda, t };
    let region = q.region()?;
    let sigma = sphere_area(n);
    let t = t.abs();
    let mut out = [0.0; 3];
    if region == Region::Boundary {
        if order > 0 {
            return Err(BallPotentialError::Domain("derivative at |t| = 1"));
        }
        let nf = n as f64;
        out[0] = 2f64.powf(lambda) / lambda * gamma((lambda + 1.0) / 2.0)? / gamma((lambda + nf) / 2.0)?
            * PI.powf((nf - 1.0) / 2.0);
        return Ok(out);
    }
    if lambda == 0.0 {
        return Ok(log_jet(n, t, region == Region::Inside, sigma));
    }
    if region == Region::Inside {
        let p = inner_params(n, lambda)?;
        let (k, u) = (sigma / lambda, t * t);
        out[0] = k * hyp2f1(p, u)?;
        if order >= 1 {
            let f1 = hyp2f1_derivative(p, u)?;
            out[1] = k * 2.0 * t * f1;
            if order >= 2 {
                out[2] = k * (4.0 * u * hyp2f1_second_derivative(p, u)? + 2.0 * f1);
            }
        }
    } else {
        let g = outer_params(n, lambda)?;
        let (k, p, u) = (sigma / n as f64, lambda - n as f64, 1.0 / (t * t));
        let g0 = hyp2f1(g, u)?;
        out[0] = k * t.powf(p) * g0;
        if order >= 1 {
            let g1 = hyp2f1_derivative(g, u)?;
            out[1] = k * (p * t.powf(p - 1.0) * g0 - 2.0 * t.powf(p - 3.0) * g1);
            if order >= 2 {
                let g2 = hyp2f1_second_derivative(g, u)?;
                out[2] = k
                    * (p * (p - 1.0) * t.powf(p - 2.0) * g0 - (4.0 * p - 6.0) * t.powf(p - 4.0) * g1
                        + 4.0 * t.powf(p - 6.0) * g2);
            }
        }
    }
    Ok(out)
}

/// λ = 0 value and derivatives for t >= 0, |t| != 1.
fn log_jet(n: usize, t: f64, inside: bool, sigma: f64) -> [f64; 3] {
    if inside {
        let w = 1.0 - t * t;
        return [0.5 * sigma * w.ln(), -sigma * t / w, -sigma * (1.0 + t * t) / (w * w)];
    }
    let nf = n as f64;
    let value = if t >= 2.0 {
        // Same function as the closed forms below, summed directly to avoid cancellation.
        let u = 1.0 / (t * t);
        let mut term = t.powi(-(n as i32));
        let mut k = nf;
        let mut sum = 0.0f64;
        while term / k > 1e-17 * sum.max(f64::MIN_POSITIVE) {
            sum += term / k;
            term *= u;
            k += 2.0;
        }
        sum
    } else if n % 2 == 1 {
        let tail: f64 = (1..=(n - 1) / 2).map(|j| t.powi(1 - 2 * j as i32) / (2 * j - 1) as f64).sum();
        0.5 * ((t + 1.0) / (t - 1.0)).ln() - tail
    } else {
        let tail: f64 = (1..n / 2).map(|j| t.powi(-2 * j as i32) / (2 * j) as f64).sum();
        -0.5 * (-1.0 / (t * t)).ln_1p() - tail
    };
    let w = t * t - 1.0;
    [
        sigma * value,
        -sigma * t.powf(1.0 - nf) / w,
        sigma * t.powf(-nf) * ((nf + 1.0) * t * t - (nf - 1.0)) / (w * w),
    ]
}

fn sign(t: f64) -> f64 {
    if t < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// V^{(λ)}_{B^n}(t).
pub fn ball_potential(n: usize, lambda: f64, t: f64) -> Result<f64> {
    Ok(jet(n, lambda, t, 0)?[0])
}

/// dV/dt.
pub fn ball_potential_derivative(n: usize, lambda: f64, t: f64) -> Result<f64> {
    Ok(sign(t) * jet(n, lambda, t, 1)?[1])
}

/// d²V/dt².
pub fn ball_potential_second_derivative(n: usize, lambda: f64, t: f64) -> Result<f64> {
    Ok(jet(n, lambda, t, 2)?[2])
}

fn check_reflection_args(lambda: f64, t: f64) -> Result<()> {
    if lambda == 0.0 {
        return Err(BallPotentialError::Domain("reflection requires lambda != 0"));
    }
    if (t.abs() - 1.0).abs() < BOUNDARY_GUARD {
        return Err(BallPotentialError::Domain("reflection undefined at |t| = 1"));
    }
    Ok(())
}

/// t^{λ-n}[V(1/t) + (t - 1/t)V'(1/t)/λ].
pub fn reflect_in_t(n: usize, lambda: f64, t: f64) -> Result<f64> {
    check_reflection_args(lambda, t)?;
    if t == 0.0 {
        return Err(BallPotentialError::Domain("reflection undefined at t = 0"));
    }
    let a = t.abs();
    let s = 1.0 / a;
    let v = ball_potential(n, lambda, s)?;
    let dv = ball_potential_derivative(n, lambda, s)?;
    Ok(a.powf(lambda - n as f64) * (v + (a - s) * dv / lambda))
}

/// V^{(λ)} from V^{(-λ)}: -(1-t²)^λ V^{(-λ)} inside, (t²-1)^λ V^{(-λ)} outside.
pub fn reflect_in_lambda(n: usize, lambda: f64, t: f64) -> Result<f64> {
    check_reflection_args(lambda, t)?;
    let w = 1.0 - t * t;
    let mirrored = ball_potential(n, -lambda, t)?;
    Ok(if w > 0.0 {
        -w.powf(lambda) * mirrored
    } else {
        (-w).powf(lambda) * mirrored
    })
}

/// t(1-t²)V'' + (n-1 + (2λ-n-1)t²)V' - λ(λ-n)tV.
pub fn ode_residual(n: usize, lambda: f64, t: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(BallPotentialError::Domain("ODE form requires lambda != 0"));
    }
    let j = jet(n, lambda, t, 2)?;
    let (nf, a) = (n as f64, t.abs());
    Ok(sign(t)
        * (a * (1.0 - a * a) * j[2] + (nf - 1.0 + (2.0 * lambda - nf - 1.0) * a * a) * j[1]
            - lambda * (lambda - nf) * a * j[0]))
}

/// λV(t) - tV'(t), the sphere integral of |x_t - y|^{λ-n}.
pub fn sphere_kernel_integral(n: usize, lambda: f64, t: f64) -> Result<f64> {
    Ok(lambda * ball_potential(n, lambda, t)? - t * ball_potential_derivative(n, lambda, t)?)
}

/// Richardson-extrapolated central difference of `f` at `x`.
fn richardson_derivative(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

/// Log potential of the unit ball: -∂V^{(λ)}/∂λ at λ = n.
pub fn log_potential_ball(n: usize, t: f64) -> Result<f64> {
    Ok(-richardson_derivative(|l| ball_potential(n, l, t), n as f64, LOG_POTENTIAL_STEP)?)
}

/// V̂ = V/(n-λ), or the log potential at λ = n.
pub fn ball_v_hat(n: usize, lambda: f64, t: f64) -> Result<f64> {
    let nf = n as f64;
    if lambda == nf {
        log_potential_ball(n, t)
    } else {
        Ok(ball_potential(n, lambda, t)? / (nf - lambda))
    }
}

/// dV̂/dt.
pub fn ball_v_hat_derivative(n: usize, lambda: f64, t: f64) -> Result<f64> {
    let nf = n as f64;
    if lambda == nf {
        Ok(-richardson_derivative(|l| ball_potential_derivative(n, l, t), nf, LOG_POTENTIAL_STEP)?)
    } else {
        Ok(ball_potential_derivative(n, lambda, t)? / (nf - lambda))
    }
}

/// d²V̂/dt².
pub fn ball_v_hat_second_derivative(n: usize, lambda: f64, t: f64) -> Result<f64> {
    let nf = n as f64;
    if lambda == nf {
        Ok(-richardson_derivative(|l| ball_potential_second_derivative(n, l, t), nf, LOG_POTENTIAL_STEP)?)
    } else {
        Ok(ball_potential_second_derivative(n, lambda, t)? / (nf - lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementaryKind {
    PolynomialInTSquared,
    RationalExterior,
    ReflectedPolynomial,
    ReflectedRational,
    InteriorLog,
    OddLogExterior,
    EvenLogExterior,
}

impl ElementaryKind {
    pub fn label(&self) -> &'static str {
        match self {
            ElementaryKind::PolynomialInTSquared => "polynomial in t^2",
            ElementaryKind::RationalExterior => "t^(lambda-n) times polynomial in 1/t^2",
            ElementaryKind::ReflectedPolynomial => "(1-t^2)^lambda times polynomial in t^2",
            ElementaryKind::ReflectedRational => "(t^2-1)^lambda t^(-lambda-n) times polynomial in 1/t^2",
            ElementaryKind::InteriorLog => "log form",
            ElementaryKind::OddLogExterior => "odd-n log form",
            ElementaryKind::EvenLogExterior => "even-n log form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryForm {
    pub kind: ElementaryKind,
    pub value: f64,
}

/// Finite sum of a terminating hypergeometric series.
fn terminating_sum(p: HypergeomParams, u: f64) -> Option<f64> {
    let m = p.terminating_degree()?;
    Some(
        (0..=m)
            .map(|k| {
                pochhammer(p.a, k) * pochhammer(p.b, k) / (pochhammer(p.c, k) * pochhammer(1.0, k))
                    * u.powi(k as i32)
            })
            .sum(),
    )
}

/// Positive even λ: the series terminates in both regions.
fn even_polynomial(n: usize, lambda: f64, t: f64) -> Option<(bool, f64)> {
    let sigma = sphere_area(n);
    let a = t.abs();
    if a < 1.0 {
        Some((true, sigma / lambda * terminating_sum(inner_params(n, lambda).ok()?, a * a)?))
    } else {
        let g = terminating_sum(outer_params(n, lambda).ok()?, 1.0 / (a * a))?;
        Some((false, sigma / n as f64 * a.powf(lambda - n as f64) * g))
    }
}

/// Elementary evaluation when λ is an even integer or zero; `None` otherwise.
pub fn elementary_form(n: usize, lambda: f64, t: f64) -> Option<ElementaryForm> {
    let region = BallPotentialQuery { n, lambda, t }.region().ok()?;
    if region == Region::Boundary {
        return None;
    }
    let a = t.abs();
    if lambda == 0.0 {
        let [value, _, _] = log_jet(n, a, region == Region::Inside, sphere_area(n));
        let kind = match (region, n % 2) {
            (Region::Inside, _) => ElementaryKind::InteriorLog,
            (_, 1) => ElementaryKind::OddLogExterior,
            _ => ElementaryKind::EvenLogExterior,
        };
        return Some(ElementaryForm { kind, value });
    }
    if lambda.fract() != 0.0 || (lambda / 2.0).fract() != 0.0 {
        return None;
    }
    if lambda > 0.0 {
        let (inside, value) = even_polynomial(n, lambda, a)?;
        let kind = if inside { ElementaryKind::PolynomialInTSquared } else { ElementaryKind::RationalExterior };
        return Some(ElementaryForm { kind, value });
    }
    let (inside, mirrored) = even_polynomial(n, -lambda, a)?;
    let w = 1.0 - a * a;
    if inside {
        Some(ElementaryForm { kind: ElementaryKind::ReflectedPolynomial, value: -w.powf(lambda) * mirrored })
    } else {
        Some(ElementaryForm { kind: ElementaryKind::ReflectedRational, value: (-w).powf(lambda) * mirrored })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(n: usize, l: f64, t: f64) -> f64 {
        ball_potential(n, l, t).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn newton_potential_values() {
        assert_relative_eq!(v(3, 2.0, 0.5), 2.0 * PI * 11.0 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(v(3, 2.0, 2.0), 2.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            ball_potential_derivative(3, 2.0, 0.5).unwrap(),
            -2.0 * PI / 3.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn origin_values() {
        for n in 2..=6 {
            for l in [-3.0, -1.0, 0.5, 2.0, 5.0] {
                assert_relative_eq!(v(n, l, 0.0), sphere_area(n) / l, max_relative = 1e-14);
                assert_eq!(ball_potential_derivative(n, l, 0.0).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn log_cases() {
        assert_relative_eq!(v(2, 0.0, 0.6), PI * 0.64f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(v(3, 0.0, 2.0), 4.0 * PI * (0.5 * 3f64.ln() - 0.5), max_relative = 1e-14);
    }

    #[test]
    fn exterior_log_forms_match_hypergeometric_series() {
        // Outside, the λ = 0 kernel sums to σ t^{-n} 2F1(1, n/2; n/2+1; 1/t²)/n.
        for n in 2..=7 {
            for t in [1.1f64, 1.5, 3.0, 10.0] {
                let p = HypergeomParams::new(1.0, n as f64 / 2.0, n as f64 / 2.0 + 1.0).unwrap();
                let series = sphere_area(n) / n as f64 * t.powi(-(n as i32)) * hyp2f1(p, 1.0 / (t * t)).unwrap();
                assert_relative_eq!(v(n, 0.0, t), series, max_relative = 1e-12);
                assert!(v(n, 0.0, t) > 0.0);
            }
        }
    }

    #[test]
    fn boundary_value_examples() {
        assert_relative_eq!(v(2, 1.0, 1.0), 4.0, max_relative = 1e-13);
        assert_relative_eq!(v(2, 1.0, -1.0), 4.0, max_relative = 1e-13);
        assert_eq!(ball_potential(2, 0.0, 1.0), Err(BallPotentialError::BoundaryExcluded(0.0)));
        assert!(ball_potential(2, -1.0, 1.0 + 1e-9).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        let fd = (v(2, 3.0, 0.4 + h) - v(2, 3.0, 0.4 - h)) / (2.0 * h);
        assert_relative_eq!(ball_potential_derivative(2, 3.0, 0.4).unwrap(), fd, max_relative = 1e-8);
        for (n, l, t) in [(3, -1.5, 2.5), (2, 0.0, 0.7), (4, 0.0, 1.8), (3, 0.0, 3.0), (2, 2.5, -0.3)] {
            let fd = (v(n, l, t + h) - v(n, l, t - h)) / (2.0 * h);
            let d1 = ball_potential_derivative(n, l, t).unwrap();
            assert_relative_eq!(d1, fd, max_relative = 1e-7);
            let fd2 = (ball_potential_derivative(n, l, t + h).unwrap() - ball_potential_derivative(n, l, t - h).unwrap())
                / (2.0 * h);
            assert_relative_eq!(ball_potential_second_derivative(n, l, t).unwrap(), fd2, max_relative = 1e-6);
        }
    }

    #[test]
    fn reflection_examples() {
        assert_relative_eq!(reflect_in_t(3, 2.0, 2.0).unwrap(), 2.0 * PI / 3.0, max_relative = 1e-10);
        assert_relative_eq!(reflect_in_t(2, -1.0, 0.5).unwrap(), v(2, -1.0, 0.5), max_relative = 1e-10);
        assert_relative_eq!(reflect_in_t(2, 4.0, 3.0).unwrap(), v(2, 4.0, 3.0), max_relative = 1e-10);
        assert_relative_eq!(reflect_in_lambda(2, 1.0, 0.5).unwrap(), -0.75 * v(2, -1.0, 0.5), max_relative = 1e-14);
        assert_relative_eq!(reflect_in_lambda(2, 1.0, 0.5).unwrap(), v(2, 1.0, 0.5), max_relative = 1e-10);
        assert_relative_eq!(reflect_in_lambda(3, 2.0, 2.0).unwrap(), 2.0 * PI / 3.0, max_relative = 1e-10);
        assert_relative_eq!(reflect_in_lambda(2, -2.0, 0.3).unwrap(), v(2, -2.0, 0.3), max_relative = 1e-10);
        assert!(reflect_in_t(2, 1.0, 1.0).is_err());
        assert!(reflect_in_t(2, 1.0, 0.0).is_err());
        assert!(reflect_in_lambda(2, 1.0, -1.0).is_err());
    }

    #[test]
    fn ode_examples() {
        assert!(ode_residual(3, 2.0, 0.5).unwrap().abs() < 1e-9);
        assert!(ode_residual(2, -1.5, 0.7).unwrap().abs() < 1e-8);
        assert!(ode_residual(4, 3.0, 2.5).unwrap().abs() < 1e-8);
    }

    /// Sphere integral of |x_t - y|^{λ-n} by Simpson's rule in the polar angle.
    fn sphere_integral_oracle(n: usize, lambda: f64, t: f64) -> f64 {
        let m = 20_000;
        let h = PI / m as f64;
        let ring = sphere_area(n - 1);
        let f = |th: f64| {
            let d2 = 1.0 + t * t - 2.0 * t * th.cos();
            ring * th.sin().powi(n as i32 - 2) * d2.powf((lambda - n as f64) / 2.0)
        };
        let mut s = f(0.0) + f(PI);
        for i in 1..m {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn sphere_integral_identity() {
        for (n, l, t) in [(2, 0.5, 0.3), (3, 2.0, 0.6), (3, -1.0, 0.5), (4, 3.7, 0.2), (2, -3.0, 0.9)] {
            let lhs = sphere_kernel_integral(n, l, t).unwrap();
            assert!(lhs > 0.0);
            assert_relative_eq!(lhs, sphere_integral_oracle(n, l, t), max_relative = 1e-6);
        }
    }

    #[test]
    fn v_hat_is_decreasing_and_concave_at_center() {
        for n in [2, 3] {
            for l in [-2.0, 0.5, 3.0, n as f64] {
                for i in 1..20 {
                    let t = i as f64 / 20.0;
                    assert!(ball_v_hat_derivative(n, l, t).unwrap() < 0.0, "n={n} l={l} t={t}");
                }
                assert!(ball_v_hat_second_derivative(n, l, 0.0).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn log_potential_of_disk_center() {
        assert_relative_eq!(log_potential_ball(2, 0.0).unwrap(), PI / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn log_potential_matches_classical_disk_values() {
        // Inside: π(1 - t²)/2. Outside the disk acts as a point mass: π log(1/t).
        for t in [0.3, 0.5, 0.8] {
            assert_relative_eq!(log_potential_ball(2, t).unwrap(), PI * (1.0 - t * t) / 2.0, max_relative = 1e-9);
        }
        for t in [1.5, 10.0] {
            assert_relative_eq!(log_potential_ball(2, t).unwrap(), -PI * t.ln(), max_relative = 1e-9);
        }
    }

    #[test]
    fn elementary_examples() {
        let e = elementary_form(3, 2.0, 0.5).unwrap();
        assert_eq!(e.kind, ElementaryKind::PolynomialInTSquared);
        assert_relative_eq!(e.value, 2.0 * PI * 11.0 / 12.0, max_relative = 1e-14);
        let e = elementary_form(2, 4.0, 0.3).unwrap();
        assert_relative_eq!(e.value, v(2, 4.0, 0.3), max_relative = 1e-12);
        let e = elementary_form(3, 0.0, 2.0).unwrap();
        assert_eq!(e.kind, ElementaryKind::OddLogExterior);
        assert_eq!(e.kind.label(), "odd-n log form");
        assert_relative_eq!(e.value, 4.0 * PI * (0.5 * 3f64.ln() - 0.5), max_relative = 1e-14);
        for (n, l, t) in [(2, -2.0, 0.4), (3, -4.0, 0.7), (2, -2.0, 2.0), (5, 6.0, 1.7)] {
            assert_relative_eq!(elementary_form(n, l, t).unwrap().value, v(n, l, t), max_relative = 1e-11);
        }
        assert!(elementary_form(2, 1.5, 0.3).is_none());
        assert!(elementary_form(2, 3.0, 0.3).is_none());
    }

    fn sample() -> impl Strategy<Value = (usize, f64, f64)> {
        let t = prop_oneof![-0.95f64..0.95, 1.05f64..4.0, -4.0f64..-1.05];
        let l = (-4.0f64..6.0).prop_filter("lambda away from 0", |l| l.abs() > 0.05);
        (2usize..=6, l, t)
    }

    proptest! {
        #[test]
        fn reflections_and_ode_hold((n, l, t) in sample()) {
            let direct = v(n, l, t);
            let scale = direct.abs().max(1.0);
            prop_assert!((reflect_in_t(n, l, t).unwrap() - direct).abs() <= 1e-9 * scale);
            prop_assert!((reflect_in_lambda(n, l, t).unwrap() - direct).abs() <= 1e-9 * scale);
            prop_assert!(ode_residual(n, l, t).unwrap().abs() <= 1e-8 * scale);
        }
    }
}
