//! Gamma, Pochhammer and the Gauss hypergeometric series.
//!
//! Only real arguments are supported. The hypergeometric series is summed
//! directly on `|u| < 1`; the value at `u = 1` always comes from Gauss's
//! summation formula.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("gamma has a pole at {0}")]
    GammaPole(f64),
    #[error("hypergeometric parameter c = {0} is zero or a negative integer")]
    ParameterPole(f64),
    #[error("hypergeometric series diverges at u = 1 (c - a - b = {0} <= 0)")]
    Divergent(f64),
    #[error("hypergeometric argument u = {0} outside |u| < 1")]
    Domain(f64),
    #[error("hypergeometric series did not converge after {terms} terms at u = {u}")]
    NoConvergence { terms: usize, u: f64 },
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Summation stops once a term falls below this fraction of the partial sum.
pub const SERIES_RELATIVE_TOLERANCE: f64 = 1e-16;

/// Hard cap on the number of series terms.
///
/// At `u = 0.9998` with `c - a - b = 0.5` the series needs roughly 10^5 terms,
/// so the cap sits an order of magnitude above that.
pub const SERIES_MAX_TERMS: usize = 1_000_000;

fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(z) for real `z`, via the Lanczos approximation (g = 7) and reflection
/// below 1/2.
pub fn gamma(z: f64) -> Result<f64, SpecialFunctionError> {
    if is_non_positive_integer(z) {
        return Err(SpecialFunctionError::GammaPole(z));
    }
    if z < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let g = gamma(1.0 - z)?;
        return Ok(PI / ((PI * z).sin() * g));
    }
    let z = z - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power to keep t^(z+1/2) finite for large z
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc)
}

/// Rising factorial (p)_k = p (p+1) ... (p+k-1).
pub fn pochhammer(p: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (p + i as f64))
}

/// Parameters (a, b; c) of ₂F₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HypergeomParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, SpecialFunctionError> {
        if is_non_positive_integer(c) {
            return Err(SpecialFunctionError::ParameterPole(c));
        }
        Ok(Self { a, b, c })
    }

    /// Parameters of the derivative series, (a+1, b+1; c+1).
    pub fn shifted(self) -> Self {
        Self {
            a: self.a + 1.0,
            b: self.b + 1.0,
            c: self.c + 1.0,
        }
    }

    /// Degree of the polynomial when the series terminates.
    pub fn terminating_degree(&self) -> Option<u32> {
        [self.a, self.b]
            .into_iter()
            .filter(|&x| is_non_positive_integer(x))
            .map(|x| (-x) as u32)
            .min()
    }

    /// Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b)), valid when c - a - b > 0.
    pub fn gauss_value_at_one(&self) -> Result<f64, SpecialFunctionError> {
        let excess = self.c - self.a - self.b;
        if excess <= 0.0 {
            return Err(SpecialFunctionError::Divergent(excess));
        }
        let (ca, cb) = (self.c - self.a, self.c - self.b);
        // 1/Γ vanishes at the poles of Γ(c-a) or Γ(c-b)
        if is_non_positive_integer(ca) || is_non_positive_integer(cb) {
            return Ok(0.0);
        }
        Ok(gamma(self.c)? * gamma(excess)? / (gamma(ca)? * gamma(cb)?))
    }
}

/// ₂F₁(a, b; c; u).
pub fn hyp2f1(params: HypergeomParams, u: f64) -> Result<f64, SpecialFunctionError> {
    let HypergeomParams { a, b, c } = params;
    if is_non_positive_integer(c) {
        return Err(SpecialFunctionError::ParameterPole(c));
    }
    let degree = params.terminating_degree();
    if u == 1.0 {
        let excess = c - a - b;
        if excess > 0.0 {
            return params.gauss_value_at_one();
        }
        return match degree {
            Some(m) => Ok(polynomial_sum(params, u, m)),
            None => Err(SpecialFunctionError::Divergent(excess)),
        };
    }
    if let Some(m) = degree {
        return Ok(polynomial_sum(params, u, m));
    }
    if !(u.abs() < 1.0) {
        return Err(SpecialFunctionError::Domain(u));
    }

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((kf + 1.0) * (c + kf)) * u;
        term *= ratio;
        sum += term;
        if term.abs() <= SERIES_RELATIVE_TOLERANCE * sum.abs() && ratio.abs() < 1.0 {
            return Ok(sum);
        }
    }
    Err(SpecialFunctionError::NoConvergence {
        terms: SERIES_MAX_TERMS,
        u,
    })
}

fn polynomial_sum(params: HypergeomParams, u: f64, degree: u32) -> f64 {
    let HypergeomParams { a, b, c } = params;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..degree {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((kf + 1.0) * (c + kf)) * u;
        sum += term;
    }
    sum
}

/// d/du ₂F₁(a, b; c; u) = (ab/c) ₂F₁(a+1, b+1; c+1; u).
pub fn hyp2f1_derivative(params: HypergeomParams, u: f64) -> Result<f64, SpecialFunctionError> {
    if params.a == 0.0 || params.b == 0.0 {
        return Ok(0.0);
    }
    let scale = params.a * params.b / params.c;
    Ok(scale * hyp2f1(params.shifted(), u)?)
}

/// Second derivative in u, by applying the derivative rule twice.
pub fn hyp2f1_second_derivative(
    params: HypergeomParams,
    u: f64,
) -> Result<f64, SpecialFunctionError> {
    if params.a == 0.0 || params.b == 0.0 {
        return Ok(0.0);
    }
    let scale = params.a * params.b / params.c;
    Ok(scale * hyp2f1_derivative(params.shifted(), u)?)
}
