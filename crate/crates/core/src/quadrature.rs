//! Direction/weight rules on the unit sphere S^(n-1).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::ballpot::sphere_area;

pub const DEFAULT_CIRCLE_SIZE: usize = 4096;
pub const DEFAULT_SPHERE_SIZE: usize = 200_000;
pub const DEFAULT_MONTE_CARLO_SIZE: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Equally spaced angles starting at 0.
    Trapezoid,
    /// Spherical Fibonacci lattice with the polar axis along the last coordinate.
    Fibonacci,
    /// Seeded uniform random directions.
    MonteCarlo { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    dim: usize,
    kind: RuleKind,
    directions: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Uniform angular grid on the circle.
    pub fn circle(size: usize) -> Self {
        Self::circle_from(size, 0.0)
    }

    fn circle_from(size: usize, offset: f64) -> Self {
        assert!(size > 0, "empty quadrature");
        let step = 2.0 * PI / size as f64;
        let directions = (0..size)
            .flat_map(|k| {
                let (s, c) = (step * (k as f64 + offset)).sin_cos();
                [c, s]
            })
            .collect();
        Self {
            dim: 2,
            kind: RuleKind::Trapezoid,
            directions,
            weights: vec![step; size],
        }
    }

    pub fn fibonacci(size: usize) -> Self {
        Self::fibonacci_from(size, 0.0)
    }

    fn fibonacci_from(size: usize, offset: f64) -> Self {
        assert!(size > 0, "empty quadrature");
        let golden_angle = PI * (3.0 - 5f64.sqrt());
        let directions = (0..size)
            .flat_map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / size as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let (s, c) = (golden_angle * (i as f64 + offset)).sin_cos();
                [rho * c, rho * s, z]
            })
            .collect();
        Self {
            dim: 3,
            kind: RuleKind::Fibonacci,
            directions,
            weights: vec![4.0 * PI / size as f64; size],
        }
    }

    pub fn monte_carlo(dim: usize, size: usize, seed: u64) -> Self {
        assert!(dim >= 2 && size > 0, "invalid Monte Carlo rule");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut directions = Vec::with_capacity(dim * size);
        let mut v = vec![0.0; dim];
        for _ in 0..size {
            loop {
                for c in v.iter_mut() {
                    *c = StandardNormal.sample(&mut rng);
                }
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    directions.extend(v.iter().map(|c| c / norm));
                    break;
                }
            }
        }
        Self {
            dim,
            kind: RuleKind::MonteCarlo { seed },
            directions,
            weights: vec![sphere_area(dim) / size as f64; size],
        }
    }

    /// Rule of the given size for dimension `dim`: trapezoid for n=2,
    /// Fibonacci for n=3, Monte Carlo otherwise.
    pub fn with_size(dim: usize, size: usize, seed: u64) -> Self {
        match dim {
            2 => Self::circle(size),
            3 => Self::fibonacci(size),
            _ => Self::monte_carlo(dim, size, seed),
        }
    }

    /// Same kind and size of rule, displaced by half a step (trapezoid and
    /// Fibonacci) or reseeded (Monte Carlo). Comparing the two gives an
    /// estimate of the quadrature error.
    pub fn shifted(&self) -> Self {
        let size = self.len();
        match self.kind {
            RuleKind::Trapezoid => Self::circle_from(size, 0.5),
            RuleKind::Fibonacci => Self::fibonacci_from(size, 0.5),
            RuleKind::MonteCarlo { seed } => Self::monte_carlo(self.dim, size, seed.wrapping_add(1)),
        }
    }

    pub fn default_for(dim: usize) -> Self {
        Self::with_size(dim, default_size(dim), DEFAULT_SEED)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.kind, RuleKind::MonteCarlo { .. })
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.directions
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub fn describe(&self) -> String {
        match self.kind {
            RuleKind::Trapezoid => format!("trapezoid:{}", self.len()),
            RuleKind::Fibonacci => format!("fibonacci:{}", self.len()),
            RuleKind::MonteCarlo { seed } => format!("monte-carlo:{}:seed={seed}", self.len()),
        }
    }
}

pub fn default_size(dim: usize) -> usize {
    match dim {
        2 => DEFAULT_CIRCLE_SIZE,
        3 => DEFAULT_SPHERE_SIZE,
        _ => DEFAULT_MONTE_CARLO_SIZE,
    }
}
