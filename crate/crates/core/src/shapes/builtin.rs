//! Named fixture shapes.

use std::f64::consts::TAU;

use super::{Shape, ShapeError, StarBody2D};

pub const BUILTIN_NAMES: [&str; 6] = ["ball", "box", "two-balls", "slit-ball", "two-lobe-x", "star-cos3"];

/// Looks up a builtin by name. All builtins are planar.
pub fn builtin(name: &str) -> Result<Shape, ShapeError> {
    match name {
        "ball" => Shape::ball(&[0.0, 0.0], 1.0),
        "box" => Shape::cuboid(&[-1.0, -1.0], &[1.0, 1.0]),
        "two-balls" => Shape::union_of_balls(&[(vec![-3.0, 0.0], 1.0), (vec![3.0, 0.0], 1.0)]),
        "slit-ball" => slit_ball(2, 0.1),
        "two-lobe-x" => two_lobe_x(0.1),
        "star-cos3" => star_cos(3, 0.05, 720),
        other => Err(ShapeError::UnknownBuiltin(other.to_string())),
    }
}

/// Unit ball with the slab `|x_n| < eps` removed.
pub fn slit_ball(dim: usize, eps: f64) -> Result<Shape, ShapeError> {
    let origin = vec![0.0; dim];
    let mut up = vec![0.0; dim];
    up[dim - 1] = -1.0;
    let mut down = vec![0.0; dim];
    down[dim - 1] = 1.0;
    let upper = Shape::intersection(vec![Shape::ball(&origin, 1.0)?, Shape::half_space(&up, -eps)?])?;
    let lower = Shape::intersection(vec![Shape::ball(&origin, 1.0)?, Shape::half_space(&down, -eps)?])?;
    Shape::union(vec![upper, lower])
}

/// Unit disks at A = (0,0) and B = (1,0), plus the parts of the annuli
/// `2 - eps <= |x - A| <= 2` with `x_1 >= 1/2` and `2 - eps <= |x - B| <= 2`
/// with `x_1 <= 1/2`.
pub fn two_lobe_x(eps: f64) -> Result<Shape, ShapeError> {
    let annulus = |c: [f64; 2]| -> Result<Shape, ShapeError> {
        Shape::difference(Shape::ball(&c, 2.0)?, Shape::ball(&c, 2.0 - eps)?)
    };
    let right = Shape::half_space(&[-1.0, 0.0], -0.5)?;
    let left = Shape::half_space(&[1.0, 0.0], 0.5)?;
    Shape::union(vec![
        Shape::ball(&[0.0, 0.0], 1.0)?,
        Shape::ball(&[1.0, 0.0], 1.0)?,
        Shape::intersection(vec![annulus([0.0, 0.0])?, right])?,
        Shape::intersection(vec![annulus([1.0, 0.0])?, left])?,
    ])
}

/// Star body `rho(θ) = 1 + eps·cos(kθ)` sampled at `samples` angles.
pub fn star_cos(k: u32, eps: f64, samples: usize) -> Result<Shape, ShapeError> {
    let star = StarBody2D::from_fn(samples, |t| 1.0 + eps * (k as f64 * t).cos())?;
    debug_assert!((star.radii().len() as f64 * (TAU / samples as f64) - TAU).abs() < 1e-12);
    Ok(Shape::from_star(star))
}
