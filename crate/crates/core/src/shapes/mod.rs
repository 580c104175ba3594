//! CSG shape algebra: membership, ray intervals, bounding data, and the
//! radial metrics r(x) and R(x).

mod builtin;
mod interval;
mod json;
mod star;

use nalgebra::DVector;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

use crate::quadrature::SphereQuadrature;

pub use builtin::{builtin, slit_ball, star_cos, two_lobe_x, BUILTIN_NAMES};
pub use interval::{Interval, IntervalSet, MERGE_TOLERANCE};
pub use json::{BallSpec, ShapeSpec};
pub use star::StarBody2D;

pub type Point = DVector<f64>;

pub const DEFAULT_WORLD_RADIUS: f64 = 1e6;
/// Allowed deviation of a ray direction from unit length.
pub const DIRECTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("box requires min < max in every coordinate")]
    InvalidBox,
    #[error("scale factor must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("half-space normal must be non-zero and finite")]
    InvalidNormal,
    #[error("invalid star body: {0}")]
    InvalidStar(String),
    #[error("{0} needs at least one child")]
    NoChildren(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("shape is unbounded; half-spaces must be cut down by an intersection or difference")]
    Unbounded,
    #[error("ray direction has norm {0}, expected 1")]
    DegenerateDirection(f64),
    #[error("unknown builtin shape '{0}'")]
    UnknownBuiltin(String),
    #[error("invalid shape JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Ball { center: Point, radius: f64 },
    Cuboid { min: Point, max: Point },
    HalfSpace { normal: Point, offset: f64 },
    Star(StarBody2D),
    UnionOfBalls { centers: Vec<Point>, radii: Vec<f64> },
    Union(Vec<Node>),
    Intersection(Vec<Node>),
    Difference(Box<Node>, Box<Node>),
    Translate { child: Box<Node>, offset: Point },
    Scale { child: Box<Node>, factor: f64 },
}

/// An immutable CSG tree in a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    node: Node,
    dim: usize,
    bounded: bool,
    world_radius: f64,
}

fn point(coords: &[f64]) -> Result<Point, ShapeError> {
    if coords.len() < 2 {
        return Err(ShapeError::DimensionTooSmall(coords.len()));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(ShapeError::NonFinite);
    }
    Ok(DVector::from_column_slice(coords))
}

fn positive(r: f64) -> Result<f64, ShapeError> {
    if r.is_finite() && r > 0.0 {
        Ok(r)
    } else {
        Err(ShapeError::InvalidRadius(r))
    }
}

impl Shape {
    fn leaf(node: Node, dim: usize, bounded: bool) -> Self {
        Self { node, dim, bounded, world_radius: DEFAULT_WORLD_RADIUS }
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self, ShapeError> {
        let center = point(center)?;
        let dim = center.len();
        Ok(Self::leaf(Node::Ball { center, radius: positive(radius)? }, dim, true))
    }

    /// Axis-aligned box `[min, max]`.
    pub fn cuboid(min: &[f64], max: &[f64]) -> Result<Self, ShapeError> {
        let (min, max) = (point(min)?, point(max)?);
        if min.len() != max.len() {
            return Err(ShapeError::DimensionMismatch { expected: min.len(), found: max.len() });
        }
        if min.iter().zip(max.iter()).any(|(a, b)| a >= b) {
            return Err(ShapeError::InvalidBox);
        }
        let dim = min.len();
        Ok(Self::leaf(Node::Cuboid { min, max }, dim, true))
    }

    /// The set `{x : normal·x <= offset}`; the normal is normalized internally.
    pub fn half_space(normal: &[f64], offset: f64) -> Result<Self, ShapeError> {
        let normal = point(normal)?;
        let norm = normal.norm();
        if norm == 0.0 || !offset.is_finite() {
            return Err(ShapeError::InvalidNormal);
        }
        let dim = normal.len();
        Ok(Self::leaf(Node::HalfSpace { normal: normal / norm, offset: offset / norm }, dim, false))
    }

    pub fn star2d(radii: Vec<f64>) -> Result<Self, ShapeError> {
        Ok(Self::leaf(Node::Star(StarBody2D::new(radii)?), 2, true))
    }

    pub fn from_star(star: StarBody2D) -> Self {
        Self::leaf(Node::Star(star), 2, true)
    }

    pub fn union_of_balls(balls: &[(Vec<f64>, f64)]) -> Result<Self, ShapeError> {
        if balls.is_empty() {
            return Err(ShapeError::NoChildren("union_of_balls"));
        }
        let mut centers = Vec::with_capacity(balls.len());
        let mut radii = Vec::with_capacity(balls.len());
        for (c, r) in balls {
            let c = point(c)?;
            if c.len() != balls[0].0.len() {
                return Err(ShapeError::DimensionMismatch { expected: balls[0].0.len(), found: c.len() });
            }
            centers.push(c);
            radii.push(positive(*r)?);
        }
        let dim = centers[0].len();
        Ok(Self::leaf(Node::UnionOfBalls { centers, radii }, dim, true))
    }

    /// Union of balls of radius `ell` around every point.
    pub fn parallel_body(points: &[Vec<f64>], ell: f64) -> Result<Self, ShapeError> {
        let balls: Vec<_> = points.iter().map(|p| (p.clone(), ell)).collect();
        Self::union_of_balls(&balls)
    }

    fn same_dim(children: &[Shape], what: &'static str) -> Result<usize, ShapeError> {
        let first = children.first().ok_or(ShapeError::NoChildren(what))?;
        for c in children {
            if c.dim != first.dim {
                return Err(ShapeError::DimensionMismatch { expected: first.dim, found: c.dim });
            }
        }
        Ok(first.dim)
    }

    pub fn union(children: Vec<Shape>) -> Result<Self, ShapeError> {
        let dim = Self::same_dim(&children, "union")?;
        let bounded = children.iter().all(|c| c.bounded);
        Ok(Self::leaf(Node::Union(children.into_iter().map(|c| c.node).collect()), dim, bounded))
    }

    pub fn intersection(children: Vec<Shape>) -> Result<Self, ShapeError> {
        let dim = Self::same_dim(&children, "intersection")?;
        let bounded = children.iter().any(|c| c.bounded);
        Ok(Self::leaf(
            Node::Intersection(children.into_iter().map(|c| c.node).collect()),
            dim,
            bounded,
        ))
    }

    pub fn difference(left: Shape, right: Shape) -> Result<Self, ShapeError> {
        if left.dim != right.dim {
            return Err(ShapeError::DimensionMismatch { expected: left.dim, found: right.dim });
        }
        let (dim, bounded) = (left.dim, left.bounded);
        Ok(Self::leaf(Node::Difference(Box::new(left.node), Box::new(right.node)), dim, bounded))
    }

    pub fn translate(child: Shape, offset: &[f64]) -> Result<Self, ShapeError> {
        let offset = point(offset)?;
        if offset.len() != child.dim {
            return Err(ShapeError::DimensionMismatch { expected: child.dim, found: offset.len() });
        }
        let (dim, bounded) = (child.dim, child.bounded);
        Ok(Self::leaf(Node::Translate { child: Box::new(child.node), offset }, dim, bounded))
    }

    /// Homothety `x -> factor·x` about the origin.
    pub fn scale(child: Shape, factor: f64) -> Result<Self, ShapeError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(ShapeError::InvalidScale(factor));
        }
        let (dim, bounded) = (child.dim, child.bounded);
        Ok(Self::leaf(Node::Scale { child: Box::new(child.node), factor }, dim, bounded))
    }

    /// Sets the radius at which half-lines are clipped.
    pub fn with_world_radius(mut self, radius: f64) -> Result<Self, ShapeError> {
        self.world_radius = positive(radius)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn world_radius(&self) -> f64 {
        self.world_radius
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn ensure_bounded(&self) -> Result<(), ShapeError> {
        if self.bounded {
            Ok(())
        } else {
            Err(ShapeError::Unbounded)
        }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), ShapeError> {
        if x.len() != self.dim {
            return Err(ShapeError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(ShapeError::NonFinite);
        }
        Ok(())
    }

    /// Whether `x` lies in the closed set. Panics on a dimension mismatch.
    pub fn contains(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.dim, "point dimension does not match shape");
        self.node.contains(x)
    }

    /// `{t >= 0 : origin + t·direction ∈ shape}`.
    pub fn ray_intervals(&self, origin: &[f64], direction: &[f64]) -> Result<IntervalSet, ShapeError> {
        self.check_point(origin)?;
        self.check_point(direction)?;
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DIRECTION_TOLERANCE {
            return Err(ShapeError::DegenerateDirection(norm));
        }
        Ok(self.cast(origin, direction))
    }

    /// Ray intervals without argument validation.
    pub(crate) fn cast(&self, origin: &[f64], direction: &[f64]) -> IntervalSet {
        self.node.cast(origin, direction, self.world_radius)
    }

    /// Axis-aligned bounding box `(min, max)`, or `None` when unbounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.node.bbox()
    }

    /// Center and radius of the ball circumscribing the bounding box.
    pub fn bounding_ball(&self) -> Option<(Vec<f64>, f64)> {
        let (lo, hi) = self.bounding_box()?;
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a) * (b - a)).sum::<f64>().sqrt();
        Some((center, radius))
    }

    /// Distance from `x` to the complement, sampled along the rule's directions.
    /// Exact for balls and boxes (also under translation and scaling); 0 when
    /// `x` is not in the shape.
    pub fn inradius_at(&self, x: &[f64], directions: &SphereQuadrature) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        if let Some(r) = self.node.exact_inradius(x) {
            return r;
        }
        let mut best = f64::INFINITY;
        for (d, _) in directions.iter() {
            match self.cast(x, d).first_exit() {
                Some(t) => best = best.min(t),
                None => return 0.0,
            }
        }
        best
    }

    /// Farthest distance from `x` to a point of the shape. Uses a built-in
    /// probe direction set where sampling is needed.
    pub fn circumradius_at(&self, x: &[f64]) -> f64 {
        self.circumradius_at_with(x, probe_directions(self.dim))
    }

    /// As [`Shape::circumradius_at`] with an explicit direction set for the sampled nodes.
    pub fn circumradius_at_with(&self, x: &[f64], directions: &SphereQuadrature) -> f64 {
        assert_eq!(x.len(), self.dim, "point dimension does not match shape");
        self.node.circumradius(x, directions, self.world_radius)
    }
}

fn probe_directions(dim: usize) -> &'static SphereQuadrature {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static SphereQuadrature>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache.entry(dim).or_insert_with(|| {
        let size = if dim == 2 { 8192 } else { 40_000 };
        Box::leak(Box::new(SphereQuadrature::with_size(dim, size, 1)))
    })
}

type Coords = SmallVec<[f64; 4]>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn ray_ball(o: &[f64], d: &[f64], c: &[f64], r: f64) -> IntervalSet {
    let mut b = 0.0;
    let mut cc = 0.0;
    for i in 0..o.len() {
        let oc = o[i] - c[i];
        b += oc * d[i];
        cc += oc * oc;
    }
    cc -= r * r;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return IntervalSet::empty();
    }
    let sq = disc.sqrt();
    let (t0, t1) = if b > 0.0 {
        let t0 = -b - sq;
        (t0, cc / t0)
    } else {
        let t1 = -b + sq;
        (cc / t1, t1)
    };
    if t1 <= 0.0 {
        return IntervalSet::empty();
    }
    IntervalSet::single(t0.max(0.0), t1)
}

fn ray_box(o: &[f64], d: &[f64], min: &[f64], max: &[f64]) -> IntervalSet {
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for i in 0..o.len() {
        if d[i] == 0.0 {
            if o[i] < min[i] || o[i] > max[i] {
                return IntervalSet::empty();
            }
            continue;
        }
        let inv = 1.0 / d[i];
        let (a, b) = ((min[i] - o[i]) * inv, (max[i] - o[i]) * inv);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        lo = lo.max(a);
        hi = hi.min(b);
        if hi <= lo {
            return IntervalSet::empty();
        }
    }
    IntervalSet::single(lo, hi)
}

fn ray_half_space(o: &[f64], d: &[f64], normal: &[f64], offset: f64, world: f64) -> IntervalSet {
    let s = dot(normal, o) - offset;
    let rate = dot(normal, d);
    if rate > 0.0 {
        IntervalSet::single(0.0, (-s / rate).min(world))
    } else if rate < 0.0 {
        IntervalSet::single(-s / rate, world)
    } else if s <= 0.0 {
        IntervalSet::single(0.0, world)
    } else {
        IntervalSet::empty()
    }
}

impl Node {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Node::Ball { center, radius } => {
                x.iter().zip(center.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= radius * radius
            }
            Node::Cuboid { min, max } => {
                x.iter().zip(min.iter().zip(max.iter())).all(|(v, (a, b))| *a <= *v && *v <= *b)
            }
            Node::HalfSpace { normal, offset } => dot(normal.as_slice(), x) <= *offset,
            Node::Star(s) => s.contains(x),
            Node::UnionOfBalls { centers, radii } => centers
                .iter()
                .zip(radii)
                .any(|(c, r)| x.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r),
            Node::Union(ch) => ch.iter().any(|c| c.contains(x)),
            Node::Intersection(ch) => ch.iter().all(|c| c.contains(x)),
            Node::Difference(a, b) => a.contains(x) && !b.contains(x),
            Node::Translate { child, offset } => {
                let y: Coords = x.iter().zip(offset.iter()).map(|(a, b)| a - b).collect();
                child.contains(&y)
            }
            Node::Scale { child, factor } => {
                let y: Coords = x.iter().map(|a| a / factor).collect();
                child.contains(&y)
            }
        }
    }

    fn cast(&self, o: &[f64], d: &[f64], world: f64) -> IntervalSet {
        match self {
            Node::Ball { center, radius } => ray_ball(o, d, center.as_slice(), *radius),
            Node::Cuboid { min, max } => ray_box(o, d, min.as_slice(), max.as_slice()),
            Node::HalfSpace { normal, offset } => ray_half_space(o, d, normal.as_slice(), *offset, world),
            Node::Star(s) => s.cast(o, d),
            Node::UnionOfBalls { centers, radii } => {
                let spans: SmallVec<[Interval; 8]> = centers
                    .iter()
                    .zip(radii)
                    .filter_map(|(c, r)| ray_ball(o, d, c.as_slice(), *r).as_slice().first().copied())
                    .collect();
                IntervalSet::from_unsorted(spans)
            }
            Node::Union(ch) => ch
                .iter()
                .fold(IntervalSet::empty(), |acc, c| acc.union(&c.cast(o, d, world))),
            Node::Intersection(ch) => {
                let mut acc = ch[0].cast(o, d, world);
                for c in &ch[1..] {
                    if acc.is_empty() {
                        break;
                    }
                    acc = acc.intersection(&c.cast(o, d, world));
                }
                acc
            }
            Node::Difference(a, b) => {
                let left = a.cast(o, d, world);
                if left.is_empty() {
                    left
                } else {
                    left.difference(&b.cast(o, d, world))
                }
            }
            Node::Translate { child, offset } => {
                let y: Coords = o.iter().zip(offset.iter()).map(|(a, b)| a - b).collect();
                child.cast(&y, d, world)
            }
            Node::Scale { child, factor } => {
                let y: Coords = o.iter().map(|a| a / factor).collect();
                child.cast(&y, d, world / factor).scaled(*factor)
            }
        }
    }

    fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Node::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Node::Cuboid { min, max } => Some((min.as_slice().to_vec(), max.as_slice().to_vec())),
            Node::HalfSpace { .. } => None,
            Node::Star(s) => Some((vec![-s.max_radius(); 2], vec![s.max_radius(); 2])),
            Node::UnionOfBalls { centers, radii } => {
                let boxes = centers.iter().zip(radii).map(|(c, r)| {
                    (c.iter().map(|v| v - r).collect(), c.iter().map(|v| v + r).collect())
                });
                boxes.reduce(merge_boxes)
            }
            Node::Union(ch) => ch.iter().map(Node::bbox).collect::<Option<Vec<_>>>()?.into_iter().reduce(merge_boxes),
            Node::Intersection(ch) => ch.iter().filter_map(Node::bbox).reduce(|(alo, ahi), (blo, bhi)| {
                (
                    alo.iter().zip(&blo).map(|(a, b)| a.max(*b)).collect(),
                    ahi.iter().zip(&bhi).map(|(a, b)| a.min(*b)).collect(),
                )
            }),
            Node::Difference(a, _) => a.bbox(),
            Node::Translate { child, offset } => child.bbox().map(|(lo, hi)| {
                (
                    lo.iter().zip(offset.iter()).map(|(a, b)| a + b).collect(),
                    hi.iter().zip(offset.iter()).map(|(a, b)| a + b).collect(),
                )
            }),
            Node::Scale { child, factor } => child.bbox().map(|(lo, hi)| {
                (lo.iter().map(|a| a * factor).collect(), hi.iter().map(|a| a * factor).collect())
            }),
        }
    }

    fn exact_inradius(&self, x: &[f64]) -> Option<f64> {
        match self {
            Node::Ball { center, radius } => Some((radius - dist(x, center.as_slice())).max(0.0)),
            Node::Cuboid { min, max } => Some(
                x.iter()
                    .zip(min.iter().zip(max.iter()))
                    .map(|(v, (a, b))| (v - a).min(b - v))
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0),
            ),
            Node::Translate { child, offset } => {
                let y: Coords = x.iter().zip(offset.iter()).map(|(a, b)| a - b).collect();
                child.exact_inradius(&y)
            }
            Node::Scale { child, factor } => {
                let y: Coords = x.iter().map(|a| a / factor).collect();
                child.exact_inradius(&y).map(|r| r * factor)
            }
            _ => None,
        }
    }

    fn circumradius(&self, x: &[f64], dirs: &SphereQuadrature, world: f64) -> f64 {
        match self {
            Node::Ball { center, radius } => dist(x, center.as_slice()) + radius,
            Node::Cuboid { min, max } => x
                .iter()
                .zip(min.iter().zip(max.iter()))
                .map(|(v, (a, b))| {
                    let far = (v - a).abs().max((b - v).abs());
                    far * far
                })
                .sum::<f64>()
                .sqrt(),
            Node::HalfSpace { .. } => f64::INFINITY,
            Node::Star(s) => s
                .boundary_points(16)
                .map(|p| dist(x, &p))
                .fold(0.0, f64::max),
            Node::UnionOfBalls { centers, radii } => centers
                .iter()
                .zip(radii)
                .map(|(c, r)| dist(x, c.as_slice()) + r)
                .fold(0.0, f64::max),
            Node::Union(ch) => ch.iter().map(|c| c.circumradius(x, dirs, world)).fold(0.0, f64::max),
            Node::Intersection(_) | Node::Difference(..) => dirs
                .iter()
                .filter_map(|(d, _)| self.cast(x, d, world).last_exit())
                .fold(0.0, f64::max),
            Node::Translate { child, offset } => {
                let y: Coords = x.iter().zip(offset.iter()).map(|(a, b)| a - b).collect();
                child.circumradius(&y, dirs, world)
            }
            Node::Scale { child, factor } => {
                let y: Coords = x.iter().map(|a| a / factor).collect();
                factor * child.circumradius(&y, dirs, world / factor)
            }
        }
    }
}

fn merge_boxes((alo, ahi): (Vec<f64>, Vec<f64>), (blo, bhi): (Vec<f64>, Vec<f64>)) -> (Vec<f64>, Vec<f64>) {
    (
        alo.iter().zip(&blo).map(|(a, b)| a.min(*b)).collect(),
        ahi.iter().zip(&bhi).map(|(a, b)| a.max(*b)).collect(),
    )
}
