use serde::{Deserialize, Serialize};

use super::{Node, Shape, ShapeError, StarBody2D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Serialized form of a shape, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShapeSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { min: Vec<f64>, max: Vec<f64> },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Star2d { radii: Vec<f64> },
    UnionOfBalls { balls: Vec<BallSpec> },
    Union { children: Vec<ShapeSpec> },
    Intersection { children: Vec<ShapeSpec> },
    Difference { left: Box<ShapeSpec>, right: Box<ShapeSpec> },
    Translate { child: Box<ShapeSpec>, vector: Vec<f64> },
    Scale { child: Box<ShapeSpec>, factor: f64 },
    ParallelBody { points: Vec<Vec<f64>>, ell: f64 },
}

impl ShapeSpec {
    /// Builds the shape without requiring it to be bounded.
    pub fn build(&self) -> Result<Shape, ShapeError> {
        let all = |children: &[ShapeSpec]| children.iter().map(ShapeSpec::build).collect::<Result<Vec<_>, _>>();
        match self {
            ShapeSpec::Ball { center, radius } => Shape::ball(center, *radius),
            ShapeSpec::Box { min, max } => Shape::cuboid(min, max),
            ShapeSpec::Halfspace { normal, offset } => Shape::half_space(normal, *offset),
            ShapeSpec::Star2d { radii } => Shape::star2d(radii.clone()),
            ShapeSpec::UnionOfBalls { balls } => {
                let balls: Vec<_> = balls.iter().map(|b| (b.center.clone(), b.radius)).collect();
                Shape::union_of_balls(&balls)
            }
            ShapeSpec::Union { children } => Shape::union(all(children)?),
            ShapeSpec::Intersection { children } => Shape::intersection(all(children)?),
            ShapeSpec::Difference { left, right } => Shape::difference(left.build()?, right.build()?),
            ShapeSpec::Translate { child, vector } => Shape::translate(child.build()?, vector),
            ShapeSpec::Scale { child, factor } => Shape::scale(child.build()?, *factor),
            ShapeSpec::ParallelBody { points, ell } => Shape::parallel_body(points, *ell),
        }
    }
}

fn node_spec(node: &Node) -> ShapeSpec {
    let v = |p: &super::Point| p.as_slice().to_vec();
    match node {
        Node::Ball { center, radius } => ShapeSpec::Ball { center: v(center), radius: *radius },
        Node::Cuboid { min, max } => ShapeSpec::Box { min: v(min), max: v(max) },
        Node::HalfSpace { normal, offset } => ShapeSpec::Halfspace { normal: v(normal), offset: *offset },
        Node::Star(s) => ShapeSpec::Star2d { radii: StarBody2D::radii(s).to_vec() },
        Node::UnionOfBalls { centers, radii } => ShapeSpec::UnionOfBalls {
            balls: centers
                .iter()
                .zip(radii)
                .map(|(c, r)| BallSpec { center: v(c), radius: *r })
                .collect(),
        },
        Node::Union(ch) => ShapeSpec::Union { children: ch.iter().map(node_spec).collect() },
        Node::Intersection(ch) => ShapeSpec::Intersection { children: ch.iter().map(node_spec).collect() },
        Node::Difference(a, b) => ShapeSpec::Difference {
            left: Box::new(node_spec(a)),
            right: Box::new(node_spec(b)),
        },
        Node::Translate { child, offset } => ShapeSpec::Translate {
            child: Box::new(node_spec(child)),
            vector: v(offset),
        },
        Node::Scale { child, factor } => ShapeSpec::Scale {
            child: Box::new(node_spec(child)),
            factor: *factor,
        },
    }
}

impl Shape {
    pub fn to_spec(&self) -> ShapeSpec {
        node_spec(&self.node)
    }

    /// Builds a shape from its spec and requires the result to be bounded.
    pub fn from_spec(spec: &ShapeSpec) -> Result<Self, ShapeError> {
        let shape = spec.build()?;
        shape.ensure_bounded()?;
        Ok(shape)
    }

    pub fn from_json(text: &str) -> Result<Self, ShapeError> {
        let spec: ShapeSpec = serde_json::from_str(text).map_err(|e| ShapeError::Json(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("shape specs always serialize")
    }
}
