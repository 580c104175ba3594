use smallvec::SmallVec;
use std::f64::consts::{PI, TAU};

use super::interval::{Interval, IntervalSet};
use super::ShapeError;

/// Planar star body centered at the origin. The boundary radius is sampled on
/// a uniform angular grid starting at angle 0 and interpolated linearly in angle.
#[derive(Debug, Clone, PartialEq)]
pub struct StarBody2D {
    radii: Vec<f64>,
    units: Vec<[f64; 2]>,
    step: f64,
    min: f64,
    max: f64,
}

impl StarBody2D {
    pub fn new(radii: Vec<f64>) -> Result<Self, ShapeError> {
        if radii.len() < 3 {
            return Err(ShapeError::InvalidStar("need at least 3 radial samples".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(ShapeError::InvalidStar("radial samples must be positive and finite".into()));
        }
        let step = TAU / radii.len() as f64;
        let units = (0..radii.len())
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                [c, s]
            })
            .collect();
        let min = radii.iter().copied().fold(f64::INFINITY, f64::min);
        let max = radii.iter().copied().fold(0.0, f64::max);
        Ok(Self { radii, units, step, min, max })
    }

    /// Samples `rho` at `count` equally spaced angles.
    pub fn from_fn(count: usize, rho: impl Fn(f64) -> f64) -> Result<Self, ShapeError> {
        let step = TAU / count.max(1) as f64;
        Self::new((0..count).map(|k| rho(step * k as f64)).collect())
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn min_radius(&self) -> f64 {
        self.min
    }

    pub fn max_radius(&self) -> f64 {
        self.max
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        let s = theta.rem_euclid(TAU) / self.step;
        let k = (s.floor() as usize).min(self.radii.len() - 1);
        self.segment_radius(k, (s - k as f64) * self.step)
    }

    /// Radius on segment `k` at angular offset `delta` from its start.
    fn segment_radius(&self, k: usize, delta: f64) -> f64 {
        let next = self.radii[(k + 1) % self.radii.len()];
        self.radii[k] + (next - self.radii[k]) * delta / self.step
    }

    fn segment_of(&self, theta: f64) -> usize {
        let s = theta.rem_euclid(TAU) / self.step;
        (s.floor() as usize).min(self.radii.len() - 1)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let r = p[0].hypot(p[1]);
        if r <= self.min {
            return true;
        }
        if r > self.max {
            return false;
        }
        r <= self.radius_at(p[1].atan2(p[0]))
    }

    /// Points of the boundary curve, `per_segment` per sample interval.
    pub fn boundary_points(&self, per_segment: usize) -> impl Iterator<Item = [f64; 2]> + '_ {
        let total = self.radii.len() * per_segment.max(1);
        let dt = TAU / total as f64;
        (0..total).map(move |i| {
            let theta = dt * i as f64;
            let r = self.radius_at(theta);
            let (s, c) = theta.sin_cos();
            [r * c, r * s]
        })
    }

    pub(crate) fn cast(&self, o: &[f64], d: &[f64]) -> IntervalSet {
        let outer = ray_circle(o, d, self.max);
        if outer.is_empty() {
            return outer;
        }
        let inner = ray_circle(o, d, self.min);
        let mut spans: SmallVec<[Interval; 4]> = inner.iter().copied().collect();
        for piece in outer.difference(&inner).iter() {
            self.resolve_piece(o, d, piece.lo, piece.hi, &mut spans);
        }
        IntervalSet::from_unsorted(spans)
    }

    /// Splits an annular piece of the ray at the sample angles and resolves each part.
    fn resolve_piece(&self, o: &[f64], d: &[f64], ta: f64, tb: f64, out: &mut SmallVec<[Interval; 4]>) {
        let omega = o[0] * d[1] - o[1] * d[0];
        let angle = |t: f64| (o[1] + t * d[1]).atan2(o[0] + t * d[0]);
        let (tha, thb) = (angle(ta), angle(tb));
        let mut sweep = thb - tha;
        if omega > 0.0 {
            if sweep < 0.0 {
                sweep += TAU;
            }
        } else if omega < 0.0 {
            if sweep > 0.0 {
                sweep -= TAU;
            }
        } else {
            sweep = 0.0;
        }
        let mut cuts: SmallVec<[f64; 16]> = SmallVec::new();
        cuts.push(ta);
        if sweep != 0.0 {
            let (lo, hi) = if sweep > 0.0 { (tha, tha + sweep) } else { (tha + sweep, tha) };
            let k0 = (lo / self.step).floor() as i64 + 1;
            let k1 = (hi / self.step).ceil() as i64 - 1;
            let count = self.radii.len() as i64;
            let start = cuts.len();
            for kk in k0..=k1 {
                let u = self.units[kk.rem_euclid(count) as usize];
                let denom = u[0] * d[1] - u[1] * d[0];
                if denom == 0.0 {
                    continue;
                }
                let t = -(u[0] * o[1] - u[1] * o[0]) / denom;
                if t > ta && t < tb {
                    cuts.push(t);
                }
            }
            cuts[start..].sort_by(f64::total_cmp);
        }
        cuts.push(tb);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                self.resolve_segment(o, d, w[0], w[1], out);
            }
        }
    }

    /// Inside part of `[s0, s1]`, a stretch of the ray within one angular segment.
    /// There the gap between the ray and the boundary is convex in angle,
    /// so the inside part is a single (possibly empty) interval.
    fn resolve_segment(&self, o: &[f64], d: &[f64], s0: f64, s1: f64, out: &mut SmallVec<[Interval; 4]>) {
        let at = |t: f64| [o[0] + t * d[0], o[1] + t * d[1]];
        let mid = at(0.5 * (s0 + s1));
        let k = self.segment_of(mid[1].atan2(mid[0]));
        let theta_k = self.step * k as f64;
        let gap = |t: f64| {
            let p = at(t);
            let delta = (p[1].atan2(p[0]) - theta_k + PI).rem_euclid(TAU) - PI;
            p[0].hypot(p[1]) - self.segment_radius(k, delta)
        };
        let (f0, f1) = (gap(s0), gap(s1));
        match (f0 <= 0.0, f1 <= 0.0) {
            (true, true) => out.push(Interval::new(s0, s1)),
            (true, false) => out.push(Interval::new(s0, illinois(&gap, s0, s1, f0, f1))),
            (false, true) => out.push(Interval::new(illinois(&gap, s0, s1, f0, f1), s1)),
            (false, false) => {
                let tc = (-(o[0] * d[0] + o[1] * d[1])).clamp(s0, s1);
                let pc = at(tc);
                let seg_max = self.radii[k].max(self.radii[(k + 1) % self.radii.len()]);
                if pc[0].hypot(pc[1]) > seg_max {
                    return;
                }
                let (tm, fm) = golden_min(&gap, s0, s1);
                if fm <= 0.0 {
                    let lo = illinois(&gap, s0, tm, f0, fm);
                    let hi = illinois(&gap, tm, s1, fm, f1);
                    out.push(Interval::new(lo, hi));
                }
            }
        }
    }
}

/// Ray against the origin-centered circle of radius `r`.
fn ray_circle(o: &[f64], d: &[f64], r: f64) -> IntervalSet {
    super::ray_ball(o, d, &[0.0, 0.0], r)
}

/// Bracketed false position with the Illinois modification.
fn illinois(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    for _ in 0..200 {
        if fb == 0.0 {
            return b;
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            return c.clamp(a.min(b), a.max(b));
        }
        let fc = f(c);
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
        if (b - a).abs() <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    b
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= 0.0 {
            return (x1, f1);
        }
        if f2 <= 0.0 {
            return (x2, f2);
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-14 * (1.0 + b.abs()) {
            break;
        }
    }
    if f1 < f2 { (x1, f1) } else { (x2, f2) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_radii_is_a_disk() {
        let s = StarBody2D::new(vec![2.0; 12]).unwrap();
        let iv = s.cast(&[-5.0, 0.3], &[1.0, 0.0]);
        let half = (4.0f64 - 0.09).sqrt();
        assert_eq!(iv.len(), 1);
        let span = iv.as_slice()[0];
        assert!((span.lo - (5.0 - half)).abs() < 1e-12);
        assert!((span.hi - (5.0 + half)).abs() < 1e-12);
    }

    #[test]
    fn crossings_lie_on_the_boundary() {
        let s = StarBody2D::from_fn(90, |t| 1.0 + 0.3 * (3.0 * t).cos()).unwrap();
        let o = [-3.0, -2.8];
        let d = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        let iv = s.cast(&o, &d);
        assert!(!iv.is_empty());
        for span in iv.iter() {
            for t in [span.lo, span.hi] {
                let p = [o[0] + t * d[0], o[1] + t * d[1]];
                let r = p[0].hypot(p[1]);
                assert!((r - s.radius_at(p[1].atan2(p[0]))).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(StarBody2D::new(vec![1.0, 1.0]).is_err());
        assert!(StarBody2D::new(vec![1.0, 0.0, 1.0]).is_err());
    }
}
