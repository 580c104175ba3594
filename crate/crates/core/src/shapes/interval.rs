use smallvec::SmallVec;

/// Endpoints closer than this are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted, disjoint, non-degenerate intervals of the ray parameter `t >= 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    spans: SmallVec<[Interval; 4]>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        Self::from_unsorted([Interval::new(lo, hi)])
    }

    /// Builds a normalized set: clips to `t >= 0`, sorts, merges touching or
    /// overlapping spans, and drops degenerate ones.
    pub fn from_unsorted<I: IntoIterator<Item = Interval>>(spans: I) -> Self {
        let mut raw: SmallVec<[Interval; 4]> = spans
            .into_iter()
            .map(|s| Interval::new(s.lo.max(0.0), s.hi))
            .filter(|s| s.hi > s.lo)
            .collect();
        if raw.len() > 1 {
            raw.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        }
        let mut out: SmallVec<[Interval; 4]> = SmallVec::new();
        for s in raw {
            match out.last_mut() {
                Some(last) if s.lo <= last.hi + MERGE_TOLERANCE => last.hi = last.hi.max(s.hi),
                _ => out.push(s),
            }
        }
        Self { spans: out }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> + '_ {
        self.spans.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.spans
    }

    pub fn contains(&self, t: f64) -> bool {
        self.spans.iter().any(|s| s.lo <= t && t <= s.hi)
    }

    /// True when the first span starts at the ray origin.
    pub fn starts_at_origin(&self) -> bool {
        self.spans.first().is_some_and(|s| s.lo == 0.0)
    }

    /// End of the span containing `t = 0`, if any.
    pub fn first_exit(&self) -> Option<f64> {
        self.spans.first().filter(|s| s.lo == 0.0).map(|s| s.hi)
    }

    /// Largest parameter in the set.
    pub fn last_exit(&self) -> Option<f64> {
        self.spans.last().map(|s| s.hi)
    }

    pub fn total_length(&self) -> f64 {
        self.spans.iter().map(Interval::len).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::from_unsorted(self.spans.iter().chain(other.spans.iter()).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out: SmallVec<[Interval; 4]> = SmallVec::new();
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if hi > lo {
                out.push(Interval::new(lo, hi));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_unsorted(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        let mut out: SmallVec<[Interval; 4]> = SmallVec::new();
        let b = &other.spans;
        let mut j = 0;
        for s in &self.spans {
            let mut lo = s.lo;
            while j < b.len() && b[j].hi <= lo {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].lo < s.hi {
                if b[k].lo > lo {
                    out.push(Interval::new(lo, b[k].lo));
                }
                lo = lo.max(b[k].hi);
                k += 1;
            }
            if s.hi > lo {
                out.push(Interval::new(lo, s.hi));
            }
        }
        Self::from_unsorted(out)
    }

    /// Complement within `[0, limit]`.
    pub fn complement_within(&self, limit: f64) -> Self {
        Self::single(0.0, limit).difference(self)
    }

    /// Multiplies every endpoint by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            spans: self
                .spans
                .iter()
                .map(|s| Interval::new(s.lo * k, s.hi * k))
                .collect(),
        }
    }
}
