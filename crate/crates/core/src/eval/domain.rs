//! Normalized integer sets.
//!
//! An [`IntDomain`] is a sorted list of disjoint, non-adjacent inclusive
//! ranges. Open parameter domains such as `int(1..)` use `i64::MIN` /
//! `i64::MAX` as their missing bound; such domains report
//! `is_finite() == false` and must never be enumerated.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntDomain {
    ranges: Vec<(i64, i64)>,
}

impl IntDomain {
    pub const NEG_INF: i64 = i64::MIN;
    pub const POS_INF: i64 = i64::MAX;

    pub fn empty() -> Self {
        IntDomain { ranges: Vec::new() }
    }

    /// The unbounded domain `int`.
    pub fn unbounded() -> Self {
        IntDomain { ranges: vec![(Self::NEG_INF, Self::POS_INF)] }
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            Self::empty()
        } else {
            IntDomain { ranges: vec![(lo, hi)] }
        }
    }

    pub fn singleton(v: i64) -> Self {
        Self::range(v, v)
    }

    pub fn boolean() -> Self {
        Self::range(0, 1)
    }

    /// Builds a domain from arbitrary (possibly overlapping or out-of-order)
    /// ranges. Ranges with `lo > hi` contribute nothing.
    pub fn from_ranges<I: IntoIterator<Item = (i64, i64)>>(ranges: I) -> Self {
        let mut rs: Vec<(i64, i64)> = ranges.into_iter().filter(|(l, h)| l <= h).collect();
        rs.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(rs.len());
        for (lo, hi) in rs {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        IntDomain { ranges: out }
    }

    pub fn from_values<I: IntoIterator<Item = i64>>(values: I) -> Self {
        Self::from_ranges(values.into_iter().map(|v| (v, v)))
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        match (self.ranges.first(), self.ranges.last()) {
            (Some(f), Some(l)) => f.0 != Self::NEG_INF && l.1 != Self::POS_INF,
            _ => true,
        }
    }

    pub fn has_lower_bound(&self) -> bool {
        self.ranges.first().map_or(true, |r| r.0 != Self::NEG_INF)
    }

    pub fn min_value(&self) -> Option<i64> {
        self.ranges.first().map(|r| r.0)
    }

    pub fn max_value(&self) -> Option<i64> {
        self.ranges.last().map(|r| r.1)
    }

    /// Number of values; `None` for open domains or sizes beyond `u64`.
    pub fn size(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        let mut total: u64 = 0;
        for &(lo, hi) in &self.ranges {
            let w = (hi as i128 - lo as i128 + 1) as u128;
            total = total.checked_add(u64::try_from(w).ok()?)?;
        }
        Some(total)
    }

    pub fn contains(&self, v: i64) -> bool {
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if hi < v {
                    std::cmp::Ordering::Less
                } else if lo > v {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn values(&self) -> Vec<i64> {
        self.iter().collect()
    }

    /// Zero-based position of `v` in ascending order.
    pub fn position(&self, v: i64) -> Option<usize> {
        let mut offset: usize = 0;
        for &(lo, hi) in &self.ranges {
            if v < lo {
                return None;
            }
            if v <= hi {
                return Some(offset + (v - lo) as usize);
            }
            offset += (hi - lo + 1) as usize;
        }
        None
    }

    /// The value at zero-based position `i` in ascending order.
    pub fn nth(&self, mut i: usize) -> Option<i64> {
        for &(lo, hi) in &self.ranges {
            let w = (hi - lo) as u64 + 1;
            if (i as u64) < w {
                return Some(lo + i as i64);
            }
            i -= w as usize;
        }
        None
    }

    pub fn union(&self, other: &IntDomain) -> IntDomain {
        Self::from_ranges(self.ranges.iter().chain(other.ranges.iter()).copied())
    }

    pub fn intersect(&self, other: &IntDomain) -> IntDomain {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ranges.len() && j < other.ranges.len() {
            let (a0, a1) = self.ranges[i];
            let (b0, b1) = other.ranges[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntDomain { ranges: out }
    }

    pub fn minus(&self, other: &IntDomain) -> IntDomain {
        let mut out = Vec::new();
        for &(lo, hi) in &self.ranges {
            let mut cur = lo;
            let mut done = false;
            for &(b0, b1) in &other.ranges {
                if b1 < cur {
                    continue;
                }
                if b0 > hi {
                    break;
                }
                if b0 > cur {
                    out.push((cur, b0 - 1));
                }
                if b1 >= hi {
                    done = true;
                    break;
                }
                cur = b1 + 1;
            }
            if !done && cur <= hi {
                out.push((cur, hi));
            }
        }
        IntDomain { ranges: out }
    }

    /// Keeps only values within `[lo, hi]`.
    pub fn clamp(&self, lo: i64, hi: i64) -> IntDomain {
        self.intersect(&IntDomain::range(lo, hi))
    }

    /// Largest value `<= v`, if any.
    pub fn floor_value(&self, v: i64) -> Option<i64> {
        let mut best = None;
        for &(lo, hi) in &self.ranges {
            if lo > v {
                break;
            }
            best = Some(hi.min(v));
        }
        best
    }

    /// Smallest value `>= v`, if any.
    pub fn ceil_value(&self, v: i64) -> Option<i64> {
        for &(lo, hi) in &self.ranges {
            if hi >= v {
                return Some(lo.max(v));
            }
        }
        None
    }
}

fn fmt_bound(v: i64) -> String {
    v.to_string()
}

impl fmt::Display for IntDomain {
    /// Prints the domain in Essence Prime syntax, e.g. `int(1..3,5)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ranges.len() == 1 && self.ranges[0] == (Self::NEG_INF, Self::POS_INF) {
            return write!(f, "int");
        }
        write!(f, "int(")?;
        for (i, &(lo, hi)) in self.ranges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let l = if lo == Self::NEG_INF { String::new() } else { fmt_bound(lo) };
            let h = if hi == Self::POS_INF { String::new() } else { fmt_bound(hi) };
            if lo == hi {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}..{h}")?;
            }
        }
        write!(f, ")")
    }
}
