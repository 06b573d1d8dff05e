//! k-th smallest distance queries over values split around a target.

use super::tree::OrderStatTree;
use crate::error::{Error, Result};

/// A nondecreasing sequence of distances `d(1) <= d(2) <= ...` with prefix
/// sums. `kth(0)` is the sentinel 0.
pub trait DistanceSource {
    fn len(&self) -> usize;

    /// `k` in `0..=len()`.
    fn kth(&self, k: usize) -> i64;

    /// Sum of the `k` smallest distances.
    fn sum_smallest(&self, k: usize) -> i128;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A tree whose keys are already distances.
impl DistanceSource for OrderStatTree {
    fn len(&self) -> usize {
        OrderStatTree::len(self)
    }

    fn kth(&self, k: usize) -> i64 {
        self.select(k).expect("k within tree size")
    }

    fn sum_smallest(&self, k: usize) -> i128 {
        self.prefix_sum(k).expect("k within tree size")
    }
}

/// Distances `t - c` of the keys `c <= t` stored in a tree.
pub struct LeftOf<'a> {
    pub tree: &'a OrderStatTree,
    pub target: i64,
}

impl DistanceSource for LeftOf<'_> {
    fn len(&self) -> usize {
        self.tree.len()
    }

    fn kth(&self, k: usize) -> i64 {
        if k == 0 {
            return 0;
        }
        self.target
            - self
                .tree
                .select(self.tree.len() - k + 1)
                .expect("k within tree size")
    }

    fn sum_smallest(&self, k: usize) -> i128 {
        k as i128 * self.target as i128 - self.tree.suffix_sum(k).expect("k within tree size")
    }
}

/// Distances `c - t` of the keys `c > t` stored in a tree.
pub struct RightOf<'a> {
    pub tree: &'a OrderStatTree,
    pub target: i64,
}

impl DistanceSource for RightOf<'_> {
    fn len(&self) -> usize {
        self.tree.len()
    }

    fn kth(&self, k: usize) -> i64 {
        if k == 0 {
            return 0;
        }
        self.tree.select(k).expect("k within tree size") - self.target
    }

    fn sum_smallest(&self, k: usize) -> i128 {
        self.tree.prefix_sum(k).expect("k within tree size") - k as i128 * self.target as i128
    }
}

/// Global `k`-th smallest distance over two sources and a split `l` (how
/// many come from `left`) whose `l` + `k - l` smallest elements are a set of
/// `k` smallest overall.
///
/// `SL(l) + SR(k - l)` is convex in `l` with increments
/// `dL(l + 1) - dR(k - l)`, so the first `l` where that increment is
/// nonnegative minimizes the sum, and its maximum element is `d(k)`.
pub fn joint_kth_distance<L, R>(left: &L, right: &R, k: usize) -> Result<(i64, usize)>
where
    L: DistanceSource + ?Sized,
    R: DistanceSource + ?Sized,
{
    let size = left.len() + right.len();
    if k > size {
        return Err(Error::OutOfRange { k, size });
    }
    let mut lo = k.saturating_sub(right.len());
    let mut hi = k.min(left.len());
    // first l in [lo, hi) with dL(l+1) >= dR(k-l), else hi
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if left.kth(mid + 1) >= right.kth(k - mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let l = lo;
    Ok((left.kth(l).max(right.kth(k - l)), l))
}

/// Sum of the `k` smallest distances over both sources.
pub fn joint_sum_smallest<L, R>(left: &L, right: &R, k: usize) -> Result<i128>
where
    L: DistanceSource + ?Sized,
    R: DistanceSource + ?Sized,
{
    let (_, l) = joint_kth_distance(left, right, k)?;
    Ok(left.sum_smallest(l) + right.sum_smallest(k - l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchors {
    /// Distance to the nearer of `t - 1` and `t + 1`.
    Double,
    /// Distance to `t`.
    Single,
}

/// Sorted values with prefix sums answering k-th smallest distance queries
/// against a movable target.
///
/// In double mode the distance of `x` is `min(|x - (t-1)|, |x - (t+1)|)`;
/// the regions are `[0, l0)` below `t-1`, `[l0, l1)` equal to `t-1`,
/// `[l1, r0)` equal to `t` (distance 1), `[r0, r1)` equal to `t+1` and
/// `[r1, n)` above. The single-target variant measures `|x - t|` and has no
/// middle region.
#[derive(Debug, Clone)]
pub struct DoubleTargetIndex {
    p: Vec<i64>,
    a: Vec<i128>,
    anchors: Anchors,
    t: i64,
    l0: usize,
    l1: usize,
    r0: usize,
    r1: usize,
}

struct LeftRun<'a> {
    idx: &'a DoubleTargetIndex,
    anchor: i64,
}

impl DistanceSource for LeftRun<'_> {
    fn len(&self) -> usize {
        self.idx.l0
    }

    fn kth(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.anchor - self.idx.p[self.idx.l0 - k]
        }
    }

    fn sum_smallest(&self, k: usize) -> i128 {
        let a = &self.idx.a;
        k as i128 * self.anchor as i128 - (a[self.idx.l0] - a[self.idx.l0 - k])
    }
}

struct RightRun<'a> {
    idx: &'a DoubleTargetIndex,
    anchor: i64,
}

impl DistanceSource for RightRun<'_> {
    fn len(&self) -> usize {
        self.idx.p.len() - self.idx.r1
    }

    fn kth(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.idx.p[self.idx.r1 + k - 1] - self.anchor
        }
    }

    fn sum_smallest(&self, k: usize) -> i128 {
        let a = &self.idx.a;
        (a[self.idx.r1 + k] - a[self.idx.r1]) - k as i128 * self.anchor as i128
    }
}

impl DoubleTargetIndex {
    pub fn new(values: &[i64], t: i64) -> Self {
        Self::build(values, t, Anchors::Double)
    }

    /// Variant measuring plain distance `|x - t|`.
    pub fn single_target(values: &[i64], t: i64) -> Self {
        Self::build(values, t, Anchors::Single)
    }

    fn build(values: &[i64], t: i64, anchors: Anchors) -> Self {
        let mut p = values.to_vec();
        p.sort_unstable();
        let mut a = Vec::with_capacity(p.len() + 1);
        a.push(0i128);
        for &x in &p {
            a.push(a.last().unwrap() + x as i128);
        }
        let mut idx = Self {
            p,
            a,
            anchors,
            t,
            l0: 0,
            l1: 0,
            r0: 0,
            r1: 0,
        };
        idx.update_target(t);
        idx
    }

    pub fn update_target(&mut self, t: i64) {
        self.t = t;
        let (lo, hi) = self.anchor_values();
        self.l0 = self.p.partition_point(|&x| x < lo);
        self.l1 = self.p.partition_point(|&x| x <= lo);
        if self.anchors == Anchors::Double {
            self.r0 = self.p.partition_point(|&x| x < hi);
            self.r1 = self.p.partition_point(|&x| x <= hi);
        } else {
            self.r0 = self.l1;
            self.r1 = self.l1;
        }
    }

    fn anchor_values(&self) -> (i64, i64) {
        match self.anchors {
            Anchors::Double => (self.t - 1, self.t + 1),
            Anchors::Single => (self.t, self.t),
        }
    }

    pub fn target(&self) -> i64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Values at distance 0.
    pub fn zero_count(&self) -> usize {
        (self.l1 - self.l0) + (self.r1 - self.r0)
    }

    /// Values equal to `t` in double mode (distance 1); always 0 in single mode.
    pub fn on_target_count(&self) -> usize {
        self.r0 - self.l1
    }

    fn runs(&self) -> (LeftRun<'_>, RightRun<'_>) {
        let (lo, hi) = self.anchor_values();
        (
            LeftRun {
                idx: self,
                anchor: lo,
            },
            RightRun {
                idx: self,
                anchor: hi,
            },
        )
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.p.len() {
            Err(Error::OutOfRange {
                k,
                size: self.p.len(),
            })
        } else {
            Ok(())
        }
    }

    /// `k`-th smallest distance, 1-indexed; `k = 0` gives 0.
    pub fn kth_distance(&self, k: usize) -> Result<i64> {
        self.check(k)?;
        let z = self.zero_count();
        let m = self.on_target_count();
        if k <= z {
            return Ok(0);
        }
        if k <= z + m {
            return Ok(1);
        }
        let (left, right) = self.runs();
        Ok(joint_kth_distance(&left, &right, k - z - m)?.0)
    }

    /// Sum of the `k` smallest distances.
    pub fn sum_k_distances(&self, k: usize) -> Result<i128> {
        self.check(k)?;
        let z = self.zero_count();
        let m = self.on_target_count();
        if k <= z {
            return Ok(0);
        }
        if k <= z + m {
            return Ok((k - z) as i128);
        }
        let (left, right) = self.runs();
        Ok(m as i128 + joint_sum_smallest(&left, &right, k - z - m)?)
    }
}
