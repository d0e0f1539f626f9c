use crate::error::{FractelError, Result};

/// Tolerance used for endpoint comparisons on closed intervals.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// A nondegenerate closed interval [lo, hi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(FractelError::DegenerateInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The unit interval [0, 1].
    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Containment with [`ENDPOINT_TOL`] slack on the endpoints.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - ENDPOINT_TOL && x <= self.hi + ENDPOINT_TOL
    }

    /// Interval containment, again with endpoint slack.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        Interval::new(lo, hi).ok()
    }

    /// The i-th of `n` equispaced sample points, endpoints included.
    pub fn grid_point(&self, i: usize, n: usize) -> f64 {
        debug_assert!(n >= 2 && i < n);
        self.lo + (self.hi - self.lo) * (i as f64) / ((n - 1) as f64)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}
