use crate::error::{FractelError, Result};
use crate::interval::Interval;

/// An injective affine self-map of the real line, l(x) = sigma*x + tau,
/// carrying the interval it acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap1D {
    sigma: f64,
    tau: f64,
    domain: Interval,
}

impl AffineMap1D {
    pub fn new(sigma: f64, tau: f64, domain: Interval) -> Result<Self> {
        if sigma == 0.0 || !sigma.is_finite() || !tau.is_finite() {
            return Err(FractelError::ZeroSlope);
        }
        Ok(AffineMap1D { sigma, tau, domain })
    }

    pub fn identity(domain: Interval) -> Self {
        AffineMap1D {
            sigma: 1.0,
            tau: 0.0,
            domain,
        }
    }

    /// l(x) = (x + tau) / 2, the midpoint-style contraction anchored at tau.
    pub fn halving(tau: f64, domain: Interval) -> Self {
        AffineMap1D {
            sigma: 0.5,
            tau: 0.5 * tau,
            domain,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.sigma * x + self.tau
    }

    pub fn apply_inverse(&self, y: f64) -> f64 {
        (y - self.tau) / self.sigma
    }

    /// Image of the domain; endpoints swap when sigma < 0.
    pub fn image(&self) -> Interval {
        let a = self.apply(self.domain.lo());
        let b = self.apply(self.domain.hi());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        // sigma != 0 keeps the image nondegenerate
        Interval::new(lo, hi).expect("nondegenerate image")
    }

    /// Image of an arbitrary interval under the map.
    pub fn image_of(&self, iv: &Interval) -> Interval {
        let a = self.apply(iv.lo());
        let b = self.apply(iv.hi());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(lo, hi).expect("nondegenerate image")
    }

    /// The composition self ∘ other, i.e. x ↦ self(other(x)), on other's domain.
    pub fn compose(&self, other: &AffineMap1D) -> AffineMap1D {
        AffineMap1D {
            sigma: self.sigma * other.sigma,
            tau: self.sigma * other.tau + self.tau,
            domain: other.domain,
        }
    }

    /// Fixed point tau / (1 - sigma); None when sigma == 1.
    pub fn fixed_point(&self) -> Option<f64> {
        if self.sigma == 1.0 {
            None
        } else {
            Some(self.tau / (1.0 - self.sigma))
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma == 1.0 && self.tau == 0.0
    }

    pub fn is_contractive(&self) -> bool {
        self.sigma.abs() < 1.0
    }
}
