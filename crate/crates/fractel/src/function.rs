use std::fmt;
use std::sync::Arc;

use crate::error::{FractelError, Result};
use crate::interval::Interval;

/// A real-valued function of one real variable with a declared verification
/// interval. The evaluator itself may be total; the interval states where the
/// function is meant to be used.
#[derive(Clone)]
pub struct ScalarFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Interval,
    label: String,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(
        label: impl Into<String>,
        domain: Interval,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFunction {
            eval: Arc::new(eval),
            domain,
            label: label.into(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Evaluation that rejects points outside the declared interval and
    /// non-finite results.
    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(FractelError::DomainEscape {
                x,
                image: x,
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            });
        }
        let y = self.eval(x);
        if !y.is_finite() {
            return Err(FractelError::NonFinite { x });
        }
        Ok(y)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_domain(&self, domain: Interval) -> Self {
        ScalarFunction {
            eval: Arc::clone(&self.eval),
            domain,
            label: self.label.clone(),
        }
    }

    /// Constant function.
    pub fn constant(c: f64, domain: Interval) -> Self {
        ScalarFunction::new(format!("{c}"), domain, move |_| c)
    }

    pub fn zero(domain: Interval) -> Self {
        ScalarFunction::constant(0.0, domain)
    }

    /// Polynomial with the given monomial coefficients (c0 + c1 x + ...),
    /// evaluated by Horner's rule.
    pub fn poly(coeffs: &[f64], domain: Interval) -> Self {
        let c: Vec<f64> = coeffs.to_vec();
        let label = format!("poly{c:?}");
        ScalarFunction::new(label, domain, move |x| horner(&c, x))
    }

    /// a * x^p. Integer exponents use exact repeated multiplication.
    pub fn power(a: f64, p: f64, domain: Interval) -> Self {
        let label = format!("{a}*x^{p}");
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let e = p as i32;
            ScalarFunction::new(label, domain, move |x| a * x.powi(e))
        } else {
            ScalarFunction::new(label, domain, move |x| a * x.powf(p))
        }
    }

    pub fn sqrt(domain: Interval) -> Self {
        ScalarFunction::new("sqrt", domain, f64::sqrt)
    }
}

/// Horner evaluation of a coefficient slice (lowest degree first).
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
