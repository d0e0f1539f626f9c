//! Fractels for derivatives, antiderivatives, and fractional integrals,
//! derived from an origin-anchored affine fractel w(x, y) = (s·x, g(x) + c·y).

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::fractel::{FMap, Fractel};
use crate::function::ScalarFunction;
use crate::interval::Interval;

/// An affine fractel whose first component fixes the origin:
/// w(x, y) = (s·x, g(x) + c·y) with s in (0, 1).
#[derive(Clone, Debug)]
pub struct AffineFractelSX {
    s: f64,
    c: f64,
    g: ScalarFunction,
}

impl AffineFractelSX {
    pub fn new(s: f64, c: f64, g: ScalarFunction) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(FractelError::NotContractive { sigma: s });
        }
        Ok(AffineFractelSX { s, c, g })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn g(&self) -> &ScalarFunction {
        &self.g
    }

    /// Whether iteration in y would contract.
    pub fn is_y_contractive(&self) -> bool {
        self.c.abs() < 1.0
    }

    pub fn to_fractel(&self) -> Fractel {
        let l = AffineMap1D::new(self.s, 0.0, self.g.domain()).expect("s > 0");
        Fractel::new(l, FMap::affine(self.c, self.g.clone()))
    }
}

/// Fractel for f' from a fractel for f: (s·x, s⁻¹ g'(x) + (c/s) y). The
/// derivative of the x-part is caller-supplied, keeping polynomial fixtures
/// exact. The output may have |c/s| >= 1, which still satisfies the defining
/// identity but rules out fixed-point iteration; check
/// [`AffineFractelSX::is_y_contractive`].
pub fn derivative_fractel(w: &AffineFractelSX, g_prime: ScalarFunction) -> AffineFractelSX {
    let s = w.s;
    let scaled = ScalarFunction::new(
        format!("({})/s", g_prime.label()),
        g_prime.domain(),
        move |x| g_prime.eval(x) / s,
    );
    AffineFractelSX {
        s,
        c: w.c / s,
        g: scaled,
    }
}

/// Fractel for x ↦ ∫₀ˣ f from a fractel for f: (s·x, s·(∫₀ˣ g) + s·c·y).
/// The antiderivative of g (vanishing at 0) is caller-supplied.
pub fn integral_fractel(w: &AffineFractelSX, g_integral: ScalarFunction) -> AffineFractelSX {
    let s = w.s;
    let scaled = ScalarFunction::new(
        format!("s*({})", g_integral.label()),
        g_integral.domain(),
        move |x| s * g_integral.eval(x),
    );
    AffineFractelSX {
        s,
        c: s * w.c,
        g: scaled,
    }
}

/// Fractel for the order-alpha fractional integral of f:
/// (s·x, s^alpha (J^alpha g)(x) + s^alpha c y), with J^alpha g supplied by
/// the caller (analytic for the polynomial fixtures).
pub fn fractional_integral_fractel(
    w: &AffineFractelSX,
    alpha: f64,
    j_alpha_g: ScalarFunction,
) -> AffineFractelSX {
    let factor = w.s.powf(alpha);
    let scaled = ScalarFunction::new(
        format!("s^{alpha}*({})", j_alpha_g.label()),
        j_alpha_g.domain(),
        move |x| factor * j_alpha_g.eval(x),
    );
    AffineFractelSX {
        s: w.s,
        c: factor * w.c,
        g: scaled,
    }
}

/// Lanczos approximation of the gamma function (g = 7, 9 terms), accurate to
/// roughly 1e-13 for the arguments used here.
pub fn gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = COEFFS[0];
        for (i, c) in COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Closed-form fractional integral of a monomial:
/// J^alpha (a x^p) = a Γ(p+1)/Γ(p+alpha+1) x^(p+alpha).
pub fn fractional_integral_of_monomial(
    a: f64,
    p: f64,
    alpha: f64,
    domain: Interval,
) -> ScalarFunction {
    let coef = a * gamma(p + 1.0) / gamma(p + alpha + 1.0);
    ScalarFunction::power(coef, p + alpha, domain)
}

/// Fallback numerical adapters for when no closed-form g', ∫g, or J^alpha g
/// is available; both carry O(h²) error.
pub mod numeric {
    use super::*;

    /// Central-difference derivative with step h.
    pub fn central_difference(f: &ScalarFunction, h: f64) -> ScalarFunction {
        let f = f.clone();
        let dom = f.domain();
        ScalarFunction::new(format!("d/dx[{}]", f.label()), dom, move |x| {
            (f.eval(x + h) - f.eval(x - h)) / (2.0 * h)
        })
    }

    /// Antiderivative x ↦ ∫₀ˣ f by composite Simpson with the given panel
    /// count per evaluation.
    pub fn simpson_antiderivative(f: &ScalarFunction, panels: usize) -> ScalarFunction {
        let f = f.clone();
        let dom = f.domain();
        let panels = panels.max(2) & !1usize; // even
        ScalarFunction::new(format!("int0x[{}]", f.label()), dom, move |x| {
            if x == 0.0 {
                return 0.0;
            }
            let h = x / panels as f64;
            let mut acc = f.eval(0.0) + f.eval(x);
            for i in 1..panels {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f.eval(i as f64 * h);
            }
            acc * h / 3.0
        })
    }
}
