//! Fractels: pairs w(x, y) = (l(x), F(x, y)) that map the graph of a function
//! into itself, together with verification, composition, and the associated
//! function-space operator.

use std::fmt;
use std::sync::Arc;

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::exec;
use crate::function::ScalarFunction;
use crate::interval::Interval;

/// Default number of verification sample points.
pub const DEFAULT_VERIFY_GRID: usize = 1000;
/// Default verification tolerance.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-10;

/// The second component F of a fractel. Maps that are affine in y keep their
/// (s, lambda) structure so downstream constructions can work symbolically;
/// everything else goes through a general evaluator.
#[derive(Clone)]
pub enum FMap {
    /// F(x, y) = s * y + lambda(x).
    AffineInY { s: f64, lambda: ScalarFunction },
    /// Arbitrary F(x, y).
    General(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for FMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FMap::AffineInY { s, lambda } => f
                .debug_struct("AffineInY")
                .field("s", s)
                .field("lambda", &lambda.label())
                .finish(),
            FMap::General(_) => f.write_str("General(..)"),
        }
    }
}

impl FMap {
    pub fn affine(s: f64, lambda: ScalarFunction) -> Self {
        FMap::AffineInY { s, lambda }
    }

    pub fn general(eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FMap::General(Arc::new(eval))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            FMap::AffineInY { s, lambda } => s * y + lambda.eval(x),
            FMap::General(f) => f(x, y),
        }
    }

    /// The y-coefficient when the map is affine in y.
    pub fn y_slope(&self) -> Option<f64> {
        match self {
            FMap::AffineInY { s, .. } => Some(*s),
            FMap::General(_) => None,
        }
    }

    pub fn lambda(&self) -> Option<&ScalarFunction> {
        match self {
            FMap::AffineInY { lambda, .. } => Some(lambda),
            FMap::General(_) => None,
        }
    }
}

/// A fractel w(x, y) = (l(x), F(x, y)).
#[derive(Clone, Debug)]
pub struct Fractel {
    l: AffineMap1D,
    f_map: FMap,
    trivial: bool,
}

impl Fractel {
    pub fn new(l: AffineMap1D, f_map: FMap) -> Self {
        Fractel {
            l,
            f_map,
            trivial: false,
        }
    }

    /// The identity on X x Y, a fractel for every function.
    pub fn trivial(domain: Interval) -> Self {
        Fractel {
            l: AffineMap1D::identity(domain),
            f_map: FMap::affine(1.0, ScalarFunction::zero(domain)),
            trivial: true,
        }
    }

    /// Affine-in-y fractel (l(x), s*y + lambda(x)).
    pub fn affine(l: AffineMap1D, s: f64, lambda: ScalarFunction) -> Self {
        Fractel::new(l, FMap::affine(s, lambda))
    }

    pub fn l(&self) -> &AffineMap1D {
        &self.l
    }

    pub fn f_map(&self) -> &FMap {
        &self.f_map
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Apply the map to a graph point.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.l.apply(x), self.f_map.eval(x, y))
    }
}

/// Outcome of sampling the defining identity F(x, f(x)) = f(l(x)).
#[derive(Clone, Copy, Debug)]
pub struct VerifyReport {
    pub max_residual: f64,
    pub pass: bool,
    pub grid: usize,
    pub tol: f64,
}

/// Checks the fractel identity for `w` against `f` on `grid` equispaced
/// points of f's interval. Requires l to keep that interval inside itself.
pub fn verify_fractel(
    w: &Fractel,
    f: &ScalarFunction,
    grid: usize,
    tol: f64,
) -> Result<VerifyReport> {
    let dom = f.domain();
    let img = w.l().image_of(&dom);
    if !dom.contains_interval(&img) {
        let (x, image) = if !dom.contains(img.lo()) {
            let x_at = if w.l().sigma() > 0.0 {
                dom.lo()
            } else {
                dom.hi()
            };
            (x_at, img.lo())
        } else {
            let x_at = if w.l().sigma() > 0.0 {
                dom.hi()
            } else {
                dom.lo()
            };
            (x_at, img.hi())
        };
        return Err(FractelError::DomainEscape {
            x,
            image,
            lo: dom.lo(),
            hi: dom.hi(),
        });
    }
    let max_residual = residual_on(w, f, &dom, grid)?;
    Ok(VerifyReport {
        max_residual,
        pass: max_residual <= tol,
        grid,
        tol,
    })
}

/// Maximum of |F(x, f(x)) - f(l(x))| over `grid` equispaced points of `iv`,
/// with no domain precondition: the caller asserts that f evaluates on both
/// iv and l(iv). Used where a fractel's natural interval is not l-invariant
/// (e.g. products whose witnesses must stay away from zero).
pub fn residual_on(w: &Fractel, f: &ScalarFunction, iv: &Interval, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(FractelError::InvalidGrid { grid });
    }
    let residuals = exec::try_map_vec(grid, |i| {
        let x = iv.grid_point(i, grid);
        let fx = f.eval(x);
        let lhs = w.f_map().eval(x, fx);
        let rhs = f.eval(w.l().apply(x));
        if !fx.is_finite() || !lhs.is_finite() || !rhs.is_finite() {
            return Err(FractelError::NonFinite { x });
        }
        Ok((lhs - rhs).abs())
    })?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// True iff l maps `dom` strictly inside itself and |sigma| < 1, the two
/// conditions a nontrivial fractel's first component must satisfy.
pub fn check_nontrivial(w: &Fractel, dom: &Interval) -> bool {
    let img = w.l().image_of(dom);
    dom.contains_interval(&img) && w.l().is_contractive()
}

/// Composition w1 ∘ w2 = (l1 ∘ l2, F1(l2(x), F2(x, y))). When both parts are
/// affine in y the result keeps the symbolic form s1*s2, lambda1 ∘ l2 + s1*lambda2.
pub fn compose_fractels(w1: &Fractel, w2: &Fractel) -> Result<Fractel> {
    let l2_image = w2.l().image();
    let l1_dom = w1.l().domain();
    if !l1_dom.contains_interval(&l2_image) {
        return Err(FractelError::DomainEscape {
            x: w2.l().domain().lo(),
            image: l2_image.lo(),
            lo: l1_dom.lo(),
            hi: l1_dom.hi(),
        });
    }
    let l = w1.l().compose(w2.l());
    let f_map = match (w1.f_map(), w2.f_map()) {
        (
            FMap::AffineInY { s: s1, lambda: g1 },
            FMap::AffineInY { s: s2, lambda: g2 },
        ) => {
            let (s1, s2) = (*s1, *s2);
            let g1 = g1.clone();
            let g2 = g2.clone();
            let l2 = *w2.l();
            let label = format!("{} ∘ l2 + {}*{}", g1.label(), s1, g2.label());
            let lambda = ScalarFunction::new(label, l.domain(), move |x| {
                g1.eval(l2.apply(x)) + s1 * g2.eval(x)
            });
            FMap::affine(s1 * s2, lambda)
        }
        _ => {
            let f1 = w1.f_map().clone();
            let f2 = w2.f_map().clone();
            let l2 = *w2.l();
            FMap::general(move |x, y| f1.eval(l2.apply(x), f2.eval(x, y)))
        }
    };
    Ok(Fractel {
        l,
        f_map,
        trivial: w1.is_trivial() && w2.is_trivial(),
    })
}

/// The function-space operator of a single fractel:
/// (Φ_w g)(x) = F(l⁻¹(x), g(l⁻¹(x))) on l(dom g).
pub fn rb_apply(w: &Fractel, g: &ScalarFunction) -> ScalarFunction {
    let l = *w.l();
    let f_map = w.f_map().clone();
    let g = g.clone();
    let domain = l.image_of(&g.domain());
    let label = format!("Φ[{}]", g.label());
    ScalarFunction::new(label, domain, move |x| {
        let pre = l.apply_inverse(x);
        f_map.eval(pre, g.eval(pre))
    })
}
