//! Building new fractels from old: sums, scalings, products, fractels of
//! invertible functions, conjugation, shifts, and cartesian products. The
//! ring-style operations need witness functions because their F-formulas
//! evaluate f1 and f2 pointwise.

use std::sync::Arc;

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::fractel::{residual_on, FMap, Fractel, DEFAULT_VERIFY_GRID};
use crate::function::ScalarFunction;
use crate::interval::Interval;

/// Witnesses below this magnitude on the check grid are treated as zeros,
/// since sampling cannot certify nonvanishing.
pub const WITNESS_ZERO_THRESHOLD: f64 = 1e-14;

/// Tolerance for requiring two fractels to share the same first component.
pub const MAP_MATCH_TOL: f64 = 1e-12;

/// A fractel paired with the function it is a fractel for. Construction
/// checks the defining identity on a grid so that algebra on witnesses stays
/// well-posed.
#[derive(Clone, Debug)]
pub struct FractelWithWitness {
    w: Fractel,
    f: ScalarFunction,
}

impl FractelWithWitness {
    /// Pairs a fractel with its witness, verifying the identity at the given
    /// tolerance on the default grid.
    pub fn new(w: Fractel, f: ScalarFunction, tol: f64) -> Result<Self> {
        let max = residual_on(&w, &f, &f.domain(), DEFAULT_VERIFY_GRID)?;
        if max > tol {
            return Err(FractelError::WitnessMismatch {
                max_residual: max,
                tol,
            });
        }
        Ok(FractelWithWitness { w, f })
    }

    /// Pairs without any check; for witnesses already validated elsewhere.
    pub fn new_unchecked(w: Fractel, f: ScalarFunction) -> Self {
        FractelWithWitness { w, f }
    }

    pub fn fractel(&self) -> &Fractel {
        &self.w
    }

    pub fn witness(&self) -> &ScalarFunction {
        &self.f
    }
}

fn require_same_map(a: &AffineMap1D, b: &AffineMap1D) -> Result<()> {
    if (a.sigma() - b.sigma()).abs() > MAP_MATCH_TOL || (a.tau() - b.tau()).abs() > MAP_MATCH_TOL {
        return Err(FractelError::MapMismatch {
            sigma_a: a.sigma(),
            tau_a: a.tau(),
            sigma_b: b.sigma(),
            tau_b: b.tau(),
        });
    }
    Ok(())
}

fn common_domain(a: &ScalarFunction, b: &ScalarFunction) -> Result<Interval> {
    a.domain()
        .intersect(&b.domain())
        .ok_or(FractelError::EmptyOverlap {
            lo_a: a.domain().lo(),
            hi_a: a.domain().hi(),
            lo_b: b.domain().lo(),
            hi_b: b.domain().hi(),
        })
}

/// Fractel for f1 + f2 from fractels of f1 and f2 sharing the same l:
/// F3(x, y) = F1(x, y - f2(x)) + F2(x, y - f1(x)). Affine-in-y inputs stay
/// affine-in-y.
pub fn sum_fractel(a: &FractelWithWitness, b: &FractelWithWitness) -> Result<FractelWithWitness> {
    require_same_map(a.w.l(), b.w.l())?;
    let dom = common_domain(&a.f, &b.f)?;
    let l = AffineMap1D::new(a.w.l().sigma(), a.w.l().tau(), dom)?;
    let f1 = a.f.clone();
    let f2 = b.f.clone();
    let f_map = match (a.w.f_map(), b.w.f_map()) {
        (FMap::AffineInY { s: s1, lambda: g1 }, FMap::AffineInY { s: s2, lambda: g2 }) => {
            // s1(y - f2) + g1 + s2(y - f1) + g2 = (s1+s2) y + (g1 + g2 - s1 f2 - s2 f1)
            let (s1, s2) = (*s1, *s2);
            let (g1, g2) = (g1.clone(), g2.clone());
            let (f1, f2) = (f1.clone(), f2.clone());
            let lambda = ScalarFunction::new(
                format!("{}+{}", g1.label(), g2.label()),
                dom,
                move |x| g1.eval(x) + g2.eval(x) - s1 * f2.eval(x) - s2 * f1.eval(x),
            );
            FMap::affine(s1 + s2, lambda)
        }
        _ => {
            let fm1 = a.w.f_map().clone();
            let fm2 = b.w.f_map().clone();
            FMap::general(move |x, y| {
                fm1.eval(x, y - f2.eval(x)) + fm2.eval(x, y - f1.eval(x))
            })
        }
    };
    let wa = a.f.clone();
    let wb = b.f.clone();
    let witness = ScalarFunction::new(
        format!("{}+{}", wa.label(), wb.label()),
        dom,
        move |x| wa.eval(x) + wb.eval(x),
    );
    Ok(FractelWithWitness {
        w: Fractel::new(l, f_map),
        f: witness,
    })
}

/// Composition of two fractels for the same function; the witness carries
/// over by semigroup closure.
pub fn compose_with_witness(
    a: &FractelWithWitness,
    b: &FractelWithWitness,
) -> Result<FractelWithWitness> {
    let w = crate::fractel::compose_fractels(a.fractel(), b.fractel())?;
    Ok(FractelWithWitness {
        w,
        f: a.f.clone(),
    })
}

/// Fractel for c * f1: F4(x, y) = c F1(x, y / c).
pub fn scale_fractel(a: &FractelWithWitness, c: f64) -> Result<FractelWithWitness> {
    if c == 0.0 || !c.is_finite() {
        return Err(FractelError::ZeroScalar);
    }
    let f_map = match a.w.f_map() {
        FMap::AffineInY { s, lambda } => {
            let (s, c_) = (*s, c);
            let lambda = lambda.clone();
            let scaled = ScalarFunction::new(
                format!("{c}*{}", lambda.label()),
                lambda.domain(),
                move |x| c_ * lambda.eval(x),
            );
            FMap::affine(s, scaled)
        }
        FMap::General(f) => {
            let f = Arc::clone(f);
            FMap::general(move |x, y| c * f(x, y / c))
        }
    };
    let base = a.f.clone();
    let witness = ScalarFunction::new(
        format!("{c}*{}", base.label()),
        base.domain(),
        move |x| c * base.eval(x),
    );
    Ok(FractelWithWitness {
        w: Fractel::new(*a.w.l(), f_map),
        f: witness,
    })
}

/// Fractel for f1 * f2: F5(x, y) = F1(x, y/f2(x)) * F2(x, y/f1(x)). Rejects
/// witnesses that vanish anywhere on the check grid of the common domain.
pub fn product_fractel(
    a: &FractelWithWitness,
    b: &FractelWithWitness,
) -> Result<FractelWithWitness> {
    require_same_map(a.w.l(), b.w.l())?;
    let dom = common_domain(&a.f, &b.f)?;
    for i in 0..DEFAULT_VERIFY_GRID {
        let x = dom.grid_point(i, DEFAULT_VERIFY_GRID);
        for f in [&a.f, &b.f] {
            if f.eval(x).abs() < WITNESS_ZERO_THRESHOLD {
                return Err(FractelError::ZeroWitness {
                    x,
                    threshold: WITNESS_ZERO_THRESHOLD,
                });
            }
        }
    }
    let l = AffineMap1D::new(a.w.l().sigma(), a.w.l().tau(), dom)?;
    let fm1 = a.w.f_map().clone();
    let fm2 = b.w.f_map().clone();
    let (f1, f2) = (a.f.clone(), b.f.clone());
    let f_map = {
        let (f1, f2) = (f1.clone(), f2.clone());
        FMap::general(move |x, y| fm1.eval(x, y / f2.eval(x)) * fm2.eval(x, y / f1.eval(x)))
    };
    let witness = ScalarFunction::new(
        format!("{}*{}", f1.label(), f2.label()),
        dom,
        move |x| f1.eval(x) * f2.eval(x),
    );
    Ok(FractelWithWitness {
        w: Fractel::new(l, f_map),
        f: witness,
    })
}

/// Fractel (l(x), f ∘ l ∘ f⁻¹(y)) for an invertible f; the caller supplies
/// the inverse evaluator.
pub fn bijective_fractel(
    f: &ScalarFunction,
    f_inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    l: AffineMap1D,
) -> Fractel {
    let f = f.clone();
    let f_map = FMap::general(move |_x, y| f.eval(l.apply(f_inverse(y))));
    Fractel::new(l, f_map)
}

/// Conjugation T ∘ w ∘ T⁻¹ for T(x, y) = (t1(x), t2(x, y)). `t2_inverse`
/// must satisfy t2(t1⁻¹(x), t2_inverse(x, y)) = y; the result is a fractel
/// for x ↦ t2(t1⁻¹(x), f(t1⁻¹(x))). Rejects maps whose conjugated first
/// component stops contracting.
pub fn conjugate_fractel(
    w: &Fractel,
    t1: AffineMap1D,
    t2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    t2_inverse: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<Fractel> {
    // t1 ∘ l ∘ t1⁻¹ keeps sigma and moves tau
    let sigma = w.l().sigma();
    if sigma.abs() >= 1.0 {
        return Err(FractelError::NotContractive { sigma });
    }
    let new_tau = t1.sigma() * w.l().tau() + t1.tau() * (1.0 - sigma);
    let new_domain = t1.image_of(&w.l().domain());
    let new_l = AffineMap1D::new(sigma, new_tau, new_domain)?;
    let inner_l = *w.l();
    let inner_f = w.f_map().clone();
    let f_map = FMap::general(move |x, y| {
        let pre_x = t1.apply_inverse(x);
        t2(
            inner_l.apply(pre_x),
            inner_f.eval(pre_x, t2_inverse(x, y)),
        )
    });
    Ok(Fractel::new(new_l, f_map))
}

/// Affine reparameterization: a fractel for f(a·x + b) from a fractel for f,
/// realized as conjugation with t1(x) = (x - b)/a and t2(x, y) = y.
pub fn reparameterized_fractel(w: &Fractel, a: f64, b: f64) -> Result<Fractel> {
    let dom = w.l().domain();
    let t1 = AffineMap1D::new(1.0 / a, -b / a, dom)?;
    conjugate_fractel(w, t1, |_x, y| y, |_x, y| y)
}

/// Shift construction: given a fractel for f + g (typically from
/// [`bijective_fractel`] when f + g is invertible) and g itself, produces a
/// fractel for f via conjugation with T(x, y) = (x, y - g(x)).
pub fn shift_fractel(w_sum: &Fractel, g: &ScalarFunction) -> Result<Fractel> {
    let t1 = AffineMap1D::identity(w_sum.l().domain());
    let g1 = g.clone();
    let g2 = g.clone();
    conjugate_fractel(
        w_sum,
        t1,
        move |x, y| y - g1.eval(x),
        move |x, y| g2.eval(x) + y,
    )
}

/// A vector-valued fractel: per-component maps over a common x variable, or
/// a formal cartesian product of independent components.
#[derive(Clone, Debug)]
pub struct VectorFractel {
    components: Vec<Fractel>,
    shared_l: bool,
}

impl VectorFractel {
    pub fn from_components(components: Vec<Fractel>, shared_l: bool) -> Result<Self> {
        if shared_l {
            if let Some(first) = components.first() {
                for c in &components[1..] {
                    require_same_map(first.l(), c.l())?;
                }
            }
        }
        Ok(VectorFractel {
            components,
            shared_l,
        })
    }

    pub fn components(&self) -> &[Fractel] {
        &self.components
    }

    pub fn shared_l(&self) -> bool {
        self.shared_l
    }

    /// Per-component y-slopes when every component is affine in y with zero
    /// offset at the probe point; the diagonal matrix action of the vector
    /// fractel.
    pub fn diagonal_action(&self) -> Option<Vec<f64>> {
        self.components
            .iter()
            .map(|c| c.f_map().y_slope())
            .collect()
    }

    /// Componentwise residual check against witness functions, on a grid.
    /// With a shared l the identity is (f1 x f2)(l(x)) = (F1(x, f1(x)), ...);
    /// without it, each component is checked over its own domain.
    pub fn max_componentwise_residual(
        &self,
        witnesses: &[ScalarFunction],
        grid: usize,
    ) -> Result<f64> {
        if witnesses.len() != self.components.len() {
            return Err(FractelError::DimensionMismatch {
                rows_a: self.components.len(),
                cols_a: 1,
                rows_b: witnesses.len(),
                cols_b: 1,
            });
        }
        let mut worst = 0.0f64;
        for (c, f) in self.components.iter().zip(witnesses) {
            let r = residual_on(c, f, &f.domain(), grid)?;
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

/// Cartesian product of two fractels. With `shared_l` the maps must agree
/// and the result acts on x ↦ (f1(x), f2(x)); otherwise the product is the
/// formal pair of independent components.
pub fn cartesian_fractel(a: &Fractel, b: &Fractel, shared_l: bool) -> Result<VectorFractel> {
    VectorFractel::from_components(vec![a.clone(), b.clone()], shared_l)
}

/// The compatibility condition under which (l1, F2) is a fractel for
/// f2 ∘ f1: f1(l1(x)) must equal l2(x). Checked on a grid.
pub fn composition_condition_holds(
    f1: &ScalarFunction,
    l1: &AffineMap1D,
    l2: &AffineMap1D,
    grid: usize,
    tol: f64,
) -> bool {
    (0..grid).all(|i| {
        let x = f1.domain().grid_point(i, grid.max(2));
        (f1.eval(l1.apply(x)) - l2.apply(x)).abs() <= tol
    })
}
