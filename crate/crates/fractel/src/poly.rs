//! Exact affine fractels for vectors of polynomial basis functions: the
//! binomial substitution matrix M_l, conjugated basis matrices T M_l T⁻¹,
//! semigroup membership of affine maps, fixed-point/eigenvector analysis,
//! and the vector-valued G construction.

use num_traits::{One, Signed, Zero};

use crate::error::{FractelError, Result};
use crate::function::ScalarFunction;
use crate::interval::Interval;
use crate::rational::{
    big_binomial, rat, rational_pow, rational_to_f64, Rational, RationalMatrix,
};

/// Matrix of the substitution x ↦ sigma*x + tau acting on the monomial vector
/// (1, x, ..., x^k): entry (s, t) = C(s, t) tau^(s-t) sigma^t for t <= s,
/// zero above the diagonal.
pub fn binomial_matrix(sigma: &Rational, tau: &Rational, k: usize) -> Result<RationalMatrix> {
    if sigma.is_zero() {
        return Err(FractelError::ZeroSlope);
    }
    let n = k + 1;
    let mut m = RationalMatrix::zeros(n, n);
    for s in 0..n {
        for t in 0..=s {
            let c = Rational::from_integer(big_binomial(s, t));
            let v = c * rational_pow(tau, (s - t) as u32) * rational_pow(sigma, t as u32);
            m.set(s, t, v);
        }
    }
    Ok(m)
}

/// Coefficients of p(sigma*x + tau) given the coefficients of p, computed by
/// Horner's rule in the polynomial ring. Independent of [`binomial_matrix`],
/// which makes it usable as an oracle against it.
pub fn poly_compose_affine(coeffs: &[Rational], sigma: &Rational, tau: &Rational) -> Vec<Rational> {
    let mut acc: Vec<Rational> = vec![Rational::zero()];
    for c in coeffs.iter().rev() {
        // acc <- acc * (sigma x + tau) + c
        let mut next = vec![Rational::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i] += a * tau;
            next[i + 1] += a * sigma;
        }
        next[0] += c;
        acc = next;
    }
    acc.truncate(coeffs.len().max(1));
    while acc.len() < coeffs.len() {
        acc.push(Rational::zero());
    }
    acc
}

/// A fractel (l(x), M y) for a vector of basis polynomials f(x) = T (1, x, ..., x^k)ᵀ,
/// with M = T M_l T⁻¹ computed exactly.
#[derive(Clone, Debug)]
pub struct BasisFractel {
    sigma: Rational,
    tau: Rational,
    t: RationalMatrix,
    m: RationalMatrix,
}

impl BasisFractel {
    pub fn sigma(&self) -> &Rational {
        &self.sigma
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn basis_change(&self) -> &RationalMatrix {
        &self.t
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.m
    }

    /// Checks f(l(x)) = M f(x) as an exact polynomial identity, composing
    /// each basis row with l by ring arithmetic (not via M_l) and comparing
    /// coefficient vectors with M·T.
    pub fn verify_polynomial_identity(&self) -> bool {
        let mt = match self.m.mul(&self.t) {
            Ok(v) => v,
            Err(_) => return false,
        };
        for i in 0..self.t.rows() {
            let composed = poly_compose_affine(self.t.row(i), &self.sigma, &self.tau);
            if composed != mt.row(i) {
                return false;
            }
        }
        true
    }

    pub fn analysis(&self) -> Result<FixedPointReport> {
        fixed_point_analysis(&self.sigma, &self.tau, &self.m, &self.t)
    }
}

/// Builds the basis fractel for l(x) = sigma*x + tau and basis-change T
/// (row i = monomial coefficients of the i-th basis polynomial).
pub fn basis_fractel(t: &RationalMatrix, sigma: &Rational, tau: &Rational) -> Result<BasisFractel> {
    let k = t.cols().saturating_sub(1);
    let ml = binomial_matrix(sigma, tau, k)?;
    let t_inv = t.inverse().ok_or(FractelError::SingularT)?;
    let m = t.mul(&ml)?.mul(&t_inv)?;
    Ok(BasisFractel {
        sigma: sigma.clone(),
        tau: tau.clone(),
        t: t.clone(),
        m,
    })
}

/// The polynomial bases used by the command-line `polybasis` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedBasis {
    /// (1, x, x², x³)
    Monomial,
    /// (1 - x, x)
    Hat,
    /// (1, x, 2x² - 1, 4x³ - 3x)
    Chebyshev3,
    /// The four cubic pieces of the B-spline, shifted to [0, 1].
    Bspline3,
}

impl NamedBasis {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "monomial" => Some(NamedBasis::Monomial),
            "hat" => Some(NamedBasis::Hat),
            "chebyshev3" => Some(NamedBasis::Chebyshev3),
            "bspline3" => Some(NamedBasis::Bspline3),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedBasis::Monomial => "monomial",
            NamedBasis::Hat => "hat",
            NamedBasis::Chebyshev3 => "chebyshev3",
            NamedBasis::Bspline3 => "bspline3",
        }
    }

    /// Basis-change matrix T with f(x) = T (1, x, ..., x^k)ᵀ.
    pub fn basis_change(&self) -> RationalMatrix {
        match self {
            NamedBasis::Monomial => RationalMatrix::identity(4),
            NamedBasis::Hat => {
                RationalMatrix::from_i64_rows(&[&[(1, 1), (-1, 1)], &[(0, 1), (1, 1)]])
            }
            NamedBasis::Chebyshev3 => RationalMatrix::from_i64_rows(&[
                &[(1, 1), (0, 1), (0, 1), (0, 1)],
                &[(0, 1), (1, 1), (0, 1), (0, 1)],
                &[(-1, 1), (0, 1), (2, 1), (0, 1)],
                &[(0, 1), (-3, 1), (0, 1), (4, 1)],
            ]),
            NamedBasis::Bspline3 => RationalMatrix::from_i64_rows(&[
                &[(0, 1), (0, 1), (0, 1), (1, 6)],
                &[(1, 6), (3, 6), (3, 6), (-3, 6)],
                &[(4, 6), (0, 1), (-1, 1), (3, 6)],
                &[(1, 6), (-3, 6), (3, 6), (-1, 6)],
            ]),
        }
    }
}

/// Function spaces whose affine-substitution semigroup can be queried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Polynomials of bounded degree: every affine self-map of [0, 1] belongs.
    PolyK,
    /// Continuous piecewise-linear functions with a single breakpoint at 1/2.
    PwLinearHalf,
}

/// Which of the three admission conditions a piecewise-linear member satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwCondition {
    /// l([0,1]) ⊆ [0, 1/2]
    LowerHalf,
    /// l([0,1]) ⊆ [1/2, 1]
    UpperHalf,
    /// l(1/2) = 1/2
    FixesBreakpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub condition: Option<PwCondition>,
}

/// Decides whether l(x) = sigma*x + tau belongs to the substitution semigroup
/// of the given space. Errors with NotInS when l does not even keep [0, 1]
/// inside itself.
pub fn semigroup_member(sigma: &Rational, tau: &Rational, space: SpaceKind) -> Result<Membership> {
    if sigma.is_zero() {
        return Err(FractelError::ZeroSlope);
    }
    let at0 = tau.clone();
    let at1 = sigma + tau;
    let (lo, hi) = if at0 <= at1 {
        (at0, at1)
    } else {
        (at1, at0)
    };
    if lo < Rational::zero() || hi > Rational::one() {
        return Err(FractelError::NotInS {
            lo: rational_to_f64(&lo),
            hi: rational_to_f64(&hi),
        });
    }
    match space {
        SpaceKind::PolyK => Ok(Membership {
            member: true,
            condition: None,
        }),
        SpaceKind::PwLinearHalf => {
            let half = rat(1, 2);
            let condition = if hi <= half {
                Some(PwCondition::LowerHalf)
            } else if lo >= half {
                Some(PwCondition::UpperHalf)
            } else if sigma * &half + tau == half {
                Some(PwCondition::FixesBreakpoint)
            } else {
                None
            };
            Ok(Membership {
                member: condition.is_some(),
                condition,
            })
        }
    }
}

/// Fixed-point and eigenvalue-1 structure of a linear fractel (l, M) for a
/// vector of polynomials with coefficient rows `basis_coeffs`.
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    /// A fixed point of l in [0, 1] (the unique one when sigma != 1).
    pub x_star: Rational,
    /// True when sigma = 1, tau = 0 so that every point is fixed.
    pub every_point_fixed: bool,
    /// ‖M f(x*) - f(x*)‖∞, exact.
    pub residual: Rational,
    /// Exact basis of the left eigenspace of M for eigenvalue 1, if nonempty.
    pub eig1_left: Vec<Vec<Rational>>,
    pub eig1_multiplicity: usize,
    /// Whether u0(x) = cᵀ f(x) is constant on a 101-point grid within 1e-10,
    /// for c the first eigenvalue-1 left eigenvector. None when there is no
    /// such eigenvector.
    pub u0_constant: Option<bool>,
}

/// Evaluates the basis vector with coefficient rows `coeffs` at a rational
/// point, exactly.
pub fn basis_eval(coeffs: &RationalMatrix, x: &Rational) -> Vec<Rational> {
    (0..coeffs.rows())
        .map(|i| {
            coeffs
                .row(i)
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * x + c)
        })
        .collect()
}

pub fn fixed_point_analysis(
    sigma: &Rational,
    tau: &Rational,
    m: &RationalMatrix,
    basis_coeffs: &RationalMatrix,
) -> Result<FixedPointReport> {
    let one = Rational::one();
    let (x_star, every_point_fixed) = if sigma == &one {
        // sigma = 1 admits a fixed point only as the identity (tau = 0,
        // every point fixed); a pure translation has none in [0, 1]
        if !tau.is_zero() {
            return Err(FractelError::NotInS {
                lo: rational_to_f64(tau),
                hi: rational_to_f64(&(&one + tau)),
            });
        }
        (Rational::zero(), true)
    } else {
        (tau / (&one - sigma), false)
    };
    let fx = basis_eval(basis_coeffs, &x_star);
    let mfx = m.mul_vec(&fx)?;
    let residual = mfx
        .iter()
        .zip(&fx)
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero);

    // left eigenvectors for eigenvalue 1: kernel of (Mᵀ - I)
    let n = m.rows();
    let mt_minus_i = m.transpose().sub(&RationalMatrix::identity(n))?;
    let eig1_left = mt_minus_i.kernel();
    let eig1_multiplicity = eig1_left.len();

    let u0_constant = eig1_left.first().map(|c| {
        let coeffs_f: Vec<Vec<f64>> = basis_coeffs.to_f64();
        let c_f: Vec<f64> = c.iter().map(rational_to_f64).collect();
        let u0 = |x: f64| -> f64 {
            coeffs_f
                .iter()
                .zip(&c_f)
                .map(|(row, ci)| ci * crate::function::horner(row, x))
                .sum()
        };
        let reference = u0(rational_to_f64(&x_star));
        (0..=100).all(|i| (u0(i as f64 / 100.0) - reference).abs() <= 1e-10)
    });

    Ok(FixedPointReport {
        x_star,
        every_point_fixed,
        residual,
        eig1_left,
        eig1_multiplicity,
        u0_constant,
    })
}

/// True iff all entries are nonnegative and every column sums to one (the
/// orientation in which partition-of-unity bases make their matrices
/// stochastic).
pub fn stochastic_check(m: &RationalMatrix) -> bool {
    m.all_nonnegative() && m.column_sums().iter().all(|s| s == &Rational::one())
}

/// G(x) = (I - M)⁻¹ (f((x + tau)/2) - M f(x)), the x-part that makes
/// w(x, y) = ((x + tau)/2, M y + (I - M) G(x)) a fractel for the vector f.
/// Fails with EigOne when M has eigenvalue 1.
pub fn vector_valued_g(
    f: &[ScalarFunction],
    m: &RationalMatrix,
    tau: f64,
    domain: Interval,
) -> Result<Vec<ScalarFunction>> {
    let n = f.len();
    if m.rows() != n || m.cols() != n {
        return Err(FractelError::DimensionMismatch {
            rows_a: m.rows(),
            cols_a: m.cols(),
            rows_b: n,
            cols_b: 1,
        });
    }
    let i_minus_m = RationalMatrix::identity(n).sub(m)?;
    let inv = i_minus_m.inverse().ok_or(FractelError::EigOne)?;
    let inv_f = inv.to_f64();
    let m_f = m.to_f64();
    let fs: Vec<ScalarFunction> = f.to_vec();
    (0..n)
        .map(|i| {
            let inv_row = inv_f[i].clone();
            let m_rows = m_f.clone();
            let fs = fs.clone();
            Ok(ScalarFunction::new(
                format!("G[{i}]"),
                domain,
                move |x| {
                    let half = 0.5 * (x + tau);
                    inv_row
                        .iter()
                        .enumerate()
                        .map(|(j, w)| {
                            let mf: f64 = m_rows[j]
                                .iter()
                                .zip(&fs)
                                .map(|(mjk, fk)| mjk * fk.eval(x))
                                .sum();
                            w * (fs[j].eval(half) - mf)
                        })
                        .sum()
                },
            ))
        })
        .collect()
}

/// First-order stand-in for [`vector_valued_g`]:
/// G(x) ≈ f(x) + ((tau - x)/2) (I - M)⁻¹ f'(mid), with the derivative vector
/// supplied at the midpoint of the domain.
pub fn vector_valued_g_linear_approx(
    f: &[ScalarFunction],
    f_prime_mid: &[f64],
    m: &RationalMatrix,
    tau: f64,
    domain: Interval,
) -> Result<Vec<ScalarFunction>> {
    let n = f.len();
    let i_minus_m = RationalMatrix::identity(n).sub(m)?;
    let inv = i_minus_m.inverse().ok_or(FractelError::EigOne)?;
    let inv_f = inv.to_f64();
    let correction: Vec<f64> = (0..n)
        .map(|i| inv_f[i].iter().zip(f_prime_mid).map(|(w, d)| w * d).sum())
        .collect();
    Ok(f.iter()
        .enumerate()
        .map(|(i, fi)| {
            let fi = fi.clone();
            let ci = correction[i];
            ScalarFunction::new(format!("G~[{i}]"), domain, move |x| {
                fi.eval(x) + 0.5 * (tau - x) * ci
            })
        })
        .collect())
}

/// Vectors suggested for higher-order scalar approximation, shipped as plain
/// fixture constructors.
pub mod vectors {
    use super::*;

    /// (u(x), u(x + h), ..., u(x + (count-1) h)); domains shrink accordingly.
    pub fn shifted_samples(u: &ScalarFunction, h: f64, count: usize) -> Vec<ScalarFunction> {
        (0..count)
            .map(|i| {
                let shift = h * i as f64;
                let u = u.clone();
                let dom = u.domain();
                let domain =
                    Interval::new(dom.lo(), (dom.hi() - shift).max(dom.lo() + 1e-9)).unwrap();
                ScalarFunction::new(
                    format!("{}(x+{shift})", u.label()),
                    domain,
                    move |x| u.eval(x + shift),
                )
            })
            .collect()
    }

    /// Polynomial interpolants alongside the function itself.
    pub fn with_interpolants(
        u: &ScalarFunction,
        interpolants: Vec<ScalarFunction>,
    ) -> Vec<ScalarFunction> {
        let mut v = interpolants;
        v.push(u.clone());
        v
    }

    /// Local basis functions alongside the function itself.
    pub fn with_basis(u: &ScalarFunction, basis: Vec<ScalarFunction>) -> Vec<ScalarFunction> {
        let mut v = basis;
        v.push(u.clone());
        v
    }

    /// (u, u').
    pub fn with_derivative(u: &ScalarFunction, u_prime: &ScalarFunction) -> Vec<ScalarFunction> {
        vec![u.clone(), u_prime.clone()]
    }
}
