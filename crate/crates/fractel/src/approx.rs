//! Constant-offset approximation of functions through their fractels: the
//! midpoint-anchored construction w(x, y) = ((x + tau)/2, sigma y + (1 -
//! sigma) G(x)), constant replacements for G, the square-root system built
//! from it, the sup-norm error bound, and relative-error profiles.

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::exec;
use crate::fractel::Fractel;
use crate::function::ScalarFunction;
use crate::ifs::LocalIFS;
use crate::interval::Interval;
use crate::textio::{IfsTextSpec, LambdaSpec, PieceSpec};

/// Default recursion depth for point evaluation of attractor functions;
/// deep enough that the contracted tail is below double precision for any
/// s <= 0.99.
pub const EVAL_DEPTH: usize = 300;

/// The offset G that makes w(x, y) = ((x + tau)/2, sigma y + (1 - sigma) G(x))
/// a fractel for f(x) = alpha (x - tau)^theta + g(x), with sigma = 2^-theta:
/// G(x) = (g((x + tau)/2) - sigma g(x)) / (1 - sigma). The power part drops
/// out of G entirely.
pub fn power_plus_g_offset(tau: f64, sigma: f64, g: &ScalarFunction) -> ScalarFunction {
    let g = g.clone();
    let dom = g.domain();
    ScalarFunction::new(format!("G[{}]", g.label()), dom, move |x| {
        (g.eval(0.5 * (x + tau)) - sigma * g.eval(x)) / (1.0 - sigma)
    })
}

/// Fractel for f(x) = alpha (x - tau)^theta + g(x) on `domain`, together
/// with that witness. Requires theta > 0 (so sigma = 2^-theta is in (0, 1))
/// and tau inside the domain, which makes l(x) = (x + tau)/2 keep the
/// domain inside itself.
pub fn power_plus_g_fractel(
    alpha: f64,
    tau: f64,
    theta: f64,
    g: &ScalarFunction,
    domain: Interval,
) -> Result<(Fractel, ScalarFunction)> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(FractelError::ContractionViolation { s: theta });
    }
    if !domain.contains(tau) {
        return Err(FractelError::DomainEscape {
            x: tau,
            image: tau,
            lo: domain.lo(),
            hi: domain.hi(),
        });
    }
    let sigma = 2f64.powf(-theta);
    let g_dom = g.with_domain(domain);
    let offset = power_plus_g_offset(tau, sigma, &g_dom);
    let lambda = ScalarFunction::new(
        format!("(1-{sigma})*{}", offset.label()),
        domain,
        {
            let offset = offset.clone();
            move |x| (1.0 - sigma) * offset.eval(x)
        },
    );
    let l = AffineMap1D::halving(tau, domain);
    let w = Fractel::affine(l, sigma, lambda);
    let g_w = g.clone();
    let witness = ScalarFunction::new(
        format!("{alpha}*(x-{tau})^{theta}+{}", g_w.label()),
        domain,
        move |x| {
            let power = if theta.fract() == 0.0 {
                (x - tau).powi(theta as i32)
            } else {
                (x - tau).powf(theta)
            };
            alpha * power + g_w.eval(x)
        },
    );
    Ok((w, witness))
}

/// The sigma = 0 degenerate piece: w(x, y) = ((x + tau)/2, f((x + tau)/2)),
/// a fractel for f itself. This is the construction that reduces the system
/// to classical interpolation.
pub fn sigma_zero_fractel(tau: f64, f: &ScalarFunction, domain: Interval) -> Result<Fractel> {
    if !domain.contains(tau) {
        return Err(FractelError::DomainEscape {
            x: tau,
            image: tau,
            lo: domain.lo(),
            hi: domain.hi(),
        });
    }
    let f = f.clone();
    let lambda = ScalarFunction::new(format!("{}∘l", f.label()), domain, move |x| {
        f.eval(0.5 * (x + tau))
    });
    Ok(Fractel::affine(
        AffineMap1D::halving(tau, domain),
        0.0,
        lambda,
    ))
}

/// Rules for replacing G by a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaRule {
    /// Average of G over the domain (composite Simpson, 2^10 panels).
    Mean,
    /// G at the midpoint.
    Midpoint,
    /// Average of the endpoint values.
    Trapezoid,
}

/// Constant approximation of G per the chosen rule.
pub fn approximate_gamma(g: &ScalarFunction, domain: Interval, rule: GammaRule) -> Result<f64> {
    let value = match rule {
        GammaRule::Midpoint => g.eval(domain.midpoint()),
        GammaRule::Trapezoid => 0.5 * (g.eval(domain.lo()) + g.eval(domain.hi())),
        GammaRule::Mean => {
            let panels = 1usize << 10;
            let h = domain.length() / panels as f64;
            let mut acc = g.eval(domain.lo()) + g.eval(domain.hi());
            for i in 1..panels {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * g.eval(domain.lo() + i as f64 * h);
            }
            acc * h / (3.0 * domain.length())
        }
    };
    if !value.is_finite() {
        return Err(FractelError::NonFinite {
            x: domain.midpoint(),
        });
    }
    Ok(value)
}

/// How the square-root system's offsets are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtMode {
    /// Keep the exact offsets; the attractor is the square root itself.
    Exact,
    Midpoint,
    Mean,
    Trapezoid,
}

impl SqrtMode {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "exact" => Some(SqrtMode::Exact),
            "midpoint" => Some(SqrtMode::Midpoint),
            "mean" => Some(SqrtMode::Mean),
            "trapezoid" => Some(SqrtMode::Trapezoid),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SqrtMode::Exact => "exact",
            SqrtMode::Midpoint => "midpoint",
            SqrtMode::Mean => "mean",
            SqrtMode::Trapezoid => "trapezoid",
        }
    }

    fn gamma_rule(&self) -> Option<GammaRule> {
        match self {
            SqrtMode::Exact => None,
            SqrtMode::Midpoint => Some(GammaRule::Midpoint),
            SqrtMode::Mean => Some(GammaRule::Mean),
            SqrtMode::Trapezoid => Some(GammaRule::Trapezoid),
        }
    }
}

/// The square-root system plus everything needed to reason about its
/// approximation error.
#[derive(Clone, Debug)]
pub struct SqrtSystem {
    pub ifs: LocalIFS,
    pub spec: IfsTextSpec,
    /// sup |lambda_exact - lambda_used| per piece (zero in exact mode).
    pub lambda_deviations: Vec<f64>,
    /// Largest |s| across pieces.
    pub s_max: f64,
    /// Constants chosen for the two approximated pieces (empty in exact mode).
    pub gammas: Vec<f64>,
}

/// Three-piece system for sqrt on [0, 1]: one exact power piece on [0, 1]
/// and two pieces on [1/2, 1] whose offsets are exact or constant-replaced
/// per `mode`. sigma2 and sigma3 must lie in [0, 1/2].
pub fn build_sqrt_ifs(sigma2: f64, sigma3: f64, mode: SqrtMode) -> Result<SqrtSystem> {
    for s in [sigma2, sigma3] {
        if !(0.0..=0.5).contains(&s) {
            return Err(FractelError::ContractionViolation { s });
        }
    }
    let upper = Interval::new(0.5, 1.0)?;
    let s1 = 0.5f64.sqrt();
    let mut pieces = vec![PieceSpec {
        sigma: 0.5,
        tau: 0.0,
        s: s1,
        lambda: LambdaSpec::Zero,
        dom_lo: 0.0,
        dom_hi: 1.0,
    }];
    let mut lambda_deviations = vec![0.0];
    let mut gammas = Vec::new();
    for (tau, sigma) in [(0.5, sigma2), (1.0, sigma3)] {
        // lambda(x) = (1 - sigma) G(x) = sqrt((x + tau)/2) - sigma sqrt(x)
        let exact = LambdaSpec::SqrtDiff { tau, sigma };
        let (lambda, deviation) = match mode.gamma_rule() {
            None => (exact, 0.0),
            Some(rule) => {
                let g_exact = power_plus_g_offset(tau, sigma, &ScalarFunction::sqrt(upper));
                let gamma = approximate_gamma(&g_exact, upper, rule)?;
                gammas.push(gamma);
                let lambda_const = (1.0 - sigma) * gamma;
                let exact_fn = exact.to_function(upper);
                let dev = sup_deviation(
                    &exact_fn,
                    &ScalarFunction::constant(lambda_const, upper),
                    upper,
                    2001,
                );
                (LambdaSpec::Const(lambda_const), dev)
            }
        };
        pieces.push(PieceSpec {
            sigma: 0.5,
            tau: 0.5 * tau,
            s: sigma,
            lambda,
            dom_lo: 0.5,
            dom_hi: 1.0,
        });
        lambda_deviations.push(deviation);
    }
    let spec = IfsTextSpec {
        base_lo: 0.0,
        base_hi: 1.0,
        pieces,
    };
    let ifs = spec.to_local_ifs()?;
    let s_max = ifs.max_s();
    Ok(SqrtSystem {
        ifs,
        spec,
        lambda_deviations,
        s_max,
        gammas,
    })
}

/// sup |a - b| over a grid.
pub fn sup_deviation(a: &ScalarFunction, b: &ScalarFunction, domain: Interval, grid: usize) -> f64 {
    exec::max_f64(grid.max(2), |i| {
        let x = domain.grid_point(i, grid.max(2));
        (a.eval(x) - b.eval(x)).abs()
    })
}

/// Sup-norm bound on the distance between the attractors of two systems that
/// share their maps and y-slopes: max_n ||lambda_n - lambda~_n||_inf / (1 - s).
pub fn error_bound(lambda_devs: &[f64], s_max: f64) -> Result<f64> {
    if !s_max.is_finite() || s_max >= 1.0 {
        return Err(FractelError::ContractionViolation { s: s_max });
    }
    Ok(lambda_devs.iter().copied().fold(0.0, f64::max) / (1.0 - s_max))
}

/// Relative error rows e(x) = approx(x)/reference(x) - 1 over a log-spaced
/// grid (points where the reference vanishes are skipped).
#[derive(Clone, Debug)]
pub struct ErrorProfile {
    pub rows: Vec<(f64, f64)>,
    pub max_abs: f64,
}

impl ErrorProfile {
    pub fn max_abs_over(&self, lo: f64, hi: f64) -> f64 {
        self.rows
            .iter()
            .filter(|(x, _)| *x >= lo && *x <= hi)
            .map(|(_, e)| e.abs())
            .fold(0.0, f64::max)
    }
}

/// Profiles the attractor of `ifs` against a reference over `grid` log-spaced
/// points in [1e-6, base.hi()], evaluating the attractor pointwise by
/// unfolding the self-referential equation.
pub fn relative_error_profile(
    ifs: &LocalIFS,
    reference: &ScalarFunction,
    grid: usize,
) -> ErrorProfile {
    let n = grid.max(2);
    let hi = ifs.base().hi();
    let lo = (ifs.base().lo().max(0.0) + 1e-6).min(hi * 0.5);
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let rows: Vec<(f64, f64)> = exec::map_vec(n, |i| {
        let x = (log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).exp();
        let r = reference.eval(x);
        if r.abs() < 1e-300 {
            return (x, f64::NAN);
        }
        let v = ifs.evaluate(x, EVAL_DEPTH);
        (x, v / r - 1.0)
    })
    .into_iter()
    .filter(|(_, e)| e.is_finite())
    .collect();
    let max_abs = rows.iter().map(|(_, e)| e.abs()).fold(0.0, f64::max);
    ErrorProfile { rows, max_abs }
}

/// Largest |attractor - reference| over an equispaced grid, by pointwise
/// evaluation.
pub fn sup_error_on_grid(
    ifs: &LocalIFS,
    reference: &ScalarFunction,
    domain: Interval,
    grid: usize,
) -> f64 {
    exec::max_f64(grid.max(2), |i| {
        let x = domain.grid_point(i, grid.max(2));
        (ifs.evaluate(x, EVAL_DEPTH) - reference.eval(x)).abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractel::verify_fractel;

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn constant_g_is_returned_verbatim() {
        // g constant: G = g for every rule and any sigma
        let g = ScalarFunction::constant(2.5, unit());
        let offset = power_plus_g_offset(0.0, 0.25, &g);
        for rule in [GammaRule::Mean, GammaRule::Midpoint, GammaRule::Trapezoid] {
            let gamma = approximate_gamma(&offset, unit(), rule).unwrap();
            assert!((gamma - 2.5).abs() < 1e-12, "{rule:?} gave {gamma}");
        }
    }

    #[test]
    fn theta_one_linear_g_gives_g_of_tau() {
        // theta = 1 (sigma = 1/2), g degree-1: G(x) = g(tau)
        let g = ScalarFunction::poly(&[2.0, 3.0], unit());
        let tau = 0.25;
        let offset = power_plus_g_offset(tau, 0.5, &g);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((offset.eval(x) - g.eval(tau)).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_two_linear_g_is_reanchored() {
        // theta = 2 (sigma = 1/4), g degree-1: G(x) = g((x + 2 tau)/3)
        let g = ScalarFunction::poly(&[-1.0, 2.0], unit());
        let tau = 0.5;
        let offset = power_plus_g_offset(tau, 0.25, &g);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let expect = g.eval((x + 2.0 * tau) / 3.0);
            assert!((offset.eval(x) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_zero_piece_recovers_the_function() {
        let f = ScalarFunction::poly(&[1.0, 3.0], unit());
        let w = sigma_zero_fractel(0.0, &f, unit()).unwrap();
        assert!(verify_fractel(&w, &f, 500, 1e-12).unwrap().pass);
    }

    #[test]
    fn power_plus_g_fractel_verifies() {
        // f = 2 (x - 1/4)^2 + (3x + 1) on [0, 1]
        let g = ScalarFunction::poly(&[1.0, 3.0], unit());
        let (w, witness) = power_plus_g_fractel(2.0, 0.25, 2.0, &g, unit()).unwrap();
        let rep = verify_fractel(&w, &witness, 1000, 1e-12).unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
    }

    #[test]
    fn tau_outside_domain_is_rejected() {
        let g = ScalarFunction::zero(unit());
        assert!(power_plus_g_fractel(1.0, 2.0, 1.0, &g, unit()).is_err());
        assert!(sigma_zero_fractel(-1.0, &g, unit()).is_err());
    }

    #[test]
    fn linear_g_gamma_rules_coincide() {
        // G(x) = x: mean = midpoint = trapezoid = 1/2
        let g = ScalarFunction::poly(&[0.0, 1.0], unit());
        for rule in [GammaRule::Mean, GammaRule::Midpoint, GammaRule::Trapezoid] {
            let gamma = approximate_gamma(&g, unit(), rule).unwrap();
            assert!((gamma - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_gamma_for_middle_sqrt_piece() {
        // piece with tau = 1/2, sigma = 1/2 on [1/2, 1]:
        // gamma = G(3/4) = 2 (sqrt(5/8) - sqrt(3/4)/2)
        let upper = Interval::new(0.5, 1.0).unwrap();
        let g = power_plus_g_offset(0.5, 0.5, &ScalarFunction::sqrt(upper));
        let gamma = approximate_gamma(&g, upper, GammaRule::Midpoint).unwrap();
        let expect = 2.0 * ((5f64 / 8.0).sqrt() - 0.5 * 0.75f64.sqrt());
        assert!((gamma - expect).abs() < 1e-15);
        assert!((gamma - 0.71511).abs() < 1e-5);
    }

    #[test]
    fn sqrt_system_pieces_verify_exactly() {
        let sys = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap();
        assert!(sys.ifs.coverage().covering);
        assert_eq!(sys.lambda_deviations, vec![0.0, 0.0, 0.0]);
        // each piece's fractel verifies for sqrt on its own domain
        for piece in sys.ifs.pieces() {
            let f = ScalarFunction::sqrt(piece.domain());
            let rep = verify_fractel(piece.fractel(), &f, 1000, 1e-12).unwrap();
            assert!(rep.pass, "residual {}", rep.max_residual);
        }
    }

    #[test]
    fn midpoint_constants_match_direct_evaluation() {
        let sys = build_sqrt_ifs(0.5, 0.5, SqrtMode::Midpoint).unwrap();
        // additive constants (1 - sigma) * gamma of the two upper pieces
        let lam2 = match &sys.spec.pieces[1].lambda {
            LambdaSpec::Const(c) => *c,
            other => panic!("unexpected lambda {other:?}"),
        };
        let lam3 = match &sys.spec.pieces[2].lambda {
            LambdaSpec::Const(c) => *c,
            other => panic!("unexpected lambda {other:?}"),
        };
        let expect2 = (5f64 / 8.0).sqrt() - 0.5 * 0.75f64.sqrt();
        let expect3 = (7f64 / 8.0).sqrt() - 0.5 * 0.75f64.sqrt();
        assert!((lam2 - expect2).abs() < 1e-15, "{lam2} vs {expect2}");
        assert!((lam3 - expect3).abs() < 1e-15, "{lam3} vs {expect3}");
        // five-digit values derived from the defining offsets
        assert!((lam2 - 0.35756).abs() < 1e-5);
        assert!((lam3 - 0.50240).abs() < 1e-4);
    }

    #[test]
    fn exact_mode_profile_is_flat() {
        let sys = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap();
        let profile =
            relative_error_profile(&sys.ifs, &ScalarFunction::sqrt(unit()), 500);
        assert!(profile.max_abs < 1e-12, "max |e| = {}", profile.max_abs);
    }

    #[test]
    fn profile_against_itself_vanishes() {
        let sys = build_sqrt_ifs(0.5, 0.5, SqrtMode::Midpoint).unwrap();
        let ifs = sys.ifs.clone();
        let self_ref = ScalarFunction::new("attractor", unit(), move |x| {
            ifs.evaluate(x, EVAL_DEPTH)
        });
        let profile = relative_error_profile(&sys.ifs, &self_ref, 200);
        assert_eq!(profile.max_abs, 0.0);
    }

    #[test]
    fn approximation_error_stays_below_the_bound() {
        for mode in [SqrtMode::Midpoint, SqrtMode::Mean, SqrtMode::Trapezoid] {
            let sys = build_sqrt_ifs(0.5, 0.5, mode).unwrap();
            let bound = error_bound(&sys.lambda_deviations, sys.s_max).unwrap();
            let measured = sup_error_on_grid(
                &sys.ifs,
                &ScalarFunction::sqrt(unit()),
                unit(),
                2000,
            );
            assert!(
                measured <= bound,
                "{mode:?}: measured {measured} > bound {bound}"
            );
            assert!(bound < 0.2, "{mode:?} bound unexpectedly large: {bound}");
        }
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(error_bound(&[0.0, 0.0], 0.5).unwrap(), 0.0);
        assert_eq!(error_bound(&[0.1], 0.5).unwrap(), 0.2);
        assert!(matches!(
            error_bound(&[0.1], 1.0),
            Err(FractelError::ContractionViolation { .. })
        ));
    }

    #[test]
    fn sigma_out_of_range_is_rejected() {
        assert!(build_sqrt_ifs(0.75, 0.5, SqrtMode::Exact).is_err());
        assert!(build_sqrt_ifs(0.5, -0.1, SqrtMode::Exact).is_err());
    }

    #[test]
    fn relative_error_is_stable_near_zero() {
        // the approximate attractor inherits the sqrt scaling piece, so the
        // relative error repeats along dyadic scales instead of blowing up
        let sys = build_sqrt_ifs(0.5, 0.5, SqrtMode::Midpoint).unwrap();
        let profile =
            relative_error_profile(&sys.ifs, &ScalarFunction::sqrt(unit()), 2000);
        let near_zero = profile.max_abs_over(1e-6, 1e-2);
        let away = profile.max_abs_over(1e-2, 1.0);
        assert!(near_zero <= 2.0 * away, "near 0: {near_zero}, away: {away}");
        assert!(profile.max_abs < 0.2);
    }
}
