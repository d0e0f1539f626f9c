//! Local iterated function systems built from fractels with per-piece
//! domains, the set operator they induce, and fixed-point reconstruction on
//! sampled function representations.

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::exec;
use crate::fractel::{FMap, Fractel};
use crate::function::ScalarFunction;
use crate::interval::Interval;

/// Default sample grid (2^12 + 1 equispaced points).
pub const DEFAULT_SAMPLE_GRID: usize = 4097;

/// Slack used when matching points against piece images and when checking
/// coverage of the base interval.
pub const COVER_TOL: f64 = 1e-9;

/// A bounded function represented by samples with linear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(FractelError::DimensionMismatch {
                rows_a: xs.len(),
                cols_a: 1,
                rows_b: ys.len(),
                cols_b: 1,
            });
        }
        if xs.len() < 2 || xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FractelError::InvalidGrid { grid: xs.len() });
        }
        Ok(PiecewiseSample { xs, ys })
    }

    pub fn uniform(base: Interval, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = (0..n).map(|i| base.grid_point(i, n)).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        PiecewiseSample { xs, ys }
    }

    pub fn zeros(base: Interval, n: usize) -> Self {
        PiecewiseSample::uniform(base, n, |_| 0.0)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Linear interpolation, exact at the nodes, clamped at the ends.
    pub fn value_at(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.ys[0];
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return self.ys[last];
        }
        let hi = xs.partition_point(|&v| v < x);
        if xs[hi] == x {
            return self.ys[hi];
        }
        let lo = hi - 1;
        let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        self.ys[lo] + t * (self.ys[hi] - self.ys[lo])
    }

    /// Sup distance over the shared nodes.
    pub fn sup_distance(&self, other: &PiecewiseSample) -> f64 {
        self.ys
            .iter()
            .zip(&other.ys)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One fractel with its own domain inside a local IFS. The second component
/// must be affine in y with |s| < 1.
#[derive(Clone, Debug)]
pub struct LocalPiece {
    w: Fractel,
    domain: Interval,
    image: Interval,
}

impl LocalPiece {
    pub fn new(w: Fractel, domain: Interval) -> Result<Self> {
        let s = match w.f_map() {
            FMap::AffineInY { s, .. } => *s,
            FMap::General(_) => {
                return Err(FractelError::NotContractive { sigma: f64::NAN });
            }
        };
        if s.abs() >= 1.0 {
            return Err(FractelError::ContractionViolation { s });
        }
        if !w.l().is_contractive() {
            return Err(FractelError::NotContractive {
                sigma: w.l().sigma(),
            });
        }
        let image = w.l().image_of(&domain);
        Ok(LocalPiece { w, domain, image })
    }

    pub fn fractel(&self) -> &Fractel {
        &self.w
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn image(&self) -> Interval {
        self.image
    }

    pub fn s(&self) -> f64 {
        self.w.f_map().y_slope().expect("affine piece")
    }

    pub fn lambda_eval(&self, x: f64) -> f64 {
        self.w.f_map().lambda().expect("affine piece").eval(x)
    }

    fn map(&self) -> &AffineMap1D {
        self.w.l()
    }
}

/// Coverage diagnostics for the piece images against the base interval.
#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub covering: bool,
    pub max_gap: f64,
    /// Pairs of piece indices whose image interiors overlap by more than
    /// [`COVER_TOL`], with the overlap length.
    pub interior_overlaps: Vec<(usize, usize, f64)>,
}

/// A local IFS: a base interval and fractel pieces whose maps send their
/// own domains into the base.
#[derive(Clone, Debug)]
pub struct LocalIFS {
    base: Interval,
    pieces: Vec<LocalPiece>,
    coverage: CoverageReport,
}

impl LocalIFS {
    pub fn new(base: Interval, pieces: Vec<(Fractel, Interval)>) -> Result<Self> {
        let pieces = pieces
            .into_iter()
            .map(|(w, domain)| {
                if !base.contains_interval(&domain) {
                    return Err(FractelError::DomainEscape {
                        x: domain.lo(),
                        image: domain.lo(),
                        lo: base.lo(),
                        hi: base.hi(),
                    });
                }
                let piece = LocalPiece::new(w, domain)?;
                if !base.contains_interval(&piece.image()) {
                    return Err(FractelError::DomainEscape {
                        x: piece.domain().lo(),
                        image: piece.image().lo(),
                        lo: base.lo(),
                        hi: base.hi(),
                    });
                }
                Ok(piece)
            })
            .collect::<Result<Vec<_>>>()?;
        let coverage = Self::coverage_of(&base, &pieces);
        Ok(LocalIFS {
            base,
            pieces,
            coverage,
        })
    }

    fn coverage_of(base: &Interval, pieces: &[LocalPiece]) -> CoverageReport {
        let mut images: Vec<(usize, Interval)> =
            pieces.iter().map(|p| p.image()).enumerate().collect();
        images.sort_by(|a, b| a.1.lo().total_cmp(&b.1.lo()));
        let mut max_gap: f64 = 0.0;
        let mut reach = base.lo();
        for (_, img) in &images {
            if img.lo() > reach {
                max_gap = max_gap.max(img.lo() - reach);
            }
            reach = reach.max(img.hi());
        }
        if reach < base.hi() {
            max_gap = max_gap.max(base.hi() - reach);
        }
        let mut interior_overlaps = Vec::new();
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                let (ia, a) = &images[i];
                let (ib, b) = &images[j];
                let lo = a.lo().max(b.lo());
                let hi = a.hi().min(b.hi());
                if hi - lo > COVER_TOL {
                    interior_overlaps.push((*ia, *ib, hi - lo));
                }
            }
        }
        CoverageReport {
            covering: max_gap <= COVER_TOL,
            max_gap,
            interior_overlaps,
        }
    }

    pub fn base(&self) -> Interval {
        self.base
    }

    pub fn pieces(&self) -> &[LocalPiece] {
        &self.pieces
    }

    pub fn coverage(&self) -> &CoverageReport {
        &self.coverage
    }

    pub fn max_s(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.s().abs())
            .fold(0.0, f64::max)
    }

    /// Index of the piece whose image contains x; the last matching piece
    /// wins at shared endpoints.
    pub fn piece_for(&self, x: f64) -> Option<usize> {
        let mut found = None;
        for (i, p) in self.pieces.iter().enumerate() {
            if x >= p.image().lo() - COVER_TOL && x <= p.image().hi() + COVER_TOL {
                found = Some(i);
            }
        }
        found
    }

    /// One application of the set operator: the union of piece images of the
    /// input points restricted to each piece's domain. The empty set is
    /// invariant.
    pub fn set_operator_step(&self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            for &(x, y) in points {
                if piece.domain().contains(x) {
                    out.push(piece.fractel().apply(x, y));
                }
            }
        }
        out.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        out.dedup();
        out
    }

    /// Value of the attractor function at a single point, by unfolding the
    /// self-referential equation `depth` times starting from the zero
    /// function. The affine tail contracts by the product of |s| factors, so
    /// moderate depths already give full double precision. Returns NaN when
    /// the point leaves the covered region.
    pub fn evaluate(&self, x: f64, depth: usize) -> f64 {
        let mut acc = 0.0;
        let mut coeff = 1.0;
        let mut cur = x;
        for _ in 0..depth {
            let Some(idx) = self.piece_for(cur) else {
                return f64::NAN;
            };
            let piece = &self.pieces[idx];
            let pre = piece.map().apply_inverse(cur);
            acc += coeff * piece.lambda_eval(pre);
            coeff *= piece.s();
            if coeff.abs() < 1e-300 {
                break;
            }
            cur = pre;
        }
        acc
    }

    /// Values where two overlapping pieces disagree by more than 1e-9 on the
    /// current sample: a diagnostic for ill-posed systems.
    pub fn boundary_disagreements(&self, sample: &PiecewiseSample) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &x in sample.xs() {
            let matching: Vec<&LocalPiece> = self
                .pieces
                .iter()
                .filter(|p| {
                    x >= p.image().lo() - COVER_TOL && x <= p.image().hi() + COVER_TOL
                })
                .collect();
            if matching.len() < 2 {
                continue;
            }
            let values: Vec<f64> = matching
                .iter()
                .map(|p| {
                    let pre = p.map().apply_inverse(x);
                    p.fractel().f_map().eval(pre, sample.value_at(pre))
                })
                .collect();
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(v), h.max(v))
                });
            if hi - lo > 1e-9 {
                out.push((x, lo, hi));
            }
        }
        out
    }
}

/// Convergence record of [`rb_fixed_point`].
#[derive(Clone, Debug)]
pub struct RbReport {
    pub iterations_run: usize,
    /// Sup distance between successive iterates, one entry per iteration.
    pub sup_changes: Vec<f64>,
    /// Values recorded at overlap points that disagree by more than 1e-9.
    pub boundary_disagreements: Vec<(f64, f64, f64)>,
}

impl RbReport {
    /// Ratios of successive sup changes.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.sup_changes
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Iterates the piecewise operator
/// g(x) <- s_n g(l_n⁻¹(x)) + lambda_n(l_n⁻¹(x)) for x in the n-th image,
/// on the sample nodes, with values between nodes linearly interpolated.
/// Runs the requested number of iterations or stops once the sup change
/// drops below 1e-12. Per-node evaluation within one iteration is
/// data-parallel.
pub fn rb_fixed_point(
    ifs: &LocalIFS,
    init: &PiecewiseSample,
    iterations: usize,
) -> Result<(PiecewiseSample, RbReport)> {
    if !ifs.coverage().covering {
        return Err(FractelError::NotCovering {
            gap_at: ifs.coverage().max_gap,
        });
    }
    let s_max = ifs.max_s();
    if s_max >= 1.0 {
        return Err(FractelError::NotContractive { sigma: s_max });
    }
    let base = ifs.base();
    if init.xs()[0] > base.lo() + COVER_TOL
        || *init.xs().last().unwrap() < base.hi() - COVER_TOL
    {
        return Err(FractelError::NotCovering {
            gap_at: init.xs()[0],
        });
    }
    let n = init.len();
    // resolve each node's piece once; the grid never moves
    let piece_of: Vec<usize> = init
        .xs()
        .iter()
        .map(|&x| {
            ifs.piece_for(x).ok_or(FractelError::NotCovering { gap_at: x })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut current = init.clone();
    let mut sup_changes = Vec::with_capacity(iterations);
    let mut iterations_run = 0;
    for _ in 0..iterations {
        let prev = &current;
        let new_ys = exec::map_vec(n, |i| {
            let piece = &ifs.pieces()[piece_of[i]];
            let pre = piece.map().apply_inverse(prev.xs()[i]);
            let y = prev.value_at(pre);
            piece.fractel().f_map().eval(pre, y)
        });
        // cheap scan over the materialized vectors; not worth a dispatch
        let change = new_ys
            .iter()
            .zip(current.ys())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = PiecewiseSample {
            xs: current.xs,
            ys: new_ys,
        };
        sup_changes.push(change);
        iterations_run += 1;
        if change < 1e-12 {
            break;
        }
    }
    let boundary_disagreements = ifs.boundary_disagreements(&current);
    Ok((
        current,
        RbReport {
            iterations_run,
            sup_changes,
            boundary_disagreements,
        },
    ))
}

/// Vector-valued samples over a shared node set.
#[derive(Clone, Debug)]
pub struct VectorSample {
    xs: Vec<f64>,
    ys: Vec<Vec<f64>>,
}

impl VectorSample {
    pub fn uniform(base: Interval, n: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let xs: Vec<f64> = (0..n).map(|i| base.grid_point(i, n)).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        VectorSample { xs, ys }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[Vec<f64>] {
        &self.ys
    }

    pub fn value_at(&self, x: f64) -> Vec<f64> {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.ys[0].clone();
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return self.ys[last].clone();
        }
        let hi = xs.partition_point(|&v| v < x);
        if xs[hi] == x {
            return self.ys[hi].clone();
        }
        let lo = hi - 1;
        let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        self.ys[lo]
            .iter()
            .zip(&self.ys[hi])
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }

    pub fn sup_distance(&self, other: &VectorSample) -> f64 {
        self.ys
            .iter()
            .zip(&other.ys)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max)
    }
}

/// One piece of a vector-valued system: y <- M y(l⁻¹ x) + offset(l⁻¹ x).
#[derive(Clone, Debug)]
pub struct VectorPiece {
    pub map: AffineMap1D,
    pub matrix: Vec<Vec<f64>>,
    pub offset: Option<Vec<ScalarFunction>>,
}

/// Fixed-point iteration for vector-valued systems (matrix action per piece,
/// pieces indexed by their map images over the full base). Convergence
/// depends on the matrix spectra on the invariant subspace, which is the
/// caller's concern; the report carries the observed sup changes.
pub fn rb_fixed_point_vector(
    pieces: &[VectorPiece],
    base: Interval,
    init: &VectorSample,
    iterations: usize,
) -> Result<(VectorSample, RbReport)> {
    let images: Vec<Interval> = pieces.iter().map(|p| p.map.image()).collect();
    let piece_for = |x: f64| -> Option<usize> {
        let mut found = None;
        for (i, img) in images.iter().enumerate() {
            if x >= img.lo() - COVER_TOL && x <= img.hi() + COVER_TOL {
                found = Some(i);
            }
        }
        found
    };
    let n = init.xs.len();
    let piece_of: Vec<usize> = init
        .xs
        .iter()
        .map(|&x| piece_for(x).ok_or(FractelError::NotCovering { gap_at: x }))
        .collect::<Result<Vec<_>>>()?;
    if !base.contains(init.xs[0]) {
        return Err(FractelError::NotCovering { gap_at: init.xs[0] });
    }
    let mut current = init.clone();
    let mut sup_changes = Vec::new();
    let mut iterations_run = 0;
    for _ in 0..iterations {
        let prev = &current;
        let new_ys = exec::map_vec(n, |i| {
            let piece = &pieces[piece_of[i]];
            let pre = piece.map.apply_inverse(prev.xs[i]);
            let y = prev.value_at(pre);
            let mut out: Vec<f64> = piece
                .matrix
                .iter()
                .map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum())
                .collect();
            if let Some(offset) = &piece.offset {
                for (o, f) in out.iter_mut().zip(offset) {
                    *o += f.eval(pre);
                }
            }
            out
        });
        let change = new_ys
            .iter()
            .zip(&current.ys)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max);
        current = VectorSample {
            xs: current.xs,
            ys: new_ys,
        };
        sup_changes.push(change);
        iterations_run += 1;
        if change < 1e-12 {
            break;
        }
    }
    Ok((
        current,
        RbReport {
            iterations_run,
            sup_changes,
            boundary_disagreements: Vec::new(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{build_sqrt_ifs, SqrtMode};

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn empty_point_set_is_invariant() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        assert!(ifs.set_operator_step(&[]).is_empty());
    }

    #[test]
    fn graph_points_stay_on_the_graph() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        // apply the set operator twice starting from (1, 1)
        let mut pts = vec![(1.0, 1.0)];
        for _ in 0..2 {
            pts = ifs.set_operator_step(&pts);
            assert!(!pts.is_empty());
            for &(x, y) in &pts {
                assert!((y - x.sqrt()).abs() < 1e-12, "({x}, {y}) off the graph");
            }
        }
    }

    #[test]
    fn single_piece_maps_the_corner() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        let piece = &ifs.pieces()[0];
        let (x, y) = piece.fractel().apply(1.0, 1.0);
        assert_eq!(x, 0.5);
        assert!((y - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interpolation_is_exact_at_nodes() {
        let s = PiecewiseSample::uniform(unit(), 9, |x| x * x);
        for (i, &x) in s.xs().iter().enumerate() {
            assert_eq!(s.value_at(x), s.ys()[i]);
        }
        assert_eq!(s.value_at(-1.0), s.ys()[0]);
        assert_eq!(s.value_at(2.0), *s.ys().last().unwrap());
    }

    #[test]
    fn sample_rejects_unsorted_nodes() {
        assert!(PiecewiseSample::new(vec![0.0, 0.5, 0.4], vec![0.0; 3]).is_err());
        assert!(PiecewiseSample::new(vec![0.0, 0.5], vec![0.0; 3]).is_err());
    }

    #[test]
    fn coverage_flags_gaps() {
        // single piece covering only [0, 1/2]
        let l = AffineMap1D::new(0.5, 0.0, unit()).unwrap();
        let w = Fractel::affine(l, 0.5, ScalarFunction::zero(unit()));
        let ifs = LocalIFS::new(unit(), vec![(w, unit())]).unwrap();
        assert!(!ifs.coverage().covering);
        assert!(ifs.coverage().max_gap > 0.4);
        let init = PiecewiseSample::zeros(unit(), 65);
        assert!(matches!(
            rb_fixed_point(&ifs, &init, 5),
            Err(FractelError::NotCovering { .. })
        ));
    }

    #[test]
    fn pieces_must_be_contractive_in_y() {
        let l = AffineMap1D::new(0.5, 0.0, unit()).unwrap();
        let w = Fractel::affine(l, 1.0, ScalarFunction::zero(unit()));
        assert!(matches!(
            LocalIFS::new(unit(), vec![(w, unit())]),
            Err(FractelError::ContractionViolation { .. })
        ));
    }

    #[test]
    fn pieces_must_contract_in_x() {
        // |sigma| = 1 maps are representable as fractels but the iteration
        // refuses them
        let id = AffineMap1D::identity(unit());
        let w = Fractel::affine(id, 0.5, ScalarFunction::zero(unit()));
        assert!(matches!(
            LocalIFS::new(unit(), vec![(w, unit())]),
            Err(FractelError::NotContractive { .. })
        ));
    }

    #[test]
    fn sqrt_reconstruction_converges_on_nodes() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        let init = PiecewiseSample::zeros(unit(), 1025);
        let (result, report) = rb_fixed_point(&ifs, &init, 40).unwrap();
        assert_eq!(report.iterations_run, 40);
        let worst = result
            .xs()
            .iter()
            .zip(result.ys())
            .filter(|(x, _)| **x >= 1e-3)
            .map(|(x, y)| (y - x.sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "node error {worst}");
        // contraction observed
        let ratios = report.contraction_ratios();
        assert!(ratios.iter().skip(2).all(|r| *r <= 0.75), "{ratios:?}");
    }

    #[test]
    fn fixed_point_input_is_unchanged() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        let init = PiecewiseSample::uniform(unit(), 4097, |x| x.sqrt());
        let (result, _) = rb_fixed_point(&ifs, &init, 1).unwrap();
        assert!(init.sup_distance(&result) < 1e-9);
    }

    #[test]
    fn pullback_evaluation_matches_reference() {
        let ifs = build_sqrt_ifs(0.5, 0.5, SqrtMode::Exact).unwrap().ifs;
        for x in [1e-6, 1e-4, 0.3, 0.5, 0.75, 1.0] {
            let v = ifs.evaluate(x, 300);
            assert!((v - x.sqrt()).abs() <= 1e-12 * x.sqrt().max(1e-12), "x={x} v={v}");
        }
    }

    #[test]
    fn piecewise_linear_exactness_when_sigma_is_zero() {
        // two sigma = 0 pieces reproduce f(x) = 3x + 1 exactly in one pass
        let f = |x: f64| 3.0 * x + 1.0;
        let mk = |tau: f64| {
            let l = AffineMap1D::halving(tau, unit());
            let lam = ScalarFunction::new("f∘l", unit(), move |x| f(0.5 * (x + tau)));
            Fractel::affine(l, 0.0, lam)
        };
        let ifs = LocalIFS::new(unit(), vec![(mk(0.0), unit()), (mk(1.0), unit())]).unwrap();
        assert!(ifs.coverage().covering);
        let init = PiecewiseSample::zeros(unit(), 4097);
        let (result, _) = rb_fixed_point(&ifs, &init, 3).unwrap();
        for (x, y) in result.xs().iter().zip(result.ys()) {
            assert_eq!(*y, f(*x), "exactness lost at {x}");
        }
    }

    #[test]
    fn hat_basis_vector_system_reconstructs_basis() {
        // two matrix pieces reconstruct (1 - x, x) from a constant start
        let m1 = vec![vec![1.0, 0.5], vec![0.0, 0.5]];
        let m2 = vec![vec![0.5, 0.0], vec![0.5, 1.0]];
        let pieces = vec![
            VectorPiece {
                map: AffineMap1D::new(0.5, 0.0, unit()).unwrap(),
                matrix: m1,
                offset: None,
            },
            VectorPiece {
                map: AffineMap1D::new(0.5, 0.5, unit()).unwrap(),
                matrix: m2,
                offset: None,
            },
        ];
        let init = VectorSample::uniform(unit(), 513, |_| vec![1.0, 0.0]);
        let (result, _) = rb_fixed_point_vector(&pieces, unit(), &init, 60).unwrap();
        for (x, y) in result.xs().iter().zip(result.ys()) {
            assert!((y[0] - (1.0 - x)).abs() < 1e-12, "component 0 at {x}: {}", y[0]);
            assert!((y[1] - x).abs() < 1e-12, "component 1 at {x}: {}", y[1]);
        }
    }

    #[test]
    fn vector_system_with_offsets_reconstructs_target() {
        // two-piece vector system for f = (x, x²) with a chosen contraction
        // matrix; the offsets come from the vector G construction
        use crate::poly::vector_valued_g;
        use crate::rational::RationalMatrix;

        let dom = unit();
        let f = vec![
            ScalarFunction::power(1.0, 1.0, dom),
            ScalarFunction::power(1.0, 2.0, dom),
        ];
        let m = RationalMatrix::from_i64_rows(&[&[(1, 3), (0, 1)], &[(0, 1), (1, 5)]]);
        let m_f = m.to_f64();
        let eye_minus_m = RationalMatrix::identity(2).sub(&m).unwrap().to_f64();
        let mut pieces = Vec::new();
        for tau in [0.0, 1.0] {
            let g = vector_valued_g(&f, &m, tau, dom).unwrap();
            let offset: Vec<ScalarFunction> = (0..2)
                .map(|i| {
                    let row = eye_minus_m[i].clone();
                    let g = g.clone();
                    ScalarFunction::new(format!("off{i}"), dom, move |x| {
                        row.iter().zip(&g).map(|(w, gj)| w * gj.eval(x)).sum()
                    })
                })
                .collect();
            pieces.push(VectorPiece {
                map: AffineMap1D::halving(tau, dom),
                matrix: m_f.clone(),
                offset: Some(offset),
            });
        }
        let init = VectorSample::uniform(dom, 513, |_| vec![0.0, 0.0]);
        let (result, report) = rb_fixed_point_vector(&pieces, dom, &init, 60).unwrap();
        assert!(report.sup_changes.last().unwrap() < &1e-10);
        for (x, y) in result.xs().iter().zip(result.ys()) {
            assert!((y[0] - x).abs() < 1e-5, "component 0 at {x}");
            assert!((y[1] - x * x).abs() < 1e-5, "component 1 at {x}");
        }
    }

    #[test]
    fn boundary_disagreements_detect_mismatched_pieces() {
        // second piece deliberately offset so overlap values differ at 1/2
        let l1 = AffineMap1D::new(0.5, 0.0, unit()).unwrap();
        let l2 = AffineMap1D::new(0.5, 0.5, unit()).unwrap();
        let w1 = Fractel::affine(l1, 0.0, ScalarFunction::constant(0.0, unit()));
        let w2 = Fractel::affine(l2, 0.0, ScalarFunction::constant(1.0, unit()));
        let ifs = LocalIFS::new(unit(), vec![(w1, unit()), (w2, unit())]).unwrap();
        let sample = PiecewiseSample::zeros(unit(), 9);
        let disagreements = ifs.boundary_disagreements(&sample);
        assert!(!disagreements.is_empty());
        assert!((disagreements[0].0 - 0.5).abs() < 1e-12);
    }
}
