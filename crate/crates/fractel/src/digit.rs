//! Digit-driven polynomial evaluation: p(d1.d2d3...dk) in base B costs one
//! exact (m+1)x(m+1) matrix-vector product per digit. The per-digit matrix
//! J(n) is the conjugated diagonal contraction (M_t D_s M_t⁻¹)ᵀ with s = 1/B
//! and t = nB/(B-1), the fixed point of the digit map l_n(x) = n + x/B.

use num_traits::Zero;

use crate::error::{FractelError, Result};
use crate::poly::binomial_matrix;
use crate::rational::{rat_int, rational_to_f64, Rational, RationalMatrix};

/// A base-B digit expansion d1.d2d3...dk with value in [0, B).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitNumber {
    base: u32,
    int_digit: u32,
    frac_digits: Vec<u32>,
}

impl DigitNumber {
    pub fn new(base: u32, int_digit: u32, frac_digits: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(FractelError::BadDigit { digit: 0, base });
        }
        for &d in std::iter::once(&int_digit).chain(&frac_digits) {
            if d >= base {
                return Err(FractelError::BadDigit { digit: d, base });
            }
        }
        Ok(DigitNumber {
            base,
            int_digit,
            frac_digits,
        })
    }

    /// Parses text like "1.23" (or "7") with digits valid in `base`;
    /// bases above 10 use lowercase letters.
    pub fn parse(text: &str, base: u32) -> Result<Self> {
        let bad = |c: char| FractelError::BadDigit {
            digit: c.to_digit(36).unwrap_or(99),
            base,
        };
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        let mut int_digits = int_part.chars();
        let first = int_digits.next().ok_or_else(|| bad('?'))?;
        if int_digits.next().is_some() {
            // more than one integer digit means the value is >= base
            return Err(FractelError::BadDigit {
                digit: base,
                base,
            });
        }
        let int_digit = first.to_digit(base).ok_or_else(|| bad(first))?;
        let frac_digits = frac_part
            .chars()
            .map(|c| c.to_digit(base).ok_or_else(|| bad(c)))
            .collect::<Result<Vec<u32>>>()?;
        DigitNumber::new(base, int_digit, frac_digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// All digits d1, d2, ..., dk in consumption order.
    pub fn digits(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.int_digit).chain(self.frac_digits.iter().copied())
    }

    pub fn digit_count(&self) -> usize {
        1 + self.frac_digits.len()
    }

    /// Exact value d1 + d2/B + d3/B² + ...
    pub fn value_rational(&self) -> Rational {
        let b = rat_int(self.base as i64);
        let mut acc = Rational::zero();
        for d in self.digits().collect::<Vec<_>>().into_iter().rev() {
            acc = (acc + rat_int(d as i64)) / &b;
        }
        acc * b
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value_rational())
    }
}

impl std::fmt::Display for DigitNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let render = |d: u32| char::from_digit(d, self.base).unwrap_or('?');
        write!(f, "{}", render(self.int_digit))?;
        if !self.frac_digits.is_empty() {
            write!(f, ".")?;
            for &d in &self.frac_digits {
                write!(f, "{}", render(d))?;
            }
        }
        Ok(())
    }
}

/// The exact per-digit matrix J(n) = (M_t D_s M_t⁻¹)ᵀ.
pub fn make_j_matrix(base: u32, degree: usize, digit: u32) -> Result<RationalMatrix> {
    if base < 2 || digit >= base {
        return Err(FractelError::BadDigit { digit, base });
    }
    let s = Rational::new(1.into(), (base as i64).into());
    let t = Rational::new(
        ((digit as i64) * (base as i64)).into(),
        ((base as i64) - 1).into(),
    );
    // M_t: substitution x -> x + t; D_s: substitution x -> s x
    let m_t = binomial_matrix(&Rational::from_integer(1.into()), &t, degree)?;
    let d_s = binomial_matrix(&s, &Rational::zero(), degree)?;
    let m_t_inv = m_t.inverse().expect("unit lower-triangular is invertible");
    Ok(m_t.mul(&d_s)?.mul(&m_t_inv)?.transpose())
}

/// All J(n) for n in 0..base, built once per (base, degree) configuration and
/// shared read-only afterwards.
#[derive(Clone, Debug)]
pub struct JTable {
    base: u32,
    degree: usize,
    mats: Vec<RationalMatrix>,
    mats_f64: Vec<Vec<Vec<f64>>>,
}

impl JTable {
    pub fn new(base: u32, degree: usize) -> Result<Self> {
        if base < 2 {
            return Err(FractelError::BadDigit { digit: 0, base });
        }
        let mats = (0..base)
            .map(|n| make_j_matrix(base, degree, n))
            .collect::<Result<Vec<_>>>()?;
        let mats_f64 = mats.iter().map(RationalMatrix::to_f64).collect();
        Ok(JTable {
            base,
            degree,
            mats,
            mats_f64,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn j(&self, digit: u32) -> Result<&RationalMatrix> {
        self.mats
            .get(digit as usize)
            .ok_or(FractelError::BadDigit {
                digit,
                base: self.base,
            })
    }

    fn j_f64(&self, digit: u32) -> Result<&Vec<Vec<f64>>> {
        self.mats_f64
            .get(digit as usize)
            .ok_or(FractelError::BadDigit {
                digit,
                base: self.base,
            })
    }
}

/// Exact evaluation state: after k digits the vector is
/// J(dk)...J(d1) (a0, ..., am)ᵀ and its first component is p(d1.d2...dk).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalState {
    state: Vec<Rational>,
    digits_consumed: usize,
}

impl EvalState {
    pub fn start(coeffs: &[Rational]) -> Self {
        EvalState {
            state: coeffs.to_vec(),
            digits_consumed: 0,
        }
    }

    pub fn value(&self) -> &Rational {
        &self.state[0]
    }

    pub fn vector(&self) -> &[Rational] {
        &self.state
    }

    pub fn digits_consumed(&self) -> usize {
        self.digits_consumed
    }
}

/// Consumes all digits of `x`, exactly.
pub fn eval_digits(table: &JTable, coeffs: &[Rational], x: &DigitNumber) -> Result<EvalState> {
    let mut state = EvalState::start(coeffs);
    for d in x.digits() {
        state = extend_precision(table, &state, d)?;
    }
    Ok(state)
}

/// One more digit of precision: a single matrix-vector product on the kept
/// state vector.
pub fn extend_precision(table: &JTable, state: &EvalState, digit: u32) -> Result<EvalState> {
    let j = table.j(digit)?;
    Ok(EvalState {
        state: j.mul_vec(&state.state)?,
        digits_consumed: state.digits_consumed + 1,
    })
}

/// Reduced-precision arithmetic selector for the float evaluation paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloatPrecision {
    /// Native double precision.
    F64Like,
    /// Every intermediate rounded to a 24-bit significand.
    F32Like,
}

/// Float counterpart of [`EvalState`].
#[derive(Clone, Debug)]
pub struct FloatEvalState {
    state: Vec<f64>,
    digits_consumed: usize,
}

impl FloatEvalState {
    pub fn value(&self) -> f64 {
        self.state[0]
    }

    pub fn vector(&self) -> &[f64] {
        &self.state
    }

    pub fn digits_consumed(&self) -> usize {
        self.digits_consumed
    }
}

/// Digit evaluation in floating point (the self-correcting route of the
/// Horner comparison benchmark).
pub fn eval_digits_float(
    table: &JTable,
    coeffs: &[f64],
    x: &DigitNumber,
    precision: FloatPrecision,
) -> Result<FloatEvalState> {
    let mut state: Vec<f64> = match precision {
        FloatPrecision::F64Like => coeffs.to_vec(),
        FloatPrecision::F32Like => coeffs.iter().map(|&c| c as f32 as f64).collect(),
    };
    let mut consumed = 0usize;
    for d in x.digits() {
        let j = table.j_f64(d)?;
        state = match precision {
            FloatPrecision::F64Like => j
                .iter()
                .map(|row| row.iter().zip(&state).map(|(a, b)| a * b).sum())
                .collect(),
            FloatPrecision::F32Like => j
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&state)
                        .fold(0f32, |acc, (a, b)| acc + (*a as f32) * (*b as f32))
                        as f64
                })
                .collect(),
        };
        consumed += 1;
    }
    Ok(FloatEvalState {
        state,
        digits_consumed: consumed,
    })
}

/// Horner evaluation at the requested precision.
pub fn horner_at_precision(coeffs: &[f64], x: f64, precision: FloatPrecision) -> f64 {
    match precision {
        FloatPrecision::F64Like => crate::function::horner(coeffs, x),
        FloatPrecision::F32Like => {
            let x32 = x as f32;
            coeffs
                .iter()
                .rev()
                .fold(0f32, |acc, &c| acc * x32 + c as f32) as f64
        }
    }
}

/// Side-by-side comparison of Horner and digit evaluation against the exact
/// rational value.
#[derive(Clone, Debug)]
pub struct HornerCompareReport {
    pub horner_value: f64,
    pub digit_ifs_value: f64,
    pub exact_value: Rational,
    pub horner_rel_err: f64,
    pub ifs_rel_err: f64,
}

fn relative_error(value: f64, exact: &Rational) -> f64 {
    if exact.is_zero() {
        return value.abs();
    }
    // the float value is exactly representable as a rational, so the error
    // itself is computed exactly before the final conversion
    let v = Rational::from_float(value).unwrap_or_else(Rational::zero);
    rational_to_f64(&((v - exact) / exact)).abs()
}

/// Evaluates the polynomial with exact coefficients at the digit expansion
/// `x` via Horner and via digit matrices (both in reduced precision) and
/// reports relative errors against the exact rational value.
pub fn horner_compare(
    table: &JTable,
    coeffs: &[Rational],
    x: &DigitNumber,
    precision: FloatPrecision,
) -> Result<HornerCompareReport> {
    let exact = eval_digits(table, coeffs, x)?.value().clone();
    let coeffs_f: Vec<f64> = coeffs.iter().map(rational_to_f64).collect();
    let xf = match precision {
        FloatPrecision::F64Like => x.to_f64(),
        FloatPrecision::F32Like => x.to_f64() as f32 as f64,
    };
    let horner_value = horner_at_precision(&coeffs_f, xf, precision);
    let digit_ifs_value = eval_digits_float(table, &coeffs_f, x, precision)?.value();
    Ok(HornerCompareReport {
        horner_value,
        digit_ifs_value,
        horner_rel_err: relative_error(horner_value, &exact),
        ifs_rel_err: relative_error(digit_ifs_value, &exact),
        exact_value: exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::One;
    use proptest::prelude::*;

    /// Closed form J(n)[i][j] = C(j, i) n^(j-i) / B^i for j >= i — an oracle
    /// independent of the conjugation construction. It is the transpose of
    /// the substitution matrix of l_n(x) = n + x/B acting on monomials.
    fn closed_form_j(base: u32, degree: usize, digit: u32) -> RationalMatrix {
        let n = degree + 1;
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let c = Rational::from_integer(crate::rational::big_binomial(j, i));
                let pow_n = crate::rational::rational_pow(&rat_int(digit as i64), (j - i) as u32);
                let pow_b = crate::rational::rational_pow(&rat(1, base as i64), i as u32);
                m.set(i, j, c * pow_n * pow_b);
            }
        }
        m
    }

    #[test]
    fn j_matches_closed_form_base10() {
        for digit in 0..10 {
            let j = make_j_matrix(10, 3, digit).unwrap();
            assert_eq!(j, closed_form_j(10, 3, digit), "digit {digit}");
        }
    }

    #[test]
    fn j_matches_closed_form_other_bases() {
        for (base, degree) in [(2u32, 1usize), (2, 4), (3, 3), (16, 6)] {
            for digit in 0..base {
                let j = make_j_matrix(base, degree, digit).unwrap();
                assert_eq!(j, closed_form_j(base, degree, digit));
            }
        }
    }

    #[test]
    fn printed_rows_for_degree3_base10() {
        // row0 = (1, n, n², n³), row1 = (0, 1/10, n/5, 3n²/10),
        // row2 = (0, 0, 1/100, 3n/100), row3 = (0, 0, 0, 1/1000)
        let n = 2i64;
        let j = make_j_matrix(10, 3, n as u32).unwrap();
        let expect = RationalMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(n), rat_int(n * n), rat_int(n * n * n)],
            vec![rat_int(0), rat(1, 10), rat(n, 5), rat(3 * n * n, 10)],
            vec![rat_int(0), rat_int(0), rat(1, 100), rat(3 * n, 100)],
            vec![rat_int(0), rat_int(0), rat_int(0), rat(1, 1000)],
        ])
        .unwrap();
        assert_eq!(j, expect);
    }

    #[test]
    fn zero_digit_matrix() {
        let j = make_j_matrix(10, 3, 0).unwrap();
        let expect = RationalMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat(1, 10), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat(1, 100), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(0), rat(1, 1000)],
        ])
        .unwrap();
        assert_eq!(j, expect);
    }

    #[test]
    fn base2_degree1_digit1() {
        let j = make_j_matrix(2, 1, 1).unwrap();
        let expect =
            RationalMatrix::from_rows(vec![vec![rat_int(1), rat_int(1)], vec![rat_int(0), rat(1, 2)]])
                .unwrap();
        assert_eq!(j, expect);
    }

    #[test]
    fn worked_cubic_evaluation() {
        let table = JTable::new(10, 3).unwrap();
        let coeffs = [rat_int(1), rat_int(3), rat_int(2), rat_int(1)];
        let x = DigitNumber::parse("1.2", 10).unwrap();
        let state = eval_digits(&table, &coeffs, &x).unwrap();
        assert_eq!(state.value(), &rat(1151, 125));
        assert_eq!(
            state.vector(),
            &[rat(1151, 125), rat(303, 2500), rat(7, 12500), rat(1, 1_000_000)]
        );
        // one more digit refines to p(1.23)
        let next = extend_precision(&table, &state, 3).unwrap();
        assert_eq!(next.value(), &rat(9_576_667, 1_000_000));
        assert_eq!(next.digits_consumed(), 3);
    }

    #[test]
    fn constant_polynomial_ignores_digits() {
        let table = JTable::new(10, 0).unwrap();
        let coeffs = [rat_int(5)];
        let x = DigitNumber::parse("9.99", 10).unwrap();
        let state = eval_digits(&table, &coeffs, &x).unwrap();
        assert_eq!(state.value(), &rat_int(5));
    }

    #[test]
    fn linear_at_seven_point_five() {
        let table = JTable::new(10, 1).unwrap();
        let coeffs = [rat_int(0), rat_int(1)];
        let x = DigitNumber::parse("7.5", 10).unwrap();
        let state = eval_digits(&table, &coeffs, &x).unwrap();
        assert_eq!(state.value(), &rat(15, 2));
    }

    #[test]
    fn trailing_zero_keeps_value() {
        let table = JTable::new(10, 3).unwrap();
        let coeffs = [rat_int(1), rat_int(3), rat_int(2), rat_int(1)];
        let x = DigitNumber::parse("1.23", 10).unwrap();
        let state = eval_digits(&table, &coeffs, &x).unwrap();
        let extended = extend_precision(&table, &state, 0).unwrap();
        assert_eq!(extended.value(), state.value());
        // tail components still rescale
        assert_ne!(extended.vector()[1], state.vector()[1]);
    }

    #[test]
    fn first_digit_gives_polynomial_at_integer()  {
        let table = JTable::new(10, 3).unwrap();
        let coeffs = [rat_int(1), rat_int(3), rat_int(2), rat_int(1)];
        let state = EvalState::start(&coeffs);
        let after = extend_precision(&table, &state, 3).unwrap();
        // p(3) = 1 + 9 + 18 + 27 = 55
        assert_eq!(after.value(), &rat_int(55));
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(matches!(
            DigitNumber::parse("1.2a", 10),
            Err(FractelError::BadDigit { .. })
        ));
        assert!(matches!(
            DigitNumber::parse("12.3", 10),
            Err(FractelError::BadDigit { .. })
        ));
        assert!(DigitNumber::parse("a.f3", 16).is_ok());
        let table = JTable::new(10, 2).unwrap();
        assert!(matches!(
            table.j(10),
            Err(FractelError::BadDigit { digit: 10, base: 10 })
        ));
    }

    #[test]
    fn value_rational_matches_digits() {
        let x = DigitNumber::parse("1.23", 10).unwrap();
        assert_eq!(x.value_rational(), rat(123, 100));
        let y = DigitNumber::parse("1.101", 2).unwrap();
        assert_eq!(y.value_rational(), rat(13, 8));
        assert_eq!(y.to_string(), "1.101");
    }

    #[test]
    fn degenerate_digit_strings() {
        // a bare trailing dot means no fractional digits
        let x = DigitNumber::parse("7.", 10).unwrap();
        assert_eq!(x.value_rational(), rat_int(7));
        assert_eq!(x.digit_count(), 1);
        // but the integer digit is mandatory
        assert!(DigitNumber::parse(".5", 10).is_err());
        assert!(DigitNumber::parse("", 10).is_err());
    }

    #[test]
    fn diagonal_structure_of_j() {
        // upper-triangular with diagonal (1, 1/B, ..., 1/B^m)
        for (base, degree) in [(10u32, 3usize), (2, 5), (16, 2)] {
            for digit in 0..base {
                let j = make_j_matrix(base, degree, digit).unwrap();
                for i in 0..=degree {
                    for col in 0..i {
                        assert!(j.get(i, col).is_zero());
                    }
                    assert_eq!(
                        j.get(i, i),
                        &crate::rational::rational_pow(&rat(1, base as i64), i as u32)
                    );
                }
            }
        }
    }

    #[test]
    fn full_precision_comparison_is_tight() {
        let table = JTable::new(10, 3).unwrap();
        let coeffs = [rat_int(1), rat_int(3), rat_int(2), rat_int(1)];
        let x = DigitNumber::parse("1.23", 10).unwrap();
        let report = horner_compare(&table, &coeffs, &x, FloatPrecision::F64Like).unwrap();
        assert!(report.horner_rel_err < 1e-14, "{}", report.horner_rel_err);
        assert!(report.ifs_rel_err < 1e-14, "{}", report.ifs_rel_err);
        assert_eq!(report.exact_value, rat(9_576_667, 1_000_000));
    }

    #[test]
    fn ill_conditioned_comparison_reports_finite_errors() {
        // (x - 1)^6 at 1.0001; errors are recorded, not ranked
        let table = JTable::new(10, 6).unwrap();
        let coeffs = [
            rat_int(1),
            rat_int(-6),
            rat_int(15),
            rat_int(-20),
            rat_int(15),
            rat_int(-6),
            rat_int(1),
        ];
        let x = DigitNumber::parse("1.0001", 10).unwrap();
        for precision in [FloatPrecision::F64Like, FloatPrecision::F32Like] {
            let report = horner_compare(&table, &coeffs, &x, precision).unwrap();
            assert!(report.horner_rel_err.is_finite());
            assert!(report.ifs_rel_err.is_finite());
        }
    }

    #[test]
    fn degree_zero_is_exact_in_floats() {
        let table = JTable::new(10, 0).unwrap();
        let coeffs = [rat(7, 2)];
        let x = DigitNumber::parse("4.2", 10).unwrap();
        let report = horner_compare(&table, &coeffs, &x, FloatPrecision::F32Like).unwrap();
        assert_eq!(report.horner_rel_err, 0.0);
        assert_eq!(report.ifs_rel_err, 0.0);
    }

    fn rational_coeff_strategy() -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-9i64..=9, 1i64..=9), 1..=7)
            .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
    }

    proptest! {
        /// Digit evaluation equals direct rational evaluation, exactly, over
        /// several bases.
        #[test]
        fn digit_eval_matches_direct_evaluation(
            coeffs in rational_coeff_strategy(),
            digit_seed in proptest::collection::vec(0u32..1000, 1..=8),
            base_pick in 0usize..4,
        ) {
            let base = [2u32, 3, 10, 16][base_pick];
            let digits: Vec<u32> = digit_seed.iter().map(|d| d % base).collect();
            let x = DigitNumber::new(base, digits[0], digits[1..].to_vec()).unwrap();
            let table = JTable::new(base, coeffs.len() - 1).unwrap();
            let state = eval_digits(&table, &coeffs, &x).unwrap();
            // independent oracle: Horner in exact rationals at the exact value
            let xv = x.value_rational();
            let direct = coeffs
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * &xv + c);
            prop_assert_eq!(state.value(), &direct);
        }

        /// Consuming digits one at a time agrees with consuming them all at
        /// once — the states match exactly, not just the values.
        #[test]
        fn extension_is_consistent(
            coeffs in rational_coeff_strategy(),
            digit_seed in proptest::collection::vec(0u32..10, 2..=6),
        ) {
            let digits: Vec<u32> = digit_seed;
            let table = JTable::new(10, coeffs.len() - 1).unwrap();
            let whole = DigitNumber::new(10, digits[0], digits[1..].to_vec()).unwrap();
            let prefix = DigitNumber::new(10, digits[0], digits[1..digits.len() - 1].to_vec()).unwrap();
            let full = eval_digits(&table, &coeffs, &whole).unwrap();
            let partial = eval_digits(&table, &coeffs, &prefix).unwrap();
            let extended = extend_precision(&table, &partial, *digits.last().unwrap()).unwrap();
            prop_assert_eq!(full, extended);
        }

        /// J(n) columns are the coefficient transforms of the digit map:
        /// row 0 is (1, n, n², ...).
        #[test]
        fn j_first_row_is_digit_powers(digit in 0u32..10) {
            let j = make_j_matrix(10, 4, digit).unwrap();
            let mut power = Rational::one();
            for col in 0..=4 {
                prop_assert_eq!(j.get(0, col), &power);
                power *= rat_int(digit as i64);
            }
        }
    }
}
