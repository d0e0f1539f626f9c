//! Exact rational scalars and small dense matrices. Scalars are
//! [`num_rational::BigRational`] (always reduced, positive denominator);
//! the matrix type is hand-rolled because the computations here need exact
//! inverses, determinants, and kernels of matrices no larger than ~16x16.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FractelError, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses `num/den`, an integer, or an exact decimal like `1.23` (= 123/100).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || FractelError::BadRational {
        text: text.to_string(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let den: BigInt = d.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || int_digits.is_empty() {
            return Err(bad());
        }
        let combined: BigInt = format!("{int_digits}{frac_part}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let num = if negative { -combined } else { combined };
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(num))
}

/// `num/den`, or just `num` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational_pow(r: &Rational, exp: u32) -> Rational {
    Rational::new(r.numer().pow(exp), r.denom().pow(exp))
}

/// Binomial coefficient as an exact integer.
pub fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Correctly rounded decimal rendering with `digits` fractional digits.
pub fn rational_to_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * Rational::from_integer(scale.clone());
    // round half away from zero
    let half = rat(1, 2);
    let rounded: BigInt = if scaled.is_negative() {
        (scaled - half).ceil().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    let negative = rounded.is_negative();
    let abs = rounded.abs();
    let (int_part, frac_part) = (abs.clone() / &scale, abs % &scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part:0>width$}", width = digits)
    }
}

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format_rational(self.get(r, c))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(FractelError::DimensionMismatch {
                rows_a: r,
                cols_a: c,
                rows_b: r,
                cols_b: rows.iter().map(Vec::len).max().unwrap_or(0),
            });
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer pairs (num, den), row-major.
    pub fn from_i64_rows(rows: &[&[(i64, i64)]]) -> Self {
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&(n, d)| rat(n, d)))
            .collect();
        RationalMatrix {
            rows: rows.len(),
            cols: rows.first().map_or(0, |r| r.len()),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(FractelError::DimensionMismatch {
                rows_a: self.rows,
                cols_a: self.cols,
                rows_b: other.rows,
                cols_b: other.cols,
            });
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(FractelError::DimensionMismatch {
                rows_a: self.rows,
                cols_a: self.cols,
                rows_b: v.len(),
                cols_b: 1,
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FractelError::DimensionMismatch {
                rows_a: self.rows,
                cols_a: self.cols,
                rows_b: other.rows,
                cols_b: other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut out = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Gauss-Jordan inverse; None when singular. Square matrices only.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RationalMatrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(pivot_row, j).clone();
                    a.set(pivot_row, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.get(pivot_row, j).clone();
                    inv.set(pivot_row, j, inv.get(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.set(col, j, a.get(col, j) / &p);
                inv.set(col, j, inv.get(col, j) / &p);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let av = a.get(r, j) - &factor * a.get(col, j);
                    a.set(r, j, av);
                    let iv = inv.get(r, j) - &factor * inv.get(col, j);
                    inv.set(r, j, iv);
                }
            }
        }
        Some(inv)
    }

    /// Exact determinant via fraction-preserving elimination.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !a.get(r, col).is_zero()) {
                Some(r) => r,
                None => return Rational::zero(),
            };
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(pivot_row, j).clone();
                    a.set(pivot_row, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                }
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in (col + 1)..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col) / &p;
                for j in col..n {
                    let v = a.get(r, j) - &factor * a.get(col, j);
                    a.set(r, j, v);
                }
            }
        }
        det
    }

    /// Basis of the right kernel {v : Av = 0}, via reduced row echelon form.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let mut a = self.clone();
        let (rows, cols) = (a.rows, a.cols);
        let mut pivot_cols = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            let pivot_row = (rank..rows).find(|&r| !a.get(r, col).is_zero());
            let Some(pr) = pivot_row else { continue };
            if pr != rank {
                for j in 0..cols {
                    let tmp = a.get(pr, j).clone();
                    a.set(pr, j, a.get(rank, j).clone());
                    a.set(rank, j, tmp);
                }
            }
            let p = a.get(rank, col).clone();
            for j in 0..cols {
                a.set(rank, j, a.get(rank, j) / &p);
            }
            for r in 0..rows {
                if r == rank || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..cols {
                    let v = a.get(r, j) - &factor * a.get(rank, j);
                    a.set(r, j, v);
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
        free_cols
            .into_iter()
            .map(|fc| {
                let mut v = vec![Rational::zero(); cols];
                v[fc] = Rational::one();
                for (r, &pc) in pivot_cols.iter().enumerate() {
                    v[pc] = -a.get(r, fc).clone();
                }
                v
            })
            .collect()
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(Rational::zero(), |acc, i| acc + self.get(i, j)))
            .collect()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(rational_to_f64).collect())
            .collect()
    }

    /// Rows rendered as `num/den` tokens separated by spaces.
    pub fn to_text_rows(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(format_rational)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}
