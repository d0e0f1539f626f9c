//! Plain-text formats: the fixture table of verified fractels, the local-IFS
//! piece format, and CSV float rendering.
//!
//! Every float is written with 17 significant digits so files round-trip to
//! the exact f64. Lines starting with `#` and blank lines are ignored.
//!
//! Fixture record, one per line:
//! `name sigma tau s <lambda> <f> dom_lo dom_hi`
//!
//! Local-IFS file: a `base lo hi` line followed by piece lines
//! `piece sigma tau s <lambda> dom_lo dom_hi`.
//!
//! `<lambda>` is one of `zero`, `const c`, `poly n c0 .. c(n-1)`,
//! `sqrtdiff tau sigma`; `<f>` is one of `poly n c0 .. c(n-1)`, `power a p`,
//! `sqrt`.

use crate::affine::AffineMap1D;
use crate::error::{FractelError, Result};
use crate::fractel::Fractel;
use crate::function::ScalarFunction;
use crate::ifs::LocalIFS;
use crate::interval::Interval;

/// 17-significant-digit rendering; parses back to the identical f64.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: usize, message: impl Into<String>) -> FractelError {
    FractelError::Parse {
        line,
        message: message.into(),
    }
}

struct Tokens<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Tokens {
            line,
            iter: text.split_whitespace(),
        }
    }

    fn next_str(&mut self) -> Result<&'a str> {
        self.iter
            .next()
            .ok_or_else(|| parse_err(self.line, "unexpected end of line"))
    }

    fn next_f64(&mut self) -> Result<f64> {
        let t = self.next_str()?;
        t.parse()
            .map_err(|_| parse_err(self.line, format!("bad number `{t}`")))
    }

    fn next_usize(&mut self) -> Result<usize> {
        let t = self.next_str()?;
        t.parse()
            .map_err(|_| parse_err(self.line, format!("bad count `{t}`")))
    }

    fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            Some(t) => Err(parse_err(self.line, format!("trailing token `{t}`"))),
            None => Ok(()),
        }
    }
}

/// Serializable description of a fractel's x-part lambda.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSpec {
    Zero,
    Const(f64),
    Poly(Vec<f64>),
    /// lambda(x) = sqrt((x + tau) / 2) - sigma * sqrt(x)
    SqrtDiff { tau: f64, sigma: f64 },
}

impl LambdaSpec {
    pub fn to_function(&self, domain: Interval) -> ScalarFunction {
        match self {
            LambdaSpec::Zero => ScalarFunction::zero(domain),
            LambdaSpec::Const(c) => ScalarFunction::constant(*c, domain),
            LambdaSpec::Poly(coeffs) => ScalarFunction::poly(coeffs, domain),
            LambdaSpec::SqrtDiff { tau, sigma } => {
                let (tau, sigma) = (*tau, *sigma);
                ScalarFunction::new("sqrtdiff", domain, move |x| {
                    (0.5 * (x + tau)).sqrt() - sigma * x.sqrt()
                })
            }
        }
    }

    fn write_tokens(&self, out: &mut Vec<String>) {
        match self {
            LambdaSpec::Zero => out.push("zero".into()),
            LambdaSpec::Const(c) => {
                out.push("const".into());
                out.push(fmt_g17(*c));
            }
            LambdaSpec::Poly(coeffs) => {
                out.push("poly".into());
                out.push(coeffs.len().to_string());
                out.extend(coeffs.iter().map(|c| fmt_g17(*c)));
            }
            LambdaSpec::SqrtDiff { tau, sigma } => {
                out.push("sqrtdiff".into());
                out.push(fmt_g17(*tau));
                out.push(fmt_g17(*sigma));
            }
        }
    }

    fn parse(tokens: &mut Tokens) -> Result<Self> {
        let kind = tokens.next_str()?;
        match kind {
            "zero" => Ok(LambdaSpec::Zero),
            "const" => Ok(LambdaSpec::Const(tokens.next_f64()?)),
            "poly" => {
                let n = tokens.next_usize()?;
                let coeffs = (0..n)
                    .map(|_| tokens.next_f64())
                    .collect::<Result<Vec<_>>>()?;
                Ok(LambdaSpec::Poly(coeffs))
            }
            "sqrtdiff" => Ok(LambdaSpec::SqrtDiff {
                tau: tokens.next_f64()?,
                sigma: tokens.next_f64()?,
            }),
            other => Err(parse_err(
                tokens.line,
                format!("unknown lambda kind `{other}`"),
            )),
        }
    }
}

/// Serializable description of a fixture's witness function.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Poly(Vec<f64>),
    /// a * x^p
    Power { a: f64, p: f64 },
    Sqrt,
}

impl FunctionSpec {
    pub fn to_function(&self, domain: Interval) -> ScalarFunction {
        match self {
            FunctionSpec::Poly(coeffs) => ScalarFunction::poly(coeffs, domain),
            FunctionSpec::Power { a, p } => ScalarFunction::power(*a, *p, domain),
            FunctionSpec::Sqrt => ScalarFunction::sqrt(domain),
        }
    }

    fn write_tokens(&self, out: &mut Vec<String>) {
        match self {
            FunctionSpec::Poly(coeffs) => {
                out.push("poly".into());
                out.push(coeffs.len().to_string());
                out.extend(coeffs.iter().map(|c| fmt_g17(*c)));
            }
            FunctionSpec::Power { a, p } => {
                out.push("power".into());
                out.push(fmt_g17(*a));
                out.push(fmt_g17(*p));
            }
            FunctionSpec::Sqrt => out.push("sqrt".into()),
        }
    }

    fn parse(tokens: &mut Tokens) -> Result<Self> {
        let kind = tokens.next_str()?;
        match kind {
            "poly" => {
                let n = tokens.next_usize()?;
                let coeffs = (0..n)
                    .map(|_| tokens.next_f64())
                    .collect::<Result<Vec<_>>>()?;
                Ok(FunctionSpec::Poly(coeffs))
            }
            "power" => Ok(FunctionSpec::Power {
                a: tokens.next_f64()?,
                p: tokens.next_f64()?,
            }),
            "sqrt" => Ok(FunctionSpec::Sqrt),
            other => Err(parse_err(
                tokens.line,
                format!("unknown function kind `{other}`"),
            )),
        }
    }
}

/// One named fixture: a fractel and the function it verifies for.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureRecord {
    pub name: String,
    pub sigma: f64,
    pub tau: f64,
    pub s: f64,
    pub lambda: LambdaSpec,
    pub f: FunctionSpec,
    pub dom_lo: f64,
    pub dom_hi: f64,
}

impl FixtureRecord {
    pub fn domain(&self) -> Result<Interval> {
        Interval::new(self.dom_lo, self.dom_hi)
    }

    pub fn to_fractel(&self) -> Result<Fractel> {
        let domain = self.domain()?;
        let l = AffineMap1D::new(self.sigma, self.tau, domain)?;
        Ok(Fractel::affine(l, self.s, self.lambda.to_function(domain)))
    }

    pub fn witness(&self) -> Result<ScalarFunction> {
        Ok(self.f.to_function(self.domain()?))
    }

    pub fn to_line(&self) -> String {
        let mut out = vec![
            self.name.clone(),
            fmt_g17(self.sigma),
            fmt_g17(self.tau),
            fmt_g17(self.s),
        ];
        self.lambda.write_tokens(&mut out);
        self.f.write_tokens(&mut out);
        out.push(fmt_g17(self.dom_lo));
        out.push(fmt_g17(self.dom_hi));
        out.join(" ")
    }
}

/// Parses a fixture table; `#` comments and blank lines are skipped.
pub fn parse_fixture_table(text: &str) -> Result<Vec<FixtureRecord>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Tokens::new(line_no, line);
        let name = tokens.next_str()?.to_string();
        let sigma = tokens.next_f64()?;
        let tau = tokens.next_f64()?;
        let s = tokens.next_f64()?;
        let lambda = LambdaSpec::parse(&mut tokens)?;
        let f = FunctionSpec::parse(&mut tokens)?;
        let dom_lo = tokens.next_f64()?;
        let dom_hi = tokens.next_f64()?;
        tokens.finish()?;
        out.push(FixtureRecord {
            name,
            sigma,
            tau,
            s,
            lambda,
            f,
            dom_lo,
            dom_hi,
        });
    }
    Ok(out)
}

/// The fixtures shipped with the crate (also the CLI's built-in names).
pub fn builtin_fixtures() -> Vec<FixtureRecord> {
    parse_fixture_table(include_str!("../data/fixtures.txt"))
        .expect("embedded fixture table parses")
}

pub fn find_builtin_fixture(name: &str) -> Result<FixtureRecord> {
    builtin_fixtures()
        .into_iter()
        .find(|r| r.name == name)
        .ok_or_else(|| FractelError::UnknownFixture {
            name: name.to_string(),
        })
}

/// Serializable description of a local IFS.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceSpec {
    pub sigma: f64,
    pub tau: f64,
    pub s: f64,
    pub lambda: LambdaSpec,
    pub dom_lo: f64,
    pub dom_hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfsTextSpec {
    pub base_lo: f64,
    pub base_hi: f64,
    pub pieces: Vec<PieceSpec>,
}

impl IfsTextSpec {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "base {} {}\n",
            fmt_g17(self.base_lo),
            fmt_g17(self.base_hi)
        ));
        for p in &self.pieces {
            let mut tokens = vec![
                "piece".to_string(),
                fmt_g17(p.sigma),
                fmt_g17(p.tau),
                fmt_g17(p.s),
            ];
            p.lambda.write_tokens(&mut tokens);
            tokens.push(fmt_g17(p.dom_lo));
            tokens.push(fmt_g17(p.dom_hi));
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut base = None;
        let mut pieces = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = Tokens::new(line_no, line);
            match tokens.next_str()? {
                "base" => {
                    base = Some((tokens.next_f64()?, tokens.next_f64()?));
                    tokens.finish()?;
                }
                "piece" => {
                    let sigma = tokens.next_f64()?;
                    let tau = tokens.next_f64()?;
                    let s = tokens.next_f64()?;
                    let lambda = LambdaSpec::parse(&mut tokens)?;
                    let dom_lo = tokens.next_f64()?;
                    let dom_hi = tokens.next_f64()?;
                    tokens.finish()?;
                    pieces.push(PieceSpec {
                        sigma,
                        tau,
                        s,
                        lambda,
                        dom_lo,
                        dom_hi,
                    });
                }
                other => {
                    return Err(parse_err(line_no, format!("unknown directive `{other}`")));
                }
            }
        }
        let (base_lo, base_hi) =
            base.ok_or_else(|| parse_err(0, "missing `base lo hi` line"))?;
        Ok(IfsTextSpec {
            base_lo,
            base_hi,
            pieces,
        })
    }

    pub fn to_local_ifs(&self) -> Result<LocalIFS> {
        let base = Interval::new(self.base_lo, self.base_hi)?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let domain = Interval::new(p.dom_lo, p.dom_hi)?;
                let l = AffineMap1D::new(p.sigma, p.tau, domain)?;
                let w = Fractel::affine(l, p.s, p.lambda.to_function(domain));
                Ok((w, domain))
            })
            .collect::<Result<Vec<_>>>()?;
        LocalIFS::new(base, pieces)
    }
}

/// CSV rows `x,e(x)` with a header, LF endings, 17-significant-digit floats.
pub fn profile_to_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("x,e(x)\n");
    for (x, e) in rows {
        out.push_str(&format!("{},{}\n", fmt_g17(*x), fmt_g17(*e)));
    }
    out
}
