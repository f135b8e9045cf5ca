//! Exact rational scalars and q-calculus primitives.
//!
//! The parameters `alpha` and `beta` never appear directly. Every quantity
//! that depends on them does so through integer powers `q^i A^j B^k`, with
//! `A = q^alpha` and `B = q^beta`, described by an [`ExponentSpec`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always in lowest terms with a positive
/// denominator.
pub type ExactScalar = BigRational;

pub fn int(v: i64) -> ExactScalar {
    ExactScalar::from_integer(BigInt::from(v))
}

/// `n/d`; panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> ExactScalar {
    ExactScalar::new(BigInt::from(n), BigInt::from(d))
}

/// Division that reports a vanishing divisor instead of panicking.
pub fn checked_div(num: &ExactScalar, den: &ExactScalar, context: &'static str) -> Result<ExactScalar> {
    if den.is_zero() {
        Err(Error::ZeroDenominator(context))
    } else {
        Ok(num / den)
    }
}

/// `base^e` for any integer exponent. `base` must be nonzero when `e < 0`.
pub fn powi(base: &ExactScalar, e: i64) -> ExactScalar {
    let mut acc = ExactScalar::one();
    let mut sq = if e < 0 { base.recip() } else { base.clone() };
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Renders `n/d`, always with an explicit denominator (`"1/1"`, `"-3/4"`).
pub fn format_scalar(v: &ExactScalar) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `"n/d"` or a bare integer `"n"`. Whitespace around the parts is
/// ignored.
pub fn parse_scalar(s: &str) -> Result<ExactScalar> {
    let bad = || Error::Parse(s.to_string());
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (parse_int(n)?, parse_int(d)?);
            if d.is_zero() {
                return Err(bad());
            }
            Ok(ExactScalar::new(n, d))
        }
        None => Ok(ExactScalar::from_integer(parse_int(s)?)),
    }
}

/// Exponent of the monomial `q^i A^j B^k`, i.e. `q^{i + j alpha + k beta}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentSpec {
    pub i: i64,
    pub j: i64,
    pub k: i64,
}

impl ExponentSpec {
    pub const ZERO: ExponentSpec = ExponentSpec { i: 0, j: 0, k: 0 };

    pub const fn new(i: i64, j: i64, k: i64) -> Self {
        ExponentSpec { i, j, k }
    }

    pub const fn int(i: i64) -> Self {
        ExponentSpec { i, j: 0, k: 0 }
    }
}

impl Add for ExponentSpec {
    type Output = ExponentSpec;
    fn add(self, o: ExponentSpec) -> ExponentSpec {
        ExponentSpec::new(self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl Sub for ExponentSpec {
    type Output = ExponentSpec;
    fn sub(self, o: ExponentSpec) -> ExponentSpec {
        self + (-o)
    }
}

impl Neg for ExponentSpec {
    type Output = ExponentSpec;
    fn neg(self) -> ExponentSpec {
        ExponentSpec::new(-self.i, -self.j, -self.k)
    }
}

impl fmt::Display for ExponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}a{:+}b", self.i, self.j, self.k)
    }
}

/// A parameter instance `(q, A = q^alpha, B = q^beta, N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QParams {
    q: ExactScalar,
    a: ExactScalar,
    b: ExactScalar,
    n: usize,
}

impl QParams {
    pub fn new(q: ExactScalar, a: ExactScalar, b: ExactScalar, n: usize) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::InvalidParams(format!("q = {} must avoid 0 and +-1", format_scalar(&q))));
        }
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidParams("A and B must be nonzero".into()));
        }
        Ok(QParams { q, a, b, n })
    }

    /// Convenience constructor from small integer fractions `(num, den)`.
    pub fn from_ratios(q: (i64, i64), a: (i64, i64), b: (i64, i64), n: usize) -> Result<Self> {
        QParams::new(ratio(q.0, q.1), ratio(a.0, a.1), ratio(b.0, b.1), n)
    }

    pub fn q(&self) -> &ExactScalar {
        &self.q
    }

    /// `A = q^alpha`.
    pub fn a(&self) -> &ExactScalar {
        &self.a
    }

    /// `B = q^beta`.
    pub fn b(&self) -> &ExactScalar {
        &self.b
    }

    /// Grid size parameter: the grid is `x = 0..=N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn ni(&self) -> i64 {
        self.n as i64
    }

    /// `q^i A^j B^k`.
    pub fn pow(&self, i: i64, j: i64, k: i64) -> ExactScalar {
        let mut v = powi(&self.q, i);
        if j != 0 {
            v *= powi(&self.a, j);
        }
        if k != 0 {
            v *= powi(&self.b, k);
        }
        v
    }

    /// q-number `[i + j alpha + k beta]_q`.
    pub fn bracket(&self, i: i64, j: i64, k: i64) -> ExactScalar {
        (ExactScalar::one() - self.pow(i, j, k)) / (ExactScalar::one() - &self.q)
    }

    /// The instance with `alpha -> alpha + 1`.
    pub fn shift_alpha(&self) -> QParams {
        QParams { a: &self.a * &self.q, ..self.clone() }
    }

    /// The instance with `alpha -> beta - alpha + 2`, `q -> 1/q` (beta fixed).
    ///
    /// In the primed base `q' = 1/q` this gives `A' = q'^{beta-alpha+2} =
    /// A / (B q^2)` and `B' = q'^beta = 1/B`.
    pub fn dual(&self) -> QParams {
        let q2 = &self.q * &self.q;
        QParams { q: self.q.recip(), a: &self.a / (&self.b * q2), b: self.b.recip(), n: self.n }
    }

    /// Same `q`, `A`, `B` on a grid of another size.
    pub fn with_n(&self, n: usize) -> QParams {
        QParams { n, ..self.clone() }
    }
}

impl fmt::Display for QParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} A={} B={} N={}", format_scalar(&self.q), format_scalar(&self.a), format_scalar(&self.b), self.n)
    }
}

pub fn value(e: ExponentSpec, p: &QParams) -> ExactScalar {
    p.pow(e.i, e.j, e.k)
}

/// `[x]_q = (1 - q^x) / (1 - q)` with `q^x = value(e, p)`.
pub fn qbracket(e: ExponentSpec, p: &QParams) -> ExactScalar {
    p.bracket(e.i, e.j, e.k)
}

/// q-Pochhammer symbol `(base; q)_k = prod_{j<k} (1 - q^j base)`.
pub fn qpoch(base: &ExactScalar, k: usize, q: &ExactScalar) -> ExactScalar {
    let mut acc = ExactScalar::one();
    let mut t = base.clone();
    for _ in 0..k {
        acc *= ExactScalar::one() - &t;
        if acc.is_zero() {
            return acc;
        }
        t *= q;
    }
    acc
}

/// Truncated basic hypergeometric series
/// `sum_{k < terms} prod (a_i;q)_k / ((q;q)_k prod (b_i;q)_k) z^k`.
///
/// Terms are built from the running ratio, so the cost is linear in
/// `terms`. For a terminating series with a numerator `q^{-n}` pass
/// `terms = n + 1`.
pub fn phi_series(
    num: &[ExactScalar],
    den: &[ExactScalar],
    z: &ExactScalar,
    q: &ExactScalar,
    terms: usize,
) -> Result<ExactScalar> {
    let mut sum = ExactScalar::zero();
    let mut term = ExactScalar::one();
    let mut qk = ExactScalar::one();
    for k in 0..terms {
        if k > 0 {
            // ratio t_k / t_{k-1} uses q^{k-1}
            let mut r = z.clone();
            for a in num {
                r *= ExactScalar::one() - a * &qk;
            }
            let mut d = ExactScalar::one() - &qk * q;
            for b in den {
                d *= ExactScalar::one() - b * &qk;
            }
            term = checked_div(&(term * r), &d, "phi_series")?;
            qk *= q;
        }
        sum += &term;
    }
    Ok(sum)
}

/// Outcome of [`validate_params`]; each flag names a concrete obstruction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// `A = q^m` for some `m` in `[-(n_max-1), N]`: a pole of the phi basis
    /// (and of `U_n`) falls on the grid.
    pub pole_on_grid: bool,
    /// A denominator factor of the weight or of the `U_n` normalization
    /// vanishes, or the weight itself vanishes somewhere on the grid.
    pub weight_degenerate: bool,
    /// Two eigenvalues `lambda_n`, `n <= n_max`, coincide.
    pub eigenvalue_collision: bool,
    /// A denominator of the mu coefficients or of the norm closed form
    /// vanishes.
    pub coefficient_degenerate: bool,
    /// The dual instance (`alpha -> beta - alpha + 2`, `q -> 1/q`) used by
    /// the biorthogonal partners is itself degenerate.
    pub dual_degenerate: bool,
    pub reasons: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !(self.pole_on_grid
            || self.weight_degenerate
            || self.eigenvalue_collision
            || self.coefficient_degenerate
            || self.dual_degenerate)
    }
}

fn pole_collision(p: &QParams, n_max: usize) -> Option<i64> {
    let lo = 1 - n_max as i64;
    (lo.min(0)..=p.ni()).find(|&m| *p.a() == p.pow(m, 0, 0))
}

fn prefactor_zero(p: &QParams, n_max: usize) -> Option<usize> {
    // (q^{-n-beta}; q)_n
    (0..=n_max).find(|&n| qpoch(&p.pow(-(n as i64), 0, -1), n, p.q()).is_zero())
}

/// Enumerates every denominator and degeneracy condition the checks rely on
/// for indices `n <= n_max` (normally `n_max = N`).
pub fn validate_params(p: &QParams, n_max: usize) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = p.ni();
    let q = p.q();

    if let Some(m) = pole_collision(p, n_max) {
        r.pole_on_grid = true;
        r.reasons.push(format!("A = q^{m}: pole on the grid"));
    }

    let weight_dens = [
        ("(q^{-beta};q)_N", qpoch(&p.pow(0, 0, -1), p.n(), q)),
        ("(q^{beta-alpha-N+2};q)_N", qpoch(&p.pow(2 - n, -1, 1), p.n(), q)),
        ("(q^{alpha-beta-1};q)_N", qpoch(&p.pow(-1, 1, -1), p.n(), q)),
        ("(q^{1-alpha};q)_N", qpoch(&p.pow(1, -1, 0), p.n(), q)),
    ];
    for (name, v) in weight_dens.iter() {
        if v.is_zero() {
            r.weight_degenerate = true;
            r.reasons.push(format!("{name} vanishes"));
        }
    }
    if let Some(k) = prefactor_zero(p, n_max) {
        r.weight_degenerate = true;
        r.reasons.push(format!("(q^{{-n-beta}};q)_n vanishes at n = {k}"));
    }

    let lambdas: Vec<ExactScalar> = (0..=n_max as i64).map(|k| p.bracket(-k, 0, 0) * p.bracket(k - n, 0, 1)).collect();
    'outer: for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            if lambdas[i] == lambdas[j] {
                r.eigenvalue_collision = true;
                r.reasons.push(format!("lambda_{i} = lambda_{j}"));
                break 'outer;
            }
        }
    }

    for k in 0..=n_max.min(p.n()) as i64 {
        let dens = [p.bracket(n - 2 * k, 0, -1), p.bracket(2 * k + 1 - n, 0, 1), p.bracket(2 * k - 1 - n, 0, 1)];
        if dens.iter().any(|d| d.is_zero()) {
            r.coefficient_degenerate = true;
            r.reasons.push(format!("mu denominator vanishes at n = {k}"));
        }
        if qpoch(&p.pow(1 - n, 0, 1), 2 * k as usize, q).is_zero() {
            r.coefficient_degenerate = true;
            r.reasons.push(format!("(q^{{1+beta-N}};q)_{{2n}} vanishes at n = {k}"));
        }
    }

    let d = p.dual();
    if let Some(m) = pole_collision(&d, n_max) {
        r.dual_degenerate = true;
        r.reasons.push(format!("dual A' = q'^{m}: partner pole on the grid"));
    }
    if let Some(k) = prefactor_zero(&d, n_max) {
        r.dual_degenerate = true;
        r.reasons.push(format!("dual normalization vanishes at n = {k}"));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: (i64, i64), a: (i64, i64), b: (i64, i64), n: usize) -> QParams {
        QParams::from_ratios(q, a, b, n).unwrap()
    }

    #[test]
    fn value_examples() {
        let half = p((1, 2), (3, 1), (5, 7), 3);
        assert_eq!(value(ExponentSpec::ZERO, &half), int(1));
        assert_eq!(value(ExponentSpec::int(2), &half), ratio(1, 4));
        assert_eq!(value(ExponentSpec::new(1, -1, 0), &half), ratio(1, 6));
    }

    #[test]
    fn qbracket_examples() {
        let pp = p((2, 3), (3, 1), (5, 7), 3);
        assert_eq!(qbracket(ExponentSpec::ZERO, &pp), int(0));
        assert_eq!(qbracket(ExponentSpec::int(1), &pp), int(1));
        let half = p((1, 2), (3, 1), (5, 7), 3);
        assert_eq!(qbracket(ExponentSpec::int(2), &half), ratio(3, 2));
    }

    #[test]
    fn qpoch_examples() {
        let q = ratio(1, 2);
        assert_eq!(qpoch(&ratio(7, 3), 0, &q), int(1));
        assert_eq!(qpoch(&int(1), 4, &q), int(0));
        assert_eq!(qpoch(&ratio(1, 2), 2, &q), ratio(3, 8));
    }

    #[test]
    fn phi_series_examples() {
        let q = ratio(1, 2);
        // terminating 2phi1(q^{-1}, a; c; q, cq/a) = (c/a;q)_1/(c;q)_1
        let (a, c) = (int(2), int(3));
        let z = &c * &q / &a;
        let v = phi_series(&[q.recip(), a.clone()], core::slice::from_ref(&c), &z, &q, 2).unwrap();
        assert_eq!(v, ratio(1, 4));
        assert_eq!(v, qpoch(&(&c / &a), 1, &q) / qpoch(&c, 1, &q));
        assert_eq!(phi_series(&[int(1), int(5)], &[int(3)], &int(7), &q, 1).unwrap(), int(1));
        assert_eq!(phi_series(&[int(9), int(5)], &[int(3)], &int(0), &q, 6).unwrap(), int(1));
    }

    #[test]
    fn phi_series_zero_denominator() {
        let q = ratio(1, 2);
        let e = phi_series(&[int(3)], &[int(2)], &int(1), &q, 3);
        assert_eq!(e, Err(Error::ZeroDenominator("phi_series")));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("-6/8").unwrap(), ratio(-3, 4));
        assert_eq!(parse_scalar(" 12 ").unwrap(), int(12));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(format_scalar(&int(1)), "1/1");
        assert_eq!(format_scalar(&ratio(6, -8)), "-3/4");
    }

    #[test]
    fn params_reject_degenerate_q() {
        assert!(QParams::from_ratios((1, 1), (2, 1), (3, 1), 2).is_err());
        assert!(QParams::from_ratios((-1, 1), (2, 1), (3, 1), 2).is_err());
        assert!(QParams::from_ratios((0, 1), (2, 1), (3, 1), 2).is_err());
        assert!(QParams::from_ratios((1, 2), (0, 1), (3, 1), 2).is_err());
    }

    #[test]
    fn validation_examples() {
        let good = p((1, 2), (32, 1), (1, 512), 3);
        let r = validate_params(&good, 3);
        assert!(r.is_valid(), "{:?}", r.reasons);

        let pole = p((1, 2), (1, 1), (1, 512), 3);
        assert!(pole_collision(&pole, 3).is_some());
        assert!(validate_params(&pole, 3).pole_on_grid);

        // B = q^{N - 2n} with n = 1 makes [N - beta - 2n]_q vanish
        let q = ratio(1, 2);
        let degen = QParams::new(q.clone(), int(32), powi(&q, 1), 3).unwrap();
        let r = validate_params(&degen, 3);
        assert!(r.coefficient_degenerate);
        assert!(!r.is_valid());
    }

    #[test]
    fn dual_is_an_involution() {
        let pp = p((2, 3), (3, 1), (5, 7), 4);
        assert_eq!(pp.dual().dual(), pp);
    }
}
