//! The rational functions `U_n`, their biorthogonal partners, the
//! q-hypergeometric weight and the norms.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, solve_square, GridVector, Matrix};
use crate::operators::{basis_change, point_matrix, weighted_adjoint, Basis, OpMatrix, Operator};
use crate::qcore::{checked_div, phi_series, qpoch, ExactScalar, QParams};
use crate::report::{CheckReport, Metric, Violation};

/// `lambda_n = [-n]_q [n + beta - N]_q`.
pub fn eigenvalue(n: usize, p: &QParams) -> ExactScalar {
    let n = n as i64;
    p.bracket(-n, 0, 0) * p.bracket(n - p.ni(), 0, 1)
}

/// Unnormalized weight
/// `q^x B^x (q^{-N};q)_x (q^{1-alpha};q)_x / ((q;q)_x (q^{beta-alpha-N+2};q)_x)`.
pub fn unnormalized_weight(p: &QParams) -> Result<GridVector> {
    let q = p.q();
    let n = p.ni();
    let mut out = Vec::with_capacity(p.n() + 1);
    for x in 0..=p.n() {
        let num = p.pow(x as i64, 0, x as i64) * qpoch(&p.pow(-n, 0, 0), x, q) * qpoch(&p.pow(1, -1, 0), x, q);
        let den = qpoch(q, x, q) * qpoch(&p.pow(2 - n, -1, 1), x, q);
        if den.is_zero() {
            return Err(Error::InvalidParams(format!("weight denominator vanishes at x = {x}")));
        }
        out.push(num / den);
    }
    Ok(GridVector(out))
}

/// `K = q^N A^{-N} (q^{alpha-beta-1};q)_N / (q^{-beta};q)_N`, the factor
/// making the weight sum to one.
pub fn weight_normalization(p: &QParams) -> Result<ExactScalar> {
    let q = p.q();
    let n = p.ni();
    let den = qpoch(&p.pow(0, 0, -1), p.n(), q);
    if den.is_zero() {
        return Err(Error::InvalidParams("(q^{-beta};q)_N vanishes".into()));
    }
    Ok(p.pow(n, -n, 0) * qpoch(&p.pow(-1, 1, -1), p.n(), q) / den)
}

/// Normalized weight on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub w: GridVector,
    pub params: QParams,
}

impl WeightVector {
    pub fn values(&self) -> &[ExactScalar] {
        &self.w
    }
}

pub fn weight_vector(p: &QParams) -> Result<WeightVector> {
    let k = weight_normalization(p)?;
    let w = unnormalized_weight(p)?.scaled(&k);
    let total: ExactScalar = w.iter().sum();
    if !total.is_one() {
        return Err(Error::ClosedFormMismatch(format!(
            "weight sums to {} instead of 1",
            crate::qcore::format_scalar(&total)
        )));
    }
    if let Some(x) = w.iter().position(Zero::is_zero) {
        return Err(Error::ZeroWeight { x });
    }
    Ok(WeightVector { w, params: p.clone() })
}

/// `P_n = (q^{-N};q)_n / (q^{-n-beta};q)_n`, the value of the leading
/// expansion coefficient.
pub fn normalization_prefactor(n: usize, p: &QParams) -> Result<ExactScalar> {
    let q = p.q();
    let ni = n as i64;
    checked_div(&qpoch(&p.pow(-p.ni(), 0, 0), n, q), &qpoch(&p.pow(-ni, 0, -1), n, q), "(q^{-n-beta};q)_n")
}

/// Coefficients `C_{n,0..=n}` of `U_n = sum_k C_{n,k} phi_k`, from the
/// two-term recurrence
/// `q^{beta-alpha-k} [k+1]_q [k-N]_q C_{k+1} = (lambda_n - lambda_k) C_k`.
pub fn expansion_coefficients(n: usize, p: &QParams) -> Result<Vec<ExactScalar>> {
    if n > p.n() {
        return Err(Error::OutOfRange { index: n, max: p.n() });
    }
    let lam = eigenvalue(n, p);
    let mut c = Vec::with_capacity(n + 1);
    c.push(normalization_prefactor(n, p)?);
    for k in 0..n {
        let ki = k as i64;
        let lead = p.pow(-ki, -1, 1) * p.bracket(ki + 1, 0, 0) * p.bracket(ki - p.ni(), 0, 0);
        let next = checked_div(&((&lam - eigenvalue(k, p)) * &c[k]), &lead, "C_{n,k} recurrence")?;
        c.push(next);
    }
    Ok(c)
}

/// The terminating series
/// `3phi2(q^{-n}, q^{n+beta-N}, q^{-x}; q^{-N}, q^{alpha-x}; q, q^{alpha-beta})`
/// on the grid, i.e. `U_n` without its prefactor.
pub fn reduced_u(n: usize, p: &QParams) -> Result<GridVector> {
    if n > p.n() {
        return Err(Error::OutOfRange { index: n, max: p.n() });
    }
    let ni = n as i64;
    let nn = p.ni();
    let z = p.pow(0, 1, -1);
    let mut out = Vec::with_capacity(p.n() + 1);
    for x in 0..=p.n() {
        let xi = x as i64;
        let num = [p.pow(-ni, 0, 0), p.pow(ni - nn, 0, 1), p.pow(-xi, 0, 0)];
        let den = [p.pow(-nn, 0, 0), p.pow(-xi, 1, 0)];
        let v = phi_series(&num, &den, &z, p.q(), n + 1).map_err(|_| Error::PoleOnGrid { n, x })?;
        out.push(v);
    }
    Ok(GridVector(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Coefficient recurrence, summed over the phi basis.
    Recurrence,
    /// Direct terminating series.
    Hypergeometric,
}

/// `U_n` on the grid.
pub fn brf_u(n: usize, p: &QParams, method: Method) -> Result<GridVector> {
    match method {
        Method::Hypergeometric => {
            let pre = normalization_prefactor(n, p)?;
            Ok(reduced_u(n, p)?.scaled(&pre))
        }
        Method::Recurrence => {
            let c = expansion_coefficients(n, p)?;
            let phi = basis_change(p, n)?;
            Ok(phi.mul_vec(&c))
        }
    }
}

/// `-q^{-1} [alpha - beta - 1]_q`.
pub fn partner_scale(p: &QParams) -> ExactScalar {
    -(p.pow(-1, 0, 0) * p.bracket(-1, 1, -1))
}

/// Partner `cal U_m(x) = -q^{-1}[alpha-beta-1]_q U_m(N - x)` evaluated at
/// the dual parameters.
pub fn brf_partner(m: usize, p: &QParams) -> Result<GridVector> {
    let dual = p.dual();
    let u =
        brf_u(m, &dual, Method::Hypergeometric).map_err(|e| Error::InvalidParams(format!("dual parameters: {e}")))?;
    let c = partner_scale(p);
    Ok(GridVector(u.iter().rev().map(|v| v * &c).collect()))
}

pub fn inner_product(f: &[ExactScalar], g: &[ExactScalar], w: &WeightVector) -> Result<ExactScalar> {
    let dim = w.w.len();
    for v in [f, g] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    Ok(f.iter().zip(g).zip(w.w.iter()).map(|((a, b), c)| a * b * c).sum())
}

/// `H_n = (U_n, cal U_n)` by direct summation.
pub fn norm_hn(n: usize, p: &QParams) -> Result<ExactScalar> {
    let w = weight_vector(p)?;
    inner_product(&brf_u(n, p, Method::Hypergeometric)?, &brf_partner(n, p)?, &w)
}

/// Norm of the unnormalized system:
/// `q^{N(alpha-1-n)} (q;q)_n (q^{-beta};q)_N/(q^{alpha-beta-1};q)_N
///  (q^{beta+1};q)_n/(q^{-N};q)_n (q^{n+beta-N};q)_n/(q^{1+beta-N};q)_{2n}`.
pub fn reduced_norm(n: usize, p: &QParams) -> Result<ExactScalar> {
    let q = p.q();
    let nn = p.ni();
    let ni = n as i64;
    let num = p.pow(-nn * (1 + ni), nn, 0)
        * qpoch(q, n, q)
        * qpoch(&p.pow(0, 0, -1), p.n(), q)
        * qpoch(&p.pow(1, 0, 1), n, q)
        * qpoch(&p.pow(ni - nn, 0, 1), n, q);
    let den =
        qpoch(&p.pow(-1, 1, -1), p.n(), q) * qpoch(&p.pow(-nn, 0, 0), n, q) * qpoch(&p.pow(1 - nn, 0, 1), 2 * n, q);
    checked_div(&num, &den, "reduced norm")
}

/// Closed form `H_n = K P_n c P'_n hbar_n`, with `K` the weight
/// normalization, `P_n`, `P'_n` the prefactors of `U_n` and of its dual,
/// and `c` the partner scale.
pub fn norm_hn_closed_form(n: usize, p: &QParams) -> Result<ExactScalar> {
    Ok(weight_normalization(p)?
        * normalization_prefactor(n, p)?
        * partner_scale(p)
        * normalization_prefactor(n, &p.dual())?
        * reduced_norm(n, p)?)
}

/// `[y]_{1/q} = (1 - q^{-y}) / (1 - q^{-1})` for `y = x - alpha - k`.
fn inverse_bracket(x: usize, k: usize, p: &QParams) -> ExactScalar {
    let qinv = p.q().recip();
    (ExactScalar::one() - p.pow(k as i64 - x as i64, 1, 0)) / (ExactScalar::one() - qinv)
}

/// Evaluates `1 + sum_k eta_k / [x - alpha - k]_{1/q}`.
pub fn partial_fraction_eval(eta: &[ExactScalar], x: usize, p: &QParams) -> Result<ExactScalar> {
    let mut acc = ExactScalar::one();
    for (k, e) in eta.iter().enumerate() {
        acc += checked_div(e, &inverse_bracket(x, k, p), "[x-alpha-k]_{1/q}")?;
    }
    Ok(acc)
}

/// Coefficients `eta_{n,0..n}` with
/// `U_n(x) = 1 + sum_{k<n} eta_{n,k} / [x - alpha - k]_{1/q}`.
///
/// The brackets are taken in base `1/q`: this keeps the `x -> infinity`
/// normalization `U_n -> 1`, which brackets in base `q` cannot (their
/// reciprocals tend to `1 - q`, not `0`). Solved from the first `n` grid
/// points and confirmed on the rest.
pub fn partial_fraction(n: usize, p: &QParams) -> Result<Vec<ExactScalar>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let u = brf_u(n, p, Method::Hypergeometric)?;
    let mut a = Matrix::zeros(n, n);
    let mut rhs = Vec::with_capacity(n);
    for x in 0..n {
        for k in 0..n {
            a[(x, k)] = checked_div(&ExactScalar::one(), &inverse_bracket(x, k, p), "[x-alpha-k]_{1/q}")?;
        }
        rhs.push(&u[x] - ExactScalar::one());
    }
    let eta = solve_square(&a, &rhs)?;
    for x in n..=p.n() {
        if partial_fraction_eval(&eta, x, p)? != u[x] {
            return Err(Error::ClosedFormMismatch(format!("partial fractions of U_{n} miss x = {x}")));
        }
    }
    Ok(eta)
}

/// `U_0..U_N` with their eigenvalues, built once per instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BrfFamily {
    pub params: QParams,
    pub members: Vec<GridVector>,
    pub lambdas: Vec<ExactScalar>,
}

impl BrfFamily {
    pub fn new(p: &QParams) -> Result<Self> {
        let members = (0..=p.n()).map(|n| brf_u(n, p, Method::Hypergeometric)).collect::<Result<Vec<_>>>()?;
        let lambdas: Vec<ExactScalar> = (0..=p.n()).map(|n| eigenvalue(n, p)).collect();
        for i in 0..lambdas.len() {
            if lambdas[i + 1..].contains(&lambdas[i]) {
                return Err(Error::InvalidParams(format!("eigenvalue lambda_{i} is repeated")));
            }
        }
        Ok(BrfFamily { params: p.clone(), members, lambdas })
    }

    /// `U_n`, or `None` outside `0..=N` (the absent `U_{-1}`, `U_{N+1}`).
    pub fn get(&self, n: i64) -> Option<&GridVector> {
        usize::try_from(n).ok().and_then(|n| self.members.get(n))
    }
}

/// `(U_n, cal U_m) = delta_{nm} H_n` for all `n, m`, with `H_n` compared
/// to its closed form and required to be nonzero.
pub fn check_biorthogonality(p: &QParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("biorthogonality");
    let w = weight_vector(p)?;
    let fam = BrfFamily::new(p)?;
    let partners = (0..=p.n()).map(|m| brf_partner(m, p)).collect::<Result<Vec<_>>>()?;
    let mut norms = Vec::with_capacity(p.n() + 1);
    for (n, u) in fam.members.iter().enumerate() {
        for (m, v) in partners.iter().enumerate() {
            let g = inner_product(u, v, &w)?;
            if n != m && !g.is_zero() {
                r.fail(Violation::new("(U_n, partner_m) for n != m", g).at_n(n).at_m(m));
            } else if n == m {
                if g.is_zero() {
                    r.fail(Violation::new("H_n vanishes", g.clone()).at_n(n));
                }
                let closed = norm_hn_closed_form(n, p)?;
                if closed != g {
                    r.fail(Violation::new("H_n differs from closed form", &g - &closed).at_n(n));
                }
                norms.push(g);
            }
        }
    }
    r.metric("norms", Metric::ExactList(norms));
    Ok(r)
}

/// Weight involution: the weight at the dual parameters, read backwards,
/// is the same distribution.
pub fn check_weight_involution(p: &QParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("weight_involution");
    let w = weight_vector(p)?;
    let wd = weight_vector(&p.dual())?;
    let n = p.n();
    for x in 0..=n {
        if w.w[x] != wd.w[n - x] {
            r.fail(Violation::new("w_x - w'_{N-x}", &w.w[x] - &wd.w[n - x]).at_x(x));
        }
    }
    Ok(r)
}

/// Eigenvector properties of both families: `V U_n = lambda_n U_n`,
/// `V* cal U_m = lambda_m cal U_m`, recurrence and series evaluations
/// agree, and `cal U_m` is proportional to `X* U*_m` for the one-dimensional
/// null space `U*_m` of `Y* - lambda_m X*`.
pub fn check_partner(p: &QParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("partner");
    let w = weight_vector(p)?;
    let fam = BrfFamily::new(p)?;
    let adj = |op| -> Result<Matrix> {
        let m = OpMatrix { op, basis: Basis::Point, adjoint: false, matrix: point_matrix(op, p)?, params: p.clone() };
        Ok(weighted_adjoint(&m, &w.w)?.matrix)
    };
    let v = point_matrix(Operator::V, p)?;
    let (xs, ys, vs) = (adj(Operator::X)?, adj(Operator::Y)?, adj(Operator::V)?);
    for n in 0..=p.n() {
        let u = &fam.members[n];
        let lam = &fam.lambdas[n];
        if &brf_u(n, p, Method::Recurrence)? != u {
            r.fail(Violation::new("recurrence and series evaluations differ", ExactScalar::one()).at_n(n));
        }
        if let Some(x) = first_difference(&v.mul_vec(u), &u.scaled(lam)) {
            r.fail(Violation::new("V U_n - lambda_n U_n", x.1).at_n(n).at_x(x.0));
        }
        let pu = brf_partner(n, p)?;
        if let Some(x) = first_difference(&vs.mul_vec(&pu), &pu.scaled(lam)) {
            r.fail(Violation::new("V* partner - lambda partner", x.1).at_m(n).at_x(x.0));
        }
        let pencil = ys.sub(&xs.scale(lam));
        let ns = nullspace(&pencil);
        if ns.len() != 1 {
            r.fail(Violation::new("adjoint pencil null space dimension", crate::qcore::int(ns.len() as i64)).at_m(n));
            continue;
        }
        let cand = xs.mul_vec(&ns[0]);
        if !proportional(&cand, &pu) {
            r.fail(Violation::new("X* U*_m not proportional to partner", ExactScalar::one()).at_m(n));
        }
    }
    let c = partner_scale(p);
    if let Some(x) = brf_partner(0, p)?.iter().position(|v| v != &c) {
        r.fail(Violation::new("partner_0 not constant", ExactScalar::one()).at_x(x));
    }
    Ok(r)
}

fn first_difference(a: &[ExactScalar], b: &[ExactScalar]) -> Option<(usize, ExactScalar)> {
    a.iter().zip(b).enumerate().find(|(_, (x, y))| x != y).map(|(i, (x, y))| (i, x - y))
}

/// `a` and `b` are nonzero multiples of each other.
fn proportional(a: &[ExactScalar], b: &[ExactScalar]) -> bool {
    let Some(i) = b.iter().position(|v| !v.is_zero()) else {
        return false;
    };
    let s = &a[i] / &b[i];
    !s.is_zero() && a.iter().zip(b).all(|(x, y)| *x == &s * y)
}
