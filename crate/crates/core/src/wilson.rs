//! Wilson's very-well-poised `10phi9` biorthogonal rational functions, their
//! `q^a -> infinity` limit onto the q-Hahn family, and the `q = 1` Hahn
//! family with its floating-point `q -> 1` convergence sweep.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::brf::{
    brf_partner, brf_u, normalization_prefactor, partner_scale, reduced_norm, reduced_u, unnormalized_weight,
    weight_normalization, weight_vector, Method,
};
use crate::error::{Error, Result};
use crate::linalg::GridVector;
use crate::qcore::{checked_div, format_scalar, phi_series, powi, qpoch, ExactScalar, QParams};
use crate::report::{CheckReport, Discrepancy, Metric, Violation};

/// Parameters `q, q^a, q^c, q^d, q^e` and `N`; `q^b` and `q^f` follow
/// from `q^{a+b} = q^{-N}` and `q^{a+b+c+d+e+f} = q`.
#[derive(Clone, Debug, PartialEq)]
pub struct WilsonParams {
    pub q: ExactScalar,
    pub qa: ExactScalar,
    pub qc: ExactScalar,
    pub qd: ExactScalar,
    pub qe: ExactScalar,
    pub n: usize,
    pub qb: ExactScalar,
    pub qf: ExactScalar,
}

impl WilsonParams {
    pub fn new(
        q: ExactScalar,
        qa: ExactScalar,
        qc: ExactScalar,
        qd: ExactScalar,
        qe: ExactScalar,
        n: usize,
    ) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::InvalidParams("q must avoid 0 and +-1".into()));
        }
        if [&qa, &qc, &qd, &qe].iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidParams("Wilson parameters must be nonzero".into()));
        }
        let qb = powi(&q, -(n as i64)) / &qa;
        let qf = powi(&q, n as i64 + 1) / (&qc * &qd * &qe);
        let wp = WilsonParams { q, qa, qc, qd, qe, n, qb, qf };
        wp.validate()?;
        Ok(wp)
    }

    /// The specialization `q^a = q^{-m}`, `q^d = q B / q^c`,
    /// `q^e = q / (A q^a)` whose `m -> infinity` limit is the q-Hahn system.
    pub fn from_limit(p: &QParams, qc: &ExactScalar, m: i64) -> Result<Self> {
        let q = p.q().clone();
        let qa = powi(&q, -m);
        let qd = &q * p.b() / qc;
        let qe = &q / (p.a() * &qa);
        WilsonParams::new(q, qa, qc.clone(), qd, qe, p.n())
    }

    /// Evaluates every weight, function and norm once so that invalid
    /// instances are rejected up front.
    fn validate(&self) -> Result<()> {
        for x in 0..=self.n {
            wilson_weight(x, self)?;
            for k in 0..=self.n {
                wilson_u(k, x, self)?;
                wilson_v(k, x, self)?;
            }
        }
        for k in 0..=self.n {
            wilson_h(k, self, HnVariant::Corrected)?;
        }
        Ok(())
    }
}

struct Six<'a> {
    a: &'a ExactScalar,
    b: &'a ExactScalar,
    c: &'a ExactScalar,
    d: &'a ExactScalar,
    e: &'a ExactScalar,
    f: &'a ExactScalar,
}

/// Terminating very-well-poised sum. The pair `+-q^{(a-e)/2+1}` over
/// `+-q^{(a-e)/2}` enters through `(1 - A q^{2k}) / (1 - A)`, `A = q^{a-e}`.
fn vwp_sum(n: usize, qp: &ExactScalar, q: &ExactScalar, s: Six<'_>) -> Result<ExactScalar> {
    let Six { a, b, c, d, e, f } = s;
    let ni = n as i64;
    let big_a = a / e;
    let num =
        [powi(q, -ni), big_a.clone(), q / (c * e), q / (d * e), q / (e * b), powi(q, ni) / (e * f), a * qp, a / qp];
    let den = [a * b, a * c, a * d, powi(q, 1 + ni) * a / e, powi(q, 1 - ni) * a * f, q / (e * qp), q * qp / e];
    let one = ExactScalar::one();
    let vwp_den = &one - &big_a;
    let mut sum = ExactScalar::zero();
    for k in 0..=n {
        let q2k = powi(q, 2 * k as i64);
        let mut t = checked_div(&(&one - &big_a * q2k), &vwp_den, "very-well-poised factor")? * powi(q, k as i64);
        let mut d = qpoch(q, k, q);
        for v in &num {
            t *= qpoch(v, k, q);
        }
        for v in &den {
            d *= qpoch(v, k, q);
        }
        sum += checked_div(&t, &d, "10phi9 term")?;
    }
    Ok(sum)
}

fn grid_point(x: usize, wp: &WilsonParams) -> ExactScalar {
    powi(&wp.q, x as i64) * &wp.qa
}

/// `u_n` at grid point `q^{x+a}` (Wilson's `z` set to `x`).
pub fn wilson_u(n: usize, x: usize, wp: &WilsonParams) -> Result<ExactScalar> {
    let s = Six { a: &wp.qa, b: &wp.qb, c: &wp.qc, d: &wp.qd, e: &wp.qe, f: &wp.qf };
    vwp_sum(n, &grid_point(x, wp), &wp.q, s)
}

/// `v_n`: `u_n` with `a <-> b` and `e <-> f`, at the same grid point `q^{x+a}`.
pub fn wilson_v(n: usize, x: usize, wp: &WilsonParams) -> Result<ExactScalar> {
    let s = Six { a: &wp.qb, b: &wp.qa, c: &wp.qc, d: &wp.qd, e: &wp.qf, f: &wp.qe };
    vwp_sum(n, &grid_point(x, wp), &wp.q, s)
}

pub fn wilson_weight(x: usize, wp: &WilsonParams) -> Result<ExactScalar> {
    let q = &wp.q;
    let a = &wp.qa;
    let one = ExactScalar::one();
    let a2 = a * a;
    let mut num = powi(q, x as i64) * qpoch(&a2, x, q) * (&one - &a2 * powi(q, 2 * x as i64));
    let mut den = qpoch(q, x, q) * (&one - &a2);
    for s in [&wp.qb, &wp.qc, &wp.qd, &wp.qe, &wp.qf] {
        num *= qpoch(&(a * s), x, q);
        den *= qpoch(&(q * a / s), x, q);
    }
    checked_div(&num, &den, "Wilson weight")
}

/// Forms of the diagonal norm `h_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HnVariant {
    /// The form satisfied by the diagonal sums.
    Corrected,
    /// `Corrected` without the factor `q^{-n}`.
    WithoutQPowN,
    /// `Corrected` with `(q^{a+1};q)_N` in place of `(q^{2a+1};q)_N`.
    SingleA,
    /// `Corrected` with `(q^{1-e+c};q)_n` in place of `(q^{1+a-e};q)_n`.
    CInsteadOfA,
}

impl HnVariant {
    pub const ALL: [HnVariant; 4] =
        [HnVariant::Corrected, HnVariant::WithoutQPowN, HnVariant::SingleA, HnVariant::CInsteadOfA];

    pub fn name(self) -> &'static str {
        match self {
            HnVariant::Corrected => "corrected",
            HnVariant::WithoutQPowN => "without q^(-n)",
            HnVariant::SingleA => "(q^(a+1);q)_N",
            HnVariant::CInsteadOfA => "(q^(1-e+c);q)_n",
        }
    }
}

pub fn wilson_h(n: usize, wp: &WilsonParams, variant: HnVariant) -> Result<ExactScalar> {
    let q = &wp.q;
    let (a, b, c, d, e, f) = (&wp.qa, &wp.qb, &wp.qc, &wp.qd, &wp.qe, &wp.qf);
    let big_n = wp.n;
    let first = if variant == HnVariant::SingleA { q * a } else { q * a * a };
    let mut num = qpoch(&first, big_n, q)
        * qpoch(&(q / (c * d)), big_n, q)
        * qpoch(&(q / (c * e)), big_n, q)
        * qpoch(&(q / (d * e)), big_n, q);
    let mut den = qpoch(&(b * f), big_n, q)
        * qpoch(&(q * a / c), big_n, q)
        * qpoch(&(q * a / d), big_n, q)
        * qpoch(&(q * a / e), big_n, q);
    if variant != HnVariant::WithoutQPowN {
        num *= powi(q, -(n as i64));
    }
    num *= qpoch(q, n, q) * qpoch(&(powi(q, n as i64) / (e * f)), n, q);
    den *= qpoch(&(q / (e * f)), 2 * n, q);
    let mixed = if variant == HnVariant::CInsteadOfA { q * c / e } else { q * a / e };
    num *= qpoch(&(c * d), n, q) * qpoch(&mixed, n, q) * qpoch(&(q * b / f), n, q);
    den *= qpoch(&(a * b), n, q) * qpoch(&(b * e).recip(), n, q) * qpoch(&(a * f).recip(), n, q);
    checked_div(&num, &den, "Wilson h_n")
}

/// Gram matrix `G[n][m] = sum_x w_x u_n(x) v_m(x)`.
pub fn wilson_gram(wp: &WilsonParams) -> Result<Vec<Vec<ExactScalar>>> {
    let dim = wp.n + 1;
    let w = (0..dim).map(|x| wilson_weight(x, wp)).collect::<Result<Vec<_>>>()?;
    let u = (0..dim)
        .map(|n| (0..dim).map(|x| wilson_u(n, x, wp)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let v = (0..dim)
        .map(|n| (0..dim).map(|x| wilson_v(n, x, wp)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok((0..dim).map(|n| (0..dim).map(|m| (0..dim).map(|x| &w[x] * &u[n][x] * &v[m][x]).sum()).collect()).collect())
}

/// `sum_x w_x u_n v_m = delta_{nm} h_n` with the corrected `h_n`. Each
/// alternative form of `h_n` that misses a diagonal entry is reported as a
/// discrepancy and listed in the `failing_variants` metric.
pub fn check_wilson_biorthogonality(wp: &WilsonParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("wilson_biorthogonality");
    let g = wilson_gram(wp)?;
    let mut failing = Vec::new();
    for (n, row) in g.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            if n != m && !v.is_zero() {
                r.fail(Violation::new("off-diagonal Wilson sum", v.clone()).at_n(n).at_m(m));
            }
        }
    }
    for variant in HnVariant::ALL {
        let mut ok = true;
        for n in 0..=wp.n {
            let h = wilson_h(n, wp, variant)?;
            if h != g[n][n] {
                ok = false;
                if variant == HnVariant::Corrected {
                    r.fail(Violation::new("diagonal Wilson sum - h_n", &g[n][n] - &h).at_n(n));
                } else {
                    r.discrepancies.push(Discrepancy {
                        name: format!("h_{n} with {}", variant.name()),
                        formula: h,
                        solved: g[n][n].clone(),
                    });
                    break;
                }
            }
        }
        if !ok && variant != HnVariant::Corrected {
            failing.push(variant.name());
        }
    }
    r.metric("failing_variants", Metric::Text(failing.join(", ")));
    Ok(r)
}

/// `vbar_n(x) = 3phi2(q^{-n}, q^{n+beta-N}, q^{x-N}; q^{-N}, q^{x-N+beta-alpha+2}; q, q)`.
pub fn v_bar(n: usize, p: &QParams) -> Result<GridVector> {
    let nn = p.ni();
    let ni = n as i64;
    let mut out = Vec::with_capacity(p.n() + 1);
    for x in 0..=p.n() {
        let xi = x as i64;
        let num = [p.pow(-ni, 0, 0), p.pow(ni - nn, 0, 1), p.pow(xi - nn, 0, 0)];
        let den = [p.pow(-nn, 0, 0), p.pow(xi - nn + 2, -1, 1)];
        out.push(phi_series(&num, &den, p.q(), p.q(), n + 1).map_err(|_| Error::PoleOnGrid { n, x })?);
    }
    Ok(GridVector(out))
}

/// The `q^a -> infinity` targets `(wbar, ubar, vbar, hbar)`.
pub struct LimitTargets {
    pub w: GridVector,
    pub u: Vec<GridVector>,
    pub v: Vec<GridVector>,
    pub h: Vec<ExactScalar>,
}

pub fn limit_targets(p: &QParams) -> Result<LimitTargets> {
    let dim = p.n() + 1;
    Ok(LimitTargets {
        w: unnormalized_weight(p)?,
        u: (0..dim).map(|n| reduced_u(n, p)).collect::<Result<_>>()?,
        v: (0..dim).map(|n| v_bar(n, p)).collect::<Result<_>>()?,
        h: (0..dim).map(|n| reduced_norm(n, p)).collect::<Result<_>>()?,
    })
}

/// Largest `|Wilson value - limit target|` over weights, both families
/// and norms at one point of the sequence.
fn limit_deviation(wp: &WilsonParams, t: &LimitTargets) -> Result<ExactScalar> {
    let dim = wp.n + 1;
    let mut dev = ExactScalar::zero();
    let mut bump = |a: ExactScalar, b: &ExactScalar| {
        let d = (a - b).abs();
        if d > dev {
            dev = d;
        }
    };
    for x in 0..dim {
        bump(wilson_weight(x, wp)?, &t.w[x]);
        for n in 0..dim {
            bump(wilson_u(n, x, wp)?, &t.u[n][x]);
            bump(wilson_v(n, x, wp)?, &t.v[n][x]);
        }
    }
    for n in 0..dim {
        bump(wilson_h(n, wp, HnVariant::Corrected)?, &t.h[n]);
    }
    Ok(dev)
}

/// Deviations from the limit along `q^a = q^{-m}` for each `m` in
/// `m_list`; they must strictly decrease with successive ratios below one.
/// The largest ratio is recorded as `max_ratio`.
pub fn wilson_limit_check(p: &QParams, qc: &ExactScalar, m_list: &[i64]) -> Result<CheckReport> {
    if p.q().abs() >= ExactScalar::one() {
        return Err(Error::InvalidParams("the q^a -> infinity sweep needs |q| < 1".into()));
    }
    let mut r = CheckReport::new("wilson_limit");
    let targets = limit_targets(p)?;
    let mut devs: Vec<ExactScalar> = Vec::new();
    let mut used = Vec::new();
    let mut notes = Vec::new();
    for &m in m_list {
        match WilsonParams::from_limit(p, qc, m).and_then(|wp| limit_deviation(&wp, &targets)) {
            Ok(d) => {
                devs.push(d);
                used.push(m);
            }
            Err(e) => notes.push(format!("m = {m}: {e}")),
        }
    }
    if devs.len() < 2 {
        return Ok(CheckReport::skip("wilson_limit", "fewer than two usable points"));
    }
    let mut ratios = Vec::new();
    for i in 1..devs.len() {
        if devs[i - 1].is_zero() || devs[i] >= devs[i - 1] {
            r.fail(Violation::new("deviation not strictly decreasing", devs[i].clone()).at_m(used[i] as usize));
            continue;
        }
        ratios.push(&devs[i] / &devs[i - 1]);
    }
    let max_ratio = ratios.iter().max().cloned();
    if let Some(mr) = &max_ratio {
        if mr >= &ExactScalar::one() {
            r.fail(Violation::new("ratio not below one", mr.clone()));
        }
        r.metric("max_ratio", Metric::Float(mr.to_f64().unwrap_or(f64::NAN)));
    }
    r.metric("m", Metric::ExactList(used.iter().map(|&m| crate::qcore::int(m)).collect()));
    r.metric("deviations", Metric::FloatList(devs.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect()));
    r.metric("ratios", Metric::FloatList(ratios.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect()));
    if !notes.is_empty() {
        r.metric("skipped_points", Metric::Text(notes.join("; ")));
    }
    Ok(r)
}

/// Limit data reassembled into the normalized q-Hahn objects:
/// `w = K wbar`, `U_n = P_n ubar_n`, `partner_n = c P'_n vbar_n` and
/// `H_n = K P_n c P'_n hbar_n`, where `P'_n` is the prefactor at the dual
/// parameters.
pub fn check_limit_consistency(p: &QParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("limit_consistency");
    let t = limit_targets(p)?;
    let k = weight_normalization(p)?;
    let c = partner_scale(p);
    let w = weight_vector(p)?;
    let dual = p.dual();
    if t.w.scaled(&k) != w.w {
        r.fail(Violation::new("w != K wbar", ExactScalar::one()));
    }
    for n in 0..=p.n() {
        let pn = normalization_prefactor(n, p)?;
        let pd = normalization_prefactor(n, &dual)?;
        if t.u[n].scaled(&pn) != brf_u(n, p, Method::Recurrence)? {
            r.fail(Violation::new("U_n != P_n ubar_n", ExactScalar::one()).at_n(n));
        }
        if t.v[n].scaled(&(&c * &pd)) != brf_partner(n, p)? {
            r.fail(Violation::new("partner_n != c P'_n vbar_n", ExactScalar::one()).at_n(n));
        }
        let ud = reduced_u(n, &dual)?;
        if t.v[n].iter().zip(ud.iter().rev()).any(|(a, b)| a != b) {
            r.fail(Violation::new("vbar_n(x) != ubar_n(N-x) at dual parameters", ExactScalar::one()).at_n(n));
        }
        let h = crate::brf::norm_hn(n, p)?;
        if &k * &pn * &c * &pd * &t.h[n] != h {
            r.fail(Violation::new("H_n != K P_n c P'_n hbar_n", ExactScalar::one()).at_n(n));
        }
    }
    Ok(r)
}

/// `(alpha, beta, N)` of the `q = 1` Hahn family.
#[derive(Clone, Debug, PartialEq)]
pub struct HahnParams {
    pub alpha: ExactScalar,
    pub beta: ExactScalar,
    pub n: usize,
}

impl HahnParams {
    pub fn new(alpha: ExactScalar, beta: ExactScalar, n: usize) -> Result<Self> {
        let hp = HahnParams { alpha, beta, n };
        hahn_weight(&hp)?;
        for k in 0..=n {
            hahn_u(k, &hp)?;
            hahn_v(k, &hp)?;
            hahn_h(k, &hp)?;
        }
        Ok(hp)
    }
}

/// Rising factorial `(a)_k`.
pub fn rising(a: &ExactScalar, k: usize) -> ExactScalar {
    let mut acc = ExactScalar::one();
    let mut t = a.clone();
    for _ in 0..k {
        acc *= &t;
        t += ExactScalar::one();
    }
    acc
}

/// Terminating `3F2(-n, b, c; d, e; 1)`.
fn f32_terminating(
    n: usize,
    b: &ExactScalar,
    c: &ExactScalar,
    d: &ExactScalar,
    e: &ExactScalar,
) -> Result<ExactScalar> {
    let mn = -crate::qcore::int(n as i64);
    let mut s = ExactScalar::zero();
    for k in 0..=n {
        let num = rising(&mn, k) * rising(b, k) * rising(c, k);
        let den = rising(&crate::qcore::int(1), k) * rising(d, k) * rising(e, k);
        s += checked_div(&num, &den, "3F2 term")?;
    }
    Ok(s)
}

fn hahn_common(hp: &HahnParams) -> (ExactScalar, ExactScalar) {
    let nn = crate::qcore::int(hp.n as i64);
    (nn.clone(), -nn)
}

/// `u_n(x) = 3F2(-n, n+beta-N, -x; -N, alpha-x; 1)`.
pub fn hahn_u(n: usize, hp: &HahnParams) -> Result<GridVector> {
    let (nn, mnn) = hahn_common(hp);
    let nb = crate::qcore::int(n as i64) + &hp.beta - &nn;
    (0..=hp.n)
        .map(|x| {
            let xv = crate::qcore::int(x as i64);
            f32_terminating(n, &nb, &-xv.clone(), &mnn, &(&hp.alpha - &xv))
        })
        .collect::<Result<Vec<_>>>()
        .map(GridVector)
}

/// `v_n(x) = 3F2(-n, n+beta-N, x-N; -N, x-N+beta-alpha+2; 1)`.
pub fn hahn_v(n: usize, hp: &HahnParams) -> Result<GridVector> {
    let (nn, mnn) = hahn_common(hp);
    let nb = crate::qcore::int(n as i64) + &hp.beta - &nn;
    (0..=hp.n)
        .map(|x| {
            let xn = crate::qcore::int(x as i64) - &nn;
            let e = &xn + &hp.beta - &hp.alpha + crate::qcore::int(2);
            f32_terminating(n, &nb, &xn, &mnn, &e)
        })
        .collect::<Result<Vec<_>>>()
        .map(GridVector)
}

/// `w_x = (-N)_x (1-alpha)_x / (x! (beta-alpha-N+2)_x)`; not normalized.
pub fn hahn_weight(hp: &HahnParams) -> Result<GridVector> {
    let (nn, mnn) = hahn_common(hp);
    let one = ExactScalar::one();
    let oa = &one - &hp.alpha;
    let d = &hp.beta - &hp.alpha - &nn + crate::qcore::int(2);
    (0..=hp.n)
        .map(|x| checked_div(&(rising(&mnn, x) * rising(&oa, x)), &(rising(&one, x) * rising(&d, x)), "Hahn weight"))
        .collect::<Result<Vec<_>>>()
        .map(GridVector)
}

/// `h_n = n! (-beta)_N/(alpha-beta-1)_N (beta+1)_n/(-N)_n (n+beta-N)_n/(1+beta-N)_{2n}`.
pub fn hahn_h(n: usize, hp: &HahnParams) -> Result<ExactScalar> {
    let (nn, mnn) = hahn_common(hp);
    let one = ExactScalar::one();
    let num = rising(&one, n)
        * rising(&-hp.beta.clone(), hp.n)
        * rising(&(&hp.beta + &one), n)
        * rising(&(crate::qcore::int(n as i64) + &hp.beta - &nn), n);
    let den = rising(&(&hp.alpha - &hp.beta - &one), hp.n) * rising(&mnn, n) * rising(&(&one + &hp.beta - &nn), 2 * n);
    checked_div(&num, &den, "Hahn h_n")
}

pub fn check_hahn_biorthogonality(hp: &HahnParams) -> Result<CheckReport> {
    let mut r = CheckReport::new("hahn_biorthogonality");
    let w = hahn_weight(hp)?;
    let dim = hp.n + 1;
    let u = (0..dim).map(|n| hahn_u(n, hp)).collect::<Result<Vec<_>>>()?;
    let v = (0..dim).map(|n| hahn_v(n, hp)).collect::<Result<Vec<_>>>()?;
    let mut norms = Vec::new();
    for n in 0..dim {
        for m in 0..dim {
            let g: ExactScalar = (0..dim).map(|x| &w[x] * &u[n][x] * &v[m][x]).sum();
            if n != m && !g.is_zero() {
                r.fail(Violation::new("off-diagonal Hahn sum", g).at_n(n).at_m(m));
            } else if n == m {
                let h = hahn_h(n, hp)?;
                if h != g {
                    r.fail(Violation::new("diagonal Hahn sum - h_n", &g - &h).at_n(n));
                }
                norms.push(g);
            }
        }
    }
    let total: ExactScalar = w.iter().sum();
    if total != norms[0] {
        r.fail(Violation::new("total weight - h_0", &total - &norms[0]));
    }
    r.metric("norms", Metric::ExactList(norms));
    Ok(r)
}

/// Floating-point evaluation at `q = e^h` with integer `alpha`, `beta`.
/// Every factor `1 - q^t` is computed as `-expm1(h t)`.
struct FloatQ {
    h: f64,
    alpha: f64,
    beta: f64,
    n: usize,
}

impl FloatQ {
    fn one_minus(&self, t: f64) -> f64 {
        -libm::expm1(self.h * t)
    }

    fn pow(&self, t: f64) -> f64 {
        libm::exp(self.h * t)
    }

    /// `(q^t; q)_k`.
    fn poch(&self, t: f64, k: usize) -> f64 {
        (0..k).map(|j| self.one_minus(t + j as f64)).product()
    }

    /// Terminating `3phi2` on exponents, returning the value and the sum
    /// of the absolute values of its terms.
    fn phi32(&self, num: [f64; 3], den: [f64; 2], z: f64, n: usize) -> (f64, f64) {
        let (mut s, mut mag) = (0.0, 0.0);
        for k in 0..=n {
            let mut t = self.pow(z * k as f64) / self.poch(1.0, k);
            for a in num {
                t *= self.poch(a, k);
            }
            for b in den {
                t /= self.poch(b, k);
            }
            s += t;
            mag += t.abs();
        }
        (s, mag)
    }

    fn w_bar(&self, x: usize) -> f64 {
        let (nn, a, b) = (self.n as f64, self.alpha, self.beta);
        self.pow((1.0 + b) * x as f64) * self.poch(-nn, x) * self.poch(1.0 - a, x)
            / (self.poch(1.0, x) * self.poch(b - a - nn + 2.0, x))
    }

    fn u_bar(&self, n: usize, x: usize) -> (f64, f64) {
        let (nn, a, b) = (self.n as f64, self.alpha, self.beta);
        let (nf, xf) = (n as f64, x as f64);
        self.phi32([-nf, nf + b - nn, -xf], [-nn, a - xf], a - b, n)
    }

    fn v_bar(&self, n: usize, x: usize) -> (f64, f64) {
        let (nn, a, b) = (self.n as f64, self.alpha, self.beta);
        let (nf, xf) = (n as f64, x as f64);
        self.phi32([-nf, nf + b - nn, xf - nn], [-nn, xf - nn + b - a + 2.0], 1.0, n)
    }

    fn h_bar(&self, n: usize) -> f64 {
        let (nn, a, b) = (self.n as f64, self.alpha, self.beta);
        let nf = n as f64;
        self.pow(nn * (a - 1.0 - nf)) * self.poch(1.0, n) * self.poch(-b, self.n) / self.poch(a - b - 1.0, self.n)
            * self.poch(b + 1.0, n)
            / self.poch(-nn, n)
            * self.poch(nf + b - nn, n)
            / self.poch(1.0 + b - nn, 2 * n)
    }
}

/// Deviation of the q-side quantities at `q = e^h` from the exact Hahn
/// values, for each `h` in `h_list` (decreasing). Requires integer
/// `alpha`, `beta`. The deviations must decrease and the measured order
/// `log(dev_i/dev_{i+1}) / log(h_i/h_{i+1})` must lie in `[0.5, 2]`.
pub fn qto1_convergence_check(hp: &HahnParams, h_list: &[ExactScalar]) -> Result<CheckReport> {
    if !hp.alpha.is_integer() || !hp.beta.is_integer() {
        return Err(Error::InvalidParams("the q -> 1 sweep needs integer alpha and beta".into()));
    }
    if h_list.len() < 2 || h_list.iter().any(|h| !h.is_positive()) {
        return Err(Error::InvalidParams("need at least two positive step sizes".into()));
    }
    let f = |v: &ExactScalar| v.to_f64().unwrap_or(f64::NAN);
    let dim = hp.n + 1;
    let w = hahn_weight(hp)?;
    let u = (0..dim).map(|n| hahn_u(n, hp)).collect::<Result<Vec<_>>>()?;
    let v = (0..dim).map(|n| hahn_v(n, hp)).collect::<Result<Vec<_>>>()?;
    let h = (0..dim).map(|n| hahn_h(n, hp)).collect::<Result<Vec<_>>>()?;

    let mut r = CheckReport::new("qto1_convergence");
    let mut devs = Vec::new();
    let mut u0_devs = Vec::new();
    for step in h_list {
        let fq = FloatQ { h: f(step), alpha: f(&hp.alpha), beta: f(&hp.beta), n: hp.n };
        let (mut dev, mut mag, mut u0) = (0.0f64, 0.0f64, 0.0f64);
        let mut track = |approx: f64, exact: f64, m: f64| {
            dev = dev.max((approx - exact).abs());
            mag = mag.max(m);
        };
        for x in 0..dim {
            let wb = fq.w_bar(x);
            track(wb, f(&w[x]), wb.abs());
            for n in 0..dim {
                let (ub, um) = fq.u_bar(n, x);
                let (vb, vm) = fq.v_bar(n, x);
                if n == 0 {
                    u0 = u0.max((ub - 1.0).abs());
                }
                track(ub, f(&u[n][x]), um);
                track(vb, f(&v[n][x]), vm);
            }
        }
        for n in 0..dim {
            let hb = fq.h_bar(n);
            track(hb, f(&h[n]), hb.abs());
        }
        let estimate = 64.0 * f64::EPSILON * mag;
        if estimate >= dev {
            return Err(Error::PrecisionLoss { h: fq.h, estimate, deviation: dev });
        }
        devs.push(dev);
        u0_devs.push(u0);
    }
    let mut orders = Vec::new();
    for i in 1..devs.len() {
        if devs[i] >= devs[i - 1] {
            r.fail(Violation::new(
                format!("deviation did not decrease at h = {}", format_scalar(&h_list[i])),
                ExactScalar::zero(),
            ));
            continue;
        }
        let ord = libm::log(devs[i - 1] / devs[i]) / libm::log(f(&h_list[i - 1]) / f(&h_list[i]));
        if !(0.5..=2.0).contains(&ord) {
            r.fail(Violation::new(format!("order {ord} outside [0.5, 2]"), ExactScalar::zero()));
        }
        orders.push(ord);
    }
    r.metric("deviations", Metric::FloatList(devs));
    r.metric("orders", Metric::FloatList(orders));
    r.metric("u0_deviation", Metric::FloatList(u0_devs));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{int, ratio};

    fn wilson_panel() -> Vec<WilsonParams> {
        [
            ((1, 2), (3, 1), (2, 7), (5, 3), (7, 11), 3),
            ((2, 3), (5, 2), (3, 7), (9, 5), (4, 13), 4),
            ((5, 7), (5, 9), (13, 7), (2, 5), (4, 3), 2),
        ]
        .iter()
        .map(|&(q, a, c, d, e, n)| {
            WilsonParams::new(ratio(q.0, q.1), ratio(a.0, a.1), ratio(c.0, c.1), ratio(d.0, d.1), ratio(e.0, e.1), n)
                .unwrap()
        })
        .collect()
    }

    #[test]
    fn constraints_hold() {
        for wp in wilson_panel() {
            assert_eq!(&wp.qa * &wp.qb, powi(&wp.q, -(wp.n as i64)));
            assert_eq!(&wp.qa * &wp.qb * &wp.qc * &wp.qd * &wp.qe * &wp.qf, wp.q);
        }
    }

    #[test]
    fn u0_is_one() {
        let wp = &wilson_panel()[0];
        for x in 0..=wp.n {
            assert!(wilson_u(0, x, wp).unwrap().is_one());
            assert!(wilson_v(0, x, wp).unwrap().is_one());
        }
    }

    #[test]
    fn biorthogonal_and_alternatives_fail() {
        for wp in wilson_panel() {
            let r = check_wilson_biorthogonality(&wp).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
        let wp = &wilson_panel()[1];
        let g = wilson_gram(wp).unwrap();
        for variant in [HnVariant::WithoutQPowN, HnVariant::SingleA, HnVariant::CInsteadOfA] {
            assert!((0..=wp.n).any(|n| wilson_h(n, wp, variant).unwrap() != g[n][n]), "{variant:?}");
        }
    }

    #[test]
    fn single_point_wilson() {
        let wp = WilsonParams::new(ratio(1, 2), ratio(3, 1), ratio(2, 7), ratio(5, 3), ratio(7, 11), 0).unwrap();
        assert_eq!(wilson_weight(0, &wp).unwrap(), wilson_h(0, &wp, HnVariant::Corrected).unwrap());
    }

    #[test]
    fn limit_decays_geometrically() {
        let p = QParams::from_ratios((1, 2), (3, 1), (5, 7), 3).unwrap();
        let r = wilson_limit_check(&p, &ratio(2, 7), &[8, 12, 16, 20]).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn limit_reassembles_normalized_objects() {
        for p in [
            QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap(),
            QParams::from_ratios((2, 3), (3, 1), (5, 7), 4).unwrap(),
        ] {
            let r = check_limit_consistency(&p).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
    }

    #[test]
    fn hahn_exact() {
        for (a, b, n) in [(ratio(1, 3), ratio(7, 2), 4), (ratio(-5, 2), ratio(2, 7), 6), (int(-5), int(9), 3)] {
            let hp = HahnParams::new(a, b, n).unwrap();
            assert!(hahn_u(0, &hp).unwrap().iter().all(|v| v.is_one()));
            let r = check_hahn_biorthogonality(&hp).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
    }

    #[test]
    fn qto1_first_order() {
        let hp = HahnParams::new(int(-3), int(4), 2).unwrap();
        let r = qto1_convergence_check(&hp, &[ratio(1, 8), ratio(1, 16), ratio(1, 32)]).unwrap();
        assert!(r.passed(), "{:?} {:?}", r.violations, r.metrics);
        let u0 = r.metrics.iter().find(|(k, _)| k == "u0_deviation").unwrap();
        assert_eq!(u0.1, Metric::FloatList(alloc::vec![0.0; 3]));
    }

    #[test]
    fn qto1_rejects_fractional_exponents() {
        let hp = HahnParams::new(ratio(1, 3), ratio(7, 2), 4).unwrap();
        assert!(qto1_convergence_check(&hp, &[ratio(1, 8), ratio(1, 16)]).is_err());
    }
}
