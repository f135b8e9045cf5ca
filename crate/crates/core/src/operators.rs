//! The operators `X`, `Y`, `Z`, `V` as exact matrices on the grid
//! `x = 0..=N`, in the point basis `e_k(x) = delta_{k,x}` and in the
//! rational basis `phi_n(x) = (q^{-x};q)_n / (q^{alpha-x};q)_n`.
//!
//! Phi-basis matrices act on coefficient vectors: column `n` holds the
//! expansion of `M phi_n`, so that `M_point * Phi = Phi * M_phi` where
//! `Phi[x][n] = phi_n(x)` (see [`basis_change`]).

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::brf::eigenvalue;
use crate::error::{Error, Result};
use crate::linalg::{lower_solve, GridVector, Matrix};
use crate::qcore::{checked_div, qpoch, ExactScalar, QParams};
use crate::report::{CheckReport, Discrepancy, Metric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    X,
    Y,
    Z,
    V,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::X, Operator::Y, Operator::Z, Operator::V];

    pub fn name(self) -> &'static str {
        match self {
            Operator::X => "X",
            Operator::Y => "Y",
            Operator::Z => "Z",
            Operator::V => "V",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Point,
    Phi,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Point => "point",
            Basis::Phi => "phi",
        }
    }
}

/// An operator matrix tagged with its basis and parameter instance.
#[derive(Clone, Debug, PartialEq)]
pub struct OpMatrix {
    pub op: Operator,
    pub basis: Basis,
    /// True for the weighted adjoint `M*`.
    pub adjoint: bool,
    pub matrix: Matrix,
    pub params: QParams,
}

/// Coefficients `(A_0(x), A_1(x), A_2(x))` of `Y = A_1 T^+ + A_2 T^- + A_0`.
pub fn shift_coefficients(p: &QParams, x: i64) -> (ExactScalar, ExactScalar, ExactScalar) {
    let n = p.ni();
    let a1 = p.pow(-x, 0, 1) * p.bracket(x - n, 0, 0) * p.bracket(x + 1, -1, 0) * p.bracket(x, -1, 0);
    let a2 = p.pow(-x, 0, 0) * p.bracket(x, 0, 0) * p.bracket(x - n, -1, 1) * p.bracket(x, -1, 0);
    let a0 = -(&a1 + &a2);
    (a0, a1, a2)
}

fn point_x(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    let qa = p.pow(0, -1, 0);
    Matrix::from_fn(dim, dim, |i, j| {
        let x = i as i64;
        if i == j {
            p.bracket(x, -1, 0)
        } else if i == j + 1 {
            -(&qa * p.bracket(x, 0, 0))
        } else {
            ExactScalar::zero()
        }
    })
}

fn point_y(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let (a0, a1, a2) = shift_coefficients(p, i as i64);
        m[(i, i)] = a0;
        if i + 1 < dim {
            m[(i, i + 1)] = a1;
        }
        if i > 0 {
            m[(i, i - 1)] = a2;
        }
    }
    m
}

fn point_z(p: &QParams) -> Result<Matrix> {
    let dim = p.n() + 1;
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let x = i as i64;
        m[(i, i)] = -ExactScalar::one();
        if i > 0 {
            m[(i, i - 1)] = checked_div(&p.bracket(-x, 0, 0), &p.bracket(-x, 1, 0), "Z: [alpha - x]_q")?;
        }
    }
    Ok(m)
}

/// Diagonal of `V` in the point basis.
fn point_v_diagonal(p: &QParams, x: i64, with_shift_factor: bool) -> ExactScalar {
    let n = p.ni();
    let lead = if with_shift_factor { p.pow(1 - x, -1, 1) } else { p.pow(1, -1, 1) };
    lead * p.bracket(x, 0, 0) * p.bracket(x - n - 1, 0, 0)
        - p.pow(-x, 0, 1) * p.bracket(x - n, 0, 0) * p.bracket(x + 1, -1, 0)
        - p.pow(-x, 0, 0) * p.bracket(x, 0, 0) * p.bracket(x - n, -1, 1)
}

fn point_v_with(p: &QParams, with_shift_factor: bool) -> Result<Matrix> {
    let dim = p.n() + 1;
    let q = p.q();
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let x = i as i64;
        if i + 1 < dim {
            m[(i, i + 1)] = p.pow(-x, 0, 1) * p.bracket(x - p.ni(), 0, 0) * p.bracket(x + 1, -1, 0);
        }
        m[(i, i)] = point_v_diagonal(p, x, with_shift_factor);
        // (T^-)^k for k > x leaves the grid and contributes nothing
        let lead = p.pow(1 - x, -1, 1) * p.bracket(-1, 1, -1) * p.bracket(-1, 1, 0);
        let (num_base, den_base) = (p.pow(-x, 0, 0), p.pow(-x, 1, 0));
        for k in 1..=i {
            let ratio = checked_div(&qpoch(&num_base, k, q), &qpoch(&den_base, k, q), "V: (q^{alpha-x};q)_k")?;
            m[(i, i - k)] = &lead * p.pow(k as i64, 0, 0) * ratio;
        }
    }
    Ok(m)
}

/// Point-basis `V` whose diagonal lacks the `q^{-x}` factor in its first
/// term. It does not satisfy `Y = XV`; kept as a negative control.
pub fn point_v_without_shift_factor(p: &QParams) -> Result<Matrix> {
    point_v_with(p, false)
}

/// `nu_n^{(1)}, nu_n^{(2)}, nu_n^{(3)}` of the tridiagonal phi-basis action of `Y`.
pub fn nu_coefficients(n: i64, p: &QParams) -> [ExactScalar; 3] {
    let nn = p.ni();
    let nu1 = -(p.bracket(-n, 0, 0) * p.bracket(n, 0, 0) * p.bracket(n - nn, 0, 1));
    let nu2 = p.bracket(-n, 0, 0) * p.bracket(n - nn, 0, 1) * p.bracket(n, -1, 0)
        + p.pow(0, -1, 1) * p.bracket(n, 0, 0) * p.bracket(n - nn - 1, 0, 0) * p.bracket(1 - n, 0, 0);
    let nu3 = -(p.pow(0, -2, 1) * p.bracket(n, 0, 0) * p.bracket(n - nn - 1, 0, 0) * p.bracket(1 - n, 1, 0));
    [nu1, nu2, nu3]
}

fn phi_x(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    Matrix::from_fn(dim, dim, |i, j| {
        let n = j as i64;
        if i == j {
            p.bracket(n, -1, 0)
        } else if i == j + 1 {
            -p.bracket(n, 0, 0)
        } else {
            ExactScalar::zero()
        }
    })
}

fn phi_y(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    let mut m = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let [nu1, nu2, nu3] = nu_coefficients(j as i64, p);
        m[(j, j)] = nu2;
        if j + 1 < dim {
            m[(j + 1, j)] = nu1;
        }
        if j > 0 {
            m[(j - 1, j)] = nu3;
        }
    }
    m
}

fn phi_z(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    Matrix::from_fn(dim, dim, |i, j| {
        if i == j {
            -ExactScalar::one()
        } else if i == j + 1 {
            ExactScalar::one()
        } else {
            ExactScalar::zero()
        }
    })
}

fn phi_v(p: &QParams) -> Matrix {
    let dim = p.n() + 1;
    let nn = p.ni();
    Matrix::from_fn(dim, dim, |i, j| {
        let n = j as i64;
        if i == j {
            eigenvalue(j, p)
        } else if i + 1 == j {
            p.pow(1 - n, -1, 1) * p.bracket(n, 0, 0) * p.bracket(n - nn - 1, 0, 0)
        } else {
            ExactScalar::zero()
        }
    })
}

pub fn build_operator(which: Operator, basis: Basis, p: &QParams) -> Result<OpMatrix> {
    let matrix = match (which, basis) {
        (Operator::X, Basis::Point) => point_x(p),
        (Operator::Y, Basis::Point) => point_y(p),
        (Operator::Z, Basis::Point) => point_z(p)?,
        (Operator::V, Basis::Point) => point_v_with(p, true)?,
        (Operator::X, Basis::Phi) => phi_x(p),
        (Operator::Y, Basis::Phi) => phi_y(p),
        (Operator::Z, Basis::Phi) => phi_z(p),
        (Operator::V, Basis::Phi) => phi_v(p),
    };
    Ok(OpMatrix { op: which, basis, adjoint: false, matrix, params: p.clone() })
}

/// Point-basis matrix of one generator; shorthand used throughout the checks.
pub fn point_matrix(which: Operator, p: &QParams) -> Result<Matrix> {
    build_operator(which, Basis::Point, p).map(|m| m.matrix)
}

/// `phi_n(x)`.
pub fn phi_value(n: usize, x: usize, p: &QParams) -> Result<ExactScalar> {
    let q = p.q();
    let xi = x as i64;
    let den = qpoch(&p.pow(-xi, 1, 0), n, q);
    if den.is_zero() {
        return Err(Error::PoleOnGrid { n, x });
    }
    Ok(qpoch(&p.pow(-xi, 0, 0), n, q) / den)
}

/// `(N+1) x (n_max+1)` matrix with `Phi[x][n] = phi_n(x)`.
pub fn basis_change(p: &QParams, n_max: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(p.n() + 1, n_max + 1);
    for x in 0..=p.n() {
        for n in 0..=n_max {
            m[(x, n)] = phi_value(n, x, p)?;
        }
    }
    Ok(m)
}

/// `M* = W^{-1} M^T W` with `W = diag(w)`, the adjoint for
/// `(f, g)_w = sum_x w_x f(x) g(x)`.
pub fn weighted_adjoint(m: &OpMatrix, w: &GridVector) -> Result<OpMatrix> {
    if m.basis != Basis::Point {
        return Err(Error::InvalidParams("weighted adjoint needs a point-basis matrix".into()));
    }
    let dim = m.matrix.rows();
    if w.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: w.len() });
    }
    if let Some(x) = w.iter().position(Zero::is_zero) {
        return Err(Error::ZeroWeight { x });
    }
    let matrix = Matrix::from_fn(dim, dim, |i, j| &m.matrix[(j, i)] * &w[j] / &w[i]);
    Ok(OpMatrix { adjoint: !m.adjoint, matrix, ..m.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    /// `max |Y - XV|` in the point basis.
    pub point_deviation: ExactScalar,
    /// `max |Y - XV|` in the phi basis.
    pub phi_deviation: ExactScalar,
    /// Point-basis `V` equals `X^{-1} Y` obtained by forward substitution.
    pub v_matches_forward_solve: bool,
    /// `max |Y - X V'|` for the variant `V'` lacking the `q^{-x}` factor.
    pub unshifted_variant_deviation: ExactScalar,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.point_deviation.is_zero() && self.phi_deviation.is_zero() && self.v_matches_forward_solve
    }

    pub fn to_check_report(&self) -> CheckReport {
        let mut r = CheckReport::new("factorization");
        if !self.point_deviation.is_zero() {
            r.fail(crate::report::Violation::new("Y - XV (point basis)", self.point_deviation.clone()));
        }
        if !self.phi_deviation.is_zero() {
            r.fail(crate::report::Violation::new("Y - XV (phi basis)", self.phi_deviation.clone()));
        }
        if !self.v_matches_forward_solve {
            r.fail(crate::report::Violation::new("V != X^{-1} Y", ExactScalar::one()));
        }
        r.metric("point_deviation", Metric::Exact(self.point_deviation.clone()));
        r.metric("phi_deviation", Metric::Exact(self.phi_deviation.clone()));
        if !self.unshifted_variant_deviation.is_zero() {
            r.discrepancies.push(Discrepancy {
                name: "max |Y - XV| with V diagonal lacking q^(-x)".into(),
                formula: self.unshifted_variant_deviation.clone(),
                solved: ExactScalar::zero(),
            });
        }
        r
    }
}

pub fn verify_factorization(p: &QParams) -> Result<FactorizationReport> {
    let x = point_matrix(Operator::X, p)?;
    let y = point_matrix(Operator::Y, p)?;
    let v = point_matrix(Operator::V, p)?;
    let point_deviation = y.sub(&x.mul(&v)).max_abs();

    let xp = phi_x(p);
    let phi_deviation = phi_y(p).sub(&xp.mul(&phi_v(p))).max_abs();

    let v_matches_forward_solve = match lower_solve(&x, &y) {
        Ok(solved) => solved == v,
        // X singular: [x - alpha]_q = 0 somewhere, no forward solve to compare
        Err(_) => false,
    };

    let unshifted = point_v_without_shift_factor(p)?;
    let unshifted_variant_deviation = y.sub(&x.mul(&unshifted)).max_abs();

    Ok(FactorizationReport { point_deviation, phi_deviation, v_matches_forward_solve, unshifted_variant_deviation })
}

/// Phi-basis consistency `M_point * Phi = Phi * M_phi` for each generator;
/// returns the generators that fail.
pub fn basis_consistency(p: &QParams) -> Result<Vec<Operator>> {
    let phi = basis_change(p, p.n())?;
    let mut bad = Vec::new();
    for op in Operator::ALL {
        let mp = point_matrix(op, p)?;
        let mf = build_operator(op, Basis::Phi, p)?.matrix;
        if mp.mul(&phi) != phi.mul(&mf) {
            bad.push(op);
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::int;

    fn panel() -> Vec<QParams> {
        alloc::vec![
            QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap(),
            QParams::from_ratios((2, 3), (3, 1), (5, 7), 4).unwrap(),
            QParams::from_ratios((3, 2), (7, 5), (2, 9), 5).unwrap(),
        ]
    }

    #[test]
    fn z_phi_is_unit_bidiagonal() {
        let p = &panel()[0];
        let z = build_operator(Operator::Z, Basis::Phi, p).unwrap().matrix;
        for n in 0..=p.n() {
            assert_eq!(z[(n, n)], int(-1));
            if n < p.n() {
                assert_eq!(z[(n + 1, n)], int(1));
            }
        }
        assert!(z.within_band(1, 0));
    }

    #[test]
    fn y_annihilates_constants() {
        for p in panel() {
            let y = point_matrix(Operator::Y, &p).unwrap();
            let ones = GridVector::constant(p.n() + 1, int(1));
            assert!(y.mul_vec(&ones).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn x_diagonal_entries() {
        for p in panel() {
            let x = point_matrix(Operator::X, &p).unwrap();
            for i in 0..=p.n() {
                assert_eq!(x[(i, i)], p.bracket(i as i64, -1, 0));
            }
        }
    }

    #[test]
    fn point_shapes() {
        for p in panel() {
            let x = point_matrix(Operator::X, &p).unwrap();
            let y = point_matrix(Operator::Y, &p).unwrap();
            let z = point_matrix(Operator::Z, &p).unwrap();
            assert!(x.within_band(1, 0) && x.diagonal_nonzero(-1));
            assert!(z.within_band(1, 0) && z.diagonal_nonzero(-1));
            assert!(y.within_band(1, 1) && y.diagonal_nonzero(1) && y.diagonal_nonzero(-1));
        }
    }

    #[test]
    fn phi_shapes() {
        for p in panel() {
            let get = |op| build_operator(op, Basis::Phi, &p).unwrap().matrix;
            assert!(get(Operator::X).within_band(1, 0));
            assert!(get(Operator::Z).within_band(1, 0));
            assert!(get(Operator::Y).within_band(1, 1));
            assert!(get(Operator::V).within_band(0, 1));
        }
    }

    #[test]
    fn z_is_scaled_x() {
        for p in panel() {
            let x = point_matrix(Operator::X, &p).unwrap();
            let z = point_matrix(Operator::Z, &p).unwrap();
            let dim = p.n() + 1;
            let d = Matrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    -p.bracket(i as i64, -1, 0).recip()
                } else {
                    ExactScalar::zero()
                }
            });
            assert_eq!(d.mul(&x), z);
        }
    }

    #[test]
    fn basis_change_columns() {
        let p = &panel()[1];
        let phi = basis_change(p, p.n()).unwrap();
        for x in 0..=p.n() {
            assert_eq!(phi[(x, 0)], int(1));
        }
        for n in 1..=p.n() {
            assert!(phi[(0, n)].is_zero());
        }
        assert!(basis_consistency(p).unwrap().is_empty());
    }

    #[test]
    fn basis_change_pole() {
        // A = q^2 puts a pole of phi_1 at x = 2
        let p = QParams::from_ratios((1, 2), (1, 4), (5, 7), 3).unwrap();
        assert_eq!(basis_change(&p, 1), Err(Error::PoleOnGrid { n: 1, x: 2 }));
    }

    #[test]
    fn factorization_including_degenerate_grid() {
        for p in panel() {
            let r = verify_factorization(&p).unwrap();
            assert!(r.passed(), "{p}");
            assert!(!r.unshifted_variant_deviation.is_zero());
        }
        let p = QParams::from_ratios((1, 2), (3, 1), (5, 7), 0).unwrap();
        assert!(verify_factorization(&p).unwrap().passed());
    }

    #[test]
    fn adjoint_of_identity_and_involution() {
        let p = &panel()[1];
        let w = GridVector((1..=p.n() as i64 + 1).map(int).collect());
        let id = OpMatrix {
            op: Operator::X,
            basis: Basis::Point,
            adjoint: false,
            matrix: Matrix::identity(p.n() + 1),
            params: p.clone(),
        };
        assert_eq!(weighted_adjoint(&id, &w).unwrap().matrix, id.matrix);
        let y = build_operator(Operator::Y, Basis::Point, p).unwrap();
        let back = weighted_adjoint(&weighted_adjoint(&y, &w).unwrap(), &w).unwrap();
        assert_eq!(back.matrix, y.matrix);
        assert!(!back.adjoint);
        let mut bad = w.clone();
        bad[2] = int(0);
        assert_eq!(weighted_adjoint(&y, &bad), Err(Error::ZeroWeight { x: 2 }));
    }
}
