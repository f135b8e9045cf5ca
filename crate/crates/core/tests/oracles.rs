//! Independent closed forms checked against the constructed objects.

use num_traits::{One, Zero};
use qhahn_core::brf::{brf_u, eigenvalue, weight_vector, Method};
use qhahn_core::gevp::mu_coefficients;
use qhahn_core::operators::{
    build_operator, point_matrix, shift_coefficients, verify_factorization, weighted_adjoint, Basis, Operator,
};
use qhahn_core::qcore::{int, ratio};
use qhahn_core::{validate_params, ExactScalar, Matrix, QParams};

fn instances() -> Vec<QParams> {
    vec![
        QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap(),
        QParams::from_ratios((2, 3), (3, 1), (5, 7), 4).unwrap(),
        QParams::from_ratios((3, 2), (7, 5), (2, 9), 5).unwrap(),
        QParams::from_ratios((5, 7), (11, 3), (3, 13), 3).unwrap(),
    ]
    .into_iter()
    .inspect(|p| assert!(validate_params(p, p.n()).is_valid(), "{p}"))
    .collect()
}

/// Closed forms of `X*`, `Z*` and `Y*` as point-basis matrices.
fn closed_form_adjoints(p: &QParams) -> [Matrix; 3] {
    let nn = p.n() as i64;
    let d = p.n() + 1;
    let b = |i: i64, j: i64, k: i64| p.bracket(i, j, k);
    // (T^+)* and (T^-)* multipliers at x
    let tm_star = |x: i64| p.pow(1, 0, 1) * b(x - nn, 0, 0) * b(x + 1, -1, 0) / (b(x + 1, 0, 0) * b(x - nn + 2, -1, 1));
    let tp_star = |x: i64| p.pow(-1, 0, -1) * b(x, 0, 0) * b(x - nn + 1, -1, 1) / (b(x - nn - 1, 0, 0) * b(x, -1, 0));
    let mut xs = Matrix::zeros(d, d);
    let mut zs = Matrix::zeros(d, d);
    let mut ys = Matrix::zeros(d, d);
    for x in 0..d {
        let xi = x as i64;
        xs[(x, x)] = b(xi, -1, 0);
        zs[(x, x)] = -ExactScalar::one();
        ys[(x, x)] = shift_coefficients(p, xi).0;
        if x + 1 < d {
            let c = p.pow(1, -1, 1) / b(xi - nn + 2, -1, 1) * b(xi - nn, 0, 0);
            xs[(x, x + 1)] = -(&c * b(xi + 1, -1, 0));
            zs[(x, x + 1)] = c;
            ys[(x, x + 1)] = tm_star(xi) * shift_coefficients(p, xi + 1).2;
        }
        if x > 0 {
            ys[(x, x - 1)] = tp_star(xi) * shift_coefficients(p, xi - 1).1;
        }
    }
    [xs, zs, ys]
}

#[test]
fn closed_form_adjoints_match_weighted_transpose() {
    for p in instances() {
        let w = weight_vector(&p).unwrap();
        let [xs, zs, ys] = closed_form_adjoints(&p);
        for (op, closed) in [(Operator::X, xs), (Operator::Z, zs), (Operator::Y, ys)] {
            let m = build_operator(op, Basis::Point, &p).unwrap();
            let adj = weighted_adjoint(&m, &w.w).unwrap();
            assert!(adj.adjoint);
            assert_eq!(adj.matrix, closed, "{} at {p}", op.name());
        }
    }
}

#[test]
fn z_is_scaled_x() {
    for p in instances() {
        let x = point_matrix(Operator::X, &p).unwrap();
        let z = point_matrix(Operator::Z, &p).unwrap();
        let d = p.n() + 1;
        let s = Matrix::from_fn(d, d, |i, j| if i == j { -(p.bracket(i as i64, -1, 0).recip()) } else { int(0) });
        assert_eq!(s.mul(&x), z);
    }
}

#[test]
fn x_on_constant_is_bracket_of_minus_alpha() {
    // [x - alpha] - q^{-alpha}[x] = [-alpha]
    for p in instances() {
        let x = point_matrix(Operator::X, &p).unwrap();
        let one = vec![ExactScalar::one(); p.n() + 1];
        assert!(x.mul_vec(&one).iter().all(|v| *v == p.bracket(0, -1, 0)));
    }
}

#[test]
fn y_annihilates_u0_and_lambda0_vanishes() {
    for p in instances() {
        assert!(eigenvalue(0, &p).is_zero());
        let y = point_matrix(Operator::Y, &p).unwrap();
        let u0 = brf_u(0, &p, Method::Recurrence).unwrap();
        assert!(y.mul_vec(&u0).iter().all(Zero::is_zero));
    }
}

#[test]
fn worked_instance_factorizes() {
    let p = QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap();
    let r = verify_factorization(&p).unwrap();
    assert!(r.passed());
    assert!(r.point_deviation.is_zero() && r.phi_deviation.is_zero());
    assert!(!r.unshifted_variant_deviation.is_zero());
}

#[test]
fn single_point_grid() {
    let p = QParams::from_ratios((2, 3), (5, 1), (7, 3), 0).unwrap();
    assert!(verify_factorization(&p).unwrap().passed());
    let w = weight_vector(&p).unwrap();
    assert_eq!(w.values(), &[int(1)]);
}

#[test]
fn low_index_mu_vanish_at_zero() {
    for p in instances() {
        let mu = mu_coefficients(0, &p).unwrap();
        assert!(mu.get(3).is_zero());
        assert!(mu.get(9).is_zero());
        assert!(mu.get(6).is_zero());
    }
}

#[test]
fn z_point_matrix_display() {
    // diagonal -1, subdiagonal [-x]/[alpha - x]
    let p = QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap();
    let z = point_matrix(Operator::Z, &p).unwrap();
    for i in 0..4 {
        assert_eq!(z[(i, i)], int(-1));
        for j in 0..4 {
            if j + 1 == i {
                let xi = i as i64;
                assert_eq!(z[(i, j)], p.bracket(-xi, 0, 0) / p.bracket(-xi, 1, 0));
            } else if i != j {
                assert!(z[(i, j)].is_zero());
            }
        }
    }
    assert_ne!(z[(1, 0)], ratio(0, 1));
}
