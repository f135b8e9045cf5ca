//! Exports parse back to exactly the values they were written from.

use proptest::prelude::*;
use qhahn_cli::export::{compute, read_csv, read_json, render, to_csv, to_json, Exported, Format, What};
use qhahn_core::operators::{Basis, Operator};
use qhahn_core::{validate_params, QParams};

fn valid_params() -> impl Strategy<Value = QParams> {
    let qs = vec![(1, 2), (2, 3), (3, 2), (5, 7)];
    (prop::sample::select(qs), -12i64..13, 1i64..13, -12i64..13, 1i64..13, 0usize..5).prop_filter_map(
        "degenerate instance",
        |(q, an, ad, bn, bd, n)| {
            let p = QParams::from_ratios(q, (an, ad), (bn, bd), n).ok()?;
            validate_params(&p, n).is_valid().then_some(p)
        },
    )
}

/// `(what, which, basis)`; the brf index is reduced onto the grid.
fn request(
    p: &QParams,
    kind: usize,
    op: Operator,
    phi: bool,
    idx: prop::sample::Index,
) -> (What, Option<String>, Basis) {
    let basis = if phi { Basis::Phi } else { Basis::Point };
    match kind {
        0 => (What::Matrix, Some(op.name().to_string()), basis),
        1 => (What::Brf, Some(idx.index(p.n() + 1).to_string()), Basis::Point),
        _ => (What::Weight, None, Basis::Point),
    }
}

fn cells(e: &Exported) -> Vec<Vec<qhahn_core::ExactScalar>> {
    match e {
        Exported::Matrix { rows, .. } => rows.clone(),
        Exported::Brf { values, .. } | Exported::Weight { values } => values.iter().map(|v| vec![v.clone()]).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn json_and_csv_round_trip(
        p in valid_params(),
        kind in 0usize..3,
        op in prop::sample::select(Operator::ALL.to_vec()),
        phi in prop::bool::ANY,
        idx in any::<prop::sample::Index>(),
    ) {
        let (what, which, basis) = request(&p, kind, op, phi, idx);
        let e = compute(what, which.as_deref(), basis, &p).unwrap();
        prop_assert_eq!(&read_json(&to_json(&e, &p)).unwrap(), &e);
        prop_assert_eq!(read_csv(&to_csv(&e), what).unwrap(), cells(&e));
        prop_assert_eq!(render(&e, &p, Format::Json), to_json(&e, &p));
    }
}

#[test]
fn out_of_range_index_is_refused() {
    let p = QParams::from_ratios((1, 2), (32, 1), (1, 512), 3).unwrap();
    assert!(compute(What::Brf, Some("4"), Basis::Point, &p).is_err());
    assert!(compute(What::Brf, Some("3"), Basis::Point, &p).is_ok());
}
