use proptest::prelude::*;
use varlab_cli::ingest::default_column_names;
use varlab_cli::{dump_csv, ingest_str, IngestOptions};
use varlab_core::{JointDiscreteDistribution, Rational};

fn arb_joint() -> impl Strategy<Value = JointDiscreteDistribution> {
    (1usize..4).prop_flat_map(|n| {
        prop::collection::vec(
            (prop::collection::vec((-50i64..50, 1i64..9), n), 1i64..20),
            1..12,
        )
        .prop_map(move |rows| {
            let points = rows.into_iter().map(|(coords, w)| {
                let coords = coords.into_iter().map(|(a, b)| Rational::new(a, b)).collect();
                (coords, Rational::from_integer(w))
            });
            JointDiscreteDistribution::from_weighted_points(n, points).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn dump_then_ingest_is_identity(j in arb_joint()) {
        let columns = default_column_names(j.dimension());
        let back = ingest_str(&dump_csv(&j, &columns).unwrap(), &IngestOptions::default()).unwrap();
        prop_assert_eq!(back.columns, columns);
        prop_assert_eq!(back.joint, j);
    }

    #[test]
    fn unweighted_rows_get_equal_mass(values in prop::collection::vec(-20i64..20, 1..30)) {
        let text: String = std::iter::once("x\n".to_string())
            .chain(values.iter().map(|v| format!("{v}\n")))
            .collect();
        let d = ingest_str(&text, &IngestOptions::default()).unwrap().joint.marginal(1).unwrap();
        for a in d.atoms() {
            let hits = values.iter().filter(|v| Rational::from_integer(**v) == a.value).count();
            prop_assert_eq!(&a.prob, &Rational::new(hits as i64, values.len() as i64));
        }
    }
}
