//! Property tests for the combinatorial core.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use psitrop::crossratio::{decompose_primitive, evaluate, resolve_vertex, CrossRatioDatum};
use psitrop::graph::{build, Flag};
use psitrop::moduli::{distance_coordinates, MetricGraphPoint};
use std::collections::{BTreeMap, BTreeSet};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Distances are linear in the edge lengths.
    #[test]
    fn distances_scale_linearly(l0 in 1i64..40, l1 in 1i64..40, scale in 1i64..7) {
        let g = build::caterpillar(5);
        let lengths: BTreeMap<usize, BigRational> =
            BTreeMap::from([(0usize, rat(l0, 3)), (1usize, rat(l1, 2))]);
        let scaled: BTreeMap<usize, BigRational> = lengths
            .iter()
            .map(|(k, v)| (*k, v * rat(scale, 1)))
            .collect();
        let d1 = distance_coordinates(&MetricGraphPoint { graph: g.clone(), lengths }, 5).unwrap();
        let d2 = distance_coordinates(&MetricGraphPoint { graph: g, lengths: scaled }, 5).unwrap();
        for (a, b) in d1.doubled_coords.iter().zip(&d2.doubled_coords) {
            prop_assert_eq!(a * rat(scale, 1), b.clone());
        }
    }

    /// Primitive decomposition evaluates identically to the original datum
    /// on random one-step resolutions, for random zero-sum vertex data.
    #[test]
    fn decomposition_is_evaluation_equal(
        raw in proptest::collection::vec(-3i64..=3, 4),
        mask in 1u32..14,
        num in 1i64..20,
        den in 1i64..5,
    ) {
        let star = build::star(0, 6);
        let f = |m: u32| -> Flag { (star.marks[&m.to_string()], 0) };
        // one-form supported away from the start and end flags 1, 6
        let mut slopes = BTreeMap::new();
        for fl in star.flags_at(0) {
            slopes.insert(fl, 0i64);
        }
        let mut total = 0i64;
        for (k, v) in raw.iter().enumerate() {
            slopes.insert(f(k as u32 + 2), *v);
            total += v;
        }
        // rebalance on the last support flag
        let e = slopes.get_mut(&f(5)).unwrap();
        *e -= total;
        let datum = CrossRatioDatum {
            graph: star.clone(),
            path_vertices: vec![0],
            path_edges: vec![],
            start_flag: f(1),
            end_flag: f(6),
            slopes: vec![slopes],
        };
        prop_assert!(datum.validate().is_ok());
        let terms = decompose_primitive(&datum).unwrap();
        // a random one-step resolution: move 2 or 3 marked legs
        let moved: BTreeSet<Flag> = (0..4)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| f(b as u32 + 1))
            .collect();
        prop_assume!(moved.len() >= 2);
        let (fine, spec) = resolve_vertex(&star, 0, &moved, 0).unwrap();
        let lengths = BTreeMap::from([(star.edges.len(), rat(num, den))]);
        let lhs = evaluate(&datum, &fine, &lengths, &spec).unwrap();
        let rhs: BigRational = terms
            .iter()
            .map(|(c, t)| {
                BigRational::from(c.clone()) * evaluate(t, &fine, &lengths, &spec).unwrap()
            })
            .sum();
        prop_assert_eq!(lhs, rhs);
    }
}
