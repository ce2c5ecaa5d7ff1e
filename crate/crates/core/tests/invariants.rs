use curvagraph::generate::{pq_ball, regular_tree};
use curvagraph::rational::int;
use curvagraph::*;
use proptest::prelude::*;

fn hyperbolic_pair() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((7, 3)), Just((3, 7)), Just((4, 5)), Just((5, 4)), Just((4, 4)), Just((3, 6)), Just((6, 3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_balls_have_the_requested_degrees((p, q) in hyperbolic_pair(), radius in 1usize..4) {
        let map = pq_ball(p, q, radius).unwrap();
        prop_assert!(map.is_simple());
        for v in map.vertices().filter(|&v| !map.is_frontier(v)) {
            prop_assert_eq!(map.degree(v), p);
        }
        let faces = trace_faces(&map);
        for f in faces.complete_faces() {
            prop_assert_eq!(f.degree, FaceDegree::Known(Degree::Finite(q as u64)));
        }
    }

    #[test]
    fn serialization_round_trips((p, q) in hyperbolic_pair(), radius in 1usize..4) {
        let map = pq_ball(p, q, radius).unwrap();
        let text = serialize_map(&map);
        let again = parse_map(&text).unwrap();
        prop_assert_eq!(serialize_map(&again), text);
    }

    #[test]
    fn balls_satisfy_gauss_bonnet((p, q) in hyperbolic_pair(), r in 0usize..3) {
        let map = pq_ball(p, q, r + 1).unwrap();
        let b = ball(&map, 0, r).unwrap();
        let w: Vec<VertexId> = b.layers.concat();
        prop_assert_eq!(gauss_bonnet(&map, &w).unwrap(), int(2));
    }

    #[test]
    fn tree_balls_satisfy_gauss_bonnet(p in 2usize..6, r in 0usize..4) {
        let map = regular_tree(p, 4).unwrap();
        let w: Vec<VertexId> = ball(&map, 0, r).unwrap().layers.concat();
        prop_assert_eq!(gauss_bonnet(&map, &w).unwrap(), int(2));
    }
}

#[test]
fn hyperbolic_balls_are_tessellating_where_certified() {
    for (p, q) in [(7, 3), (4, 5), (3, 7)] {
        let map = pq_ball(p, q, 4).unwrap();
        let result = classify(&map, &trace_faces(&map), 0).unwrap();
        assert!(result.is_tessellating(), "{{{p},{q}}}: {:?}", result.witnesses);
    }
}
