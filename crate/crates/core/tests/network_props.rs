use std::collections::BTreeSet;

use proptest::prelude::*;

use wom_core::network::{generate_scale_free, generate_small_world, influential_degree, Graph};

fn arbitrary_graph() -> impl Strategy<Value = Graph> {
    (1usize..25).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(3 * n)).prop_map(move |pairs| {
            let arcs: BTreeSet<_> = pairs.into_iter().filter(|(i, j)| i != j).collect();
            Graph::from_arcs(n, arcs).unwrap()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn small_world_edge_count_is_exact(n in 5usize..120, half_k in 1usize..4, p in 0.0f64..=1.0, seed: u64) {
        let k = 2 * half_k;
        prop_assume!(k < n);
        let g = generate_small_world(n, k, p, seed).unwrap();
        prop_assert_eq!(g.edge_count(), n * k / 2);
        prop_assert!(g.is_symmetric());
        prop_assert!((0..n).all(|i| !g.has_arc(i, i)));
    }

    #[test]
    fn scale_free_edge_count_is_exact(n in 5usize..120, frac in 0.0f64..0.5, r in 1.2f64..4.0, seed: u64) {
        let max = n * (n - 1) / 2;
        let m = ((max as f64 * frac) as usize).max(1);
        let g = generate_scale_free(n, m, r, seed).unwrap();
        prop_assert_eq!(g.edge_count(), m);
        prop_assert!(g.is_symmetric());
    }

    #[test]
    fn generators_are_deterministic(seed: u64) {
        prop_assert_eq!(
            generate_small_world(60, 4, 0.2, seed).unwrap(),
            generate_small_world(60, 4, 0.2, seed).unwrap()
        );
        prop_assert_eq!(
            generate_scale_free(60, 90, 2.1, seed).unwrap(),
            generate_scale_free(60, 90, 2.1, seed).unwrap()
        );
    }

    #[test]
    fn influence_is_relabeling_invariant((g, perm) in arbitrary_graph().prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), permutation(n))
    })) {
        let d = influential_degree(&g);
        let dp = influential_degree(&g.permuted(&perm).unwrap());
        for (i, &pi) in perm.iter().enumerate() {
            prop_assert_eq!(d.as_slice()[i], dp.as_slice()[pi]);
        }
    }

    #[test]
    fn influence_is_normalized(g in arbitrary_graph()) {
        let d = influential_degree(&g);
        prop_assert!(d.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        if g.arc_count() > 0 {
            prop_assert_eq!(d.max(), 1.0);
        } else {
            prop_assert_eq!(d.max(), 0.0);
        }
    }

    #[test]
    fn edge_list_round_trip(g in arbitrary_graph()) {
        let text = g.to_edge_list();
        prop_assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }
}
