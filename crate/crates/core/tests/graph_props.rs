mod common;

use outtree::graph::{
    graft_path, is_b_appropriate, node_weighted_shortest_paths, prune_b_appropriate, shortest_path,
    tree_cost,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distances_match_path_enumeration(seed in any::<u64>(), n in 1usize..8, dens in 0.1f64..0.6) {
        let mut rng = common::rng(seed);
        let g = common::random_digraph(&mut rng, n, 4, dens);
        for s in 0..n {
            let t = node_weighted_shortest_paths(&g, s).unwrap();
            for v in 0..n {
                prop_assert_eq!(t.dist(v), common::brute_force_distance(&g, s, v));
                if let Some(path) = t.path_to(v) {
                    let c: u64 = path.iter().map(|&x| g.cost(x)).sum();
                    prop_assert_eq!(Some(c), t.dist(v));
                    prop_assert!(path.windows(2).all(|w| g.has_arc(w[0], w[1])));
                }
            }
        }
    }

    #[test]
    fn pruned_graph_is_maximal_and_appropriate(seed in any::<u64>(), n in 1usize..10, b in 1u64..12) {
        let mut rng = common::rng(seed);
        let g = common::random_digraph(&mut rng, n, 3, 0.3);
        let r = 0;
        if g.cost(r) > b {
            prop_assert!(prune_b_appropriate(&g, r, b).is_err());
            return Ok(());
        }
        let pr = prune_b_appropriate(&g, r, b).unwrap();
        prop_assert!(is_b_appropriate(&pr.graph, pr.root, b).unwrap());
        let kept = pr.map.new_to_old.clone();
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        for v in 0..n {
            let close = common::brute_force_distance(&g, r, v).is_some_and(|d| d <= b);
            prop_assert_eq!(close, pr.map.old_to_new[v].is_some());
        }
        // The induced subgraph keeps exactly the arcs between kept nodes.
        for (u, v) in pr.graph.arcs() {
            prop_assert!(g.has_arc(kept[u], kept[v]));
        }
        let expected = g
            .arcs()
            .filter(|&(u, v)| pr.map.old_to_new[u].is_some() && pr.map.old_to_new[v].is_some())
            .count();
        prop_assert_eq!(pr.graph.num_arcs(), expected);
    }

    #[test]
    fn graft_spans_union_at_union_cost(seed in any::<u64>(), n in 2usize..10) {
        let mut rng = common::rng(seed);
        let g = common::random_digraph(&mut rng, n, 3, 0.35);
        let t0 = node_weighted_shortest_paths(&g, 0).unwrap();
        for z in (0..n).filter(|&z| t0.is_reachable(z)) {
            // Shortest-path tree from z restricted to what z reaches.
            let tz = node_weighted_shortest_paths(&g, z).unwrap();
            let parent = (0..n)
                .filter(|&v| v != z && tz.is_reachable(v))
                .map(|v| (v, tz.pred[v].unwrap()))
                .collect();
            let base = outtree::OutTree::from_parents(z, parent).unwrap();
            let path = shortest_path(&g, 0, z).unwrap();
            let grafted = graft_path(&base, &path, &g).unwrap();
            prop_assert_eq!(grafted.root(), 0);
            prop_assert!(grafted.validate_in(&g).is_ok());
            let mut want = base.node_set();
            want.extend(path.nodes());
            prop_assert_eq!(grafted.node_set(), want);
            let cb = tree_cost(&base, &g).unwrap();
            let cp = tree_cost(&path, &g).unwrap();
            prop_assert_eq!(tree_cost(&grafted, &g).unwrap(), cb + cp - g.cost(z) - overlap(&base, &path, &g, z));
        }
    }

    #[test]
    fn subtree_views_partition(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = common::rng(seed);
        let (g, t) = common::bare_tree(&mut rng, n, 3);
        let c = t.cost_in(&g);
        let imm: u64 = t.immediate_subtrees().iter().map(|s| s.cost_in(&g)).sum();
        prop_assert_eq!(imm + g.cost(t.root()), c);
        prop_assert_eq!(t.strict_subtrees().len(), n - 1);
        let post = t.post_order();
        prop_assert_eq!(post.len(), n);
        prop_assert_eq!(*post.last().unwrap(), t.root());
        for (i, &v) in post.iter().enumerate() {
            // Every child appears before its parent.
            if let Some(p) = t.parent(v) {
                prop_assert!(post.iter().position(|&x| x == p).unwrap() > i);
            }
            let sub = t.full_subtree(v);
            prop_assert_eq!(sub.node_set(), t.subtree_nodes(v));
            if v != t.root() {
                let rest = t.without_subtree(v);
                prop_assert_eq!(rest.cost_in(&g) + sub.cost_in(&g), c);
            }
        }
    }
}

// Cost of path nodes other than z that the base tree also contains.
fn overlap(
    base: &outtree::OutTree,
    path: &outtree::OutTree,
    g: &outtree::Digraph,
    z: usize,
) -> u64 {
    path.nodes()
        .into_iter()
        .filter(|&v| v != z && base.contains(v))
        .map(|v| g.cost(v))
        .sum()
}

#[test]
fn tree_prize_of_chain_example() {
    let g = outtree::Digraph::new(vec![1, 1, 1], [(0, 1), (1, 2)]).unwrap();
    let p = outtree::PrizeOracle::additive(&[0, 1, 10]).unwrap();
    let t = shortest_path(&g, 0, 2).unwrap();
    assert_eq!(outtree::graph::tree_prize(&t, &p).unwrap(), 11);
    assert_eq!(tree_cost(&t, &g).unwrap(), 3);
}
