mod common;

use std::collections::BTreeSet;

use outtree::decompose::{decompose, proc_split, PieceKind};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn pieces_respect_all_bounds(seed in any::<u64>(), n in 1usize..=25, max_cost in 1u64..=4) {
        let mut rng = common::rng(seed);
        let (g, t) = common::bare_tree(&mut rng, n, max_cost);
        let c = t.cost_in(&g);
        for m in 1..=c {
            let d = decompose(&t, &g, m).unwrap();
            prop_assert!(d.len() as u64 <= 5 * (c / m));
            let mut covered = BTreeSet::new();
            for p in &d.pieces {
                let pc = p.tree.cost_in(&g);
                prop_assert!(pc <= m + g.cost(p.tree.root()));
                prop_assert_eq!(p.cost_below_root, pc - g.cost(p.tree.root()));
                // Pieces are out-subtrees of t.
                for (a, b) in p.tree.arcs() {
                    prop_assert_eq!(t.parent(b), Some(a));
                }
                covered.extend(p.tree.nodes());
            }
            prop_assert_eq!(covered, t.node_set());
            for cut in &d.cuts {
                prop_assert!(cut.pieces as u64 <= 4 * (cut.cost / m));
            }
        }
    }

    #[test]
    fn proc_split_cuts_are_infeasible_and_disjoint(seed in any::<u64>(), n in 1usize..=25) {
        let mut rng = common::rng(seed);
        let (g, t) = common::bare_tree(&mut rng, n, 3);
        let c = t.cost_in(&g);
        for m in 1..=c {
            let s = proc_split(&t, &g, m).unwrap();
            let mut seen = BTreeSet::new();
            for cut in &s.cuts {
                prop_assert!(cut.cost_in(&g) - g.cost(cut.root()) > m);
                // Every strict subtree of a cut was feasible when it was visited.
                for sub in cut.strict_subtrees() {
                    prop_assert!(sub.cost_in(&g) - g.cost(sub.root()) <= m);
                }
                for v in cut.nodes() {
                    prop_assert!(seen.insert(v));
                }
            }
            if let Some(r) = &s.residual {
                prop_assert!(r.cost_in(&g) - g.cost(r.root()) <= m);
                for v in r.nodes() {
                    prop_assert!(seen.insert(v));
                }
            }
            prop_assert_eq!(seen, t.node_set());
        }
    }
}

#[test]
fn unit_path_matches_hand_count() {
    // Path 0→1→…→8 of unit nodes, m = 3: node 4 sees 4 below and is cut;
    // 0..=3 remains with 3 below the root.
    let n = 9;
    let g = outtree::Digraph::new(vec![1; n], (1..n).map(|v| (v - 1, v))).unwrap();
    let t = outtree::OutTree::from_path(&(0..n).collect::<Vec<_>>()).unwrap();
    let s = proc_split(&t, &g, 3).unwrap();
    let roots: Vec<usize> = s.cuts.iter().map(|c| c.root()).collect();
    assert_eq!(roots, vec![4]);
    assert_eq!(s.residual.unwrap().nodes(), vec![0, 1, 2, 3]);
    let d = decompose(&t, &g, 3).unwrap();
    let kinds: Vec<PieceKind> = d.pieces.iter().map(|p| p.kind).collect();
    assert_eq!(
        kinds,
        vec![PieceKind::Heavy, PieceKind::Singleton, PieceKind::Residual]
    );
}
