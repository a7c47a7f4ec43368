mod common;

use std::collections::BTreeSet;

use outtree::oracle::{exact_rooted, exact_sto_arcs, exact_unrooted, Caps};
use outtree::reductions::{
    bscp_build, drso_to_sto, mwbcsc_to_dso, solve_sto, sto_to_drso, undirected_lift, BscpInstance,
    MwbcscInstance, MwbcscStrategy, StoInstance,
};
use outtree::{Instance, PrizeOracle, Rational};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_sto(rng: &mut ChaCha8Rng) -> StoInstance {
    let n = rng.gen_range(1..=6);
    let mut all: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let m = rng.gen_range(0..=8.min(all.len()));
    let mut arcs = Vec::new();
    for _ in 0..m {
        let (u, v) = all.swap_remove(rng.gen_range(0..all.len()));
        arcs.push((u, v, rng.gen_range(1..=3)));
    }
    StoInstance {
        num_nodes: n,
        arcs,
        root: 0,
        budget: rng.gen_range(0..=7),
        oracle: common::random_oracle(rng, n),
    }
}

// Connected vertex sets of an undirected graph, by brute force.
fn undirected_opt(costs: &[u64], edges: &[(usize, usize)], p: &PrizeOracle, budget: u64) -> u64 {
    let n = costs.len();
    let mut best = 0;
    for mask in 1u32..1 << n {
        let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if nodes.iter().map(|&v| costs[v]).sum::<u64>() > budget {
            continue;
        }
        let mut seen = BTreeSet::from([nodes[0]]);
        let mut stack = vec![nodes[0]];
        while let Some(u) = stack.pop() {
            for &(a, b) in edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && mask >> y & 1 == 1 && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        if seen.len() == nodes.len() {
            best = best.max(p.value(nodes));
        }
    }
    best
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sto_and_split_image_share_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = random_sto(&mut rng);
        let (inst, lift) = sto_to_drso(&s, Rational::new(1, 2)).unwrap();
        prop_assert!(inst.reduction_produced);
        let arc_opt = exact_sto_arcs(&s, 8).unwrap();
        let node_opt = exact_rooted(&inst, Caps::default()).unwrap();
        prop_assert_eq!(arc_opt.optimum, node_opt.optimum);
        // Round trip of the arc-side witness.
        let t = arc_opt.tree.unwrap();
        let lifted = lift.lift(&t).unwrap();
        prop_assert!(lifted.validate_in(&inst.graph).is_ok());
        prop_assert_eq!(lifted.cost_in(&inst.graph), s.tree_cost(&t).unwrap());
        prop_assert_eq!(inst.oracle.value(lifted.nodes()), s.oracle.value(t.nodes()));
        prop_assert_eq!(lift.map_back(&lifted).unwrap(), t);
        // Mapping the node-side witness back never costs more.
        let nt = node_opt.tree.unwrap();
        let back = lift.map_back(&nt).unwrap();
        prop_assert!(s.tree_cost(&back).unwrap() <= nt.cost_in(&inst.graph));
        prop_assert_eq!(s.oracle.value(back.nodes()), node_opt.optimum);
    }

    #[test]
    fn sto_solver_respects_relaxed_budget(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = random_sto(&mut rng);
        let eps = Rational::new(1, 2);
        let sol = solve_sto(&s, eps).unwrap();
        let limit = ((Rational::from_integer(1) + eps) * Rational::from_integer(s.budget as i128)).floor().to_integer() as u64;
        prop_assert!(sol.cost <= limit);
        prop_assert_eq!(sol.cost, s.tree_cost(&sol.tree).unwrap());
        prop_assert_eq!(sol.prize, s.oracle.value(sol.tree.nodes()));
        let relaxed = StoInstance { budget: limit, ..s.clone() };
        prop_assert!(sol.prize <= exact_sto_arcs(&relaxed, 8).unwrap().optimum);
    }

    #[test]
    fn node_costs_onto_arcs_keeps_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=6);
        let g = common::random_digraph(&mut rng, n, 3, 0.3);
        if g.arcs().filter(|&(_, v)| v != 0).count() > 12 {
            return Ok(());
        }
        let p = common::random_oracle(&mut rng, n);
        let b = rng.gen_range(g.cost(0)..=8);
        let inst = Instance::rooted(g, p, 0, b, Rational::new(1, 2));
        let s = drso_to_sto(&inst).unwrap();
        prop_assert_eq!(s.budget, b - inst.graph.cost(0));
        prop_assert_eq!(
            exact_sto_arcs(&s, 12).unwrap().optimum,
            exact_rooted(&inst, Caps::default()).unwrap().optimum
        );
    }

    #[test]
    fn undirected_lift_keeps_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=8);
        let costs = common::random_costs(&mut rng, n, 1, 3);
        let edges = random_edges(&mut rng, n, 0.35);
        let g = undirected_lift(costs.clone(), &edges).unwrap();
        prop_assert_eq!(g.num_arcs(), 2 * edges.len());
        let p = common::random_oracle(&mut rng, n);
        let b = rng.gen_range(1..=8);
        let want = undirected_opt(&costs, &edges, &p, b);
        let inst = Instance::unrooted(g, p, b);
        prop_assert_eq!(exact_unrooted(&inst, Caps::default()).unwrap().optimum, want);
    }

    #[test]
    fn mwbcsc_embedding_keeps_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let k = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=8);
        let mut sets: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..k).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        // Every element needs a set.
        for x in 0..k {
            if !sets.iter().any(|s| s.contains(&x)) {
                let i = rng.gen_range(0..n);
                sets[i].push(x);
                sets[i].sort_unstable();
            }
        }
        let m = MwbcscInstance {
            element_weights: (0..k).map(|_| rng.gen_range(0..=9)).collect(),
            sets: sets.clone(),
            set_costs: common::random_costs(&mut rng, n, 1, 3),
            adjacency: random_edges(&mut rng, n, 0.4),
            budget: rng.gen_range(1..=8),
        };
        let inst = mwbcsc_to_dso(&m, MwbcscStrategy::Coverage).unwrap();
        let cov = PrizeOracle::coverage(sets, m.element_weights.iter().map(|&w| w as i64).collect()).unwrap();
        let want = undirected_opt(&m.set_costs, &m.adjacency, &cov, m.budget);
        prop_assert_eq!(exact_unrooted(&inst, Caps::default()).unwrap().optimum, want);
        // The additive strategy overcounts by at most the frequency.
        let add = mwbcsc_to_dso(&m, MwbcscStrategy::Additive).unwrap();
        let f = m.frequency() as u64;
        for mask in 0u32..1 << n {
            let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let a = add.oracle.value(nodes.iter().copied());
            let c = inst.oracle.value(nodes.iter().copied());
            prop_assert!(c <= a && a <= f * c);
        }
    }

    #[test]
    fn bscp_geometry_matches_recomputation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let pt = |rng: &mut ChaCha8Rng| (rng.gen_range(0..=10i64), rng.gen_range(0..=10i64));
        let sensors: Vec<(i64, i64)> = (0..rng.gen_range(1..=6)).map(|_| pt(&mut rng)).collect();
        let targets: Vec<(i64, i64)> = (0..rng.gen_range(0..=8)).map(|_| pt(&mut rng)).collect();
        let rs = rng.gen_range(1..=5i64);
        let rc = rng.gen_range(1..=6i64);
        let r = |x: i64| Rational::from_integer(x as i128);
        let b = BscpInstance {
            sensors: sensors.iter().map(|&(x, y)| (r(x), r(y))).collect(),
            targets: targets.iter().map(|&(x, y)| ((r(x), r(y)), 1)).collect(),
            sensing_range: r(rs),
            comm_range: r(rc),
            budget: 3,
        };
        let built = bscp_build(&b).unwrap();
        let d2 = |a: (i64, i64), c: (i64, i64)| (a.0 - c.0).pow(2) + (a.1 - c.1).pow(2);
        for (i, &s) in sensors.iter().enumerate() {
            let got: BTreeSet<usize> = built.instance.sets[i].iter().map(|&e| built.target_of_element[e]).collect();
            let want: BTreeSet<usize> = (0..targets.len()).filter(|&t| d2(s, targets[t]) <= rs * rs).collect();
            prop_assert_eq!(got, want);
            for (j, &o) in sensors.iter().enumerate().skip(i + 1) {
                let adj = built.instance.adjacency.contains(&(i, j));
                prop_assert_eq!(adj, d2(s, o) <= rc * rc);
            }
        }
        prop_assert!(built.instance.validate().is_ok());
    }
}

#[test]
fn zero_budget_sto_returns_root() {
    let s = StoInstance {
        num_nodes: 2,
        arcs: vec![(0, 1, 2)],
        root: 0,
        budget: 0,
        oracle: PrizeOracle::additive(&[4, 9]).unwrap(),
    };
    let sol = solve_sto(&s, Rational::new(1, 2)).unwrap();
    assert_eq!(sol.tree, outtree::OutTree::singleton(0));
    assert_eq!((sol.cost, sol.prize), (0, 4));
}

#[test]
fn sensors_at_exact_comm_range_are_adjacent() {
    let r = |x: i128| Rational::from_integer(x);
    let b = BscpInstance {
        sensors: vec![(r(0), r(0)), (r(3), r(4))],
        targets: vec![((r(0), r(1)), 2)],
        sensing_range: r(1),
        comm_range: r(5),
        budget: 2,
    };
    let built = bscp_build(&b).unwrap();
    assert_eq!(built.instance.adjacency, vec![(0, 1)]);
    assert_eq!(built.instance.sets, vec![vec![0], vec![]]);
}

#[test]
fn disjoint_sets_give_additive_values() {
    let m = MwbcscInstance {
        element_weights: vec![1, 2, 3],
        sets: vec![vec![0], vec![1, 2]],
        set_costs: vec![1, 1],
        adjacency: vec![(0, 1)],
        budget: 2,
    };
    let inst = mwbcsc_to_dso(&m, MwbcscStrategy::Coverage).unwrap();
    assert_eq!(inst.oracle.value([0, 1]), 6);
    assert_eq!(m.frequency(), 1);
}
