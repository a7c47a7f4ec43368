mod common;

use outtree::solver::{candidate_tree, solve, solve_drao, solve_drso, solve_dso_unrooted};
use outtree::{Error, Instance, Rational, Variant};
use proptest::prelude::*;
use rand::Rng;

const EPSILONS: [(i128, i128); 3] = [(1, 4), (1, 2), (1, 1)];

fn rooted_instance(seed: u64, max_n: usize, additive: bool) -> Instance {
    let mut rng = common::rng(seed);
    let n = rng.gen_range(1..=max_n);
    let density = rng.gen_range(0.15..0.5);
    let g = common::random_digraph(&mut rng, n, 3, density);
    let p = if additive {
        common::random_additive(&mut rng, n, 9)
    } else {
        common::random_oracle(&mut rng, n)
    };
    let b = rng.gen_range(g.cost(0)..=9);
    let (en, ed) = EPSILONS[rng.gen_range(0..3)];
    Instance::rooted(g, p, 0, b, Rational::new(en, ed))
}

fn upper(inst: &Instance) -> u64 {
    ((Rational::from_integer(1) + inst.epsilon) * Rational::from_integer(inst.budget as i128))
        .floor()
        .to_integer() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn drso_budget_and_guarantees(seed in any::<u64>()) {
        let inst = rooted_instance(seed, 9, false).with_variant(Variant::SubmodularRooted);
        let rep = solve_drso(&inst).unwrap();
        prop_assert_eq!(rep.tree.root(), 0);
        prop_assert!(rep.tree.validate_in(&inst.graph).is_ok());
        prop_assert_eq!(rep.cost, rep.tree.cost_in(&inst.graph));
        prop_assert_eq!(rep.prize, inst.oracle.value(rep.tree.nodes()));
        prop_assert!(rep.cost <= upper(&inst));
        prop_assert!(rep.within_budget());
        let opt = common::brute_force_opt(&inst.graph, &inst.oracle, Some(0), inst.budget);
        // The output may use up to (1+ε)B, so compare with the optimum there.
        let opt_relaxed = common::brute_force_opt(&inst.graph, &inst.oracle, Some(0), upper(&inst));
        prop_assert!(rep.prize <= opt_relaxed);
        for c in rep.check_against(opt) {
            prop_assert!(c.holds, "{} failed: {} < {}", c.name, c.value, c.bound);
        }
    }

    #[test]
    fn drao_budget_and_guarantees(seed in any::<u64>()) {
        let inst = rooted_instance(seed, 9, true);
        prop_assert_eq!(inst.variant, Variant::AdditiveRooted);
        let rep = solve_drao(&inst).unwrap();
        prop_assert!(rep.cost <= upper(&inst));
        let opt = common::brute_force_opt(&inst.graph, &inst.oracle, Some(0), inst.budget);
        for c in rep.check_against(opt) {
            prop_assert!(c.holds, "{} failed: {} < {}", c.name, c.value, c.bound);
        }
    }

    #[test]
    fn unrooted_budget_and_guarantee(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=9);
        let density = rng.gen_range(0.15..0.5);
        let g = common::random_digraph(&mut rng, n, 5, density);
        let p = common::random_oracle(&mut rng, n);
        let b = rng.gen_range(1..=9);
        let inst = Instance::unrooted(g, p, b);
        let min_cost = (0..n).map(|v| inst.graph.cost(v)).min().unwrap();
        if min_cost > b {
            prop_assert!(matches!(solve_dso_unrooted(&inst), Err(Error::Infeasible(_))));
            return Ok(());
        }
        let rep = solve_dso_unrooted(&inst).unwrap();
        prop_assert!(rep.tree.validate_in(&inst.graph).is_ok());
        prop_assert!(rep.cost <= b);
        let opt = common::brute_force_opt(&inst.graph, &inst.oracle, None, b);
        prop_assert!(rep.prize <= opt);
        for c in rep.check_against(opt) {
            prop_assert!(c.holds, "{} failed: {} < {}", c.name, c.value, c.bound);
        }
    }

    #[test]
    fn reruns_are_identical(seed in any::<u64>()) {
        let inst = rooted_instance(seed, 10, false);
        prop_assert_eq!(solve(&inst).unwrap(), solve(&inst).unwrap());
    }

    #[test]
    fn candidates_stay_in_their_ball(seed in any::<u64>()) {
        let inst = rooted_instance(seed, 10, false);
        let g = &inst.graph;
        let k = outtree::isqrt(inst.budget) as usize + 1;
        for u in 0..g.num_nodes() {
            let c = candidate_tree(g, u, inst.budget, &inst.oracle).unwrap();
            prop_assert_eq!(c.tree.root(), u);
            prop_assert!(c.tree.validate_in(g).is_ok());
            prop_assert!(c.greedy.selected.len() <= k);
            for &v in &c.greedy.selected {
                let d = common::brute_force_distance(g, u, v).unwrap();
                prop_assert!(d <= g.cost(u) + outtree::isqrt(inst.budget));
            }
            // Leaves of the path union are selected nodes.
            for v in c.tree.nodes() {
                if c.tree.children(v).is_empty() {
                    prop_assert!(c.greedy.selected.contains(&v));
                }
            }
        }
    }
}

#[test]
fn chain_example() {
    let g = outtree::Digraph::new(vec![1, 1, 1], [(0, 1), (1, 2)]).unwrap();
    let p = outtree::PrizeOracle::additive(&[0, 1, 10]).unwrap();
    let inst = Instance::rooted(g, p, 0, 2, Rational::new(1, 2));
    let rep = solve(&inst).unwrap();
    assert!(rep.cost <= 3);
    assert!(rep.within_budget());
}

#[test]
fn expensive_root_is_rejected() {
    let g = outtree::Digraph::new(vec![5, 1], [(0, 1)]).unwrap();
    let p = outtree::PrizeOracle::additive(&[1, 1]).unwrap();
    let inst = Instance::rooted(g, p, 0, 3, Rational::new(1, 2));
    assert!(matches!(solve(&inst), Err(Error::InfeasibleRoot { .. })));
}

#[test]
fn variant_mismatch_is_reported() {
    let g = outtree::Digraph::new(vec![1, 1], [(0, 1)]).unwrap();
    let p = outtree::PrizeOracle::coverage(vec![vec![0], vec![0]], vec![3]).unwrap();
    let inst = Instance::rooted(g, p, 0, 2, Rational::new(1, 2));
    assert_eq!(inst.variant, Variant::SubmodularRooted);
    assert!(matches!(solve_drao(&inst), Err(Error::VariantMismatch(_))));
    assert!(matches!(
        solve_dso_unrooted(&inst),
        Err(Error::VariantMismatch(_))
    ));
}

#[test]
fn saddled_run_uses_the_heavy_node() {
    // Node 0 costs 5 of B = 7 and carries most of the prize; only saddled
    // runs keep it, with 2 units left for the cheap nodes.
    let g = outtree::Digraph::new(vec![5, 1, 1], [(0, 1), (1, 2)]).unwrap();
    let p = outtree::PrizeOracle::additive(&[10, 1, 1]).unwrap();
    let rep = solve_dso_unrooted(&Instance::unrooted(g, p, 7)).unwrap();
    assert!(rep.prize >= 11);
    assert!(rep.cost <= 7);
    assert!(rep.run.starts_with("saddled"), "{}", rep.run);
}
