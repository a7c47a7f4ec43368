// Shared generators and brute-force references for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use outtree::graph::{Digraph, OutTree};
use outtree::{NodeId, PrizeOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_costs(rng: &mut ChaCha8Rng, n: usize, lo: u64, hi: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, max_cost: u64, density: f64) -> Digraph {
    let costs = random_costs(rng, n, 1, max_cost);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::new(costs, arcs).unwrap()
}

pub fn random_additive(rng: &mut ChaCha8Rng, n: usize, max_w: i64) -> PrizeOracle {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_w)).collect();
    PrizeOracle::additive(&w).unwrap()
}

pub fn random_coverage(rng: &mut ChaCha8Rng, n: usize, elements: usize, max_w: i64) -> PrizeOracle {
    let weights: Vec<i64> = (0..elements).map(|_| rng.gen_range(0..=max_w)).collect();
    let sets = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=3.min(elements));
            let mut s: Vec<usize> = (0..k).map(|_| rng.gen_range(0..elements)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    PrizeOracle::coverage(sets, weights).unwrap()
}

pub fn random_oracle(rng: &mut ChaCha8Rng, n: usize) -> PrizeOracle {
    if rng.gen_bool(0.5) {
        random_additive(rng, n, 9)
    } else {
        let e = rng.gen_range(1..=2 * n);
        random_coverage(rng, n, e, 9)
    }
}

/// Random recursive tree on `0..n` rooted at 0.
pub fn random_parents(rng: &mut ChaCha8Rng, n: usize) -> BTreeMap<NodeId, NodeId> {
    (1..n).map(|v| (v, rng.gen_range(0..v))).collect()
}

/// A tree together with a graph holding its arcs and a shortcut `0 → v` to
/// every node, so every node sits within `c(0) + c(v)` of the root.
pub fn tree_with_shortcuts(rng: &mut ChaCha8Rng, n: usize, max_cost: u64) -> (Digraph, OutTree) {
    let costs = random_costs(rng, n, 1, max_cost);
    let parents = random_parents(rng, n);
    let mut arcs: BTreeSet<(NodeId, NodeId)> = parents.iter().map(|(&c, &p)| (p, c)).collect();
    arcs.extend((1..n).map(|v| (0, v)));
    let g = Digraph::new(costs, arcs).unwrap();
    (g, OutTree::from_parents(0, parents).unwrap())
}

/// A tree whose graph has only the tree arcs.
pub fn bare_tree(rng: &mut ChaCha8Rng, n: usize, max_cost: u64) -> (Digraph, OutTree) {
    let costs = random_costs(rng, n, 1, max_cost);
    let parents = random_parents(rng, n);
    let g = Digraph::new(costs, parents.iter().map(|(&c, &p)| (p, c))).unwrap();
    (g, OutTree::from_parents(0, parents).unwrap())
}

fn reach_within(g: &Digraph, mask: u64, from: NodeId) -> u64 {
    let mut seen = 1u64 << from;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &v in g.out_neighbors(u) {
            if mask >> v & 1 == 1 && seen >> v & 1 == 0 {
                seen |= 1 << v;
                stack.push(v);
            }
        }
    }
    seen
}

fn set_of(mask: u64, n: usize) -> Vec<NodeId> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Best prize over vertex sets spanned by an out-tree from `root` (or any
/// root when `None`) of total node cost at most `budget`.
pub fn brute_force_opt(g: &Digraph, p: &PrizeOracle, root: Option<NodeId>, budget: u64) -> u64 {
    let n = g.num_nodes();
    assert!(n <= 20);
    let mut best = 0;
    for mask in 1u64..(1 << n) {
        let nodes = set_of(mask, n);
        let cost: u64 = nodes.iter().map(|&v| g.cost(v)).sum();
        if cost > budget {
            continue;
        }
        let spanned = match root {
            Some(r) => mask >> r & 1 == 1 && reach_within(g, mask, r) == mask,
            None => nodes.iter().any(|&r| reach_within(g, mask, r) == mask),
        };
        if spanned {
            best = best.max(p.value(nodes));
        }
    }
    best
}

/// Minimum endpoint-inclusive node cost over all simple paths `s → t`.
pub fn brute_force_distance(g: &Digraph, s: NodeId, t: NodeId) -> Option<u64> {
    fn go(
        g: &Digraph,
        u: NodeId,
        t: NodeId,
        used: &mut Vec<bool>,
        acc: u64,
        best: &mut Option<u64>,
    ) {
        if u == t {
            *best = Some(best.map_or(acc, |b| b.min(acc)));
            return;
        }
        for &v in g.out_neighbors(u) {
            if !used[v] {
                used[v] = true;
                go(g, v, t, used, acc + g.cost(v), best);
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; g.num_nodes()];
    used[s] = true;
    let mut best = None;
    go(g, s, t, &mut used, g.cost(s), &mut best);
    best
}

/// Exact optimum of max `f(S)` over `seeds ⊆ S ⊆ candidates ∪ seeds`, `|S| ≤ k`.
pub fn exact_rsm(p: &PrizeOracle, candidates: &[NodeId], seeds: &[NodeId], k: usize) -> u64 {
    let rest: Vec<NodeId> = candidates
        .iter()
        .copied()
        .filter(|v| !seeds.contains(v))
        .collect();
    let room = k.saturating_sub(seeds.len());
    let mut best = 0;
    for mask in 0u64..(1 << rest.len()) {
        if mask.count_ones() as usize > room {
            continue;
        }
        let mut s = seeds.to_vec();
        s.extend(set_of(mask, rest.len()).into_iter().map(|i| rest[i]));
        best = best.max(p.value(s));
    }
    best
}

/// Prize layouts for trimming inputs. `Random` mostly lets the initial phase
/// shed subtrees; the others keep every strict subtree above the tree's ratio
/// (`Proportional`) or hang a cheap, valuable root over a worthless spine
/// (`Broom`), which is where the grouping branches run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Random,
    Proportional,
    Broom,
}

pub const PROFILES: [Profile; 3] = [Profile::Random, Profile::Proportional, Profile::Broom];

fn proportional_oracle(
    rng: &mut ChaCha8Rng,
    g: &Digraph,
    zero: &[NodeId],
    submodular: bool,
) -> PrizeOracle {
    let n = g.num_nodes();
    let k = rng.gen_range(1..=4i64);
    let w: Vec<i64> = (0..n)
        .map(|v| {
            if zero.contains(&v) {
                0
            } else {
                k * g.cost(v) as i64
            }
        })
        .collect();
    if !submodular {
        return PrizeOracle::additive(&w).unwrap();
    }
    // Own element per node plus a few shared low-weight elements.
    let shared = rng.gen_range(1..=3usize);
    let mut weights = w.clone();
    weights.extend((0..shared).map(|_| rng.gen_range(0..=2i64)));
    let sets = (0..n)
        .map(|v| {
            let mut s = vec![v];
            if !zero.contains(&v) && rng.gen_bool(0.3) {
                s.push(n + rng.gen_range(0..shared));
            }
            s
        })
        .collect();
    PrizeOracle::coverage(sets, weights).unwrap()
}

/// A trimming input: tree with root shortcuts plus prizes per `profile`.
pub fn trim_input(
    rng: &mut ChaCha8Rng,
    n: usize,
    profile: Profile,
    submodular: bool,
) -> (Digraph, OutTree, PrizeOracle) {
    match profile {
        Profile::Random => {
            let (g, t) = tree_with_shortcuts(rng, n, 3);
            let p = if submodular {
                random_oracle(rng, n)
            } else {
                random_additive(rng, n, 9)
            };
            (g, t, p)
        }
        Profile::Proportional => {
            let (g, t) = tree_with_shortcuts(rng, n, 3);
            let p = proportional_oracle(rng, &g, &[0], submodular);
            (g, t, p)
        }
        Profile::Broom => {
            // 0 → 1 → … → d, then every other node hangs below the spine end
            // or below an earlier bristle.
            let d = if n > 6 && rng.gen_bool(0.3) { 2 } else { 1 };
            let mut parents: BTreeMap<NodeId, NodeId> = (1..=d).map(|v| (v, v - 1)).collect();
            for v in d + 1..n {
                let p = if v > d + 1 && rng.gen_bool(0.3) {
                    rng.gen_range(d + 1..v)
                } else {
                    d
                };
                parents.insert(v, p);
            }
            let mut costs = random_costs(rng, n, 1, 3);
            costs[0] = 1;
            let mut arcs: BTreeSet<(NodeId, NodeId)> =
                parents.iter().map(|(&c, &p)| (p, c)).collect();
            arcs.extend((1..n).map(|v| (0, v)));
            let g = Digraph::new(costs, arcs).unwrap();
            let spine: Vec<NodeId> = (0..=d).collect();
            let k = rng.gen_range(1..=4i64);
            let mut w: Vec<i64> = (0..n)
                .map(|v| {
                    if spine.contains(&v) {
                        0
                    } else {
                        k * g.cost(v) as i64
                    }
                })
                .collect();
            // Root prize chosen so the whole tree has ratio about k: the
            // bristles stay good while the spine subtree is bad.
            let total: i64 = (0..n).map(|v| g.cost(v) as i64).sum();
            w[0] = (k * total - w.iter().sum::<i64>() - 1).max(1);
            let p = if submodular {
                PrizeOracle::coverage((0..n).map(|v| vec![v]).collect(), w).unwrap()
            } else {
                PrizeOracle::additive(&w).unwrap()
            };
            (g, OutTree::from_parents(0, parents).unwrap(), p)
        }
    }
}
