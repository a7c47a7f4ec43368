//! Exact optimizers for small instances.
//!
//! Two independent strategies per problem: a frontier search that grows
//! connected sets one node at a time, and a plain filter over the power set.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::graph::{Digraph, OutTree};
use crate::reductions::StoInstance;
use crate::solver::Instance;
use crate::submodular::PrizeOracle;
use crate::{Cost, Error, NodeId, Prize, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_nodes: usize,
    pub max_states: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_nodes: 15,
            max_states: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum: Prize,
    /// Sorted vertex set of an optimal solution (empty if nothing is affordable).
    pub witness: Vec<NodeId>,
    pub tree: Option<OutTree>,
    /// Sets visited by the search.
    pub states: u64,
}

fn check_caps(n: usize, caps: Caps, what: &str) -> Result<()> {
    if n > caps.max_nodes {
        return Err(Error::SizeCap(format!(
            "{what} has {n} nodes, above the cap {}",
            caps.max_nodes
        )));
    }
    if n > 63 {
        return Err(Error::SizeCap("more than 63 nodes".into()));
    }
    Ok(())
}

fn members(mask: u64) -> impl Iterator<Item = NodeId> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn mask_cost(g: &Digraph, mask: u64) -> Cost {
    members(mask).map(|v| g.cost(v)).sum()
}

/// Nodes of `mask` reachable from `r` inside `mask`, with a BFS tree.
fn reach_within(g: &Digraph, r: NodeId, mask: u64) -> (u64, BTreeMap<NodeId, NodeId>) {
    let mut seen = 1u64 << r;
    let mut parent = BTreeMap::new();
    let mut queue = VecDeque::from([r]);
    while let Some(u) = queue.pop_front() {
        for &v in g.out_neighbors(u) {
            let bit = 1u64 << v;
            if mask & bit != 0 && seen & bit == 0 {
                seen |= bit;
                parent.insert(v, u);
                queue.push_back(v);
            }
        }
    }
    (seen, parent)
}

fn witness_tree(g: &Digraph, r: NodeId, mask: u64) -> Result<OutTree> {
    let (seen, parent) = reach_within(g, r, mask);
    if seen != mask {
        return Err(Error::internal(
            "witness set is not reachable from its root",
        ));
    }
    OutTree::from_parents(r, parent)
}

struct Search<'a> {
    g: &'a Digraph,
    p: &'a PrizeOracle,
    budget: u64,
    caps: Caps,
    states: u64,
    best: Option<(Prize, u64, NodeId)>,
    seen: Option<&'a mut HashSet<u64>>,
}

impl Search<'_> {
    fn visit(&mut self, root: NodeId, set: u64, excluded: u64, cost: Cost) -> Result<()> {
        self.states += 1;
        if self.states > self.caps.max_states {
            return Err(Error::SizeCap(format!(
                "search exceeded {} states",
                self.caps.max_states
            )));
        }
        let frontier = members(set)
            .flat_map(|u| self.g.out_neighbors(u).iter().copied())
            .filter(|&v| (set | excluded) >> v & 1 == 0)
            .min();
        let Some(v) = frontier else {
            // No extension left: this is a maximal branch, score it.
            let fresh = match self.seen.as_deref_mut() {
                Some(seen) => seen.insert(set),
                None => true,
            };
            if fresh {
                let value = self.p.value(members(set));
                if self.best.is_none_or(|(b, _, _)| value > b) {
                    self.best = Some((value, set, root));
                }
            }
            return Ok(());
        };
        if cost + self.g.cost(v) <= self.budget {
            self.visit(root, set | 1 << v, excluded, cost + self.g.cost(v))?;
        }
        self.visit(root, set, excluded | 1 << v, cost)
    }
}

/// Include/exclude branching on the smallest-id frontier node; each affordable
/// set reachable from `r` corresponds to exactly one branch.
pub fn exact_rooted(inst: &Instance, caps: Caps) -> Result<ExactResult> {
    let r = inst
        .root
        .ok_or_else(|| Error::VariantMismatch("rooted oracle needs a root".into()))?;
    rooted_search(&inst.graph, &inst.oracle, r, inst.budget, caps)
}

fn rooted_search(
    g: &Digraph,
    p: &PrizeOracle,
    r: NodeId,
    budget: u64,
    caps: Caps,
) -> Result<ExactResult> {
    check_caps(g.num_nodes(), caps, "instance")?;
    g.check_node(r)?;
    if g.cost(r) > budget {
        return Err(Error::InfeasibleRoot {
            root: r,
            cost: g.cost(r),
            budget,
        });
    }
    let mut s = Search {
        g,
        p,
        budget,
        caps,
        states: 0,
        best: None,
        seen: None,
    };
    s.visit(r, 1 << r, 0, g.cost(r))?;
    let (optimum, mask, _) = s.best.expect("the root alone is affordable");
    Ok(ExactResult {
        optimum,
        witness: members(mask).collect(),
        tree: Some(witness_tree(g, r, mask)?),
        states: s.states,
    })
}

/// Scans every subset containing the root.
pub fn exact_rooted_powerset(inst: &Instance, caps: Caps) -> Result<ExactResult> {
    let g = &inst.graph;
    let n = g.num_nodes();
    check_caps(n, caps, "instance")?;
    let r = inst
        .root
        .ok_or_else(|| Error::VariantMismatch("rooted oracle needs a root".into()))?;
    g.check_node(r)?;
    let mut best: Option<(Prize, u64)> = None;
    let mut states = 0;
    for mask in 0..1u64 << n {
        if mask >> r & 1 == 0 || mask_cost(g, mask) > inst.budget {
            continue;
        }
        states += 1;
        if reach_within(g, r, mask).0 != mask {
            continue;
        }
        let value = inst.oracle.value(members(mask));
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, mask));
        }
    }
    let (optimum, mask) = best.ok_or(Error::InfeasibleRoot {
        root: r,
        cost: g.cost(r),
        budget: inst.budget,
    })?;
    Ok(ExactResult {
        optimum,
        witness: members(mask).collect(),
        tree: Some(witness_tree(g, r, mask)?),
        states,
    })
}

/// Frontier search from every affordable root, scoring each set once.
pub fn exact_unrooted(inst: &Instance, caps: Caps) -> Result<ExactResult> {
    let g = &inst.graph;
    check_caps(g.num_nodes(), caps, "instance")?;
    let mut seen = HashSet::new();
    let mut best: Option<(Prize, u64, NodeId)> = None;
    let mut states = 0;
    for r in (0..g.num_nodes()).filter(|&r| g.cost(r) <= inst.budget) {
        let mut s = Search {
            g,
            p: &inst.oracle,
            budget: inst.budget,
            caps: Caps {
                max_states: caps.max_states.saturating_sub(states),
                ..caps
            },
            states: 0,
            best: None,
            seen: Some(&mut seen),
        };
        s.visit(r, 1 << r, 0, g.cost(r))?;
        states += s.states;
        if let Some(found) = s.best {
            if best.is_none_or(|(b, _, _)| found.0 > b) {
                best = Some(found);
            }
        }
    }
    Ok(match best {
        None => ExactResult {
            optimum: 0,
            witness: Vec::new(),
            tree: None,
            states,
        },
        Some((optimum, mask, r)) => ExactResult {
            optimum,
            witness: members(mask).collect(),
            tree: Some(witness_tree(g, r, mask)?),
            states,
        },
    })
}

/// Scans every non-empty affordable subset that some member reaches entirely.
pub fn exact_unrooted_powerset(inst: &Instance, caps: Caps) -> Result<ExactResult> {
    let g = &inst.graph;
    let n = g.num_nodes();
    check_caps(n, caps, "instance")?;
    let mut best: Option<(Prize, u64, NodeId)> = None;
    let mut states = 0;
    for mask in 1..1u64 << n {
        if mask_cost(g, mask) > inst.budget {
            continue;
        }
        states += 1;
        let Some(r) = members(mask).find(|&r| reach_within(g, r, mask).0 == mask) else {
            continue;
        };
        let value = inst.oracle.value(members(mask));
        if best.is_none_or(|(b, _, _)| value > b) {
            best = Some((value, mask, r));
        }
    }
    Ok(match best {
        None => ExactResult {
            optimum: 0,
            witness: Vec::new(),
            tree: None,
            states,
        },
        Some((optimum, mask, r)) => ExactResult {
            optimum,
            witness: members(mask).collect(),
            tree: Some(witness_tree(g, r, mask)?),
            states,
        },
    })
}

/// Enumerates arc subsets that form an out-tree rooted at the instance root
/// within the arc budget.
pub fn exact_sto_arcs(s: &StoInstance, max_arcs: usize) -> Result<ExactResult> {
    s.validate()?;
    let m = s.arcs.len();
    if m > max_arcs || m > 30 {
        return Err(Error::SizeCap(format!(
            "{m} arcs, above the cap {max_arcs}"
        )));
    }
    let mut best: Option<(Prize, OutTree)> = None;
    let mut states = 0;
    'masks: for mask in 0..1u32 << m {
        let chosen: Vec<&(NodeId, NodeId, Cost)> = (0..m)
            .filter(|e| mask >> e & 1 == 1)
            .map(|e| &s.arcs[e])
            .collect();
        if chosen.iter().map(|a| a.2).sum::<Cost>() > s.budget {
            continue;
        }
        states += 1;
        let mut parent = BTreeMap::new();
        for &&(u, v, _) in &chosen {
            if v == s.root || parent.insert(v, u).is_some() {
                continue 'masks;
            }
        }
        let Ok(tree) = OutTree::from_parents(s.root, parent) else {
            continue;
        };
        let value = s.oracle.value(tree.nodes());
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, tree));
        }
    }
    let (optimum, tree) = best.expect("the empty arc set is always feasible");
    Ok(ExactResult {
        optimum,
        witness: tree.nodes(),
        tree: Some(tree),
        states,
    })
}
