//! Problem transformations and their solution mappers.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::certify::big;
use crate::graph::{Digraph, OutTree};
use crate::solver::{solve_drso, Instance, SolveReport, Variant};
use crate::submodular::PrizeOracle;
use crate::{Cost, Error, NodeId, Prize, Rational, Result};

/// Rooted out-tree problem with costs on arcs instead of nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoInstance {
    pub num_nodes: usize,
    /// `(tail, head, cost)`.
    pub arcs: Vec<(NodeId, NodeId, Cost)>,
    pub root: NodeId,
    pub budget: u64,
    pub oracle: PrizeOracle,
}

impl StoInstance {
    pub fn validate(&self) -> Result<()> {
        if self.root >= self.num_nodes {
            return Err(Error::InvalidNode {
                node: self.root,
                len: self.num_nodes,
            });
        }
        if self.oracle.num_nodes() != self.num_nodes {
            return Err(Error::input("oracle does not match the node count"));
        }
        if let Some(&(u, v, _)) = self.arcs.iter().find(|a| a.2 == 0) {
            return Err(Error::input(format!("arc ({u}, {v}) has cost 0")));
        }
        // Reuses the digraph checks for ids, loops and duplicates.
        self.digraph()?;
        Ok(())
    }

    /// Underlying digraph with unit node costs (costs are unused).
    pub fn digraph(&self) -> Result<Digraph> {
        Digraph::new(
            vec![1; self.num_nodes],
            self.arcs.iter().map(|&(u, v, _)| (u, v)),
        )
    }

    fn arc_cost(&self) -> BTreeMap<(NodeId, NodeId), Cost> {
        self.arcs.iter().map(|&(u, v, c)| ((u, v), c)).collect()
    }

    /// Sum of arc costs of a tree; errors on arcs that are not in the instance.
    pub fn tree_cost(&self, t: &OutTree) -> Result<Cost> {
        let costs = self.arc_cost();
        t.arcs()
            .map(|a| {
                costs
                    .get(&a)
                    .copied()
                    .ok_or_else(|| Error::input(format!("arc {a:?} is not in the instance")))
            })
            .sum()
    }
}

/// Moves each node cost onto the arcs entering it; arcs into the root vanish
/// and the root's cost leaves the budget.
pub fn drso_to_sto(inst: &Instance) -> Result<StoInstance> {
    let r = inst
        .root
        .ok_or_else(|| Error::VariantMismatch("the arc-cost reduction needs a root".into()))?;
    let g = &inst.graph;
    g.check_node(r)?;
    let budget = inst
        .budget
        .checked_sub(g.cost(r))
        .ok_or(Error::InfeasibleRoot {
            root: r,
            cost: g.cost(r),
            budget: inst.budget,
        })?;
    let arcs: Vec<(NodeId, NodeId, Cost)> = g
        .arcs()
        .filter(|&(_, v)| v != r)
        .map(|(u, v)| (u, v, g.cost(v)))
        .collect();
    if let Some(&(u, v, _)) = arcs.iter().find(|a| a.2 == 0) {
        return Err(Error::input(format!(
            "arc ({u}, {v}) would get cost 0 from a zero-cost head"
        )));
    }
    Ok(StoInstance {
        num_nodes: g.num_nodes(),
        arcs,
        root: r,
        budget,
        oracle: inst.oracle.clone(),
    })
}

/// Bookkeeping of the node-split construction: arc `e` became node `n + e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoLift {
    pub num_original: usize,
    pub arcs: Vec<(NodeId, NodeId, Cost)>,
}

impl StoLift {
    pub fn arc_node(&self, e: usize) -> NodeId {
        self.num_original + e
    }

    /// Maps a lifted tree back: original nodes stay, an arc is kept when its
    /// split node sits between two kept nodes. Split-node leaves carry no
    /// prize and are dropped.
    pub fn map_back(&self, t: &OutTree) -> Result<OutTree> {
        let n = self.num_original;
        if t.root() >= n {
            return Err(Error::input("lifted tree is rooted at an arc node"));
        }
        let mut parent = BTreeMap::new();
        for v in t.nodes().into_iter().filter(|&v| v < n && v != t.root()) {
            let ve = t.parent(v).expect("non-root has a parent");
            let e = ve
                .checked_sub(n)
                .ok_or_else(|| Error::input(format!("original node {v} has an original parent")))?;
            let (i, j, _) = self.arcs[e];
            if j != v || t.parent(ve) != Some(i) {
                return Err(Error::input(format!(
                    "arc node {ve} is wired inconsistently"
                )));
            }
            parent.insert(v, i);
        }
        OutTree::from_parents(t.root(), parent)
    }

    /// The lifted image of an arc-cost tree.
    pub fn lift(&self, t: &OutTree) -> Result<OutTree> {
        let index: BTreeMap<(NodeId, NodeId), usize> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(e, &(u, v, _))| ((u, v), e))
            .collect();
        let mut parent = BTreeMap::new();
        for (u, v) in t.arcs() {
            let e = *index
                .get(&(u, v))
                .ok_or_else(|| Error::input(format!("arc ({u}, {v}) is not in the instance")))?;
            parent.insert(self.arc_node(e), u);
            parent.insert(v, self.arc_node(e));
        }
        OutTree::from_parents(t.root(), parent)
    }
}

/// Splits every arc `e = (i, j)` into `i → v_e → j` with `c(v_e) = c(e)`;
/// original nodes cost 0 and split nodes carry no prize.
pub fn sto_to_drso(s: &StoInstance, epsilon: Rational) -> Result<(Instance, StoLift)> {
    s.validate()?;
    let n = s.num_nodes;
    let m = s.arcs.len();
    let mut costs = vec![0; n];
    costs.extend(s.arcs.iter().map(|a| a.2));
    let mut arcs = Vec::with_capacity(2 * m);
    for (e, &(i, j, _)) in s.arcs.iter().enumerate() {
        arcs.push((i, n + e));
        arcs.push((n + e, j));
    }
    let graph = Digraph::new(costs, arcs)?;
    let oracle = s.oracle.extend_zero(m);
    let variant = if oracle.is_additive() {
        Variant::AdditiveRooted
    } else {
        Variant::SubmodularRooted
    };
    let inst = Instance {
        graph,
        oracle,
        root: Some(s.root),
        budget: s.budget,
        epsilon,
        variant,
        reduction_produced: true,
    };
    let lift = StoLift {
        num_original: n,
        arcs: s.arcs.clone(),
    };
    Ok((inst, lift))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoSolution {
    pub tree: OutTree,
    pub cost: Cost,
    pub prize: Prize,
    /// Report of the rooted solve on the lifted instance; absent for a zero
    /// budget, where the root alone is optimal.
    pub lifted: Option<SolveReport>,
}

/// Lifts, solves with the rooted submodular pipeline and maps back.
pub fn solve_sto(s: &StoInstance, epsilon: Rational) -> Result<StoSolution> {
    let (inst, lift) = sto_to_drso(s, epsilon)?;
    if s.budget == 0 {
        let tree = OutTree::singleton(s.root);
        return Ok(StoSolution {
            prize: s.oracle.value([s.root]),
            tree,
            cost: 0,
            lifted: None,
        });
    }
    let inst = inst.with_variant(Variant::SubmodularRooted);
    let lifted = solve_drso(&inst)?;
    let tree = lift.map_back(&lifted.tree)?;
    let cost = s.tree_cost(&tree)?;
    let prize = s.oracle.value(tree.nodes());
    if prize != lifted.prize {
        return Err(Error::internal(format!(
            "mapped prize {prize} differs from lifted prize {}",
            lifted.prize
        )));
    }
    if cost > lifted.cost {
        return Err(Error::internal("mapping back increased the cost"));
    }
    let limit = (Rational::from_integer(1) + epsilon) * Rational::from_integer(s.budget as i128);
    if Rational::from_integer(cost as i128) > limit {
        return Err(Error::internal(format!("arc cost {cost} exceeds (1+ε)B")));
    }
    Ok(StoSolution {
        tree,
        cost,
        prize,
        lifted: Some(lifted),
    })
}

/// Each undirected edge becomes two opposite arcs.
pub fn undirected_lift(costs: Vec<Cost>, edges: &[(NodeId, NodeId)]) -> Result<Digraph> {
    let mut seen = BTreeSet::new();
    for &(u, v) in edges {
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::input(format!("duplicate edge {{{u}, {v}}}")));
        }
    }
    Digraph::new(costs, edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]))
}

/// Budgeted connected set cover: pick sets of total cost at most `B` that
/// induce a connected subgraph of the set-adjacency graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwbcscInstance {
    pub element_weights: Vec<Prize>,
    pub sets: Vec<Vec<usize>>,
    pub set_costs: Vec<Cost>,
    /// Undirected adjacency between sets.
    pub adjacency: Vec<(usize, usize)>,
    pub budget: u64,
}

impl MwbcscInstance {
    pub fn validate(&self) -> Result<()> {
        if self.sets.len() != self.set_costs.len() {
            return Err(Error::input("set and cost counts differ"));
        }
        let k = self.element_weights.len();
        let mut covered = vec![false; k];
        for (i, set) in self.sets.iter().enumerate() {
            for &x in set {
                if x >= k {
                    return Err(Error::input(format!("set {i} has unknown element {x}")));
                }
                covered[x] = true;
            }
        }
        if let Some(x) = covered.iter().position(|c| !c) {
            return Err(Error::input(format!("element {x} is covered by no set")));
        }
        Ok(())
    }

    /// Largest number of sets sharing one element.
    pub fn frequency(&self) -> usize {
        let mut count = vec![0usize; self.element_weights.len()];
        for set in &self.sets {
            for &x in set.iter().collect::<BTreeSet<_>>() {
                count[x] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    pub fn coverage_oracle(&self) -> Result<PrizeOracle> {
        PrizeOracle::coverage(
            self.sets.clone(),
            self.element_weights.iter().map(|&w| w as i64).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwbcscStrategy {
    /// Prize of a choice is the weight it covers.
    #[default]
    Coverage,
    /// Each set is worth the total weight of its elements; overcounts by at
    /// most the frequency.
    Additive,
}

/// The unrooted instance on the set-adjacency graph.
pub fn mwbcsc_to_dso(m: &MwbcscInstance, strategy: MwbcscStrategy) -> Result<Instance> {
    m.validate()?;
    let graph = undirected_lift(m.set_costs.clone(), &m.adjacency)?;
    let oracle = match strategy {
        MwbcscStrategy::Coverage => m.coverage_oracle()?,
        MwbcscStrategy::Additive => PrizeOracle::Additive(
            m.sets
                .iter()
                .map(|s| {
                    s.iter()
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .map(|&x| m.element_weights[x])
                        .sum()
                })
                .collect(),
        ),
    };
    Ok(Instance::unrooted(graph, oracle, m.budget))
}

pub type Point = (Rational, Rational);

/// Geometric sensor placement: sensors cover targets within `sensing_range`
/// and talk to sensors within `comm_range`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BscpInstance {
    pub sensors: Vec<Point>,
    pub targets: Vec<(Point, Prize)>,
    pub sensing_range: Rational,
    pub comm_range: Rational,
    /// Number of sensors allowed.
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BscpBuild {
    pub instance: MwbcscInstance,
    /// `element id → target index`.
    pub target_of_element: Vec<usize>,
    /// Targets no sensor covers; they cannot contribute and are left out.
    pub dropped_targets: Vec<usize>,
}

fn sq_dist(a: &Point, b: &Point) -> BigRational {
    let dx = big(a.0) - big(b.0);
    let dy = big(a.1) - big(b.1);
    &dx * &dx + &dy * &dy
}

/// Closed-range geometry with exact squared distances and unit sensor costs.
pub fn bscp_build(b: &BscpInstance) -> Result<BscpBuild> {
    let zero = Rational::from_integer(0);
    if b.sensing_range <= zero || b.comm_range <= zero {
        return Err(Error::input("ranges must be positive"));
    }
    let rs2 = big(b.sensing_range) * big(b.sensing_range);
    let rc2 = big(b.comm_range) * big(b.comm_range);
    let covers: Vec<Vec<usize>> = b
        .sensors
        .iter()
        .map(|s| {
            (0..b.targets.len())
                .filter(|&t| sq_dist(s, &b.targets[t].0) <= rs2)
                .collect()
        })
        .collect();
    let mut covered = vec![false; b.targets.len()];
    for &t in covers.iter().flatten() {
        covered[t] = true;
    }
    let mut element_of = vec![None; b.targets.len()];
    let mut target_of_element = Vec::new();
    for t in (0..b.targets.len()).filter(|&t| covered[t]) {
        element_of[t] = Some(target_of_element.len());
        target_of_element.push(t);
    }
    let dropped_targets = (0..b.targets.len())
        .filter(|&t| element_of[t].is_none())
        .collect();
    let sets = covers
        .iter()
        .map(|set| {
            set.iter()
                .map(|&t| element_of[t].expect("covered"))
                .collect()
        })
        .collect();
    let mut adjacency = Vec::new();
    for i in 0..b.sensors.len() {
        for j in i + 1..b.sensors.len() {
            if sq_dist(&b.sensors[i], &b.sensors[j]) <= rc2 {
                adjacency.push((i, j));
            }
        }
    }
    let instance = MwbcscInstance {
        element_weights: target_of_element.iter().map(|&t| b.targets[t].1).collect(),
        sets,
        set_costs: vec![1; b.sensors.len()],
        adjacency,
        budget: b.budget,
    };
    Ok(BscpBuild {
        instance,
        target_of_element,
        dropped_targets,
    })
}
