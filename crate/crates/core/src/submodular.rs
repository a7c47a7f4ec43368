//! Prize oracles and the seeded greedy for rooted cardinality-constrained
//! submodular maximization.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Error, NodeId, Prize, Result};

/// Monotone submodular set function over node ids `0..n`.
///
/// All weights are non-negative integers, so every evaluation is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrizeOracle {
    /// `p(S) = Σ_{v ∈ S} w(v)`.
    Additive(Vec<Prize>),
    /// `p(S)` is the total weight of elements covered by some node of `S`.
    Coverage {
        node_sets: Vec<Vec<usize>>,
        element_weights: Vec<Prize>,
    },
}

fn check_weights(weights: &[i64], what: &str) -> Result<Vec<Prize>> {
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            u64::try_from(w)
                .map_err(|_| Error::input(format!("{what} {i} has negative weight {w}")))
        })
        .collect()
}

impl PrizeOracle {
    pub fn additive(weights: &[i64]) -> Result<Self> {
        Ok(PrizeOracle::Additive(check_weights(weights, "node")?))
    }

    /// Element ids in `node_sets` index `element_weights`. Duplicates inside a
    /// node set are harmless and removed.
    pub fn coverage(node_sets: Vec<Vec<usize>>, element_weights: Vec<i64>) -> Result<Self> {
        let element_weights = check_weights(&element_weights, "element")?;
        let mut node_sets = node_sets;
        for (v, set) in node_sets.iter_mut().enumerate() {
            if let Some(&e) = set.iter().find(|&&e| e >= element_weights.len()) {
                return Err(Error::input(format!(
                    "node {v} covers unknown element {e} ({} elements)",
                    element_weights.len()
                )));
            }
            set.sort_unstable();
            set.dedup();
        }
        Ok(PrizeOracle::Coverage {
            node_sets,
            element_weights,
        })
    }

    /// Size of the ground set.
    pub fn num_nodes(&self) -> usize {
        match self {
            PrizeOracle::Additive(w) => w.len(),
            PrizeOracle::Coverage { node_sets, .. } => node_sets.len(),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, PrizeOracle::Additive(_))
    }

    pub fn additive_weights(&self) -> Option<&[Prize]> {
        match self {
            PrizeOracle::Additive(w) => Some(w),
            PrizeOracle::Coverage { .. } => None,
        }
    }

    /// `p({v})`.
    pub fn singleton(&self, v: NodeId) -> Prize {
        match self {
            PrizeOracle::Additive(w) => w[v],
            PrizeOracle::Coverage {
                node_sets,
                element_weights,
            } => node_sets[v].iter().map(|&e| element_weights[e]).sum(),
        }
    }

    /// Evaluates `p` on a node collection; repeated ids count once.
    ///
    /// Panics on ids outside the ground set; see [`PrizeOracle::try_value`].
    pub fn value<I: IntoIterator<Item = NodeId>>(&self, nodes: I) -> Prize {
        let mut state = GainState::new(self);
        nodes.into_iter().map(|v| state.add(v)).sum()
    }

    pub fn try_value<I: IntoIterator<Item = NodeId>>(&self, nodes: I) -> Result<Prize> {
        let n = self.num_nodes();
        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        if let Some(&v) = nodes.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidNode { node: v, len: n });
        }
        Ok(self.value(nodes))
    }

    /// `p(S ∪ {x}) − p(S)` for `x ∉ S`.
    pub fn marginal_gain(&self, s: &[NodeId], x: NodeId) -> Result<Prize> {
        let n = self.num_nodes();
        if let Some(&v) = s.iter().chain([&x]).find(|&&v| v >= n) {
            return Err(Error::InvalidNode { node: v, len: n });
        }
        if s.contains(&x) {
            return Err(Error::input(format!("node {x} is already in the set")));
        }
        let mut state = GainState::new(self);
        for &v in s {
            state.add(v);
        }
        Ok(state.gain(x))
    }

    /// Oracle over a relabeled ground set: new node `i` behaves like old node
    /// `new_to_old[i]`.
    pub fn relabel(&self, new_to_old: &[NodeId]) -> PrizeOracle {
        match self {
            PrizeOracle::Additive(w) => {
                PrizeOracle::Additive(new_to_old.iter().map(|&v| w[v]).collect())
            }
            PrizeOracle::Coverage {
                node_sets,
                element_weights,
            } => PrizeOracle::Coverage {
                node_sets: new_to_old.iter().map(|&v| node_sets[v].clone()).collect(),
                element_weights: element_weights.clone(),
            },
        }
    }

    /// Appends `extra` nodes that carry no prize.
    pub fn extend_zero(&self, extra: usize) -> PrizeOracle {
        match self {
            PrizeOracle::Additive(w) => {
                let mut w = w.clone();
                w.resize(w.len() + extra, 0);
                PrizeOracle::Additive(w)
            }
            PrizeOracle::Coverage {
                node_sets,
                element_weights,
            } => {
                let mut node_sets = node_sets.clone();
                node_sets.resize(node_sets.len() + extra, Vec::new());
                PrizeOracle::Coverage {
                    node_sets,
                    element_weights: element_weights.clone(),
                }
            }
        }
    }

    /// `p(V)`.
    pub fn total(&self) -> Prize {
        self.value(0..self.num_nodes())
    }
}

/// Incremental evaluation of `p` along a growing set.
#[derive(Debug, Clone)]
pub(crate) struct GainState<'a> {
    oracle: &'a PrizeOracle,
    chosen: Vec<bool>,
    covered: Vec<bool>,
}

impl<'a> GainState<'a> {
    pub(crate) fn new(oracle: &'a PrizeOracle) -> Self {
        let covered = match oracle {
            PrizeOracle::Additive(_) => Vec::new(),
            PrizeOracle::Coverage {
                element_weights, ..
            } => vec![false; element_weights.len()],
        };
        GainState {
            oracle,
            chosen: vec![false; oracle.num_nodes()],
            covered,
        }
    }

    pub(crate) fn gain(&self, x: NodeId) -> Prize {
        if self.chosen[x] {
            return 0;
        }
        match self.oracle {
            PrizeOracle::Additive(w) => w[x],
            PrizeOracle::Coverage {
                node_sets,
                element_weights,
            } => node_sets[x]
                .iter()
                .filter(|&&e| !self.covered[e])
                .map(|&e| element_weights[e])
                .sum(),
        }
    }

    /// Adds `x` and returns its marginal gain.
    pub(crate) fn add(&mut self, x: NodeId) -> Prize {
        let g = self.gain(x);
        self.chosen[x] = true;
        if let PrizeOracle::Coverage { node_sets, .. } = self.oracle {
            for &e in &node_sets[x] {
                self.covered[e] = true;
            }
        }
        g
    }
}

/// Pick `cardinality` nodes from `candidates`, always including `seeds`.
/// The first seed plays the role of the mandatory element.
#[derive(Debug, Clone)]
pub struct RsmInstance<'a> {
    pub oracle: &'a PrizeOracle,
    pub candidates: Vec<NodeId>,
    pub seeds: Vec<NodeId>,
    pub cardinality: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    /// Seeds first, then picks in selection order.
    pub selected: Vec<NodeId>,
    /// Marginal gain of each greedy pick (seeds excluded).
    pub gains: Vec<Prize>,
    pub value: Prize,
}

impl RsmInstance<'_> {
    fn validate(&self) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
        let n = self.oracle.num_nodes();
        if self.candidates.is_empty() {
            return Err(Error::input("greedy needs at least one candidate"));
        }
        if let Some(&v) = self.candidates.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidNode { node: v, len: n });
        }
        let mut candidates = self.candidates.clone();
        candidates.sort_unstable();
        candidates.dedup();
        let mut seeds: Vec<NodeId> = Vec::new();
        for &s in &self.seeds {
            if candidates.binary_search(&s).is_err() {
                return Err(Error::input(format!("seed {s} is not a candidate")));
            }
            if !seeds.contains(&s) {
                seeds.push(s);
            }
        }
        if seeds.is_empty() {
            return Err(Error::input("greedy needs a seed"));
        }
        if self.cardinality < seeds.len() {
            return Err(Error::input(format!(
                "cardinality {} is below the number of seeds {}",
                self.cardinality,
                seeds.len()
            )));
        }
        let rest = candidates
            .into_iter()
            .filter(|v| !seeds.contains(v))
            .collect();
        Ok((seeds, rest))
    }

    fn finish(
        seeds: Vec<NodeId>,
        picks: Vec<(NodeId, Prize)>,
        value: Prize,
    ) -> Result<GreedyResult> {
        if let Some(w) = picks.windows(2).find(|w| w[1].1 > w[0].1) {
            return Err(Error::internal(format!(
                "greedy gain increased from {} to {}; oracle is not submodular",
                w[0].1, w[1].1
            )));
        }
        let mut selected = seeds;
        let gains = picks.iter().map(|&(_, g)| g).collect();
        selected.extend(picks.into_iter().map(|(v, _)| v));
        Ok(GreedyResult {
            selected,
            gains,
            value,
        })
    }
}

/// Lazy greedy: stale gains are upper bounds, so a refreshed top entry that
/// still wins (gain first, then smaller id) is the exact argmax.
pub fn greedy_rsm(inst: &RsmInstance) -> Result<GreedyResult> {
    let (seeds, rest) = inst.validate()?;
    let mut state = GainState::new(inst.oracle);
    let mut value: Prize = seeds.iter().map(|&s| state.add(s)).sum();
    let rounds = (inst.cardinality - seeds.len()).min(rest.len());
    let mut heap: BinaryHeap<(Prize, Reverse<NodeId>, usize)> = rest
        .iter()
        .map(|&v| (state.gain(v), Reverse(v), 0))
        .collect();
    let mut picks = Vec::with_capacity(rounds);
    while picks.len() < rounds {
        let (g, Reverse(v), stamp) = heap.pop().expect("enough candidates remain");
        if stamp == picks.len() {
            value += state.add(v);
            picks.push((v, g));
        } else {
            heap.push((state.gain(v), Reverse(v), picks.len()));
        }
    }
    RsmInstance::finish(seeds, picks, value)
}

/// Reference greedy that recomputes every marginal gain each round.
pub fn greedy_rsm_naive(inst: &RsmInstance) -> Result<GreedyResult> {
    let (seeds, mut rest) = inst.validate()?;
    let mut chosen = seeds.clone();
    let mut value = inst.oracle.value(chosen.iter().copied());
    let rounds = (inst.cardinality - seeds.len()).min(rest.len());
    let mut picks = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut best: Option<(usize, Prize)> = None;
        for (i, &v) in rest.iter().enumerate() {
            let g = inst.oracle.marginal_gain(&chosen, v)?;
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((i, g));
            }
        }
        let (i, g) = best.expect("rounds bounded by candidates");
        let v = rest.remove(i);
        chosen.push(v);
        value += g;
        picks.push((v, g));
    }
    RsmInstance::finish(seeds, picks, value)
}
