//! Node-weighted digraphs, shortest paths and out-tree algebra.
//!
//! Distances count the cost of *every* node on a path, endpoints included, so
//! `dist(u, u) = c(u)` and the cost of a path equals the cost of its vertex set.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::submodular::PrizeOracle;
use crate::{Cost, Error, Prize, Result};

pub type NodeId = usize;

/// Directed graph with dense node ids `0..n`, node costs and no self-loops or
/// parallel arcs. Adjacency lists are kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    costs: Vec<Cost>,
    out: Vec<Vec<NodeId>>,
    inc: Vec<Vec<NodeId>>,
}

impl Digraph {
    pub fn new<I>(costs: Vec<Cost>, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = costs.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::InvalidNode { node: w, len: n });
                }
            }
            if u == v {
                return Err(Error::input(format!("self-loop on node {u}")));
            }
            out[u].push(v);
            inc[v].push(u);
        }
        for (u, list) in out.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::input(format!("duplicate arc ({u}, {})", w[0])));
            }
        }
        for list in &mut inc {
            list.sort_unstable();
        }
        Ok(Digraph { costs, out, inc })
    }

    pub fn num_nodes(&self) -> usize {
        self.costs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, v: NodeId) -> Cost {
        self.costs[v]
    }

    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.inc[v]
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        u < self.num_nodes() && self.out[u].binary_search(&v).is_ok()
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, heads)| heads.iter().map(move |&v| (u, v)))
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node: v,
                len: self.num_nodes(),
            })
        }
    }

    pub fn set_cost(&mut self, v: NodeId, cost: Cost) {
        self.costs[v] = cost;
    }

    /// Subgraph induced by `keep`, re-indexed densely in increasing old-id order.
    pub fn induced(&self, keep: &[bool]) -> (Digraph, NodeMap) {
        let map = NodeMap::from_mask(keep);
        let costs = map.new_to_old.iter().map(|&v| self.costs[v]).collect();
        let arcs = self
            .arcs()
            .filter_map(|(u, v)| Some((map.old_to_new[u]?, map.old_to_new[v]?)));
        let graph = Digraph::new(costs, arcs).expect("induced subgraph of a valid graph");
        (graph, map)
    }
}

/// Correspondence between the ids of a graph and one of its induced subgraphs.
/// Relabeling is monotone: the order of surviving ids is preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMap {
    pub old_to_new: Vec<Option<NodeId>>,
    pub new_to_old: Vec<NodeId>,
}

impl NodeMap {
    pub fn identity(n: usize) -> Self {
        NodeMap {
            old_to_new: (0..n).map(Some).collect(),
            new_to_old: (0..n).collect(),
        }
    }

    fn from_mask(keep: &[bool]) -> Self {
        let mut old_to_new = vec![None; keep.len()];
        let mut new_to_old = Vec::new();
        for (v, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            old_to_new[v] = Some(new_to_old.len());
            new_to_old.push(v);
        }
        NodeMap {
            old_to_new,
            new_to_old,
        }
    }

    /// Composes `self` (a → b) with `inner` (b → c) into a map a → c.
    pub fn then(&self, inner: &NodeMap) -> NodeMap {
        NodeMap {
            old_to_new: self
                .old_to_new
                .iter()
                .map(|v| v.and_then(|b| inner.old_to_new[b]))
                .collect(),
            new_to_old: inner
                .new_to_old
                .iter()
                .map(|&b| self.new_to_old[b])
                .collect(),
        }
    }
}

/// Single-source distances under the endpoint-inclusive node-cost convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    pub source: NodeId,
    pub dist: Vec<Option<Cost>>,
    pub pred: Vec<Option<NodeId>>,
}

impl DistanceTable {
    pub fn dist(&self, v: NodeId) -> Option<Cost> {
        self.dist[v]
    }

    pub fn is_reachable(&self, v: NodeId) -> bool {
        self.dist[v].is_some()
    }

    /// Vertices of the recorded shortest path `source → v`, in path order.
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        self.dist[v]?;
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        debug_assert_eq!(path[0], self.source);
        Some(path)
    }
}

/// Label-setting shortest paths where entering a node pays its cost and the
/// source pays its own cost up front.
///
/// Among equally short routes the predecessor with the smallest id (among
/// nodes settled before `v`) is recorded, which makes the pred map a tree and
/// the reconstructed paths deterministic even with zero-cost nodes.
pub fn node_weighted_shortest_paths(g: &Digraph, source: NodeId) -> Result<DistanceTable> {
    g.check_node(source)?;
    let n = g.num_nodes();
    let mut dist: Vec<Option<Cost>> = vec![None; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(g.cost(source));
    heap.push(Reverse((g.cost(source), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] || dist[u] != Some(d) {
            continue;
        }
        settled[u] = true;
        for &v in g.out_neighbors(u) {
            if settled[v] {
                continue;
            }
            let cand = d + g.cost(v);
            match dist[v] {
                Some(old) if cand > old => {}
                Some(old) if cand == old => {
                    if pred[v].is_some_and(|p| u < p) {
                        pred[v] = Some(u);
                    }
                }
                _ => {
                    dist[v] = Some(cand);
                    pred[v] = Some(u);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
    }
    Ok(DistanceTable { source, dist, pred })
}

/// The maximal subgraph in which every node is within distance `budget` of `r`.
#[derive(Debug, Clone)]
pub struct Pruned {
    pub graph: Digraph,
    pub map: NodeMap,
    /// `r` in the new ids.
    pub root: NodeId,
}

pub fn prune_b_appropriate(g: &Digraph, r: NodeId, budget: u64) -> Result<Pruned> {
    g.check_node(r)?;
    if g.cost(r) > budget {
        return Err(Error::InfeasibleRoot {
            root: r,
            cost: g.cost(r),
            budget,
        });
    }
    let table = node_weighted_shortest_paths(g, r)?;
    let keep: Vec<bool> = table
        .dist
        .iter()
        .map(|d| d.is_some_and(|d| d <= budget))
        .collect();
    let (graph, map) = g.induced(&keep);
    let root = map.old_to_new[r].expect("root survives pruning");
    Ok(Pruned { graph, map, root })
}

/// Whether every node of `g` is within distance `budget` of `r`.
pub fn is_b_appropriate(g: &Digraph, r: NodeId, budget: u64) -> Result<bool> {
    let table = node_weighted_shortest_paths(g, r)?;
    Ok(table.dist.iter().all(|d| d.is_some_and(|d| d <= budget)))
}

/// A recorded shortest path `u → v` as a path-shaped out-tree.
pub fn shortest_path(g: &Digraph, u: NodeId, v: NodeId) -> Result<OutTree> {
    g.check_node(v)?;
    let table = node_weighted_shortest_paths(g, u)?;
    let path = table.path_to(v).ok_or(Error::NoPath { from: u, to: v })?;
    OutTree::from_path(&path)
}

/// Out-arborescence stored as a parent map. Child lists are derived on demand
/// and always come out sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutTree {
    root: NodeId,
    parent: BTreeMap<NodeId, NodeId>,
}

impl OutTree {
    pub fn singleton(root: NodeId) -> Self {
        OutTree {
            root,
            parent: BTreeMap::new(),
        }
    }

    /// Builds a tree from `child → parent` entries. The root must not have a
    /// parent and every node must reach the root by following parents.
    pub fn from_parents(root: NodeId, parent: BTreeMap<NodeId, NodeId>) -> Result<Self> {
        if parent.contains_key(&root) {
            return Err(Error::input(format!("root {root} has a parent")));
        }
        for &p in parent.values() {
            if p != root && !parent.contains_key(&p) {
                return Err(Error::input(format!(
                    "node {p} is not connected to root {root}"
                )));
            }
        }
        // Every chain must end at the root within |parent| steps.
        let limit = parent.len();
        for &start in parent.keys() {
            let mut cur = start;
            let mut steps = 0;
            while cur != root {
                cur = parent[&cur];
                steps += 1;
                if steps > limit {
                    return Err(Error::input(format!("cycle through node {start}")));
                }
            }
        }
        Ok(OutTree { root, parent })
    }

    pub fn from_path(path: &[NodeId]) -> Result<Self> {
        let (&root, _) = path
            .split_first()
            .ok_or_else(|| Error::input("empty path"))?;
        let mut parent = BTreeMap::new();
        for w in path.windows(2) {
            if parent.insert(w[1], w[0]).is_some() || w[1] == root {
                return Err(Error::input(format!("path repeats node {}", w[1])));
            }
        }
        OutTree::from_parents(root, parent)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(&v).copied()
    }

    pub fn parents(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    /// Vertex set in increasing id order.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self.parent.keys().copied().collect();
        let pos = nodes.binary_search(&self.root).unwrap_err();
        nodes.insert(pos, self.root);
        nodes
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.nodes().into_iter().collect()
    }

    /// Tree arcs `(parent, child)`, ordered by child.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn children_map(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut map: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (&c, &p) in &self.parent {
            map.entry(p).or_default().push(c);
        }
        map
    }

    pub fn children(&self, v: NodeId) -> Vec<NodeId> {
        self.parent
            .iter()
            .filter(|(_, &p)| p == v)
            .map(|(&c, _)| c)
            .collect()
    }

    /// Post-order (leaves before parents), children visited in id order.
    pub fn post_order(&self) -> Vec<NodeId> {
        let children = self.children_map();
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
                continue;
            }
            stack.push((v, true));
            if let Some(kids) = children.get(&v) {
                stack.extend(kids.iter().rev().map(|&c| (c, false)));
            }
        }
        order
    }

    /// Number of ancestors of `v` (root has depth 0).
    pub fn depth(&self, v: NodeId) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            cur = p;
            d += 1;
        }
        d
    }

    /// Vertices reachable from the root through `v`.
    pub fn subtree_nodes(&self, v: NodeId) -> BTreeSet<NodeId> {
        let children = self.children_map();
        let mut set = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            set.insert(u);
            if let Some(kids) = children.get(&u) {
                stack.extend(kids);
            }
        }
        set
    }

    /// The full out-subtree rooted at `v`.
    pub fn full_subtree(&self, v: NodeId) -> OutTree {
        assert!(self.contains(v), "node {v} is not in the tree");
        let nodes = self.subtree_nodes(v);
        let parent = nodes
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| (u, self.parent[&u]))
            .collect();
        OutTree { root: v, parent }
    }

    /// Every full out-subtree except the whole tree, one per non-root node,
    /// in increasing id of their roots.
    pub fn strict_subtrees(&self) -> Vec<OutTree> {
        self.parent.keys().map(|&v| self.full_subtree(v)).collect()
    }

    /// Full out-subtrees rooted at the children of the root.
    pub fn immediate_subtrees(&self) -> Vec<OutTree> {
        self.children(self.root)
            .into_iter()
            .map(|c| self.full_subtree(c))
            .collect()
    }

    /// `T \ T_v` for a non-root `v`.
    pub fn without_subtree(&self, v: NodeId) -> OutTree {
        assert_ne!(v, self.root, "cannot remove the whole tree");
        let gone = self.subtree_nodes(v);
        let parent = self
            .parent
            .iter()
            .filter(|(c, _)| !gone.contains(c))
            .map(|(&c, &p)| (c, p))
            .collect();
        OutTree {
            root: self.root,
            parent,
        }
    }

    /// The out-subtree induced by a vertex set that contains `root` and is
    /// closed under taking parents (up to `root`).
    pub fn restrict_to(&self, root: NodeId, keep: &BTreeSet<NodeId>) -> Result<OutTree> {
        let mut parent = BTreeMap::new();
        for &v in keep {
            if v == root {
                continue;
            }
            let p = self
                .parent(v)
                .ok_or_else(|| Error::input(format!("node {v} has no parent in the tree")))?;
            if !keep.contains(&p) {
                return Err(Error::input(format!("parent {p} of {v} is not kept")));
            }
            parent.insert(v, p);
        }
        OutTree::from_parents(root, parent)
    }

    /// Whether every node has at most one child.
    pub fn is_path(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.parent.values().all(|p| seen.insert(*p))
    }

    /// Path order for a path-shaped tree.
    pub fn path_nodes(&self) -> Option<Vec<NodeId>> {
        if !self.is_path() {
            return None;
        }
        let next: BTreeMap<NodeId, NodeId> = self.arcs().collect();
        let mut order = vec![self.root];
        let mut cur = self.root;
        while let Some(&n) = next.get(&cur) {
            order.push(n);
            cur = n;
        }
        Some(order)
    }

    /// Applies a relabeling `new → old` (e.g. back from a pruned graph).
    pub fn relabel(&self, new_to_old: &[NodeId]) -> OutTree {
        OutTree {
            root: new_to_old[self.root],
            parent: self
                .parent
                .iter()
                .map(|(&c, &p)| (new_to_old[c], new_to_old[p]))
                .collect(),
        }
    }

    /// Checks that every node and arc exists in `g`.
    pub fn validate_in(&self, g: &Digraph) -> Result<()> {
        g.check_node(self.root)?;
        for (p, c) in self.arcs() {
            g.check_node(c)?;
            if !g.has_arc(p, c) {
                return Err(Error::input(format!(
                    "tree arc ({p}, {c}) is not in the graph"
                )));
            }
        }
        Ok(())
    }

    /// Sum of node costs, without bounds checks on ids.
    pub fn cost_in(&self, g: &Digraph) -> Cost {
        g.cost(self.root) + self.parent.keys().map(|&v| g.cost(v)).sum::<Cost>()
    }
}

pub fn tree_cost(t: &OutTree, g: &Digraph) -> Result<Cost> {
    for v in t.nodes() {
        g.check_node(v)?;
    }
    Ok(t.cost_in(g))
}

pub fn tree_prize(t: &OutTree, p: &PrizeOracle) -> Result<Prize> {
    p.try_value(t.nodes())
}

/// Joins a path `r → z` and an out-tree rooted at `z` into one out-tree rooted
/// at `r`. Arcs of `base` that enter a path node are dropped; every path node
/// keeps its path parent and any base children.
pub fn graft_path(base: &OutTree, path: &OutTree, g: &Digraph) -> Result<OutTree> {
    base.validate_in(g)?;
    path.validate_in(g)?;
    let order = path
        .path_nodes()
        .ok_or_else(|| Error::input("graft expects a path"))?;
    if *order.last().expect("non-empty") != base.root() {
        return Err(Error::input(format!(
            "path ends at {} but the tree is rooted at {}",
            order.last().unwrap(),
            base.root()
        )));
    }
    let on_path: BTreeSet<NodeId> = order.iter().copied().collect();
    let mut parent: BTreeMap<NodeId, NodeId> = path.parents().clone();
    for (&c, &p) in base.parents() {
        if !on_path.contains(&c) {
            parent.insert(c, p);
        }
    }
    OutTree::from_parents(path.root(), parent)
}
