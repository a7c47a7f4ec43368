//! Covering an out-tree by few out-subtrees of bounded cost.
//!
//! For a threshold `m ≤ c(T)` the tree is covered by at most `5⌊c(T)/m⌋`
//! out-subtrees, each of cost at most `m` plus the cost of its own root.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Digraph, OutTree};
use crate::{Cost, Error, NodeId, Result};

/// How a piece was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    /// A child subtree of cost `≥ m/2`, emitted on its own.
    Heavy,
    /// The cut root plus child subtrees of total cost in `[m/2, m)`.
    Group,
    /// The cut root plus the light children left over, total cost `< m/2`.
    Leftover,
    /// The cut root alone, when every child was heavy.
    Singleton,
    /// What remains at the root after all cuts.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub tree: OutTree,
    pub kind: PieceKind,
    /// Cost of the piece without its root.
    pub cost_below_root: Cost,
}

/// Per-cut bookkeeping: the cut subtree's root, cost and number of pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutStats {
    pub root: NodeId,
    pub cost: Cost,
    pub pieces: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub m: Cost,
    pub source_cost: Cost,
    pub pieces: Vec<Piece>,
    pub cuts: Vec<CutStats>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// `5⌊c(T)/m⌋`.
    pub fn piece_bound(&self) -> usize {
        5 * (self.source_cost / self.m) as usize
    }
}

/// Result of the leaves-to-root cutting pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcSplit {
    /// Infeasible subtrees, in the order they were cut.
    pub cuts: Vec<OutTree>,
    /// The feasible remainder containing the root, if the root was not cut.
    pub residual: Option<OutTree>,
}

/// Visits the tree bottom-up (post-order, children by id) and cuts off the
/// current subtree at `v` as soon as its cost without `v` exceeds `m`.
pub fn proc_split(t: &OutTree, g: &Digraph, m: Cost) -> Result<ProcSplit> {
    if m < 1 {
        return Err(Error::input("decomposition threshold must be at least 1"));
    }
    t.validate_in(g)?;
    let children = t.children_map();
    let mut below: BTreeMap<NodeId, Cost> = BTreeMap::new();
    let mut cut: BTreeSet<NodeId> = BTreeSet::new();
    let mut cuts = Vec::new();
    for v in t.post_order() {
        let kids = children.get(&v).map(Vec::as_slice).unwrap_or(&[]);
        let live: Vec<NodeId> = kids.iter().copied().filter(|k| !cut.contains(k)).collect();
        let below_v: Cost = live.iter().map(|k| g.cost(*k) + below[k]).sum();
        below.insert(v, below_v);
        if below_v > m {
            cuts.push(remaining_subtree(v, &children, &cut));
            cut.insert(v);
        }
    }
    let residual = if cut.contains(&t.root()) {
        None
    } else {
        Some(remaining_subtree(t.root(), &children, &cut))
    };
    Ok(ProcSplit { cuts, residual })
}

fn remaining_subtree(
    v: NodeId,
    children: &BTreeMap<NodeId, Vec<NodeId>>,
    cut: &BTreeSet<NodeId>,
) -> OutTree {
    let mut parent = BTreeMap::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &k in children.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if !cut.contains(&k) {
                parent.insert(k, u);
                stack.push(k);
            }
        }
    }
    OutTree::from_parents(v, parent).expect("subtree of a valid tree")
}

/// Splits each cut subtree into heavy children, light groups and (if needed) a
/// singleton, then appends the residual. All bounds are checked before return.
pub fn decompose(t: &OutTree, g: &Digraph, m: Cost) -> Result<Decomposition> {
    let source_cost = t.cost_in(g);
    if m < 1 || m > source_cost {
        return Err(Error::input(format!(
            "threshold {m} must lie in [1, {source_cost}]"
        )));
    }
    let split = proc_split(t, g, m)?;
    let mut pieces = Vec::new();
    let mut stats = Vec::new();
    for cut in &split.cuts {
        let before = pieces.len();
        split_cut(cut, g, m, &mut pieces);
        let cost = cut.cost_in(g);
        let count = pieces.len() - before;
        if count as u64 > 4 * (cost / m) {
            return Err(Error::internal(format!(
                "cut at {} has {count} pieces, more than 4⌊{cost}/{m}⌋",
                cut.root()
            )));
        }
        stats.push(CutStats {
            root: cut.root(),
            cost,
            pieces: count,
        });
    }
    if let Some(res) = split.residual {
        let below = res.cost_in(g) - g.cost(res.root());
        pieces.push(Piece {
            tree: res,
            kind: PieceKind::Residual,
            cost_below_root: below,
        });
    }
    let d = Decomposition {
        m,
        source_cost,
        pieces,
        cuts: stats,
    };
    check(&d, t)?;
    Ok(d)
}

fn split_cut(cut: &OutTree, g: &Digraph, m: Cost, out: &mut Vec<Piece>) {
    let v = cut.root();
    let mut group: Vec<OutTree> = Vec::new();
    let mut group_cost: Cost = 0;
    let mut any_light = false;
    let flush = |group: &mut Vec<OutTree>, cost: Cost, kind: PieceKind, out: &mut Vec<Piece>| {
        let mut parent = BTreeMap::new();
        for sub in group.drain(..) {
            parent.insert(sub.root(), v);
            parent.extend(sub.parents().iter().map(|(&c, &p)| (c, p)));
        }
        out.push(Piece {
            tree: OutTree::from_parents(v, parent).expect("group under the cut root"),
            kind,
            cost_below_root: cost,
        });
    };
    for sub in cut.immediate_subtrees() {
        let c = sub.cost_in(g);
        if 2 * c >= m {
            let below = c - g.cost(sub.root());
            out.push(Piece {
                tree: sub,
                kind: PieceKind::Heavy,
                cost_below_root: below,
            });
            continue;
        }
        any_light = true;
        group.push(sub);
        group_cost += c;
        if 2 * group_cost >= m {
            flush(&mut group, group_cost, PieceKind::Group, out);
            group_cost = 0;
        }
    }
    if !group.is_empty() {
        flush(&mut group, group_cost, PieceKind::Leftover, out);
    } else if !any_light {
        out.push(Piece {
            tree: OutTree::singleton(v),
            kind: PieceKind::Singleton,
            cost_below_root: 0,
        });
    }
}

fn check(d: &Decomposition, t: &OutTree) -> Result<()> {
    if d.len() > d.piece_bound() {
        return Err(Error::internal(format!(
            "{} pieces exceed the bound {}",
            d.len(),
            d.piece_bound()
        )));
    }
    let mut covered = BTreeSet::new();
    for p in &d.pieces {
        if p.cost_below_root > d.m {
            return Err(Error::internal(format!(
                "piece at {} costs {} below its root, above {}",
                p.tree.root(),
                p.cost_below_root,
                d.m
            )));
        }
        for v in p.tree.nodes() {
            if v != p.tree.root() && t.parent(v) != p.tree.parent(v) {
                return Err(Error::internal(format!(
                    "piece arc into {v} is not a tree arc"
                )));
            }
            covered.insert(v);
        }
    }
    if covered != t.node_set() {
        return Err(Error::internal("pieces do not cover the tree"));
    }
    Ok(())
}
