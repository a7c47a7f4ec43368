//! End-to-end pipelines: rooted submodular, rooted additive and unrooted.

use rayon::prelude::*;

use crate::certify::Factor;
use crate::graph::{
    graft_path, node_weighted_shortest_paths, prune_b_appropriate, shortest_path, Digraph, NodeMap,
    OutTree,
};
use crate::submodular::{greedy_rsm, GreedyResult, PrizeOracle, RsmInstance};
use crate::trimming::{
    trim_rooted_additive, trim_rooted_submodular, trim_unrooted_submodular, TrimCase,
};
use crate::{isqrt, Cost, Error, NodeId, Prize, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    SubmodularRooted,
    AdditiveRooted,
    Unrooted,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SubmodularRooted => "drso",
            Variant::AdditiveRooted => "drao",
            Variant::Unrooted => "dso",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Digraph,
    pub oracle: PrizeOracle,
    pub root: Option<NodeId>,
    pub budget: u64,
    pub epsilon: Rational,
    pub variant: Variant,
    /// Produced by a reduction; zero node costs are then allowed.
    pub reduction_produced: bool,
}

impl Instance {
    pub fn rooted(
        graph: Digraph,
        oracle: PrizeOracle,
        root: NodeId,
        budget: u64,
        epsilon: Rational,
    ) -> Self {
        let variant = if oracle.is_additive() {
            Variant::AdditiveRooted
        } else {
            Variant::SubmodularRooted
        };
        Instance {
            graph,
            oracle,
            root: Some(root),
            budget,
            epsilon,
            variant,
            reduction_produced: false,
        }
    }

    pub fn unrooted(graph: Digraph, oracle: PrizeOracle, budget: u64) -> Self {
        Instance {
            graph,
            oracle,
            root: None,
            budget,
            epsilon: Rational::from_integer(1),
            variant: Variant::Unrooted,
            reduction_produced: false,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_nodes();
        if n == 0 {
            return Err(Error::input("graph has no nodes"));
        }
        if self.oracle.num_nodes() != n {
            return Err(Error::input(format!(
                "oracle covers {} nodes but the graph has {n}",
                self.oracle.num_nodes()
            )));
        }
        if self.budget < 1 {
            return Err(Error::input("budget must be at least 1"));
        }
        if self.epsilon <= Rational::from_integer(0) || self.epsilon > Rational::from_integer(1) {
            return Err(Error::input(format!(
                "epsilon {} is outside (0, 1]",
                self.epsilon
            )));
        }
        if !self.reduction_produced {
            if let Some(v) = (0..n).find(|&v| self.graph.cost(v) == 0) {
                return Err(Error::input(format!("node {v} has cost 0")));
            }
        }
        match (self.variant, self.root) {
            (Variant::Unrooted, Some(_)) => {
                return Err(Error::VariantMismatch(
                    "unrooted instance has a root".into(),
                ))
            }
            (Variant::Unrooted, None) => {}
            (_, None) => {
                return Err(Error::VariantMismatch(
                    "rooted instance needs a root".into(),
                ))
            }
            (_, Some(r)) => self.graph.check_node(r)?,
        }
        if self.variant == Variant::AdditiveRooted && !self.oracle.is_additive() {
            return Err(Error::VariantMismatch(
                "additive variant needs an additive oracle".into(),
            ));
        }
        Ok(())
    }
}

/// The per-root candidate of the rooted pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub root: NodeId,
    pub tree: OutTree,
    pub greedy: GreedyResult,
    pub prize: Prize,
}

/// Greedy set inside the `c(u) + ⌊√B⌋` ball around `u`, spanned by shortest
/// paths from `u`.
pub fn candidate_tree(g: &Digraph, u: NodeId, budget: u64, p: &PrizeOracle) -> Result<Candidate> {
    let c = candidate_with_seeds(g, u, &[], isqrt(budget) as usize + 1, budget, p)?;
    if c.tree.cost_in(g) - g.cost(u) > budget {
        return Err(Error::internal(format!(
            "candidate at {u} costs {} below its root, above the budget {budget}",
            c.tree.cost_in(g) - g.cost(u)
        )));
    }
    Ok(c)
}

/// Like [`candidate_tree`] with extra mandatory nodes, which must lie in the ball.
fn candidate_with_seeds(
    g: &Digraph,
    u: NodeId,
    forced: &[NodeId],
    cardinality: usize,
    budget: u64,
    p: &PrizeOracle,
) -> Result<Candidate> {
    let table = node_weighted_shortest_paths(g, u)?;
    let radius = g.cost(u) + isqrt(budget);
    let ball: Vec<NodeId> = (0..g.num_nodes())
        .filter(|&v| table.dist(v).is_some_and(|d| d <= radius))
        .collect();
    let mut seeds = vec![u];
    seeds.extend(forced.iter().copied().filter(|&x| x != u));
    let greedy = greedy_rsm(&RsmInstance {
        oracle: p,
        candidates: ball,
        seeds,
        cardinality,
    })?;
    // Shortest-path predecessors form a tree, so the union of the paths to
    // the selected nodes is an out-tree whose leaves are all selected.
    let mut parent = std::collections::BTreeMap::new();
    for &v in &greedy.selected {
        let mut cur = v;
        while let Some(pr) = table.pred[cur] {
            if parent.insert(cur, pr).is_some() {
                break;
            }
            cur = pr;
        }
    }
    let tree = OutTree::from_parents(u, parent)?;
    let prize = p.value(tree.nodes());
    Ok(Candidate {
        root: u,
        tree,
        greedy,
        prize,
    })
}

fn best_candidate(cands: Vec<Candidate>) -> Option<Candidate> {
    // Candidates arrive in increasing root order, so `>` keeps the smallest id.
    cands
        .into_iter()
        .fold(None, |best: Option<Candidate>, c| match best {
            Some(b) if c.prize <= b.prize => Some(b),
            _ => Some(c),
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificates {
    /// Lower bound on the pre-trim prize as a fraction of the optimum.
    pub pre_trim: Option<Factor>,
    /// Lower bound on the final prize as a fraction of the optimum.
    pub final_factor: Factor,
}

/// Outcome of checking a report against a known optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub name: &'static str,
    pub factor: Factor,
    pub value: Prize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub variant: Variant,
    /// Solution over the original node ids.
    pub tree: OutTree,
    pub cost: Cost,
    pub prize: Prize,
    pub budget: u64,
    pub epsilon: Option<Rational>,
    /// `cost / B`.
    pub budget_factor: Rational,
    /// Root of the winning candidate, original id.
    pub chosen_root: Option<NodeId>,
    pub candidate_prize: Prize,
    pub pre_trim_cost: Cost,
    pub pre_trim_prize: Prize,
    pub trim_case: Option<TrimCase>,
    pub certificates: Certificates,
    /// Prize of nodes dropped by budget pruning or cost filters.
    pub unreachable_prize: Prize,
    /// Which run produced the answer (`flat`, `saddled:x`, ...).
    pub run: String,
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    /// Checks every certificate against an exact optimum.
    pub fn check_against(&self, opt: Prize) -> Vec<CertificateCheck> {
        let mut out = Vec::new();
        if let Some(f) = &self.certificates.pre_trim {
            out.push(CertificateCheck {
                name: "pre_trim",
                factor: f.clone(),
                value: self.pre_trim_prize,
                bound: f.bound_f64(opt),
                holds: f.holds(self.pre_trim_prize, opt),
            });
        }
        let f = &self.certificates.final_factor;
        out.push(CertificateCheck {
            name: "final",
            factor: f.clone(),
            value: self.prize,
            bound: f.bound_f64(opt),
            holds: f.holds(self.prize, opt),
        });
        out
    }

    /// The budget contract: `(1+ε)B` for rooted variants, `B` otherwise.
    pub fn within_budget(&self) -> bool {
        let limit = match (self.variant, self.epsilon) {
            (Variant::Unrooted, _) | (_, None) => Rational::from_integer(1),
            (_, Some(e)) => Rational::from_integer(1) + e,
        };
        self.budget_factor <= limit
    }
}

fn factor_of(cost: Cost, budget: u64) -> Rational {
    Rational::new(cost as i128, budget as i128)
}

fn unreachable_prize(p: &PrizeOracle, map: &NodeMap) -> Prize {
    p.total() - p.value(map.new_to_old.iter().copied())
}

/// Dispatches on the instance variant.
pub fn solve(inst: &Instance) -> Result<SolveReport> {
    match inst.variant {
        Variant::SubmodularRooted => solve_drso(inst),
        Variant::AdditiveRooted => solve_drao(inst),
        Variant::Unrooted => solve_dso_unrooted(inst),
    }
}

pub fn solve_drso(inst: &Instance) -> Result<SolveReport> {
    if inst.variant != Variant::SubmodularRooted {
        return Err(Error::VariantMismatch(format!(
            "expected a drso instance, got {}",
            inst.variant.as_str()
        )));
    }
    solve_rooted(inst, false)
}

pub fn solve_drao(inst: &Instance) -> Result<SolveReport> {
    if !inst.oracle.is_additive() {
        return Err(Error::VariantMismatch(
            "drao needs an additive oracle".into(),
        ));
    }
    if inst.variant != Variant::AdditiveRooted {
        return Err(Error::VariantMismatch(format!(
            "expected a drao instance, got {}",
            inst.variant.as_str()
        )));
    }
    solve_rooted(inst, true)
}

fn solve_rooted(inst: &Instance, additive: bool) -> Result<SolveReport> {
    inst.validate()?;
    let r = inst.root.expect("validated");
    let b = inst.budget;
    let eps = inst.epsilon;
    let pruned = prune_b_appropriate(&inst.graph, r, b)?;
    let g = &pruned.graph;
    let p = inst.oracle.relabel(&pruned.map.new_to_old);
    let cands: Vec<Candidate> = (0..g.num_nodes())
        .into_par_iter()
        .map(|u| candidate_tree(g, u, b, &p))
        .collect::<Result<_>>()?;
    let z = best_candidate(cands).expect("the root survives pruning");
    let path = shortest_path(g, pruned.root, z.root)?;
    let grafted = graft_path(&z.tree, &path, g)?;
    let pre_cost = grafted.cost_in(g);
    let pre_prize = p.value(grafted.nodes());
    if pre_cost > 2 * b {
        return Err(Error::internal(format!(
            "grafted tree costs {pre_cost}, above 2B"
        )));
    }
    let upper = (Rational::from_integer(1) + eps) * Rational::from_integer(b as i128);
    let two = Rational::from_integer(2);
    let (tree, case, diagnostics) = if Rational::from_integer(pre_cost as i128) > upper {
        let rep = if additive {
            trim_rooted_additive(g, &grafted, &p, b, eps)?
        } else {
            trim_rooted_submodular(g, &grafted, &p, b, eps, two)?
        };
        (rep.output, Some(rep.case), rep.diagnostics)
    } else {
        (grafted, None, Vec::new())
    };
    let cost = tree.cost_in(g);
    let prize = p.value(tree.nodes());
    if Rational::from_integer(cost as i128) > upper {
        return Err(Error::internal(format!("final cost {cost} exceeds (1+ε)B")));
    }
    let final_factor = if additive {
        Factor::drao_final(b, eps)
    } else {
        Factor::drso_final(b, eps)
    };
    Ok(SolveReport {
        variant: inst.variant,
        tree: tree.relabel(&pruned.map.new_to_old),
        cost,
        prize,
        budget: b,
        epsilon: Some(eps),
        budget_factor: factor_of(cost, b),
        chosen_root: Some(pruned.map.new_to_old[z.root]),
        candidate_prize: z.prize,
        pre_trim_cost: pre_cost,
        pre_trim_prize: pre_prize,
        trim_case: case,
        certificates: Certificates {
            pre_trim: Some(Factor::pre_trim(b)),
            final_factor,
        },
        unreachable_prize: unreachable_prize(&inst.oracle, &pruned.map),
        run: "rooted".into(),
        diagnostics,
    })
}

/// One unrooted run on a filtered (possibly cost-modified) graph.
struct RunResult {
    label: String,
    tree: OutTree,
    chosen_root: NodeId,
    candidate_prize: Prize,
    pre_cost: Cost,
    pre_prize: Prize,
    case: Option<TrimCase>,
    diagnostics: Vec<String>,
}

fn unrooted_run(
    g: &Digraph,
    p: &PrizeOracle,
    budget: u64,
    forced: Option<NodeId>,
    label: String,
) -> Result<Option<RunResult>> {
    let n = g.num_nodes();
    if n == 0 {
        return Ok(None);
    }
    let k = isqrt(budget) as usize + 1;
    let cands: Vec<Option<Candidate>> = (0..n)
        .into_par_iter()
        .map(|u| match forced {
            None => candidate_tree(g, u, budget, p).map(Some),
            Some(x) => {
                let table = node_weighted_shortest_paths(g, u)?;
                let inside = table
                    .dist(x)
                    .is_some_and(|d| d <= g.cost(u) + isqrt(budget));
                if !inside || x == u {
                    return Ok(None);
                }
                candidate_with_seeds(g, u, &[x], k + 1, budget, p).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let Some(z) = best_candidate(cands.into_iter().flatten().collect()) else {
        return Ok(None);
    };
    let pre_cost = z.tree.cost_in(g);
    let pre_prize = z.prize;
    let mut diagnostics = vec![format!(
        "{label}: pre-trim cost {pre_cost} for budget {budget}"
    )];
    let (tree, case) = if pre_cost > budget {
        let b = Rational::from_integer(budget as i128);
        let h = Rational::from_integer(2).max(Rational::from_integer(pre_cost as i128) / b);
        if h > Rational::from_integer(2) {
            diagnostics.push(format!("{label}: trimming with h = {h}"));
        }
        let rep = trim_unrooted_submodular(&z.tree, g, p, budget, h)?;
        diagnostics.extend(rep.diagnostics);
        (rep.output, Some(rep.case))
    } else {
        (z.tree.clone(), None)
    };
    Ok(Some(RunResult {
        label,
        tree,
        chosen_root: z.root,
        candidate_prize: z.prize,
        pre_cost,
        pre_prize,
        case,
        diagnostics,
    }))
}

/// Unrooted pipeline: a flat run over nodes of cost at most `B/2`, plus a
/// saddled run for every heavy node `x` with its cost moved out of the budget.
pub fn solve_dso_unrooted(inst: &Instance) -> Result<SolveReport> {
    inst.validate()?;
    if inst.variant != Variant::Unrooted {
        return Err(Error::VariantMismatch(
            "expected an unrooted instance".into(),
        ));
    }
    let g0 = &inst.graph;
    let b = inst.budget;
    if (0..g0.num_nodes()).all(|v| g0.cost(v) > b) {
        return Err(Error::Infeasible(format!(
            "every node costs more than the budget {b}"
        )));
    }
    let mut best: Option<(Prize, Cost, RunResult, NodeMap)> = None;
    let mut all_diag = Vec::new();
    let mut consider = |run: Option<RunResult>, map: NodeMap| -> Result<()> {
        let Some(run) = run else { return Ok(()) };
        let tree = run.tree.relabel(&map.new_to_old);
        let cost = tree.cost_in(g0);
        let prize = inst.oracle.value(tree.nodes());
        if cost > b {
            return Err(Error::internal(format!(
                "{} produced cost {cost} above B",
                run.label
            )));
        }
        all_diag.extend(run.diagnostics.iter().cloned());
        if best.as_ref().is_none_or(|(bp, _, _, _)| prize > *bp) {
            best = Some((prize, cost, run, map));
        }
        Ok(())
    };

    let flat: Vec<bool> = (0..g0.num_nodes()).map(|v| 2 * g0.cost(v) <= b).collect();
    let (gf, mf) = g0.induced(&flat);
    let pf = inst.oracle.relabel(&mf.new_to_old);
    consider(unrooted_run(&gf, &pf, b, None, "flat".into())?, mf.clone())?;

    for x in (0..g0.num_nodes()).filter(|&x| 2 * g0.cost(x) > b && g0.cost(x) <= b) {
        let b2 = b - g0.cost(x);
        let keep: Vec<bool> = (0..g0.num_nodes())
            .map(|v| v == x || 2 * g0.cost(v) <= b2)
            .collect();
        let (mut gs, ms) = g0.induced(&keep);
        let xs = ms.old_to_new[x].expect("x is kept");
        gs.set_cost(xs, 0);
        let ps = inst.oracle.relabel(&ms.new_to_old);
        // With nothing left of the budget only zero-cost nodes remain, so any
        // positive stand-in budget yields the same trees.
        consider(
            unrooted_run(&gs, &ps, b2.max(1), None, format!("saddled:{x}"))?,
            ms.clone(),
        )?;
        consider(
            unrooted_run(&gs, &ps, b2.max(1), Some(xs), format!("saddled-forced:{x}"))?,
            ms,
        )?;
    }
    let (prize, cost, run, map) =
        best.ok_or_else(|| Error::Infeasible("no run produced a tree".into()))?;
    Ok(SolveReport {
        variant: Variant::Unrooted,
        tree: run.tree.relabel(&map.new_to_old),
        cost,
        prize,
        budget: b,
        epsilon: None,
        budget_factor: factor_of(cost, b),
        chosen_root: Some(map.new_to_old[run.chosen_root]),
        candidate_prize: run.candidate_prize,
        pre_trim_cost: run.pre_cost,
        pre_trim_prize: run.pre_prize,
        trim_case: run.case,
        certificates: Certificates {
            pre_trim: None,
            final_factor: Factor::unrooted_final(b),
        },
        unreachable_prize: unreachable_prize(&inst.oracle, &mf),
        run: run.label,
        diagnostics: all_diag,
    })
}
