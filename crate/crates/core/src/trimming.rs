//! Cutting an oversized out-tree down to a budget window while keeping a
//! constant fraction of its prize-to-cost ratio.
//!
//! All three procedures share one engine parameterized by a cost floor `F`,
//! an upper limit `U` and whether the result must stay rooted at `r`:
//!
//! | procedure  | `F`     | `U`        | ratio kept          |
//! |------------|---------|------------|---------------------|
//! | rooted     | `εB/2`  | `(1+ε)B`   | `ε²γ / (32h)`       |
//! | unrooted   | `B/4`   | `B`        | `γ / (32h + 8)`     |
//! | additive   | `εB/2`  | `(1+ε)B`   | `εγ / 4`            |
//!
//! Groups of sibling subtrees are built with costs in `[F, 2F)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::certify::big;
use crate::graph::{graft_path, is_b_appropriate, shortest_path, Digraph, OutTree};
use crate::submodular::PrizeOracle;
use crate::{Cost, Error, NodeId, Prize, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrimCase {
    AlreadyCheap,
    RichCase1,
    RichCase2,
    NoRichHeavy,
    NoRichLight,
}

impl TrimCase {
    pub fn as_str(self) -> &'static str {
        match self {
            TrimCase::AlreadyCheap => "already-cheap",
            TrimCase::RichCase1 => "rich-case-1",
            TrimCase::RichCase2 => "rich-case-2",
            TrimCase::NoRichHeavy => "norich-heavy",
            TrimCase::NoRichLight => "norich-light",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrimReport {
    pub output: OutTree,
    pub case: TrimCase,
    /// `p(T)/c(T)` of the input tree.
    pub gamma: BigRational,
    pub output_ratio: BigRational,
    /// The ratio the procedure promises, already multiplied by `γ`.
    pub guaranteed_ratio: BigRational,
    pub output_cost: Cost,
    pub output_prize: Prize,
    /// Number of groups formed (0 when no grouping happened).
    pub groups: usize,
    /// Subtrees dropped during the initial phase.
    pub initial_removals: usize,
    pub h: Option<Rational>,
    pub epsilon: Option<Rational>,
    /// Observations that do not invalidate the output.
    pub diagnostics: Vec<String>,
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

struct Engine<'a> {
    g: &'a Digraph,
    p: &'a PrizeOracle,
    floor: BigRational,
    upper: BigRational,
    /// Root the output must keep.
    anchor: Option<NodeId>,
    additive: bool,
    p_in: Prize,
    c_in: Cost,
}

/// Cost and prize of every full subtree of the current tree.
struct Stats {
    post: Vec<NodeId>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    cost: BTreeMap<NodeId, Cost>,
    prize: BTreeMap<NodeId, Prize>,
}

impl Stats {
    fn of(t: &OutTree, g: &Digraph, p: &PrizeOracle) -> Stats {
        let post = t.post_order();
        let children = t.children_map();
        let mut cost = BTreeMap::new();
        let mut nodes: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut prize = BTreeMap::new();
        for &v in &post {
            let mut set = vec![v];
            let mut c = g.cost(v);
            for k in children.get(&v).into_iter().flatten() {
                c += cost[k];
                set.extend(nodes[k].iter().copied());
            }
            prize.insert(v, p.value(set.iter().copied()));
            cost.insert(v, c);
            nodes.insert(v, set);
        }
        Stats {
            post,
            children,
            cost,
            prize,
        }
    }

    fn kids(&self, v: NodeId) -> &[NodeId] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Engine<'_> {
    /// `prize / cost ≥ γ`, cross-multiplied so zero-cost sets always pass.
    fn good(&self, prize: Prize, cost: Cost) -> bool {
        prize as u128 * self.c_in as u128 >= self.p_in as u128 * cost as u128
    }

    fn at_least_floor(&self, c: Cost) -> bool {
        rat(c) >= self.floor
    }

    fn initial_phase(&self, t: &OutTree) -> (OutTree, usize) {
        let mut cur = t.clone();
        let mut removals = 0;
        'outer: loop {
            let st = Stats::of(&cur, self.g, self.p);
            let total = st.cost[&cur.root()];
            let mut order: Vec<NodeId> = cur.parents().keys().copied().collect();
            order.sort_by_key(|v| (std::cmp::Reverse(st.cost[v]), *v));
            for v in order {
                let rest_cost = total - st.cost[&v];
                if !self.at_least_floor(rest_cost) {
                    continue;
                }
                let rest = cur.without_subtree(v);
                if self.good(self.p.value(rest.nodes()), rest_cost) {
                    cur = rest;
                    removals += 1;
                    continue 'outer;
                }
            }
            return (cur, removals);
        }
    }

    /// Partitions sibling subtrees (each lighter than `F`) into groups of cost
    /// in `[F, 2F)` in id order; a final lighter group may remain.
    fn group(&self, subs: &[OutTree]) -> Vec<Vec<usize>> {
        let mut groups = Vec::new();
        let mut cur = Vec::new();
        let mut cost = 0;
        for (i, s) in subs.iter().enumerate() {
            cur.push(i);
            cost += s.cost_in(self.g);
            if self.at_least_floor(cost) {
                groups.push(std::mem::take(&mut cur));
                cost = 0;
            }
        }
        if !cur.is_empty() {
            groups.push(cur);
        }
        groups
    }

    fn attach(&self, root: NodeId, subs: &[&OutTree]) -> OutTree {
        let mut parent = BTreeMap::new();
        for s in subs {
            parent.insert(s.root(), root);
            parent.extend(s.parents().iter().map(|(&c, &p)| (c, p)));
        }
        OutTree::from_parents(root, parent).expect("siblings under a common root")
    }

    /// Groups the children of `top` in `tree`, picks the group that together
    /// with `top` has the largest prize and pads it up to `F` if it is the
    /// light leftover.
    fn group_and_pick(
        &self,
        tree: &OutTree,
        top: NodeId,
        diag: &mut Vec<String>,
    ) -> Result<(OutTree, usize)> {
        let subs: Vec<OutTree> = tree.full_subtree(top).immediate_subtrees();
        let groups = self.group(&subs);
        if groups.is_empty() {
            return Err(Error::internal(format!(
                "node {top} has no children to group"
            )));
        }
        let value = |idx: &[usize]| {
            let parts: Vec<&OutTree> = idx.iter().map(|&i| &subs[i]).collect();
            self.p.value(self.attach(top, &parts).nodes())
        };
        let mut best = 0;
        let mut best_val = value(&groups[0]);
        let mut sum: Prize = best_val;
        for (i, gr) in groups.iter().enumerate().skip(1) {
            let v = value(gr);
            sum += v;
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        let whole = self.p.value(tree.full_subtree(top).nodes());
        if sum < whole {
            return Err(Error::internal(format!(
                "group prizes sum to {sum}, below the subtree prize {whole}"
            )));
        }
        if (best_val as u128) * (groups.len() as u128) < whole as u128 {
            return Err(Error::internal("best group is below the average bound"));
        }
        let mut pick = groups[best].clone();
        let mut cost: Cost = pick.iter().map(|&i| subs[i].cost_in(self.g)).sum();
        if !self.at_least_floor(cost) {
            for (i, sub) in subs.iter().enumerate() {
                if self.at_least_floor(cost) {
                    break;
                }
                if !pick.contains(&i) {
                    pick.push(i);
                    cost += sub.cost_in(self.g);
                }
            }
            pick.sort_unstable();
            diag.push(format!("light group padded to cost {cost}"));
        }
        let parts: Vec<&OutTree> = pick.iter().map(|&i| &subs[i]).collect();
        Ok((self.attach(top, &parts), groups.len()))
    }

    fn anchor_to(&self, base: OutTree) -> Result<OutTree> {
        match self.anchor {
            None => Ok(base),
            Some(r) => {
                let path = shortest_path(self.g, r, base.root())?;
                graft_path(&base, &path, self.g)
            }
        }
    }

    fn run(&self, t: &OutTree) -> Result<Outcome> {
        let mut diag = Vec::new();
        let (cur, removals) = self.initial_phase(t);
        let total = cur.cost_in(self.g);
        if rat(total) <= self.upper {
            return Ok(Outcome::new(cur, TrimCase::AlreadyCheap, 0, removals, diag));
        }
        let st = Stats::of(&cur, self.g, self.p);
        let mut good = BTreeMap::new();
        let mut all_good = BTreeMap::new();
        for &v in &st.post {
            let gv = self.good(st.prize[&v], st.cost[&v]);
            let ag = gv && st.kids(v).iter().all(|k| all_good[k]);
            good.insert(v, gv);
            all_good.insert(v, ag);
        }
        let rich = |v: &NodeId| all_good[v] && self.at_least_floor(st.cost[v]);
        let lowest_rich = st
            .post
            .iter()
            .copied()
            .find(|v| rich(v) && st.kids(*v).iter().all(|k| !self.at_least_floor(st.cost[k])));

        if let Some(top) = lowest_rich {
            let below = st.cost[&top] - self.g.cost(top);
            if !self.at_least_floor(below) {
                let out = self.anchor_to(cur.full_subtree(top))?;
                return Ok(Outcome::new(out, TrimCase::RichCase1, 0, removals, diag));
            }
            let (base, m) = self.group_and_pick(&cur, top, &mut diag)?;
            let out = self.anchor_to(base)?;
            return Ok(Outcome::new(out, TrimCase::RichCase2, m, removals, diag));
        }

        let low_bad = st
            .post
            .iter()
            .copied()
            .find(|v| *v != cur.root() && !good[v] && st.kids(*v).iter().all(|k| all_good[k]))
            .ok_or_else(|| Error::internal("no rich subtree and no bad strict subtree"))?;
        let rest_cost = total - st.cost[&low_bad];
        if self.at_least_floor(rest_cost) {
            return Err(Error::internal(format!(
                "remainder after removing the subtree at {low_bad} costs {rest_cost}, not below the floor"
            )));
        }
        let below = st.cost[&low_bad] - self.g.cost(low_bad);
        if !self.at_least_floor(below) {
            return Err(Error::internal(format!(
                "children of {low_bad} cost {below} in total, below the floor"
            )));
        }
        let heavy = rat(2) * rat(st.prize[&low_bad]) * rat(self.c_in)
            >= self.floor.clone() * rat(self.p_in);
        if self.additive || heavy {
            let (base, m) = self.group_and_pick(&cur, low_bad, &mut diag)?;
            let out = self.anchor_to(base)?;
            return Ok(Outcome::new(out, TrimCase::NoRichHeavy, m, removals, diag));
        }

        // Keep everything outside the bad subtree, then hang its root and
        // enough of its children back on.
        let outside = cur.without_subtree(low_bad);
        let mut cost = outside.cost_in(self.g);
        let mut keep: BTreeSet<NodeId> = outside.node_set();
        keep.insert(low_bad);
        for k in st.kids(low_bad) {
            if self.at_least_floor(cost) {
                break;
            }
            let sub = cur.full_subtree(*k);
            cost += sub.cost_in(self.g);
            keep.extend(sub.nodes());
        }
        let out = cur.restrict_to(cur.root(), &keep)?;
        let mut outcome = Outcome::new(out, TrimCase::NoRichLight, 0, removals, diag);
        outcome.bad_cost = Some(st.cost[&low_bad]);
        Ok(outcome)
    }
}

struct Outcome {
    tree: OutTree,
    case: TrimCase,
    groups: usize,
    removals: usize,
    diag: Vec<String>,
    /// Cost of the bad subtree in the light case.
    bad_cost: Option<Cost>,
}

impl Outcome {
    fn new(
        tree: OutTree,
        case: TrimCase,
        groups: usize,
        removals: usize,
        diag: Vec<String>,
    ) -> Self {
        Outcome {
            tree,
            case,
            groups,
            removals,
            diag,
            bad_cost: None,
        }
    }
}

struct Setup<'a> {
    engine: Engine<'a>,
    guaranteed: BigRational,
    group_cap: Option<BigRational>,
    h: Option<Rational>,
    epsilon: Option<Rational>,
}

fn check_rational_params(epsilon: Option<Rational>, h: Option<Rational>) -> Result<()> {
    if let Some(e) = epsilon {
        if e <= Rational::zero() || e > Rational::one() {
            return Err(Error::Precondition(format!(
                "epsilon {e} is outside (0, 1]"
            )));
        }
    }
    if let Some(h) = h {
        if h <= Rational::one() {
            return Err(Error::Precondition(format!("h = {h} must exceed 1")));
        }
    }
    Ok(())
}

fn execute(setup: Setup, t: &OutTree) -> Result<TrimReport> {
    let e = &setup.engine;
    let gamma = BigRational::new(BigInt::from(e.p_in), BigInt::from(e.c_in));
    let Outcome {
        tree: output,
        case,
        groups,
        removals,
        diag: mut diagnostics,
        bad_cost,
    } = e.run(t)?;
    output.validate_in(e.g)?;
    if let Some(r) = e.anchor {
        if output.root() != r {
            return Err(Error::internal(format!(
                "output is rooted at {} instead of {r}",
                output.root()
            )));
        }
    }
    let output_cost = output.cost_in(e.g);
    let output_prize = e.p.value(output.nodes());
    if rat(output_cost) < e.floor || rat(output_cost) > e.upper {
        return Err(Error::internal(format!(
            "output cost {output_cost} outside [{}, {}] ({})",
            e.floor,
            e.upper,
            case.as_str()
        )));
    }
    let output_ratio =
        BigRational::new(BigInt::from(output_prize), BigInt::from(output_cost.max(1)));
    let bound = &setup.guaranteed * &gamma;
    if rat(output_prize) < &bound * rat(output_cost) {
        return Err(Error::internal(format!(
            "output ratio {output_prize}/{output_cost} below the guarantee {bound} ({})",
            case.as_str()
        )));
    }
    if e.additive && rat(output_prize) < &gamma * &e.floor {
        return Err(Error::internal(format!(
            "additive output prize {output_prize} below γ·εB/2 = {}",
            &gamma * &e.floor
        )));
    }
    if let Some(cap) = &setup.group_cap {
        if rat(groups as u64) > *cap {
            return Err(Error::internal(format!(
                "{groups} groups exceed the cap {cap}"
            )));
        }
    }
    if let (Some(bad), Some(eps)) = (bad_cost, setup.epsilon) {
        // With c(T_) > (1+ε)B and c(T_ \ T') < εB/2 the bad subtree must
        // cost more than (1 + ε/2)B.
        let budget = &e.upper / (BigRational::one() + big(eps));
        let threshold = budget * (BigRational::one() + big(eps) / BigInt::from(2));
        if rat(bad) <= threshold {
            diagnostics.push(format!(
                "bad subtree costs {bad}, not above (1+ε/2)B = {threshold}"
            ));
        }
    }
    Ok(TrimReport {
        output,
        case,
        gamma,
        output_ratio,
        guaranteed_ratio: bound,
        output_cost,
        output_prize,
        groups,
        initial_removals: removals,
        h: setup.h,
        epsilon: setup.epsilon,
        diagnostics,
    })
}

fn input_totals(g: &Digraph, t: &OutTree, p: &PrizeOracle) -> Result<(Prize, Cost)> {
    t.validate_in(g)?;
    if p.num_nodes() != g.num_nodes() {
        return Err(Error::input(format!(
            "oracle has {} nodes but the graph has {}",
            p.num_nodes(),
            g.num_nodes()
        )));
    }
    Ok((p.value(t.nodes()), t.cost_in(g)))
}

fn rooted_checks(g: &Digraph, t: &OutTree, budget: u64) -> Result<NodeId> {
    let r = t.root();
    if !is_b_appropriate(g, r, budget)? {
        return Err(Error::Precondition(format!(
            "graph is not {budget}-appropriate for node {r}"
        )));
    }
    Ok(r)
}

/// Trims a rooted out-tree of cost in `[εB/2, hB]` to cost in
/// `[εB/2, (1+ε)B]`, keeping ratio at least `ε²γ/(32h)`.
pub fn trim_rooted_submodular(
    g: &Digraph,
    t: &OutTree,
    p: &PrizeOracle,
    budget: u64,
    epsilon: Rational,
    h: Rational,
) -> Result<TrimReport> {
    check_rational_params(Some(epsilon), Some(h))?;
    let (p_in, c_in) = input_totals(g, t, p)?;
    let r = rooted_checks(g, t, budget)?;
    let eps = big(epsilon);
    let b = rat(budget);
    let floor = &eps * &b / BigInt::from(2);
    if rat(c_in) < floor || rat(c_in) > big(h) * &b {
        return Err(Error::Precondition(format!(
            "tree cost {c_in} outside [εB/2, hB] = [{floor}, {}]",
            big(h) * &b
        )));
    }
    let setup = Setup {
        engine: Engine {
            g,
            p,
            upper: (BigRational::one() + &eps) * &b,
            floor,
            anchor: Some(r),
            additive: false,
            p_in,
            c_in,
        },
        guaranteed: &eps * &eps / (big(h) * BigInt::from(32)),
        group_cap: Some(big(h) * BigInt::from(4) / &eps),
        h: Some(h),
        epsilon: Some(epsilon),
    };
    execute(setup, t)
}

/// Trims an out-tree of cost in `[B/2, hB]` whose nodes each cost at most
/// `B/2` to cost in `[B/4, B]`, keeping ratio at least `γ/(32h+8)`.
pub fn trim_unrooted_submodular(
    t: &OutTree,
    g: &Digraph,
    p: &PrizeOracle,
    budget: u64,
    h: Rational,
) -> Result<TrimReport> {
    check_rational_params(None, Some(h))?;
    let (p_in, c_in) = input_totals(g, t, p)?;
    if let Some(v) = t.nodes().into_iter().find(|&v| 2 * g.cost(v) > budget) {
        return Err(Error::Precondition(format!(
            "node {v} costs {}, more than half the budget {budget}",
            g.cost(v)
        )));
    }
    let b = rat(budget);
    if rat(2 * c_in) < b || rat(c_in) > big(h) * &b {
        return Err(Error::Precondition(format!(
            "tree cost {c_in} outside [B/2, hB] = [{}, {}]",
            &b / BigInt::from(2),
            big(h) * &b
        )));
    }
    let setup = Setup {
        engine: Engine {
            g,
            p,
            floor: &b / BigInt::from(4),
            upper: b,
            anchor: None,
            additive: false,
            p_in,
            c_in,
        },
        guaranteed: BigRational::one() / (big(h) * BigInt::from(32) + BigInt::from(8)),
        group_cap: Some(big(h) * BigInt::from(4) + BigInt::from(1)),
        h: Some(h),
        epsilon: None,
    };
    execute(setup, t)
}

/// Trims a rooted out-tree of cost at least `εB/2` under an additive prize to
/// cost in `[εB/2, (1+ε)B]` with ratio at least `εγ/4` and prize at least
/// `γεB/2`.
pub fn trim_rooted_additive(
    g: &Digraph,
    t: &OutTree,
    p: &PrizeOracle,
    budget: u64,
    epsilon: Rational,
) -> Result<TrimReport> {
    check_rational_params(Some(epsilon), None)?;
    if !p.is_additive() {
        return Err(Error::VariantMismatch(
            "additive trimming needs an additive oracle".into(),
        ));
    }
    let (p_in, c_in) = input_totals(g, t, p)?;
    let r = rooted_checks(g, t, budget)?;
    let eps = big(epsilon);
    let b = rat(budget);
    let floor = &eps * &b / BigInt::from(2);
    if rat(c_in) < floor {
        return Err(Error::Precondition(format!(
            "tree cost {c_in} is below εB/2 = {floor}"
        )));
    }
    let setup = Setup {
        engine: Engine {
            g,
            p,
            upper: (BigRational::one() + &eps) * &b,
            floor,
            anchor: Some(r),
            additive: true,
            p_in,
            c_in,
        },
        guaranteed: &eps / BigInt::from(4),
        group_cap: None,
        h: None,
        epsilon: Some(epsilon),
    };
    execute(setup, t)
}
