//! The JSON instance format.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "variant": "drso",
//!   "nodes": [{"id": 0, "cost": 1}, {"id": 1, "cost": 2}],
//!   "arcs": [[0, 1]],
//!   "oracle": {"additive": [0, 5]},
//!   "root": 0,
//!   "budget": 3,
//!   "epsilon": "1/2"
//! }
//! ```
//!
//! `sto` files give every arc a third entry, its cost. `mwbcsc` files list
//! sets as nodes and the set-adjacency edges as arcs (each pair once).

use std::collections::BTreeSet;

use outtree::reductions::{MwbcscInstance, StoInstance};
use outtree::{Digraph, Instance, PrizeOracle, Rational, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantTag {
    Drso,
    Drao,
    Dso,
    Sto,
    Mwbcsc,
}

impl VariantTag {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantTag::Drso => "drso",
            VariantTag::Drao => "drao",
            VariantTag::Dso => "dso",
            VariantTag::Sto => "sto",
            VariantTag::Mwbcsc => "mwbcsc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: usize,
    pub cost: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcSpec {
    Plain(usize, usize),
    Weighted(usize, usize, u64),
}

impl ArcSpec {
    pub fn ends(self) -> (usize, usize) {
        match self {
            ArcSpec::Plain(u, v) | ArcSpec::Weighted(u, v, _) => (u, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub id: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSpec {
    pub elements: Vec<ElementSpec>,
    pub node_sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OracleSpec {
    Additive(Vec<u64>),
    Coverage(CoverageSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    pub variant: VariantTag,
    pub nodes: Vec<NodeSpec>,
    pub arcs: Vec<ArcSpec>,
    pub oracle: OracleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    pub budget: u64,
    /// Exact rational such as `"1/4"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    /// Seed the generator used, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A loaded file turned into the matching library problem.
#[derive(Debug, Clone)]
pub enum Problem {
    Node(Instance),
    Sto(StoInstance),
    Mwbcsc(MwbcscInstance),
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| CliError::Usage(format!("epsilon {s:?} is not a rational: {e}")))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let f: InstanceFile =
            serde_json::from_str(text).map_err(|e| invalid(format!("instance file: {e}")))?;
        if f.schema != SCHEMA {
            return Err(invalid(format!(
                "schema version {} is not supported (expected {SCHEMA})",
                f.schema
            )));
        }
        f.problem()?;
        Ok(f)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// SHA-256 over the compact serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plain data serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn epsilon(&self) -> Result<Option<Rational>, CliError> {
        self.epsilon.as_deref().map(parse_rational).transpose()
    }

    /// Node costs in id order; ids must be exactly `0..n`.
    fn costs(&self) -> Result<Vec<u64>, CliError> {
        let n = self.nodes.len();
        let mut costs = vec![None; n];
        for node in &self.nodes {
            if node.id >= n {
                return Err(invalid(format!("node id {} with only {n} nodes", node.id)));
            }
            if costs[node.id].replace(node.cost).is_some() {
                return Err(invalid(format!("node id {} appears twice", node.id)));
            }
        }
        Ok(costs
            .into_iter()
            .map(|c| c.expect("all ids seen"))
            .collect())
    }

    fn oracle(&self, n: usize) -> Result<PrizeOracle, CliError> {
        let oracle = match &self.oracle {
            OracleSpec::Additive(w) => {
                if w.len() != n {
                    return Err(invalid(format!(
                        "{} additive weights for {n} nodes",
                        w.len()
                    )));
                }
                PrizeOracle::Additive(w.clone())
            }
            OracleSpec::Coverage(c) => {
                if c.node_sets.len() != n {
                    return Err(invalid(format!(
                        "{} node sets for {n} nodes",
                        c.node_sets.len()
                    )));
                }
                let k = c.elements.len();
                let mut weights = vec![None; k];
                for e in &c.elements {
                    if e.id >= k {
                        return Err(invalid(format!(
                            "element id {} with only {k} elements",
                            e.id
                        )));
                    }
                    if weights[e.id].replace(e.weight).is_some() {
                        return Err(invalid(format!("element id {} appears twice", e.id)));
                    }
                }
                let weights: Vec<i64> = weights
                    .into_iter()
                    .map(|w| {
                        i64::try_from(w.expect("all ids seen"))
                            .map_err(|_| invalid("element weight too large"))
                    })
                    .collect::<Result<_, _>>()?;
                PrizeOracle::coverage(c.node_sets.clone(), weights).map_err(lib_invalid)?
            }
        };
        Ok(oracle)
    }

    fn plain_arcs(&self) -> Result<Vec<(usize, usize)>, CliError> {
        self.arcs
            .iter()
            .map(|a| match a {
                ArcSpec::Plain(u, v) => Ok((*u, *v)),
                ArcSpec::Weighted(..) => Err(invalid(format!(
                    "arc {:?} carries a cost, which only sto files allow",
                    a.ends()
                ))),
            })
            .collect()
    }

    /// Builds and validates the library problem.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let costs = self.costs()?;
        let n = costs.len();
        let oracle = self.oracle(n)?;
        let eps = self.epsilon()?.unwrap_or(crate::DEFAULT_EPSILON);
        match self.variant {
            VariantTag::Drso | VariantTag::Drao => {
                let root = self
                    .root
                    .ok_or_else(|| invalid("rooted variants need a root"))?;
                let graph = Digraph::new(costs, self.plain_arcs()?).map_err(lib_invalid)?;
                let variant = if self.variant == VariantTag::Drao {
                    Variant::AdditiveRooted
                } else {
                    Variant::SubmodularRooted
                };
                let inst =
                    Instance::rooted(graph, oracle, root, self.budget, eps).with_variant(variant);
                inst.validate().map_err(lib_invalid)?;
                Ok(Problem::Node(inst))
            }
            VariantTag::Dso => {
                if self.root.is_some() {
                    return Err(invalid("dso files have no root"));
                }
                let graph = Digraph::new(costs, self.plain_arcs()?).map_err(lib_invalid)?;
                let inst = Instance::unrooted(graph, oracle, self.budget);
                inst.validate().map_err(lib_invalid)?;
                Ok(Problem::Node(inst))
            }
            VariantTag::Sto => {
                let root = self.root.ok_or_else(|| invalid("sto files need a root"))?;
                let arcs = self
                    .arcs
                    .iter()
                    .map(|a| match *a {
                        ArcSpec::Weighted(u, v, c) => Ok((u, v, c)),
                        ArcSpec::Plain(u, v) => {
                            Err(invalid(format!("sto arc ({u}, {v}) has no cost")))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let s = StoInstance {
                    num_nodes: n,
                    arcs,
                    root,
                    budget: self.budget,
                    oracle,
                };
                s.validate().map_err(lib_invalid)?;
                Ok(Problem::Sto(s))
            }
            VariantTag::Mwbcsc => {
                if self.root.is_some() {
                    return Err(invalid("mwbcsc files have no root"));
                }
                let OracleSpec::Coverage(c) = &self.oracle else {
                    return Err(invalid("mwbcsc files need a coverage oracle"));
                };
                let mut seen = BTreeSet::new();
                let adjacency = self.plain_arcs()?;
                for &(u, v) in &adjacency {
                    if u >= n || v >= n || u == v || !seen.insert((u.min(v), u.max(v))) {
                        return Err(invalid(format!("bad adjacency pair ({u}, {v})")));
                    }
                }
                let mut weights = vec![0; c.elements.len()];
                for e in &c.elements {
                    weights[e.id] = e.weight;
                }
                let m = MwbcscInstance {
                    element_weights: weights,
                    sets: c.node_sets.clone(),
                    set_costs: costs,
                    adjacency,
                    budget: self.budget,
                };
                m.validate().map_err(lib_invalid)?;
                Ok(Problem::Mwbcsc(m))
            }
        }
    }

    /// The file for a node-weighted instance.
    pub fn from_instance(inst: &Instance, tag: VariantTag, seed: Option<u64>) -> Self {
        let g = &inst.graph;
        InstanceFile {
            schema: SCHEMA,
            variant: tag,
            nodes: (0..g.num_nodes())
                .map(|id| NodeSpec {
                    id,
                    cost: g.cost(id),
                })
                .collect(),
            arcs: g.arcs().map(|(u, v)| ArcSpec::Plain(u, v)).collect(),
            oracle: OracleSpec::from_oracle(&inst.oracle),
            root: inst.root,
            budget: inst.budget,
            epsilon: inst.root.map(|_| inst.epsilon.to_string()),
            seed,
        }
    }

    pub fn from_sto(s: &StoInstance, epsilon: Rational, seed: Option<u64>) -> Self {
        InstanceFile {
            schema: SCHEMA,
            variant: VariantTag::Sto,
            nodes: (0..s.num_nodes)
                .map(|id| NodeSpec { id, cost: 1 })
                .collect(),
            arcs: s
                .arcs
                .iter()
                .map(|&(u, v, c)| ArcSpec::Weighted(u, v, c))
                .collect(),
            oracle: OracleSpec::from_oracle(&s.oracle),
            root: Some(s.root),
            budget: s.budget,
            epsilon: Some(epsilon.to_string()),
            seed,
        }
    }

    pub fn from_mwbcsc(m: &MwbcscInstance, seed: Option<u64>) -> Self {
        InstanceFile {
            schema: SCHEMA,
            variant: VariantTag::Mwbcsc,
            nodes: m
                .set_costs
                .iter()
                .enumerate()
                .map(|(id, &cost)| NodeSpec { id, cost })
                .collect(),
            arcs: m
                .adjacency
                .iter()
                .map(|&(u, v)| ArcSpec::Plain(u, v))
                .collect(),
            oracle: OracleSpec::Coverage(CoverageSpec {
                elements: m
                    .element_weights
                    .iter()
                    .enumerate()
                    .map(|(id, &weight)| ElementSpec { id, weight })
                    .collect(),
                node_sets: m.sets.clone(),
            }),
            root: None,
            budget: m.budget,
            epsilon: None,
            seed,
        }
    }
}

impl OracleSpec {
    pub fn from_oracle(p: &PrizeOracle) -> Self {
        match p {
            PrizeOracle::Additive(w) => OracleSpec::Additive(w.clone()),
            PrizeOracle::Coverage {
                node_sets,
                element_weights,
            } => OracleSpec::Coverage(CoverageSpec {
                elements: element_weights
                    .iter()
                    .enumerate()
                    .map(|(id, &weight)| ElementSpec { id, weight })
                    .collect(),
                node_sets: node_sets.clone(),
            }),
        }
    }
}

fn lib_invalid(e: outtree::Error) -> CliError {
    CliError::Validation(e.to_string())
}
