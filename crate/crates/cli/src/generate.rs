//! Seeded instance generators.

use outtree::reductions::{bscp_build, BscpInstance, StoInstance};
use outtree::{Digraph, Instance, PrizeOracle, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::file::{InstanceFile, VariantTag};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    RandomDigraph,
    RandomCoverage,
    BscpGeometric,
}

/// Knobs shared by all generators; each kind reads the ones it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub nodes: usize,
    /// Probability of each ordered arc.
    pub density: f64,
    pub max_cost: u64,
    pub budget: u64,
    pub max_weight: u64,
    pub elements: usize,
    /// Largest number of elements per node set.
    pub set_size: usize,
    pub sensors: usize,
    pub targets: usize,
    /// Coordinates are integers in `[0, side]`.
    pub side: u64,
    pub sensing_range: Rational,
    pub comm_range: Rational,
    pub variant: Option<VariantTag>,
    pub epsilon: Rational,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            nodes: 10,
            density: 0.3,
            max_cost: 3,
            budget: 6,
            max_weight: 9,
            elements: 12,
            set_size: 3,
            sensors: 8,
            targets: 12,
            side: 10,
            sensing_range: Rational::from_integer(3),
            comm_range: Rational::from_integer(4),
            variant: None,
            epsilon: crate::DEFAULT_EPSILON,
        }
    }
}

fn usage(field: &str, msg: &str) -> CliError {
    CliError::Usage(format!("--{field}: {msg}"))
}

impl GenParams {
    pub fn validate(&self, kind: GenKind) -> Result<(), CliError> {
        match kind {
            GenKind::RandomDigraph | GenKind::RandomCoverage => {
                if !(1..=62).contains(&self.nodes) {
                    return Err(usage("nodes", "must lie in 1..=62"));
                }
                if !(self.density > 0.0 && self.density <= 1.0) {
                    return Err(usage("density", "must lie in (0, 1]"));
                }
                if !(1..=1_000_000).contains(&self.max_cost) {
                    return Err(usage("max-cost", "must lie in 1..=1000000"));
                }
            }
            GenKind::BscpGeometric => {
                if !(1..=62).contains(&self.sensors) {
                    return Err(usage("sensors", "must lie in 1..=62"));
                }
                if self.targets > 10_000 {
                    return Err(usage("targets", "at most 10000"));
                }
                if self.side == 0 || self.side > 1_000_000 {
                    return Err(usage("side", "must lie in 1..=1000000"));
                }
                let zero = Rational::from_integer(0);
                if self.sensing_range <= zero {
                    return Err(usage("rs", "must be positive"));
                }
                if self.comm_range <= zero {
                    return Err(usage("rc", "must be positive"));
                }
            }
        }
        if kind == GenKind::RandomCoverage {
            if !(1..=10_000).contains(&self.elements) {
                return Err(usage("elements", "must lie in 1..=10000"));
            }
            if self.set_size == 0 {
                return Err(usage("set-size", "must be at least 1"));
            }
        }
        if self.budget == 0 {
            return Err(usage("budget", "must be at least 1"));
        }
        if self.max_weight > 1_000_000 {
            return Err(usage("max-weight", "at most 1000000"));
        }
        if self.epsilon <= Rational::from_integer(0) || self.epsilon > Rational::from_integer(1) {
            return Err(usage("epsilon", "must lie in (0, 1]"));
        }
        let allowed: &[VariantTag] = match kind {
            GenKind::RandomDigraph => &[
                VariantTag::Drso,
                VariantTag::Drao,
                VariantTag::Dso,
                VariantTag::Sto,
            ],
            GenKind::RandomCoverage => &[VariantTag::Drso, VariantTag::Dso, VariantTag::Sto],
            GenKind::BscpGeometric => &[VariantTag::Mwbcsc],
        };
        if let Some(v) = self.variant {
            if !allowed.contains(&v) {
                return Err(usage(
                    "variant",
                    &format!("{} is not available for this kind", v.as_str()),
                ));
            }
        }
        Ok(())
    }
}

/// Generates one instance file; identical inputs give identical files.
pub fn generate(kind: GenKind, params: &GenParams, seed: u64) -> Result<InstanceFile, CliError> {
    params.validate(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::RandomDigraph => {
            let variant = params.variant.unwrap_or(VariantTag::Drao);
            let w: Vec<u64> = (0..params.nodes)
                .map(|_| rng.gen_range(0..=params.max_weight))
                .collect();
            node_family(&mut rng, params, PrizeOracle::Additive(w), variant, seed)
        }
        GenKind::RandomCoverage => {
            let variant = params.variant.unwrap_or(VariantTag::Drso);
            let weights: Vec<u64> = (0..params.elements)
                .map(|_| rng.gen_range(0..=params.max_weight))
                .collect();
            let sets = (0..params.nodes)
                .map(|_| {
                    let k = rng.gen_range(0..=params.set_size.min(params.elements));
                    let mut s: Vec<usize> =
                        (0..k).map(|_| rng.gen_range(0..params.elements)).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect();
            let oracle = PrizeOracle::Coverage {
                node_sets: sets,
                element_weights: weights,
            };
            node_family(&mut rng, params, oracle, variant, seed)
        }
        GenKind::BscpGeometric => {
            let side = params.side as i128;
            let point = |rng: &mut ChaCha8Rng| {
                (
                    Rational::from_integer(rng.gen_range(0..=side)),
                    Rational::from_integer(rng.gen_range(0..=side)),
                )
            };
            let sensors = (0..params.sensors).map(|_| point(&mut rng)).collect();
            let targets = (0..params.targets)
                .map(|_| (point(&mut rng), rng.gen_range(1..=params.max_weight.max(1))))
                .collect();
            let b = BscpInstance {
                sensors,
                targets,
                sensing_range: params.sensing_range,
                comm_range: params.comm_range,
                budget: params.budget,
            };
            let built = bscp_build(&b).map_err(|e| CliError::Validation(e.to_string()))?;
            Ok(InstanceFile::from_mwbcsc(&built.instance, Some(seed)))
        }
    }
}

fn node_family(
    rng: &mut ChaCha8Rng,
    params: &GenParams,
    oracle: PrizeOracle,
    variant: VariantTag,
    seed: u64,
) -> Result<InstanceFile, CliError> {
    let n = params.nodes;
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(params.density) {
                arcs.push((u, v));
            }
        }
    }
    let costs: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=params.max_cost)).collect();
    let lib = |e: outtree::Error| CliError::Validation(e.to_string());
    match variant {
        VariantTag::Sto => {
            let s = StoInstance {
                num_nodes: n,
                arcs: arcs
                    .iter()
                    .map(|&(u, v)| (u, v, rng.gen_range(1..=params.max_cost)))
                    .collect(),
                root: 0,
                budget: params.budget,
                oracle,
            };
            s.validate().map_err(lib)?;
            Ok(InstanceFile::from_sto(&s, params.epsilon, Some(seed)))
        }
        VariantTag::Dso => {
            let g = Digraph::new(costs, arcs).map_err(lib)?;
            let inst = Instance::unrooted(g, oracle, params.budget);
            Ok(InstanceFile::from_instance(&inst, variant, Some(seed)))
        }
        VariantTag::Drso | VariantTag::Drao => {
            let mut costs = costs;
            // Keep the root affordable so every generated file solves.
            costs[0] = costs[0].min(params.budget);
            let g = Digraph::new(costs, arcs).map_err(lib)?;
            let inst = Instance::rooted(g, oracle, 0, params.budget, params.epsilon);
            Ok(InstanceFile::from_instance(&inst, variant, Some(seed)))
        }
        VariantTag::Mwbcsc => unreachable!("rejected by validate"),
    }
}
