//! Subcommands: gen, solve, exact, verify, bench.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use outtree::oracle::{exact_rooted, exact_sto_arcs, exact_unrooted, Caps, ExactResult};
use outtree::reductions::{mwbcsc_to_dso, solve_sto, MwbcscInstance, MwbcscStrategy, StoInstance};
use outtree::{Instance, OutTree, Rational, SolveReport, Variant};
use rayon::prelude::*;

use crate::file::{parse_rational, InstanceFile, Problem, VariantTag};
use crate::generate::{generate, GenKind, GenParams};
use crate::record::{Certificates, CheckRecord, RunRecord};
use crate::CliError;

/// Exact searches on arc-cost instances enumerate arc subsets; this is their
/// default arc cap.
pub const DEFAULT_ARC_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Record,
}

#[derive(Debug, Parser)]
#[command(
    name = "outtree",
    version,
    about = "Budgeted prize-collecting out-trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Solve one or more instance files.
    Solve(SolveArgs),
    /// Solve exactly by enumeration (small instances only).
    Exact(ExactArgs),
    /// Solve, compute the exact optimum and check every guarantee.
    Verify(VerifyArgs),
    /// Generate a seeded corpus in memory and verify every instance.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenOptions {
    #[arg(long, default_value_t = 10)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 3)]
    pub max_cost: u64,
    #[arg(long, default_value_t = 6)]
    pub budget: u64,
    #[arg(long, default_value_t = 9)]
    pub max_weight: u64,
    #[arg(long, default_value_t = 12)]
    pub elements: usize,
    #[arg(long, default_value_t = 3)]
    pub set_size: usize,
    #[arg(long, default_value_t = 8)]
    pub sensors: usize,
    #[arg(long, default_value_t = 12)]
    pub targets: usize,
    #[arg(long, default_value_t = 10)]
    pub side: u64,
    /// Sensing range, a rational.
    #[arg(long, default_value = "3")]
    pub rs: String,
    /// Communication range, a rational.
    #[arg(long, default_value = "4")]
    pub rc: String,
    #[arg(long, value_enum)]
    pub variant: Option<VariantTag>,
    #[arg(long)]
    pub epsilon: Option<String>,
}

impl GenOptions {
    fn params(&self) -> Result<GenParams, CliError> {
        Ok(GenParams {
            nodes: self.nodes,
            density: self.density,
            max_cost: self.max_cost,
            budget: self.budget,
            max_weight: self.max_weight,
            elements: self.elements,
            set_size: self.set_size,
            sensors: self.sensors,
            targets: self.targets,
            side: self.side,
            sensing_range: parse_rational(&self.rs)?,
            comm_range: parse_rational(&self.rc)?,
            variant: self.variant,
            epsilon: match &self.epsilon {
                Some(e) => parse_rational(e)?,
                None => crate::DEFAULT_EPSILON,
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub opts: GenOptions,
}

#[derive(Debug, Args)]
pub struct RunOptions {
    /// Override the file's variant (must be compatible).
    #[arg(long, value_enum)]
    pub variant: Option<VariantTag>,
    /// Override ε, e.g. `1/4`.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Seed written into records (defaults to the file's generator seed).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub file: PathBuf,
    /// Node cap (arc cap for sto files).
    #[arg(long)]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = GenKind::RandomCoverage)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 50)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[command(flatten)]
    pub opts: GenOptions,
}

/// A problem ready to run under a chosen variant.
#[derive(Debug, Clone)]
pub enum Prepared {
    Node(Instance),
    Sto(StoInstance, Rational),
    Mwbcsc(MwbcscInstance),
}

fn incompatible(file: VariantTag, flag: VariantTag) -> CliError {
    CliError::Usage(format!(
        "--variant {} cannot run a {} file",
        flag.as_str(),
        file.as_str()
    ))
}

fn check_epsilon(e: Rational) -> Result<Rational, CliError> {
    if e <= Rational::from_integer(0) || e > Rational::from_integer(1) {
        return Err(CliError::Usage(format!("epsilon {e} is outside (0, 1]")));
    }
    Ok(e)
}

/// Applies the variant and ε overrides to a loaded file.
pub fn prepare(
    file: &InstanceFile,
    flag: Option<VariantTag>,
    epsilon: Option<&str>,
) -> Result<(VariantTag, Prepared), CliError> {
    let eps = epsilon
        .map(parse_rational)
        .transpose()?
        .map(check_epsilon)
        .transpose()?;
    let tag = flag.unwrap_or(file.variant);
    let prepared = match (file.problem()?, tag) {
        (Problem::Node(inst), VariantTag::Drso | VariantTag::Drao) if inst.root.is_some() => {
            let variant = if tag == VariantTag::Drao {
                if !inst.oracle.is_additive() {
                    return Err(CliError::Usage(
                        "--variant drao needs an additive oracle".into(),
                    ));
                }
                Variant::AdditiveRooted
            } else {
                Variant::SubmodularRooted
            };
            let mut inst = inst.with_variant(variant);
            if let Some(e) = eps {
                inst.epsilon = e;
            }
            Prepared::Node(inst)
        }
        (Problem::Node(inst), VariantTag::Dso) => {
            Prepared::Node(Instance::unrooted(inst.graph, inst.oracle, inst.budget))
        }
        (Problem::Sto(s), VariantTag::Sto) => {
            let e = eps.or(file.epsilon()?).unwrap_or(crate::DEFAULT_EPSILON);
            Prepared::Sto(s, e)
        }
        (Problem::Mwbcsc(m), VariantTag::Mwbcsc | VariantTag::Dso) => Prepared::Mwbcsc(m),
        _ => return Err(incompatible(file.variant, tag)),
    };
    Ok((tag, prepared))
}

/// What every pipeline reports back, over the problem's own ids.
#[derive(Debug, Clone)]
pub struct Solved {
    pub tree: OutTree,
    pub cost: u64,
    pub prize: u64,
    pub budget: u64,
    pub epsilon: Option<Rational>,
    /// The underlying node-weighted report (the lifted one for sto).
    pub report: Option<SolveReport>,
}

impl Solved {
    pub fn within_budget(&self) -> bool {
        let limit = Rational::from_integer(self.budget as i128)
            * (Rational::from_integer(1) + self.epsilon.unwrap_or(Rational::from_integer(0)));
        Rational::from_integer(self.cost as i128) <= limit
    }
}

pub fn solve_prepared(p: &Prepared) -> Result<Solved, CliError> {
    Ok(match p {
        Prepared::Node(inst) => {
            let rep = outtree::solver::solve(inst)?;
            Solved {
                tree: rep.tree.clone(),
                cost: rep.cost,
                prize: rep.prize,
                budget: rep.budget,
                epsilon: rep.epsilon,
                report: Some(rep),
            }
        }
        Prepared::Sto(s, eps) => {
            let sol = solve_sto(s, *eps)?;
            Solved {
                tree: sol.tree,
                cost: sol.cost,
                prize: sol.prize,
                budget: s.budget,
                epsilon: Some(*eps),
                report: sol.lifted,
            }
        }
        Prepared::Mwbcsc(m) => {
            let inst = mwbcsc_to_dso(m, MwbcscStrategy::Coverage)?;
            let rep = outtree::solver::solve_dso_unrooted(&inst)?;
            Solved {
                tree: rep.tree.clone(),
                cost: rep.cost,
                prize: rep.prize,
                budget: rep.budget,
                epsilon: None,
                report: Some(rep),
            }
        }
    })
}

pub fn exact_prepared(p: &Prepared, cap: Option<usize>) -> Result<ExactResult, CliError> {
    let caps = |default: usize| Caps {
        max_nodes: cap.unwrap_or(default),
        ..Caps::default()
    };
    Ok(match p {
        Prepared::Node(inst) if inst.root.is_some() => exact_rooted(inst, caps(15))?,
        Prepared::Node(inst) => exact_unrooted(inst, caps(15))?,
        Prepared::Sto(s, _) => exact_sto_arcs(s, cap.unwrap_or(DEFAULT_ARC_CAP))?,
        Prepared::Mwbcsc(m) => {
            exact_unrooted(&mwbcsc_to_dso(m, MwbcscStrategy::Coverage)?, caps(15))?
        }
    })
}

fn factor_string(cost: u64, budget: u64) -> String {
    if budget == 0 {
        return if cost == 0 { "0".into() } else { "inf".into() };
    }
    Rational::new(cost as i128, budget as i128).to_string()
}

struct Context<'a> {
    command: &'static str,
    digest: String,
    seed: Option<u64>,
    tag: VariantTag,
    prepared: &'a Prepared,
}

fn solved_record(ctx: &Context, s: &Solved, optimum: Option<u64>, started: Instant) -> RunRecord {
    let mut certs = Certificates {
        within_budget: Some(s.within_budget()),
        ..Certificates::default()
    };
    let mut run = None;
    let mut trim_case = None;
    let root = Some(s.tree.root());
    if let Some(rep) = &s.report {
        certs.pre_trim_cost = Some(rep.pre_trim_cost);
        certs.pre_trim_prize = Some(rep.pre_trim_prize);
        certs.pre_trim_factor = rep.certificates.pre_trim.as_ref().map(|f| f.to_string());
        certs.final_factor = Some(rep.certificates.final_factor.to_string());
        run = Some(rep.run.clone());
        trim_case = rep.trim_case.map(|c| c.as_str().to_string());
        if let Some(opt) = optimum {
            certs.checks = rep
                .check_against(opt)
                .into_iter()
                .map(|c| CheckRecord {
                    name: c.name.to_string(),
                    factor: c.factor.to_string(),
                    value: c.value,
                    bound: c.bound,
                    holds: c.holds,
                })
                .collect();
        }
    }
    if let Some(opt) = optimum {
        certs.optimum = Some(opt);
        // A solution inside the plain budget is feasible, so it cannot beat OPT.
        if s.cost <= s.budget {
            certs.checks.push(CheckRecord {
                name: "optimum_dominates".into(),
                factor: "1".into(),
                value: opt,
                bound: s.prize as f64,
                holds: opt >= s.prize,
            });
        }
    }
    RunRecord {
        command: ctx.command.into(),
        digest: ctx.digest.clone(),
        seed: ctx.seed,
        variant: ctx.tag.as_str().into(),
        epsilon: s.epsilon.map(|e| e.to_string()),
        budget: s.budget,
        cost: s.cost,
        prize: s.prize,
        budget_factor: factor_string(s.cost, s.budget),
        nodes: s.tree.nodes(),
        root,
        run,
        trim_case,
        states: None,
        certificates: certs,
        wall_ms: elapsed_ms(started),
    }
}

fn elapsed_ms(started: Instant) -> f64 {
    (started.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn budget_of(p: &Prepared) -> u64 {
    match p {
        Prepared::Node(i) => i.budget,
        Prepared::Sto(s, _) => s.budget,
        Prepared::Mwbcsc(m) => m.budget,
    }
}

fn exact_record(ctx: &Context, r: &ExactResult, started: Instant) -> RunRecord {
    let (cost, nodes, root) = match (&r.tree, ctx.prepared) {
        (Some(t), Prepared::Sto(s, _)) => (s.tree_cost(t).unwrap_or(0), t.nodes(), Some(t.root())),
        (Some(t), Prepared::Node(i)) => (t.cost_in(&i.graph), t.nodes(), Some(t.root())),
        (Some(t), Prepared::Mwbcsc(m)) => (
            t.nodes().iter().map(|&v| m.set_costs[v]).sum(),
            t.nodes(),
            Some(t.root()),
        ),
        (None, _) => (0, Vec::new(), None),
    };
    let budget = budget_of(ctx.prepared);
    RunRecord {
        command: ctx.command.into(),
        digest: ctx.digest.clone(),
        seed: ctx.seed,
        variant: ctx.tag.as_str().into(),
        epsilon: None,
        budget,
        cost,
        prize: r.optimum,
        budget_factor: factor_string(cost, budget),
        nodes,
        root,
        run: None,
        trim_case: None,
        states: Some(r.states),
        certificates: Certificates {
            optimum: Some(r.optimum),
            ..Certificates::default()
        },
        wall_ms: elapsed_ms(started),
    }
}

/// `solve`: one record per file.
pub fn solve_file(file: &InstanceFile, opts: &RunOptions) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let (tag, prepared) = prepare(file, opts.variant, opts.epsilon.as_deref())?;
    let solved = solve_prepared(&prepared)?;
    let ctx = Context {
        command: "solve",
        digest: file.digest(),
        seed: opts.seed.or(file.seed),
        tag,
        prepared: &prepared,
    };
    Ok(solved_record(&ctx, &solved, None, started))
}

pub fn exact_file(
    file: &InstanceFile,
    opts: &RunOptions,
    cap: Option<usize>,
) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let (tag, prepared) = prepare(file, opts.variant, opts.epsilon.as_deref())?;
    let r = exact_prepared(&prepared, cap)?;
    let ctx = Context {
        command: "exact",
        digest: file.digest(),
        seed: opts.seed.or(file.seed),
        tag,
        prepared: &prepared,
    };
    Ok(exact_record(&ctx, &r, started))
}

/// `verify`: the record carries every check; use [`RunRecord::passed`].
pub fn verify_file(
    file: &InstanceFile,
    opts: &RunOptions,
    cap: Option<usize>,
) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let (tag, prepared) = prepare(file, opts.variant, opts.epsilon.as_deref())?;
    let solved = solve_prepared(&prepared)?;
    let exact = exact_prepared(&prepared, cap)?;
    let ctx = Context {
        command: "verify",
        digest: file.digest(),
        seed: opts.seed.or(file.seed),
        tag,
        prepared: &prepared,
    };
    Ok(solved_record(&ctx, &solved, Some(exact.optimum), started))
}

fn emit(out: &mut dyn Write, format: Format, rec: &RunRecord) -> Result<(), CliError> {
    let text = match format {
        Format::Human => rec.to_human(),
        Format::Record => rec.to_line(),
    };
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

fn violation(rec: &RunRecord) -> CliError {
    let failed: Vec<&str> = rec
        .certificates
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.name.as_str())
        .chain((rec.certificates.within_budget == Some(false)).then_some("budget"))
        .collect();
    CliError::Violation(format!(
        "{} failed: {}",
        &rec.digest[..12],
        failed.join(", ")
    ))
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match cli.command {
        Command::Gen(a) => {
            let f = generate(a.kind, &a.opts.params()?, a.seed)?;
            match a.out {
                Some(path) => std::fs::write(&path, f.to_json())
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
                None => out.write_all(f.to_json().as_bytes()).map_err(io)?,
            }
            Ok(())
        }
        Command::Solve(a) => {
            // Solve concurrently, report in submission order.
            let results: Vec<Result<RunRecord, CliError>> = a
                .files
                .par_iter()
                .map(|p| InstanceFile::load(p).and_then(|f| solve_file(&f, &a.run)))
                .collect();
            let mut first_err = None;
            let mut failed = 0;
            for (path, r) in a.files.iter().zip(results) {
                match r {
                    Ok(rec) => emit(out, a.run.format, &rec)?,
                    Err(e) => {
                        let (shown, msg) = (path.display().to_string(), e.to_string());
                        if msg.starts_with(&shown) {
                            writeln!(err, "{msg}").map_err(io)?;
                        } else {
                            writeln!(err, "{shown}: {msg}").map_err(io)?;
                        }
                        failed += 1;
                        first_err.get_or_insert(e);
                    }
                }
            }
            // The exit code follows the first failure.
            match first_err {
                None => Ok(()),
                Some(e) => Err(e.retitled(format!("{failed} of {} files failed", a.files.len()))),
            }
        }
        Command::Exact(a) => {
            let f = InstanceFile::load(&a.file)?;
            emit(out, a.run.format, &exact_file(&f, &a.run, a.cap)?)
        }
        Command::Verify(a) => {
            let f = InstanceFile::load(&a.file)?;
            let rec = verify_file(&f, &a.run, a.cap)?;
            emit(out, a.run.format, &rec)?;
            if rec.passed() {
                Ok(())
            } else {
                Err(violation(&rec))
            }
        }
        Command::Bench(a) => {
            let params = a.opts.params()?;
            params.validate(a.kind)?;
            let opts = RunOptions {
                variant: None,
                epsilon: None,
                seed: None,
                format: a.format,
            };
            let results: Vec<Result<RunRecord, CliError>> = (0..a.count)
                .into_par_iter()
                .map(|i| {
                    let f = generate(a.kind, &params, a.seed.wrapping_add(i))?;
                    verify_file(&f, &opts, a.cap)
                })
                .collect();
            let mut passed = 0;
            let mut first_bad = None;
            for r in results {
                let rec = r?;
                emit(out, a.format, &rec)?;
                if rec.passed() {
                    passed += 1;
                } else {
                    first_bad.get_or_insert_with(|| violation(&rec));
                }
            }
            writeln!(
                err,
                "bench: {passed}/{} instances passed every check",
                a.count
            )
            .map_err(io)?;
            first_bad.map_or(Ok(()), Err)
        }
    }
}
