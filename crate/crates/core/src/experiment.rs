//! Experiment runner: executes an algorithm over a list of seeds, checks
//! every run against the sequential oracles, and emits metrics JSON and
//! per-phase CSV rows.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::connectivity::conn;
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec};
use crate::graph::{connected_components, kruskal_mst, read_graph, Graph};
use crate::mst::{cc_mst, clique_mst_reference, exact_mst, CcMstOptions, CliqueView};
use crate::net::{CcMstStrategy, RoundMetrics, SimConfig, Simulator};
use crate::sampling::{
    log2n, sample_edges_distributed, verify_large_cut_coverage_seeded, CutCoverageReport, SamplingRule,
};

pub const CSV_HEADER: &str = "n,seed,algo,rounds_total,phase,rounds,messages,max_send,max_recv,pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Conn,
    Mst,
    SampleVerify,
    CcmstOnly,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Conn => "conn",
            Algo::Mst => "mst",
            Algo::SampleVerify => "sample-verify",
            Algo::CcmstOnly => "ccmst-only",
        }
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "conn" => Ok(Algo::Conn),
            "mst" => Ok(Algo::Mst),
            "sample-verify" => Ok(Algo::SampleVerify),
            "ccmst-only" | "ccmst" => Ok(Algo::CcmstOnly),
            other => Err(Error::InvalidArgument(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    File(PathBuf),
    /// Regenerated for every seed with that seed.
    Generated(GeneratorSpec),
    #[serde(skip)]
    Given(Graph),
}

/// Values left `None` keep the simulator defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigOverrides {
    /// More than one value runs every seed once per cost.
    pub route_costs: Vec<u64>,
    pub sort_cost: Option<u64>,
    pub agg_cost: Option<u64>,
    pub c_sample: Option<f64>,
    pub ccmst_strategy: Option<CcMstStrategy>,
}

impl ConfigOverrides {
    pub fn config(&self, n: usize, seed: u64, route_cost: Option<u64>) -> SimConfig {
        let mut c = SimConfig::new(n, seed);
        if let Some(r) = route_cost {
            c.route_cost = r;
        }
        if let Some(s) = self.sort_cost {
            c.sort_cost = s;
        }
        if let Some(a) = self.agg_cost {
            c.agg_cost = a;
        }
        if let Some(cs) = self.c_sample {
            c.c_sample = cs;
        }
        if let Some(st) = self.ccmst_strategy {
            c.ccmst_strategy = st;
        }
        c
    }

    fn route_cost_list(&self) -> Vec<Option<u64>> {
        if self.route_costs.is_empty() {
            vec![None]
        } else {
            self.route_costs.iter().map(|&r| Some(r)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algo: Algo,
    pub source: GraphSource,
    pub seeds: Vec<u64>,
    pub overrides: ConfigOverrides,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        if let GraphSource::Generated(g) = &self.source {
            g.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub route_cost: u64,
    pub n: usize,
    pub m: usize,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    /// Runtime assertion failures followed by failed oracle checks.
    pub violations: Vec<String>,
    pub ccmst_phases: Option<usize>,
    pub cluster_counts_by_phase: Vec<usize>,
    pub tree_count: Option<usize>,
    pub coverage: Vec<CutCoverageReport>,
    pub metrics: RoundMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub algo: Algo,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunRecord>,
    pub violations: Vec<String>,
    pub squaring_divergences: usize,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Exit code contract: zero exactly when no violation was recorded.
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    /// One row per run and phase, in run order then phase name order.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for run in &self.runs {
            let m = &run.metrics;
            for (phase, rounds) in &m.rounds_by_phase {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    run.n,
                    run.seed,
                    self.algo.name(),
                    m.rounds_total,
                    phase,
                    rounds,
                    m.messages_by_phase.get(phase).copied().unwrap_or(0),
                    m.max_primitive_send.max(m.max_send_per_round),
                    m.max_primitive_recv.max(m.max_recv_per_round),
                    run.pass
                );
            }
        }
        out
    }
}

/// Per-family outcome of a single verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub algo: Algo,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub violations: Vec<String>,
    pub pass: bool,
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let fixed = match &spec.source {
        GraphSource::File(path) => Some(read_graph(path)?),
        GraphSource::Given(g) => Some(g.clone()),
        GraphSource::Generated(_) => None,
    };
    let mut runs = Vec::new();
    for route_cost in spec.overrides.route_cost_list() {
        for &seed in &spec.seeds {
            let g = match (&fixed, &spec.source) {
                (Some(g), _) => g.clone(),
                (None, GraphSource::Generated(gen)) => generate(gen, seed)?,
                _ => unreachable!("graph source resolved above"),
            };
            let config = spec.overrides.config(g.n(), seed, route_cost);
            config.validate()?;
            runs.push(run_once(spec.algo, &g, config));
        }
    }
    let mut violations = Vec::new();
    for r in &runs {
        for v in &r.violations {
            violations.push(format!("seed {}: {v}", r.seed));
        }
    }
    let squaring_divergences = runs
        .iter()
        .filter(|r| r.violations.iter().any(|v| v == "squaring_divergence"))
        .count();
    Ok(ExperimentReport {
        algo: spec.algo,
        seeds: spec.seeds.clone(),
        pass: violations.is_empty(),
        runs,
        violations,
        squaring_divergences,
    })
}

/// Runs one seed and reports every invariant family. Failures are carried
/// in the report rather than returned as errors.
pub fn verify(algo: Algo, g: &Graph, seed: u64, overrides: &ConfigOverrides) -> VerifyReport {
    let config = overrides.config(g.n(), seed, overrides.route_costs.first().copied());
    let record = match config.validate() {
        Ok(()) => run_once(algo, g, config),
        Err(e) => {
            return VerifyReport {
                algo,
                seed,
                checks: vec![CheckResult::new("config", false, e.to_string())],
                violations: vec![e.violation_name().to_string()],
                pass: false,
            }
        }
    };
    VerifyReport {
        algo,
        seed,
        checks: record.checks,
        violations: record.violations,
        pass: record.pass,
    }
}

fn run_once(algo: Algo, g: &Graph, config: SimConfig) -> RunRecord {
    let seed = config.seed;
    let route_cost = config.route_cost;
    let mut record = RunRecord {
        seed,
        route_cost,
        n: g.n(),
        m: g.m(),
        pass: false,
        checks: Vec::new(),
        violations: Vec::new(),
        ccmst_phases: None,
        cluster_counts_by_phase: Vec::new(),
        tree_count: None,
        coverage: Vec::new(),
        metrics: RoundMetrics::default(),
    };
    let outcome = match algo {
        Algo::Conn => run_conn(g, config, &mut record),
        Algo::Mst => run_mst(g, config, &mut record),
        Algo::CcmstOnly => run_ccmst(g, config, &mut record),
        Algo::SampleVerify => run_sample_verify(g, config, &mut record),
    };
    if let Err(e) = outcome {
        let name = e.violation_name().to_string();
        if !record.metrics.violations.contains(&name) {
            record.metrics.violations.push(name);
        }
        record.checks.push(CheckResult::new("runtime", false, e.to_string()));
    }
    record.violations = record.metrics.violations.clone();
    for c in &record.checks {
        if !c.pass && c.name != "runtime" {
            record.violations.push(c.name.clone());
        }
    }
    record.pass = record.violations.is_empty();
    record
}

fn load_check(metrics: &RoundMetrics) -> CheckResult {
    CheckResult::new(
        "load",
        metrics.violations.is_empty(),
        format!(
            "max primitive send {}, recv {}",
            metrics.max_primitive_send, metrics.max_primitive_recv
        ),
    )
}

fn run_conn(g: &Graph, config: SimConfig, record: &mut RunRecord) -> Result<()> {
    let mut sim = Simulator::with_graph(config, g)?;
    let out = conn(&mut sim, g);
    record.metrics = sim.into_metrics();
    let out = out?;
    let oracle = connected_components(g);
    record.ccmst_phases = Some(out.ccmst_phases);
    record.cluster_counts_by_phase = out.cluster_counts.clone();
    record.tree_count = Some(out.tree_count());
    record.checks.push(CheckResult::new(
        "conn_tree_count",
        out.tree_count() == oracle.component_count(),
        format!("{} trees, {} components", out.tree_count(), oracle.component_count()),
    ));
    let spans = out.forest.labeling() == oracle && out.forest.edges().iter().all(|e| g.weight(e.u, e.v).is_some());
    record.checks.push(CheckResult::new(
        "conn_spanning_forest",
        spans,
        "forest edges are host edges spanning each component".into(),
    ));
    record.checks.push(load_check(&record.metrics));
    Ok(())
}

fn run_mst(g: &Graph, config: SimConfig, record: &mut RunRecord) -> Result<()> {
    let mut sim = Simulator::with_graph(config, g)?;
    let out = exact_mst(&mut sim, g);
    record.metrics = sim.into_metrics();
    let out = out?;
    let oracle = kruskal_mst(g);
    record.ccmst_phases = Some(out.ccmst_phases);
    record.cluster_counts_by_phase = out.cluster_counts.clone();
    record.tree_count = Some(out.forest.tree_count());
    let diff = out.forest.edges().iter().filter(|e| !oracle.contains(e)).count();
    record.checks.push(CheckResult::new(
        "mst_oracle",
        out.forest == oracle,
        format!("{} edges, {} not in the oracle forest", out.forest.len(), diff),
    ));
    record.checks.push(load_check(&record.metrics));
    Ok(())
}

fn run_ccmst(g: &Graph, config: SimConfig, record: &mut RunRecord) -> Result<()> {
    let strategy = config.ccmst_strategy;
    let mut sim = Simulator::with_graph(config, g)?;
    let view = CliqueView::weighted(g);
    let out = cc_mst(&mut sim, &view, CcMstOptions::full(g.n(), strategy));
    record.metrics = sim.into_metrics();
    let out = out?;
    let oracle = clique_mst_reference(&view);
    record.ccmst_phases = Some(out.phases);
    record.cluster_counts_by_phase = out.cluster_counts.clone();
    record.tree_count = Some(out.partition.cluster_count());
    record.checks.push(CheckResult::new(
        "ccmst_oracle",
        out.forest() == &oracle,
        format!("{} phases", out.phases),
    ));
    record.checks.push(load_check(&record.metrics));
    Ok(())
}

fn run_sample_verify(g: &Graph, config: SimConfig, record: &mut RunRecord) -> Result<()> {
    let n = g.n();
    let seed = config.seed;
    let c = config.c_sample;
    let mut metrics = RoundMetrics::default();
    for (rule, label) in [
        (SamplingRule::PerEdge, "per_edge"),
        (SamplingRule::PerVertex, "per_vertex"),
    ] {
        let mut sim = Simulator::with_graph(config.clone(), g)?;
        let sampled = sample_edges_distributed(&mut sim, g, c, rule);
        let m = sim.into_metrics();
        metrics.rounds_total += m.rounds_total;
        metrics.messages_total += m.messages_total;
        metrics.max_primitive_send = metrics.max_primitive_send.max(m.max_primitive_send);
        metrics.max_primitive_recv = metrics.max_primitive_recv.max(m.max_primitive_recv);
        metrics.violations.extend(m.violations);
        for (k, v) in m.rounds_by_phase {
            *metrics.rounds_by_phase.entry(format!("sample_{label}")).or_insert(0) += v;
            let msgs = m.messages_by_phase.get(&k).copied().unwrap_or(0);
            *metrics.messages_by_phase.entry(format!("sample_{label}")).or_insert(0) += msgs;
        }
        for (k, v) in m.primitive_calls {
            *metrics.primitive_calls.entry(k).or_insert(0) += v;
        }
        let (outcome, _) = match sampled {
            Ok(x) => x,
            Err(e) => {
                record.metrics = metrics;
                return Err(e);
            }
        };
        let charged: usize = outcome.charged_count.iter().sum();
        let expected = if rule == SamplingRule::PerEdge {
            g.m()
        } else {
            2 * g.m()
        };
        record.checks.push(CheckResult::new(
            &format!("charging_totality_{label}"),
            charged == expected,
            format!("{charged} charges for {} edges", g.m()),
        ));
        if rule == SamplingRule::PerEdge {
            let l = log2n(n);
            let bound = 3.0 * c * l * l;
            let worst = outcome.max_charged_sampled();
            record.checks.push(CheckResult::new(
                "charged_sample_bound",
                worst as f64 <= bound,
                format!("max charged-sampled {worst}, bound {bound:.1}"),
            ));
        }
        let report = verify_large_cut_coverage_seeded(g, &outcome.sampled, n, seed);
        record.checks.push(CheckResult::new(
            &format!("cut_coverage_{label}"),
            report.pass,
            format!(
                "{} large cuts of {} checked, {} misses",
                report.large_cuts_checked,
                report.cuts_checked,
                report.misses.len()
            ),
        ));
        record.coverage.push(report);
    }
    record.metrics = metrics;
    record.checks.push(load_check(&record.metrics));
    Ok(())
}
