use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clique_sim::experiment::{run, verify, Algo, ConfigOverrides, ExperimentSpec, GraphSource};
use clique_sim::generate::{generate, GeneratorSpec, GraphKind};
use clique_sim::graph::{read_graph, write_graph, write_graph_to};
use clique_sim::net::CcMstStrategy;
use clique_sim::{Error, Result};

/// Congested Clique simulator: connectivity, MST and sampling experiments.
#[derive(Parser)]
#[command(name = "clique-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded graph instance.
    Gen {
        #[arg(long = "type")]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        allow_ties: bool,
        /// Writes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an algorithm over a list of seeds and emit metrics.
    Run {
        #[arg(long)]
        algo: Algo,
        /// A graph file, or `gen:<type>[,n=..][,p=..][,k=..][,ties]`.
        #[arg(long)]
        graph: String,
        /// Comma-separated seeds or a range `a..b`.
        #[arg(long, default_value = "0")]
        seeds: String,
        #[command(flatten)]
        costs: CostArgs,
        #[arg(long)]
        metrics_out: Option<PathBuf>,
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Check one run against the oracles and print a per-family report.
    Verify {
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        costs: CostArgs,
    },
}

#[derive(Args)]
struct CostArgs {
    /// One value, or a comma-separated sweep.
    #[arg(long)]
    route_cost: Option<String>,
    #[arg(long)]
    sort_cost: Option<u64>,
    #[arg(long)]
    agg_cost: Option<u64>,
    #[arg(long)]
    c_sample: Option<f64>,
    #[arg(long)]
    ccmst_strategy: Option<CcMstStrategy>,
}

impl CostArgs {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let route_costs = match &self.route_cost {
            Some(s) => parse_list(s)?,
            None => Vec::new(),
        };
        Ok(ConfigOverrides {
            route_costs,
            sort_cost: self.sort_cost,
            agg_cost: self.agg_cost,
            c_sample: self.c_sample,
            ccmst_strategy: self.ccmst_strategy,
        })
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse `{s}` as a list of integers"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        return Ok((a..b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn parse_source(s: &str) -> Result<GraphSource> {
    let Some(rest) = s.strip_prefix("gen:") else {
        return Ok(GraphSource::File(PathBuf::from(s)));
    };
    let mut parts = rest.split(',');
    let kind: GraphKind = parts.next().unwrap_or_default().parse()?;
    let mut spec = GeneratorSpec::new(kind, 0);
    for part in parts {
        let bad = || Error::InvalidArgument(format!("bad generator parameter `{part}`"));
        match part.split_once('=') {
            Some(("n", v)) => spec.n = v.parse().map_err(|_| bad())?,
            Some(("p", v)) => spec.p = v.parse().map_err(|_| bad())?,
            Some(("k", v)) => spec.k = v.parse().map_err(|_| bad())?,
            None if part == "ties" => spec.allow_ties = true,
            _ => return Err(bad()),
        }
    }
    spec.validate()?;
    Ok(GraphSource::Generated(spec))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn init_logging() {
    let level = match std::env::var("CLIQUE_SIM_LOG").as_deref() {
        Ok("phase") => "clique_sim=debug",
        Ok("round") => "clique_sim=trace",
        _ => "off",
    };
    env_logger::Builder::new().parse_filters(level).init();
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            p,
            k,
            seed,
            allow_ties,
            out,
        } => {
            let spec = GeneratorSpec {
                kind,
                n,
                p,
                k,
                allow_ties,
            };
            let g = generate(&spec, seed)?;
            match out {
                Some(path) => write_graph_to(&g, &path)?,
                None => print!("{}", write_graph(&g)),
            }
            Ok(0)
        }
        Command::Run {
            algo,
            graph,
            seeds,
            costs,
            metrics_out,
            csv_out,
        } => {
            let spec = ExperimentSpec {
                algo,
                source: parse_source(&graph)?,
                seeds: parse_list(&seeds)?,
                overrides: costs.overrides()?,
            };
            let report = run(&spec)?;
            write_output(metrics_out.as_deref(), &format!("{}\n", report.to_json()))?;
            if let Some(path) = csv_out {
                std::fs::write(path, report.to_csv())?;
            }
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            Ok(report.exit_code())
        }
        Command::Verify {
            algo,
            graph,
            seed,
            costs,
        } => {
            let g = match parse_source(&graph)? {
                GraphSource::File(path) => read_graph(&path)?,
                GraphSource::Generated(spec) => generate(&spec, seed)?,
                GraphSource::Given(g) => g,
            };
            let report = verify(algo, &g, seed, &costs.overrides()?);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
