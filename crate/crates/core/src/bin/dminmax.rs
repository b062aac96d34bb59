use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dminmax::experiment::{
    build_graph, cmd_check_mixing, cmd_compare, cmd_run, cmd_verify, compare_summary, exit, exit_code, format_verify,
    load_config, MixingSpec, Overrides, TopologySpec,
};
use dminmax::graph::Graph;
use dminmax::Error;

#[derive(Parser)]
#[command(name = "dminmax", version, about = "Decentralized primal-dual experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "seed-override")]
    seed: Option<u64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, max_iters: self.max_iters, tol: self.tol }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured algorithm and write trace.csv, summary.txt, solution.csv.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Replay through the message-passing harness and write audit.csv.
        #[arg(long)]
        audit: bool,
    },
    /// Certify a mixing matrix built on a graph.
    CheckMixing {
        /// Edge-list file.
        #[arg(long, conflicts_with = "topology")]
        graph: Option<PathBuf>,
        /// Named topology: path, ring, star, complete or random:<seed>:<density>.
        #[arg(long, requires = "agents")]
        topology: Option<String>,
        #[arg(long)]
        agents: Option<usize>,
        /// metropolis, laplacian or laplacian:<alpha>.
        #[arg(long, default_value = "metropolis")]
        scheme: String,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Check the solver equivalences on the configured instance.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Run every algorithm listed under [compare] on one instance.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(&err) as u8)
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn check_mixing_graph(graph: Option<PathBuf>, topology: Option<String>, agents: Option<usize>) -> Result<Graph, Error> {
    match (graph, topology) {
        (Some(path), _) => Graph::parse_edge_list(&std::fs::read_to_string(path)?),
        (None, Some(name)) => {
            let spec: TopologySpec = name.parse().map_err(|msg: String| Error::Config { field: "--topology".into(), msg })?;
            build_graph(&spec, agents.unwrap_or(0), "--topology")
        }
        (None, None) => Err(Error::Config { field: "--graph".into(), msg: "give --graph or --topology".into() }),
    }
}

fn parse_scheme(scheme: &str, alpha: Option<f64>) -> Result<MixingSpec, Error> {
    let bad = |msg: String| Error::Config { field: "--scheme".into(), msg };
    match (scheme, alpha) {
        ("laplacian", Some(a)) => Ok(MixingSpec::Laplacian(a)),
        ("laplacian", None) => Err(bad("laplacian needs --alpha".into())),
        (s, _) => s.parse().map_err(bad),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { common, out, audit } => {
            let result = load_config(&common.config, common.overrides()).and_then(|cfg| cmd_run(&cfg, Some(&out), audit));
            match result {
                Ok(report) => {
                    print!("{}", report.summary_text());
                    if report.audit.as_ref().is_some_and(|a| a.illegal_attempts() > 0 || !a.bit_identical) {
                        eprintln!("audit failed: illegal reads or replay mismatch");
                        return code(exit::FAILURE);
                    }
                    if report.converged() {
                        code(exit::OK)
                    } else {
                        eprintln!("did not converge ({}); trace written to {}", report.status(), out.display());
                        code(exit::NOT_CONVERGED)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::CheckMixing { graph, topology, agents, scheme, alpha } => {
            let result = check_mixing_graph(graph, topology, agents)
                .and_then(|g| parse_scheme(&scheme, alpha).map(|s| (g, s)))
                .and_then(|(g, s)| cmd_check_mixing(&g, s));
            match result {
                Ok(report) => {
                    println!("{report}");
                    code(if report.all_passed() { exit::OK } else { exit::FAILURE })
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify { common } => match load_config(&common.config, common.overrides()).and_then(|cfg| cmd_verify(&cfg)) {
            Ok(rows) => {
                print!("{}", format_verify(&rows));
                code(if rows.iter().all(|r| r.passed()) { exit::OK } else { exit::FAILURE })
            }
            Err(e) => fail(e),
        },
        Command::Compare { common, out } => {
            match load_config(&common.config, common.overrides()).and_then(|cfg| cmd_compare(&cfg, Some(&out))) {
                Ok(entries) => {
                    print!("{}", compare_summary(&entries));
                    for e in entries.iter().filter(|e| !e.report.converged()) {
                        println!("flagged: {} did not converge ({})", e.report.algorithm, e.report.status());
                    }
                    code(exit::OK)
                }
                Err(e) => fail(e),
            }
        }
    }
}
