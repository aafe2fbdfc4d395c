use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ratcoord::genfunc::RationalGF;
use ratcoord::periodic_graph::{GraphError, PeriodicGraph};
use ratcoord::poly::ZPoly;
use ratcoord::pipeline::{self, Method, PipelineOptions, PipelineReport};
use ratcoord::semilinear::{self, SemilinearError, SemilinearSet};

const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "ratcoord", version, about = "Coordination sequences and their rational generating functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Symbolic,
    Fit,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Symbolic => Method::Symbolic,
            MethodArg::Fit => Method::Fit,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Coordination sequence by breadth-first search on the cover.
    Bfs {
        file: PathBuf,
        #[arg(long)]
        origin: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Generating function by the symbolic pipeline, by fitting, or both.
    Gf {
        file: PathBuf,
        #[arg(long)]
        origin: usize,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = pipeline::DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Both paths plus the brute-force oracle; exit code 3 on any mismatch.
    Verify {
        file: PathBuf,
        #[arg(long)]
        origin: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        json: bool,
        /// Harness self-test: perturb the symbolic result at z^7.
        #[arg(long, hide = true)]
        corrupt_symbolic: bool,
    },
    /// Semilinear set utilities.
    Semilinear {
        #[command(subcommand)]
        command: SemilinearCommand,
    },
}

#[derive(Subcommand)]
enum SemilinearCommand {
    /// Disjoint unambiguous decomposition of a semilinear set given as JSON.
    Decompose {
        #[arg(long = "json-input")]
        json_input: PathBuf,
        /// Half-width of the verification box (default: 4 x largest entry).
        #[arg(long)]
        radius: Option<i64>,
        #[arg(long, default_value_t = semilinear::DEFAULT_BOX_BUDGET)]
        budget: u64,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("ratcoord: {msg}");
    ExitCode::from(code)
}

fn load_graph(path: &Path) -> Result<PeriodicGraph, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    PeriodicGraph::parse(&text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn graph_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn graph_failure(e: GraphError) -> ExitCode {
    match e {
        GraphError::BudgetExceeded(_) => fail(EXIT_BUDGET, e),
        _ => fail(EXIT_USAGE, e),
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("serializable report"));
}

fn print_report(r: &PipelineReport) {
    let seq: Vec<String> = r.sequence.values().iter().map(u64::to_string).collect();
    println!("sequence: {}", seq.join(" "));
    if let Some(q) = &r.gf_fit {
        println!("gf_fit: {q}");
    }
    if let Some(q) = &r.gf_symbolic {
        println!("gf_symbolic: {q}");
    }
    println!(
        "symbolic_status: {}",
        serde_json::to_value(r.symbolic_status).unwrap().as_str().unwrap()
    );
    for a in &r.agreement {
        match a.first_mismatch {
            None => println!("agree {}: ok (0..={})", a.pair, a.depth),
            Some(k) => println!("agree {}: MISMATCH at {k}", a.pair),
        }
    }
}

fn report_exit(r: &PipelineReport) -> ExitCode {
    if !r.all_agree() {
        ExitCode::from(EXIT_MISMATCH)
    } else if !r.has_gf() {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    }
}

fn corrupt(q: &RationalGF) -> RationalGF {
    q + &RationalGF::polynomial(ZPoly::monomial(1.into(), 7))
}

struct Run {
    method: Method,
    verify: bool,
    json: bool,
    corrupt: bool,
}

fn run_pipeline(file: &Path, origin: usize, depth: usize, run: Run) -> ExitCode {
    let g = match load_graph(file) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let opts = PipelineOptions {
        graph_id: graph_id(file),
        method: run.method,
        depth,
        tamper_symbolic: run.corrupt.then_some(corrupt as fn(&RationalGF) -> RationalGF),
        ..Default::default()
    };
    let result = if run.verify {
        pipeline::cross_verify(&g, origin, &opts)
    } else {
        pipeline::pipeline_coordination_gf(&g, origin, &opts)
    };
    let r = match result {
        Ok(r) => r,
        Err(pipeline::PipelineError::Graph(e)) => return graph_failure(e),
    };
    if run.json {
        print_json(&r);
    } else {
        print_report(&r);
    }
    report_exit(&r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Bfs {
            file,
            origin,
            depth,
            json,
        } => {
            let g = match load_graph(&file) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let seq = match g.bfs_coordination(origin, depth) {
                Ok(s) => s,
                Err(e) => return graph_failure(e),
            };
            if json {
                print_json(&serde_json::json!({
                    "graph_id": graph_id(&file),
                    "origin": origin,
                    "sequence": seq,
                }));
            } else {
                let s: Vec<String> = seq.values().iter().map(u64::to_string).collect();
                println!("{}", s.join(" "));
            }
            ExitCode::SUCCESS
        }
        Command::Gf {
            file,
            origin,
            method,
            depth,
            json,
        } => run_pipeline(
            &file,
            origin,
            depth,
            Run {
                method: method.into(),
                verify: false,
                json,
                corrupt: false,
            },
        ),
        Command::Verify {
            file,
            origin,
            depth,
            json,
            corrupt_symbolic,
        } => run_pipeline(
            &file,
            origin,
            depth,
            Run {
                method: Method::Both,
                verify: true,
                json,
                corrupt: corrupt_symbolic,
            },
        ),
        Command::Semilinear {
            command:
                SemilinearCommand::Decompose {
                    json_input,
                    radius,
                    budget,
                },
        } => {
            let text = match std::fs::read_to_string(&json_input) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", json_input.display())),
            };
            let set = match serde_json::from_str::<SemilinearSet>(&text) {
                Ok(s) => match s.validated() {
                    Ok(s) => s,
                    Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", json_input.display())),
                },
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", json_input.display())),
            };
            let result = match radius {
                Some(r) => set.disambiguate(r, budget),
                None => {
                    let (lo, hi) = set.default_box();
                    set.disambiguate_in_box(&lo, &hi, budget)
                }
            };
            match result {
                Ok(d) => {
                    print_json(&d);
                    ExitCode::SUCCESS
                }
                Err(e @ SemilinearError::BudgetExceeded(_)) => fail(EXIT_BUDGET, e),
                Err(e) => fail(1, e),
            }
        }
    }
}
