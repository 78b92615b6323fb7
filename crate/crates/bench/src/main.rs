use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mubqp_bench::eaf::export_eaf;
use mubqp_bench::experiment::{read_reports, run_experiment, ExperimentConfig, MethodId};
use mubqp_bench::format::{load_instance, save_instance, InstanceHeader};
use mubqp_bench::summary::summarize;
use mubqp_bench::BenchError;
use mubqp_core::{corpus_fingerprint, generate_instance, GeneratorParams, SolverParams};

#[derive(Parser)]
#[command(
    name = "mubqp",
    version,
    about = "Weighted-sum scalarisation experiments on multi-objective QUBO instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random correlated instance.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.8)]
        density: f64,
        /// Coefficients are integers in [-bound, bound].
        #[arg(long, default_value_t = 100)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print size, density, correlations and coefficient range of an instance.
    Inspect {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run methods repeatedly and write reports.
    Run(RunArgs),
    /// Mean/std table of a reports file.
    Summarize {
        #[arg(long)]
        reports: PathBuf,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Best, median and worst attainment surfaces of one method.
    Eaf {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// uniform, dichotomic, avg-manhattan or avg-euclidean; repeat or separate
    /// with commas.
    #[arg(long, value_delimiter = ',', required = true)]
    method: Vec<String>,
    #[arg(long, default_value_t = 10)]
    weights: usize,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iterations per replica.
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    #[arg(long, default_value_t = 128)]
    replicas: usize,
    #[arg(long, default_value_t = 1e4)]
    t0: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Iterations between temperature decays.
    #[arg(long, default_value_t = 1)]
    interval: u64,
    #[arg(long, default_value_t = 1e3)]
    offset_rate: f64,
    /// Solutions returned per solver call.
    #[arg(long, default_value_t = 128)]
    top_k: usize,
    /// Explicit reference point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    reference: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Partial(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<mubqp_core::MubqpInstance, Failure> {
    load_instance(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate {
            n,
            m,
            rho,
            density,
            bound,
            seed,
            out,
        } => {
            let inst = generate_instance(&GeneratorParams {
                n,
                m,
                rho,
                density,
                coeff_bound: bound,
                seed,
            })
            .map_err(|e| Failure::Config(e.to_string()))?;
            save_instance(&inst, &out)
                .map_err(|e| Failure::Config(format!("{}: {e}", out.display())))?;
            println!("wrote {}", out.display());
        }
        Command::Inspect { instance } => {
            let inst = load(&instance)?;
            let fp = corpus_fingerprint(&inst);
            println!("file:      {}", instance.display());
            if let Some(h) = instance.to_str().and_then(InstanceHeader::from_name) {
                println!("name:      {h}");
            }
            println!(
                "header:    rho={} m={} n={} d={}",
                inst.rho(),
                inst.m(),
                inst.n(),
                inst.density()
            );
            println!("density:   {:.4} (nonzero coefficient vectors)", fp.density);
            for ((k, l), r) in &fp.correlations {
                match r {
                    Some(r) => println!("corr c{}/c{}: {r:.4}", k + 1, l + 1),
                    None => println!("corr c{}/c{}: undefined", k + 1, l + 1),
                }
            }
            println!("range:     [{}, {}]", fp.min_coeff, fp.max_coeff);
        }
        Command::Run(args) => {
            let methods = args
                .method
                .iter()
                .map(|s| s.parse::<MethodId>())
                .collect::<Result<Vec<_>, _>>()?;
            let config = ExperimentConfig {
                instance_path: args.instance,
                methods,
                n_weights: args.weights,
                runs: args.runs,
                base_seed: args.seed,
                solver: SolverParams {
                    t0: args.t0,
                    beta: args.beta,
                    interval: args.interval,
                    offset_rate: args.offset_rate,
                    iterations: args.iters,
                    replicas: args.replicas,
                    top_k: args.top_k,
                    seed: 0,
                },
                reference: args.reference,
                output_dir: args.out,
            };
            let outcome = run_experiment(&config)?;
            if let Ok(summary) = summarize(&outcome.reports) {
                print!("{}", summary.to_table());
            }
            println!("reference: {:?}", outcome.reference.reference);
            println!(
                "reports:   {}",
                config.output_dir.join("reports.jsonl").display()
            );
            if outcome.failures > 0 {
                return Err(Failure::Partial(format!(
                    "{} of {} runs failed; see the error field in reports.jsonl",
                    outcome.failures,
                    outcome.reports.len()
                )));
            }
        }
        Command::Summarize { reports, csv } => {
            let all = read_reports(&reports)?;
            let summary = summarize(&all)?;
            print!("{}", summary.to_table());
            if let Some(path) = csv {
                std::fs::write(&path, summary.to_csv())
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            }
            let failed = all.iter().filter(|r| !r.record.succeeded()).count();
            if failed > 0 {
                return Err(Failure::Partial(format!("{failed} failed run(s) left out")));
            }
        }
        Command::Eaf {
            reports,
            method,
            out,
        } => {
            let method: MethodId = method.parse()?;
            let selected: Vec<_> = read_reports(&reports)?
                .into_iter()
                .filter(|r| r.record.method == method)
                .collect();
            for path in export_eaf(&selected, &out, method.name())? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
