//! `chainflow`: validate instances, solve the routing-and-lateness MIP, replay plans under
//! stochastic lead times, and run scenario sweeps.
//!
//! Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 infeasible, 4 limit reached,
//! 5 every sweep cell failed.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainflow::instance::{load_instance, validate, SupplyChainInstance};
use chainflow::lab::{
    average_lateness_summary, gnuplot_script, histogram_csv, load_study_config, report_csv, run_study, summary_csv,
    totals_csv, StudyCell,
};
use chainflow::milp::write_mps;
use chainflow::model::{
    build_model, check_feasibility, evaluate_objective, load_plan, save_plan, solve_instance, PlanDocument,
};
use chainflow::sim::{run_replications, DEFAULT_REPLICATIONS, DEFAULT_SIGMA};
use chainflow::{write_atomic, Error, LatenessPolicy, LeadTimeModel, SolveOptions, SolveStatus, Solver};
use clap::{Parser, Subcommand};

const SEED_ENV: &str = "CHAINFLOW_SEED";

#[derive(Parser)]
#[command(name = "chainflow", version, about = "Lead-time-aware supply-chain planning and disruption studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file; prints one line per violation.
    Validate {
        instance: PathBuf,
    },
    /// Solve an instance and write the optimal flow plan.
    Solve {
        instance: PathBuf,
        /// Lateness policy: `none` or `unit:fixed`, e.g. `1:500`.
        #[arg(long, default_value = "none")]
        policy: LatenessPolicy,
        /// `branch-and-bound` or `brute-force`.
        #[arg(long, default_value = "branch-and-bound")]
        solver: Solver,
        /// Relative optimality gap at which search stops.
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long, default_value_t = 1_000_000)]
        node_limit: u64,
        /// Write the program in MPS format to this path instead of solving.
        #[arg(long, value_name = "PATH")]
        export_mps: Option<PathBuf>,
        /// Plan file to write.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Replay a plan under log-normal lead times and write lateness CSVs.
    Simulate {
        instance: PathBuf,
        plan: PathBuf,
        /// Log-scale standard deviation; the median lead time is the planned one.
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        /// Master seed [default: $CHAINFLOW_SEED, else 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for replications.csv and summary.csv.
        #[arg(short, long, value_name = "DIR", default_value = ".")]
        output: PathBuf,
    },
    /// Run a study config: solve, classify and simulate every cell.
    Sweep {
        config: PathBuf,
        output_dir: PathBuf,
        /// Master seed, overriding the config [default: config, else $CHAINFLOW_SEED, else 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Also write lateness.gp, a gnuplot script for the plot data.
        #[arg(long)]
        gnuplot: bool,
    },
}

/// A command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => 2,
            _ => 1,
        };
        Failure::new(code, e)
    }
}

type Outcome = Result<(), Failure>;

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::new(1, format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn create_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::new(2, format!("{}: {e}", dir.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    write_atomic(path, text.as_bytes()).map_err(Failure::from)
}

fn load_valid(path: &Path) -> Result<SupplyChainInstance, Failure> {
    let inst = load_instance(path)?;
    let violations = validate(&inst);
    if violations.is_empty() {
        return Ok(inst);
    }
    for v in &violations {
        println!("{v}");
    }
    Err(Failure::new(1, format!("{}: {} violation(s)", path.display(), violations.len())))
}

fn cmd_validate(path: &Path) -> Outcome {
    let inst = load_valid(path)?;
    println!(
        "{}: valid ({} entities, {} edges, {} products)",
        path.display(),
        inst.entities.len(),
        inst.edges.len(),
        inst.products.len()
    );
    Ok(())
}

struct SolveArgs {
    instance: PathBuf,
    policy: LatenessPolicy,
    solver: Solver,
    options: SolveOptions,
    export_mps: Option<PathBuf>,
    output: Option<PathBuf>,
}

fn cmd_solve(args: SolveArgs) -> Outcome {
    let inst = load_valid(&args.instance)?;
    if let Some(path) = &args.export_mps {
        let (program, _, _) = build_model(&inst, &args.policy)?;
        write_mps(&program, path)?;
        println!(
            "wrote {} ({} rows, {} columns)",
            path.display(),
            program.num_rows(),
            program.num_columns()
        );
        return Ok(());
    }
    args.options.check()?;
    let sol = solve_instance(&inst, &args.policy, args.solver, &args.options)?;
    let r = &sol.report;
    println!("status\t{}", status_name(r.status));
    if let Some(obj) = r.objective {
        println!("objective\t{obj}");
    }
    if let Some(gap) = r.gap {
        println!("gap\t{gap:e}");
    }
    println!("nodes\t{}", r.nodes);
    println!("time\t{:.3}s", r.wall_time.as_secs_f64());
    if let Some(plan) = &sol.plan {
        let cost = evaluate_objective(&inst, &args.policy, plan);
        println!("cost\t{cost}");
        println!("used_edges\t{}", plan.used_edges().len());
        if let Some(path) = &args.output {
            let doc = PlanDocument {
                plan: plan.clone(),
                policy: Some(args.policy),
                objective: r.objective,
            };
            save_plan(&doc, path)?;
            println!("plan\t{}", path.display());
        }
    }
    match r.status {
        SolveStatus::Optimal | SolveStatus::GapReached => Ok(()),
        SolveStatus::Infeasible => Err(Failure::new(3, "model is infeasible")),
        SolveStatus::NodeLimit => Err(Failure::new(4, "node limit reached")),
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::NodeLimit => "node_limit",
        SolveStatus::GapReached => "gap_reached",
    }
}

fn cmd_simulate(instance: &Path, plan: &Path, sigma: f64, reps: usize, seed: Option<u64>, out: &Path) -> Outcome {
    let inst = load_valid(instance)?;
    let doc = load_plan(plan)?;
    let policy = doc.policy.unwrap_or(LatenessPolicy::NONE);
    let violations = check_feasibility(&inst, &policy, &doc.plan, 1e-6)?;
    if !violations.is_empty() {
        for v in &violations {
            println!("{v}");
        }
        return Err(Failure::new(
            3,
            format!("{}: plan violates {} constraint(s)", plan.display(), violations.len()),
        ));
    }
    let seed = match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let model = LeadTimeModel::lognormal(sigma)?;
    let report = run_replications(&inst, &doc.plan, &model, reps, seed)?;
    create_dir(out)?;
    write(&out.join("replications.csv"), &report.replications_csv())?;
    write(&out.join("summary.csv"), &report.summary_csv())?;
    let (mean, std) = report.total_lateness_stats();
    println!("replications\t{reps}");
    println!("seed\t{seed}");
    println!("mean_total_lateness\t{mean}");
    println!("std_total_lateness\t{std}");
    for c in &report.customers {
        println!(
            "customer\t{}\t{}\tmean {}\tstd {}\ton_time {}",
            c.customer, c.product, c.mean, c.std, c.on_time_fraction
        );
    }
    Ok(())
}

fn plan_file_name(cell: &StudyCell) -> String {
    let entity = cell
        .disruption
        .as_ref()
        .map(|d| format!("{}x{}", d.entity, d.lead_time_multiplier))
        .unwrap_or_else(|| "baseline".into());
    let policy = cell.policy.to_string().replace(':', "-");
    format!("{}__{}__{}.json", cell.variant, entity, policy)
}

fn cmd_sweep(config: &Path, out: &Path, seed: Option<u64>, gnuplot: bool) -> Outcome {
    let mut config = load_study_config(config)?;
    if let Some(s) = seed {
        config.master_seed = Some(s);
    } else if config.master_seed.is_none() {
        config.master_seed = env_seed()?;
    }
    create_dir(out)?;
    let plans = out.join("plans");
    create_dir(&plans)?;

    let report = run_study(&config)?;
    write(&out.join("report.csv"), &report_csv(&report))?;
    write(&out.join("summary.csv"), &summary_csv(&average_lateness_summary(&report)))?;
    write(&out.join("histogram.csv"), &histogram_csv(&report))?;
    write(&out.join("totals.csv"), &totals_csv(&report))?;
    if gnuplot {
        write(&out.join("lateness.gp"), &gnuplot_script("summary.csv", "histogram.csv"))?;
    }
    for cell in &report.cells {
        if let Some(plan) = &cell.response_plan {
            let doc = PlanDocument {
                plan: plan.clone(),
                policy: Some(cell.policy),
                objective: cell.response_objective,
            };
            save_plan(&doc, plans.join(plan_file_name(cell)))?;
        }
    }

    let ok = report.cells.iter().filter(|c| c.succeeded()).count();
    for cell in report.cells.iter().filter(|c| !c.succeeded()) {
        eprintln!(
            "cell {} {} {}: {}{}",
            cell.variant,
            cell.disruption.as_ref().map_or("baseline".into(), |d| d.entity.to_string()),
            cell.policy,
            cell.status.as_str(),
            cell.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default()
        );
    }
    println!("cells\t{}\tsucceeded\t{ok}", report.cells.len());
    println!("seed\t{}", config.seed());
    println!("report\t{}", out.join("report.csv").display());
    if ok == 0 {
        return Err(Failure::new(5, "every cell failed"));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { instance } => cmd_validate(&instance),
        Command::Solve {
            instance,
            policy,
            solver,
            gap,
            node_limit,
            export_mps,
            output,
        } => cmd_solve(SolveArgs {
            instance,
            policy,
            solver,
            options: SolveOptions {
                gap_tolerance: gap,
                node_limit,
                ..SolveOptions::default()
            },
            export_mps,
            output,
        }),
        Command::Simulate {
            instance,
            plan,
            sigma,
            reps,
            seed,
            output,
        } => cmd_simulate(&instance, &plan, sigma, reps, seed, &output),
        Command::Sweep {
            config,
            output_dir,
            seed,
            gnuplot,
        } => cmd_sweep(&config, &output_dir, seed, gnuplot),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
