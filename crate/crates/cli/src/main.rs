use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use barrier_bound_cli::config::{ConfigError, Scenario};
use barrier_bound_cli::{builtin, merge, report, run_batch, worker_budget};
use clap::{Parser, Subcommand};

const EXIT_USAGE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "barrier-bound",
    version,
    about = "Barrier construction and estimate audits"
)]
struct Cli {
    /// Print the built-in scenario names.
    #[arg(long)]
    list: bool,

    /// Merge report bundles (report.json files or their directories) into one CSV table.
    #[arg(long, num_args = 0.., value_name = "PATHS")]
    merge: Option<Vec<PathBuf>>,

    /// Output directory for report bundles, or for the merged CSV.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run scenario files or built-in scenario names.
    Run {
        #[arg(required = true, value_name = "CONFIG")]
        configs: Vec<String>,

        /// Replace the field resolution list by this single value.
        #[arg(long, value_name = "N")]
        resolution_override: Option<usize>,

        /// Keep only the sweep of this parameter (resolution, c, delta).
        #[arg(long, value_name = "PARAM")]
        sweep_only: Option<String>,
    },
}

fn resolve(arg: &str) -> Result<Scenario, ConfigError> {
    let path = Path::new(arg);
    if path.exists() {
        return Scenario::load(path);
    }
    match builtin::load(arg) {
        Some(s) => s,
        None => Err(ConfigError::Unknown(format!(
            "{arg}: no such file or built-in scenario (see --list)"
        ))),
    }
}

fn run(configs: &[String], resolution: Option<usize>, sweep_only: Option<&str>, out: &Path) -> u8 {
    let mut scenarios = Vec::new();
    for arg in configs {
        let mut s = match resolve(arg) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        if let Some(n) = resolution {
            s.override_resolution(n);
        }
        if let Some(p) = sweep_only {
            if let Err(e) = s.restrict_sweeps(p) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
        if let Err(e) = s.validate(arg) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        scenarios.push(s);
    }
    let mut code = 0;
    for outcome in run_batch(&scenarios, worker_budget()) {
        let r = &outcome.report;
        let plots = scenarios
            .iter()
            .find(|s| s.name == r.scenario)
            .map(|s| (s.output.csv, s.output.plots))
            .unwrap_or((true, true));
        let written = report::write_bundle(&outcome, out, plots.0, plots.1);
        let failed = r.checks.iter().filter(|c| !c.passed()).count();
        println!(
            "{:<28} {:<18} {} checks, {} not passing",
            r.scenario,
            label(&r.verdict),
            r.checks.len(),
            failed
        );
        for c in r.checks.iter().filter(|c| !c.passed()) {
            println!(
                "  {} [{}]: {} defect {:.3e} tol {:.3e}",
                c.check,
                c.sweep,
                label(&c.verdict),
                c.max_defect,
                c.tolerance
            );
        }
        for e in &r.errors {
            eprintln!("  {}: {e}", r.scenario);
        }
        match written {
            Ok(p) => println!("  report: {}", p.display()),
            Err(e) => {
                eprintln!("  writing report for {}: {e}", r.scenario);
                code = code.max(EXIT_USAGE);
            }
        }
        code = code.max(r.verdict.exit_code() as u8);
    }
    code
}

fn merge_reports(paths: &[PathBuf], out: Option<&Path>) -> u8 {
    let merged = match merge::merge(paths) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: --merge: {e}");
            return EXIT_USAGE;
        }
    };
    for (p, e) in &merged.skipped {
        eprintln!("warning: skipped {}: {e}", p.display());
    }
    let result = match out {
        Some(dir) => std::fs::create_dir_all(dir)
            .and_then(|_| report::write_rows(&dir.join("merged.csv"), &merged.rows)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report::write_rows_to(&mut lock, &merged.rows).and_then(|_| lock.flush())
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: writing merged table: {e}");
            EXIT_USAGE
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.list {
        for name in builtin::names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    if let Some(paths) = &cli.merge {
        return ExitCode::from(merge_reports(paths, cli.out.as_deref()));
    }
    match &cli.command {
        Some(Command::Run {
            configs,
            resolution_override,
            sweep_only,
        }) => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
            ExitCode::from(run(
                configs,
                *resolution_override,
                sweep_only.as_deref(),
                &out,
            ))
        }
        None => {
            eprintln!(
                "error: nothing to do; use `run <CONFIG>...`, --list or --merge (see --help)"
            );
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Serialized name of a verdict, as it appears in the report.
fn label(v: &impl serde::Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}
