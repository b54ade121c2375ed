use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use runsec::epistemic::{parse_formula, Evaluator};
use runsec::report::{self, Mutation};
use runsec::specfile;

#[derive(Parser)]
#[command(
    name = "runsec",
    about = "Secrecy and information-flow checks for finite multiagent run systems",
    long_about = "Loads JSON system descriptions and decides possibilistic, probabilistic, \
                  plausibilistic, and trace-based secrecy notions, with enumeration oracles \
                  for the epistemic characterizations and seeded randomized property suites."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the expect-block checks of a system file; exit 0 when every
    /// verdict matches.
    Check {
        /// Path to the JSON system description.
        spec: String,
        /// Restrict to these check names (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emit a named fixture with its expected verdicts.
    ///
    /// Names: EX1, EX2, EX3, COSMIC <n> <eps>, XOR <k>, GS-XOR <k>,
    /// L_O_ONCE <m>, SHUFFLE-PRODUCT <nl> <nh>.
    Fixture {
        name: String,
        /// Fixture parameters, e.g. `COSMIC 4 1/10`.
        params: Vec<String>,
        /// Write to this path instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Run a randomized property suite; exit 0 when it has no failures.
    Suite {
        /// Suite name, or `all`.
        name: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Inject a deliberate defect (negative control): the suite is
        /// then expected to fail.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate a formula of the knowledge/probability logic at a point.
    ///
    /// Surface syntax: primitive names, `(not F)`, `(and F G)`,
    /// `(K agent F)`, `(P agent F)`, `(once F)`, `(pr agent F op q)` with
    /// op in `= <= < >= >` and q a rational such as 1/2.
    Eval {
        spec: String,
        /// Formula in prefix syntax, e.g. "(pr 1 (once p) = 1/2)".
        #[arg(long)]
        formula: String,
        /// Point as `run,time`, e.g. `r3,0`.
        #[arg(long)]
        at: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    /// Drop the perfect-recall hypothesis from the instance generator.
    Recall,
    /// Compare probabilities with a 1e-6 tolerance.
    Tolerance,
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { spec, only, format } => {
            let loaded = specfile::load_path(&spec).map_err(|e| e.to_string())?;
            let report =
                report::run_checks(&loaded, only.as_deref()).map_err(|e| e.to_string())?;
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            Ok(if report.all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Fixture { name, params, output } => {
            let doc = report::fixture(&name, &params).map_err(|e| e.to_string())?;
            let text = specfile::to_json(&doc);
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {path}: {e}"))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { name, seed, count, mutate, format } => {
            let mutation = mutate.map(|m| match m {
                MutationArg::Recall => Mutation::SkipRecallFilter,
                MutationArg::Tolerance => Mutation::FloatTolerance,
            });
            let names: Vec<&str> = if name == "all" {
                report::all_suites().to_vec()
            } else {
                vec![name.as_str()]
            };
            let mut ok = true;
            for suite in names {
                let result = report::run_suite(suite, seed, count, mutation)
                    .map_err(|e| e.to_string())?;
                ok &= result.passed();
                match format {
                    Format::Text => print!("{}", result.to_text()),
                    Format::Json => println!("{}", result.to_json()),
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Eval { spec, formula, at } => {
            let loaded = specfile::load_path(&spec).map_err(|e| e.to_string())?;
            let sys = loaded
                .system
                .as_ref()
                .ok_or("the file does not describe a run system")?;
            let phi = parse_formula(sys, &formula).map_err(|e| e.to_string())?;
            let (run, time) = at
                .split_once(',')
                .ok_or("point syntax is run,time (e.g. r1,0)")?;
            let time: usize = time.trim().parse().map_err(|e| format!("bad time: {e}"))?;
            let point = specfile::resolve_point(sys, &(run.trim().to_string(), time))
                .map_err(|e| e.to_string())?;
            let ev = Evaluator::new(sys, &loaded.interpretation, loaded.measure.as_ref());
            let truth = ev.eval(point, &phi).map_err(|e| e.to_string())?;
            println!("{truth}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
