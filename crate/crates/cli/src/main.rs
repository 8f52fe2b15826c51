//! Command-line surface for the filter minimizer.
//!
//! Exit codes, stable across subcommands: 0 success, 1 verification
//! failure (a check ran and found problems), 2 input error, 3 internal
//! error.

use clap::{Args, Parser, Subcommand};
use filtmin::{
    brute_force_mzcc, build_pair_graph, build_zipper_constraints, compatibility_dot,
    compatibility_graph, condensation_poset, downstream_relation, enum_ds, minimize_filter_with,
    pair_sets, parse_filter, parse_mzcc, random_filter, repairable_pairs, serialize_cover,
    serialize_filter, solve_mzcc, Filter, GenSpec, Mode, MzccInstance, SolveOptions,
};
use serde_json::json;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "filtmin", version, about = "Minimize deterministic combinatorial filters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a filter document and report every violation.
    Validate { file: PathBuf },
    /// Minimize a filter and write the minimized document.
    Minimize {
        file: PathBuf,
        /// Write the minimized filter here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
        /// Write the solve report (one JSON line) to this path, or '-' for
        /// stdout (requires --output).
        #[arg(long)]
        emit_report: Option<PathBuf>,
    },
    /// Export the filter and its compatibility graph with zipper
    /// constraints as DOT.
    Graph {
        file: PathBuf,
        /// Emit the filter itself instead of the compatibility graph.
        #[arg(long)]
        filter: bool,
        /// Emit the pair poset instead of the compatibility graph.
        #[arg(long)]
        poset: bool,
    },
    /// Print constraint statistics (pair counts, poset height and width).
    Constraints { file: PathBuf },
    /// Stream the downstream-enabled prescriptions as JSON lines.
    Enum {
        file: PathBuf,
        #[arg(long, default_value = "full")]
        mode: Mode,
    },
    /// Solve a raw graph+constraints instance and print the best cover.
    Cover {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Write the solve report (one JSON line) to this path, or '-' for
        /// stdout.
        #[arg(long)]
        emit_report: Option<PathBuf>,
    },
    /// Check that the candidate filter output-simulates the spec filter.
    Verify { spec: PathBuf, candidate: PathBuf },
    /// Generate a random filter document.
    Gen {
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Full generator spec as a JSON object; overrides the flags.
        #[arg(long)]
        spec: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve random instances and compare against the brute-force oracle.
    Bench {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Domain selection: 'full' repairs comparable pairs, 'no-repair'
    /// enumerates over all constraint pairs.
    #[arg(long, default_value = "full")]
    mode: Mode,
    /// Worker threads for the prescription loop.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            mode: self.mode,
            jobs: self.jobs.max(1),
        }
    }
}

/// What a successfully-run command concluded.
enum Outcome {
    Ok,
    CheckFailed,
}

enum CliError {
    Input(String),
    Internal(String),
}

impl From<filtmin::Error> for CliError {
    fn from(e: filtmin::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Outcome::Ok) => ExitCode::from(0),
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, content).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

fn emit_report_line(
    report: &filtmin::SolveReport,
    path: &Path,
) -> Result<(), CliError> {
    let line = format!(
        "{}\n",
        serde_json::to_string(report).map_err(|e| CliError::Internal(e.to_string()))?
    );
    if path == Path::new("-") {
        print!("{line}");
        Ok(())
    } else {
        write_output(Some(path), &line)
    }
}

fn load_filter(path: &Path) -> Result<Filter, CliError> {
    Ok(parse_filter(&read(path)?)?)
}

fn run(cmd: Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::Validate { file } => {
            // Unparseable input is an input error; a well-formed document
            // that fails validation is a negative check result.
            let text = read(&file)?;
            match parse_filter(&text) {
                Ok(_) => {
                    println!("ok");
                    Ok(Outcome::Ok)
                }
                Err(filtmin::Error::InvalidFilter(violations)) => {
                    for v in violations {
                        println!("{v}");
                    }
                    Ok(Outcome::CheckFailed)
                }
                Err(e) => Err(e.into()),
            }
        }

        Cmd::Minimize {
            file,
            output,
            solve,
            emit_report,
        } => {
            if emit_report.as_deref() == Some(Path::new("-")) && output.is_none() {
                return Err(CliError::Input(
                    "--emit-report - needs --output so the two documents don't interleave".into(),
                ));
            }
            let filter = load_filter(&file)?;
            let (minimized, report) = minimize_filter_with(&filter, &solve.options())?;
            write_output(output.as_deref(), &serialize_filter(&minimized))?;
            if let Some(report_path) = emit_report {
                emit_report_line(&report, &report_path)?;
            }
            Ok(Outcome::Ok)
        }

        Cmd::Graph { file, filter, poset } => {
            let f = load_filter(&file)?;
            if filter {
                print!("{}", filtmin::filter_dot(&f));
                return Ok(Outcome::Ok);
            }
            let g = compatibility_graph(&f);
            let z = build_zipper_constraints(&f, &g);
            if poset {
                let pg = build_pair_graph(&z, &pair_sets(&z).all);
                print!("{}", filtmin::poset_dot(&condensation_poset(&pg)));
            } else {
                print!("{}", compatibility_dot(&g, &z, f.obs_labels()));
            }
            Ok(Outcome::Ok)
        }

        Cmd::Constraints { file } => {
            let filter = load_filter(&file)?;
            let g = compatibility_graph(&filter);
            let z = build_zipper_constraints(&filter, &g);
            let sets = pair_sets(&z);
            let repairable = repairable_pairs(&g, &sets.all)?;
            let domain: std::collections::BTreeSet<_> =
                sets.all.difference(&repairable).copied().collect();
            let z2_poset = condensation_poset(&build_pair_graph(&z, &sets.all));
            let domain_poset =
                condensation_poset(&downstream_relation(&z).restriction(&domain));
            let stats = json!({
                "version": 1,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "constraints": z.len(),
                "z2_pairs": sets.all.len(),
                "source_pairs": sets.sources.len(),
                "target_pairs": sets.targets.len(),
                "repairable_pairs": repairable.len(),
                "domain_pairs": domain.len(),
                "z2_poset": {
                    "classes": z2_poset.classes.len(),
                    "height": z2_poset.height,
                    "width": z2_poset.width,
                    "prescription_bound": z2_poset.prescription_bound(),
                },
                "domain_poset": {
                    "classes": domain_poset.classes.len(),
                    "height": domain_poset.height,
                    "width": domain_poset.width,
                    "prescription_bound": domain_poset.prescription_bound(),
                },
            });
            println!("{stats}");
            Ok(Outcome::Ok)
        }

        Cmd::Enum { file, mode } => {
            let filter = load_filter(&file)?;
            let g = compatibility_graph(&filter);
            let z = build_zipper_constraints(&filter, &g);
            let sets = pair_sets(&z);
            let repairable = match mode {
                Mode::Full => repairable_pairs(&g, &sets.all)?,
                Mode::NoRepair => Default::default(),
            };
            let domain: std::collections::BTreeSet<_> =
                sets.all.difference(&repairable).copied().collect();
            let pg = downstream_relation(&z).restriction(&domain);
            let domain_pairs: Vec<[usize; 2]> = domain.iter().map(|&p| p.into()).collect();
            println!("{}", json!({ "version": 1, "domain": domain_pairs }));
            for (index, p) in enum_ds(&pg).enumerate() {
                let on: Vec<[usize; 2]> = p.on_pairs().iter().map(|&q| q.into()).collect();
                println!("{}", json!({ "index": index, "on": on }));
            }
            Ok(Outcome::Ok)
        }

        Cmd::Cover {
            file,
            solve,
            emit_report,
        } => {
            let inst = parse_mzcc(&read(&file)?)?;
            let report = solve_mzcc(&inst, &solve.options())?;
            print!("{}", serialize_cover(&report.best));
            if let Some(report_path) = emit_report {
                emit_report_line(&report, &report_path)?;
            }
            Ok(Outcome::Ok)
        }

        Cmd::Verify { spec, candidate } => {
            let spec_filter = load_filter(&spec)?;
            let candidate_filter = load_filter(&candidate)?;
            match filtmin::output_simulates(&spec_filter, &candidate_filter)? {
                filtmin::Simulation::Holds => {
                    println!("ok");
                    Ok(Outcome::Ok)
                }
                filtmin::Simulation::Refuted { witness } => {
                    let symbols: Vec<&str> =
                        witness.iter().map(|&y| spec_filter.obs_label(y)).collect();
                    println!("{}", json!({ "witness": symbols }));
                    Ok(Outcome::CheckFailed)
                }
            }
        }

        Cmd::Gen {
            states,
            alphabet,
            outputs,
            density,
            seed,
            spec,
            output,
        } => {
            let gen_spec = match spec {
                Some(text) => serde_json::from_str::<GenSpec>(&text)
                    .map_err(|e| CliError::Input(format!("--spec: {e}")))?,
                None => GenSpec {
                    states,
                    alphabet,
                    outputs,
                    density,
                    seed,
                },
            };
            let filter = random_filter(&gen_spec)?;
            write_output(output.as_deref(), &serialize_filter(&filter))?;
            Ok(Outcome::Ok)
        }

        Cmd::Bench {
            count,
            states,
            alphabet,
            outputs,
            density,
            seed,
            solve,
        } => {
            let mut all_match = true;
            for i in 0..count {
                let gen_spec = GenSpec {
                    states,
                    alphabet,
                    outputs,
                    density,
                    seed: seed + i as u64,
                };
                let filter = random_filter(&gen_spec)?;
                let inst = MzccInstance::from_filter(&filter);
                let solver_start = Instant::now();
                let report = solve_mzcc(&inst, &solve.options())?;
                let solver_seconds = solver_start.elapsed().as_secs_f64();

                let n = inst.graph().vertex_count();
                let (oracle_size, oracle_seconds) = if n <= filtmin::BRUTE_FORCE_GUARD {
                    let oracle_start = Instant::now();
                    let oracle = brute_force_mzcc(&inst, n)?;
                    (
                        oracle.map(|c| c.len()),
                        Some(oracle_start.elapsed().as_secs_f64()),
                    )
                } else {
                    (None, None)
                };
                let matches = oracle_size.map(|o| o == report.best_size);
                if matches == Some(false) {
                    all_match = false;
                }
                println!(
                    "{}",
                    json!({
                        "seed": gen_spec.seed,
                        "states": filter.state_count(),
                        "solver_size": report.best_size,
                        "solver_seconds": solver_seconds,
                        "oracle_size": oracle_size,
                        "oracle_seconds": oracle_seconds,
                        "match": matches,
                    })
                );
            }
            if all_match {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::CheckFailed)
            }
        }
    }
}
