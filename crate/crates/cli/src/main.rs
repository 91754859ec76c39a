use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foldcheck::fold_dp::{self, witness_json, GlobalLayering, Mode, OracleError};
use foldcheck::pattern::Label;
use foldcheck::pipeline::{self, Analysis, Clock, Options, PipelineError, RunReport, Verdict};
use foldcheck::testgen::{self, GenSpec, Kind};
use foldcheck::{arrangement, decomposition, svg};

const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "foldcheck", version, about = "Decide whether a crease pattern folds flat")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and report a verdict.
    Check(CheckArgs),
    /// Compare the dynamic program with the exhaustive oracle.
    CrossCheck(CrossArgs),
    /// Write a generated crease pattern.
    Gen(GenArgs),
}

#[derive(Args)]
struct ModeArgs {
    /// Enforce mountain/valley labels (default).
    #[arg(long, conflicts_with = "ignore_labels")]
    mv: bool,
    /// Ignore mountain/valley labels.
    #[arg(long)]
    ignore_labels: bool,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        if self.ignore_labels {
            Mode::Unlabeled
        } else {
            Mode::Labeled
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    /// Write the witness layering as JSON.
    #[arg(long, value_name = "PATH")]
    witness: Option<PathBuf>,
    /// Write an SVG of the arrangement shaded by ply.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the nice tree decomposition as JSON.
    #[arg(long, value_name = "PATH")]
    decomposition: Option<PathBuf>,
    /// Write the arrangement cells and classified edges as JSON.
    #[arg(long, value_name = "PATH")]
    arrangement: Option<PathBuf>,
    /// Also run the exhaustive oracle and compare verdicts.
    #[arg(long)]
    oracle: bool,
    /// Largest product of per-cell layering counts the oracle will try.
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    oracle_budget: u128,
    /// Include per-node state counts in the report.
    #[arg(long)]
    stats_json: bool,
    /// Worker threads for the dynamic program.
    #[arg(long, value_name = "N", env = "FOLDCHECK_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct CrossArgs {
    file: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    oracle_budget: u128,
    #[arg(long, value_name = "N", env = "FOLDCHECK_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Accordion,
    MapGrid,
    SingleVertex,
    RandomVertex,
    SimpleFold,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accordion crease count.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    rows: usize,
    #[arg(long, default_value_t = 2)]
    cols: usize,
    /// Sector angles in degrees, e.g. 90,90,90,90.
    #[arg(long, value_delimiter = ',', default_value = "90,90,90,90")]
    angles: Vec<u32>,
    /// One letter per crease (M, V or U); random when omitted.
    #[arg(long)]
    labels: Option<String>,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Number of simple folds.
    #[arg(long, default_value_t = 2)]
    folds: usize,
    /// Number of crease labels to flip afterwards.
    #[arg(long, default_value_t = 0)]
    flips: usize,
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// Writes a line to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

struct InstantClock(Instant);

impl Clock for InstantClock {
    fn now_ms(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1000.0
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("foldcheck: {msg}");
    ExitCode::from(code)
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExitCode> {
    fs::write(path, contents).map_err(|e| fail(EXIT_INTERNAL, format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path, opts: &Options) -> Result<Analysis, ExitCode> {
    let bytes = fs::read(path).map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    pipeline::analyze(&bytes, opts, &mut InstantClock(Instant::now())).map_err(|e: PipelineError| {
        let code = e.exit_code() as u8;
        fail(code, e)
    })
}

fn summary(a: &Analysis) -> String {
    match &a.solved {
        None => format!(
            "{}: {} faces, {} creases",
            verdict_text(a.verdict),
            a.pattern.faces.len(),
            a.pattern.creases.len()
        ),
        Some(s) => format!(
            "{}: {} faces, {} creases, ply {}, {} cells, width {}, max states {}",
            verdict_text(a.verdict),
            a.pattern.faces.len(),
            a.pattern.creases.len(),
            s.arrangement.ply(),
            s.arrangement.cells.len(),
            s.nice.width(),
            s.outcome.max_states()
        ),
    }
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Foldable => "foldable",
        Verdict::NotFoldable => "not foldable",
        Verdict::NotLocallyFlat => "not locally flat-foldable",
    }
}

fn check(args: &CheckArgs) -> ExitCode {
    let mode = args.mode.mode();
    let opts = Options { mode, threads: args.threads.max(1) };
    let analysis = match load(&args.file, &opts) {
        Ok(a) => a,
        Err(code) => return code,
    };

    let mut report = serde_json::to_value(RunReport::from_analysis(&analysis, mode, args.stats_json))
        .expect("report serializes");
    let mut code = ExitCode::from(analysis.verdict.exit_code() as u8);

    if let Some(crease) = analysis.inconsistent_crease {
        let c = &analysis.pattern.creases[crease];
        eprintln!(
            "crease {crease} from ({}, {}) to ({}, {}) is inconsistent with the reflections around it",
            foldcheck::geom::format_rat(&c.segment.a.x),
            foldcheck::geom::format_rat(&c.segment.a.y),
            foldcheck::geom::format_rat(&c.segment.b.x),
            foldcheck::geom::format_rat(&c.segment.b.y),
        );
    }

    if let Some(s) = &analysis.solved {
        if args.oracle {
            match fold_dp::oracle_solve(&s.arrangement, mode, args.oracle_budget) {
                Ok(w) => {
                    let agrees = w.is_some() == s.outcome.feasible();
                    report["oracle"] = serde_json::json!({
                        "verdict": if w.is_some() { "foldable" } else { "not-foldable" },
                        "agrees": agrees,
                    });
                    if !agrees {
                        eprintln!("foldcheck: oracle disagrees with the dynamic program");
                        code = ExitCode::from(EXIT_INTERNAL);
                    }
                }
                Err(OracleError::BudgetExceeded { needed, budget }) => {
                    eprintln!("oracle skipped (budget): {needed} > {budget}");
                    report["oracle"] = serde_json::json!({ "verdict": "skipped" });
                }
            }
        }
        if let Some(path) = &args.witness {
            if let Err(c) = write_file(path, &witness_json(s.outcome.witness.as_ref())) {
                return c;
            }
        }
        if let Some(path) = &args.svg {
            if let Err(c) = write_file(path, &svg::render_arrangement(&s.arrangement)) {
                return c;
            }
        }
        if let Some(path) = &args.decomposition {
            if let Err(c) = write_file(path, &decomposition::to_json(&s.nice)) {
                return c;
            }
        }
        if let Some(path) = &args.arrangement {
            if let Err(c) = write_file(path, &arrangement::to_json(&s.arrangement)) {
                return c;
            }
        }
    } else if args.witness.is_some() || args.svg.is_some() || args.decomposition.is_some() || args.arrangement.is_some() {
        eprintln!("no arrangement was built; artifact files not written");
    }

    report["timings"] = serde_json::to_value(&analysis.timings).expect("timings serialize");
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
    eprintln!("{}", summary(&analysis));
    code
}

fn verdict_word(w: &Option<GlobalLayering>) -> &'static str {
    if w.is_some() {
        "foldable"
    } else {
        "infeasible"
    }
}

fn cross_check(args: &CrossArgs) -> ExitCode {
    let mode = args.mode.mode();
    let opts = Options { mode, threads: args.threads.max(1) };
    let analysis = match load(&args.file, &opts) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let Some(s) = &analysis.solved else {
        emit("agree: not locally flat-foldable");
        return ExitCode::from(analysis.verdict.exit_code() as u8);
    };
    let dp = &s.outcome.witness;
    match fold_dp::oracle_solve(&s.arrangement, mode, args.oracle_budget) {
        Err(OracleError::BudgetExceeded { needed, budget }) => {
            emit("oracle skipped (budget)");
            eprintln!("{needed} layering combinations exceed the budget of {budget}");
            ExitCode::SUCCESS
        }
        Ok(oracle) => {
            let agree = dp.is_some() == oracle.is_some();
            if agree {
                emit(&format!("agree: {}", verdict_word(dp)));
            } else {
                emit(&format!("disagree: dp {}, oracle {}", verdict_word(dp), verdict_word(&oracle)));
            }
            emit(&format!("dp witness:\n{}", witness_json(dp.as_ref()).trim_end()));
            emit(&format!("oracle witness:\n{}", witness_json(oracle.as_ref()).trim_end()));
            if agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_INTERNAL)
            }
        }
    }
}

fn parse_labels(text: &str) -> Result<Vec<Label>, String> {
    text.chars()
        .map(|c| match c.to_ascii_uppercase() {
            'M' => Ok(Label::Mountain),
            'V' => Ok(Label::Valley),
            'U' => Ok(Label::Unassigned),
            other => Err(format!("unknown label letter {other:?}")),
        })
        .collect()
}

fn gen(args: &GenArgs) -> ExitCode {
    let labels = match args.labels.as_deref().map(parse_labels).transpose() {
        Ok(l) => l,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let kind = match args.kind {
        GenKind::Accordion => Kind::Accordion { n: args.n },
        GenKind::MapGrid => Kind::MapGrid { rows: args.rows, cols: args.cols },
        GenKind::SingleVertex => Kind::SingleVertex { angles: args.angles.clone(), labels },
        GenKind::RandomVertex => Kind::RandomVertex { degree: args.degree, labels },
        GenKind::SimpleFold => Kind::SimpleFold { k: args.folds },
    };
    let input = match testgen::generate(&GenSpec { seed: args.seed, kind, flips: args.flips }) {
        Ok(i) => i,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let json = input.to_fold_json() + "\n";
    match &args.output {
        Some(path) => match write_file(path, &json) {
            Ok(()) => ExitCode::SUCCESS,
            Err(c) => c,
        },
        None => {
            let _ = std::io::stdout().lock().write_all(json.as_bytes());
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational { ExitCode::SUCCESS } else { ExitCode::from(EXIT_INPUT) };
        }
    };
    match &cli.command {
        Command::Check(a) => check(a),
        Command::CrossCheck(a) => cross_check(a),
        Command::Gen(a) => gen(a),
    }
}
