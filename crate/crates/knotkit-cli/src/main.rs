//! Command-line front end: validate and analyze diagrams, run the full
//! construction on one input, batch-run a directory as a census, and
//! export Seifert graphs as DOT.
//!
//! Exit codes: 0 for success (degenerate outcomes like torus knots and
//! unknots included — they are expected branches, not failures), 1 for
//! input errors, 2 for internal invariant violations (bugs).

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use knotkit::augment::{verify_roundtrip, RoundtripTarget, SurgeryInstruction};
use knotkit::bounds::GenusOneClass;
use knotkit::gen::random_knot;
use knotkit::pipeline::{
    run_pipeline, NonHyperbolicReport, PipelineBundle, PipelineError, PipelineOutcome,
};
use knotkit::reduce::ReduceError;
use knotkit::seifert::Seifert;
use knotkit::{Diagram, Edge};

#[derive(Parser)]
#[command(name = "knotkit", version, about = "Knot diagram toolkit", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a PD file and report its Seifert structure and genus.
    Analyze {
        /// PD text file; an empty file is the zero-crossing unknot.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the full construction and emit the artifact bundle.
    Pipeline {
        /// PD text file holding one knot diagram.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Which knot the printed surgery manifest rebuilds.
        #[arg(long, value_enum, default_value_t = Target::Kprime)]
        target: Target,
        /// Skip the even-region refinement of the augmented link.
        #[arg(long)]
        no_improve: bool,
        /// Keep manifest lines whose filling is trivial (coefficient 0).
        #[arg(long)]
        keep_zero_loops: bool,
    },
    /// Run every .pd file in a directory and emit one report row each.
    Census {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Roundtrip-verify the surgery manifest against this knot.
        #[arg(long, value_enum, default_value_t = Target::Kprime)]
        target: Target,
        #[arg(long)]
        no_improve: bool,
        /// Also run this many seeded random knot diagrams.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Crossing budget for the random diagrams.
        #[arg(long, default_value_t = 16)]
        max_crossings: usize,
    },
    /// Print the Seifert graph of a diagram in DOT form.
    Graph { input: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pd,
    Dot,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// The input knot, crossing changes undone.
    K,
    /// The alternating knot the construction factored.
    Kprime,
}

impl Target {
    fn roundtrip(self) -> RoundtripTarget {
        match self {
            Target::K => RoundtripTarget::Input,
            Target::Kprime => RoundtripTarget::Alternating,
        }
    }
}

/// Failures that end the run, sorted by whose fault they are.
enum Failure {
    /// Bad path, unparsable file, or a diagram the command cannot take.
    Input(String),
    /// A pipeline stage broke its own contract.
    Internal(String),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze { input, format } => cmd_analyze(&input, format),
        Command::Pipeline { input, format, target, no_improve, keep_zero_loops } => {
            cmd_pipeline(&input, format, target, no_improve, keep_zero_loops)
        }
        Command::Census { dir, format, target, no_improve, random, seed, max_crossings } => {
            cmd_census(&dir, format, target, no_improve, random, seed, max_crossings)
        }
        Command::Graph { input } => {
            let d = load(&input)?;
            emit_text(&Seifert::new(&d).to_dot(&d))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(path: &Path) -> Result<Diagram, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Diagram::parse_named(&text, name)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Everything a failed pipeline means for exit codes: a non-knot input is
/// the caller's problem, anything else escaping `run_pipeline` is a bug.
fn classify(e: PipelineError) -> Failure {
    match e {
        PipelineError::Reduce(ReduceError::NotKnot(n)) => {
            Failure::Input(format!("expected a knot, got {n} components"))
        }
        other => Failure::Internal(other.to_string()),
    }
}

#[derive(Serialize)]
struct GraphEdgeRow {
    crossing: usize,
    circles: (usize, usize),
    sign: i8,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    name: Option<&'a str>,
    crossings: usize,
    components: usize,
    alternating: bool,
    writhe: i32,
    seifert_circles: usize,
    genus: u32,
    circles: &'a [Vec<Edge>],
    graph: Vec<GraphEdgeRow>,
}

fn cmd_analyze(input: &Path, format: Format) -> Result<ExitCode, Failure> {
    let d = load(input)?;
    let s = Seifert::new(&d);
    match format {
        Format::Json => {
            let graph = s
                .graph()
                .edges
                .iter()
                .map(|ge| GraphEdgeRow { crossing: ge.crossing, circles: ge.circles, sign: ge.sign })
                .collect();
            let report = AnalyzeReport {
                name: d.name(),
                crossings: d.n_crossings(),
                components: d.n_components(),
                alternating: d.is_alternating(),
                writhe: d.writhe(),
                seifert_circles: s.n_circles(),
                genus: s.genus(),
                circles: s.circles(),
                graph,
            };
            emit_json(&report)?;
        }
        Format::Dot => emit_text(&s.to_dot(&d))?,
        Format::Pd => emit_text(&d.to_pd_string())?,
        Format::Csv => return Err(Failure::Input("csv output is for census runs".into())),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PipelineReport<'a> {
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    degenerate: Option<&'a NonHyperbolicReport>,
    /// Manifest for the requested target, trivial fillings filtered
    /// unless they were asked for.
    #[serde(skip_serializing_if = "Option::is_none")]
    surgery: Option<Vec<&'a SurgeryInstruction>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bundle: Option<&'a PipelineBundle>,
}

fn cmd_pipeline(
    input: &Path,
    format: Format,
    target: Target,
    no_improve: bool,
    keep_zero_loops: bool,
) -> Result<ExitCode, Failure> {
    let d = load(input)?;
    match run_pipeline(&d, !no_improve).map_err(classify)? {
        PipelineOutcome::NonHyperbolic(report) => {
            // A typed report regardless of format: there is no link to print.
            emit_json(&PipelineReport {
                outcome: "degenerate",
                degenerate: Some(&report),
                surgery: None,
                bundle: None,
            })?;
        }
        PipelineOutcome::Reduced(bundle) => match format {
            Format::Json => {
                let manifest = match target {
                    Target::K => &bundle.surgery_input,
                    Target::Kprime => &bundle.surgery_alternating,
                };
                let surgery = manifest
                    .iter()
                    .filter(|s| keep_zero_loops || s.coefficient != 0)
                    .collect();
                emit_json(&PipelineReport {
                    outcome: "reduced",
                    degenerate: None,
                    surgery: Some(surgery),
                    bundle: Some(&bundle),
                })?;
            }
            Format::Pd => emit_text(&bundle.final_link().diagram.to_pd_string())?,
            Format::Dot => {
                let link = &bundle.final_link().diagram;
                emit_text(&Seifert::new(link).to_dot(link))?;
            }
            Format::Csv => return Err(Failure::Input("csv output is for census runs".into())),
        },
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CensusRow {
    name: String,
    /// reduced | unknot | torus | error
    outcome: String,
    crossings_input: Option<usize>,
    genus: Option<u32>,
    n_fat: Option<usize>,
    n_arcs: Option<usize>,
    crossings_reduced: Option<usize>,
    crossings_link: Option<usize>,
    crossings_improved: Option<usize>,
    bounds_hold: Option<bool>,
    roundtrip: Option<bool>,
    classification: Option<String>,
    volume_bound_raw: Option<f64>,
    volume_bound_linear: Option<f64>,
    error: Option<String>,
}

impl CensusRow {
    fn empty(name: String, outcome: &str) -> CensusRow {
        CensusRow {
            name,
            outcome: outcome.to_string(),
            crossings_input: None,
            genus: None,
            n_fat: None,
            n_arcs: None,
            crossings_reduced: None,
            crossings_link: None,
            crossings_improved: None,
            bounds_hold: None,
            roundtrip: None,
            classification: None,
            volume_bound_raw: None,
            volume_bound_linear: None,
            error: None,
        }
    }
}

fn class_label(c: &GenusOneClass) -> String {
    match c {
        GenusOneClass::TwoBridge(a, b) => format!("two-bridge({a},{b})"),
        GenusOneClass::OddPretzel(qs) => {
            let parts: Vec<String> = qs.iter().map(usize::to_string).collect();
            format!("pretzel({})", parts.join(","))
        }
        GenusOneClass::Unrecognized { .. } => "unrecognized".to_string(),
    }
}

enum CensusInput {
    File(PathBuf),
    Generated(Diagram),
}

fn census_row(name: String, input: CensusInput, improve: bool, target: Target) -> CensusRow {
    let d = match input {
        CensusInput::Generated(d) => d,
        CensusInput::File(path) => match load(&path) {
            Ok(d) => d,
            Err(Failure::Input(msg) | Failure::Internal(msg)) => {
                let mut row = CensusRow::empty(name, "error");
                row.error = Some(msg);
                return row;
            }
        },
    };
    let mut row = CensusRow::empty(name, "");
    row.crossings_input = Some(d.n_crossings());
    match run_pipeline(&d, improve) {
        Err(e) => {
            row.outcome = "error".to_string();
            row.error = Some(match classify(e) {
                Failure::Input(msg) => msg,
                Failure::Internal(msg) => format!("internal: {msg}"),
            });
        }
        Ok(PipelineOutcome::NonHyperbolic(report)) => {
            use knotkit::pipeline::NonHyperbolicOutcome::*;
            row.outcome = match report.outcome {
                Unknot => "unknot".to_string(),
                TorusChain { crossings } => {
                    row.crossings_reduced = Some(crossings);
                    "torus".to_string()
                }
            };
        }
        Ok(PipelineOutcome::Reduced(b)) => {
            row.outcome = "reduced".to_string();
            row.genus = Some(b.bounds.genus);
            row.n_fat = Some(b.bounds.n_fat);
            row.n_arcs = Some(b.bounds.n_arcs);
            row.crossings_reduced = Some(b.bounds.crossings_reduced);
            row.crossings_link = Some(b.bounds.crossings_link);
            row.crossings_improved = Some(b.bounds.crossings_improved);
            row.bounds_hold = Some(b.bounds.all_bounds_hold());
            row.volume_bound_raw = Some(b.bounds.volume_bound_raw);
            row.volume_bound_linear = Some(b.bounds.volume_bound_linear);
            row.classification = b.classification.as_ref().map(class_label);
            match verify_roundtrip(&b.record, b.final_link(), b.final_ledger(), target.roundtrip())
            {
                Ok(ok) => row.roundtrip = Some(ok),
                Err(e) => {
                    row.outcome = "error".to_string();
                    row.error = Some(format!("internal: roundtrip check failed to run: {e}"));
                }
            }
        }
    }
    row
}

fn cmd_census(
    dir: &Path,
    format: Format,
    target: Target,
    no_improve: bool,
    random: Option<usize>,
    seed: u64,
    max_crossings: usize,
) -> Result<ExitCode, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pd"))
        .collect();
    paths.sort();

    let mut inputs: Vec<(String, CensusInput)> = paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            (name, CensusInput::File(p))
        })
        .collect();
    if let Some(n) = random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..n {
            let d = random_knot(&mut rng, max_crossings.max(3));
            inputs.push((format!("random-{i:05}"), CensusInput::Generated(d)));
        }
    }

    let improve = !no_improve;
    let rows: Vec<CensusRow> = inputs
        .into_par_iter()
        .map(|(name, input)| census_row(name, input, improve, target))
        .collect();

    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row).map_err(|e| Failure::Internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
            let text = String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))?;
            emit_text(&text)?;
        }
        Format::Json => emit_json(&rows)?,
        Format::Pd | Format::Dot => {
            return Err(Failure::Input("census emits csv or json rows".into()))
        }
    }

    // Violated bounds and failed roundtrips are bugs by construction;
    // they outrank bad input files in the exit code.
    let internal = rows.iter().any(|r| {
        r.bounds_hold == Some(false)
            || r.roundtrip == Some(false)
            || r.error.as_deref().is_some_and(|e| e.starts_with("internal:"))
    });
    let input_errors = rows.iter().any(|r| r.outcome == "error");
    Ok(if internal {
        ExitCode::from(2)
    } else if input_errors {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

/// Write to stdout, treating a closed pipe (`head`, `less` quit early) as
/// normal termination rather than an error.
fn emit_text(text: &str) -> Result<(), Failure> {
    if text.is_empty() {
        return Ok(());
    }
    let mut out = io::stdout().lock();
    let outcome = out
        .write_all(text.as_bytes())
        .and_then(|()| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .and_then(|()| out.flush());
    match outcome {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::Internal(e.to_string())),
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    emit_text(&text)
}
