use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use resha_core::analysis::AnalysisError;
use resha_core::parser::parse_named;
use resha_core::taxonomy::{candidate_ucas, candidate_uifs, CandidateOptions};
use resha_core::{analyze, export_exchange, export_graph, export_object, render_text, validate, AnalysisOptions, SystemModel};

#[derive(Parser)]
#[command(name = "resha", version, about = "Integrated fault trees with unsafe control actions and unsafe information flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model.
    Validate { file: PathBuf },
    /// List generated UCA and UIF candidates.
    Candidates {
        file: PathBuf,
        #[arg(long)]
        allow_all_uif_types: bool,
    },
    /// Build trees, compute cut sets and print the report.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Export trees or the report in a machine format.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Analyse only this top event.
    #[arg(long)]
    top: Option<String>,
    /// Largest cut-set order to keep.
    #[arg(long)]
    max_order: Option<usize>,
    /// Count mixed hardware/software cut sets as software cut sets.
    #[arg(long)]
    include_mixed: bool,
    /// Do not merge identical software events across divisions.
    #[arg(long)]
    no_ccf_unify: bool,
    /// Generate all four UIF types for every signal.
    #[arg(long)]
    allow_all_uif_types: bool,
    /// Write results to files in this directory instead of standard output.
    #[arg(long, env = "RESHA_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Dot graph description.
    Graph,
    /// Open-PSA model-exchange XML.
    Exchange,
    /// JSON report.
    Object,
}

/// Error carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => {
            let model = load(&file)?;
            let report = validate(&model);
            let name = file.display();
            for w in &report.warnings {
                eprintln!("{name}: warning[{}]: {}", w.code, w.message);
            }
            for e in &report.errors {
                eprintln!("{name}: error[{}]: {}", e.code, e.message);
            }
            if !report.is_ok() {
                return Err(Failure::validation(format!("{name}: {} error(s)", report.errors.len())));
            }
            println!(
                "{name}: ok ({} components, {} signals, {} top events, {} warnings)",
                model.components.len(),
                model.signals.len(),
                model.top_events.len(),
                report.warnings.len()
            );
            Ok(())
        }
        Command::Candidates { file, allow_all_uif_types } => {
            let model = load(&file)?;
            let opts = CandidateOptions { allow_all_uif_types };
            let mut out = String::from("UCA candidates\n");
            for c in model.components.iter().filter(|c| c.kind.has_control_authority()) {
                for u in candidate_ucas(&model, &c.id).unwrap_or_default() {
                    out.push_str(&format!("{}\t{}\t{}\t{}\n", u.uca_type, u.controller, u.control_action, u.description));
                }
            }
            out.push_str("\nUIF candidates\n");
            for c in &model.components {
                for u in candidate_uifs(&model, &c.id, opts).unwrap_or_default() {
                    out.push_str(&format!("{}\t{}\t{}\t{}\n", u.uif_type, u.owner, u.signal, u.description));
                }
            }
            print!("{out}");
            Ok(())
        }
        Command::Analyze { file, run, json } => {
            let model = load(&file)?;
            let analysis = analyze(&model, &options(&run)).map_err(analysis_failure)?;
            let (text, ext) = if json {
                (export_object(&analysis.report), "report.json")
            } else {
                (render_text(&analysis.report), "report.txt")
            };
            emit(run.out_dir.as_deref(), &file, ext, &text)
        }
        Command::Export { file, format, run } => {
            let model = load(&file)?;
            let analysis = analyze(&model, &options(&run)).map_err(analysis_failure)?;
            if let Format::Object = format {
                return emit(run.out_dir.as_deref(), &file, "report.json", &export_object(&analysis.report));
            }
            let (render, ext): (fn(&resha_core::FaultTree) -> String, &str) = match format {
                Format::Graph => (export_graph, "dot"),
                _ => (export_exchange, "xml"),
            };
            match &run.out_dir {
                Some(dir) => {
                    for t in &analysis.trees {
                        emit(Some(dir), &file, &format!("{}.{ext}", t.name), &render(t))?;
                    }
                    Ok(())
                }
                None => match analysis.trees.as_slice() {
                    [one] => emit(None, &file, ext, &render(one)),
                    _ => Err(Failure::usage(format!(
                        "{} has {} top events; pass --top or --out-dir",
                        file.display(),
                        analysis.trees.len()
                    ))),
                },
            }
        }
    }
}

fn options(run: &RunArgs) -> AnalysisOptions {
    AnalysisOptions {
        top: run.top.clone(),
        max_order: run.max_order,
        include_mixed: run.include_mixed,
        allow_all_uif_types: run.allow_all_uif_types,
        no_ccf_unify: run.no_ccf_unify,
    }
}

fn load(path: &Path) -> Result<SystemModel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_named(&path.display().to_string(), &text).map_err(|errors| {
        let lines: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
        Failure::validation(format!("{}\n{} parse error(s)", lines.join("\n"), errors.len()))
    })
}

fn analysis_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::Invalid(report) => {
            let lines: Vec<String> = report.errors.iter().map(|f| format!("error[{}]: {}", f.code, f.message)).collect();
            Failure::validation(lines.join("\n"))
        }
        AnalysisError::UnknownTopEvent(_) => Failure::usage(e.to_string()),
        other => Failure::validation(other.to_string()),
    }
}

/// Write `text` to `<dir>/<stem>.<suffix>` or to standard output.
fn emit(dir: Option<&Path>, input: &Path, suffix: &str, text: &str) -> Result<(), Failure> {
    match dir {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
            let path = dir.join(format!("{stem}.{suffix}"));
            fs::write(&path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}
