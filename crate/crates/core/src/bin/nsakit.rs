use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsakit::cli::{cmd_case_study, cmd_model_check, cmd_normalize, resolve_seed, CaseStudy, Caps, CheckInput, Exit, Outcome};

#[derive(Parser)]
#[command(name = "nsakit", version, about = "Normal forms, witnesses and case-study sweeps")]
struct Args {
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Cap overrides as key=value pairs: search, depth, max-depth, u, s.
    #[arg(long, global = true, default_value = "")]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a formula to normal form and print the trace.
    Normalize {
        file: PathBuf,
        /// JSON list of monotonicity annotations.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Run one of the numeric sweeps: cri, mct, gh, fan.
    CaseStudy {
        name: CaseStudy,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check rewrite steps against finite two-level models.
    ModelCheck {
        /// Trace JSON as written by `normalize --json`.
        #[arg(required_unless_present = "random")]
        trace: Option<PathBuf>,
        /// Directory of model JSON files; defaults to every model within the caps.
        #[arg(long)]
        models: Option<PathBuf>,
        /// Check this many seeded random rule instances instead of a trace.
        #[arg(long, conflicts_with = "trace")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_models(dir: &Path) -> Result<Vec<(String, String)>, String> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), read(p)?))).collect()
}

/// A trace file holds either a bare trace or a `normalize` report.
fn trace_json(src: &str) -> Result<String, String> {
    let v: serde_json::Value = serde_json::from_str(src).map_err(|e| format!("trace: {e}"))?;
    Ok(match v.get("trace") {
        Some(t) => t.to_string(),
        None => src.to_string(),
    })
}

fn run(args: Args) -> Result<Outcome, String> {
    let caps = args.caps;
    Ok(match args.command {
        Command::Normalize { file, annotations } => {
            let anns = annotations.as_deref().map(read).transpose()?;
            cmd_normalize(&read(&file)?, anns.as_deref(), caps)
        }
        Command::CaseStudy { name, seed } => cmd_case_study(name, resolve_seed(seed), caps),
        Command::ModelCheck { trace, models, random, seed } => {
            let models = models.as_deref().map(read_models).transpose()?;
            let seed = resolve_seed(seed);
            match (trace, random) {
                (Some(path), _) => cmd_model_check(CheckInput::Trace(&trace_json(&read(&path)?)?), models, seed, caps),
                (None, Some(n)) => cmd_model_check(CheckInput::Random(n), models, seed, caps),
                (None, None) => return Err("a trace file or --random N is required".into()),
            }
        }
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let json = args.json;
    match run(args) {
        Ok(out) => {
            if json {
                println!("{}", out.json());
            } else {
                println!("{}", out.summary);
            }
            ExitCode::from(out.exit.code() as u8)
        }
        Err(e) => {
            eprintln!("nsakit: {e}");
            ExitCode::from(Exit::Input.code() as u8)
        }
    }
}
