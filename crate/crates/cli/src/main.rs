use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use taydom_cli::commands::run_job;
use taydom_cli::job::{CliError, Command, JobSpec, Mode};
use taydom_cli::report::emit_report;

/// Taylor domination certificates, zero bounds, moment recurrences and the
/// acceptance batteries.
#[derive(Parser, Debug)]
#[command(name = "taydom", version)]
struct Args {
    /// Subcommand; may be omitted when `--job` is given.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Input document (JSON).
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Significant bits in float mode (above 53 uses a multiprecision
    /// float); bit count of the Abel oracle.
    #[arg(long)]
    precision: Option<u32>,
    /// Last index K.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Machine report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sequence CSV (`generate` writes it to stdout when neither `--out` nor
    /// `--csv` is given).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Certificate construction for `certify`.
    #[arg(long)]
    method: Option<String>,
    /// Criteria run by `suite`, comma separated.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    /// Case-count multiplier for `suite`.
    #[arg(long)]
    scale: Option<f64>,
    /// Read the whole job from a file; command-line flags override it.
    #[arg(long)]
    job: Option<PathBuf>,
    /// Write the resolved job to a file and continue.
    #[arg(long)]
    emit_job: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Result<(), CliError> {
    fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn resolve(a: &Args) -> Result<JobSpec, CliError> {
    let mut job = match &a.job {
        Some(p) => JobSpec::from_json(&read(p)?)?,
        None => JobSpec::new(a.command.ok_or_else(|| CliError::Schema("no command given".into()))?),
    };
    if let Some(c) = a.command {
        job.command = c;
    }
    if let Some(p) = &a.input {
        let text = read(p)?;
        let doc = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", p.display())))?;
        job.input = Some(p.clone());
        job.document = Some(doc);
    }
    if job.command.needs_document() && job.document.is_none() {
        return Err(CliError::Schema(format!("{} needs an input document", job.command.name())));
    }
    macro_rules! over {
        ($($f:ident),*) => { $( if a.$f.is_some() { job.$f = a.$f.clone(); } )* };
    }
    over!(out, csv, precision, horizon, method, scale);
    if let Some(m) = a.mode {
        job.mode = m;
    }
    if let Some(s) = a.seed {
        job.seed = s;
    }
    if !a.only.is_empty() {
        job.only = a.only.clone();
    }
    Ok(job)
}

fn run(a: &Args) -> Result<i32, (CliError, Option<PathBuf>)> {
    let job = resolve(a).map_err(|e| (e, a.out.clone()))?;
    let fail = |e: CliError| (e, job.out.clone());
    if let Some(p) = &a.emit_job {
        write(p, &job.to_json()).map_err(fail)?;
    }
    let outcome = run_job(&job, &mut |line| eprintln!("{line}")).map_err(fail)?;
    let (text, json) = emit_report(&outcome.report);
    if let Some(p) = &job.out {
        write(p, &json).map_err(fail)?;
    }
    match (&outcome.csv, &job.csv) {
        (Some(c), Some(p)) => write(p, c).map_err(fail)?,
        (Some(c), None) if job.command == Command::Generate && job.out.is_none() => print!("{c}"),
        _ => {}
    }
    if job.command != Command::Generate || job.out.is_some() || job.csv.is_some() {
        print!("{text}");
    }
    Ok(outcome.report.status.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err((e, out)) => {
            let diag = e.to_json();
            eprint!("{diag}");
            if let Some(p) = out {
                let _ = fs::write(p, &diag);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
