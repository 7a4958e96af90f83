//! Command-line driver: identity suites and experiment scans written as CSV or JSON lines.

pub mod commands;
pub mod table;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use commands::{Outcome, RunSpec};
pub use table::{Cell, Table};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QFOCK_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }

    pub fn render(self, t: &Table) -> Vec<u8> {
        match self {
            Format::Csv => t.to_csv(),
            Format::Jsonl => t.to_jsonl(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qfock", version, about = "Numerics for q-deformed Fock spaces and q-circular systems")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory for the result file and manifest.json; falls back to $QFOCK_OUTPUT_DIR.
    /// Without either, only standard output is written.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Run(RunSpec),
    /// Re-run the command recorded in a manifest file.
    Replay { manifest: PathBuf },
}

/// Everything needed to reproduce a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: RunSpec,
    pub version: String,
    pub seed: u64,
    pub timestamp: String,
    pub format: Format,
}

impl RunManifest {
    pub fn new(spec: RunSpec, format: Format) -> Self {
        Self {
            command: spec.name().to_string(),
            seed: spec.seed(),
            parameters: spec,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            format,
        }
    }

    /// Hex prefix of the SHA-256 of the manifest with its timestamp blanked.
    pub fn hash(&self) -> String {
        let mut m = self.clone();
        m.timestamp.clear();
        let bytes = serde_json::to_vec(&m).expect("manifest serializes");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}.{}", self.command, self.hash(), self.format.extension())
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(qfock_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qfock_core::Error> for CliError {
    fn from(e: qfock_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// 2 for bad input, 1 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(qfock_core::Error::Numerical(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Result of one invocation: the rendered table, where it was written, and whether all checks held.
#[derive(Debug)]
pub struct Report {
    pub manifest: RunManifest,
    pub bytes: Vec<u8>,
    pub path: Option<PathBuf>,
    pub passed: bool,
}

pub fn run_manifest(manifest: RunManifest, output_dir: Option<&Path>) -> Result<Report, CliError> {
    let outcome = manifest.parameters.execute()?;
    let bytes = manifest.format.render(&outcome.table);
    let path = match output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(manifest.file_name());
            write_atomic(&path, &bytes)?;
            let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
            write_atomic(&dir.join("manifest.json"), &json)?;
            log::info!("wrote {}", path.display());
            Some(path)
        }
        None => None,
    };
    Ok(Report { manifest, bytes, path, passed: outcome.passed })
}

pub fn run(cli: Cli) -> Result<Report, CliError> {
    let dir = cli.output_dir.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from));
    let manifest = match cli.command {
        Command::Run(spec) => RunManifest::new(spec, cli.format),
        Command::Replay { manifest } => {
            let text = fs::read_to_string(&manifest)?;
            let mut m: RunManifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", manifest.display())))?;
            m.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
            m
        }
    };
    run_manifest(manifest, dir.as_deref())
}

/// Parses `args`, runs the command, prints the table to `out` and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(report) => {
            if out.write_all(&report.bytes).and_then(|_| out.flush()).is_err() {
                return 1;
            }
            if let Some(p) = &report.path {
                eprintln!("wrote {}", p.display());
            }
            if report.passed {
                0
            } else {
                eprintln!("error: at least one check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
