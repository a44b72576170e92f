//! Command-line termination prover for TPDB-style rewrite systems.
//!
//! `subcrit prove` answers YES / MAYBE / TIMEOUT for one system and
//! prints the proof; `subcrit bench` runs a directory of systems and
//! prints a per-mode summary table plus optional per-file CSV.
//!
//! Exit codes for `prove`: 0 YES, 1 MAYBE, 2 TIMEOUT, 3 usage error,
//! 4 unreadable input, 5 parse error, 6 internal error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use subcrit_core::dp::dependency_pairs;
use subcrit_core::prove::{prove_termination, ProofTree, SearchMode, Verdict};
use subcrit_core::smt::SolverHandle;
use subcrit_core::tpdb::parse_trs;
use subcrit_core::Trs;

/// Environment variable holding the default external solver command.
const SOLVER_ENV: &str = "SUBCRIT_SOLVER";

const EXIT_USAGE: u8 = 3;
const EXIT_UNREADABLE: u8 = 4;
const EXIT_PARSE: u8 = 5;
const EXIT_INTERNAL: u8 = 6;

#[derive(Parser)]
#[command(
    name = "subcrit",
    version,
    about = "Termination prover for term rewrite systems based on argument projections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove termination of one .trs file.
    Prove {
        /// A rewrite system in TPDB syntax.
        file: PathBuf,
        /// Projection class to search, or 'all' to race the three.
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// 'internal', or an external SMT solver command reading SMT-LIB 2
        /// on stdin ('{file}' in the command is replaced by a script path).
        /// Defaults to $SUBCRIT_SOLVER, or the internal solver.
        #[arg(long)]
        solver: Option<String>,
        /// Budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Proof output format.
        #[arg(long, value_enum, default_value_t = ProofFormat::Text)]
        proof: ProofFormat,
    },
    /// Prove every .trs file in a directory and summarize per mode.
    Bench {
        /// Directory containing .trs files.
        dir: PathBuf,
        /// Modes to run (comma-separated); defaults to all four rows.
        #[arg(
            long = "mode",
            value_enum,
            value_delimiter = ',',
            default_values_t = vec![ModeArg::Simple, ModeArg::Recursive, ModeArg::Multi, ModeArg::All]
        )]
        modes: Vec<ModeArg>,
        /// Per-problem budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Solver selection, as for prove.
        #[arg(long)]
        solver: Option<String>,
        /// Write per-file results as CSV to this path ('-' for stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ModeArg {
    Simple,
    Recursive,
    Multi,
    All,
}

impl fmt::Display for ModeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModeArg::Simple => "simple",
            ModeArg::Recursive => "recursive",
            ModeArg::Multi => "multi",
            ModeArg::All => "all",
        };
        f.pad(s)
    }
}

impl From<ModeArg> for SearchMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Simple => SearchMode::Simple,
            ModeArg::Recursive => SearchMode::Recursive,
            ModeArg::Multi => SearchMode::Multi,
            ModeArg::All => SearchMode::All,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ProofFormat {
    Text,
    Json,
    None,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match cli.command {
        Command::Prove {
            file,
            mode,
            solver,
            timeout,
            proof,
        } => prove_command(&file, mode, solver, timeout, proof),
        Command::Bench {
            dir,
            modes,
            timeout,
            solver,
            csv,
        } => bench_command(&dir, &modes, timeout, solver, csv.as_deref()),
    }
}

fn budget_from_secs(timeout: f64) -> Result<Duration, String> {
    if !timeout.is_finite() || timeout <= 0.0 {
        return Err(format!(
            "--timeout must be a positive number of seconds, got {timeout}"
        ));
    }
    Ok(Duration::from_secs_f64(timeout))
}

fn resolve_solver(flag: Option<String>, timeout: Duration) -> SolverHandle {
    let choice = flag.or_else(|| std::env::var(SOLVER_ENV).ok());
    match choice.as_deref() {
        None | Some("internal") => SolverHandle::internal(),
        Some(command) => SolverHandle::external(command, timeout),
    }
}

fn read_system(path: &Path) -> Result<Trs, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read '{}': {e}", path.display());
            return Err(ExitCode::from(EXIT_UNREADABLE));
        }
    };
    match parse_trs(&text) {
        Ok(trs) => Ok(trs),
        Err(e) => {
            eprintln!("error: cannot parse '{}': {e}", path.display());
            Err(ExitCode::from(EXIT_PARSE))
        }
    }
}

fn prove_command(
    file: &Path,
    mode: ModeArg,
    solver: Option<String>,
    timeout: f64,
    proof: ProofFormat,
) -> ExitCode {
    let budget = match budget_from_secs(timeout) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let trs = match read_system(file) {
        Ok(trs) => trs,
        Err(code) => return code,
    };
    let handle = resolve_solver(solver, budget);
    let tree = match prove_termination(&trs, mode.into(), &handle, budget) {
        Ok(tree) => tree,
        Err(e) => {
            eprintln!("internal error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    println!("{}", tree.verdict);
    match proof {
        ProofFormat::None => {}
        ProofFormat::Text => print!("{}", tree.render_text()),
        ProofFormat::Json => println!("{}", tree.to_json_string()),
    }
    match tree.verdict {
        Verdict::Yes => ExitCode::SUCCESS,
        Verdict::Maybe => ExitCode::from(1),
        Verdict::Timeout => ExitCode::from(2),
    }
}

struct BenchRow {
    file: String,
    mode: ModeArg,
    verdict: Verdict,
    seconds: f64,
    pairs_total: usize,
    pairs_removed: usize,
}

fn bench_command(
    dir: &Path,
    modes: &[ModeArg],
    timeout: f64,
    solver: Option<String>,
    csv: Option<&Path>,
) -> ExitCode {
    let budget = match budget_from_secs(timeout) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) => {
            eprintln!("error: cannot read directory '{}': {e}", dir.display());
            return ExitCode::from(EXIT_UNREADABLE);
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "trs"))
        .collect();
    files.sort();

    let mut rows = Vec::new();
    for &mode in modes {
        for path in &files {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let start = Instant::now();
            let row = match std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|text| parse_trs(&text).map_err(|e| e.to_string()))
            {
                Err(msg) => {
                    eprintln!("warning: skipping '{name}': {msg}");
                    BenchRow {
                        file: name,
                        mode,
                        verdict: Verdict::Maybe,
                        seconds: start.elapsed().as_secs_f64(),
                        pairs_total: 0,
                        pairs_removed: 0,
                    }
                }
                Ok(trs) => {
                    let handle = resolve_solver(solver.clone(), budget);
                    match prove_termination(&trs, mode.into(), &handle, budget) {
                        Err(e) => {
                            eprintln!("warning: internal error on '{name}': {e}");
                            BenchRow {
                                file: name,
                                mode,
                                verdict: Verdict::Maybe,
                                seconds: start.elapsed().as_secs_f64(),
                                pairs_total: 0,
                                pairs_removed: 0,
                            }
                        }
                        Ok(tree) => BenchRow {
                            file: name,
                            mode,
                            verdict: tree.verdict,
                            seconds: start.elapsed().as_secs_f64(),
                            pairs_total: dependency_pairs(&trs).pairs.len(),
                            pairs_removed: removed_count(&tree),
                        },
                    }
                }
            };
            rows.push(row);
        }
    }

    print_table(modes, &rows);
    if let Some(csv_path) = csv {
        let csv_text = render_csv(&rows);
        if csv_path == Path::new("-") {
            print!("{csv_text}");
        } else if let Err(e) = std::fs::write(csv_path, csv_text) {
            eprintln!("error: cannot write '{}': {e}", csv_path.display());
            return ExitCode::from(EXIT_UNREADABLE);
        }
    }
    ExitCode::SUCCESS
}

fn removed_count(tree: &ProofTree) -> usize {
    tree.steps.iter().map(|s| s.removed.len()).sum()
}

fn print_table(modes: &[ModeArg], rows: &[BenchRow]) {
    println!(
        "{:<10} {:>5} {:>6} {:>8} {:>9}",
        "mode", "yes", "maybe", "timeout", "time(s)"
    );
    for &mode in modes {
        let of_mode = rows.iter().filter(|r| r.mode == mode);
        let mut yes = 0usize;
        let mut maybe = 0usize;
        let mut timeout = 0usize;
        let mut seconds = 0.0f64;
        for row in of_mode {
            match row.verdict {
                Verdict::Yes => yes += 1,
                Verdict::Maybe => maybe += 1,
                Verdict::Timeout => timeout += 1,
            }
            seconds += row.seconds;
        }
        println!("{mode:<10} {yes:>5} {maybe:>6} {timeout:>8} {seconds:>9.2}");
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("file,mode,verdict,seconds,pairs_total,pairs_removed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.3},{},{}\n",
            csv_field(&row.file),
            row.mode,
            row.verdict,
            row.seconds,
            row.pairs_total,
            row.pairs_removed
        ));
    }
    out
}
