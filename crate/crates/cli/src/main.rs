//! `sbw`: command-line workbench for section Burnside rings of small groups.

mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(name = "sbw", version, about = "Exact computations in section Burnside rings of finite groups")]
pub struct Cli {
    /// Output format; tables render the same JSON.
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,
    /// Lift the group order cap (default 512, or SBW_MAX_ORDER).
    #[arg(long, global = true)]
    pub unsafe_order: bool,
    /// Largest order of the built-in catalog consulted when deciding
    /// reducedness through smaller groups.
    #[arg(long, global = true, default_value_t = 8)]
    pub seed_order: usize,
    #[command(subcommand)]
    pub command: Command,
}

/// Groups are given by name (`S3`, `C4xC2`, `D8`, `Q8`, `V4`), by a path to
/// group JSON, or by inline group JSON.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group summaries.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Conjugacy classes of sections.
    Sections {
        #[command(subcommand)]
        action: SectionsAction,
    },
    /// Composes two elements given as element JSON (paths or inline).
    Compose { left: String, right: String },
    /// Pair poset, Möbius function and the e/f idempotent identities.
    Idempotents {
        #[arg(long)]
        group: String,
    },
    /// Linkage classes of a group, or linked pairs between two groups.
    Linkage {
        #[arg(long)]
        group: String,
        #[arg(long)]
        with: Option<String>,
    },
    /// Γ-groups of pairs, with the comparison to outer automorphisms.
    GammaGroup {
        #[arg(long)]
        group: String,
        /// Index of the pair in the poset; all pairs when omitted.
        #[arg(long)]
        pair: Option<usize>,
    },
    /// Block decomposition of the covering algebra.
    Decompose {
        #[arg(long)]
        group: String,
    },
    /// Reducedness statuses and the essential quotient.
    Essential {
        #[arg(long)]
        group: String,
        /// Also compute the span of products through smaller groups.
        #[arg(long)]
        brute_force: bool,
    },
    /// Reduced pairs of all catalog groups, merged along linkage.
    Seeds {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
    /// Runs verification suites; exit status 1 when any check fails.
    Verify {
        /// Suites to run (repeatable); all when omitted.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// Seed of the randomized associativity triples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Builds, saves and shows group catalogs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupAction {
    Info { group: String },
}

#[derive(Subcommand, Debug)]
pub enum SectionsAction {
    /// Sections of `--group`, or of `--group x --right` when given.
    List {
        #[arg(long)]
        group: String,
        #[arg(long)]
        right: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    Build {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// Writes the catalog JSON to this path.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    Show { path: std::path::PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let (text, code) = commands::run(&cli, &argv);
    // A closed pipe downstream is not an error of the computation.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
