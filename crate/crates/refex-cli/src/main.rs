//! `refex` — generate referring expressions, validate scene files, and run
//! counter-instrumented benchmarks.
//!
//! Exit codes are part of the contract: 0 on success, 1 on input or usage
//! errors, 2 when no distinguishing description exists for the requested
//! referent. Stdout carries only payload (the description or CSV);
//! everything diagnostic goes to stderr.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use refex::algorithms::{ensure_head_noun, Algorithm};
use refex::analysis::{run_benchmark, BenchSweep, SceneFamily};
use refex::io::{realize_surface, serialize_pairs, serialize_spl, SceneDocument};
use refex::kb::{GenerationTask, Scene, Severity};

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_GENERATION_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "refex",
    version,
    about = "Referring-expression generation over scene files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a referring expression for one entity of a scene.
    Generate {
        /// Scene file to load.
        #[arg(long)]
        scene: PathBuf,
        /// The intended referent's entity id.
        #[arg(long)]
        referent: String,
        /// Strategy to run.
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Output serialization.
        #[arg(long, value_enum, default_value_t = Format::Pairs)]
        format: Format,
        /// Contrast set override (comma-separated entity ids). Defaults to
        /// every other entity in the scene.
        #[arg(long, value_delimiter = ',')]
        contrast: Option<Vec<String>>,
    },
    /// Check a scene file against every model invariant.
    Validate {
        /// Scene file to check.
        scene: PathBuf,
    },
    /// Sweep seeded scenes and emit per-run counters as CSV.
    Bench {
        /// Attribute counts to sweep (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        na: Vec<u32>,
        /// Distractors per scene.
        #[arg(long, default_value_t = 8)]
        nd: u32,
        /// Algorithms to run (comma-separated). Defaults to all four.
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<AlgorithmArg>,
        /// Sweep seed; identical seeds give identical CSV bytes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenes per (n_a, algorithm) point.
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Scene family to draw from.
        #[arg(long, value_enum, default_value_t = FamilyArg::Uniform)]
        family: FamilyArg,
        /// Taxonomy depth for the uniform family.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Taxonomy branching for the uniform family.
        #[arg(long, default_value_t = 2)]
        branching: u32,
        /// Cap full-brevity searches at this description size.
        #[arg(long)]
        cap: Option<usize>,
        /// Report measured wall time instead of a fixed 0.000 (makes the
        /// CSV bytes nondeterministic).
        #[arg(long)]
        wall: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    FullBrevity,
    Greedy,
    LocalBrevity,
    Incremental,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::FullBrevity => Algorithm::FullBrevity,
            AlgorithmArg::Greedy => Algorithm::GreedyHeuristic,
            AlgorithmArg::LocalBrevity => Algorithm::LocalBrevity,
            AlgorithmArg::Incremental => Algorithm::Incremental,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pairs,
    Spl,
    Surface,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Uniform,
    Planted,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors by default; our contract reserves
            // 2 for generation failure, so remap
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    match cli.command {
        Command::Generate {
            scene,
            referent,
            algorithm,
            format,
            contrast,
        } => cmd_generate(&scene, &referent, algorithm.into(), format, contrast),
        Command::Validate { scene } => cmd_validate(&scene),
        Command::Bench {
            na,
            nd,
            algorithms,
            seed,
            trials,
            family,
            depth,
            branching,
            cap,
            wall,
        } => cmd_bench(
            na, nd, algorithms, seed, trials, family, depth, branching, cap, wall,
        ),
    }
}

fn load_scene(path: &PathBuf) -> Result<Scene, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Err(ExitCode::from(EXIT_INPUT_ERROR));
        }
    };
    match SceneDocument::parse(&text) {
        Ok(doc) => {
            for w in doc.warnings() {
                eprintln!("{}: warning: {w}", path.display());
            }
            Ok(doc.scene().clone())
        }
        Err(diagnostics) => {
            for d in diagnostics {
                eprintln!("{}: {d}", path.display());
            }
            Err(ExitCode::from(EXIT_INPUT_ERROR))
        }
    }
}

fn cmd_generate(
    path: &PathBuf,
    referent: &str,
    algorithm: Algorithm,
    format: Format,
    contrast: Option<Vec<String>>,
) -> ExitCode {
    if referent.is_empty() {
        eprintln!("--referent must name an entity");
        return ExitCode::from(EXIT_INPUT_ERROR);
    }
    let scene = match load_scene(path) {
        Ok(scene) => scene,
        Err(code) => return code,
    };
    let task = match contrast {
        None => GenerationTask::against_rest(&scene, referent.into()),
        Some(ids) => {
            // `--contrast ""` means the empty contrast set
            let contrast: BTreeSet<_> =
                ids.iter().filter(|s| !s.is_empty()).map(|s| s.as_str().into()).collect();
            GenerationTask::new(&scene, referent.into(), contrast)
        }
    };
    let task = match task {
        Ok(task) => task,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    let result = algorithm.run(&task);
    let Some(description) = result.description() else {
        println!("failure");
        return ExitCode::from(EXIT_GENERATION_FAILURE);
    };
    let description = ensure_head_noun(&task, description);
    let rendered = match format {
        Format::Pairs => serialize_pairs(&description),
        Format::Spl => serialize_spl(&description).expect("head noun ensured"),
        Format::Surface => realize_surface(&description).expect("head noun ensured"),
    };
    println!("{rendered}");
    ExitCode::SUCCESS
}

fn cmd_validate(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    match SceneDocument::parse(&text) {
        Ok(doc) => {
            for w in doc.warnings() {
                eprintln!("{}: warning: {w}", path.display());
            }
            // a fully parsed scene may still carry warnings; only hard
            // violations fail validation
            let errors = refex::kb::check_scene(doc.scene())
                .into_iter()
                .filter(|v| v.severity() == Severity::Error)
                .count();
            debug_assert_eq!(errors, 0, "parse succeeded despite hard violations");
            ExitCode::SUCCESS
        }
        Err(diagnostics) => {
            for d in diagnostics {
                eprintln!("{}: {d}", path.display());
            }
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    na: Vec<u32>,
    nd: u32,
    algorithms: Vec<AlgorithmArg>,
    seed: u64,
    trials: u32,
    family: FamilyArg,
    depth: u32,
    branching: u32,
    cap: Option<usize>,
    wall: bool,
) -> ExitCode {
    let family = match family {
        FamilyArg::Uniform => SceneFamily::Uniform {
            taxonomy_depth: depth,
            branching,
        },
        FamilyArg::Planted => SceneFamily::PlantedCover,
    };
    if family == SceneFamily::PlantedCover {
        if let Some(&bad) = na.iter().find(|&&n| n < 4) {
            eprintln!("--family planted needs --na values of at least 4 (got {bad})");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
        if nd < 3 {
            eprintln!("--family planted needs --nd of at least 3 (got {nd})");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    }
    if na.contains(&0) || nd == 0 {
        eprintln!("--na and --nd must be positive");
        return ExitCode::from(EXIT_INPUT_ERROR);
    }
    let algorithms: Vec<Algorithm> = if algorithms.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        algorithms.into_iter().map(Into::into).collect()
    };
    let sweep = BenchSweep {
        na_values: na,
        n_distractors: nd,
        algorithms,
        trials,
        seed,
        family,
        full_brevity_cap: cap,
    };
    print!("{}", run_benchmark(&sweep).to_csv(wall));
    ExitCode::SUCCESS
}
