//! Command-line interface: model checking, team enumeration, maximal
//! subteams, reduction instance generation and a randomized self-test.
//!
//! Exit codes: 0 success (solution sets may be empty), 1 usage error,
//! 2 parse error, 3 resource cap exceeded, 4 self-test mismatch.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use teamlog::checker::{self, CheckError, EvalConfig};
use teamlog::corpus::{self, CorpusSpec};
use teamlog::enumerate::{self, Engine, EnumError, Mode};
use teamlog::io;
use teamlog::maxsub::{self, MaxsubError};
use teamlog::oracles::{BruteOracles, OracleError};
use teamlog::reductions::{self, ReductionError};
use teamlog::reference::{self, ReferenceConfig, ReferenceError};
use teamlog::team::TeamError;
use teamlog::{Formula, Structure, Team};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "teamlog",
    version,
    about = "Team-logic model checking and enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a nonempty team satisfies a formula.
    Check(InstanceArgs),
    /// Enumerate satisfying teams, one canonical team per line.
    Enumerate {
        #[command(flatten)]
        input: FormulaArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Append a delay-statistics summary after the solutions.
        #[arg(long)]
        stats: bool,
    },
    /// Print the maximal satisfying subteam of a team (inclusion fragment).
    Maxsubteam(InstanceArgs),
    /// Reduction instance generators.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Run the randomized engine-equivalence corpus.
    Selftest {
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        instances: usize,
    },
}

#[derive(Args)]
struct FormulaArgs {
    /// Structure file.
    #[arg(long)]
    structure: PathBuf,
    /// Formula file.
    #[arg(long)]
    formula: PathBuf,
}

#[derive(Args)]
struct InstanceArgs {
    #[command(flatten)]
    input: FormulaArgs,
    /// Team file.
    #[arg(long)]
    team: PathBuf,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Independent set to weight-bounded positive 2CNF (with apex vertex).
    Is2cnf {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// CNF to a relational structure plus satisfiability or myopic sentence.
    Cnf2struct {
        #[arg(long)]
        cnf: PathBuf,
        /// Emit the clause-satisfaction sentence (default).
        #[arg(long, conflicts_with = "myopic")]
        chi: bool,
        /// Emit the myopic sentence (requires a dual-Horn CNF).
        #[arg(long)]
        myopic: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Submax,
    Submin,
    Cardmax,
    Cardmin,
}

impl From<ModeArg> for Mode {
    fn from(mode: ModeArg) -> Mode {
        match mode {
            ModeArg::All => Mode::All,
            ModeArg::Submax => Mode::SubsetMax,
            ModeArg::Submin => Mode::SubsetMin,
            ModeArg::Cardmax => Mode::CardMax,
            ModeArg::Cardmin => Mode::CardMin,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EngineArg {
    Auto,
    Inclusion,
    Flashlight,
    Reference,
}

impl From<EngineArg> for Engine {
    fn from(engine: EngineArg) -> Engine {
        match engine {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Inclusion => Engine::Inclusion,
            EngineArg::Flashlight => Engine::Flashlight,
            EngineArg::Reference => Engine::Reference,
        }
    }
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

trait IntoFailure {
    fn exit_code(&self) -> u8;
}

impl IntoFailure for CheckError {
    fn exit_code(&self) -> u8 {
        match self {
            CheckError::ResourceExceeded { .. } => EXIT_RESOURCE,
            CheckError::Team(TeamError::Capacity { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

impl IntoFailure for EnumError {
    fn exit_code(&self) -> u8 {
        match self {
            EnumError::Oracle(e) => e.exit_code(),
            EnumError::Maxsub(e) => e.exit_code(),
            EnumError::Check(e) => e.exit_code(),
            EnumError::Reference(e) => e.exit_code(),
            EnumError::Team(TeamError::Capacity { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

impl IntoFailure for OracleError {
    fn exit_code(&self) -> u8 {
        match self {
            OracleError::CandidateCapExceeded { .. } => EXIT_RESOURCE,
            OracleError::Team(TeamError::Capacity { .. }) => EXIT_RESOURCE,
            OracleError::Check(e) => e.exit_code(),
            _ => EXIT_USAGE,
        }
    }
}

impl IntoFailure for MaxsubError {
    fn exit_code(&self) -> u8 {
        match self {
            MaxsubError::BruteCapExceeded { .. } => EXIT_RESOURCE,
            MaxsubError::Team(TeamError::Capacity { .. }) => EXIT_RESOURCE,
            MaxsubError::Check(e) => e.exit_code(),
            _ => EXIT_USAGE,
        }
    }
}

impl IntoFailure for ReferenceError {
    fn exit_code(&self) -> u8 {
        match self {
            ReferenceError::CapExceeded { .. } | ReferenceError::BudgetExceeded { .. } => {
                EXIT_RESOURCE
            }
            ReferenceError::Check(e) => e.exit_code(),
            ReferenceError::Team(TeamError::Capacity { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

fn fail<E: IntoFailure + std::fmt::Display>(e: E) -> Failure {
    Failure::new(e.exit_code(), e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load_instance(args: &FormulaArgs) -> Result<(Structure, Formula), Failure> {
    let structure = io::parse_structure_file(&read_file(&args.structure)?)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", args.structure.display())))?;
    let formula_text = read_file(&args.formula)?;
    let formula = Formula::parse(formula_text.trim(), structure.vocabulary())
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", args.formula.display())))?;
    Ok((structure, formula))
}

fn load_team(path: &Path, structure: &Structure) -> Result<Team, Failure> {
    io::parse_team_file(&read_file(path)?, structure)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check(args) => {
            let (structure, formula) = load_instance(&args.input)?;
            let team = load_team(&args.team, &structure)?;
            let sat = checker::ver_team(&structure, &team, &formula, &EvalConfig::default())
                .map_err(fail)?;
            println!("{}", if sat { "sat" } else { "unsat" });
            Ok(())
        }
        Command::Enumerate {
            input,
            mode,
            engine,
            stats,
        } => {
            let (structure, formula) = load_instance(&input)?;
            let oracles = BruteOracles::new(&structure, &formula).map_err(fail)?;
            let mut stream =
                enumerate::stream(&structure, &formula, mode.into(), engine.into(), &oracles)
                    .map_err(fail)?;
            for item in &mut stream {
                let team = item.map_err(fail)?;
                println!("{team}");
            }
            if stats {
                let stats = stream.stats();
                println!("# outputs: {}", stats.outputs());
                println!("# max gap steps: {}", stats.max_step_gap());
                println!("# mean gap steps: {:.3}", stats.mean_step_gap());
                println!("# max gap oracle calls: {}", stats.max_oracle_gap());
                println!("# mean gap oracle calls: {:.3}", stats.mean_oracle_gap());
            }
            Ok(())
        }
        Command::Maxsubteam(args) => {
            let (structure, formula) = load_instance(&args.input)?;
            let team = load_team(&args.team, &structure)?;
            let max = maxsub::max_subteam(&structure, &team, &formula).map_err(fail)?;
            println!("{max}");
            Ok(())
        }
        Command::Reduce(reduce) => run_reduce(reduce),
        Command::Selftest { seed, instances } => run_selftest(seed, instances),
    }
}

fn run_reduce(command: ReduceCommand) -> Result<(), Failure> {
    match command {
        ReduceCommand::Is2cnf { graph, k } => {
            let graph = io::parse_graph_file(&read_file(&graph)?)
                .map_err(|e| Failure::new(EXIT_PARSE, e))?;
            let (augmented, k) = reductions::is_to_is_star(&graph, k);
            let (cnf, bound) = reductions::is_star_to_mzdh(&augmented, k);
            println!(
                "c independent-set instance: {} vertices with apex, k = {k}",
                augmented.vertices()
            );
            println!("c weight bound: {bound}");
            print!("{}", io::format_dimacs(&cnf));
            Ok(())
        }
        ReduceCommand::Cnf2struct {
            cnf,
            chi: _,
            myopic,
        } => {
            let cnf =
                io::parse_dimacs(&read_file(&cnf)?).map_err(|e| Failure::new(EXIT_PARSE, e))?;
            let (structure, sentence) = if myopic {
                let (structure, sentence, _) = reductions::mzdh_to_rel(&cnf, 0)
                    .map_err(|e| Failure::new(reduction_exit(&e), e))?;
                (structure, sentence)
            } else {
                let structure = reductions::encode_cnf(&cnf)
                    .map_err(|e| Failure::new(reduction_exit(&e), e))?;
                (structure, reductions::chi_sentence())
            };
            print!("{}", io::format_structure(&structure));
            for element in 0..structure.universe_size() {
                println!("# element {element} = {}", structure.label(element));
            }
            println!("# sentence: {sentence}");
            Ok(())
        }
    }
}

fn reduction_exit(e: &ReductionError) -> u8 {
    match e {
        ReductionError::CandidateCapExceeded { .. } => EXIT_RESOURCE,
        _ => EXIT_PARSE,
    }
}

fn run_selftest(seed: u64, instances: usize) -> Result<(), Failure> {
    let spec = CorpusSpec {
        seed,
        instances,
        ..CorpusSpec::default()
    };
    let corpus = corpus::generate(&spec);
    let cfg = ReferenceConfig {
        step_budget: 100_000_000,
        ..ReferenceConfig::default()
    };
    let mut mismatches = 0usize;
    let mut runs = 0usize;
    for instance in &corpus {
        let a = &instance.structure;
        let f = &instance.formula;
        let expected = reference::brute_solutions(a, f, &cfg).map_err(fail)?;
        let oracles = BruteOracles::new(a, f).map_err(fail)?;
        let mut engines = vec![Engine::Flashlight];
        if f.atoms().within(teamlog::AtomSet::INC) {
            engines.push(Engine::Inclusion);
        }
        let mut instance_ok = true;
        for engine in engines {
            for mode in Mode::ALL_MODES {
                if engine == Engine::Inclusion && mode == Mode::CardMin {
                    continue;
                }
                let stream = enumerate::stream(a, f, mode, engine, &oracles).map_err(fail)?;
                let mut produced: BTreeSet<Team> = BTreeSet::new();
                for item in stream {
                    let team = item.map_err(fail)?;
                    if !produced.insert(team.clone()) {
                        println!(
                            "instance {:>3} {engine:?} {mode:?}: DUPLICATE {team}",
                            instance.id
                        );
                        instance_ok = false;
                    }
                }
                runs += 1;
                if &produced != expected.for_mode(mode) {
                    println!(
                        "instance {:>3} {engine:?} {mode:?}: MISMATCH for formula {f} (n={})",
                        instance.id,
                        a.universe_size()
                    );
                    instance_ok = false;
                }
            }
        }
        if !instance_ok {
            mismatches += 1;
        }
        println!(
            "instance {:>3} [{} n={}] {}",
            instance.id,
            instance.fragment.name(),
            a.universe_size(),
            if instance_ok { "ok" } else { "FAILED" }
        );
    }
    println!(
        "selftest: {} instances, {runs} engine-mode runs, {mismatches} mismatching instances (seed {seed:#x})",
        corpus.len()
    );
    if mismatches > 0 {
        Err(Failure::new(
            EXIT_MISMATCH,
            format!("{mismatches} instances mismatched"),
        ))
    } else {
        Ok(())
    }
}
