//! Command-line front end: parses rule, configuration, and subshift files,
//! runs simulations and bounded probes, renders spacetime slices as text,
//! and reports results with a stable exit-code contract so scripts and test
//! harnesses can drive it directly.
//!
//! Exit codes: 0 verdict `Holds` or normal completion, 1 verdict `Fails`
//! (witness printed), 2 verdict `Unknown`, 3 file not found, 4 parse error
//! (message carries the line number), 5 enumeration guard exceeded,
//! 6 dimension mismatch, 7 unstable background symbol, 8 usage error,
//! 9 any other error.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use quiesce_core::automaton::{parse_rule, write_rule};
use quiesce_core::config::{parse_config, write_config};
use quiesce_core::subshift::parse_sft;
use quiesce_core::{
    check_disjoint_evolution, components_1d, cycle_analysis, deep_preimage, fixture, fixture_seed,
    fold, language_1d, mortality_probe, nilpotency_within, tower_confinement,
    uniform_visit_bound, Alphabet, CellVector, CellularAutomaton, Config, Error, Guards,
    ProbeReport, Symbol, Verdict, VisitMode,
};

/// Writes to stdout, exiting with the conventional 128+SIGPIPE status when
/// the reader has closed the pipe (`quiesce ... | head`) instead of
/// panicking on the failed write.
fn emit(args: fmt::Arguments<'_>) {
    if std::io::stdout().write_fmt(args).is_err() {
        std::process::exit(141);
    }
}

macro_rules! out {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        emit(format_args!($($arg)*));
        emit(format_args!("\n"));
    }};
}

#[derive(Parser)]
#[command(
    name = "quiesce",
    about = "Simulate and probe cellular automata with a quiescent background",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RuleArg {
    /// Rule file, fixture name, or `shift-left`
    #[arg(long)]
    rule: String,
}

#[derive(Args)]
struct ConfigArg {
    /// Configuration file, fixture name, or `fixture:seed`
    #[arg(long)]
    config: String,
}

#[derive(Subcommand)]
enum Command {
    /// Step a configuration, reporting support sizes and the final state
    Simulate {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        /// Number of steps to run
        #[arg(long)]
        horizon: u32,
    },
    /// Report the symbol word observed at one cell over time
    Trace {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        /// Observed cell, e.g. `(0)` or `(3,-1)`
        #[arg(long)]
        cell: String,
        /// Number of observed steps (word covers times 0..horizon-1)
        #[arg(long)]
        horizon: usize,
    },
    /// Run a bounded decision probe; the exit code is the verdict
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Fold a tube configuration one dimension down, optionally stepping
    /// the folded configuration under the reduced rule first
    Reduce {
        #[command(flatten)]
        config: ConfigArg,
        /// Rule to reduce (required when --steps > 0)
        #[arg(long)]
        rule: Option<String>,
        /// Steps to run in the reduced dimension before printing
        #[arg(long, default_value_t = 0)]
        steps: u32,
    },
    /// Decompose a one-dimensional subshift file into components
    Decompose {
        /// Subshift file (forbidden-pattern format)
        #[arg(long)]
        sft: PathBuf,
        /// Also list all admissible words of this length
        #[arg(long)]
        language: Option<usize>,
    },
    /// Write a fixture's rule and seed configuration files
    DumpFixture {
        /// Fixture name
        name: String,
        /// Output directory
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Render a window as text: `.` for 0, digits then letters upward
    Render {
        #[command(flatten)]
        config: ConfigArg,
        /// Rule (required when stepping via --time or --horizon)
        #[arg(long)]
        rule: Option<String>,
        /// For dimension 2: the time step to draw
        #[arg(long, default_value_t = 0)]
        time: u32,
        /// For dimension 1: draw a spacetime slice with rows 0..=horizon
        #[arg(long)]
        horizon: Option<u32>,
        /// Leftmost rendered x
        #[arg(long, allow_hyphen_values = true)]
        x0: i64,
        /// Rightmost rendered x
        #[arg(long, allow_hyphen_values = true)]
        x1: i64,
        /// Bottom rendered y (dimension 2 only)
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<i64>,
        /// Top rendered y (dimension 2 only)
        #[arg(long, allow_hyphen_values = true)]
        y1: Option<i64>,
    },
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// Check that every window dies within n steps
    Nilpotency {
        #[command(flatten)]
        rule: RuleArg,
        /// Step budget
        #[arg(long)]
        n: u32,
        /// Cap on enumerated windows and orbit lengths
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Check that every window clears the radius-k ball within n steps
    Visit {
        #[command(flatten)]
        rule: RuleArg,
        /// Observation radius
        #[arg(long)]
        k: u32,
        /// Step budget
        #[arg(long)]
        n: u32,
        /// `exhaustive` or `sampled`
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Sample seed (sampled mode)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count (sampled mode)
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Run a configuration toward death or a repeating state
    Mortality {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        horizon: u32,
    },
    /// Watch whether the support stays inside an axis tower
    Tower {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        /// Tower axis
        #[arg(long)]
        axis: usize,
        /// Tower width
        #[arg(long)]
        k: u32,
        #[arg(long)]
        horizon: u32,
    },
    /// Exact orbit analysis on a torus configuration
    Cycle {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Verify that two parts evolve independently
    Disjoint {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        config: ConfigArg,
        /// The second part
        #[arg(long)]
        other: String,
        #[arg(long)]
        horizon: u32,
    },
    /// Search for a chain of word preimages above a word
    Preimage {
        #[command(flatten)]
        rule: RuleArg,
        /// Target word, e.g. `1` or `1,0,2`
        #[arg(long)]
        word: String,
        /// Chain length
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        guard: Option<u64>,
    },
}

enum Failure {
    FileNotFound(PathBuf),
    Io(PathBuf, std::io::Error),
    Core(Error),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::FileNotFound(_) => 3,
            Failure::Core(Error::Parse { .. }) => 4,
            Failure::Core(Error::GuardExceeded { .. }) => 5,
            Failure::Core(Error::DimensionMismatch { .. }) => 6,
            Failure::Core(Error::BackgroundUnstable) => 7,
            Failure::Usage(_) => 8,
            Failure::Io(..) | Failure::Core(_) => 9,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::FileNotFound(path) => write!(f, "file not found: {}", path.display()),
            Failure::Io(path, e) => write!(f, "{}: {e}", path.display()),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(message) => write!(f, "{message}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    if !path.exists() {
        return Err(Failure::FileNotFound(path.to_path_buf()));
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// Resolves `--rule`: the builtin name `shift-left`, a fixture name, or a
/// rule file path. Names win over files so behavior is independent of the
/// working directory.
fn load_rule(source: &str) -> Result<CellularAutomaton, Failure> {
    if source == "shift-left" {
        return Ok(CellularAutomaton::shift_left(1, Alphabet::new(2)?)?);
    }
    if quiesce_core::FIXTURE_NAMES.contains(&source) {
        return Ok(fixture(source)?.automaton);
    }
    Ok(parse_rule(&read_file(Path::new(source))?)?)
}

/// Resolves `--config`: a fixture name (optionally `fixture:seed`) or a
/// configuration file path.
fn load_config(source: &str) -> Result<Config, Failure> {
    let fixture_like = match source.split_once(':') {
        Some((name, _)) => quiesce_core::FIXTURE_NAMES.contains(&name),
        None => quiesce_core::FIXTURE_NAMES.contains(&source),
    };
    if fixture_like {
        let (_, seed) = fixture_seed(source)?;
        return Ok(Config::Finite(seed.config));
    }
    Ok(parse_config(&read_file(Path::new(source))?)?)
}

fn parse_cell(text: &str) -> Result<CellVector, Failure> {
    text.parse()
        .map_err(|e| Failure::Usage(format!("bad cell `{text}`: {e}")))
}

fn parse_word(text: &str) -> Result<Vec<Symbol>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<Symbol>()
                .map_err(|_| Failure::Usage(format!("bad word symbol `{part}`")))
        })
        .collect()
}

fn guards_with(guard: Option<u64>) -> Guards {
    match guard {
        Some(cap) => Guards {
            max_windows: cap,
            max_torus_cells: cap,
            max_level_words: cap,
            max_orbit_steps: cap,
        },
        None => Guards::default(),
    }
}

fn glyph(symbol: Symbol) -> char {
    match symbol {
        0 => '.',
        1..=9 => char::from_digit(symbol, 10).expect("single digit"),
        10..=35 => char::from_u32('a' as u32 + symbol - 10).expect("letter range"),
        _ => '#',
    }
}

fn report_outcome(report: &ProbeReport) -> u8 {
    out!("{report}");
    match report.verdict {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::Unknown => 2,
    }
}

fn run_probe(probe: ProbeCommand) -> Result<u8, Failure> {
    match probe {
        ProbeCommand::Nilpotency { rule, n, guard } => {
            let c = load_rule(&rule.rule)?;
            let report = nilpotency_within(&c, n, &guards_with(guard))?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Visit {
            rule,
            k,
            n,
            mode,
            seed,
            trials,
            guard,
        } => {
            let c = load_rule(&rule.rule)?;
            let mode = match mode.as_str() {
                "exhaustive" => VisitMode::Exhaustive,
                "sampled" => VisitMode::Sampled { seed, trials },
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown mode `{other}`; use exhaustive or sampled"
                    )))
                }
            };
            let report = uniform_visit_bound(&c, k, n, mode, &guards_with(guard))?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Mortality {
            rule,
            config,
            horizon,
        } => {
            let c = load_rule(&rule.rule)?;
            let x = load_config(&config.config)?;
            let report = mortality_probe(&c, &x, horizon)?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Tower {
            rule,
            config,
            axis,
            k,
            horizon,
        } => {
            let c = load_rule(&rule.rule)?;
            let x = match load_config(&config.config)? {
                Config::Finite(x) => x,
                other => {
                    return Err(Failure::Usage(format!(
                        "tower probes need a finite configuration, got kind `{}`",
                        other.kind_name()
                    )))
                }
            };
            let report = tower_confinement(&c, &x, axis, k, horizon)?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Cycle {
            rule,
            config,
            guard,
        } => {
            let c = load_rule(&rule.rule)?;
            let x = match load_config(&config.config)? {
                Config::Torus(x) => x,
                other => {
                    return Err(Failure::Usage(format!(
                        "cycle analysis needs a torus configuration, got kind `{}`",
                        other.kind_name()
                    )))
                }
            };
            let report = cycle_analysis(&c, &x, &guards_with(guard))?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Disjoint {
            rule,
            config,
            other,
            horizon,
        } => {
            let c = load_rule(&rule.rule)?;
            let a = load_config(&config.config)?;
            let b = load_config(&other)?;
            let report = check_disjoint_evolution(&c, &a, &b, horizon)?;
            Ok(report_outcome(&report))
        }
        ProbeCommand::Preimage {
            rule,
            word,
            depth,
            guard,
        } => {
            let c = load_rule(&rule.rule)?;
            let word = parse_word(&word)?;
            let report = deep_preimage(&c, &word, depth, &guards_with(guard))?;
            Ok(report_outcome(&report))
        }
    }
}

fn run_simulate(rule: RuleArg, config: ConfigArg, horizon: u32) -> Result<u8, Failure> {
    let c = load_rule(&rule.rule)?;
    let mut x = load_config(&config.config)?;
    for t in 0..=horizon {
        outln!("t={t} support={}", x.support()?.len());
        if t < horizon {
            x = c.step(&x)?;
        }
    }
    out!("{}", write_config(&x)?);
    Ok(0)
}

fn run_trace(rule: RuleArg, config: ConfigArg, cell: String, horizon: usize) -> Result<u8, Failure> {
    let c = load_rule(&rule.rule)?;
    let x = load_config(&config.config)?;
    let cell = parse_cell(&cell)?;
    let report = c.trace(&x, &cell, horizon)?;
    outln!("cell={}", report.cell);
    outln!("horizon={}", report.horizon);
    let word: Vec<String> = report.word.iter().map(|s| s.to_string()).collect();
    outln!("word={}", word.join(","));
    let support: Vec<String> = report.support.iter().map(|t| t.to_string()).collect();
    outln!("support={}", support.join(","));
    outln!("truncated={}", report.truncated);
    Ok(0)
}

fn run_reduce(config: ConfigArg, rule: Option<String>, steps: u32) -> Result<u8, Failure> {
    let tube = match load_config(&config.config)? {
        Config::Tube(tube) => tube,
        other => {
            return Err(Failure::Usage(format!(
                "reduce needs a tube configuration, got kind `{}`",
                other.kind_name()
            )))
        }
    };
    let mut folded = fold(&tube)?;
    if steps > 0 {
        let source = rule.ok_or_else(|| {
            Failure::Usage("--steps needs --rule to supply the reduced dynamics".into())
        })?;
        let base = load_rule(&source)?;
        let reduced = base.reduce_dimension(tube.axis(), tube.period())?;
        for _ in 0..steps {
            folded = reduced.step_finite(&folded)?;
        }
    }
    out!("{}", write_config(&Config::Finite(folded))?);
    Ok(0)
}

fn run_decompose(sft: PathBuf, language: Option<usize>) -> Result<u8, Failure> {
    let shift = parse_sft(&read_file(&sft)?)?;
    let decomposition = components_1d(&shift)?;
    outln!("window={}", decomposition.window);
    for (i, word) in decomposition.vertices.iter().enumerate() {
        let text: Vec<String> = word.iter().map(|s| s.to_string()).collect();
        outln!("vertex {i}: [{}]", text.join(","));
    }
    for (i, component) in decomposition.components.iter().enumerate() {
        let members: Vec<String> = component.vertices.iter().map(|v| v.to_string()).collect();
        outln!(
            "component {i}: vertices=[{}] transitive={} mixing={}",
            members.join(","),
            component.transitive,
            component.mixing
        );
    }
    if let Some(length) = language {
        for word in language_1d(&shift, length)? {
            let text: Vec<String> = word.iter().map(|s| s.to_string()).collect();
            outln!("word={}", text.join(","));
        }
    }
    Ok(0)
}

fn run_dump_fixture(name: String, dir: PathBuf) -> Result<u8, Failure> {
    let entry = fixture(&name)?;
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
    let rule_path = dir.join(format!("{name}.rule"));
    let rule_text = write_rule(&entry.automaton)?;
    std::fs::write(&rule_path, rule_text).map_err(|e| Failure::Io(rule_path.clone(), e))?;
    outln!("wrote {}", rule_path.display());
    for seed in &entry.seeds {
        let path = dir.join(format!("{name}-{}.cfg", seed.name));
        let text = write_config(&Config::Finite(seed.config.clone()))?;
        std::fs::write(&path, text).map_err(|e| Failure::Io(path.clone(), e))?;
        outln!("wrote {}", path.display());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_render(
    config: ConfigArg,
    rule: Option<String>,
    time: u32,
    horizon: Option<u32>,
    x0: i64,
    x1: i64,
    y0: Option<i64>,
    y1: Option<i64>,
) -> Result<u8, Failure> {
    if x1 < x0 {
        return Err(Failure::Usage("x1 must be at least x0".into()));
    }
    let mut x = load_config(&config.config)?;
    let stepper = |source: &Option<String>| -> Result<Option<CellularAutomaton>, Failure> {
        source.as_ref().map(|s| load_rule(s)).transpose()
    };
    match x.dim() {
        1 => {
            let rows = horizon.unwrap_or(0);
            let c = stepper(&rule)?;
            if rows > 0 && c.is_none() {
                return Err(Failure::Usage("spacetime rendering needs --rule".into()));
            }
            for t in 0..=rows {
                let mut line = String::new();
                for column in x0..=x1 {
                    line.push(glyph(x.get(&CellVector::new(vec![column])?)?));
                }
                outln!("{line}");
                if t < rows {
                    x = c.as_ref().expect("checked above").step(&x)?;
                }
            }
        }
        2 => {
            let (y0, y1) = match (y0, y1) {
                (Some(a), Some(b)) if b >= a => (a, b),
                (Some(_), Some(_)) => return Err(Failure::Usage("y1 must be at least y0".into())),
                _ => {
                    return Err(Failure::Usage(
                        "two-dimensional rendering needs --y0 and --y1".into(),
                    ))
                }
            };
            if time > 0 {
                let c = stepper(&rule)?
                    .ok_or_else(|| Failure::Usage("rendering a later time needs --rule".into()))?;
                for _ in 0..time {
                    x = c.step(&x)?;
                }
            }
            for row in (y0..=y1).rev() {
                let mut line = String::new();
                for column in x0..=x1 {
                    line.push(glyph(x.get(&CellVector::new(vec![column, row])?)?));
                }
                outln!("{line}");
            }
        }
        d => {
            return Err(Failure::Usage(format!(
                "rendering handles dimensions 1 and 2, not {d}"
            )))
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Simulate {
            rule,
            config,
            horizon,
        } => run_simulate(rule, config, horizon),
        Command::Trace {
            rule,
            config,
            cell,
            horizon,
        } => run_trace(rule, config, cell, horizon),
        Command::Probe(probe) => run_probe(probe),
        Command::Reduce {
            config,
            rule,
            steps,
        } => run_reduce(config, rule, steps),
        Command::Decompose { sft, language } => run_decompose(sft, language),
        Command::DumpFixture { name, dir } => run_dump_fixture(name, dir),
        Command::Render {
            config,
            rule,
            time,
            horizon,
            x0,
            x1,
            y0,
            y1,
        } => run_render(config, rule, time, horizon, x0, x1, y0, y1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
