//! Command-line front end for the `wadgetree` library.
//!
//! Every command reads automata from `dta v1` files (or a canonical name
//! from the command line), runs one analysis, and writes the result to
//! standard output or a file, as plain text, JSON, or Graphviz DOT. The
//! exit code tells scripts what went wrong: `0` success, `1` usage error,
//! `2` unreadable or invalid input, `3` internal invariant violation.
//!
//! File-analysis commands accept several files at once; outputs are always
//! emitted in input order, no matter how many worker threads run, and in
//! batch mode each plain-text line is prefixed with the file it belongs to
//! (automaton and DOT outputs get a `# file` header line instead, which
//! both formats treat as a comment). JSON output is a single document: one
//! object for a single input, an array in input order otherwise, with keys
//! always sorted.

use std::fs;
use std::num::NonZeroUsize;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wadgetree::{
    build, canonicalize, classify, compose_automata, normalize, pattern_report, productive_states,
    wadge_compare, BuildError, CanonicalName, ComposeOp, DetTreeAutomaton, Index, NameOrder,
    TopologicalClass, WeakFlowerMax,
};

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}

/// Parses the arguments, executes the selected command, and maps every
/// outcome to the documented exit code.
fn run(argv: Vec<String>) -> u8 {
    let config = match CliConfig::from_argv(&argv) {
        Ok(config) => config,
        Err(code) => return code,
    };
    // Invariant violations must surface as a single diagnostic line and
    // exit code 3, not a panic dump.
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| execute(&config)));
    let _ = panic::take_hook();
    match outcome {
        Ok(code) => code,
        Err(payload) => {
            eprintln!("internal error: {}", panic_message(payload.as_ref()));
            3
        }
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> &str {
    if let Some(text) = payload.downcast_ref::<&str>() {
        text
    } else if let Some(text) = payload.downcast_ref::<String>() {
        text
    } else {
        "unexpected panic payload"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable text.
    Plain,
    /// One key-sorted JSON document.
    Json,
    /// A Graphviz graph (automaton-producing commands only).
    Dot,
}

#[derive(Parser)]
#[command(
    name = "wadgetree",
    version,
    about = "Analyze deterministic parity tree automata and order their languages",
    disable_help_subcommand = true
)]
struct Invocation {
    #[command(subcommand)]
    command: Command,
    /// Write the output to this file instead of standard output.
    #[arg(short = 'o', long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Worker threads for commands that take several files.
    #[arg(long, global = true, value_name = "N", default_value = "1")]
    parallelism: NonZeroUsize,
}

#[derive(Subcommand)]
enum Command {
    /// Check that each file is a well-formed automaton
    Validate {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Print each automaton's normal form
    Normalize {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// List each automaton's productive states
    Productive {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Report flowers, splits, and replication in each normal form
    Patterns {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Print the canonical name of each recognized language
    Canonicalize {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Print canonical name, topological class, and index bounds
    Classify {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Compare two languages: prints <, =, >, or incomparable
    Compare {
        #[arg(value_name = "FILE")]
        left: PathBuf,
        #[arg(value_name = "FILE")]
        right: PathBuf,
    },
    /// Build an automaton realizing a canonical name
    Build {
        /// A canonical name, e.g. C(1), D(w^[w] + 2), or E(TOP)
        name: String,
    },
    /// Combine automata with or, and, oplus, arrow, or krep:I,K
    Compose {
        /// One of: or, and, oplus, arrow, krep:I,K (e.g. krep:0,1)
        op: String,
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Print each automaton as a Graphviz graph
    #[command(name = "export-dot")]
    ExportDot {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
}

/// What to do, on which files, once the argument list has been checked.
enum CommandKind {
    Validate,
    Normalize,
    Productive,
    Patterns,
    Canonicalize,
    Classify,
    ExportDot,
    Compare,
    Build { name: String },
    Compose { op: ComposeOp, label: String },
}

impl CommandKind {
    /// Commands whose output is itself an automaton can render as DOT.
    fn emits_automaton(&self) -> bool {
        matches!(
            self,
            CommandKind::Normalize
                | CommandKind::Build { .. }
                | CommandKind::Compose { .. }
                | CommandKind::ExportDot
        )
    }

    fn label(&self) -> &str {
        match self {
            CommandKind::Validate => "validate",
            CommandKind::Normalize => "normalize",
            CommandKind::Productive => "productive",
            CommandKind::Patterns => "patterns",
            CommandKind::Canonicalize => "canonicalize",
            CommandKind::Classify => "classify",
            CommandKind::ExportDot => "export-dot",
            CommandKind::Compare => "compare",
            CommandKind::Build { .. } => "build",
            CommandKind::Compose { .. } => "compose",
        }
    }
}

/// One fully parsed and checked invocation.
struct CliConfig {
    command: CommandKind,
    inputs: Vec<PathBuf>,
    output: Option<PathBuf>,
    format: Format,
    parallelism: NonZeroUsize,
}

impl CliConfig {
    /// Turns an argument vector into a runnable configuration, or the exit
    /// code to return immediately (0 after help/version, 1 on usage errors).
    fn from_argv(argv: &[String]) -> Result<CliConfig, u8> {
        let invocation = match Invocation::try_parse_from(argv) {
            Ok(invocation) => invocation,
            Err(err) => {
                if matches!(
                    err.kind(),
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
                ) {
                    let _ = err.print();
                    return Err(0);
                }
                eprintln!("{}", first_line(&err.to_string()));
                return Err(1);
            }
        };
        let (command, inputs) = match invocation.command {
            Command::Validate { files } => (CommandKind::Validate, files),
            Command::Normalize { files } => (CommandKind::Normalize, files),
            Command::Productive { files } => (CommandKind::Productive, files),
            Command::Patterns { files } => (CommandKind::Patterns, files),
            Command::Canonicalize { files } => (CommandKind::Canonicalize, files),
            Command::Classify { files } => (CommandKind::Classify, files),
            Command::ExportDot { files } => (CommandKind::ExportDot, files),
            Command::Compare { left, right } => (CommandKind::Compare, vec![left, right]),
            Command::Build { name } => (CommandKind::Build { name }, Vec::new()),
            Command::Compose { op, files } => {
                let parsed = parse_compose_op(&op).map_err(|message| {
                    eprintln!("{message}");
                    1u8
                })?;
                (
                    CommandKind::Compose {
                        op: parsed,
                        label: op,
                    },
                    files,
                )
            }
        };
        if invocation.format == Format::Dot && !command.emits_automaton() {
            eprintln!("error: the {} command has no DOT form", command.label());
            return Err(1);
        }
        Ok(CliConfig {
            command,
            inputs,
            output: invocation.output,
            format: invocation.format,
            parallelism: invocation.parallelism,
        })
    }
}

fn first_line(text: &str) -> &str {
    text.lines()
        .find(|line| !line.trim().is_empty())
        .unwrap_or("error: invalid arguments")
}

fn parse_compose_op(text: &str) -> Result<ComposeOp, String> {
    match text {
        "or" => Ok(ComposeOp::Or),
        "and" => Ok(ComposeOp::And),
        "oplus" => Ok(ComposeOp::Oplus),
        "arrow" => Ok(ComposeOp::Arrow),
        _ => {
            let window = text.strip_prefix("krep:").and_then(|rest| {
                let (iota, kappa) = rest.split_once(',')?;
                let iota: u32 = iota.trim().parse().ok()?;
                let kappa: u32 = kappa.trim().parse().ok()?;
                Index::new(iota, kappa).ok()
            });
            match window {
                Some(index) => Ok(ComposeOp::Krep(index)),
                None => Err(format!(
                    "error: unknown composition `{text}` (expected or, and, oplus, arrow, or krep:I,K)"
                )),
            }
        }
    }
}

/// A failed step: the exit code it maps to and its one-line diagnostic.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Failure {
        Failure { code: 2, message }
    }

    fn usage(message: String) -> Failure {
        Failure { code: 1, message }
    }
}

/// One unit of output before final assembly.
enum Rendered {
    /// Plain-text lines; batch mode prefixes each with its file.
    Lines(Vec<String>),
    /// A complete JSON value for one unit of work.
    Json(Value),
    /// Text passed through untouched (automaton or DOT text); batch mode
    /// prepends a `# file` comment line.
    Raw(String),
}

fn execute(config: &CliConfig) -> u8 {
    let (stdout_text, exit) = match &config.command {
        CommandKind::Build { name } => assemble_single(build_command(name, config.format)),
        CommandKind::Compose { op, label } => {
            assemble_single(compose_command(*op, label, &config.inputs, config.format))
        }
        CommandKind::Compare => assemble_single(compare_command(&config.inputs, config.format)),
        _ => assemble_batch(config),
    };
    if exit == 0 || !stdout_text.is_empty() {
        if let Err(failure) = emit(config.output.as_deref(), &stdout_text) {
            eprintln!("{}", failure.message);
            return failure.code;
        }
    }
    exit
}

fn assemble_single(result: Result<Rendered, Failure>) -> (String, u8) {
    match result {
        Ok(rendered) => (render_unit(rendered, None), 0),
        Err(failure) => {
            eprintln!("{}", failure.message);
            (String::new(), failure.code)
        }
    }
}

/// Runs the per-file analysis over every input, using up to `parallelism`
/// worker threads, and assembles the outputs in input order.
fn assemble_batch(config: &CliConfig) -> (String, u8) {
    let n = config.inputs.len();
    let workers = config.parallelism.get().min(n.max(1));
    let slots: Vec<Mutex<Option<Result<Rendered, Failure>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let result = analyze_file(&config.command, config.format, &config.inputs[i]);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });

    let mut exit = 0u8;
    let multi = n > 1;
    let mut text = String::new();
    let mut values = Vec::new();
    for (slot, path) in slots.into_iter().zip(&config.inputs) {
        let result = slot.into_inner().unwrap().expect("every slot was filled");
        match result {
            Ok(Rendered::Json(value)) => values.push(value),
            Ok(rendered) => {
                let tag = multi.then(|| path.display().to_string());
                text.push_str(&render_unit(rendered, tag.as_deref()));
            }
            Err(failure) => {
                eprintln!("{}", failure.message);
                exit = exit.max(failure.code);
            }
        }
    }
    if config.format == Format::Json && !values.is_empty() {
        let document = if multi {
            Value::Array(values)
        } else {
            values.into_iter().next().unwrap()
        };
        text = render_unit(Rendered::Json(document), None);
    }
    (text, exit)
}

/// Turns one unit of output into final text, applying the batch-mode tag.
fn render_unit(rendered: Rendered, tag: Option<&str>) -> String {
    match rendered {
        Rendered::Lines(lines) => {
            let mut out = String::new();
            for line in lines {
                match tag {
                    Some(tag) => out.push_str(&format!("{tag}: {line}\n")),
                    None => out.push_str(&format!("{line}\n")),
                }
            }
            out
        }
        Rendered::Raw(body) => match tag {
            Some(tag) => format!("# {tag}\n{body}"),
            None => body,
        },
        Rendered::Json(value) => {
            let mut out = serde_json::to_string_pretty(&value).expect("JSON output serializes");
            out.push('\n');
            out
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|err| Failure::input(format!("{}: {err}", path.display()))),
    }
}

fn load_automaton(path: &Path) -> Result<DetTreeAutomaton, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::input(format!("{}: {err}", path.display())))?;
    DetTreeAutomaton::parse(&text)
        .map_err(|err| Failure::input(format!("{}: {err}", path.display())))
}

fn analyze_file(kind: &CommandKind, format: Format, path: &Path) -> Result<Rendered, Failure> {
    let auto = load_automaton(path)?;
    let file = path.display().to_string();
    Ok(match kind {
        CommandKind::Validate => {
            let states = auto.num_states();
            let letters = auto.num_letters();
            let max_rank = auto.states().map(|q| auto.rank(q)).max().unwrap_or(0);
            match format {
                Format::Json => Rendered::Json(json!({
                    "file": file,
                    "letters": letters,
                    "max_rank": max_rank,
                    "states": states,
                    "valid": true,
                })),
                _ => Rendered::Lines(vec![format!(
                    "valid: {states} states, {letters} letters, max rank {max_rank}"
                )]),
            }
        }
        CommandKind::Normalize => {
            let normal = normalize(&auto);
            automaton_output(format, &normal.automaton, "file", &file)
        }
        CommandKind::Productive => {
            let productive: Vec<String> = productive_states(&auto)
                .into_iter()
                .map(|q| auto.state_name(q).to_string())
                .collect();
            match format {
                Format::Json => Rendered::Json(json!({
                    "file": file,
                    "productive": productive,
                })),
                _ => Rendered::Lines(vec![if productive.is_empty() {
                    "none".to_string()
                } else {
                    productive.join(" ")
                }]),
            }
        }
        CommandKind::Patterns => {
            let normal = normalize(&auto);
            let report = pattern_report(&normal);
            let name_of = |q| normal.automaton.state_name(q).to_string();
            let acc: Vec<String> = report.acc_replicated.iter().map(|&q| name_of(q)).collect();
            let rej: Vec<String> = report.rej_replicated.iter().map(|&q| name_of(q)).collect();
            let weak = report.max_weak_flower.as_ref().map(|max| match max {
                WeakFlowerMax::Bounded(index) => index.to_string(),
                WeakFlowerMax::Saturated => "saturated".to_string(),
            });
            match format {
                Format::Json => Rendered::Json(json!({
                    "accepting_replicated": acc,
                    "file": file,
                    "max_flower": report.max_flower.map(|index| index.to_string()),
                    "max_weak_flower": weak,
                    "rejecting_replicated": rej,
                    "split": report.split.as_ref().map(|split| json!({
                        "left_top": split.left_top,
                        "letter": normal.automaton.letter_symbol(split.letter),
                        "right_top": split.right_top,
                        "state": name_of(split.state),
                    })),
                    "top0": report.admits_top0,
                    "top1": report.admits_top1,
                    "top2": report.admits_top2,
                })),
                _ => {
                    let list = |items: &[String]| {
                        if items.is_empty() {
                            "none".to_string()
                        } else {
                            items.join(" ")
                        }
                    };
                    let tops: Vec<String> = [
                        (report.admits_top0, "top0"),
                        (report.admits_top1, "top1"),
                        (report.admits_top2, "top2"),
                    ]
                    .iter()
                    .filter(|(admitted, _)| *admitted)
                    .map(|(_, label)| label.to_string())
                    .collect();
                    Rendered::Lines(vec![
                        format!(
                            "max-flower: {}",
                            report
                                .max_flower
                                .map_or_else(|| "none".to_string(), |index| index.to_string())
                        ),
                        format!(
                            "max-weak-flower: {}",
                            weak.unwrap_or_else(|| "none".to_string())
                        ),
                        format!(
                            "split: {}",
                            report.split.as_ref().map_or_else(
                                || "none".to_string(),
                                |split| format!(
                                    "state={} letter={} tops=({},{})",
                                    name_of(split.state),
                                    normal.automaton.letter_symbol(split.letter),
                                    split.left_top,
                                    split.right_top
                                )
                            )
                        ),
                        format!("accepting-replicated: {}", list(&acc)),
                        format!("rejecting-replicated: {}", list(&rej)),
                        format!("top-patterns: {}", list(&tops)),
                    ])
                }
            }
        }
        CommandKind::Canonicalize => {
            let name = canonicalize(&auto);
            match format {
                Format::Json => Rendered::Json(json!({
                    "file": file,
                    "name": name.to_string(),
                })),
                _ => Rendered::Lines(vec![name.to_string()]),
            }
        }
        CommandKind::Classify => {
            let report = classify(&auto);
            let det: Vec<String> = report.det_index.iter().map(|i| i.to_string()).collect();
            let weak: Option<Vec<String>> = report
                .weak_det_index
                .as_ref()
                .map(|indices| indices.iter().map(|i| i.to_string()).collect());
            match format {
                Format::Json => Rendered::Json(json!({
                    "borel": borel_json(&report.borel),
                    "det_index": det,
                    "file": file,
                    "name": report.canonical_name.to_string(),
                    "weak_det_index": weak,
                })),
                _ => Rendered::Lines(vec![
                    format!("name: {}", report.canonical_name),
                    format!("borel: {}", borel_plain(&report.borel)),
                    format!("det-index: {}", det.join(" ")),
                    format!(
                        "weak-det-index: {}",
                        weak.map_or_else(|| "none".to_string(), |indices| indices.join(" "))
                    ),
                ]),
            }
        }
        CommandKind::ExportDot => {
            let dot = auto.export_dot();
            match format {
                Format::Json => Rendered::Json(json!({
                    "dot": dot,
                    "file": file,
                })),
                _ => Rendered::Raw(dot),
            }
        }
        _ => unreachable!("single-output commands never reach the batch runner"),
    })
}

/// Renders an automaton result as canonical text, DOT, or a JSON object
/// whose extra key records where the automaton came from.
fn automaton_output(
    format: Format,
    auto: &DetTreeAutomaton,
    origin_key: &str,
    origin: &str,
) -> Rendered {
    match format {
        Format::Plain => Rendered::Raw(auto.serialize()),
        Format::Dot => Rendered::Raw(auto.export_dot()),
        Format::Json => {
            let mut object = serde_json::Map::new();
            object.insert("automaton".to_string(), Value::String(auto.serialize()));
            object.insert(origin_key.to_string(), Value::String(origin.to_string()));
            Rendered::Json(Value::Object(object))
        }
    }
}

fn build_command(name: &str, format: Format) -> Result<Rendered, Failure> {
    let parsed: CanonicalName = name
        .parse()
        .map_err(|err| Failure::input(format!("{name}: {err}")))?;
    let auto = build(&parsed).map_err(|err| Failure::input(err.to_string()))?;
    Ok(automaton_output(format, &auto, "name", &parsed.to_string()))
}

fn compose_command(
    op: ComposeOp,
    label: &str,
    inputs: &[PathBuf],
    format: Format,
) -> Result<Rendered, Failure> {
    let operands: Vec<DetTreeAutomaton> = inputs
        .iter()
        .map(|path| load_automaton(path))
        .collect::<Result<_, _>>()?;
    let combined = compose_automata(op, &operands).map_err(|err| match err {
        BuildError::Arity { .. } => Failure::usage(format!("error: {err}")),
        other => Failure::input(other.to_string()),
    })?;
    if format == Format::Json {
        let files: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
        return Ok(Rendered::Json(json!({
            "automaton": combined.serialize(),
            "inputs": files,
            "op": label,
        })));
    }
    Ok(automaton_output(format, &combined, "op", label))
}

fn compare_command(inputs: &[PathBuf], format: Format) -> Result<Rendered, Failure> {
    let left = load_automaton(&inputs[0])?;
    let right = load_automaton(&inputs[1])?;
    let order = match wadge_compare(&left, &right) {
        NameOrder::Less => "<",
        NameOrder::Equal => "=",
        NameOrder::Greater => ">",
        NameOrder::Incomparable => "incomparable",
    };
    Ok(match format {
        Format::Json => Rendered::Json(json!({
            "left": inputs[0].display().to_string(),
            "order": order,
            "right": inputs[1].display().to_string(),
        })),
        _ => Rendered::Lines(vec![order.to_string()]),
    })
}

fn borel_plain(class: &TopologicalClass) -> String {
    let tag = |base: &str, complete: bool| {
        if complete {
            format!("{base}-complete")
        } else {
            base.to_string()
        }
    };
    match class {
        TopologicalClass::Sigma01 { complete } => tag("Sigma^0_1", *complete),
        TopologicalClass::Pi01 { complete } => tag("Pi^0_1", *complete),
        TopologicalClass::Sigma02 { complete } => tag("Sigma^0_2", *complete),
        TopologicalClass::Pi02 { complete } => tag("Pi^0_2", *complete),
        TopologicalClass::Delta03 { .. } => "Delta^0_3".to_string(),
        TopologicalClass::Sigma03 { complete } => tag("Sigma^0_3", *complete),
        TopologicalClass::Pi03 { complete } => tag("Pi^0_3", *complete),
        TopologicalClass::Pi11Complete => "Pi^1_1-complete".to_string(),
    }
}

fn borel_json(class: &TopologicalClass) -> Value {
    let flagged = |name: &str, complete: bool| json!({ "class": name, "complete": complete });
    match class {
        TopologicalClass::Sigma01 { complete } => flagged("Sigma01", *complete),
        TopologicalClass::Pi01 { complete } => flagged("Pi01", *complete),
        TopologicalClass::Sigma02 { complete } => flagged("Sigma02", *complete),
        TopologicalClass::Pi02 { complete } => flagged("Pi02", *complete),
        TopologicalClass::Delta03 { hardness } => {
            json!({ "class": "Delta03", "hardness": hardness.to_string() })
        }
        TopologicalClass::Sigma03 { complete } => flagged("Sigma03", *complete),
        TopologicalClass::Pi03 { complete } => flagged("Pi03", *complete),
        TopologicalClass::Pi11Complete => flagged("Pi11", true),
    }
}
