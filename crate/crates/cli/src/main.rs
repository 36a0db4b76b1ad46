use std::fmt::Display;
use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ogspi::action::show_trace;
use ogspi::encode::{encode_cbn, encode_cbn_cconfig, encode_cbv_with, encode_cconfig, Variant};
use ogspi::equiv::{
    bisim_upto_composition, bounded_weak_bisim, bounded_weak_bisim_confluent, complete_trace_equiv, enf_bisim,
    enumerate_complete_traces, enumerate_traces, trace_equiv, Aogs, CbnAogs, CbnCogs, Cogs, Lts, PiOp, PiStd,
    Verdict, Wbogs,
};
use ogspi::harness::{run_suite, Params, Report, Status, SUITES};
use ogspi::lambda::{parse_term, Mode, Parsed, Term};
use ogspi::ogs::{parse_aconfig, parse_cconfig, parse_sconfig, AConfig, CConfig, SConfig};
use ogspi::pi::{parse_agent, Agent};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "ogspi", version, about = "Operational game semantics, the internal pi-calculus and bounded equivalences")]
struct Cli {
    /// Read default flag values from a `key = value` file.
    #[arg(long, global = true, value_name = "FILE")]
    config_file: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sys {
    Aogs,
    Cogs,
    Wbogs,
    CbnAogs,
    CbnCogs,
    Pi,
    PiOp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Calculus {
    Cbv,
    Cbn,
    Rho,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncVariant {
    Plain,
    Opt,
}

/// How `--term`, `--left` and `--right` are read. `auto` treats text
/// starting with `<` as a configuration literal and anything else as a term.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Input {
    Auto,
    Term,
    Config,
    Process,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EqMode {
    Trace,
    Complete,
    Bisim,
    Upto,
    Enf,
}

#[derive(clap::Args, Clone)]
struct Source {
    #[arg(long, value_enum, default_value = "auto")]
    input: Input,
    /// Calculus of λ-terms given as input. Also picks the encoding for the
    /// π systems.
    #[arg(long, value_enum, default_value = "cbv")]
    calculus: Calculus,
    /// Encoding used when a term or configuration is fed to a π system.
    #[arg(long, value_enum, default_value = "plain")]
    variant: EncVariant,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term, configuration or process and print it back.
    Parse {
        #[arg(long)]
        term: String,
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List the single transitions of a state.
    Step {
        #[arg(long, value_enum)]
        lts: Sys,
        #[arg(long)]
        term: String,
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Enumerate canonical weak traces up to a length.
    Traces {
        #[arg(long, value_enum)]
        lts: Sys,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        fuel: usize,
        /// Only traces ending in a final state.
        #[arg(long)]
        complete: bool,
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Translate a term or configuration into the π-calculus.
    Encode {
        #[arg(long)]
        term: String,
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare two states.
    Equiv {
        #[arg(long, value_enum, default_value = "trace")]
        mode: EqMode,
        #[arg(long, value_enum, default_value = "cogs")]
        lts: Sys,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        fuel: usize,
        /// In bisim mode, play only visible moves between silent normal
        /// forms. Sound for encodings of λ-terms.
        #[arg(long)]
        assume_confluent: bool,
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a property suite, or `all` of them.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, env = "OGSPI_SEED", default_value_t = Params::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = Params::default().count)]
        count: usize,
        #[arg(long, default_value_t = Params::default().size)]
        size: usize,
        #[arg(long, default_value_t = Params::default().depth)]
        depth: usize,
        #[arg(long, default_value_t = Params::default().fuel)]
        fuel: usize,
        #[arg(long, default_value_t = Params::default().jobs)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

enum Fail {
    Usage(String),
}

impl<E: Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn is_literal(text: &str, src: &Source) -> bool {
    match src.input {
        Input::Auto => text.trim_start().starts_with('<'),
        Input::Config => true,
        Input::Term | Input::Process => false,
    }
}

fn cbv_term(text: &str) -> Result<Term, Fail> {
    match parse_term(text, Mode::Cbv)? {
        Parsed::Term(t) => Ok(t),
        Parsed::Rho(_) => unreachable!(),
    }
}

fn cbn_term(text: &str) -> Result<Term, Fail> {
    match parse_term(text, Mode::Cbn)? {
        Parsed::Term(t) => Ok(t),
        Parsed::Rho(_) => unreachable!(),
    }
}

fn reject_process(src: &Source, sys: &str) -> Result<(), Fail> {
    if src.input == Input::Process {
        return Err(Fail::Usage(format!("{sys} does not take π processes")));
    }
    Ok(())
}

/// Builds a state of a transition system from command-line text.
trait Build: Lts {
    fn build(&self, text: &str, src: &Source) -> Result<Self::State, Fail>;
}

impl Build for Aogs {
    fn build(&self, text: &str, src: &Source) -> Result<AConfig, Fail> {
        reject_process(src, "aogs")?;
        if is_literal(text, src) {
            Ok(parse_aconfig(text, false)?)
        } else {
            Ok(AConfig::initial(cbv_term(text)?))
        }
    }
}

impl Build for Cogs {
    fn build(&self, text: &str, src: &Source) -> Result<CConfig, Fail> {
        reject_process(src, "cogs")?;
        if is_literal(text, src) {
            Ok(parse_cconfig(text, false)?)
        } else {
            Ok(CConfig::initial(cbv_term(text)?))
        }
    }
}

impl Build for Wbogs {
    fn build(&self, text: &str, src: &Source) -> Result<SConfig, Fail> {
        reject_process(src, "wbogs")?;
        if is_literal(text, src) {
            Ok(parse_sconfig(text)?)
        } else {
            Ok(SConfig::initial(cbv_term(text)?))
        }
    }
}

impl Build for CbnAogs {
    fn build(&self, text: &str, src: &Source) -> Result<AConfig, Fail> {
        reject_process(src, "cbn-aogs")?;
        if is_literal(text, src) {
            Ok(parse_aconfig(text, true)?)
        } else {
            Ok(AConfig::initial(cbn_term(text)?))
        }
    }
}

impl Build for CbnCogs {
    fn build(&self, text: &str, src: &Source) -> Result<CConfig, Fail> {
        reject_process(src, "cbn-cogs")?;
        if is_literal(text, src) {
            Ok(parse_cconfig(text, true)?)
        } else {
            Ok(CConfig::initial(cbn_term(text)?))
        }
    }
}

fn variant(src: &Source) -> Variant {
    match src.variant {
        EncVariant::Plain => Variant::Plain,
        EncVariant::Opt => Variant::Opt,
    }
}

fn encode(text: &str, src: &Source) -> Result<Agent, Fail> {
    if src.input == Input::Process {
        return Ok(parse_agent(text)?);
    }
    let cbn = match src.calculus {
        Calculus::Cbv => false,
        Calculus::Cbn => true,
        Calculus::Rho => return Err(Fail::Usage("λρ-terms have no π encoding".into())),
    };
    if is_literal(text, src) {
        let f = parse_cconfig(text, cbn)?;
        Ok(if cbn { encode_cbn_cconfig(&f)? } else { encode_cconfig(&f, variant(src))? })
    } else if cbn {
        Ok(encode_cbn(&cbn_term(text)?))
    } else {
        Ok(encode_cbv_with(&cbv_term(text)?, variant(src)))
    }
}

impl Build for PiStd {
    fn build(&self, text: &str, src: &Source) -> Result<Agent, Fail> {
        encode(text, src)
    }
}

impl Build for PiOp {
    fn build(&self, text: &str, src: &Source) -> Result<Agent, Fail> {
        encode(text, src)
    }
}

macro_rules! with_sys {
    ($sys:expr, $s:ident => $body:expr) => {
        match $sys {
            Sys::Aogs => {
                let $s = &Aogs;
                $body
            }
            Sys::Cogs => {
                let $s = &Cogs;
                $body
            }
            Sys::Wbogs => {
                let $s = &Wbogs;
                $body
            }
            Sys::CbnAogs => {
                let $s = &CbnAogs;
                $body
            }
            Sys::CbnCogs => {
                let $s = &CbnCogs;
                $body
            }
            Sys::Pi => {
                let $s = &PiStd;
                $body
            }
            Sys::PiOp => {
                let $s = &PiOp;
                $body
            }
        }
    };
}

/// Write errors such as a closed pipe are ignored.
fn print(format: Format, j: Value, text: String) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&j).expect("json values serialise") + "\n",
        Format::Text => text,
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn parse_cmd(text: &str, src: &Source, format: Format) -> Result<u8, Fail> {
    let (kind, shown) = if src.input == Input::Process {
        ("process", parse_agent(text)?.to_string())
    } else if is_literal(text, src) {
        let cbn = src.calculus == Calculus::Cbn;
        let lit = ogspi::ogs::literal::parse_literal(text, cbn)?;
        let shown = match lit.clone().into_sconfig() {
            Ok(s) if !s.stack.is_empty() => s.to_string(),
            _ => lit.into_cconfig().to_string(),
        };
        ("config", shown)
    } else {
        let mode = match src.calculus {
            Calculus::Cbv => Mode::Cbv,
            Calculus::Cbn => Mode::Cbn,
            Calculus::Rho => Mode::Rho,
        };
        match parse_term(text, mode)? {
            Parsed::Term(t) => ("term", t.to_string()),
            Parsed::Rho(r) => ("rho-term", r.to_string()),
        }
    };
    print(format, json!({"kind": kind, "value": shown}), format!("{shown}\n"));
    Ok(0)
}

fn step_cmd<L: Build>(sys: &L, text: &str, src: &Source, format: Format) -> Result<u8, Fail>
where
    L::State: Display,
{
    let s = sys.build(text, src)?;
    sys.validate(&s)?;
    let steps = sys.step(&s, sys.supply(&s))?;
    let j: Vec<Value> = steps
        .iter()
        .map(|(a, t)| json!({"action": a, "label": a.to_string(), "target": t.to_string()}))
        .collect();
    let text: String = steps.iter().map(|(a, t)| format!("{a}  ->  {t}\n")).collect();
    print(format, Value::Array(j), text);
    Ok(0)
}

fn show(t: &[ogspi::action::Action<ogspi::action::TName>]) -> String {
    if t.is_empty() {
        "ε".into()
    } else {
        show_trace(t)
    }
}

fn traces_cmd<L: Build>(
    sys: &L,
    text: &str,
    depth: usize,
    fuel: usize,
    complete: bool,
    src: &Source,
    format: Format,
) -> Result<u8, Fail> {
    let s = sys.build(text, src)?;
    let ts = if complete {
        enumerate_complete_traces(sys, &s, depth, fuel)?
    } else {
        enumerate_traces(sys, &s, depth, fuel)?
    };
    if ts.divergence_suspected {
        eprintln!("warning: a silent run exceeded the fuel bound; the set may be incomplete");
    }
    let j = json!(ts.traces.iter().collect::<Vec<_>>());
    let text: String = ts.traces.iter().map(|t| format!("{}\n", show(t))).collect();
    print(format, j, text);
    Ok(0)
}

fn verdict_code(v: &Verdict) -> u8 {
    if v.is_equivalent() {
        0
    } else if v.is_distinguished() {
        EXIT_FAIL
    } else {
        EXIT_INCONCLUSIVE
    }
}

#[allow(clippy::too_many_arguments)]
fn equiv_generic<L: Build>(
    sys: &L,
    mode: EqMode,
    left: &str,
    right: &str,
    depth: usize,
    fuel: usize,
    confluent: bool,
    src: &Source,
) -> Result<Verdict, Fail> {
    let (a, b) = (sys.build(left, src)?, sys.build(right, src)?);
    Ok(match mode {
        EqMode::Trace => trace_equiv(sys, &a, sys, &b, depth, fuel)?,
        EqMode::Complete => complete_trace_equiv(sys, &a, sys, &b, depth, fuel)?,
        EqMode::Bisim if confluent => bounded_weak_bisim_confluent(sys, &a, sys, &b, depth, fuel)?,
        EqMode::Bisim => bounded_weak_bisim(sys, &a, sys, &b, depth, fuel)?,
        EqMode::Upto | EqMode::Enf => unreachable!("handled before dispatch"),
    })
}

#[allow(clippy::too_many_arguments)]
fn equiv_cmd(
    mode: EqMode,
    lts: Sys,
    left: &str,
    right: &str,
    depth: usize,
    fuel: usize,
    confluent: bool,
    src: &Source,
    format: Format,
) -> Result<u8, Fail> {
    let mut extra = None;
    let v = match mode {
        EqMode::Enf => {
            if is_literal(left, src) || is_literal(right, src) || src.input == Input::Process {
                return Err(Fail::Usage("enf mode compares λ-terms".into()));
            }
            enf_bisim(&cbv_term(left)?, &cbv_term(right)?, depth, fuel)
        }
        EqMode::Upto => {
            if lts != Sys::Cogs {
                return Err(Fail::Usage("upto mode runs on cogs configurations".into()));
            }
            let (a, b) = (Cogs.build(left, src)?, Cogs.build(right, src)?);
            let (v, stats) = bisim_upto_composition(&a, &b, depth, fuel)?;
            extra = Some(stats);
            v
        }
        _ => with_sys!(lts, s => equiv_generic(s, mode, left, right, depth, fuel, confluent, src)?),
    };
    let mut j = v.to_json();
    let mut text = format!("{v}\n");
    if let Some(st) = extra {
        j["pairs"] = json!(st.pairs);
        j["memo_hits"] = json!(st.memo_hits);
        text.push_str(&format!("pairs={} memo_hits={}\n", st.pairs, st.memo_hits));
    }
    if v.divergence_suspected {
        text.push_str("divergence suspected\n");
    }
    print(format, j, text);
    Ok(verdict_code(&v))
}

fn check_cmd(suite: &str, p: &Params, format: Format) -> Result<u8, Fail> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let reports: Vec<Report> = names.iter().map(|n| run_suite(n, p)).collect::<Result<_, _>>()?;
    let j = if reports.len() == 1 {
        reports[0].to_json()
    } else {
        Value::Array(reports.iter().map(Report::to_json).collect())
    };
    let text: String = reports.iter().map(Report::to_text).collect();
    print(format, j, text);
    let all = reports.iter().flat_map(|r| r.items.iter());
    let statuses: Vec<Status> = all.map(|i| i.status).collect();
    Ok(if statuses.contains(&Status::Fail) {
        EXIT_FAIL
    } else if statuses.contains(&Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.cmd {
        Cmd::Parse { term, src, format } => parse_cmd(&term, &src, format),
        Cmd::Step { lts, term, src, format } => with_sys!(lts, s => step_cmd(s, &term, &src, format)),
        Cmd::Traces { lts, term, depth, fuel, complete, src, format } => {
            with_sys!(lts, s => traces_cmd(s, &term, depth, fuel, complete, &src, format))
        }
        Cmd::Encode { term, src, format } => {
            let a = encode(&term, &src)?;
            print(format, json!({"agent": a.to_string()}), format!("{a}\n"));
            Ok(0)
        }
        Cmd::Equiv { mode, lts, left, right, depth, fuel, assume_confluent, src, format } => {
            equiv_cmd(mode, lts, &left, &right, depth, fuel, assume_confluent, &src, format)
        }
        Cmd::Check { suite, seed, count, size, depth, fuel, jobs, format } => {
            let p = Params { seed, count, size, depth, fuel, jobs: jobs.max(1) };
            check_cmd(&suite, &p, format)
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment.
fn read_settings(path: &str) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("{path}:{}: expected `key = value`", i + 1));
        };
        let v = v.trim();
        let v = v.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(v);
        out.push((k.trim().replace('_', "-"), v.to_string()));
    }
    Ok(out)
}

/// Inserts settings from the file as flags right after the subcommand,
/// skipping flags given on the command line and flags the subcommand does
/// not accept.
fn apply_settings(argv: Vec<String>) -> Result<Vec<String>, String> {
    let pos = argv.iter().position(|a| a == "--config-file" || a.starts_with("--config-file="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or("--config-file needs a path")?,
    };
    let settings = read_settings(&path)?;
    let cmd = Cli::command();
    let Some((idx, sub)) = argv
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| cmd.find_subcommand(a).map(|s| (i, s.clone())))
    else {
        return Ok(argv);
    };
    let mut extra = Vec::new();
    for (k, v) in settings {
        let flag = format!("--{k}");
        let known = sub.get_arguments().any(|a| a.get_long() == Some(k.as_str()));
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !known || given {
            continue;
        }
        let is_switch = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(k.as_str()))
            .is_some_and(|a| !a.get_action().takes_values());
        if is_switch {
            if matches!(v.as_str(), "true" | "yes" | "1") {
                extra.push(flag);
            }
        } else {
            extra.push(flag);
            extra.push(v);
        }
    }
    let mut out = argv[..=idx].to_vec();
    out.extend(extra);
    out.extend(argv[idx + 1..].iter().cloned());
    Ok(out)
}

fn main() -> ExitCode {
    let argv = match apply_settings(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
