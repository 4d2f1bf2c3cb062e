//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cohomology::{obstruction, Ring};
use crate::corpus::{self, EXAMPLES};
use crate::document::{parse_scenario, Document};
use crate::error::Error;
use crate::extendability::is_extendable_at;
use crate::report::{
    build_report, emit_report, render_details, section_ref, section_verdict, verdict_text, Report, ReportOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "contextuality", version, about = "Contextuality analysis of empirical models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RingArg {
    Z2,
    Z,
    Both,
}

impl RingArg {
    fn rings(self) -> Vec<Ring> {
        match self {
            RingArg::Z2 => vec![Ring::Mod2],
            RingArg::Z => vec![Ring::Integers],
            RingArg::Both => vec![Ring::Integers, Ring::Mod2],
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file: schema, cover, no-signalling, support consistency.
    Validate { file: PathBuf },
    /// Decide extendability of every support section by global-section search.
    Classify { file: PathBuf },
    /// Decide the cohomological obstruction for one or all support sections.
    Obstruction {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        ring: RingArg,
        #[arg(long, requires = "section", conflicts_with = "all")]
        context: Option<usize>,
        /// Comma-joined outcomes in the context's measurement order.
        #[arg(long, requires = "context", allow_hyphen_values = true)]
        section: Option<String>,
        #[arg(long)]
        all: bool,
        /// Print witness families and unsolvability certificates.
        #[arg(long)]
        witness: bool,
    },
    /// Full analysis report.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        ring: RingArg,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        witness: bool,
    },
    /// Bundled example scenarios.
    Examples {
        #[command(subcommand)]
        action: Option<ExamplesAction>,
    },
}

#[derive(Debug, Subcommand)]
enum ExamplesAction {
    List,
    Show {
        name: String,
    },
    Run {
        name: String,
        #[arg(long, value_enum, default_value = "both")]
        ring: RingArg,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        witness: bool,
    },
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Verification(_) => EXIT_VERIFICATION,
            Error::Signalling(_) | Error::PossibilisticSignalling(_) | Error::InvalidModel(_) | Error::InvalidScenario(_) => {
                EXIT_INVALID
            }
            Error::Domain(_) | Error::Dimension(_) => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { file } => validate(&load(&file, err)?, out),
        Command::Classify { file } => classify(&load(&file, err)?, out),
        Command::Obstruction { file, ring, context, section, all: _, witness } => {
            let doc = load(&file, err)?;
            match (context, section) {
                (Some(c), Some(s)) => single_obstruction(&doc, ring, c, &s, witness, out),
                _ => all_obstructions(&doc, ring, witness, out),
            }
        }
        Command::Report { file, ring, json, witness } => report(&load(&file, err)?, ring, json, witness, out, err),
        Command::Examples { action } => match action.unwrap_or(ExamplesAction::List) {
            ExamplesAction::List => {
                for ex in EXAMPLES {
                    let doc = ex.load();
                    writeln!(out, "{:<18} {}", ex.name, doc.source.description.as_deref().unwrap_or(""))?;
                }
                Ok(EXIT_OK)
            }
            ExamplesAction::Show { name } => {
                out.write_all(example(&name)?.source.as_bytes())?;
                Ok(EXIT_OK)
            }
            ExamplesAction::Run { name, ring, json, witness } => {
                report(&example(&name)?.load(), ring, json, witness, out, err)
            }
        },
    }
}

fn example(name: &str) -> std::result::Result<&'static corpus::Example, Failure> {
    corpus::find(name).ok_or_else(|| {
        let names: Vec<&str> = EXAMPLES.iter().map(|e| e.name).collect();
        Failure::usage(format!("unknown example {name:?}; available: {}", names.join(", ")))
    })
}

/// Reads a scenario file. A missing path whose stem names a bundled example
/// falls back to that example.
fn load(path: &Path, err: &mut dyn Write) -> std::result::Result<Document, Failure> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
            match corpus::find(stem) {
                Some(ex) if !path.exists() => {
                    writeln!(err, "note: {} not found; using the bundled example {}", path.display(), ex.name)?;
                    ex.source.to_string()
                }
                _ => return Err(Failure::usage(format!("cannot read {}: {e}", path.display()))),
            }
        }
    };
    parse_scenario(&text).map_err(|e| Failure {
        code: EXIT_INVALID,
        message: format!("{} is not a valid scenario:\n{e}", path.display()),
    })
}

fn analysed(doc: &Document, rings: Vec<Ring>, details: bool) -> std::result::Result<Report, Failure> {
    Ok(build_report(doc, &ReportOptions { rings, details })?)
}

fn print_invalid(r: &Report, out: &mut dyn Write) -> Outcome {
    writeln!(out, "invalid model:")?;
    for e in &r.validation.errors {
        writeln!(out, "  {e}")?;
    }
    Ok(EXIT_INVALID)
}

fn validate(doc: &Document, out: &mut dyn Write) -> Outcome {
    let r = analysed(doc, Vec::new(), false)?;
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    if !r.validation.valid {
        return print_invalid(&r, out);
    }
    let kind = if r.no_signalling.is_some() { "no-signalling distribution" } else { "support" };
    writeln!(
        out,
        "valid: {} measurements, {} contexts, {kind}, {} support sections",
        r.measurements.len(),
        r.contexts.len(),
        r.contexts.iter().map(|c| c.support.len()).sum::<usize>()
    )?;
    Ok(EXIT_OK)
}

fn classify(doc: &Document, out: &mut dyn Write) -> Outcome {
    let r = analysed(doc, Vec::new(), false)?;
    if !r.validation.valid {
        return print_invalid(&r, out);
    }
    let c = r.classification.as_ref().expect("valid report is classified");
    writeln!(out, "{}; {} global sections", verdict_text(c.verdict), c.global_sections)?;
    for s in &c.non_extendable {
        writeln!(out, "  non-extendable: {}", section_ref(&r.contexts, s.context, &s.section))?;
    }
    Ok(EXIT_OK)
}

fn single_obstruction(
    doc: &Document,
    ring: RingArg,
    context: usize,
    tuple: &str,
    witness: bool,
    out: &mut dyn Write,
) -> Outcome {
    let r = analysed(doc, Vec::new(), false)?;
    if !r.validation.valid {
        return print_invalid(&r, out);
    }
    let model = doc.support_model()?;
    let scenario = model.scenario();
    let ctx = scenario
        .contexts()
        .get(context)
        .ok_or_else(|| Failure::usage(format!("context {context} out of range (0..{})", scenario.contexts().len())))?;
    let t = scenario.parse_section(&ctx.members, tuple)?;
    if !model.contains(context, &t) {
        return Err(Failure::usage(format!(
            "section {tuple} is not in the support of context {context} ({})",
            r.contexts[context].label
        )));
    }
    let extendable = is_extendable_at(&model, context, &t)?;
    for ring in ring.rings() {
        let result = obstruction(&model, context, &t, ring)?;
        let v = section_verdict(&model, &result, extendable, witness)?;
        let verdict = match (v.vanishes, v.extendable) {
            (false, _) => "does not vanish",
            (true, true) => "vanishes (section is extendable)",
            (true, false) => "vanishes (section is not extendable: false positive)",
        };
        writeln!(out, "{} over {ring}: obstruction {verdict}", section_ref(&r.contexts, context, &v.section))?;
        out.write_all(render_details(&r.contexts, &v).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn all_obstructions(doc: &Document, ring: RingArg, witness: bool, out: &mut dyn Write) -> Outcome {
    let r = analysed(doc, ring.rings(), witness)?;
    if !r.validation.valid {
        return print_invalid(&r, out);
    }
    for rr in &r.obstructions {
        writeln!(out, "{}: {}/{} sections non-vanishing", rr.ring, rr.non_vanishing, rr.total)?;
        for v in &rr.sections {
            let verdict = if v.vanishes { "vanishes" } else { "does not vanish" };
            let note = if v.vanishes && !v.extendable { " (false positive)" } else { "" };
            writeln!(out, "  {}: {verdict}{note}", section_ref(&r.contexts, v.context, &v.section))?;
            out.write_all(render_details(&r.contexts, v).as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

fn report(doc: &Document, ring: RingArg, json: bool, witness: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let r = analysed(doc, ring.rings(), witness)?;
    out.write_all(emit_report(&r, json).as_bytes())?;
    if r.validation.valid {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "model is invalid")?;
        Ok(EXIT_INVALID)
    }
}
