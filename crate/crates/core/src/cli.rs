//! Command-line front end. `run` parses arguments, does the work and
//! returns the process exit status: 0 when every check passed, 1 when a
//! check failed (the report is still printed), 2 for usage, format and
//! cap errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::believability::{
    check_multi_all, check_single_all, lift, project, random_quasi_linear, random_standard,
    RelationPostulateId,
};
use crate::error::{Error, Result};
use crate::io::{
    model_from_file, model_to_file, multi_relation_to_file, operator_from_file, operator_to_file,
    parse_json, relation_from_file, single_relation_to_file, LoadedRelation,
};
use crate::logic::{parse_input_set, Language};
use crate::model::{
    choice_revise_via_model, generate_model, induced_operator, validate_model, ModelFlags,
};
use crate::operator::{
    check_all, random_operator, Bounds, ChoiceOperator, PostulateId, Universe, UniverseSpec,
};
use crate::report::{PostulateReport, Verdict, Witness};
use crate::synthesis::{
    check_sentential_postulates, footnote7_operator, synthesize_model,
    verify_roundtrip_extended_model, verify_roundtrip_model, verify_roundtrip_relation,
    verify_translation, RoundTripReport, SententialPostulateId,
};

#[derive(Debug, Parser)]
#[command(
    name = "chrev",
    version,
    about = "Choice revision: models, relations, postulates and synthesis"
)]
pub struct Cli {
    /// Number of propositional atoms
    #[arg(long, global = true, default_value_t = 2)]
    atoms: u8,
    /// Largest input set in the enumerated universe
    #[arg(long, global = true, default_value_t = 2)]
    max_input_size: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Lift,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationKindArg {
    Single,
    Multi,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Revise a model's K by a comma-separated list of formulas
    Revise {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Check postulates on an operator or a relation
    Check {
        #[arg(
            long,
            required_unless_present = "relation",
            conflicts_with = "relation"
        )]
        operator: Option<PathBuf>,
        #[arg(long)]
        relation: Option<PathBuf>,
        /// `all`, `basic`, `supplemented`, or a comma-separated list of names
        #[arg(long, default_value = "all")]
        postulates: String,
    },
    /// Build a relational model that induces the operator
    Synthesize {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the operator from a synthesized model (1, 2) or relation (4, 5)
    Roundtrip {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, value_parser = ["1", "2", "4", "5"])]
        theorem: String,
    },
    /// Lift a sentence relation to sets, or project a set relation to sentences
    Translate {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded artifact
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Built-in demonstrations
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    Model {
        /// Number of outcomes; drawn from the seed when absent
        #[arg(long)]
        size: Option<usize>,
        /// Require Cn({⊥}) among the outcomes
        #[arg(long)]
        x3: bool,
        /// Require every complete theory before Cn({⊥})
        #[arg(long)]
        leq3: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Operator {
        /// Uniformly random table instead of a model-induced operator
        #[arg(long)]
        random: bool,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Relation {
        #[arg(long, value_enum, default_value_t = RelationKindArg::Single)]
        kind: RelationKindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum DemoCommand {
    /// A sentential revision satisfying the basic postulates but not strong reciprocity
    Footnote7,
}

/// What a command produced: a JSON body, its text rendering, and whether
/// every check it ran passed.
struct Outcome {
    bounds: Option<Bounds>,
    body: Value,
    text: String,
    passed: bool,
}

impl Outcome {
    fn new(bounds: Option<Bounds>, body: Value, text: String, passed: bool) -> Self {
        Outcome {
            bounds,
            body,
            text,
            passed,
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let printed = match cli.format {
                Format::Text => o.text,
                Format::Json => {
                    let mut doc = json!({
                        "tool": "chrev",
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": command_name(&cli.command),
                    });
                    if let Some(b) = o.bounds {
                        doc["bounds"] = serde_json::to_value(b).expect("plain data");
                    }
                    doc["passed"] = Value::Bool(o.passed);
                    doc["report"] = o.body;
                    serde_json::to_string_pretty(&doc).expect("plain data") + "\n"
                }
            };
            if out.write_all(printed.as_bytes()).is_err() {
                return 2;
            }
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Revise { .. } => "revise",
        Command::Check { .. } => "check",
        Command::Synthesize { .. } => "synthesize",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Translate { .. } => "translate",
        Command::Gen {
            what: GenCommand::Model { .. },
        } => "gen model",
        Command::Gen {
            what: GenCommand::Operator { .. },
        } => "gen operator",
        Command::Gen {
            what: GenCommand::Relation { .. },
        } => "gen relation",
        Command::Demo { .. } => "demo footnote7",
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn check_out_path(path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        let parent = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(Error::Format(format!(
                "{}: directory does not exist",
                p.display()
            )));
        }
    }
    Ok(())
}

fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn load_operator(path: &Path) -> Result<ChoiceOperator> {
    operator_from_file(&parse_json(&read(path)?).map_err(|e| located(path, e))?)
        .map_err(|e| located(path, e))
}

fn load_relation(path: &Path) -> Result<LoadedRelation> {
    relation_from_file(&parse_json(&read(path)?).map_err(|e| located(path, e))?)
        .map_err(|e| located(path, e))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

/// Write the artifact to `out`, or return it for printing.
fn emit_artifact(value: Value, out: &Option<PathBuf>, what: &str) -> Result<(Value, String)> {
    let text = serde_json::to_string_pretty(&value).expect("plain data") + "\n";
    match out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
            Ok((
                json!({ "written": p.display().to_string() }),
                format!("{what} written to {}\n", p.display()),
            ))
        }
        None => Ok((value, text)),
    }
}

fn witness_text(w: &Witness) -> String {
    let inputs: Vec<String> = w.inputs.iter().map(|a| a.to_string()).collect();
    let mut s = format!("inputs [{}]", inputs.join(", "));
    if !w.outcomes.is_empty() {
        let outs: Vec<String> = w.outcomes.iter().map(|x| x.to_string()).collect();
        let _ = write!(s, ", outcomes [{}]", outs.join(", "));
    }
    s
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::PassWithSkips => "pass (some instances outside the universe skipped)",
        Verdict::Fail => "FAIL",
    }
}

fn reports_text<P: std::fmt::Display>(reports: &[PostulateReport<P>]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = write!(
            s,
            "{}: {} ({} instances)",
            r.postulate,
            verdict_text(r.verdict),
            r.instances
        );
        if let Some(w) = &r.witness {
            let _ = write!(s, "; witness {}", witness_text(w));
        }
        s.push('\n');
    }
    s
}

fn roundtrip_text(r: &RoundTripReport) -> String {
    let mut s = format!(
        "{:?} round trip: {} ({} compared)\n",
        r.kind,
        verdict_text(r.verdict),
        r.compared
    );
    if let Some(v) = &r.violated {
        let _ = writeln!(s, "violated: {v}");
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(s, "witness: {}", witness_text(w));
    }
    if let Some(m) = &r.mismatch {
        let _ = writeln!(
            s,
            "mismatch at {}: expected {}, regenerated {}",
            m.input, m.expected, m.regenerated
        );
    }
    if let Some(d) = &r.detail {
        let _ = writeln!(s, "{d}");
    }
    if let Some(h) = &r.artifact_hash {
        let _ = writeln!(s, "artifact sha256: {h}");
    }
    s
}

fn postulate_selection(text: &str) -> Result<Vec<PostulateId>> {
    match text {
        "all" => Ok(PostulateId::ALL.to_vec()),
        "basic" => Ok(PostulateId::BASIC.to_vec()),
        "supplemented" => Ok(PostulateId::SUPPLEMENTED.to_vec()),
        list => list.split(',').map(|s| s.trim().parse()).collect(),
    }
}

fn relation_selection(text: &str, single: bool) -> Result<Vec<RelationPostulateId>> {
    match text {
        "all" if single => Ok(RelationPostulateId::SINGLE.to_vec()),
        "all" | "standard" => Ok(RelationPostulateId::ALL.to_vec()),
        "basic" => Ok(RelationPostulateId::BASIC.to_vec()),
        list => list.split(',').map(|s| s.trim().parse()).collect(),
    }
}

fn universe(atoms: u8, max: usize) -> Result<Arc<Universe>> {
    Universe::enumerate(UniverseSpec::new(Language::new(atoms)?, max))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Revise { model, input } => {
            let m = model_from_file(&parse_json(&read(model)?).map_err(|e| located(model, e))?)
                .map_err(|e| located(model, e))?;
            if let Some(bad) = validate_model(&m).failures().next() {
                return Err(Error::InvalidModel(format!(
                    "{}: {} fails: {}",
                    model.display(),
                    bad.condition,
                    bad.witness.clone().unwrap_or_default()
                )));
            }
            let lang = Language::new(m.atoms())?;
            let a = parse_input_set(input, &lang)?;
            let x = choice_revise_via_model(&m, &a);
            let body = json!({ "input": to_value(&a), "outcome": to_value(&x), "outcome_text": x.to_string() });
            Ok(Outcome::new(None, body, format!("K *c {a} = {x}\n"), true))
        }
        Command::Check {
            operator: Some(path),
            postulates,
            ..
        } => {
            let ids = postulate_selection(postulates)?;
            let op = load_operator(path)?;
            let reports = check_all(&op, &ids);
            let passed = reports.iter().all(|r| r.passed());
            let bounds = Some(op.universe().spec().bounds());
            Ok(Outcome::new(
                bounds,
                to_value(&reports),
                reports_text(&reports),
                passed,
            ))
        }
        Command::Check {
            relation: Some(path),
            postulates,
            ..
        } => {
            let loaded = load_relation(path)?;
            let (reports, bounds) = match &loaded {
                LoadedRelation::Single(r) => (
                    check_single_all(r, &relation_selection(postulates, true)?)?,
                    None,
                ),
                LoadedRelation::Multi(mb) => {
                    let u = mb.domain().cloned().ok_or(Error::OutsideDomain)?;
                    let ids = relation_selection(postulates, false)?;
                    (check_multi_all(mb, &ids, &u)?, Some(u.spec().bounds()))
                }
            };
            let passed = reports.iter().all(|r| r.passed());
            Ok(Outcome::new(
                bounds,
                to_value(&reports),
                reports_text(&reports),
                passed,
            ))
        }
        Command::Check { .. } => Err(Error::Format("check needs --operator or --relation".into())),
        Command::Synthesize { operator, out } => {
            check_out_path(out)?;
            let op = load_operator(operator)?;
            let bounds = Some(op.universe().spec().bounds());
            match synthesize_model(&op) {
                Ok(m) => {
                    let (body, text) = emit_artifact(to_value(&model_to_file(&m)), out, "model")?;
                    Ok(Outcome::new(bounds, body, text, true))
                }
                Err(e @ (Error::PostulateViolation(_) | Error::AntisymmetryViolation(..))) => {
                    let body = json!({ "error": e.to_string() });
                    Ok(Outcome::new(
                        bounds,
                        body,
                        format!("synthesis rejected: {e}\n"),
                        false,
                    ))
                }
                Err(e) => Err(e),
            }
        }
        Command::Roundtrip { operator, theorem } => {
            let op = load_operator(operator)?;
            let report = match theorem.as_str() {
                "1" => verify_roundtrip_model(&op),
                "2" => verify_roundtrip_extended_model(&op),
                "4" => verify_roundtrip_relation(&op, false),
                _ => verify_roundtrip_relation(&op, true),
            };
            let bounds = Some(op.universe().spec().bounds());
            Ok(Outcome::new(
                bounds,
                to_value(&report),
                roundtrip_text(&report),
                report.passed(),
            ))
        }
        Command::Translate {
            relation,
            direction,
            out,
        } => {
            check_out_path(out)?;
            let loaded = load_relation(relation)?;
            let (u, artifact) = match (&loaded, direction) {
                (LoadedRelation::Single(r), Direction::Lift) => {
                    let u = universe(r.lang().atoms(), cli.max_input_size)?;
                    let file = multi_relation_to_file(&lift(r), &u)?;
                    (u, to_value(&file))
                }
                (LoadedRelation::Multi(mb), Direction::Project) => {
                    let u = mb.domain().cloned().ok_or(Error::OutsideDomain)?;
                    (u, to_value(&single_relation_to_file(&project(mb)?)))
                }
                (LoadedRelation::Single(_), Direction::Project) => {
                    return Err(Error::Format("project needs a multi relation".into()))
                }
                (LoadedRelation::Multi(_), Direction::Lift) => {
                    return Err(Error::Format("lift needs a single relation".into()))
                }
            };
            let report = verify_translation(&loaded, &u);
            let (written, _) = emit_artifact(artifact, out, "relation")?;
            let mut text = roundtrip_text(&report);
            if let Some(p) = out {
                let _ = writeln!(text, "relation written to {}", p.display());
            }
            let body = json!({ "round_trip": to_value(&report), "artifact": written });
            Ok(Outcome::new(
                Some(u.spec().bounds()),
                body,
                text,
                report.passed(),
            ))
        }
        Command::Gen { what } => generate(cli, what),
        Command::Demo {
            which: DemoCommand::Footnote7,
        } => footnote_demo(),
    }
}

fn seeded_size(seed: u64, lang: &Language, flags: ModelFlags) -> usize {
    let total = lang.belief_sets().len();
    let min = if flags.has_leq3 {
        lang.valuation_count()
    } else {
        1
    } + usize::from(flags.has_x3);
    let max = total.min(min + 7);
    ChaCha8Rng::seed_from_u64(seed ^ 0x5151).gen_range(min..=max)
}

fn generate(cli: &Cli, what: &GenCommand) -> Result<Outcome> {
    let lang = Language::new(cli.atoms)?;
    let seed = cli.seed;
    match what {
        GenCommand::Model {
            size,
            x3,
            leq3,
            out,
        } => {
            check_out_path(out)?;
            let flags = ModelFlags::new(*x3, *leq3);
            let size = size.unwrap_or_else(|| seeded_size(seed, &lang, flags));
            let m = generate_model(seed, &lang, size, flags)?;
            let (body, text) = emit_artifact(to_value(&model_to_file(&m)), out, "model")?;
            Ok(Outcome::new(None, body, text, true))
        }
        GenCommand::Operator { random, size, out } => {
            check_out_path(out)?;
            let u = universe(cli.atoms, cli.max_input_size)?;
            let op = if *random {
                random_operator(seed, &u)
            } else {
                let size = size.unwrap_or_else(|| seeded_size(seed, &lang, ModelFlags::default()));
                induced_operator(
                    &generate_model(seed, &lang, size, ModelFlags::default())?,
                    &u,
                )?
            };
            let (body, text) = emit_artifact(to_value(&operator_to_file(&op)), out, "operator")?;
            Ok(Outcome::new(Some(u.spec().bounds()), body, text, true))
        }
        GenCommand::Relation { kind, out } => {
            check_out_path(out)?;
            let (bounds, file) = match kind {
                RelationKindArg::Single => (
                    None,
                    single_relation_to_file(&random_quasi_linear(seed, &lang)?),
                ),
                RelationKindArg::Multi => {
                    let u = universe(cli.atoms, cli.max_input_size)?;
                    let mb = random_standard(seed, &u)?;
                    (Some(u.spec().bounds()), multi_relation_to_file(&mb, &u)?)
                }
            };
            let (body, text) = emit_artifact(to_value(&file), out, "relation")?;
            Ok(Outcome::new(bounds, body, text, true))
        }
    }
}

/// Passes when the demonstration reproduces: the basic sentential
/// postulates and extensionality hold and strong reciprocity fails.
fn footnote_demo() -> Result<Outcome> {
    let lang = Language::new(3)?;
    let op = footnote7_operator(&lang)?;
    let reports = check_sentential_postulates(&op);
    let basic_pass = reports
        .iter()
        .filter(|r| r.postulate.is_basic())
        .all(|r| r.passed());
    let ext = reports
        .iter()
        .find(|r| r.postulate == SententialPostulateId::Extensionality);
    let strong = reports
        .iter()
        .find(|r| r.postulate == SententialPostulateId::StrongReciprocity)
        .expect("checked");
    let reproduced = basic_pass && ext.is_some_and(|r| r.passed()) && !strong.passed();

    let mut text = format!(
        "(∗1)–(∗5): {}; strong reciprocity: {}\n",
        if basic_pass { "pass" } else { "FAIL" },
        verdict_text(strong.verdict)
    );
    if let Some(w) = &strong.witness {
        let n = w.inputs.len();
        let _ = writeln!(text, "cycle of length {n}:");
        for i in 0..n {
            let next = (i + 1) % n;
            let _ = writeln!(
                text,
                "  {} ∈ K ∗ {} = {}",
                w.inputs[i].as_slice()[0],
                w.inputs[next].as_slice()[0],
                w.outcomes[next]
            );
        }
    }
    text.push_str(&reports_text(&reports));
    let body = json!({ "reproduced": reproduced, "postulates": to_value(&reports) });
    Ok(Outcome::new(
        Some(Bounds {
            atoms: 3,
            max_input_size: 1,
        }),
        body,
        text,
        reproduced,
    ))
}
