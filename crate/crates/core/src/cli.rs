//! The `idxqa` command line.
//!
//! Every subcommand reads JSON lines and writes JSON lines (or a single JSON
//! document for reports). Records are processed in fixed-size chunks so a
//! corpus never has to fit in memory; within a chunk work may run in
//! parallel, but output order always follows input order.
//!
//! Output files are written to a temporary sibling and moved into place only
//! when the command succeeds, so a failed run leaves no partial output.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::codec::{self, DisplayOffset, RepairReport, Representation};
use crate::dataset::{self, DatasetDescriptor, DatasetFormat, SparsityAccumulator};
use crate::error::Error;
use crate::exec::Exec;
use crate::linkback::{link_back, LinkbackConfig};
use crate::metrics::{evaluate_corpus, Aggregation, Regime};
use crate::span::{AnswerSet, Granularity, QaInstance, Span};
use crate::trim::{trim, TrimResult, TrimStats};

const CHUNK: usize = 1024;
const DEFAULT_BUDGET: usize = 1024;
const DEFAULT_TEMPLATE: &str = "question: {question} context: {context}";

#[derive(Debug, Parser)]
#[command(name = "idxqa", version, about = "Index-sequence tooling for extractive QA")]
pub struct Cli {
    /// TOML file with default values for budget, delta and template.
    #[arg(long, env = "IDXQA_CONFIG", global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render model inputs (indexed context + question) and encoded targets.
    Render(RenderArgs),
    /// Encode gold answers as index sequences.
    Encode(EncodeArgs),
    /// Repair raw generated index text into answer spans.
    Decode(DecodeArgs),
    /// Trim contexts to a token budget around the gold answer.
    Trim(TrimArgs),
    /// Score predicted spans against gold answers.
    Eval(EvalArgs),
    /// Corpus statistics: span counts and label sparsity.
    Stats(StatsArgs),
    /// Map free-text answers back onto context sentences.
    Linkback(LinkbackArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Native,
    Multispanqa,
    Bioasq,
    Mashqa,
    Wikiqa,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Native => DatasetFormat::Native,
            FormatArg::Multispanqa => DatasetFormat::MultiSpanQa,
            FormatArg::Bioasq => DatasetFormat::BioAsq,
            FormatArg::Mashqa => DatasetFormat::MashQa,
            FormatArg::Wikiqa => DatasetFormat::WikiQa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Fi,
    Si,
}

impl From<RepArg> for Representation {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Fi => Representation::FullIndex,
            RepArg::Si => Representation::SpanIndex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Sentence,
    Token,
    Em,
    Pm,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Sentence => Regime::SentenceLevel,
            RegimeArg::Token => Regime::TokenLevel,
            RegimeArg::Em => Regime::ExactMatch,
            RegimeArg::Pm => Regime::PartialMatch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    Macro,
    Micro,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Macro => Aggregation::MacroOverInstances,
            AggregationArg::Micro => Aggregation::MicroOverSpans,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Context corpus.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output JSONL; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fi")]
    pub rep: RepArg,
    /// Display offset; defaults to 1 for sentences and 0 for tokens.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub offset: Option<u64>,
    /// Omit index markers from the context.
    #[arg(long)]
    pub no_index: bool,
    /// Input template with `{question}` and `{context}` placeholders.
    #[arg(long)]
    pub template: Option<String>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fi")]
    pub rep: RepArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub offset: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Predictions as JSONL `{id, raw}` (`output_text` and `target_text` are accepted for `raw`).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Contexts the predictions refer to.
    #[arg(long)]
    pub contexts: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: FormatArg,
    /// Output JSONL; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub rep: RepArg,
    /// Display offset the model was trained with; defaults by granularity.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub offset: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrimArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Trimmed native JSONL.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Stats JSON; stdout when omitted.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Token budget per context [default: 1024].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted spans as JSONL `{id, spans}` (`gold` is accepted for `spans`).
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold corpus.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: FormatArg,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Defaults to macro for sentence/token and micro for em/pm.
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Trim each instance to this budget before counting.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trim_budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LinkbackArgs {
    /// Generated answers as JSONL `{id, text}` (`output_text` is accepted for `text`).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub contexts: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: FormatArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Keep sentences scoring within this margin of the best [default: 0.05].
    #[arg(long, value_parser = parse_delta)]
    pub delta: Option<f64>,
    /// Score raw overlap counts instead of dividing by sentence length.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub case_sensitive: bool,
    #[arg(long)]
    pub keep_punctuation: bool,
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("delta must be a finite non-negative number".into())
    }
}

/// Values read from the `--config` / `IDXQA_CONFIG` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub budget: Option<usize>,
    pub delta: Option<f64>,
    pub template: Option<String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<ConfigFile, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let cfg: ConfigFile =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        if cfg.budget == Some(0) {
            return Err(CliError::Usage("config: budget must be at least 1".into()));
        }
        if let Some(d) = cfg.delta {
            parse_delta(&d.to_string()).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
        }
    }
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(Error::record(0, "<input>", msg.into()))
}

/// Parses arguments, runs the command and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            eprintln!("{msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Render(a) => render(a, &config),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Trim(a) => trim_cmd(a, &config),
        Command::Eval(a) => eval(a),
        Command::Stats(a) => stats(a),
        Command::Linkback(a) => linkback(a, &config),
    }
}

/// A destination that only materializes on [`Sink::commit`].
enum Sink {
    Stdout(BufWriter<io::Stdout>),
    File {
        path: PathBuf,
        writer: BufWriter<NamedTempFile>,
    },
}

impl Sink {
    fn open(path: Option<&Path>) -> Result<Sink, CliError> {
        match path {
            None => Ok(Sink::Stdout(BufWriter::new(io::stdout()))),
            Some(p) => {
                let dir = match p.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                let tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(p, e))?;
                Ok(Sink::File {
                    path: p.to_path_buf(),
                    writer: BufWriter::new(tmp),
                })
            }
        }
    }

    fn line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let w: &mut dyn Write = match self {
            Sink::Stdout(w) => w,
            Sink::File { writer, .. } => writer,
        };
        serde_json::to_writer(&mut *w, value).map_err(Error::from)?;
        w.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
        Ok(())
    }

    fn commit(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut w) => w.flush().map_err(|e| Error::io("<stdout>", e).into()),
            Sink::File { path, writer } => {
                let tmp = writer.into_inner().map_err(|e| Error::io(&path, e.into_error()))?;
                tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
                Ok(())
            }
        }
    }
}

type InstanceIter = Box<dyn Iterator<Item = Result<QaInstance, Error>>>;

fn instances(path: &Path, format: FormatArg) -> Result<InstanceIter, CliError> {
    match format {
        FormatArg::Native => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            Ok(Box::new(dataset::read_native(BufReader::new(file))))
        }
        other => {
            let all = dataset::load(&DatasetDescriptor::new(other.into(), path))?;
            Ok(Box::new(all.into_iter().map(Ok)))
        }
    }
}

fn json_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<impl Iterator<Item = Result<T, Error>>, CliError> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(l) if l.trim().is_empty()))
        .map(|(i, line)| {
            let line = line.map_err(|e| Error::record(i, "<line>", e))?;
            serde_json::from_str(&line).map_err(|e| Error::record(i, "<json>", e))
        }))
}

/// Pulls chunks from `items`, maps each chunk with `f` under the default
/// execution strategy and hands results to `sink` in input order.
fn chunked<T, U, F, S>(items: impl Iterator<Item = Result<T, Error>>, f: F, mut sink: S) -> Result<(), CliError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, CliError> + Sync + Send,
    S: FnMut(U) -> Result<(), CliError>,
{
    let exec = Exec::default();
    let mut items = items.peekable();
    while items.peek().is_some() {
        let chunk = items.by_ref().take(CHUNK).collect::<Result<Vec<T>, Error>>()?;
        for out in exec.map(&chunk, &f) {
            sink(out?)?;
        }
    }
    Ok(())
}

fn offset_for(flag: Option<u64>, granularity: Granularity) -> DisplayOffset {
    match flag {
        Some(v) => DisplayOffset::try_from(v).expect("validated by clap"),
        None => DisplayOffset::default_for(granularity),
    }
}

#[derive(Serialize)]
struct RenderMeta<'a> {
    template: &'a str,
    representation: Representation,
    display_offset: DisplayOffset,
    with_index: bool,
}

#[derive(Serialize)]
struct RenderRecord<'a> {
    id: String,
    input_text: String,
    target_text: Option<String>,
    meta: RenderMeta<'a>,
}

pub fn fill_template(template: &str, question: &str, context: &str) -> String {
    template.replace("{question}", question).replace("{context}", context)
}

fn render(a: &RenderArgs, config: &ConfigFile) -> Result<(), CliError> {
    let template = a
        .template
        .clone()
        .or_else(|| config.template.clone())
        .unwrap_or_else(|| DEFAULT_TEMPLATE.to_string());
    if !template.contains("{context}") {
        return Err(CliError::Usage("template must contain {context}".into()));
    }
    let rep: Representation = a.rep.into();
    let items = instances(&a.input.input, a.input.format)?;
    let mut out = Sink::open(a.output.as_deref())?;
    chunked(
        items,
        |inst| {
            let offset = offset_for(a.offset, inst.granularity());
            let context = codec::render_context(inst, !a.no_index, offset);
            Ok(RenderRecord {
                id: inst.id().to_string(),
                input_text: fill_template(&template, &inst.question().join(" "), &context),
                target_text: inst.gold().map(|g| codec::encode(g, rep, offset).to_text()),
                meta: RenderMeta {
                    template: &template,
                    representation: rep,
                    display_offset: offset,
                    with_index: !a.no_index,
                },
            })
        },
        |rec| out.line(&rec),
    )?;
    out.commit()
}

#[derive(Serialize)]
struct EncodeRecord {
    id: String,
    representation: Representation,
    display_offset: DisplayOffset,
    target_text: String,
}

fn encode(a: &EncodeArgs) -> Result<(), CliError> {
    let rep: Representation = a.rep.into();
    let items = instances(&a.input.input, a.input.format)?;
    let mut out = Sink::open(a.output.as_deref())?;
    chunked(
        items,
        |inst| {
            let gold = inst.gold().ok_or_else(|| Error::MissingGold(inst.id().to_string()))?;
            let offset = offset_for(a.offset, inst.granularity());
            Ok(EncodeRecord {
                id: inst.id().to_string(),
                representation: rep,
                display_offset: offset,
                target_text: codec::encode(gold, rep, offset).to_text(),
            })
        },
        |rec| out.line(&rec),
    )?;
    out.commit()
}

#[derive(Deserialize)]
struct RawPrediction {
    id: String,
    #[serde(alias = "output_text", alias = "target_text")]
    raw: Option<String>,
}

#[derive(Serialize)]
struct DecodeRecord {
    id: String,
    spans: Vec<Span>,
    repair_report: RepairReport,
    skipped_tokens: usize,
}

/// Unit count and granularity of every context, keyed by id.
fn context_shapes(path: &Path, format: FormatArg) -> Result<HashMap<String, (usize, Granularity)>, CliError> {
    let mut shapes = HashMap::new();
    for inst in instances(path, format)? {
        let inst = inst?;
        if shapes
            .insert(inst.id().to_string(), (inst.n_units(), inst.granularity()))
            .is_some()
        {
            return Err(Error::DuplicateId(inst.id().to_string()).into());
        }
    }
    Ok(shapes)
}

fn decode(a: &DecodeArgs) -> Result<(), CliError> {
    let rep: Representation = a.rep.into();
    let shapes = context_shapes(&a.contexts, a.format)?;
    let preds = json_lines::<RawPrediction>(&a.input)?;
    let mut out = Sink::open(a.output.as_deref())?;
    chunked(
        preds,
        |p| {
            let &(n_units, granularity) = shapes
                .get(&p.id)
                .ok_or_else(|| data(format!("prediction {:?} has no matching context", p.id)))?;
            let offset = offset_for(a.offset, granularity);
            let parsed = codec::parse_index_text(p.raw.as_deref().unwrap_or(""), rep, n_units, offset);
            let (answer, report) = codec::decode(&parsed.sequence);
            Ok(DecodeRecord {
                id: p.id.clone(),
                spans: answer.spans().to_vec(),
                repair_report: report,
                skipped_tokens: parsed.skipped,
            })
        },
        |rec| out.line(&rec),
    )?;
    out.commit()
}

fn trim_cmd(a: &TrimArgs, config: &ConfigFile) -> Result<(), CliError> {
    let budget = a.budget.map(|b| b as usize).or(config.budget).unwrap_or(DEFAULT_BUDGET);
    let items = instances(&a.input.input, a.input.format)?;
    let mut out = Sink::open(Some(&a.output))?;
    let mut stats_out = Sink::open(a.stats.as_deref())?;
    let mut stats = TrimStats::default();
    chunked(
        items,
        |inst| Ok(trim(inst, budget)?),
        |result| {
            stats = stats.combine(TrimStats::observe(&result));
            match result {
                TrimResult::Trimmed { instance, .. } => out.line(&dataset::NativeRecord::from_instance(&instance)),
                TrimResult::Dropped { .. } => Ok(()),
            }
        },
    )?;
    stats_out.line(&stats.finish())?;
    out.commit()?;
    stats_out.commit()
}

#[derive(Deserialize)]
struct SpanPrediction {
    id: String,
    #[serde(alias = "gold")]
    spans: Option<Vec<[usize; 2]>>,
}

fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let regime: Regime = a.regime.into();
    let aggregation = a
        .aggregation
        .map(Aggregation::from)
        .unwrap_or_else(|| regime.default_aggregation());

    let mut golds: Vec<(String, AnswerSet)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut granularity: Option<Granularity> = None;
    for inst in instances(&a.gold, a.format)? {
        let inst = inst?;
        let g = *granularity.get_or_insert(inst.granularity());
        if g != inst.granularity() {
            return Err(Error::GranularityMismatch {
                expected: g,
                found: inst.granularity(),
            }
            .into());
        }
        let gold = inst
            .gold()
            .cloned()
            .ok_or_else(|| Error::MissingGold(inst.id().to_string()))?;
        if index.insert(inst.id().to_string(), golds.len()).is_some() {
            return Err(Error::DuplicateId(inst.id().to_string()).into());
        }
        golds.push((inst.id().to_string(), gold));
    }
    let required = match regime {
        Regime::SentenceLevel => Some(Granularity::Sentence),
        Regime::TokenLevel => Some(Granularity::Token),
        _ => None,
    };
    if let (Some(req), Some(found)) = (required, granularity) {
        if req != found {
            return Err(Error::GranularityMismatch { expected: req, found }.into());
        }
    }

    let mut preds: Vec<Option<AnswerSet>> = vec![None; golds.len()];
    for (i, p) in json_lines::<SpanPrediction>(&a.pred)?.enumerate() {
        let p = p?;
        let &slot = index
            .get(&p.id)
            .ok_or_else(|| data(format!("prediction {:?} has no gold instance", p.id)))?;
        if preds[slot].is_some() {
            return Err(Error::DuplicateId(p.id).into());
        }
        let n_units = golds[slot].1.n_units();
        let pairs = p.spans.unwrap_or_default();
        let answer = dataset::spans_from_pairs(&pairs, n_units).map_err(|e| Error::record(i, "spans", e))?;
        preds[slot] = Some(answer);
    }
    let missing: Vec<&str> = golds
        .iter()
        .zip(&preds)
        .filter(|(_, p)| p.is_none())
        .map(|((id, _), _)| id.as_str())
        .collect();
    if !missing.is_empty() {
        eprintln!(
            "warning: {} instances have no prediction and score as empty answers",
            missing.len()
        );
    }
    let preds: Vec<AnswerSet> = preds
        .into_iter()
        .zip(&golds)
        .map(|(p, (_, g))| p.unwrap_or_else(|| AnswerSet::empty(g.n_units())))
        .collect();
    let pairs: Vec<_> = preds
        .iter()
        .zip(&golds)
        .map(|(p, (id, g))| (p, g, id.as_str()))
        .collect();
    let report = evaluate_corpus(&pairs, regime, aggregation)?;

    let mut out = Sink::open(a.output.as_deref())?;
    out.line(&report)?;
    out.commit()
}

fn stats(a: &StatsArgs) -> Result<(), CliError> {
    let mut acc = SparsityAccumulator::default();
    let budget = a.trim_budget.map(|b| b as usize);
    let items = instances(&a.input.input, a.input.format)?;
    chunked(
        items,
        |inst| match budget {
            Some(b) => Ok(trim(inst, b)?.instance().cloned()),
            None => Ok(Some(inst.clone())),
        },
        |inst| match inst {
            Some(i) => Ok(acc.push(&i)?),
            None => Ok(()),
        },
    )?;
    let mut out = Sink::open(a.output.as_deref())?;
    out.line(&acc.finish())?;
    out.commit()
}

#[derive(Deserialize)]
struct TextPrediction {
    id: String,
    #[serde(alias = "output_text")]
    text: String,
}

#[derive(Serialize)]
struct SpansRecord {
    id: String,
    spans: Vec<Span>,
}

fn linkback(a: &LinkbackArgs, config: &ConfigFile) -> Result<(), CliError> {
    let cfg = LinkbackConfig {
        delta: a.delta.or(config.delta).unwrap_or(LinkbackConfig::default().delta),
        normalize: !a.no_normalize,
        lowercase: !a.case_sensitive,
        skip_punctuation: !a.keep_punctuation,
    };
    let mut contexts: HashMap<String, QaInstance> = HashMap::new();
    for inst in instances(&a.contexts, a.format)? {
        let inst = inst?;
        if contexts.insert(inst.id().to_string(), inst.clone()).is_some() {
            return Err(Error::DuplicateId(inst.id().to_string()).into());
        }
    }
    let mut seen = HashSet::new();
    let preds = json_lines::<TextPrediction>(&a.input)?;
    let mut out = Sink::open(a.output.as_deref())?;
    chunked(
        preds,
        |p| {
            let inst = contexts
                .get(&p.id)
                .ok_or_else(|| data(format!("answer {:?} has no matching context", p.id)))?;
            let answer = link_back(&p.text, inst, &cfg)?;
            Ok(SpansRecord {
                id: p.id.clone(),
                spans: answer.spans().to_vec(),
            })
        },
        |rec| {
            if !seen.insert(rec.id.clone()) {
                return Err(Error::DuplicateId(rec.id).into());
            }
            out.line(&rec)
        },
    )?;
    out.commit()
}
