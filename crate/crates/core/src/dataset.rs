//! Dataset ingestion and corpus statistics.
//!
//! The native on-disk shape is JSON lines, one instance per line:
//!
//! ```text
//! {"id":"x","question":["when"],"units":["a","b","c"],"granularity":"token","gold":[[1,1]]}
//! ```
//!
//! Spans are 0-based and inclusive; `gold` is omitted for unlabeled data.
//! Readers for the public dataset releases convert into the same records:
//!
//! * MultiSpanQA and BioASQ (BIO-tagged release): a JSON object with a
//!   `data` array of `{id, question: [tokens], context: [tokens], label?: [B|I|O]}`.
//! * MASHQA: SQuAD-style JSON, `data[].paragraphs[]` with `context`, optional
//!   `sent_list`, and `qas[]` of `{id, question, answers: [{text, answer_start}], is_impossible?}`.
//!   A sentence is gold when it overlaps any answer's character range.
//! * WikiQA: the tab-separated release with a header row
//!   `QuestionID Question DocumentID DocumentTitle SentenceID Sentence Label`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segment::{sentence_bounds, tokenize};
use crate::span::{AnswerSet, Granularity, QaInstance, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    MultiSpanQa,
    BioAsq,
    MashQa,
    WikiQa,
    Native,
}

impl DatasetFormat {
    /// Granularity fixed by the format; `None` for native files, which
    /// declare it per record.
    pub fn granularity(self) -> Option<Granularity> {
        match self {
            DatasetFormat::MultiSpanQa | DatasetFormat::BioAsq => Some(Granularity::Token),
            DatasetFormat::MashQa | DatasetFormat::WikiQa => Some(Granularity::Sentence),
            DatasetFormat::Native => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetDescriptor {
    pub format: DatasetFormat,
    /// Required granularity. Defaults to the one the format fixes.
    pub granularity: Option<Granularity>,
    pub path: PathBuf,
}

impl DatasetDescriptor {
    pub fn new(format: DatasetFormat, path: impl Into<PathBuf>) -> Self {
        DatasetDescriptor {
            format,
            granularity: format.granularity(),
            path: path.into(),
        }
    }
}

/// Native JSONL record. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeRecord {
    pub id: String,
    pub question: Vec<String>,
    pub units: Vec<String>,
    pub granularity: Granularity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<Vec<[usize; 2]>>,
}

impl NativeRecord {
    pub fn from_instance(inst: &QaInstance) -> Self {
        NativeRecord {
            id: inst.id().to_string(),
            question: inst.question().to_vec(),
            units: inst.units().to_vec(),
            granularity: inst.granularity(),
            gold: inst
                .gold()
                .map(|g| g.spans().iter().map(|s| [s.start(), s.end()]).collect()),
        }
    }

    pub fn into_instance(self, index: usize) -> Result<QaInstance> {
        let n = self.units.len();
        if n == 0 {
            return Err(Error::record(index, "units", "context has no units"));
        }
        let gold = match self.gold {
            Some(pairs) => Some(spans_from_pairs(&pairs, n).map_err(|e| Error::record(index, "gold", e))?),
            None => None,
        };
        QaInstance::new(self.id, self.question, self.units, self.granularity, gold)
            .map_err(|e| Error::record(index, "units", e))
    }
}

pub(crate) fn spans_from_pairs(pairs: &[[usize; 2]], n_units: usize) -> Result<AnswerSet> {
    let spans = pairs
        .iter()
        .map(|&[s, e]| Span::new(s, e))
        .collect::<Result<Vec<_>>>()?;
    AnswerSet::new(spans, n_units)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Streams native records from a reader, skipping blank lines.
pub fn read_native<R: BufRead>(reader: R) -> impl Iterator<Item = Result<QaInstance>> {
    reader
        .lines()
        .enumerate()
        .filter(|(_, line)| !matches!(line, Ok(l) if l.trim().is_empty()))
        .map(|(index, line)| {
            let line = line.map_err(|e| Error::record(index, "<line>", e))?;
            let record: NativeRecord = serde_json::from_str(&line).map_err(|e| Error::record(index, "<json>", e))?;
            record.into_instance(index)
        })
}

pub fn write_native<W: Write>(mut writer: W, inst: &QaInstance) -> Result<()> {
    serde_json::to_writer(&mut writer, &NativeRecord::from_instance(inst))?;
    writer.write_all(b"\n").map_err(|e| Error::io("<output>", e))
}

pub fn save_native(path: &Path, instances: &[QaInstance]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for inst in instances {
        write_native(&mut w, inst)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load(desc: &DatasetDescriptor) -> Result<Vec<QaInstance>> {
    if let (Some(want), Some(fixed)) = (desc.granularity, desc.format.granularity()) {
        if want != fixed {
            return Err(Error::GranularityMismatch {
                expected: want,
                found: fixed,
            });
        }
    }
    let instances = match desc.format {
        DatasetFormat::Native => read_native(open(&desc.path)?).collect::<Result<Vec<_>>>()?,
        DatasetFormat::MultiSpanQa | DatasetFormat::BioAsq => read_bio_tagged(open(&desc.path)?)?,
        DatasetFormat::MashQa => read_mashqa(open(&desc.path)?)?,
        DatasetFormat::WikiQa => read_wikiqa(open(&desc.path)?)?,
    };
    if let Some(want) = desc.granularity {
        for inst in &instances {
            if inst.granularity() != want {
                return Err(Error::GranularityMismatch {
                    expected: want,
                    found: inst.granularity(),
                });
            }
        }
    }
    Ok(instances)
}

fn tokens_of(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(str::to_string).collect()
}

#[derive(Deserialize)]
struct BioFile {
    data: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
struct BioRecord {
    id: String,
    question: Vec<String>,
    context: Vec<String>,
    #[serde(default)]
    label: Option<Vec<String>>,
}

/// Spans from BIO tags. `I` after `O` opens a span; `B` always does.
pub fn bio_to_spans(tags: &[String]) -> std::result::Result<Vec<Span>, String> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, tag) in tags.iter().enumerate() {
        match tag.as_str() {
            "O" => {
                if let Some(s) = open.take() {
                    spans.push(Span::new(s, i - 1).unwrap());
                }
            }
            "B" => {
                if let Some(s) = open.replace(i) {
                    spans.push(Span::new(s, i - 1).unwrap());
                }
            }
            "I" => {
                open.get_or_insert(i);
            }
            other => return Err(format!("unknown tag {other:?} at position {i}")),
        }
    }
    if let Some(s) = open {
        spans.push(Span::new(s, tags.len() - 1).unwrap());
    }
    Ok(spans)
}

fn read_bio_tagged<R: BufRead>(reader: R) -> Result<Vec<QaInstance>> {
    let file: BioFile = serde_json::from_reader(reader).map_err(|e| Error::record(0, "data", e))?;
    file.data
        .into_iter()
        .enumerate()
        .map(|(index, value)| {
            let rec: BioRecord = serde_json::from_value(value).map_err(|e| Error::record(index, "<record>", e))?;
            let n = rec.context.len();
            if n == 0 {
                return Err(Error::record(index, "context", "empty context"));
            }
            let gold = match rec.label {
                Some(tags) => {
                    if tags.len() != n {
                        return Err(Error::record(
                            index,
                            "label",
                            format!("{} tags for {} context tokens", tags.len(), n),
                        ));
                    }
                    let spans = bio_to_spans(&tags).map_err(|e| Error::record(index, "label", e))?;
                    Some(AnswerSet::new(spans, n)?)
                }
                None => None,
            };
            QaInstance::new(rec.id, rec.question, rec.context, Granularity::Token, gold)
        })
        .collect()
}

#[derive(Deserialize)]
struct SquadFile {
    data: Vec<SquadArticle>,
}

#[derive(Deserialize)]
struct SquadArticle {
    paragraphs: Vec<SquadParagraph>,
}

#[derive(Deserialize)]
struct SquadParagraph {
    context: String,
    #[serde(default)]
    sent_list: Option<Vec<String>>,
    qas: Vec<SquadQa>,
}

#[derive(Deserialize)]
struct SquadQa {
    id: String,
    question: String,
    #[serde(default)]
    answers: Vec<SquadAnswer>,
    #[serde(default)]
    is_impossible: bool,
}

#[derive(Deserialize)]
struct SquadAnswer {
    text: String,
    answer_start: usize,
}

/// Byte ranges of `sentences` located in order within `context`.
fn locate_sentences(context: &str, sentences: &[String]) -> std::result::Result<Vec<(usize, usize)>, String> {
    let mut cursor = 0;
    let mut out = Vec::with_capacity(sentences.len());
    for (i, s) in sentences.iter().enumerate() {
        let s = s.trim();
        let at = context[cursor..]
            .find(s)
            .ok_or_else(|| format!("sentence {i} not found in context"))?;
        out.push((cursor + at, cursor + at + s.len()));
        cursor += at + s.len();
    }
    Ok(out)
}

/// Byte range of an answer given its character offset.
fn answer_range(context: &str, ans: &SquadAnswer) -> std::result::Result<(usize, usize), String> {
    let start = context
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(context.len()))
        .nth(ans.answer_start)
        .ok_or_else(|| format!("answer_start {} beyond context", ans.answer_start))?;
    let end = start + ans.text.len();
    if context.get(start..end) != Some(ans.text.as_str()) {
        return Err(format!("answer text does not match context at {}", ans.answer_start));
    }
    Ok((start, end))
}

fn read_mashqa<R: BufRead>(reader: R) -> Result<Vec<QaInstance>> {
    let file: SquadFile = serde_json::from_reader(reader).map_err(|e| Error::record(0, "data", e))?;
    let mut out = Vec::new();
    let mut index = 0;
    for article in file.data {
        for para in article.paragraphs {
            let bounds = match &para.sent_list {
                Some(list) => {
                    locate_sentences(&para.context, list).map_err(|e| Error::record(index, "sent_list", e))?
                }
                None => sentence_bounds(&para.context),
            };
            if bounds.is_empty() {
                return Err(Error::record(index, "context", "no sentences"));
            }
            let units: Vec<String> = bounds.iter().map(|&(s, e)| para.context[s..e].to_string()).collect();
            for qa in para.qas {
                let mut selected = Vec::new();
                if !qa.is_impossible {
                    for ans in &qa.answers {
                        let (a, b) =
                            answer_range(&para.context, ans).map_err(|e| Error::record(index, "answers", e))?;
                        selected.extend(
                            bounds
                                .iter()
                                .enumerate()
                                .filter(|(_, &(s, e))| s < b && a < e)
                                .map(|(i, _)| i),
                        );
                    }
                }
                let gold = AnswerSet::from_units(selected, units.len())?;
                out.push(QaInstance::new(
                    qa.id,
                    tokens_of(&qa.question),
                    units.clone(),
                    Granularity::Sentence,
                    Some(gold),
                )?);
                index += 1;
            }
        }
    }
    Ok(out)
}

fn read_wikiqa<R: BufRead>(reader: R) -> Result<Vec<QaInstance>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::record(0, "<header>", e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::record(0, name, "missing column"))
    };
    let (qid, qtext, sent, label) = (col("QuestionID")?, col("Question")?, col("Sentence")?, col("Label")?);

    struct Group {
        question: String,
        sentences: Vec<String>,
        positives: Vec<usize>,
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Group> = HashMap::new();
    for (index, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::record(index, "<row>", e))?;
        let field = |i: usize, name: &str| row.get(i).ok_or_else(|| Error::record(index, name, "missing value"));
        let id = field(qid, "QuestionID")?.to_string();
        let is_answer = match field(label, "Label")? {
            "1" => true,
            "0" => false,
            other => return Err(Error::record(index, "Label", format!("expected 0 or 1, got {other:?}"))),
        };
        let group = groups.entry(id.clone()).or_insert_with(|| {
            order.push(id);
            Group {
                question: String::new(),
                sentences: Vec::new(),
                positives: Vec::new(),
            }
        });
        if group.sentences.is_empty() {
            group.question = field(qtext, "Question")?.to_string();
        }
        if is_answer {
            group.positives.push(group.sentences.len());
        }
        group.sentences.push(field(sent, "Sentence")?.to_string());
    }
    order
        .into_iter()
        .map(|id| {
            let g = groups.remove(&id).expect("grouped id");
            let gold = AnswerSet::from_units(g.positives, g.sentences.len())?;
            QaInstance::new(
                id,
                tokens_of(&g.question),
                g.sentences,
                Granularity::Sentence,
                Some(gold),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CorpusStats {
    pub n_instances: usize,
    pub n_single_span: usize,
    pub n_multi_span: usize,
    /// Instances whose gold answer is empty.
    pub n_no_answer: usize,
    /// Answer units over context units, pooled across the corpus.
    pub label_sparsity: f64,
    pub mean_context_units: f64,
}

/// Streaming accumulator behind [`sparsity`].
#[derive(Debug, Clone, Default)]
pub struct SparsityAccumulator {
    stats: CorpusStats,
    answer_units: usize,
    context_units: usize,
}

impl SparsityAccumulator {
    pub fn push(&mut self, inst: &QaInstance) -> Result<()> {
        let gold = inst.gold().ok_or_else(|| Error::MissingGold(inst.id().to_string()))?;
        match gold.span_count() {
            0 => self.stats.n_no_answer += 1,
            1 => self.stats.n_single_span += 1,
            _ => self.stats.n_multi_span += 1,
        }
        self.stats.n_instances += 1;
        self.answer_units += gold.unit_count();
        self.context_units += inst.n_units();
        Ok(())
    }

    pub fn finish(self) -> CorpusStats {
        let mut stats = self.stats;
        if self.context_units > 0 {
            stats.label_sparsity = self.answer_units as f64 / self.context_units as f64;
        }
        if stats.n_instances > 0 {
            stats.mean_context_units = self.context_units as f64 / stats.n_instances as f64;
        }
        stats
    }
}

pub fn sparsity(insts: &[QaInstance]) -> Result<CorpusStats> {
    let mut acc = SparsityAccumulator::default();
    for inst in insts {
        acc.push(inst)?;
    }
    Ok(acc.finish())
}
