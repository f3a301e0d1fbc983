//! Index-sequence tooling for multi-span extractive question answering.
//!
//! A context is a sequence of units (tokens or sentences). An answer is a set
//! of disjoint unit spans. A generator is trained to emit the answer as a
//! plain sequence of unit indexes, either every answer unit ([`Representation::FullIndex`])
//! or one `start end` pair per span ([`Representation::SpanIndex`]).
//! This crate renders indexed contexts, encodes gold answers, repairs raw
//! generated index streams into valid answers, trims long contexts around the
//! answer, links free-text answers back to context sentences and scores
//! predictions under sentence, token, exact-match and partial-match regimes.
//!
//! ```
//! use idxqa::{decode, encode, mask_to_spans, DisplayOffset, Representation};
//!
//! let gold = mask_to_spans(&[true, false, false, true, true, false, true]);
//! let seq = encode(&gold, Representation::SpanIndex, DisplayOffset::ONE);
//! assert_eq!(seq.to_text(), "1 1 4 5 7 7");
//!
//! let (decoded, report) = decode(&seq);
//! assert_eq!(decoded, gold);
//! assert!(report.is_clean());
//! ```

pub mod cli;
pub mod codec;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod linkback;
pub mod metrics;
pub mod segment;
pub mod span;
pub mod trim;

pub use codec::{
    decode, decode_fi, decode_si, encode, parse_index_text, render_context, DisplayOffset, IndexSequence,
    ParsedIndexText, RepairReport, Representation,
};
pub use dataset::{load, save_native, sparsity, CorpusStats, DatasetDescriptor, DatasetFormat, NativeRecord};
pub use error::{Error, Result};
pub use exec::Exec;
pub use linkback::{link_back, overlap_score, LinkbackConfig};
pub use metrics::{em_prf, evaluate_corpus, pm_prf, unit_prf, Aggregation, EvalReport, InstanceScore, Prf, Regime};
pub use span::{mask_to_spans, merge_spans, spans_to_mask, AnswerSet, Granularity, QaInstance, Span};
pub use trim::{corpus_trim_stats, trim, DropReason, OffsetMap, TrimResult, TrimStats};
