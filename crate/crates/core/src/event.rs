//! Core data types shared by every pipeline stage: structured events,
//! sentences, documents, and the quadrant scores used by evaluation.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The ten event fields, in canonical emission order.
pub const FIELD_NAMES: [&str; 10] = [
    "subject", "verb", "object", "reason", "purpose", "area", "date", "week", "year", "month",
];

/// One sentence's worth of news facts. All fields are free text and may be
/// empty; a realizable event has at least one of subject/verb/object filled.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredEvent {
    #[serde(default)]
    pub subject: String,
    #[serde(default)]
    pub verb: String,
    #[serde(default)]
    pub object: String,
    #[serde(default)]
    pub reason: String,
    #[serde(default)]
    pub purpose: String,
    #[serde(default)]
    pub area: String,
    #[serde(default)]
    pub date: String,
    #[serde(default)]
    pub week: String,
    #[serde(default)]
    pub year: String,
    #[serde(default)]
    pub month: String,
}

impl StructuredEvent {
    /// Look up a field by its canonical name.
    pub fn field(&self, name: &str) -> Option<&str> {
        match name {
            "subject" => Some(&self.subject),
            "verb" => Some(&self.verb),
            "object" => Some(&self.object),
            "reason" => Some(&self.reason),
            "purpose" => Some(&self.purpose),
            "area" => Some(&self.area),
            "date" => Some(&self.date),
            "week" => Some(&self.week),
            "year" => Some(&self.year),
            "month" => Some(&self.month),
            _ => None,
        }
    }

    /// Iterate over `(field name, value)` pairs in canonical order.
    pub fn fields(&self) -> impl Iterator<Item = (&'static str, &str)> {
        FIELD_NAMES
            .iter()
            .map(move |&name| (name, self.field(name).unwrap()))
    }

    /// True if `name` is one of the ten schema fields.
    pub fn is_field_name(name: &str) -> bool {
        FIELD_NAMES.contains(&name)
    }
}

/// A diagnostic for one violated event invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldViolation {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for FieldViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

/// Check the event invariants. Total: never panics, returns every violation
/// found rather than stopping at the first.
pub fn validate_event(event: &StructuredEvent) -> Result<(), Vec<FieldViolation>> {
    let mut violations = Vec::new();
    if event.subject.is_empty() && event.verb.is_empty() && event.object.is_empty() {
        violations.push(FieldViolation {
            field: "subject/verb/object".to_string(),
            reason: "all empty; at least one must be non-empty".to_string(),
        });
    }
    for (name, value) in event.fields() {
        if value.contains('\n') || value.contains('\r') {
            violations.push(FieldViolation {
                field: name.to_string(),
                reason: "contains a newline character".to_string(),
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// An ordered, non-empty list of events; order defines sentence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSequence {
    events: Vec<StructuredEvent>,
}

impl EventSequence {
    pub fn new(events: Vec<StructuredEvent>) -> Result<Self, EmptySequence> {
        if events.is_empty() {
            return Err(EmptySequence);
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[StructuredEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Always false; the constructor rejects empty sequences.
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("an event sequence must contain at least one event")]
pub struct EmptySequence;

impl Serialize for EventSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.events.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EventSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let events = Vec::<StructuredEvent>::deserialize(deserializer)?;
        EventSequence::new(events).map_err(D::Error::custom)
    }
}

/// Which stage produced a sentence. `GrammarCorrected` wraps the provenance
/// the sentence had before the grammar pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    RuleRealized,
    Paraphrased,
    BaselineGenerated,
    GrammarCorrected(Box<Provenance>),
}

/// A single generated sentence with its position and provenance.
///
/// Invariants: text is non-empty, ends with `.`, `!` or `?`, and its first
/// alphabetic character (if any) is uppercase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    text: String,
    index: usize,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SentenceError {
    #[error("sentence text is empty")]
    Empty,
    #[error("sentence does not end with terminal punctuation: {0:?}")]
    NoTerminal(String),
    #[error("sentence does not start with an uppercase letter: {0:?}")]
    LowercaseStart(String),
}

impl Sentence {
    pub fn new(text: String, index: usize, provenance: Provenance) -> Result<Self, SentenceError> {
        if text.is_empty() {
            return Err(SentenceError::Empty);
        }
        if !text.ends_with(['.', '!', '?']) {
            return Err(SentenceError::NoTerminal(text));
        }
        if let Some(first) = text.chars().next() {
            if first.is_alphabetic() && first.is_lowercase() {
                return Err(SentenceError::LowercaseStart(text));
            }
        }
        Ok(Self {
            text,
            index,
            provenance,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Which generator produced a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorTag {
    Rule,
    Baseline,
    Hybrid,
    Reference,
}

impl GeneratorTag {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorTag::Rule => "rule",
            GeneratorTag::Baseline => "baseline",
            GeneratorTag::Hybrid => "hybrid",
            GeneratorTag::Reference => "reference",
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered list of sentences with contiguous indices 0..n-1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    sentences: Vec<Sentence>,
    generator_tag: GeneratorTag,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sentence at position {position} has index {index}; indices must be contiguous from 0")]
pub struct IndexGap {
    pub position: usize,
    pub index: usize,
}

impl Document {
    pub fn new(sentences: Vec<Sentence>, generator_tag: GeneratorTag) -> Result<Self, IndexGap> {
        for (position, sentence) in sentences.iter().enumerate() {
            if sentence.index != position {
                return Err(IndexGap {
                    position,
                    index: sentence.index,
                });
            }
        }
        Ok(Self {
            sentences,
            generator_tag,
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn generator_tag(&self) -> GeneratorTag {
        self.generator_tag
    }

    pub fn with_generator_tag(mut self, generator_tag: GeneratorTag) -> Self {
        self.generator_tag = generator_tag;
        self
    }

    /// Full text: sentences joined by single spaces.
    pub fn text(&self) -> String {
        let parts: Vec<&str> = self.sentences.iter().map(|s| s.text.as_str()).collect();
        parts.join(" ")
    }
}

/// Style/logic scores on the HMCU plane. `h` and `u` are the exact
/// complements of `m` and `c`, so the two axes stay well-defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantScores {
    h: f64,
    m: f64,
    c: f64,
    u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("quadrant score {value} is outside [0, 1]")]
pub struct ScoreOutOfRange {
    pub value: f64,
}

impl QuadrantScores {
    /// Build the full score set from the two measured similarities.
    pub fn from_machine_and_logic(m: f64, c: f64) -> Result<Self, ScoreOutOfRange> {
        for value in [m, c] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoreOutOfRange { value });
            }
        }
        Ok(Self {
            h: 1.0 - m,
            m,
            c,
            u: 1.0 - c,
        })
    }

    pub fn human_style(&self) -> f64 {
        self.h
    }

    pub fn machine_style(&self) -> f64 {
        self.m
    }

    pub fn controllable_logic(&self) -> f64 {
        self.c
    }

    pub fn uncontrollable_logic(&self) -> f64 {
        self.u
    }
}

/// Quadrant of the style/logic plane a system lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadrantLabel {
    HC,
    HU,
    MC,
    MU,
}

impl fmt::Display for QuadrantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            QuadrantLabel::HC => "HC",
            QuadrantLabel::HU => "HU",
            QuadrantLabel::MC => "MC",
            QuadrantLabel::MU => "MU",
        };
        f.write_str(name)
    }
}
