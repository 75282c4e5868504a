//! Sentence-by-sentence restyling behind a pluggable contract.
//!
//! Paraphrasers transform exactly one sentence per call and never merge or
//! split sentences; that per-sentence discipline is what keeps the logic of
//! a document controllable while its style loosens. Two implementations
//! ship: a seeded lexical paraphraser and an adapter for a remote service.

mod lexical;
mod remote;

pub use lexical::{
    default_connective_swaps, default_transform_rules, paraphrase_sentence, LexicalParaphraser,
    TransformRule,
};
pub use remote::RemoteParaphraser;

use std::collections::BTreeMap;
use std::path::Path;

use crate::event::{Document, Sentence};

/// What an implementation promises about itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capability {
    pub name: String,
    /// Same (sentence, seed) always gives the same output.
    pub deterministic: bool,
    /// Sentences longer than this (in characters) are passed through
    /// unchanged with a warning.
    pub max_sentence_chars: usize,
    /// Safe to call from several threads at once.
    pub concurrent: bool,
}

/// One paraphrased sentence plus any non-fatal notes (fallbacks, skips).
#[derive(Debug, Clone, PartialEq)]
pub struct Paraphrased {
    pub sentence: Sentence,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParaphraseError {
    #[error("remote paraphrase service at {endpoint} unavailable: {reason}")]
    RemoteUnavailable { endpoint: String, reason: String },
}

/// A sentence-level restyler. Implementations transform exactly one
/// sentence per call and never merge or split sentences.
pub trait Paraphraser {
    fn capability(&self) -> Capability;

    fn paraphrase_sentence(
        &self,
        sentence: &Sentence,
        seed: u64,
    ) -> Result<Paraphrased, ParaphraseError>;
}

/// Map from lowercase token to candidate replacements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("cannot read lexicon file: {0}")]
    Io(String),
}

impl SynonymLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parse tab-separated lines: `token<TAB>alt1<TAB>alt2...`. Tokens are
    /// lowercased; an alternative equal to its own token is dropped, and an
    /// entry left with no alternatives is an error.
    pub fn parse_tsv(text: &str) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = raw_line.split('\t').map(str::trim);
            let token = parts
                .next()
                .filter(|t| !t.is_empty())
                .ok_or_else(|| LexiconError::Malformed {
                    line,
                    reason: "missing token".to_string(),
                })?
                .to_lowercase();
            let alternatives: Vec<String> = parts
                .filter(|alt| !alt.is_empty())
                .map(|alt| alt.to_lowercase())
                .filter(|alt| *alt != token)
                .collect();
            if alternatives.is_empty() {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("`{token}` has no alternatives other than itself"),
                });
            }
            entries.insert(token, alternatives);
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|e| LexiconError::Io(e.to_string()))?;
        Self::parse_tsv(&text)
    }

    pub fn candidates(&self, token: &str) -> Option<&[String]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Restyled document plus the per-sentence warnings gathered on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaphrasedDocument {
    pub document: Document,
    pub warnings: Vec<String>,
}

/// Paraphrase a document one sentence at a time. Sentence `i` is derived
/// from input sentence `i` with per-sentence seed `seed ^ i`, so runs are
/// reproducible and sentence count is always preserved.
pub fn paraphrase_document(
    document: &Document,
    engine: &dyn Paraphraser,
    seed: u64,
) -> Result<ParaphrasedDocument, ParaphraseError> {
    let capability = engine.capability();
    let mut sentences = Vec::with_capacity(document.sentences().len());
    let mut warnings = Vec::new();
    for (i, sentence) in document.sentences().iter().enumerate() {
        if sentence.text().chars().count() > capability.max_sentence_chars {
            warnings.push(format!(
                "sentence {i} exceeds {} chars; passed through unchanged",
                capability.max_sentence_chars
            ));
            sentences.push(sentence.clone());
            continue;
        }
        let sentence_seed = seed ^ i as u64;
        let paraphrased = engine.paraphrase_sentence(sentence, sentence_seed)?;
        warnings.extend(paraphrased.warnings);
        sentences.push(paraphrased.sentence);
    }
    let document = Document::new(sentences, document.generator_tag())
        .expect("paraphrasing preserves sentence indices");
    Ok(ParaphrasedDocument { document, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{GeneratorTag, Provenance};

    pub(crate) fn doc(texts: &[&str]) -> Document {
        let sentences = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Sentence::new(t.to_string(), i, Provenance::RuleRealized).unwrap())
            .collect();
        Document::new(sentences, GeneratorTag::Rule).unwrap()
    }

    #[test]
    fn lexicon_parses_and_normalizes() {
        let lex =
            SynonymLexicon::parse_tsv("Big\thuge\tlarge\n# comment\n\nsaid\tstated\n").unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.candidates("big").unwrap(), ["huge", "large"]);
        assert!(lex.candidates("unknown").is_none());
    }

    #[test]
    fn lexicon_rejects_self_only_entries() {
        assert!(matches!(
            SynonymLexicon::parse_tsv("big\tbig\n"),
            Err(LexiconError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            SynonymLexicon::parse_tsv("big\n"),
            Err(LexiconError::Malformed { .. })
        ));
        // self-alternative is dropped when others remain
        let lex = SynonymLexicon::parse_tsv("big\tbig\thuge\n").unwrap();
        assert_eq!(lex.candidates("big").unwrap(), ["huge"]);
    }

    #[test]
    fn identity_engine_preserves_text_and_count() {
        let engine = LexicalParaphraser::identity();
        let input = doc(&["Moreover, the plan holds.", "Germany is ready."]);
        let out = paraphrase_document(&input, &engine, 7).unwrap();
        assert_eq!(out.document.sentences().len(), 2);
        for (a, b) in input.sentences().iter().zip(out.document.sentences()) {
            assert_eq!(a.text(), b.text());
        }
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn sentence_count_is_preserved_by_the_default_engine() {
        let lexicon =
            SynonymLexicon::parse_tsv("plan\tscheme\nready\tprepared\nholds\tstands\n").unwrap();
        let engine = LexicalParaphraser::new(lexicon, default_transform_rules());
        let input = doc(&[
            "Moreover, the plan holds.",
            "Germany is ready.",
            "Besides, officials agreed.",
            "The vote passed.",
            "Work continues.",
        ]);
        let out = paraphrase_document(&input, &engine, 3).unwrap();
        assert_eq!(out.document.sentences().len(), 5);
        for (i, s) in out.document.sentences().iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(*s.provenance(), Provenance::Paraphrased);
        }
    }

    #[test]
    fn overlong_sentences_pass_through_with_warning() {
        let lexicon = SynonymLexicon::parse_tsv("plan\tscheme\n").unwrap();
        let mut engine = LexicalParaphraser::new(lexicon, vec![]);
        engine.max_sentence_chars = 10;
        let input = doc(&["This plan is much longer than ten characters."]);
        let out = paraphrase_document(&input, &engine, 0).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(
            out.document.sentences()[0].text(),
            input.sentences()[0].text()
        );
    }
}
