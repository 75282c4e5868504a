//! The built-in lexical paraphraser: seeded connective substitution,
//! synonym replacement, and a small set of clause-level transforms.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Capability, ParaphraseError, Paraphrased, Paraphraser, SynonymLexicon};
use crate::event::{Provenance, Sentence};

/// A single restyling rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformRule {
    /// Swap a leading discourse connective for a seeded alternative.
    ConnectiveSwap(BTreeMap<String, Vec<String>>),
    /// Rewrite "how are you" into a tagged variant ("how are you doing?").
    TagQuestion,
    /// Move a trailing because-clause to the front of the sentence.
    FrontBecauseClause,
}

/// Default alternatives for the discourse markers the realizer emits.
pub fn default_connective_swaps() -> BTreeMap<String, Vec<String>> {
    let table = [
        ("Moreover,", vec!["In addition,", "Furthermore,", "Also,"]),
        ("Besides,", vec!["Also,", "What is more,", "In addition,"]),
        ("In addition,", vec!["Moreover,", "Additionally,"]),
        ("Furthermore,", vec!["Moreover,", "In addition,"]),
    ];
    table
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
        .collect()
}

pub fn default_transform_rules() -> Vec<TransformRule> {
    vec![
        TransformRule::ConnectiveSwap(default_connective_swaps()),
        TransformRule::TagQuestion,
        TransformRule::FrontBecauseClause,
    ]
}

/// Split a token into leading punctuation, alphanumeric core, and trailing
/// punctuation.
fn split_token(token: &str) -> (&str, &str, &str) {
    let start = token
        .char_indices()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, _)| i);
    let Some(start) = start else {
        return ("", "", token);
    };
    let end = token
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap();
    (&token[..start], &token[start..end], &token[end..])
}

fn match_case(original_core: &str, replacement: &str) -> String {
    let capitalized = original_core.chars().next().is_some_and(char::is_uppercase);
    if capitalized {
        let mut chars = replacement.chars();
        match chars.next() {
            Some(first) => first.to_uppercase().chain(chars).collect(),
            None => String::new(),
        }
    } else {
        replacement.to_string()
    }
}

fn is_acronym(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(
        (chars.next(), chars.next()),
        (Some(a), Some(b)) if a.is_uppercase() && b.is_uppercase()
    )
}

fn lowercase_first(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) => first.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn capitalize_first(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) if first.is_alphabetic() => first.to_uppercase().chain(chars).collect(),
        _ => text.to_string(),
    }
}

struct SentenceParts {
    connective: Option<String>,
    tokens: Vec<String>,
    terminal: char,
}

fn split_sentence(text: &str, swaps: Option<&BTreeMap<String, Vec<String>>>) -> SentenceParts {
    let trimmed = text.trim();
    let terminal = trimmed
        .chars()
        .last()
        .filter(|c| matches!(c, '.' | '!' | '?'))
        .unwrap_or('.');
    let body = trimmed.trim_end_matches(['.', '!', '?']);
    let mut tokens: Vec<String> = body.split_whitespace().map(str::to_string).collect();
    let mut connective = None;
    if let Some(swaps) = swaps {
        if let Some(first) = tokens.first() {
            if swaps.contains_key(first) {
                connective = Some(tokens.remove(0));
            }
        }
    }
    SentenceParts {
        connective,
        tokens,
        terminal,
    }
}

/// Restyle one sentence: connective substitution, then seeded synonym
/// replacement at `replace_probability` per covered token, then clause
/// transforms. Deterministic given the seed; if nothing applies the text
/// comes back byte-identical. Terminal punctuation is preserved except by
/// the tag-question rewrite, which produces a question.
pub fn paraphrase_sentence(
    sentence: &Sentence,
    lexicon: &SynonymLexicon,
    rules: &[TransformRule],
    replace_probability: f64,
    seed: u64,
) -> Sentence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let swaps = rules.iter().find_map(|rule| match rule {
        TransformRule::ConnectiveSwap(map) => Some(map),
        _ => None,
    });
    let mut parts = split_sentence(sentence.text(), swaps);
    let mut changed = false;

    // (a) connective substitution
    if let (Some(connective), Some(swaps)) = (parts.connective.as_mut(), swaps) {
        if let Some(alternatives) = swaps.get(connective) {
            if !alternatives.is_empty() {
                let pick = rng.random_range(0..alternatives.len());
                *connective = alternatives[pick].clone();
                changed = true;
            }
        }
    }

    // (b) seeded synonym replacement
    if !lexicon.is_empty() {
        for token in parts.tokens.iter_mut() {
            let (prefix, core, suffix) = split_token(token);
            if core.is_empty() {
                continue;
            }
            let Some(candidates) = lexicon.candidates(&core.to_lowercase()) else {
                continue;
            };
            if !rng.random_bool(replace_probability) {
                continue;
            }
            let pick = rng.random_range(0..candidates.len());
            let replacement = match_case(core, &candidates[pick]);
            *token = format!("{prefix}{replacement}{suffix}");
            changed = true;
        }
    }

    // (c) clause-level transforms
    for rule in rules {
        match rule {
            TransformRule::TagQuestion => {
                let cores: Vec<String> = parts
                    .tokens
                    .iter()
                    .map(|t| split_token(t).1.to_lowercase())
                    .collect();
                if cores == ["how", "are", "you"] {
                    let variants = ["how are you doing", "how do you feel"];
                    let pick = rng.random_range(0..variants.len());
                    parts.tokens = variants[pick]
                        .split_whitespace()
                        .map(str::to_string)
                        .collect();
                    parts.terminal = '?';
                    changed = true;
                }
            }
            TransformRule::FrontBecauseClause => {
                let split_at = parts
                    .tokens
                    .iter()
                    .position(|t| split_token(t).1.eq_ignore_ascii_case("because"));
                let Some(split_at) = split_at else { continue };
                if split_at == 0 || split_at + 1 >= parts.tokens.len() {
                    continue;
                }
                if !rng.random_bool(0.5) {
                    continue;
                }
                let clause: Vec<String> = parts.tokens.drain(split_at..).skip(1).collect();
                let mut main = std::mem::take(&mut parts.tokens);
                if parts.connective.is_none() && !main.is_empty() && !is_acronym(&main[0]) {
                    main[0] = lowercase_first(&main[0]);
                }
                let mut rebuilt = vec!["because".to_string()];
                rebuilt.extend(clause);
                if let Some(last) = rebuilt.last_mut() {
                    if !last.ends_with(',') {
                        last.push(',');
                    }
                }
                rebuilt.extend(main);
                parts.tokens = rebuilt;
                changed = true;
            }
            TransformRule::ConnectiveSwap(_) => {}
        }
    }

    let text = if changed {
        let mut assembled = String::new();
        if let Some(connective) = &parts.connective {
            assembled.push_str(connective);
            if !parts.tokens.is_empty() {
                assembled.push(' ');
            }
        }
        assembled.push_str(&parts.tokens.join(" "));
        let mut text = capitalize_first(assembled.trim());
        text.push(parts.terminal);
        text
    } else {
        sentence.text().to_string()
    };

    Sentence::new(text, sentence.index(), Provenance::Paraphrased)
        .expect("paraphrased text satisfies the sentence invariants")
}

/// The built-in, fully deterministic paraphraser.
#[derive(Debug, Clone)]
pub struct LexicalParaphraser {
    pub lexicon: SynonymLexicon,
    pub rules: Vec<TransformRule>,
    /// Per-token probability that a covered token is replaced.
    pub replace_probability: f64,
    pub max_sentence_chars: usize,
}

impl LexicalParaphraser {
    pub fn new(lexicon: SynonymLexicon, rules: Vec<TransformRule>) -> Self {
        Self {
            lexicon,
            rules,
            replace_probability: 0.5,
            max_sentence_chars: usize::MAX,
        }
    }

    /// An engine that changes nothing: empty lexicon, no rules.
    pub fn identity() -> Self {
        Self::new(SynonymLexicon::empty(), Vec::new())
    }

    pub fn with_replace_probability(mut self, replace_probability: f64) -> Self {
        self.replace_probability = replace_probability.clamp(0.0, 1.0);
        self
    }
}

impl Paraphraser for LexicalParaphraser {
    fn capability(&self) -> Capability {
        Capability {
            name: "lexical".to_string(),
            deterministic: true,
            max_sentence_chars: self.max_sentence_chars,
            concurrent: true,
        }
    }

    fn paraphrase_sentence(
        &self,
        sentence: &Sentence,
        seed: u64,
    ) -> Result<Paraphrased, ParaphraseError> {
        let sentence = paraphrase_sentence(
            sentence,
            &self.lexicon,
            &self.rules,
            self.replace_probability,
            seed,
        );
        Ok(Paraphrased {
            sentence,
            warnings: Vec::new(),
        })
    }
}
