//! Keyword-seeded order-k word n-gram sampler: the flexible-style,
//! uncontrolled-logic generator the pipeline is compared against. Sentences
//! start at a context containing the next keyword and follow count-weighted
//! seeded draws until a terminal token or the token budget.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::event::{Document, GeneratorTag, Provenance, Sentence};

type Context = Vec<String>;

/// Transition counts over (k-1)-token contexts, plus the corpus vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramModel {
    order: usize,
    table: BTreeMap<Context, BTreeMap<String, u64>>,
    vocabulary: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TrainError {
    #[error("training corpus is empty or contains no usable n-grams")]
    EmptyCorpus,
    #[error("n-gram order {0} is outside the supported range 2..=4")]
    InvalidOrder(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("keyword list is empty")]
    NoKeywords,
    #[error("max_tokens {max_tokens} is below the model order {order}")]
    BudgetTooSmall { max_tokens: usize, order: usize },
}

/// Lowercased word tokens with `.`, `!`, `?` kept as standalone tokens so
/// sentence boundaries are learnable; other punctuation is dropped.
pub fn generation_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if matches!(c, '.' | '!' | '?') {
                tokens.push(c.to_string());
            }
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Count every k-window of every document. Windows do not cross document
/// boundaries.
pub fn train_ngram(corpus: &[String], order: usize) -> Result<NgramModel, TrainError> {
    if !(2..=4).contains(&order) {
        return Err(TrainError::InvalidOrder(order));
    }
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let mut table: BTreeMap<Context, BTreeMap<String, u64>> = BTreeMap::new();
    let mut vocabulary = BTreeSet::new();
    for document in corpus {
        let tokens = generation_tokens(document);
        vocabulary.extend(tokens.iter().cloned());
        for window in tokens.windows(order) {
            let context = window[..order - 1].to_vec();
            let next = window[order - 1].clone();
            *table.entry(context).or_default().entry(next).or_insert(0) += 1;
        }
    }
    if table.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    Ok(NgramModel {
        order,
        table,
        vocabulary,
    })
}

fn weighted_pick<'a>(candidates: &'a BTreeMap<String, u64>, rng: &mut ChaCha8Rng) -> &'a str {
    let total: u64 = candidates.values().sum();
    let mut draw = rng.random_range(0..total);
    for (token, count) in candidates {
        if draw < *count {
            return token;
        }
        draw -= count;
    }
    unreachable!("draw is bounded by the count total")
}

fn is_terminal(token: &str) -> bool {
    matches!(token, "." | "!" | "?")
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn context_count(&self) -> usize {
        self.table.len()
    }

    pub fn successors(&self, context: &[String]) -> Option<&BTreeMap<String, u64>> {
        self.table.get(context)
    }

    fn contexts_containing(&self, keyword: &str) -> Vec<&Context> {
        self.table
            .keys()
            .filter(|context| context.iter().any(|t| t == keyword))
            .collect()
    }

    fn random_context(&self, rng: &mut ChaCha8Rng) -> &Context {
        let pick = rng.random_range(0..self.table.len());
        self.table.keys().nth(pick).expect("index is in range")
    }
}

/// A generated document plus non-fatal notes (skipped keywords).
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub document: Document,
    pub warnings: Vec<String>,
}

/// Generate one sentence per keyword. A sentence starts at a seeded choice
/// among contexts containing its keyword (a seeded-random context when the
/// keyword is unknown, with a warning), then follows count-weighted draws
/// until a terminal token, a dead end, or `max_tokens` word tokens.
pub fn generate_from_keywords(
    model: &NgramModel,
    keywords: &[String],
    max_tokens: usize,
    seed: u64,
) -> Result<Generation, GenerateError> {
    if keywords.is_empty() {
        return Err(GenerateError::NoKeywords);
    }
    if max_tokens < model.order {
        return Err(GenerateError::BudgetTooSmall {
            max_tokens,
            order: model.order,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let mut sentences = Vec::with_capacity(keywords.len());
    for (index, keyword) in keywords.iter().enumerate() {
        let needle = keyword.to_lowercase();
        let matching = model.contexts_containing(&needle);
        let start: Context = if matching.is_empty() {
            warnings.push(format!(
                "keyword `{keyword}` not in the model; sentence {index} starts at a random context"
            ));
            model.random_context(&mut rng).clone()
        } else {
            let pick = rng.random_range(0..matching.len());
            matching[pick].clone()
        };

        let mut tokens: Vec<String> = start;
        let mut terminal = None;
        while terminal.is_none() && tokens.len() < max_tokens {
            let context = &tokens[tokens.len() + 1 - model.order..];
            let Some(candidates) = model.successors(context) else {
                break;
            };
            let next = weighted_pick(candidates, &mut rng).to_string();
            if is_terminal(&next) {
                terminal = Some(next);
            } else {
                tokens.push(next);
            }
        }

        let mut text = tokens.join(" ");
        text.push_str(&terminal.unwrap_or_else(|| ".".to_string()));
        let text = {
            let mut chars = text.chars();
            match chars.next() {
                Some(first) if first.is_alphabetic() => first.to_uppercase().chain(chars).collect(),
                _ => text,
            }
        };
        sentences.push(
            Sentence::new(text, index, Provenance::BaselineGenerated)
                .expect("generated sentences satisfy the sentence invariants"),
        );
    }
    let document = Document::new(sentences, GeneratorTag::Baseline)
        .expect("indices are contiguous by construction");
    Ok(Generation { document, warnings })
}

/// On-disk form: JSON with explicit transition rows, since JSON object keys
/// cannot be token sequences.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    order: usize,
    vocabulary: Vec<String>,
    transitions: Vec<(Context, Vec<(String, u64)>)>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelIoError {
    #[error("model file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid: {0}")]
    Format(#[from] serde_json::Error),
}

impl NgramModel {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
        let file = ModelFile {
            order: self.order,
            vocabulary: self.vocabulary.iter().cloned().collect(),
            transitions: self
                .table
                .iter()
                .map(|(context, successors)| {
                    (
                        context.clone(),
                        successors.iter().map(|(t, c)| (t.clone(), *c)).collect(),
                    )
                })
                .collect(),
        };
        let json = serde_json::to_string(&file)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelIoError> {
        let json = std::fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&json)?;
        let table = file
            .transitions
            .into_iter()
            .map(|(context, successors)| (context, successors.into_iter().collect()))
            .collect();
        Ok(Self {
            order: file.order,
            table,
            vocabulary: file.vocabulary.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigram_counts_match_hand_count() {
        let model = train_ngram(&["a b a b".to_string()], 2).unwrap();
        // windows: (a b), (b a), (a b)
        assert_eq!(model.successors(&["a".to_string()]).unwrap()["b"], 2);
        assert_eq!(model.successors(&["b".to_string()]).unwrap()["a"], 1);
        assert_eq!(model.context_count(), 2);
    }

    #[test]
    fn rejects_empty_corpus_and_bad_order() {
        assert_eq!(train_ngram(&[], 2), Err(TrainError::EmptyCorpus));
        assert_eq!(
            train_ngram(&["too short".to_string()], 5),
            Err(TrainError::InvalidOrder(5))
        );
        // documents shorter than the order leave nothing to learn
        assert_eq!(
            train_ngram(&["one".to_string()], 2).map(|_| ()),
            Err(TrainError::EmptyCorpus)
        );
    }

    #[test]
    fn keyword_seeds_the_sentence_start() {
        let model = train_ngram(&["a b . a c .".to_string()], 2).unwrap();
        let generation = generate_from_keywords(&model, &["a".to_string()], 4, 0).unwrap();
        let text = generation.document.sentences()[0].text();
        assert!(
            text == "A b." || text == "A c.",
            "expected a successor drawn from {{b, c}}, got {text:?}"
        );
        assert!(generation.warnings.is_empty());
    }

    #[test]
    fn unknown_keywords_warn_and_fall_back() {
        let model = train_ngram(&["a b . a c .".to_string()], 2).unwrap();
        let generation =
            generate_from_keywords(&model, &["zzz".to_string(), "qqq".to_string()], 4, 1).unwrap();
        assert_eq!(generation.warnings.len(), 2);
        assert_eq!(generation.document.sentences().len(), 2);
    }

    #[test]
    fn generation_is_deterministic_and_stays_in_vocabulary() {
        let corpus = vec![
            "the cabinet approved a new budget for schools .".to_string(),
            "officials said the new plan will start in march .".to_string(),
            "residents of the northern district backed the plan .".to_string(),
        ];
        let model = train_ngram(&corpus, 3).unwrap();
        let keywords = vec!["plan".to_string(), "officials".to_string()];
        let a = generate_from_keywords(&model, &keywords, 12, 99).unwrap();
        let b = generate_from_keywords(&model, &keywords, 12, 99).unwrap();
        assert_eq!(a, b);
        for sentence in a.document.sentences() {
            for token in generation_tokens(sentence.text()) {
                if !is_terminal(&token) {
                    assert!(
                        model.vocabulary().contains(&token),
                        "token {token:?} is not in the vocabulary"
                    );
                }
            }
        }
    }

    #[test]
    fn budget_and_keyword_preconditions() {
        let model = train_ngram(&["a b c d .".to_string()], 2).unwrap();
        assert!(matches!(
            generate_from_keywords(&model, &[], 4, 0),
            Err(GenerateError::NoKeywords)
        ));
        assert!(matches!(
            generate_from_keywords(&model, &["a".to_string()], 1, 0),
            Err(GenerateError::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn model_round_trips_through_disk() {
        let corpus = vec!["a b c . d e f .".to_string(), "a c e .".to_string()];
        let model = train_ngram(&corpus, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = NgramModel::load(&path).unwrap();
        assert_eq!(model, loaded);
    }
}
