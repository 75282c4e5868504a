//! Adapter for an external paraphrase service.
//!
//! Protocol: HTTP POST, request body is the UTF-8 text of one sentence,
//! response body is the UTF-8 text of one sentence with status 200. Any
//! other status, a transport failure, or a timeout is `RemoteUnavailable`;
//! a malformed reply (empty or more than one sentence) is non-fatal and
//! falls back to the input sentence with a warning.

use std::time::Duration;

use super::{Capability, ParaphraseError, Paraphrased, Paraphraser};
use crate::event::{Provenance, Sentence};

pub struct RemoteParaphraser {
    endpoint: String,
    agent: ureq::Agent,
    pub max_sentence_chars: usize,
}

impl RemoteParaphraser {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        Self {
            endpoint: endpoint.into(),
            agent: config.new_agent(),
            max_sentence_chars: 16 * 1024,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

/// True if the text contains a sentence boundary before its final
/// character: a terminal mark followed by whitespace and more content.
fn has_internal_sentence_break(text: &str) -> bool {
    let chars: Vec<char> = text.trim_end().chars().collect();
    for i in 0..chars.len().saturating_sub(1) {
        if matches!(chars[i], '.' | '!' | '?')
            && chars[i + 1].is_whitespace()
            && chars[i + 1..].iter().any(|c| !c.is_whitespace())
        {
            return true;
        }
    }
    false
}

fn normalize_reply(reply: &str) -> Option<String> {
    let trimmed = reply.trim();
    if trimmed.is_empty() || has_internal_sentence_break(trimmed) {
        return None;
    }
    let mut text = {
        let mut chars = trimmed.chars();
        match chars.next() {
            Some(first) if first.is_alphabetic() => {
                first.to_uppercase().chain(chars).collect::<String>()
            }
            _ => trimmed.to_string(),
        }
    };
    if !text.ends_with(['.', '!', '?']) {
        text.push('.');
    }
    Some(text)
}

impl Paraphraser for RemoteParaphraser {
    fn capability(&self) -> Capability {
        Capability {
            name: format!("remote({})", self.endpoint),
            deterministic: false,
            max_sentence_chars: self.max_sentence_chars,
            concurrent: true,
        }
    }

    fn paraphrase_sentence(
        &self,
        sentence: &Sentence,
        _seed: u64,
    ) -> Result<Paraphrased, ParaphraseError> {
        let unavailable = |reason: String| ParaphraseError::RemoteUnavailable {
            endpoint: self.endpoint.clone(),
            reason,
        };
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "text/plain; charset=utf-8")
            .send(sentence.text())
            .map_err(|e| unavailable(e.to_string()))?;
        if response.status() != 200 {
            return Err(unavailable(format!("status {}", response.status())));
        }
        let reply = response
            .body_mut()
            .read_to_string()
            .map_err(|e| unavailable(e.to_string()))?;

        match normalize_reply(&reply) {
            Some(text) => {
                let sentence = Sentence::new(text, sentence.index(), Provenance::Paraphrased)
                    .expect("normalized replies satisfy the sentence invariants");
                Ok(Paraphrased {
                    sentence,
                    warnings: Vec::new(),
                })
            }
            None => {
                // malformed reply: keep the input sentence, note what happened
                let warning = format!(
                    "sentence {}: malformed reply from {} ({:?}); kept the input",
                    sentence.index(),
                    self.endpoint,
                    reply.chars().take(60).collect::<String>()
                );
                let fallback = Sentence::new(
                    sentence.text().to_string(),
                    sentence.index(),
                    Provenance::Paraphrased,
                )
                .expect("input sentence already satisfied the invariants");
                Ok(Paraphrased {
                    sentence: fallback,
                    warnings: vec![warning],
                })
            }
        }
    }
}
