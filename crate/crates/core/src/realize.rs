//! Deterministic surface realization: pick a template for each event, fill
//! its slots, insert discourse connectives, and assemble a document.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::event::{
    validate_event, Document, EventSequence, FieldViolation, GeneratorTag, Provenance, Sentence,
    StructuredEvent,
};
use crate::template::{SeedPolicy, Segment, Template, TemplateSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealizeError {
    #[error("no template applies to event {event_index}")]
    NoApplicableTemplate { event_index: usize },
    #[error("event {event_index} is invalid: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidEvent {
        event_index: usize,
        violations: Vec<FieldViolation>,
    },
}

/// A template selected for an event, with the slot values it will consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentPlan<'a> {
    pub template: &'a Template,
    /// Referenced slots with non-empty values on the event.
    pub bindings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no template applies to this event")]
pub struct NoApplicableTemplate;

/// Select the first template (in set order) whose required slots are all
/// non-empty on the event.
pub fn determine_content<'a>(
    event: &StructuredEvent,
    set: &'a TemplateSet,
) -> Result<ContentPlan<'a>, NoApplicableTemplate> {
    for template in set.templates() {
        let applies = template
            .required_slots()
            .iter()
            .all(|slot| !event.field(slot).unwrap_or("").is_empty());
        if applies {
            let bindings = template
                .referenced_slots()
                .into_iter()
                .filter_map(|slot| {
                    let value = event.field(&slot).unwrap_or("");
                    if value.is_empty() {
                        None
                    } else {
                        Some((slot, value.to_string()))
                    }
                })
                .collect();
            return Ok(ContentPlan { template, bindings });
        }
    }
    Err(NoApplicableTemplate)
}

fn render_segments(segments: &[Segment], event: &StructuredEvent, out: &mut String) {
    for segment in segments {
        match segment {
            Segment::Literal(text) => out.push_str(text),
            Segment::Slot(field) => out.push_str(event.field(field).unwrap_or("")),
            Segment::Optional { segments, guard } => {
                if !event.field(guard).unwrap_or("").is_empty() {
                    render_segments(segments, event, out);
                }
            }
        }
    }
}

fn capitalize_first(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) if first.is_alphabetic() => first.to_uppercase().chain(chars).collect(),
        _ => text.to_string(),
    }
}

/// Render one event through its selected template: fill slots, drop empty
/// optional groups, tidy spacing, capitalize, terminate.
fn render_sentence(plan: &ContentPlan<'_>, event: &StructuredEvent) -> String {
    let mut raw = String::new();
    render_segments(plan.template.segments(), event, &mut raw);
    let collapsed: Vec<&str> = raw.split_whitespace().collect();
    let mut text = collapsed.join(" ");
    text = capitalize_first(&text);
    if !text.ends_with(['.', '!', '?']) {
        text.push('.');
    }
    text
}

/// Strip wrapping punctuation and lowercase, for protected-token lookups.
fn token_core(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Tokens the connective pass must not lowercase: capitalized tokens seen
/// past the start of a field value, and single-token capitalized fields
/// (entity names like "Germany").
fn protected_tokens(event: &StructuredEvent) -> BTreeSet<String> {
    let mut protected = BTreeSet::new();
    for (_, value) in event.fields() {
        let tokens: Vec<&str> = value.split_whitespace().collect();
        for (i, token) in tokens.iter().enumerate() {
            let capitalized = token.chars().next().is_some_and(char::is_uppercase);
            if capitalized && (i > 0 || tokens.len() == 1) {
                protected.insert(token_core(token));
            }
        }
    }
    protected
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

fn prefix_connective(sentence: &str, connective: &str, protected: &BTreeSet<String>) -> String {
    let mut parts = sentence.splitn(2, ' ');
    let first = parts.next().unwrap_or("");
    let rest = parts.next();
    let keep_case = is_acronym(first) || protected.contains(&token_core(first));
    let first = if keep_case {
        first.to_string()
    } else {
        lowercase_first(first)
    };
    match rest {
        Some(rest) => format!("{connective} {first} {rest}"),
        None => format!("{connective} {first}"),
    }
}

/// Insert discourse connectives: the first sentence is untouched, each
/// later sentence is prefixed round-robin from the pool starting at
/// `seed mod pool size`, with the original first word lowercased unless it
/// looks like a proper noun.
pub fn plan_discourse(sentences: &[String], connectives: &[String], seed: u64) -> Vec<String> {
    let empty = BTreeSet::new();
    let protected: Vec<&BTreeSet<String>> = sentences.iter().map(|_| &empty).collect();
    plan_discourse_protected(sentences, connectives, seed, &protected)
}

/// [`plan_discourse`] with a per-sentence set of protected (proper-noun)
/// tokens that keep their capitalization.
pub fn plan_discourse_protected(
    sentences: &[String],
    connectives: &[String],
    seed: u64,
    protected: &[&BTreeSet<String>],
) -> Vec<String> {
    if connectives.is_empty() {
        return sentences.to_vec();
    }
    let start = (seed % connectives.len() as u64) as usize;
    sentences
        .iter()
        .enumerate()
        .map(|(i, sentence)| {
            if i == 0 {
                return sentence.clone();
            }
            let connective = &connectives[(start + i - 1) % connectives.len()];
            let empty = BTreeSet::new();
            let guard = protected.get(i).copied().unwrap_or(&empty);
            prefix_connective(sentence, connective, guard)
        })
        .collect()
}

/// Realize an event sequence into a rule-generated document. Pure in
/// `(seq, set, seed)`: identical inputs give byte-identical output.
pub fn realize(
    seq: &EventSequence,
    set: &TemplateSet,
    seed: u64,
) -> Result<Document, RealizeError> {
    let mut raw = Vec::with_capacity(seq.len());
    let mut protected_sets = Vec::with_capacity(seq.len());
    for (event_index, event) in seq.events().iter().enumerate() {
        if let Err(violations) = validate_event(event) {
            return Err(RealizeError::InvalidEvent {
                event_index,
                violations,
            });
        }
        let plan = determine_content(event, set)
            .map_err(|NoApplicableTemplate| RealizeError::NoApplicableTemplate { event_index })?;
        raw.push(render_sentence(&plan, event));
        protected_sets.push(protected_tokens(event));
    }
    let protected_refs: Vec<&BTreeSet<String>> = protected_sets.iter().collect();
    let effective_seed = match set.seed_policy() {
        SeedPolicy::Deterministic => 0,
        SeedPolicy::SeededRandom => seed,
    };
    let planned =
        plan_discourse_protected(&raw, set.connectives(), effective_seed, &protected_refs);
    let sentences = planned
        .into_iter()
        .enumerate()
        .map(|(index, text)| {
            Sentence::new(text, index, Provenance::RuleRealized)
                .expect("realized sentences satisfy the sentence invariants")
        })
        .collect();
    let document = Document::new(sentences, GeneratorTag::Rule)
        .expect("indices are contiguous by construction");
    Ok(document)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::parse_template_set;

    const BASIC: &str = r#"
        connectives: ["Moreover,", "Besides,"]
        template rich { pattern: "{subject} {verb} {object}[ because {reason}]."; requires: subject, verb, object }
        template bare { pattern: "{subject} {verb}."; requires: subject, verb }
    "#;

    fn event(subject: &str, verb: &str, object: &str, reason: &str) -> StructuredEvent {
        StructuredEvent {
            subject: subject.to_string(),
            verb: verb.to_string(),
            object: object.to_string(),
            reason: reason.to_string(),
            ..StructuredEvent::default()
        }
    }

    #[test]
    fn picks_first_applicable_template_and_drops_empty_optionals() {
        let set = parse_template_set(BASIC).unwrap();
        let e = event("Germany", "is", "well placed", "");
        let plan = determine_content(&e, &set).unwrap();
        assert_eq!(plan.template.name(), "rich");
        assert!(!plan.bindings.contains_key("reason"));

        let seq = EventSequence::new(vec![e]).unwrap();
        let doc = realize(&seq, &set, 0).unwrap();
        assert_eq!(doc.sentences()[0].text(), "Germany is well placed.");
    }

    #[test]
    fn includes_optional_group_when_guard_filled() {
        let set = parse_template_set(BASIC).unwrap();
        let e = event(
            "the absence of a vaccine",
            "meant",
            "social distancing were necessary",
            "Scholz said on Friday",
        );
        let seq = EventSequence::new(vec![e]).unwrap();
        let doc = realize(&seq, &set, 0).unwrap();
        assert_eq!(
            doc.sentences()[0].text(),
            "The absence of a vaccine meant social distancing were necessary because Scholz said on Friday."
        );
    }

    #[test]
    fn falls_back_to_later_template_and_errors_when_none_apply() {
        let set = parse_template_set(BASIC).unwrap();
        let e = event("Germany", "acted", "", "");
        let plan = determine_content(&e, &set).unwrap();
        assert_eq!(plan.template.name(), "bare");

        let none = event("", "", "", "");
        // invalid event is caught before template selection
        let seq = EventSequence::new(vec![event("x", "", "", "")]).unwrap();
        assert!(matches!(
            realize(&seq, &set, 0),
            Err(RealizeError::NoApplicableTemplate { event_index: 0 })
        ));
        assert!(determine_content(&none, &set).is_err());
    }

    #[test]
    fn plan_discourse_round_robin_with_lowercasing() {
        let sentences = vec!["A.".to_string(), "B.".to_string(), "C.".to_string()];
        let pool = vec!["Moreover,".to_string(), "Besides,".to_string()];
        let planned = plan_discourse(&sentences, &pool, 0);
        assert_eq!(planned, vec!["A.", "Moreover, b.", "Besides, c."]);
        // seed shifts the starting connective
        let planned = plan_discourse(&sentences, &pool, 1);
        assert_eq!(planned, vec!["A.", "Besides, b.", "Moreover, c."]);
        // single sentence untouched
        let one = plan_discourse(&sentences[..1], &pool, 0);
        assert_eq!(one, vec!["A."]);
    }

    #[test]
    fn connective_prefix_keeps_proper_nouns_and_acronyms() {
        let mut protected = BTreeSet::new();
        protected.insert("germany".to_string());
        assert_eq!(
            prefix_connective("Germany is ready.", "Moreover,", &protected),
            "Moreover, Germany is ready."
        );
        assert_eq!(
            prefix_connective("EU officials met.", "Besides,", &BTreeSet::new()),
            "Besides, EU officials met."
        );
        assert_eq!(
            prefix_connective("The plan holds.", "Moreover,", &BTreeSet::new()),
            "Moreover, the plan holds."
        );
    }

    #[test]
    fn protected_tokens_cover_mid_field_and_single_token_fields() {
        let e = StructuredEvent {
            subject: "Germany".to_string(),
            verb: "is".to_string(),
            reason: "chancellor Scholz said so".to_string(),
            ..StructuredEvent::default()
        };
        let protected = protected_tokens(&e);
        assert!(protected.contains("germany"));
        assert!(protected.contains("scholz"));
        assert!(!protected.contains("chancellor"));
    }

    #[test]
    fn realize_is_deterministic() {
        let set = parse_template_set(BASIC).unwrap();
        let events: Vec<StructuredEvent> = (0..20)
            .map(|i| event(&format!("Actor{i}"), "did", &format!("thing {i}"), ""))
            .collect();
        let seq = EventSequence::new(events).unwrap();
        let a = realize(&seq, &set, 42).unwrap();
        let b = realize(&seq, &set, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sentences().len(), seq.len());
    }
}
