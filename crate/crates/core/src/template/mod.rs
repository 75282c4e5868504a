//! The template language describing sentence patterns, slot bindings,
//! optional segments, and the discourse-connective pool.
//!
//! Source files are UTF-8 text; `#` begins a line comment. A file holds
//! template blocks and an optional connective pool:
//!
//! ```text
//! connectives: ["Moreover,", "Besides,"]
//!
//! template basic {
//!   pattern: "{subject} {verb} {object}[ because {reason}].";
//!   requires: subject, verb, object
//! }
//! ```
//!
//! Patterns mix literal text, `{field}` slots bound to event fields, and
//! `[ ... ]` optional groups kept only when their guard (the first slot
//! inside the group) is non-empty. Literal text inside a pattern may not
//! contain `{`, `[` or `]`.

mod parse;

pub use parse::parse_template_set;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::event::StructuredEvent;

/// Default discourse-marker pool used when a file declares none.
pub const DEFAULT_CONNECTIVES: [&str; 3] = ["Moreover,", "Besides,", "In addition,"];

/// How the realizer's connective rotation treats the run seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Rotation always starts at pool index 0; the run seed is ignored.
    Deterministic,
    /// Rotation starts at `seed mod pool length`.
    #[default]
    SeededRandom,
}

/// One piece of a sentence pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Literal(String),
    Slot(String),
    /// Included only when the guard field is non-empty on the event.
    Optional {
        segments: Vec<Segment>,
        guard: String,
    },
}

/// A named sentence pattern plus the slots an event must fill for the
/// template to apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    name: String,
    segments: Vec<Segment>,
    required_slots: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown slot `{name}`")]
    UnknownSlot {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: duplicate template `{name}`")]
    DuplicateTemplate {
        name: String,
        line: usize,
        col: usize,
    },
}

fn collect_slots(segments: &[Segment], slots: &mut BTreeSet<String>) {
    for segment in segments {
        match segment {
            Segment::Literal(_) => {}
            Segment::Slot(field) => {
                slots.insert(field.clone());
            }
            Segment::Optional { segments, .. } => collect_slots(segments, slots),
        }
    }
}

fn max_depth(segments: &[Segment]) -> usize {
    segments
        .iter()
        .map(|segment| match segment {
            Segment::Optional { segments, .. } => 1 + max_depth(segments),
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}

impl Template {
    /// Build a template, validating slot names, optional-group nesting and
    /// the required-slot set. `required_slots = None` (or an empty set)
    /// defaults to the slots referenced outside any optional group.
    pub fn new(
        name: impl Into<String>,
        segments: Vec<Segment>,
        required_slots: Option<BTreeSet<String>>,
    ) -> Result<Self, TemplateError> {
        let name = name.into();
        let mut referenced = BTreeSet::new();
        collect_slots(&segments, &mut referenced);
        for slot in &referenced {
            if !StructuredEvent::is_field_name(slot) {
                return Err(TemplateError::UnknownSlot {
                    name: slot.clone(),
                    line: 0,
                    col: 0,
                });
            }
        }
        if max_depth(&segments) > 3 {
            return Err(TemplateError::Syntax {
                line: 0,
                col: 0,
                message: format!("optional groups in `{name}` nest deeper than 3"),
            });
        }
        let required_slots = match required_slots {
            Some(set) if !set.is_empty() => {
                for slot in &set {
                    if !referenced.contains(slot) {
                        return Err(TemplateError::Syntax {
                            line: 0,
                            col: 0,
                            message: format!(
                                "required slot `{slot}` is not referenced in the pattern of `{name}`"
                            ),
                        });
                    }
                }
                set
            }
            _ => top_level_slots(&segments),
        };
        Ok(Self {
            name,
            segments,
            required_slots,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn required_slots(&self) -> &BTreeSet<String> {
        &self.required_slots
    }

    /// Every slot referenced anywhere in the pattern.
    pub fn referenced_slots(&self) -> BTreeSet<String> {
        let mut slots = BTreeSet::new();
        collect_slots(&self.segments, &mut slots);
        slots
    }
}

fn top_level_slots(segments: &[Segment]) -> BTreeSet<String> {
    segments
        .iter()
        .filter_map(|segment| match segment {
            Segment::Slot(field) => Some(field.clone()),
            _ => None,
        })
        .collect()
}

/// A parsed template program: ordered templates, the connective pool, and
/// the seed policy for connective rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    templates: Vec<Template>,
    connectives: Vec<String>,
    seed_policy: SeedPolicy,
}

impl TemplateSet {
    /// Build a set; an empty connective list falls back to the default pool.
    pub fn new(
        templates: Vec<Template>,
        connectives: Vec<String>,
        seed_policy: SeedPolicy,
    ) -> Result<Self, TemplateError> {
        if templates.is_empty() {
            return Err(TemplateError::Syntax {
                line: 0,
                col: 0,
                message: "a template set needs at least one template".to_string(),
            });
        }
        let mut seen = BTreeSet::new();
        for template in &templates {
            if !seen.insert(template.name.clone()) {
                return Err(TemplateError::DuplicateTemplate {
                    name: template.name.clone(),
                    line: 0,
                    col: 0,
                });
            }
        }
        let connectives = if connectives.is_empty() {
            DEFAULT_CONNECTIVES.iter().map(|c| c.to_string()).collect()
        } else {
            connectives
        };
        Ok(Self {
            templates,
            connectives,
            seed_policy,
        })
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn connectives(&self) -> &[String] {
        &self.connectives
    }

    pub fn seed_policy(&self) -> SeedPolicy {
        self.seed_policy
    }

    pub fn with_seed_policy(mut self, seed_policy: SeedPolicy) -> Self {
        self.seed_policy = seed_policy;
        self
    }

    pub fn with_connectives(mut self, connectives: Vec<String>) -> Self {
        if !connectives.is_empty() {
            self.connectives = connectives;
        }
        self
    }
}

fn escape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            other => out.push(other),
        }
    }
    out
}

fn write_pattern(segments: &[Segment], out: &mut String) {
    for segment in segments {
        match segment {
            Segment::Literal(text) => out.push_str(text),
            Segment::Slot(field) => {
                out.push('{');
                out.push_str(field);
                out.push('}');
            }
            Segment::Optional { segments, .. } => {
                out.push('[');
                write_pattern(segments, out);
                out.push(']');
            }
        }
    }
}

/// Render a template set to source text that parses back to a structurally
/// equal value.
pub fn serialize_template_set(set: &TemplateSet) -> String {
    let mut out = String::new();
    let policy = match set.seed_policy {
        SeedPolicy::Deterministic => "deterministic",
        SeedPolicy::SeededRandom => "seeded",
    };
    let _ = writeln!(out, "seed_policy: {policy}");
    let connectives: Vec<String> = set
        .connectives
        .iter()
        .map(|c| format!("\"{}\"", escape_string(c)))
        .collect();
    let _ = writeln!(out, "connectives: [{}]", connectives.join(", "));
    for template in &set.templates {
        let mut pattern = String::new();
        write_pattern(&template.segments, &mut pattern);
        let _ = writeln!(out, "\ntemplate {} {{", template.name);
        let _ = writeln!(out, "  pattern: \"{}\";", escape_string(&pattern));
        if !template.required_slots.is_empty() {
            let required: Vec<&str> = template.required_slots.iter().map(String::as_str).collect();
            let _ = writeln!(out, "  requires: {}", required.join(", "));
        }
        let _ = writeln!(out, "}}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slot(name: &str) -> Segment {
        Segment::Slot(name.to_string())
    }

    fn lit(text: &str) -> Segment {
        Segment::Literal(text.to_string())
    }

    #[test]
    fn template_rejects_unknown_slots() {
        let err = Template::new("t", vec![slot("subjct")], None).unwrap_err();
        assert!(matches!(err, TemplateError::UnknownSlot { name, .. } if name == "subjct"));
    }

    #[test]
    fn template_defaults_required_to_top_level_slots() {
        let t = Template::new(
            "t",
            vec![
                slot("subject"),
                lit(" "),
                slot("verb"),
                Segment::Optional {
                    segments: vec![lit(" because "), slot("reason")],
                    guard: "reason".to_string(),
                },
            ],
            None,
        )
        .unwrap();
        let required: Vec<&str> = t.required_slots().iter().map(String::as_str).collect();
        assert_eq!(required, vec!["subject", "verb"]);
    }

    #[test]
    fn template_rejects_required_slot_not_in_pattern() {
        let mut required = BTreeSet::new();
        required.insert("reason".to_string());
        let err = Template::new("t", vec![slot("subject")], Some(required)).unwrap_err();
        assert!(matches!(err, TemplateError::Syntax { .. }));
    }

    #[test]
    fn template_rejects_deep_nesting() {
        let level = |inner: Vec<Segment>| Segment::Optional {
            segments: inner,
            guard: "reason".to_string(),
        };
        let depth4 = level(vec![level(vec![level(vec![level(vec![slot("reason")])])])]);
        assert!(Template::new("t", vec![depth4], None).is_err());
    }

    #[test]
    fn set_requires_unique_names_and_a_template() {
        let t = Template::new("t", vec![slot("subject")], None).unwrap();
        let err = TemplateSet::new(vec![t.clone(), t.clone()], vec![], SeedPolicy::default());
        assert!(matches!(err, Err(TemplateError::DuplicateTemplate { .. })));
        assert!(TemplateSet::new(vec![], vec![], SeedPolicy::default()).is_err());
        let set = TemplateSet::new(vec![t], vec![], SeedPolicy::default()).unwrap();
        assert_eq!(set.connectives(), &DEFAULT_CONNECTIVES.map(String::from));
    }
}
