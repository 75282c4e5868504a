//! Rule-based post-pass that repairs mechanical damage left by generation
//! or paraphrasing: repeated-token runs, casing, terminal punctuation,
//! spacing, and a/an agreement. Deliberately minimal; it must not rewrite
//! content, only tidy it.

use crate::event::{Document, Provenance, Sentence};

fn eq_ci(a: &str, b: &str) -> bool {
    a.eq_ignore_ascii_case(b)
}

/// Collapse maximal runs of an immediately repeated unigram or bigram to a
/// single occurrence, keeping the first occurrence's casing. Applied to a
/// fixpoint, so "a b a b a b" and "the the the" both reduce fully.
pub fn collapse_repeats(text: &str) -> String {
    let mut tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    loop {
        let bigram_pass = collapse_run(&tokens, 2);
        let unigram_pass = collapse_run(&bigram_pass, 1);
        if unigram_pass == tokens {
            return tokens.join(" ");
        }
        tokens = unigram_pass;
    }
}

fn collapse_run(tokens: &[String], width: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let repeats = i + 2 * width <= tokens.len()
            && (0..width).all(|k| eq_ci(&tokens[i + k], &tokens[i + width + k]));
        if repeats {
            let mut j = i + width;
            while j + width <= tokens.len()
                && (0..width).all(|k| eq_ci(&tokens[i + k], &tokens[j + k]))
            {
                j += width;
            }
            out.extend_from_slice(&tokens[i..i + width]);
            i = j;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}

fn starts_with_vowel(token: &str) -> Option<bool> {
    let first = token.chars().next()?;
    if !first.is_ascii_alphabetic() {
        return None;
    }
    Some(matches!(
        first.to_ascii_lowercase(),
        'a' | 'e' | 'i' | 'o' | 'u'
    ))
}

fn fix_articles(tokens: &mut [String]) {
    for i in 0..tokens.len().saturating_sub(1) {
        let Some(vowel) = starts_with_vowel(&tokens[i + 1]) else {
            continue;
        };
        let article = tokens[i].as_str();
        let replacement = match (article, vowel) {
            ("a", true) => Some("an"),
            ("A", true) => Some("An"),
            ("an", false) => Some("a"),
            ("An", false) => Some("A"),
            _ => None,
        };
        if let Some(replacement) = replacement {
            tokens[i] = replacement.to_string();
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

/// Repair one sentence's text: collapse repeated-token runs, fix a/an
/// agreement, tidy spacing, capitalize the leading letter, and leave
/// exactly one terminal mark ("hello world" becomes "Hello world.").
pub fn check_text(text: &str) -> String {
    // Peel off the trailing terminal-punctuation cluster; remember which
    // mark to re-attach (the last one wins, default '.').
    let trimmed = text.trim();
    let terminal = trimmed
        .chars()
        .last()
        .filter(|c| matches!(c, '.' | '!' | '?'))
        .unwrap_or('.');
    let body = trimmed.trim_end_matches(['.', '!', '?']);
    let collapsed = collapse_repeats(body);
    let mut tokens: Vec<String> = collapsed.split_whitespace().map(str::to_string).collect();
    fix_articles(&mut tokens);
    let mut result = capitalize_first(&tokens.join(" "));
    result.push(terminal);
    result
}

/// Apply the repair rules to every sentence. Sentence count never changes;
/// provenance becomes `GrammarCorrected(prior)`; applying twice equals
/// applying once.
pub fn grammar_check(document: &Document) -> Document {
    let sentences = document
        .sentences()
        .iter()
        .map(|sentence| {
            let text = check_text(sentence.text());
            let provenance = match sentence.provenance() {
                already @ Provenance::GrammarCorrected(_) => already.clone(),
                other => Provenance::GrammarCorrected(Box::new(other.clone())),
            };
            Sentence::new(text, sentence.index(), provenance)
                .expect("grammar-checked text satisfies the sentence invariants")
        })
        .collect();
    Document::new(sentences, document.generator_tag())
        .expect("grammar check preserves sentence indices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::GeneratorTag;

    fn doc(texts: &[&str]) -> Document {
        let sentences = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Sentence::new(t.to_string(), i, Provenance::BaselineGenerated).unwrap())
            .collect();
        Document::new(sentences, GeneratorTag::Baseline).unwrap()
    }

    #[test]
    fn collapses_the_repetition_pathology() {
        assert_eq!(
            collapse_repeats("to proper to proper to proper to proper"),
            "to proper"
        );
        assert_eq!(collapse_repeats("the the the"), "the");
        assert_eq!(collapse_repeats("no repeats here"), "no repeats here");
        // collapsing cascades across passes
        assert_eq!(collapse_repeats("a b b a b a"), "a b a");
    }

    #[test]
    fn collapse_keeps_first_casing() {
        assert_eq!(collapse_repeats("To proper to proper"), "To proper");
    }

    #[test]
    fn check_text_capitalizes_and_terminates_raw_text() {
        assert_eq!(check_text("hello world"), "Hello world.");
        assert_eq!(check_text("Already clean."), "Already clean.");
    }

    #[test]
    fn capitalizes_and_terminates() {
        let checked = grammar_check(&doc(&["1240 hello   world?"]));
        assert_eq!(checked.sentences()[0].text(), "1240 hello world?");
        let sentences = vec![Sentence::new(
            "It will change to Medical to proper to proper to proper.".to_string(),
            0,
            Provenance::BaselineGenerated,
        )
        .unwrap()];
        let d = Document::new(sentences, GeneratorTag::Baseline).unwrap();
        assert_eq!(
            grammar_check(&d).sentences()[0].text(),
            "It will change to Medical to proper."
        );
    }

    #[test]
    fn fixes_article_agreement() {
        let checked = grammar_check(&doc(&["She saw a apple and an tree."]));
        assert_eq!(
            checked.sentences()[0].text(),
            "She saw an apple and a tree."
        );
        // non-alphabetic successor is left alone
        let checked = grammar_check(&doc(&["He read a 1940 report."]));
        assert_eq!(checked.sentences()[0].text(), "He read a 1940 report.");
    }

    #[test]
    fn idempotent_including_provenance() {
        let original = doc(&["To proper to proper to proper.", "A apple fell.."]);
        let once = grammar_check(&original);
        let twice = grammar_check(&once);
        assert_eq!(once, twice);
        assert!(matches!(
            once.sentences()[0].provenance(),
            Provenance::GrammarCorrected(inner) if **inner == Provenance::BaselineGenerated
        ));
    }

    #[test]
    fn preserves_sentence_count_and_terminal_kind() {
        let original = doc(&["One!", "Two?", "Three..."]);
        let checked = grammar_check(&original);
        assert_eq!(checked.sentences().len(), 3);
        assert_eq!(checked.sentences()[0].text(), "One!");
        assert_eq!(checked.sentences()[1].text(), "Two?");
        assert_eq!(checked.sentences()[2].text(), "Three.");
    }
}
