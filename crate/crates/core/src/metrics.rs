//! Evaluation metrics: TF-IDF cosine similarity, contextual-logic and
//! machine-writing-style similarity, group aggregation, and quadrant
//! classification on the style/logic plane.
//!
//! The two measured similarities map onto the plane as `m` (machine style)
//! and `c` (controllable logic); `h` and `u` are their complements. The
//! mapping from similarities to quadrant labels goes through calibration
//! thresholds, not a learned model.

use std::collections::{BTreeMap, BTreeSet};

use crate::event::{QuadrantLabel, QuadrantScores};

/// Lowercase tokens split on non-alphanumeric runs, empties dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Sparse TF-IDF document vector. All weights are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    weights: BTreeMap<String, f64>,
}

impl TermVector {
    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cannot build TF-IDF vectors from an empty document set")]
pub struct EmptyDocumentSet;

/// TF-IDF vectors for a document set.
///
/// tf = raw count / document length; idf = ln(N / df) + 1 over the given
/// set. Empty documents yield empty (all-zero) vectors.
pub fn tfidf_vectors(docs: &[Vec<String>]) -> Result<Vec<TermVector>, EmptyDocumentSet> {
    if docs.is_empty() {
        return Err(EmptyDocumentSet);
    }
    let doc_count = docs.len() as f64;
    let mut document_frequency: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for token in distinct {
            *document_frequency.entry(token).or_insert(0) += 1;
        }
    }
    let vectors = docs
        .iter()
        .map(|doc| {
            let mut weights = BTreeMap::new();
            if doc.is_empty() {
                return TermVector { weights };
            }
            let length = doc.len() as f64;
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for token in doc {
                *counts.entry(token).or_insert(0) += 1;
            }
            for (token, count) in counts {
                let tf = count as f64 / length;
                let df = document_frequency[token] as f64;
                let idf = (doc_count / df).ln() + 1.0;
                weights.insert(token.to_string(), tf * idf);
            }
            TermVector { weights }
        })
        .collect();
    Ok(vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cosine is undefined for a zero vector")]
pub struct ZeroVector;

/// Standard cosine similarity. In [0, 1] since weights are non-negative.
pub fn cosine(a: &TermVector, b: &TermVector) -> Result<f64, ZeroVector> {
    let norm_a = a.norm();
    let norm_b = b.norm();
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(ZeroVector);
    }
    let dot: f64 = a
        .weights
        .iter()
        .map(|(token, wa)| wa * b.weight(token))
        .sum();
    Ok((dot / (norm_a * norm_b)).clamp(0.0, 1.0))
}

/// Similarity between a generated document and its reference article.
///
/// Cosine of the pair's TF-IDF vectors, with document frequencies computed
/// over the pair plus `background` (typically the rest of the group). A
/// degenerate pair (either side has no tokens) scores 0.
pub fn contextual_logic_similarity(generated: &str, reference: &str, background: &[&str]) -> f64 {
    let mut docs: Vec<Vec<String>> = Vec::with_capacity(2 + background.len());
    docs.push(tokenize(generated));
    docs.push(tokenize(reference));
    docs.extend(background.iter().map(|text| tokenize(text)));
    let vectors = match tfidf_vectors(&docs) {
        Ok(v) => v,
        Err(EmptyDocumentSet) => return 0.0,
    };
    cosine(&vectors[0], &vectors[1]).unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StyleError {
    #[error("machine-style similarity needs at least two documents, got {0}")]
    GroupTooSmall(usize),
    #[error("benchmark index {index} out of range for {len} documents")]
    BenchmarkOutOfRange { index: usize, len: usize },
}

/// Per-group machine-writing-style similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineStyle {
    /// Similarity of each non-benchmark document to the benchmark, in
    /// document order with the benchmark skipped.
    pub per_document: Vec<f64>,
    pub mean: f64,
}

/// Mean cosine similarity between each document and a benchmark drawn from
/// the same system's output; high values mean an inflexible, template-like
/// style. TF-IDF is computed over the group. Degenerate documents score 0.
pub fn machine_style_similarity(
    generated: &[&str],
    benchmark_index: usize,
) -> Result<MachineStyle, StyleError> {
    if generated.len() < 2 {
        return Err(StyleError::GroupTooSmall(generated.len()));
    }
    if benchmark_index >= generated.len() {
        return Err(StyleError::BenchmarkOutOfRange {
            index: benchmark_index,
            len: generated.len(),
        });
    }
    let docs: Vec<Vec<String>> = generated.iter().map(|text| tokenize(text)).collect();
    let vectors = tfidf_vectors(&docs).expect("group is non-empty");
    let benchmark = &vectors[benchmark_index];
    let per_document: Vec<f64> = vectors
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != benchmark_index)
        .map(|(_, vector)| cosine(benchmark, vector).unwrap_or(0.0))
        .collect();
    let mean = per_document.iter().sum::<f64>() / per_document.len() as f64;
    Ok(MachineStyle { per_document, mean })
}

/// Per-group metric summary: per-document values and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    per_document: Vec<f64>,
    mean: f64,
}

impl MetricSummary {
    pub fn new(per_document: Vec<f64>) -> Self {
        let mean = if per_document.is_empty() {
            0.0
        } else {
            per_document.iter().sum::<f64>() / per_document.len() as f64
        };
        Self { per_document, mean }
    }

    pub fn per_document(&self) -> &[f64] {
        &self.per_document
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// One evaluation group's results for a single system.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub group_id: usize,
    pub context_logic: MetricSummary,
    pub machine_style: MetricSummary,
}

impl GroupReport {
    pub fn new(group_id: usize, context_values: Vec<f64>, style_values: Vec<f64>) -> Self {
        Self {
            group_id,
            context_logic: MetricSummary::new(context_values),
            machine_style: MetricSummary::new(style_values),
        }
    }
}

/// Calibration thresholds mapping measured similarities to quadrant labels.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Thresholds {
    /// At or above this machine-style similarity a system counts as M.
    pub style: f64,
    /// At or above this contextual-logic similarity a system counts as C.
    pub logic: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            style: 0.15,
            logic: 0.40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("threshold {value} must lie strictly inside (0, 1)")]
pub struct ThresholdOutOfRange {
    pub value: f64,
}

impl Thresholds {
    pub fn new(style: f64, logic: f64) -> Result<Self, ThresholdOutOfRange> {
        for value in [style, logic] {
            if !(value > 0.0 && value < 1.0) {
                return Err(ThresholdOutOfRange { value });
            }
        }
        Ok(Self { style, logic })
    }
}

/// M iff machine style >= style threshold, else H; C iff controllable logic
/// >= logic threshold, else U.
pub fn classify_quadrant(scores: &QuadrantScores, thresholds: Thresholds) -> QuadrantLabel {
    let machine = scores.machine_style() >= thresholds.style;
    let controllable = scores.controllable_logic() >= thresholds.logic;
    match (machine, controllable) {
        (true, true) => QuadrantLabel::MC,
        (true, false) => QuadrantLabel::MU,
        (false, true) => QuadrantLabel::HC,
        (false, false) => QuadrantLabel::HU,
    }
}

/// Scale factors applied to the averaged similarities before thresholding.
/// Identity by default; present so differently calibrated corpora can be
/// mapped onto the same plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreScale {
    pub style: f64,
    pub logic: f64,
}

impl Default for ScoreScale {
    fn default() -> Self {
        Self {
            style: 1.0,
            logic: 1.0,
        }
    }
}

/// Whole-run evaluation summary for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct HmcuReport {
    pub groups: Vec<GroupReport>,
    pub avg_context_logic: f64,
    pub avg_machine_style: f64,
    pub scores: QuadrantScores,
    pub label: QuadrantLabel,
}

/// Average the group means, map them onto the quadrant plane, and classify.
pub fn aggregate(groups: Vec<GroupReport>, thresholds: Thresholds) -> HmcuReport {
    aggregate_scaled(groups, thresholds, ScoreScale::default())
}

pub fn aggregate_scaled(
    groups: Vec<GroupReport>,
    thresholds: Thresholds,
    scale: ScoreScale,
) -> HmcuReport {
    let count = groups.len() as f64;
    let avg_context_logic = groups.iter().map(|g| g.context_logic.mean()).sum::<f64>() / count;
    let avg_machine_style = groups.iter().map(|g| g.machine_style.mean()).sum::<f64>() / count;
    let m = (avg_machine_style / scale.style).clamp(0.0, 1.0);
    let c = (avg_context_logic / scale.logic).clamp(0.0, 1.0);
    let scores =
        QuadrantScores::from_machine_and_logic(m, c).expect("clamped scores are always in range");
    let label = classify_quadrant(&scores, thresholds);
    HmcuReport {
        groups,
        avg_context_logic,
        avg_machine_style,
        scores,
        label,
    }
}

/// Round to three decimal places, half away from zero: the presentation
/// rounding used by report tables and CSV emission.
pub fn round3(value: f64) -> f64 {
    (value * 1000.0 + 0.5).floor() / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_lowercases_and_splits_on_non_alphanumerics() {
        assert_eq!(tokenize("How are you?"), vec!["how", "are", "you"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(
            tokenize("Scholz said on Friday."),
            vec!["scholz", "said", "on", "friday"]
        );
        assert_eq!(tokenize("1,240 cases"), vec!["1", "240", "cases"]);
    }

    #[test]
    fn tfidf_single_document_weights() {
        let docs = vec![tokenize("a a b")];
        let vectors = tfidf_vectors(&docs).unwrap();
        // N = 1 so idf = ln(1) + 1 = 1 for both tokens
        assert!((vectors[0].weight("a") - 2.0 / 3.0).abs() < 1e-12);
        assert!((vectors[0].weight("b") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tfidf_identical_documents_get_identical_vectors() {
        let docs = vec![tokenize("x y z"), tokenize("x y z")];
        let vectors = tfidf_vectors(&docs).unwrap();
        assert_eq!(vectors[0], vectors[1]);
    }

    #[test]
    fn tfidf_token_in_every_document_has_idf_one() {
        let docs = vec![tokenize("common a"), tokenize("common b")];
        let vectors = tfidf_vectors(&docs).unwrap();
        // tf = 1/2, idf = ln(2/2) + 1 = 1
        assert!((vectors[0].weight("common") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tfidf_rejects_empty_set_and_tolerates_empty_documents() {
        assert_eq!(tfidf_vectors(&[]), Err(EmptyDocumentSet));
        let docs = vec![tokenize("a"), tokenize("")];
        let vectors = tfidf_vectors(&docs).unwrap();
        assert!(vectors[1].weights().is_empty());
    }

    #[test]
    fn cosine_identity_orthogonal_and_hand_computed() {
        let docs = vec![tokenize("a b"), tokenize("a"), tokenize("c d")];
        let v = tfidf_vectors(&docs).unwrap();
        assert!((cosine(&v[0], &v[0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&v[0], &v[2]).unwrap(), 0.0);
        // {a:1, b:1} vs {a:1} -> 1/sqrt(2); build via single-doc idf=1 sets
        let left = tfidf_vectors(&[tokenize("a b")]).unwrap().remove(0);
        let right = tfidf_vectors(&[tokenize("a a")]).unwrap().remove(0);
        let expected = 1.0 / 2.0_f64.sqrt();
        assert!((cosine(&left, &right).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn cosine_rejects_zero_vectors() {
        let docs = vec![tokenize("a"), tokenize("")];
        let v = tfidf_vectors(&docs).unwrap();
        assert_eq!(cosine(&v[0], &v[1]), Err(ZeroVector));
    }

    #[test]
    fn contextual_similarity_boundary_cases() {
        assert!((contextual_logic_similarity("Same text.", "Same text.", &[]) - 1.0).abs() < 1e-12);
        assert_eq!(
            contextual_logic_similarity("alpha beta", "gamma delta", &[]),
            0.0
        );
        assert_eq!(contextual_logic_similarity("", "anything", &[]), 0.0);
    }

    #[test]
    fn machine_style_boundary_cases() {
        let same = ["a b c", "a b c", "a b c"];
        let result = machine_style_similarity(&same, 0).unwrap();
        assert!((result.mean - 1.0).abs() < 1e-12);
        assert_eq!(result.per_document.len(), 2);

        let disjoint = ["a b", "c d", "e f"];
        let result = machine_style_similarity(&disjoint, 0).unwrap();
        assert_eq!(result.mean, 0.0);

        assert!(matches!(
            machine_style_similarity(&["only one"], 0),
            Err(StyleError::GroupTooSmall(1))
        ));
        assert!(matches!(
            machine_style_similarity(&["a", "b"], 5),
            Err(StyleError::BenchmarkOutOfRange { .. })
        ));
    }

    fn groups_from_means(means: &[f64]) -> Vec<GroupReport> {
        means
            .iter()
            .enumerate()
            .map(|(i, &mean)| GroupReport::new(i + 1, vec![mean], vec![mean]))
            .collect()
    }

    #[test]
    fn aggregate_reproduces_published_averages() {
        let cases: [(&[f64], f64); 6] = [
            (&[0.553, 0.709, 0.893, 0.835, 0.728], 0.744),
            (&[0.005, 0.111, 0.012, 0.029, 0.138], 0.059),
            (&[0.15, 0.182, 0.167, 0.231, 0.136], 0.173),
            (&[0.254, 0.247, 0.226, 0.243, 0.238], 0.242),
            (&[0.037, 0.037, 0.032, 0.082, 0.025], 0.043),
            (&[0.108, 0.103, 0.09, 0.087, 0.104], 0.098),
        ];
        for (means, expected) in cases {
            let report = aggregate(groups_from_means(means), Thresholds::default());
            assert_eq!(round3(report.avg_context_logic), expected);
            assert_eq!(round3(report.avg_machine_style), expected);
        }
    }

    #[test]
    fn classify_matches_expected_quadrants() {
        let thresholds = Thresholds::default();
        let rule = QuadrantScores::from_machine_and_logic(0.242, 0.744).unwrap();
        assert_eq!(classify_quadrant(&rule, thresholds), QuadrantLabel::MC);
        let baseline = QuadrantScores::from_machine_and_logic(0.043, 0.059).unwrap();
        assert_eq!(classify_quadrant(&baseline, thresholds), QuadrantLabel::HU);
        let hybrid = QuadrantScores::from_machine_and_logic(0.098, 0.173).unwrap();
        assert_eq!(classify_quadrant(&hybrid, thresholds), QuadrantLabel::HU);
    }

    #[test]
    fn thresholds_must_be_strictly_inside_unit_interval() {
        assert!(Thresholds::new(0.15, 0.4).is_ok());
        assert!(Thresholds::new(0.0, 0.4).is_err());
        assert!(Thresholds::new(0.15, 1.0).is_err());
    }

    #[test]
    fn round3_is_half_up() {
        assert_eq!(round3(0.7436), 0.744);
        assert_eq!(round3(0.2416), 0.242);
        assert_eq!(round3(0.0585), 0.059);
        assert_eq!(round3(0.1005), 0.101);
    }
}
