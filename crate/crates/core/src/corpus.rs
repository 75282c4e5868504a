//! Corpus ingestion, train/test splitting and grouping, and run
//! persistence: generated documents, the metrics CSV, and a manifest that
//! lets a run be re-evaluated without regenerating anything.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::event::{validate_event, Document, EventSequence, GeneratorTag};
use crate::metrics::{HmcuReport, Thresholds};
use crate::report;

/// One corpus row: a reference article plus its structured events and the
/// keywords used to seed the baseline generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub reference_text: String,
    pub events: EventSequence,
    pub keywords: Vec<String>,
}

impl CorpusRecord {
    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("record id is empty".to_string());
        }
        if self.reference_text.trim().is_empty() {
            return Err("reference_text is empty".to_string());
        }
        if self.keywords.is_empty() {
            return Err("keywords list is empty".to_string());
        }
        for (i, event) in self.events.events().iter().enumerate() {
            if let Err(violations) = validate_event(event) {
                return Err(format!(
                    "event {i}: {}",
                    violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Load a JSON Lines corpus. Blank lines are skipped; the first malformed
/// record aborts the load with its line number.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>, CorpusError> {
    let path = path.as_ref();
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CorpusError::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(CorpusError::Io(e)),
    };
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord =
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            })?;
        record
            .validate()
            .map_err(|reason| CorpusError::MalformedRecord {
                line: line_no,
                reason,
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Write records as JSON Lines.
pub fn save_corpus(records: &[CorpusRecord], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Train split plus equally sized, disjoint test groups (the last group may
/// be short when the test count is not divisible).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedCorpus {
    pub train: Vec<CorpusRecord>,
    pub test_groups: Vec<Vec<CorpusRecord>>,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error("train fraction {0} must be strictly between 0 and 1")]
    BadFraction(f64),
    #[error("group count must be at least 1")]
    NoGroups,
    #[error("{records} records cannot fill a {train_fraction} train split and {group_count} test groups")]
    InsufficientRecords {
        records: usize,
        train_fraction: f64,
        group_count: usize,
    },
}

/// Seeded shuffle, then split off the train fraction, then chunk the test
/// partition into `group_count` contiguous groups. Deterministic per seed.
pub fn split_and_group(
    records: &[CorpusRecord],
    train_fraction: f64,
    group_count: usize,
    seed: u64,
) -> Result<GroupedCorpus, SplitError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SplitError::BadFraction(train_fraction));
    }
    if group_count == 0 {
        return Err(SplitError::NoGroups);
    }
    let insufficient = SplitError::InsufficientRecords {
        records: records.len(),
        train_fraction,
        group_count,
    };
    let train_count = (records.len() as f64 * train_fraction).round() as usize;
    let test_count = records.len().saturating_sub(train_count);
    if train_count == 0 || test_count < group_count {
        return Err(insufficient);
    }
    let mut shuffled: Vec<CorpusRecord> = records.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let test = shuffled.split_off(train_count);
    let group_size = test_count.div_ceil(group_count);
    let test_groups = test
        .chunks(group_size)
        .map(|chunk| chunk.to_vec())
        .collect();
    Ok(GroupedCorpus {
        train: shuffled,
        test_groups,
    })
}

/// Everything a finished experiment run leaves behind.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub seed: u64,
    pub config_digest: String,
    pub thresholds: Thresholds,
    pub benchmark_index: usize,
    pub groups: Vec<GroupArtifacts>,
    pub reports: Vec<(GeneratorTag, HmcuReport)>,
}

/// One test group's documents, aligned with `record_ids`; `None` marks a
/// record a system failed on (skipped and excluded from that group's mean).
#[derive(Debug, Clone)]
pub struct GroupArtifacts {
    pub record_ids: Vec<String>,
    pub references: Vec<String>,
    pub systems: BTreeMap<GeneratorTag, Vec<Option<Document>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub config_digest: String,
    pub thresholds: Thresholds,
    pub benchmark_index: usize,
    pub created_unix: u64,
    pub systems: Vec<String>,
    pub groups: Vec<Vec<String>>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.csv";

fn doc_dir(dir: &Path, system: &str, group: usize) -> PathBuf {
    dir.join("docs").join(system).join(format!("g{group}"))
}

/// Write a run to `dir`: one text file per document (sentence per line),
/// the metrics CSV, and the manifest. Returns the manifest path.
///
/// The manifest carries a wall-clock timestamp; every other artifact is a
/// pure function of corpus, config and seed.
pub fn persist_run(run: &RunArtifacts, dir: impl AsRef<Path>) -> Result<PathBuf, CorpusError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for (group_index, group) in run.groups.iter().enumerate() {
        let group_no = group_index + 1;
        let reference_dir = doc_dir(dir, GeneratorTag::Reference.name(), group_no);
        std::fs::create_dir_all(&reference_dir)?;
        for (id, reference) in group.record_ids.iter().zip(&group.references) {
            std::fs::write(reference_dir.join(format!("{id}.txt")), reference)?;
        }
        for (system, documents) in &group.systems {
            let system_dir = doc_dir(dir, system.name(), group_no);
            std::fs::create_dir_all(&system_dir)?;
            for (id, document) in group.record_ids.iter().zip(documents) {
                if let Some(document) = document {
                    let text: Vec<&str> = document.sentences().iter().map(|s| s.text()).collect();
                    std::fs::write(system_dir.join(format!("{id}.txt")), text.join("\n"))?;
                }
            }
        }
    }
    let report_pairs: Vec<(GeneratorTag, &HmcuReport)> = run
        .reports
        .iter()
        .map(|(system, report)| (*system, report))
        .collect();
    std::fs::write(dir.join(REPORT_FILE), report::render_csv(&report_pairs))?;
    let manifest = RunManifest {
        seed: run.seed,
        config_digest: run.config_digest.clone(),
        thresholds: run.thresholds,
        benchmark_index: run.benchmark_index,
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        systems: run
            .reports
            .iter()
            .map(|(system, _)| system.name().to_string())
            .collect(),
        groups: run
            .groups
            .iter()
            .map(|group| group.record_ids.clone())
            .collect(),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(manifest_path)
}

/// A run read back from disk: raw document texts keyed by system name.
#[derive(Debug, Clone)]
pub struct ReloadedRun {
    pub manifest: RunManifest,
    /// Reference texts per group, aligned with the manifest's record ids.
    pub references: Vec<Vec<String>>,
    /// For each system: per group, per record, the document text (None when
    /// the record was skipped at generation time).
    pub systems: BTreeMap<String, Vec<Vec<Option<String>>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReloadError {
    #[error("run directory has no manifest: {0}")]
    NoManifest(PathBuf),
    #[error("manifest is not valid: {0}")]
    BadManifest(#[from] serde_json::Error),
    #[error("missing reference document: {0}")]
    MissingReference(PathBuf),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn reload_run(dir: impl AsRef<Path>) -> Result<ReloadedRun, ReloadError> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .map_err(|_| ReloadError::NoManifest(manifest_path.clone()))?;
    let manifest: RunManifest = serde_json::from_str(&manifest_text)?;

    let mut references = Vec::new();
    for (group_index, record_ids) in manifest.groups.iter().enumerate() {
        let group_no = group_index + 1;
        let reference_dir = doc_dir(dir, GeneratorTag::Reference.name(), group_no);
        let mut group_refs = Vec::new();
        for id in record_ids {
            let path = reference_dir.join(format!("{id}.txt"));
            let text = std::fs::read_to_string(&path)
                .map_err(|_| ReloadError::MissingReference(path.clone()))?;
            group_refs.push(text);
        }
        references.push(group_refs);
    }

    let mut systems = BTreeMap::new();
    for system in &manifest.systems {
        let mut groups = Vec::new();
        for (group_index, record_ids) in manifest.groups.iter().enumerate() {
            let group_no = group_index + 1;
            let system_dir = doc_dir(dir, system, group_no);
            let mut documents = Vec::new();
            for id in record_ids {
                let path = system_dir.join(format!("{id}.txt"));
                documents.push(std::fs::read_to_string(&path).ok());
            }
            groups.push(documents);
        }
        systems.insert(system.clone(), groups);
    }
    Ok(ReloadedRun {
        manifest,
        references,
        systems,
    })
}
