//! Benchmark harness: match ranked recommendations against planted oracle
//! entries and aggregate recall/precision at a top-k cutoff.
//!
//! A recommendation counts only on exact `(block, start, end)` equality with
//! its oracle entry; one statement of difference is a miss.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::candidates::{generate, GenerationConfig};
use crate::deps::def_use;
use crate::refactor::OracleEntry;
use crate::scoring::{rank, score, RankingConfig, Recommendation};
use crate::structure::build_blocks;
use crate::syntax::{self, SourceUnit};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub oracle: OracleEntry,
    /// Rank of the exactly-matching recommendation, if any.
    pub matched_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub k: usize,
    #[serde(rename = "oracles")]
    pub oracle_count: usize,
    pub matched: usize,
    #[serde(rename = "emitted")]
    pub recommendations_emitted: usize,
    pub recall: Real,
    pub precision: Real,
}

impl BenchReport {
    pub fn new(k: usize, oracle_count: usize, matched: usize, emitted: usize) -> BenchReport {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as Real / den as Real };
        BenchReport {
            k,
            oracle_count,
            matched,
            recommendations_emitted: emitted,
            recall: ratio(matched, oracle_count),
            precision: ratio(matched, emitted),
        }
    }

    /// Aligned text table with one row for this run.
    pub fn table(&self) -> String {
        let pct = |v: Real| format!("{:.1}%", v * 100.0);
        let mut out = String::new();
        out.push_str(&format!(
            "{:>5} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            "k", "oracles", "matched", "emitted", "recall", "prec."
        ));
        out.push_str(&format!(
            "{:>5} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            self.k,
            self.oracle_count,
            self.matched,
            self.recommendations_emitted,
            pct(self.recall),
            pct(self.precision),
        ));
        out
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("oracle entry references missing file `{0}`")]
    MissingFile(String),
    #[error("oracle entry references missing method `{class}.{method}` in `{file}`")]
    MissingMethod { file: String, class: String, method: String },
    #[error("oracle entry addresses invalid range {block}:{start}:{end} in `{class}.{method}`")]
    BadRange { class: String, method: String, block: usize, start: usize, end: usize },
    #[error("failed to load `{file}`: {message}")]
    Load { file: String, message: String },
    #[error("i/o error on `{file}`: {source}")]
    Io { file: String, source: std::io::Error },
}

/// Exact-match lookup of one oracle entry in a method's recommendations.
pub fn match_oracle(recs: &[Recommendation], oracle: &OracleEntry) -> MatchResult {
    let matched_rank = recs
        .iter()
        .find(|r| {
            r.candidate.sel.block_id == oracle.block
                && r.candidate.sel.start == oracle.start
                && r.candidate.sel.end == oracle.end
        })
        .map(|r| r.rank);
    MatchResult { oracle: oracle.clone(), matched_rank }
}

/// Evaluation configuration: top-k cutoff plus the recommendation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub k: usize,
    pub generation: GenerationConfig,
    pub min_score: Real,
}

impl EvalConfig {
    pub fn top_k(k: usize) -> EvalConfig {
        EvalConfig { k, generation: GenerationConfig::default(), min_score: 0.0 }
    }
}

/// Run the recommender on every method that carries an oracle entry and
/// aggregate exact matches. `units` is keyed by the oracle `file` field.
pub fn evaluate(
    units: &BTreeMap<String, SourceUnit>,
    oracles: &[OracleEntry],
    cfg: &EvalConfig,
) -> Result<BenchReport, CorpusError> {
    let ranking = RankingConfig { max_recommendations_per_method: cfg.k, min_score: cfg.min_score };

    // recommendations are computed once per method, even with several entries
    let mut methods: BTreeSet<(String, String, String)> = BTreeSet::new();
    for oracle in oracles {
        methods.insert((oracle.file.clone(), oracle.class_name.clone(), oracle.method.clone()));
    }

    let mut recs_by_method: BTreeMap<(String, String, String), Vec<Recommendation>> = BTreeMap::new();
    let mut emitted = 0usize;
    for key in methods {
        let (file, class_name, method_name) = key.clone();
        let unit = units.get(&file).ok_or_else(|| CorpusError::MissingFile(file.clone()))?;
        let class = unit.class(&class_name).ok_or_else(|| CorpusError::MissingMethod {
            file: file.clone(),
            class: class_name.clone(),
            method: method_name.clone(),
        })?;
        let method = class
            .methods
            .iter()
            .find(|m| m.name == method_name)
            .ok_or_else(|| CorpusError::MissingMethod {
                file: file.clone(),
                class: class_name.clone(),
                method: method_name.clone(),
            })?;
        let labeled = build_blocks(method);
        let du = def_use(&labeled, class);
        let scored: Vec<_> = generate(&labeled, &du, &cfg.generation)
            .into_iter()
            .map(|c| {
                let s = score(&labeled, &du, &c);
                (c, s)
            })
            .collect();
        let recs = rank(scored, &ranking);
        emitted += recs.len();
        recs_by_method.insert(key, recs);
    }

    let mut matched = 0usize;
    for oracle in oracles {
        let key =
            (oracle.file.clone(), oracle.class_name.clone(), oracle.method.clone());
        let recs = &recs_by_method[&key];
        // reject entries whose range does not even exist in the method
        let unit = &units[&oracle.file];
        let class = unit.class(&oracle.class_name).expect("checked above");
        let method = class.methods.iter().find(|m| m.name == oracle.method).expect("checked");
        let labeled = build_blocks(method);
        if labeled.selection(oracle.block, oracle.start, oracle.end).is_err() {
            return Err(CorpusError::BadRange {
                class: oracle.class_name.clone(),
                method: oracle.method.clone(),
                block: oracle.block,
                start: oracle.start,
                end: oracle.end,
            });
        }
        if match_oracle(recs, oracle).matched_rank.is_some() {
            matched += 1;
        }
    }

    Ok(BenchReport::new(cfg.k, oracles.len(), matched, emitted))
}

/// Load every `.jx` file under `dir` (recursively), keyed by its relative
/// path with `/` separators.
pub fn load_corpus(dir: &Path) -> Result<BTreeMap<String, SourceUnit>, CorpusError> {
    let mut units = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = std::fs::read_dir(&d)
            .map_err(|e| CorpusError::Io { file: d.display().to_string(), source: e })?;
        for entry in entries {
            let entry = entry
                .map_err(|e| CorpusError::Io { file: d.display().to_string(), source: e })?;
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().and_then(|e| e.to_str()) == Some("jx") {
                let rel = path
                    .strip_prefix(dir)
                    .expect("under corpus root")
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect::<Vec<_>>()
                    .join("/");
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CorpusError::Io { file: rel.clone(), source: e })?;
                let unit = syntax::load_unit(&text)
                    .map_err(|e| CorpusError::Load { file: rel.clone(), message: e.to_string() })?;
                units.insert(rel, unit);
            }
        }
    }
    Ok(units)
}
