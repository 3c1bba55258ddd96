//! Recommendation report: JSON document and human-readable rendering.

use carve_core::deps::DepSets;
use carve_core::scoring::Recommendation;
use carve_core::structure::StmtLabel;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub version: String,
    pub files: Vec<FileReport>,
}

#[derive(Debug, Serialize)]
pub struct FileReport {
    pub file: String,
    pub methods: Vec<MethodReport>,
}

#[derive(Debug, Serialize)]
pub struct MethodReport {
    /// Fully qualified: `package.Class.method`.
    pub method: String,
    pub recommendations: Vec<RecommendationReport>,
}

#[derive(Debug, Serialize)]
pub struct RecommendationReport {
    pub rank: usize,
    pub block: usize,
    pub start: usize,
    pub end: usize,
    /// Label range in `S3.2-S3.5` form.
    pub labels: String,
    pub span: ByteSpan,
    pub size: usize,
    pub score: ScoreReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<ExplainReport>,
}

#[derive(Debug, Serialize)]
pub struct ByteSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Serialize)]
pub struct ScoreReport {
    pub total: f64,
    pub var: f64,
    #[serde(rename = "type")]
    pub type_: f64,
    pub pack: f64,
}

#[derive(Debug, Serialize)]
pub struct ExplainReport {
    pub selection: DepSetsReport,
    pub remainder: DepSetsReport,
}

#[derive(Debug, Serialize)]
pub struct DepSetsReport {
    pub vars: Vec<String>,
    pub types: Vec<String>,
    pub packs: Vec<String>,
}

impl DepSetsReport {
    pub fn from_sets(sets: &DepSets) -> DepSetsReport {
        DepSetsReport {
            vars: sets.vars.iter().map(|v| v.to_string()).collect(),
            types: sets.types.iter().cloned().collect(),
            packs: sets.packs.iter().cloned().collect(),
        }
    }
}

/// Scores are reported at four decimal places.
pub fn round4(v: f64) -> f64 {
    (v * 10000.0).round() / 10000.0
}

pub fn label_range(rec: &Recommendation) -> String {
    let sel = &rec.candidate.sel;
    let first = StmtLabel { block: sel.block_id, index: sel.start };
    let last = StmtLabel { block: sel.block_id, index: sel.end };
    if sel.start == sel.end {
        first.to_string()
    } else {
        format!("{first}-{last}")
    }
}

pub fn render_human(doc: &ReportDocument) -> String {
    let mut out = String::new();
    if doc.files.is_empty() {
        out.push_str("no recommendations\n");
        return out;
    }
    for file in &doc.files {
        out.push_str(&file.file);
        out.push('\n');
        for method in &file.methods {
            out.push_str(&format!("  {}\n", method.method));
            for rec in &method.recommendations {
                out.push_str(&format!(
                    "    #{} {}  score {:.4} (var {:.4}, type {:.4}, pack {:.4})  size {}  bytes {}..{}\n",
                    rec.rank,
                    rec.labels,
                    rec.score.total,
                    rec.score.var,
                    rec.score.type_,
                    rec.score.pack,
                    rec.size,
                    rec.span.start,
                    rec.span.end,
                ));
                if let Some(explain) = &rec.explain {
                    out.push_str(&format!(
                        "       selection vars: {}\n       selection types: {}\n       selection packs: {}\n",
                        explain.selection.vars.join(", "),
                        explain.selection.types.join(", "),
                        explain.selection.packs.join(", "),
                    ));
                    out.push_str(&format!(
                        "       remainder vars: {}\n       remainder types: {}\n       remainder packs: {}\n",
                        explain.remainder.vars.join(", "),
                        explain.remainder.types.join(", "),
                        explain.remainder.packs.join(", "),
                    ));
                }
            }
        }
    }
    out
}
