//! Extract Method recommendation engine for the JX language.
//!
//! The pipeline: parse and resolve a source unit, decompose each method body
//! into numbered blocks with `SX.Y` statement labels, enumerate contiguous
//! statement selections, keep the ones an extraction could actually be
//! applied to, and rank them by how dissimilar their variable/type/package
//! dependency sets are from the rest of the method. A mutation harness plants
//! known-good extraction sites by inlining callees, so recommendations can be
//! scored for recall and precision against an exact oracle.

pub mod bench;
pub mod candidates;
pub mod deps;
pub mod refactor;
pub mod scoring;
pub mod structure;
pub mod syntax;

/// Scalar type used for scores and report ratios. The distance math itself is
/// generic; see [`scoring::kulczynski_dist`].
pub type Real = f64;

pub use bench::{evaluate, match_oracle, BenchReport, CorpusError, EvalConfig, MatchResult};
pub use candidates::{generate, is_valid, Candidate, GenerationConfig, Precondition, ValidityVerdict};
pub use deps::{def_use, extract_deps, inputs, live_out, DefUse, DepSets, VarId, VarKind};
pub use refactor::{extract, inline, mutate, MutateConfig, OracleEntry, RefactorError};
pub use scoring::{kulczynski_dist, rank, score, RankingConfig, Recommendation, Score};
pub use structure::{build_blocks, count_statements, LabeledMethod, Selection, StmtLabel};
pub use syntax::{load_unit, parse, pretty_print, resolve_types, SourceUnit, UnitError};

use syntax::{ClassDecl, MethodDecl};

/// Block/label structure and def-use facts of one method, computed together.
pub struct MethodAnalysis<'a> {
    pub labeled: LabeledMethod<'a>,
    pub def_use: DefUse,
}

pub fn analyze_method<'a>(class: &'a ClassDecl, method: &'a MethodDecl) -> MethodAnalysis<'a> {
    let labeled = build_blocks(method);
    let def_use = deps::def_use(&labeled, class);
    MethodAnalysis { labeled, def_use }
}

/// Generate, score, rank: the full recommendation pipeline for one method.
pub fn recommend_method(
    analysis: &MethodAnalysis<'_>,
    gen_cfg: &GenerationConfig,
    rank_cfg: &RankingConfig,
) -> Vec<Recommendation> {
    let scored: Vec<(Candidate, Score)> =
        generate(&analysis.labeled, &analysis.def_use, gen_cfg)
            .into_iter()
            .map(|c| {
                let s = score(&analysis.labeled, &analysis.def_use, &c);
                (c, s)
            })
            .collect();
    rank(scored, rank_cfg)
}
