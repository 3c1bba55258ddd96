//! Candidate scoring and ranking.
//!
//! A candidate is scored by the Kulczynski distance between the dependency
//! sets of its selection and those of the rest of the method, averaged with
//! equal weight over variables, types, and packages. The distance math is
//! generic over the scalar type; the pipeline uses [`crate::Real`].

use std::collections::{BTreeSet, HashSet};

use num_traits::{FromPrimitive, Num};

use crate::candidates::Candidate;
use crate::deps::{extract_deps, DefUse, DepSets};
use crate::structure::LabeledMethod;
use crate::syntax::StmtId;
use crate::Real;

/// Kulczynski distance between two finite sets:
/// `1 - (a/(a+b) + a/(a+c)) / 2` with `a` the intersection size and `b`, `c`
/// the difference sizes. Defined as 1 when the intersection is empty, which
/// covers disjoint and empty operands.
pub fn kulczynski_dist<T: Ord, F: Num + FromPrimitive + Clone>(
    a: &BTreeSet<T>,
    b: &BTreeSet<T>,
) -> F {
    let inter = a.intersection(b).count();
    if inter == 0 {
        return F::one();
    }
    let i = F::from_usize(inter).expect("set size fits the scalar");
    let na = F::from_usize(a.len()).expect("set size fits the scalar");
    let nb = F::from_usize(b.len()).expect("set size fits the scalar");
    let two = F::from_u8(2).expect("2 fits the scalar");
    // a+b = |A| and a+c = |B|
    let sum = i.clone() / na + i / nb;
    F::one() - sum / two
}

/// Score breakdown of one candidate; all components in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub total: Real,
    pub dist_var: Real,
    pub dist_type: Real,
    pub dist_pack: Real,
}

impl Score {
    pub fn from_parts(dist_var: Real, dist_type: Real, dist_pack: Real) -> Score {
        Score { total: (dist_var + dist_type + dist_pack) / 3.0, dist_var, dist_type, dist_pack }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingConfig {
    pub max_recommendations_per_method: usize,
    pub min_score: Real,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig { max_recommendations_per_method: 3, min_score: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub candidate: Candidate,
    pub score: Score,
    /// 1-based rank within the method.
    pub rank: usize,
}

/// Dependency sets of a candidate's selection and of its remainder.
pub fn split_deps(
    labeled: &LabeledMethod<'_>,
    def_use: &DefUse,
    cand: &Candidate,
) -> (DepSets, DepSets) {
    let closure: HashSet<StmtId> = cand.sel.closure.iter().copied().collect();
    let selected = extract_deps(def_use, cand.sel.closure.iter().copied());
    let remainder = extract_deps(
        def_use,
        labeled.statements().iter().map(|s| s.id).filter(|id| !closure.contains(id)),
    );
    (selected, remainder)
}

/// Score one candidate against the rest of its method.
pub fn score(labeled: &LabeledMethod<'_>, def_use: &DefUse, cand: &Candidate) -> Score {
    let (selected, remainder) = split_deps(labeled, def_use, cand);
    Score::from_parts(
        kulczynski_dist(&selected.vars, &remainder.vars),
        kulczynski_dist(&selected.types, &remainder.types),
        kulczynski_dist(&selected.packs, &remainder.packs),
    )
}

/// Sort scored candidates, filter by minimum score, cut to the per-method
/// maximum, and assign ranks. Ties break on earlier start offset, then
/// smaller size, then lower block id, then range.
pub fn rank(scored: Vec<(Candidate, Score)>, cfg: &RankingConfig) -> Vec<Recommendation> {
    let mut entries = scored;
    entries.sort_by(|(ca, sa), (cb, sb)| {
        sb.total
            .total_cmp(&sa.total)
            .then_with(|| ca.sel.span.start.cmp(&cb.sel.span.start))
            .then_with(|| ca.size.cmp(&cb.size))
            .then_with(|| ca.sel.block_id.cmp(&cb.sel.block_id))
            .then_with(|| (ca.sel.start, ca.sel.end).cmp(&(cb.sel.start, cb.sel.end)))
    });
    entries.retain(|(_, s)| s.total >= cfg.min_score);
    entries.truncate(cfg.max_recommendations_per_method);
    entries
        .into_iter()
        .enumerate()
        .map(|(idx, (candidate, score))| Recommendation { candidate, score, rank: idx + 1 })
        .collect()
}
