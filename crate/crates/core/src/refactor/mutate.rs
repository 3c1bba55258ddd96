//! Random inline mutations: build a modified unit whose planted extraction
//! sites are recorded as oracle entries.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::inline::check_inline;
use super::{find_class, inline, OracleEntry};
use crate::candidates::{is_valid, GenerationConfig};
use crate::deps::def_use;
use crate::structure::build_blocks;
use crate::syntax::SourceUnit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutateConfig {
    /// Chance that an eligible callee is inlined.
    pub probability: f64,
    pub generation: GenerationConfig,
}

impl Default for MutateConfig {
    fn default() -> Self {
        MutateConfig { probability: 0.5, generation: GenerationConfig::default() }
    }
}

/// Inline a random subset of the eligible callees of `unit`, at most one per
/// host method, and report the planted ranges. Deterministic for a fixed
/// seed. `file_label` is recorded in each entry.
pub fn mutate(
    unit: &SourceUnit,
    file_label: &str,
    seed: u64,
    cfg: &MutateConfig,
) -> (SourceUnit, Vec<OracleEntry>) {
    // every method that could be inlined per the inline preconditions and is
    // big enough to satisfy the size threshold afterwards
    let mut eligible: Vec<(String, String)> = Vec::new();
    for class in &unit.classes {
        for method in &class.methods {
            if method.body.total_stmts() < cfg.generation.min_extracted_statements {
                continue;
            }
            if check_inline(unit, &class.name, &method.name).is_ok() {
                eligible.push((class.name.clone(), method.name.clone()));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eligible.shuffle(&mut rng);

    let mut current = unit.clone();
    let mut entries: Vec<OracleEntry> = Vec::new();
    // methods already carrying a planted range; they must stay intact
    let mut hosted: std::collections::BTreeSet<(String, String)> = std::collections::BTreeSet::new();

    for (class_name, callee_name) in eligible {
        let picked = rng.gen_bool(cfg.probability);
        if !picked {
            continue;
        }
        if hosted.contains(&(class_name.clone(), callee_name.clone())) {
            continue;
        }
        // the call site may have moved if its old host was itself inlined
        let Ok(site) = check_inline(&current, &class_name, &callee_name) else { continue };
        if hosted.contains(&(class_name.clone(), site.method_name.clone())) {
            continue;
        }
        let Ok((mutated, mut entry)) = inline(&current, &class_name, &callee_name) else {
            continue;
        };
        entry.file = file_label.to_string();

        // the planted range must be a valid candidate in the mutated unit
        if !planted_is_valid(&mutated, &entry, &cfg.generation) {
            continue;
        }
        hosted.insert((class_name.clone(), entry.method.clone()));
        entries.push(entry);
        current = mutated;
    }

    entries.sort_by(|a, b| {
        (&a.class_name, &a.method).cmp(&(&b.class_name, &b.method))
    });
    (current, entries)
}

fn planted_is_valid(unit: &SourceUnit, entry: &OracleEntry, cfg: &GenerationConfig) -> bool {
    let Ok((_, class)) = find_class(unit, &entry.class_name) else { return false };
    let Some(method) = class.methods.iter().find(|m| m.name == entry.method) else {
        return false;
    };
    let labeled = build_blocks(method);
    let du = def_use(&labeled, class);
    let Ok(sel) = labeled.selection(entry.block, entry.start, entry.end) else { return false };
    is_valid(&labeled, &du, &sel, cfg).valid
}
