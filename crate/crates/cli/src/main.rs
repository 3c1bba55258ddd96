//! `carve`: Extract Method recommendations for JX sources.
//!
//! Exit codes: 0 on success, 1 on input or corpus errors, 2 when extraction
//! preconditions reject a requested rewrite.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use carve_core::bench::{evaluate, load_corpus, EvalConfig};
use carve_core::refactor::{extract, mutate, MutateConfig, OracleEntry, RefactorError};
use carve_core::scoring::RankingConfig;
use carve_core::structure::labeled_listing;
use carve_core::syntax::{load_unit, pretty_print, ClassDecl, MethodDecl, SourceUnit};
use carve_core::{analyze_method, recommend_method, GenerationConfig};

use report::*;

#[derive(Parser)]
#[command(name = "carve", version, about = "Extract Method recommendations for JX sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct RecommendFlags {
    /// Smallest number of statements an extraction may move.
    #[arg(long = "min-statements", default_value_t = 3, value_parser = at_least_one)]
    min_statements: usize,
    /// Maximum recommendations per method.
    #[arg(long = "max-recs", default_value_t = 3, value_parser = at_least_one)]
    max_recs: usize,
    /// Drop recommendations scoring below this value.
    #[arg(long = "min-score", default_value_t = 0.0)]
    min_score: f64,
}

fn at_least_one(raw: &str) -> std::result::Result<usize, String> {
    match raw.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        Ok(_) => Err("must be at least 1".to_string()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rank extraction opportunities in files or directories.
    Recommend {
        /// `.jx` files or directories to scan.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        flags: RecommendFlags,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Include the dependency sets behind each score.
        #[arg(long)]
        explain: bool,
    },
    /// Apply one extraction and print or write the rewritten unit.
    Apply {
        path: PathBuf,
        /// Target method, as `Class.method` or a unique bare name.
        #[arg(long)]
        method: String,
        /// Selection as `block:start:end` (1-based, inclusive).
        #[arg(long)]
        range: String,
        /// Name of the new method.
        #[arg(long)]
        name: String,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long = "min-statements", default_value_t = 3, value_parser = at_least_one)]
        min_statements: usize,
    },
    /// Plant extraction sites by inlining callees at random.
    Mutate {
        /// A `.jx` file or a directory of them.
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chance that an eligible callee is inlined.
        #[arg(long, default_value_t = 0.5)]
        prob: f64,
        #[arg(long = "min-statements", default_value_t = 3, value_parser = at_least_one)]
        min_statements: usize,
        /// Directory for the mutated corpus.
        #[arg(short, long)]
        out: PathBuf,
        /// Where to write the oracle entries.
        #[arg(long)]
        oracle: PathBuf,
    },
    /// Score recommendations against an oracle file.
    Bench {
        /// Mutated corpus directory.
        corpus: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        /// Top-k cutoff.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long = "min-statements", default_value_t = 3, value_parser = at_least_one)]
        min_statements: usize,
        #[arg(long = "min-score", default_value_t = 0.0)]
        min_score: f64,
    },
    /// Print a method with `SX.Y` statement labels.
    Label {
        path: PathBuf,
        /// Target method, as `Class.method` or a unique bare name.
        #[arg(long)]
        method: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Recommend { paths, flags, json, explain } => cmd_recommend(&paths, flags, json, explain),
        Command::Apply { path, method, range, name, out, min_statements } => {
            cmd_apply(&path, &method, &range, &name, out.as_deref(), min_statements)
        }
        Command::Mutate { path, seed, prob, min_statements, out, oracle } => {
            cmd_mutate(&path, seed, prob, min_statements, &out, &oracle)
        }
        Command::Bench { corpus, oracle, k, min_statements, min_score } => {
            cmd_bench(&corpus, &oracle, k, min_statements, min_score)
        }
        Command::Label { path, method } => cmd_label(&path, &method),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

/// Input or corpus problem.
fn input_err(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

/// Rejected rewrite.
fn precondition_err(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

type CmdResult = std::result::Result<(), Failure>;

/// All `.jx` files reachable from the given paths, sorted by display path.
fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut stack = vec![path.clone()];
            while let Some(dir) = stack.pop() {
                for entry in std::fs::read_dir(&dir)
                    .with_context(|| format!("reading directory {}", dir.display()))?
                {
                    let p = entry?.path();
                    if p.is_dir() {
                        stack.push(p);
                    } else if p.extension().and_then(|e| e.to_str()) == Some("jx") {
                        files.push(p);
                    }
                }
            }
        } else if path.exists() {
            files.push(path.clone());
        } else {
            bail!("no such file or directory: {}", path.display());
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn load_file(path: &Path) -> Result<SourceUnit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    load_unit(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn cmd_recommend(paths: &[PathBuf], flags: RecommendFlags, json: bool, explain: bool) -> CmdResult {
    let gen_cfg = GenerationConfig { min_extracted_statements: flags.min_statements };
    let rank_cfg = RankingConfig {
        max_recommendations_per_method: flags.max_recs,
        min_score: flags.min_score,
    };

    let files = collect_files(paths).map_err(input_err)?;
    let mut file_reports = Vec::new();
    for path in &files {
        let unit = load_file(path).map_err(input_err)?;
        let mut method_reports = Vec::new();
        for class in &unit.classes {
            for method in &class.methods {
                let analysis = analyze_method(class, method);
                let recs = recommend_method(&analysis, &gen_cfg, &rank_cfg);
                if recs.is_empty() {
                    continue;
                }
                let recommendations = recs
                    .iter()
                    .map(|rec| {
                        let explain_report = explain.then(|| {
                            let (sel, rem) = carve_core::scoring::split_deps(
                                &analysis.labeled,
                                &analysis.def_use,
                                &rec.candidate,
                            );
                            ExplainReport {
                                selection: DepSetsReport::from_sets(&sel),
                                remainder: DepSetsReport::from_sets(&rem),
                            }
                        });
                        RecommendationReport {
                            rank: rec.rank,
                            block: rec.candidate.sel.block_id,
                            start: rec.candidate.sel.start,
                            end: rec.candidate.sel.end,
                            labels: label_range(rec),
                            span: ByteSpan {
                                start: rec.candidate.sel.span.start,
                                end: rec.candidate.sel.span.end,
                            },
                            size: rec.candidate.size,
                            score: ScoreReport {
                                total: round4(rec.score.total),
                                var: round4(rec.score.dist_var),
                                type_: round4(rec.score.dist_type),
                                pack: round4(rec.score.dist_pack),
                            },
                            explain: explain_report,
                        }
                    })
                    .collect();
                method_reports.push(MethodReport {
                    method: format!("{}.{}.{}", unit.package, class.name, method.name),
                    recommendations,
                });
            }
        }
        if !method_reports.is_empty() {
            file_reports.push(FileReport {
                file: path.display().to_string(),
                methods: method_reports,
            });
        }
    }

    let doc = ReportDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        files: file_reports,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable report"));
    } else {
        print!("{}", render_human(&doc));
    }
    Ok(())
}

/// Resolve `Class.method` or a unique bare method name.
fn find_target<'u>(
    unit: &'u SourceUnit,
    spec: &str,
) -> Result<(&'u ClassDecl, &'u MethodDecl)> {
    if let Some((class_name, method_name)) = spec.rsplit_once('.') {
        let class = unit
            .class(class_name)
            .ok_or_else(|| anyhow!("class `{class_name}` not found"))?;
        let method = class
            .methods
            .iter()
            .find(|m| m.name == method_name)
            .ok_or_else(|| anyhow!("method `{spec}` not found"))?;
        return Ok((class, method));
    }
    let mut matches = Vec::new();
    for class in &unit.classes {
        for method in &class.methods {
            if method.name == spec {
                matches.push((class, method));
            }
        }
    }
    match matches.len() {
        0 => bail!("method `{spec}` not found"),
        1 => Ok(matches.pop().unwrap()),
        _ => bail!("method name `{spec}` is ambiguous; qualify it as Class.method"),
    }
}

fn parse_range(range: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        bail!("range must be block:start:end, got `{range}`");
    }
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.parse().map_err(|_| anyhow!("range component `{p}` is not a number")))
        .collect::<Result<_>>()?;
    Ok((nums[0], nums[1], nums[2]))
}

fn cmd_apply(
    path: &Path,
    method_spec: &str,
    range: &str,
    name: &str,
    out: Option<&Path>,
    min_statements: usize,
) -> CmdResult {
    let unit = load_file(path).map_err(input_err)?;
    let (block, start, end) = parse_range(range).map_err(input_err)?;
    let (class, method) = find_target(&unit, method_spec).map_err(input_err)?;
    let (class_name, method_name) = (class.name.clone(), method.name.clone());

    let cfg = GenerationConfig { min_extracted_statements: min_statements };
    let rewritten = extract(&unit, &class_name, &method_name, block, start, end, name, &cfg)
        .map_err(|e| match e {
            RefactorError::Precondition { .. }
            | RefactorError::NameClash { .. }
            | RefactorError::Range(_) => precondition_err(anyhow!("{e}")),
            other => input_err(anyhow!("{other}")),
        })?;

    let text = pretty_print(&rewritten);
    match out {
        Some(out_path) => std::fs::write(out_path, text)
            .with_context(|| format!("writing {}", out_path.display()))
            .map_err(input_err)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_mutate(
    path: &Path,
    seed: u64,
    prob: f64,
    min_statements: usize,
    out_dir: &Path,
    oracle_path: &Path,
) -> CmdResult {
    use rand::{Rng, SeedableRng};

    if !(0.0..=1.0).contains(&prob) {
        return Err(input_err(anyhow!("--prob must be within 0..=1, got {prob}")));
    }
    let cfg = MutateConfig {
        probability: prob,
        generation: GenerationConfig { min_extracted_statements: min_statements },
    };

    let root_is_dir = path.is_dir();
    let files = collect_files(std::slice::from_ref(&path.to_path_buf())).map_err(input_err)?;
    if files.is_empty() {
        return Err(input_err(anyhow!("no .jx files under {}", path.display())));
    }

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(input_err)?;

    // one sub-seed per file, drawn in sorted file order
    let mut master = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut all_entries: Vec<OracleEntry> = Vec::new();
    for file in &files {
        let sub_seed: u64 = master.gen();
        let rel = if root_is_dir {
            file.strip_prefix(path)
                .expect("under input root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/")
        } else {
            file.file_name().unwrap().to_string_lossy().into_owned()
        };
        let original = std::fs::read_to_string(file)
            .with_context(|| format!("reading {}", file.display()))
            .map_err(input_err)?;
        let unit = load_unit(&original)
            .map_err(|e| input_err(anyhow!("{}: {e}", file.display())))?;
        let (mutated, entries) = mutate(&unit, &rel, sub_seed, &cfg);

        let target = out_dir.join(&rel);
        if let Some(parent) = target.parent() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))
                .map_err(input_err)?;
        }
        // untouched files are copied byte-for-byte
        let contents = if entries.is_empty() { original } else { pretty_print(&mutated) };
        std::fs::write(&target, contents)
            .with_context(|| format!("writing {}", target.display()))
            .map_err(input_err)?;
        all_entries.extend(entries);
    }

    let json = serde_json::to_string_pretty(&all_entries).expect("serializable oracle");
    std::fs::write(oracle_path, format!("{json}\n"))
        .with_context(|| format!("writing {}", oracle_path.display()))
        .map_err(input_err)?;
    println!("mutated {} file(s), planted {} oracle entr(ies)", files.len(), all_entries.len());
    Ok(())
}

fn cmd_bench(
    corpus: &Path,
    oracle_path: &Path,
    k: usize,
    min_statements: usize,
    min_score: f64,
) -> CmdResult {
    let text = std::fs::read_to_string(oracle_path)
        .with_context(|| format!("reading {}", oracle_path.display()))
        .map_err(input_err)?;
    let oracles: Vec<OracleEntry> = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", oracle_path.display()))
        .map_err(input_err)?;
    let units: BTreeMap<String, SourceUnit> =
        load_corpus(corpus).map_err(|e| input_err(anyhow!("{e}"))).map(|u| u.into_iter().collect())?;

    let cfg = EvalConfig {
        k,
        generation: GenerationConfig { min_extracted_statements: min_statements },
        min_score,
    };
    let report = evaluate(&units, &oracles, &cfg).map_err(|e| input_err(anyhow!("{e}")))?;
    println!("{}", serde_json::to_string(&report).expect("serializable report"));
    print!("{}", report.table());
    Ok(())
}

fn cmd_label(path: &Path, method_spec: &str) -> CmdResult {
    let unit = load_file(path).map_err(input_err)?;
    let (class, method) = find_target(&unit, method_spec).map_err(input_err)?;
    let analysis = analyze_method(class, method);
    print!("{}", labeled_listing(&analysis.labeled));
    Ok(())
}
