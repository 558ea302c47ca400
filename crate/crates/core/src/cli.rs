//! Command line front end.
//!
//! Settings resolve in the order flags, then an optional `--config` file
//! (TOML or JSON, chosen by extension), then built-in defaults. The
//! effective settings are embedded in every report written.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on invalid input.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{compare_runs, cutoff_sweep, evaluate_run, per_query_csv, stats_json, sweep_csv, MetricReport};
use crate::corpus::{build_index, load_index, save_index};
use crate::counterfactual::{cds_collection, crbo, load_pos_annotations, RboConfig, RboVariant};
use crate::error::{Error, Result};
use crate::io;
use crate::lexicon::{load_cds_mapping, load_lexicon};
use crate::metrics::{ifairr, FairnessConfig};
use crate::rankings::{parse_qrels, parse_run};

/// Environment variable holding the worker thread count.
pub const WORKERS_ENV: &str = "TEXFAIR_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "texfair", version, about = "Term-exposure fairness evaluation for ranked lists")]
pub struct Cli {
    /// Settings file (TOML or JSON) with any of: k, tau, log_base, target,
    /// rbo_p, rbo_depth, rbo_variant. Flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tokenize a collection and write its per-document statistics index.
    Index(IndexArgs),
    /// Compute fairness (and optionally effectiveness) for one or more runs.
    Evaluate(EvaluateArgs),
    /// Write a counterfactual collection with gendered terms swapped.
    Cds(CdsArgs),
    /// Rank-biased overlap between original and counterfactual runs.
    Crbo(CrboArgs),
    /// Mean fairness of a run over a range of cut-offs.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IndexArgs {
    /// Collection TSV (`doc_id<TAB>text`), optionally gzipped.
    #[arg(long)]
    pub collection: PathBuf,
    /// Lexicon JSON.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Index file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FairnessFlags {
    /// Ranking cut-off [default: 10].
    #[arg(long)]
    pub k: Option<usize>,
    /// Neutrality threshold: documents with at most this many group terms
    /// are neutral [default: 0].
    #[arg(long)]
    pub tau: Option<u64>,
    /// Logarithm base of the position bias 1/log(r+1) [default: 2].
    #[arg(long)]
    pub log_base: Option<f64>,
    /// Target distribution as `group=share,...` [default: lexicon target,
    /// else uniform].
    #[arg(long, value_parser = parse_target)]
    pub target: Option<BTreeMap<String, f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct EvaluateArgs {
    /// TREC run file; repeat to evaluate and compare several runs.
    #[arg(long = "run", required = true)]
    pub runs: Vec<PathBuf>,
    /// Index built by `texfair index`; also the NFaiRR background set.
    #[arg(long)]
    pub index: PathBuf,
    /// Lexicon JSON the index was built with.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// TREC qrels for MRR and nDCG.
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    #[command(flatten)]
    pub fairness: FairnessFlags,
    /// Output directory for per_query.csv and stats.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CdsArgs {
    /// Collection TSV to transform.
    #[arg(long)]
    pub collection: PathBuf,
    /// Substitution table (`term<TAB>counterpart[<TAB>POSS|PRON|NAME]`).
    #[arg(long)]
    pub mapping: PathBuf,
    /// POS annotations (`doc_id<TAB>token_index<TAB>POSS|PRON`) for
    /// ambiguous terms; without it a next-word heuristic is used.
    #[arg(long)]
    pub pos: Option<PathBuf>,
    /// Counterfactual collection to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Substitution count report [default: <out>.report.json].
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RboFlags {
    /// RBO persistence [default: 0.9].
    #[arg(long)]
    pub p: Option<f64>,
    /// RBO evaluation depth [default: 10].
    #[arg(long)]
    pub depth: Option<usize>,
    /// `extrapolated` or `truncated` [default: extrapolated].
    #[arg(long)]
    pub variant: Option<RboVariant>,
}

#[derive(Args, Debug, Clone)]
pub struct CrboArgs {
    /// Run on the original collection.
    #[arg(long)]
    pub original: PathBuf,
    /// Run of the same ranker on the counterfactual collection.
    #[arg(long)]
    pub counterfactual: PathBuf,
    #[command(flatten)]
    pub rbo: RboFlags,
    /// Output directory for crbo.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Comma-separated cut-offs [default: 10,20,...,100].
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[command(flatten)]
    pub fairness: FairnessFlags,
    /// Output directory for sweep.csv.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_target(s: &str) -> std::result::Result<BTreeMap<String, f64>, String> {
    s.split(',')
        .map(|pair| {
            let (g, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected group=share, got {pair:?}"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("bad share {v:?}"))?;
            Ok((g.trim().to_owned(), v))
        })
        .collect()
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub tau: Option<u64>,
    pub log_base: Option<f64>,
    pub target: Option<BTreeMap<String, f64>>,
    pub rbo_p: Option<f64>,
    pub rbo_depth: Option<usize>,
    pub rbo_variant: Option<RboVariant>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false);
        if json {
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| {
                let line = e
                    .span()
                    .map(|s| text[..s.start].matches('\n').count() + 1)
                    .unwrap_or(0);
                Error::parse(path, line, e.message().to_owned())
            })
        }
    }
}

fn fairness_config(flags: &FairnessFlags, file: &FileConfig, lexicon_path: &Path) -> Result<FairnessConfig> {
    let target = flags.target.as_ref().or(file.target.as_ref());
    let lexicon = load_lexicon(lexicon_path, target)?;
    let mut cfg = FairnessConfig::for_lexicon(&lexicon);
    cfg.k = flags.k.or(file.k).unwrap_or(FairnessConfig::DEFAULT_K);
    cfg.tau = flags.tau.or(file.tau).unwrap_or(FairnessConfig::DEFAULT_TAU);
    cfg.log_base = flags.log_base.or(file.log_base).unwrap_or(FairnessConfig::DEFAULT_LOG_BASE);
    cfg.validate()?;
    Ok(cfg)
}

fn rbo_config(flags: &RboFlags, file: &FileConfig) -> Result<RboConfig> {
    let d = RboConfig::default();
    let cfg = RboConfig {
        p: flags.p.or(file.rbo_p).unwrap_or(d.p),
        depth: flags.depth.or(file.rbo_depth).unwrap_or(d.depth),
        variant: flags.variant.or(file.rbo_variant).unwrap_or(d.variant),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_checked_index(index: &Path, lexicon: &Path) -> Result<crate::CorpusIndex> {
    let index = load_index(index)?;
    index.check_lexicon(&load_lexicon(lexicon, None)?)?;
    Ok(index)
}

fn run_tags(paths: &[PathBuf]) -> Vec<String> {
    let mut tags: Vec<String> = Vec::with_capacity(paths.len());
    for p in paths {
        let stem = p
            .file_name()
            .and_then(|s| s.to_str())
            .map(|s| s.trim_end_matches(".gz"))
            .map(|s| Path::new(s).file_stem().and_then(|x| x.to_str()).unwrap_or(s).to_owned())
            .unwrap_or_else(|| "run".into());
        let mut tag = stem.clone();
        let mut n = 2;
        while tags.contains(&tag) {
            tag = format!("{stem}_{n}");
            n += 1;
        }
        tags.push(tag);
    }
    tags
}

pub fn cmd_index(args: &IndexArgs) -> Result<String> {
    let start = Instant::now();
    let lexicon = load_lexicon(&args.lexicon, None)?;
    let index = build_index(&args.collection, &lexicon)?;
    save_index(&index, &args.out)?;
    Ok(format!(
        "indexed {} documents in {:.2}s -> {}\n",
        index.len(),
        start.elapsed().as_secs_f64(),
        args.out.display()
    ))
}

#[derive(Serialize)]
struct EvaluateProvenance<'a> {
    fairness: &'a FairnessConfig,
    background: &'static str,
    index: String,
    runs: Vec<String>,
    qrels: Option<String>,
}

pub fn cmd_evaluate(args: &EvaluateArgs, file: &FileConfig) -> Result<(String, Vec<MetricReport>)> {
    let cfg = fairness_config(&args.fairness, file, &args.lexicon)?;
    let index = load_checked_index(&args.index, &args.lexicon)?;
    let qrels = args.qrels.as_deref().map(parse_qrels).transpose()?;
    let background = ifairr(index.docs(), &cfg)?;

    let tags = run_tags(&args.runs);
    let mut reports = Vec::with_capacity(args.runs.len());
    for (path, tag) in args.runs.iter().zip(&tags) {
        let run = parse_run(path)?;
        reports.push(evaluate_run(tag, &run, &index, background, &cfg, qrels.as_ref())?);
    }
    let comparisons = compare_runs(&reports);

    let provenance = EvaluateProvenance {
        fairness: &cfg,
        background: "whole index",
        index: args.index.display().to_string(),
        runs: args.runs.iter().map(|p| p.display().to_string()).collect(),
        qrels: args.qrels.as_ref().map(|p| p.display().to_string()),
    };
    io::write_string(&args.out.join("per_query.csv"), &per_query_csv(&reports))?;
    io::write_string(&args.out.join("stats.json"), &stats_json(&provenance, &reports, &comparisons))?;

    let mut summary = format!(
        "k={} tau={} log_base={} ideal_fairr={:.4}\n{:<20} {:>8} {:>8} {:>8} {:>15} {:>8}",
        cfg.k, cfg.tau, cfg.log_base, background, "run", "queries", "nfairr", "texfair", "texfair_no_rbdf", "awrf_doc"
    );
    if qrels.is_some() {
        summary.push_str(&format!(" {:>8} {:>8}", "mrr", "ndcg"));
    }
    summary.push('\n');
    let fmt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "NA".into());
    for r in &reports {
        summary.push_str(&format!(
            "{:<20} {:>8} {:>8} {:>8} {:>15} {:>8}",
            r.run_tag,
            r.per_query.len(),
            fmt(r.mean("nfairr")),
            fmt(r.mean("texfair")),
            fmt(r.mean("texfair_no_rbdf")),
            fmt(r.mean("awrf_doc")),
        ));
        if qrels.is_some() {
            summary.push_str(&format!(" {:>8} {:>8}", fmt(r.mean("mrr")), fmt(r.mean("ndcg"))));
        }
        summary.push('\n');
    }
    Ok((summary, reports))
}

pub fn cmd_cds(args: &CdsArgs) -> Result<String> {
    let mapping = load_cds_mapping(&args.mapping)?;
    let pos = args.pos.as_deref().map(load_pos_annotations).transpose()?;
    let report = cds_collection(&args.collection, &mapping, pos.as_ref(), &args.out)?;
    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".report.json");
        PathBuf::from(name)
    });
    io::write_string(&report_path, &report.to_json())?;
    Ok(format!(
        "{} substitutions -> {} (report {})\n",
        report.total(),
        args.out.display(),
        report_path.display()
    ))
}

pub fn cmd_crbo(args: &CrboArgs, file: &FileConfig) -> Result<String> {
    let cfg = rbo_config(&args.rbo, file)?;
    let original = parse_run(&args.original)?;
    let counterfactual = parse_run(&args.counterfactual)?;
    let report = crbo(&original, &counterfactual, &cfg)?;
    let mut csv = String::from("qid,rbo\n");
    for (q, v) in &report.per_query {
        csv.push_str(&format!("{q},{v}\n"));
    }
    io::write_string(&args.out.join("crbo.csv"), &csv)?;
    let variant = match cfg.variant {
        RboVariant::Extrapolated => "extrapolated",
        RboVariant::Truncated => "truncated",
    };
    Ok(format!(
        "CRBO ({variant}, p={}, depth={}) over {} queries: {:.4}\n",
        cfg.p,
        cfg.depth,
        report.per_query.len(),
        report.mean
    ))
}

pub fn cmd_sweep(args: &SweepArgs, file: &FileConfig) -> Result<String> {
    let cfg = fairness_config(&args.fairness, file, &args.lexicon)?;
    let index = load_checked_index(&args.index, &args.lexicon)?;
    let run = parse_run(&args.run)?;
    let ks = args.ks.clone().unwrap_or_else(|| (1..=10).map(|i| i * 10).collect());
    let rows = cutoff_sweep(&run, &index, index.docs(), &cfg, &ks)?;
    let csv = sweep_csv(&rows);
    io::write_string(&args.out.join("sweep.csv"), &csv)?;
    Ok(csv)
}

fn init_workers() -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one parsed command and returns its stdout text.
pub fn execute(cli: &Cli) -> Result<String> {
    init_workers()?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Index(a) => cmd_index(a),
        Command::Evaluate(a) => cmd_evaluate(a, &file).map(|(s, _)| s),
        Command::Cds(a) => cmd_cds(a),
        Command::Crbo(a) => cmd_crbo(a, &file),
        Command::Sweep(a) => cmd_sweep(a, &file),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_defaults() {
        let mut cmd = Cli::command();
        let eval = cmd.find_subcommand_mut("evaluate").unwrap().render_long_help().to_string();
        for needle in ["--k", "[default: 10]", "--tau", "[default: 0]", "--log-base", "[default: 2]"] {
            assert!(eval.contains(needle), "evaluate help lacks {needle}:\n{eval}");
        }
        let crbo = cmd.find_subcommand_mut("crbo").unwrap().render_long_help().to_string();
        for needle in ["--p", "[default: 0.9]", "--depth", "--variant", "[default: extrapolated]"] {
            assert!(crbo.contains(needle), "crbo help lacks {needle}:\n{crbo}");
        }
    }

    #[test]
    fn target_flag_parsing() {
        let t = parse_target("female=0.4, male=0.6").unwrap();
        assert_eq!(t["female"], 0.4);
        assert!(parse_target("female").is_err());
    }

    #[test]
    fn file_config_formats() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("c.toml");
        std::fs::write(&toml_path, "k = 20\nrbo_variant = \"truncated\"\n").unwrap();
        let c = FileConfig::load(&toml_path).unwrap();
        assert_eq!(c.k, Some(20));
        assert_eq!(c.rbo_variant, Some(RboVariant::Truncated));

        let json_path = dir.path().join("c.json");
        std::fs::write(&json_path, r#"{"tau": 2, "target": {"f": 0.5, "m": 0.5}}"#).unwrap();
        assert_eq!(FileConfig::load(&json_path).unwrap().tau, Some(2));

        std::fs::write(&toml_path, "bogus = 1\n").unwrap();
        assert!(matches!(FileConfig::load(&toml_path), Err(Error::Parse { .. })));
    }

    #[test]
    fn flags_override_file() {
        let flags = RboFlags {
            p: Some(0.8),
            ..Default::default()
        };
        let file = FileConfig {
            rbo_p: Some(0.5),
            rbo_depth: Some(20),
            ..Default::default()
        };
        let c = rbo_config(&flags, &file).unwrap();
        assert_eq!((c.p, c.depth, c.variant), (0.8, 20, RboVariant::Extrapolated));
    }

    #[test]
    fn run_tags_are_unique() {
        let tags = run_tags(&[PathBuf::from("a/bm25.run"), PathBuf::from("b/bm25.run"), PathBuf::from("x.trec.gz")]);
        assert_eq!(tags, vec!["bm25", "bm25_2", "x"]);
    }
}
