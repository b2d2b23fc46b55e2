use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fedmerge::config::ExperimentConfig;
use fedmerge::error::{fail, Result, Stage, StageContext};
use fedmerge::formats;
use fedmerge::pipeline::{self, Inputs};
use fedmerge::report::{compare, RunReport};
use fedmerge_core::corpus::{CollectionSet, TextFields};
use fedmerge_core::sampling::build_central_index;
use fedmerge_core::synth::{generate, SynthConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "fedmerge", version, about = "Federated patent retrieval: sampling, selection, results merging, evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build per-collection and union indexes.
    Index(Common),
    /// Run query-based sampling and build the centralized sample index.
    Sample(Common),
    /// Run the full experiment and write runs and reports.
    Run(Common),
    /// Tabulate several report.json files side by side.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also write comparison.csv and comparison.md here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus, topics and qrels.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        collections: Option<usize>,
        #[arg(long)]
        topics: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    topics: Option<PathBuf>,
    #[arg(long)]
    qrels: Option<PathBuf>,
    /// Comma-separated strategies, or `all`.
    #[arg(long)]
    strategy: Option<String>,
    /// cooperative, uncooperative or both.
    #[arg(long)]
    mode: Option<String>,
    /// Number of sources selected per query.
    #[arg(long)]
    select: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Per-collection result depth.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Any config key, as KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p).stage(Stage::Config)?,
            None => ExperimentConfig::default(),
        };
        let paths = [("corpus", &self.corpus), ("topics", &self.topics), ("qrels", &self.qrels)];
        let mut overrides: Vec<(String, String)> = paths
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|p| (k.to_string(), p.display().to_string())))
            .collect();
        let text = [("strategy", self.strategy.clone()), ("mode", self.mode.clone())];
        overrides.extend(text.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        let numbers = [("n_select", self.select.map(|v| v as u64)), ("cutoff", self.cutoff.map(|v| v as u64)), ("k", self.k.map(|v| v as u64)), ("seed", self.seed)];
        overrides.extend(numbers.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v.to_string()))));
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| fail(Stage::Config, format!("--set expects KEY=VALUE, got `{kv}`")))?;
            overrides.push((k.trim().to_string(), v.to_string()));
        }
        for (k, v) in overrides {
            cfg.set(&k, &v).stage(Stage::Config)?;
        }
        cfg.validate().stage(Stage::Config)?;
        Ok(cfg)
    }
}

fn load_corpus(cfg: &ExperimentConfig) -> Result<CollectionSet> {
    let path = cfg.corpus.as_ref().ok_or_else(|| fail(Stage::Config, "no corpus path given"))?;
    let loaded = formats::load_corpus(path, &cfg.field_map, cfg.skip_malformed).stage(Stage::Load)?;
    for e in &loaded.rejected {
        eprintln!("skipped {}: {e}", path.display());
    }
    Ok(loaded.value)
}

fn cmd_index(c: &Common) -> Result<()> {
    let cfg = c.config()?;
    let corpus = load_corpus(&cfg)?;
    let idx = pipeline::build_indexes(&cfg, &corpus)?;
    let dir = c.out.join("index");
    for (code, index) in &idx.collections {
        formats::save_index(&dir.join(format!("{code}.idx")), index).stage(Stage::Index)?;
    }
    formats::save_index(&dir.join("union.idx"), &idx.union).stage(Stage::Index)?;
    eprintln!("indexed {} documents in {} collections -> {}", corpus.num_documents(), idx.collections.len(), dir.display());
    Ok(())
}

fn cmd_sample(c: &Common) -> Result<()> {
    let cfg = c.config()?;
    let corpus = load_corpus(&cfg)?;
    let idx = pipeline::build_indexes(&cfg, &corpus)?;
    let samples = pipeline::sample_collections(&cfg, &idx)?;
    let central = build_central_index(&samples, &corpus, cfg.bm25).stage(Stage::Sample)?;
    formats::write_samples(&samples, &c.out.join("samples.jsonl")).stage(Stage::Sample)?;
    formats::save_index(&c.out.join("central.idx"), &central.index).stage(Stage::Sample)?;
    let total: usize = samples.iter().map(|s| s.doc_ids.len()).sum();
    eprintln!(
        "sampled {total} documents from {} collections; central index holds {} -> {}",
        samples.len(),
        central.index.doc_count(),
        c.out.display()
    );
    Ok(())
}

fn cmd_run(c: &Common) -> Result<()> {
    let mut cfg = c.config()?;
    if cfg.cache_dir.is_none() {
        cfg.cache_dir = Some(c.out.join("cache"));
    }
    let started = Instant::now();
    let inputs = Inputs::load(&cfg)?;
    let exp = pipeline::run_experiment(&cfg, &inputs)?;
    pipeline::write_outputs(&exp, &c.out)?;
    eprint!("{}", exp.report.summary_csv().lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
    eprintln!(
        "done in {:.1}s (cached indexes: {}, cached samples: {}) -> {}",
        started.elapsed().as_secs_f64(),
        exp.cache.indexes,
        exp.cache.samples,
        c.out.display()
    );
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let reports = paths.iter().map(|p| RunReport::load(p)).collect::<Result<Vec<_>>>()?;
    let table = compare(&reports)?;
    print!("{}", table.to_markdown());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).stage(Stage::Compare)?;
        std::fs::write(dir.join("comparison.csv"), table.to_csv()).stage(Stage::Compare)?;
        std::fs::write(dir.join("comparison.md"), table.to_markdown()).stage(Stage::Compare)?;
    }
    Ok(())
}

fn flat(fields: &TextFields) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    m.insert("title".into(), json!(fields.title));
    m.insert("abstract".into(), json!(fields.abstract_text));
    m.insert("description".into(), json!(fields.description));
    m.insert("claims".into(), json!(fields.claims));
    m
}

fn cmd_synth(out: &Path, seed: u64, collections: Option<usize>, topics: Option<usize>) -> Result<()> {
    let mut cfg = SynthConfig::default();
    cfg.n_collections = collections.unwrap_or(cfg.n_collections);
    cfg.n_topics = topics.unwrap_or(cfg.n_topics);
    let corpus = generate(&cfg, seed);
    std::fs::create_dir_all(out).stage(Stage::Report)?;
    let mut docs = String::new();
    for d in &corpus.documents {
        let mut m = flat(&d.text);
        m.insert("doc_id".into(), json!(d.doc_id));
        m.insert("codes".into(), json!(d.codes));
        docs.push_str(&serde_json::Value::Object(m).to_string());
        docs.push('\n');
    }
    let mut tops = String::new();
    for t in &corpus.topics {
        let mut m = flat(&t.text);
        m.insert("topic_id".into(), json!(t.topic_id));
        tops.push_str(&serde_json::Value::Object(m).to_string());
        tops.push('\n');
    }
    let mut qrels = String::new();
    for (q, rel) in &corpus.qrels {
        for d in rel {
            qrels.push_str(&format!("{q} 0 {d} 1\n"));
        }
    }
    for (name, text) in [("corpus.jsonl", docs), ("topics.jsonl", tops), ("qrels.txt", qrels)] {
        std::fs::write(out.join(name), text).stage(Stage::Report)?;
    }
    eprintln!("wrote {} documents, {} topics -> {}", corpus.documents.len(), corpus.topics.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Index(c) => cmd_index(c),
        Command::Sample(c) => cmd_sample(c),
        Command::Run(c) => cmd_run(c),
        Command::Compare { reports, out } => cmd_compare(reports, out.as_deref()),
        Command::Synth { out, seed, collections, topics } => cmd_synth(out, *seed, *collections, *topics),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
