//! Run reports and cross-report comparison tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fedmerge_core::eval::EvalResult;
use fedmerge_core::selection::SourceScore;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode, Strategy};
use crate::error::{fail, Result, Stage, StageContext};
use crate::pipeline::Inputs;

/// How the recall-oriented metric is computed; echoed into every report.
pub const PRES_NOTE: &str = "pres = PRES with n_max = cutoff; relevant documents missing from the top n_max are \
placed at ranks n_max+1, n_max+2, ...; clamped to [0,1]. map denominator = number of relevant documents";

pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub mode: Mode,
    pub eval: EvalResult,
    /// Per-source CORI fallbacks summed over queries.
    pub fallback_sources: usize,
    /// Queries merged entirely by the CORI fallback.
    pub fallback_queries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format: u32,
    /// Effective configuration, in echo order.
    pub config: Vec<(String, String)>,
    pub seed: u64,
    pub cutoff: usize,
    pub corpus_sha256: String,
    pub topics_sha256: String,
    pub qrels_sha256: String,
    pub n_documents: usize,
    pub n_collections: usize,
    pub n_topics: usize,
    pub rejected_records: usize,
    /// Topics whose query had no indexable terms, per mode.
    pub empty_queries: BTreeMap<Mode, usize>,
    pub metric_note: String,
    pub results: Vec<StrategyOutcome>,
}

impl RunReport {
    pub(crate) fn new(
        cfg: &ExperimentConfig,
        inputs: &Inputs,
        n_collections: usize,
        n_topics: usize,
        empty_queries: BTreeMap<Mode, usize>,
        results: Vec<StrategyOutcome>,
    ) -> Self {
        Self {
            format: REPORT_FORMAT,
            config: cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            seed: cfg.seed,
            cutoff: cfg.cutoff,
            corpus_sha256: inputs.corpus_digest.clone(),
            topics_sha256: inputs.topics_digest.clone(),
            qrels_sha256: inputs.qrels_digest.clone(),
            n_documents: inputs.corpus.num_documents(),
            n_collections,
            n_topics,
            rejected_records: inputs.rejected_records,
            empty_queries,
            metric_note: PRES_NOTE.into(),
            results,
        }
    }

    pub fn outcome(&self, mode: Mode, strategy: Strategy) -> Option<&StrategyOutcome> {
        self.results.iter().find(|o| o.mode == mode && o.strategy == strategy)
    }

    fn header(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            writeln!(s, "# {k} = {v}").unwrap();
        }
        for (k, v) in [
            ("corpus_sha256", &self.corpus_sha256),
            ("topics_sha256", &self.topics_sha256),
            ("qrels_sha256", &self.qrels_sha256),
        ] {
            writeln!(s, "# {k} = {v}").unwrap();
        }
        writeln!(
            s,
            "# documents = {}, collections = {}, topics = {}, rejected_records = {}",
            self.n_documents, self.n_collections, self.n_topics, self.rejected_records
        )
        .unwrap();
        for (mode, n) in &self.empty_queries {
            writeln!(s, "# empty_queries.{mode} = {n}").unwrap();
        }
        writeln!(s, "# {}", self.metric_note).unwrap();
        s
    }

    /// Summary CSV: config echo as `#` lines, then one row per strategy
    /// and mode.
    pub fn summary_csv(&self) -> String {
        let k = self.cutoff;
        let mut s = self.header();
        writeln!(s, "strategy,mode,map@{k},pres@{k},recall@{k},queries,skipped,fallback_sources,fallback_queries").unwrap();
        for o in &self.results {
            let e = &o.eval;
            writeln!(
                s,
                "{},{},{:.6},{:.6},{:.6},{},{},{},{}",
                o.strategy, o.mode, e.map, e.pres, e.recall, e.n_queries, e.skipped, o.fallback_sources, o.fallback_queries
            )
            .unwrap();
        }
        s
    }

    pub fn per_query_csv(&self) -> String {
        let mut s = String::from("strategy,mode,query_id,ap,pres,recall\n");
        for o in &self.results {
            for (q, m) in &o.eval.per_query {
                writeln!(s, "{},{},{q},{:.6},{:.6},{:.6}", o.strategy, o.mode, m.ap, m.pres, m.recall).unwrap();
            }
        }
        s
    }

    /// Writes `report.json`, `report.csv`, `per_query.csv` and
    /// `selection.tsv`.
    pub fn write(&self, out: &Path, selections: &BTreeMap<Mode, BTreeMap<String, Vec<SourceScore>>>) -> Result<()> {
        std::fs::create_dir_all(out).stage(Stage::Report)?;
        let json = serde_json::to_string_pretty(self).stage(Stage::Report)?;
        std::fs::write(out.join("report.json"), json + "\n").stage(Stage::Report)?;
        std::fs::write(out.join("report.csv"), self.summary_csv()).stage(Stage::Report)?;
        std::fs::write(out.join("per_query.csv"), self.per_query_csv()).stage(Stage::Report)?;
        let mut log = String::from("mode\tquery_id\trank\tsource_id\tscore\n");
        for (mode, queries) in selections {
            for (q, sources) in queries {
                for s in sources {
                    writeln!(log, "{mode}\t{q}\t{}\t{}\t{}", s.rank, s.source_id, s.score).unwrap();
                }
            }
        }
        std::fs::write(out.join("selection.tsv"), log).stage(Stage::Report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| fail(Stage::Compare, format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| fail(Stage::Compare, format!("{}: {e}", path.display())))
    }
}

const METRICS: [&str; 3] = ["map", "pres", "recall"];

/// Strategies by modes by metrics, with relative deltas against the CORI
/// and SSL rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub cutoff: usize,
    pub modes: Vec<Mode>,
    pub strategies: Vec<Strategy>,
    /// `values[strategy][mode]` = `[map, pres, recall]`.
    pub values: BTreeMap<Strategy, BTreeMap<Mode, [f64; 3]>>,
}

/// `(x - baseline) / baseline`; `None` when the baseline is zero.
pub fn relative_delta(x: f64, baseline: f64) -> Option<f64> {
    (baseline != 0.0).then(|| (x - baseline) / baseline)
}

/// Builds a comparison; reports must share corpus, qrels and cutoff.
/// Repeated strategy and mode pairs must agree.
pub fn compare(reports: &[RunReport]) -> Result<Comparison> {
    let first = reports.first().ok_or_else(|| fail(Stage::Compare, "no reports given"))?;
    for (i, r) in reports.iter().enumerate().skip(1) {
        for (what, a, b) in [
            ("corpus", &first.corpus_sha256, &r.corpus_sha256),
            ("qrels", &first.qrels_sha256, &r.qrels_sha256),
        ] {
            if a != b {
                return Err(fail(Stage::Compare, format!("report {} uses a different {what} than report 1", i + 1)));
            }
        }
        if r.cutoff != first.cutoff {
            return Err(fail(Stage::Compare, format!("report {} has cutoff {} but report 1 has {}", i + 1, r.cutoff, first.cutoff)));
        }
    }
    let mut values: BTreeMap<Strategy, BTreeMap<Mode, [f64; 3]>> = BTreeMap::new();
    for r in reports {
        for o in &r.results {
            let v = [o.eval.map, o.eval.pres, o.eval.recall];
            let slot = values.entry(o.strategy).or_default();
            match slot.get(&o.mode) {
                Some(old) if old != &v => {
                    return Err(fail(Stage::Compare, format!("conflicting results for {} ({})", o.strategy, o.mode)));
                }
                _ => {
                    slot.insert(o.mode, v);
                }
            }
        }
    }
    let mut strategies: Vec<Strategy> = values.keys().copied().collect();
    strategies.sort_by_key(|s| s.order());
    let mut modes: Vec<Mode> = values.values().flat_map(|m| m.keys().copied()).collect();
    modes.sort();
    modes.dedup();
    Ok(Comparison { cutoff: first.cutoff, modes, strategies, values })
}

impl Comparison {
    fn baselines(&self) -> Vec<Strategy> {
        [Strategy::Cori, Strategy::Ssl].into_iter().filter(|b| self.values.contains_key(b)).collect()
    }

    fn columns(&self) -> Vec<String> {
        let k = self.cutoff;
        let mut cols = vec!["strategy".to_string()];
        for mode in &self.modes {
            cols.extend(METRICS.iter().map(|m| format!("{mode} {m}@{k}")));
        }
        for base in self.baselines() {
            for mode in &self.modes {
                cols.extend(METRICS.iter().map(|m| format!("{mode} {m} vs {base}")));
            }
        }
        cols
    }

    /// Table cells, one row per strategy. Missing values are empty strings.
    pub fn rows(&self) -> Vec<Vec<String>> {
        let cell = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.4}"));
        let pct = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{:+.1}%", v * 100.0));
        self.strategies
            .iter()
            .map(|s| {
                let mine = &self.values[s];
                let mut row = vec![s.to_string()];
                for mode in &self.modes {
                    row.extend((0..3).map(|i| cell(mine.get(mode).map(|v| v[i]))));
                }
                for base in self.baselines() {
                    for mode in &self.modes {
                        for i in 0..3 {
                            let d = mine.get(mode).zip(self.values[&base].get(mode)).and_then(|(x, b)| relative_delta(x[i], b[i]));
                            row.push(pct(d));
                        }
                    }
                }
                row
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns().join(",") + "\n";
        for row in self.rows() {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.columns();
        let mut s = format!("| {} |\n", cols.join(" | "));
        s.push_str(&format!("|{}\n", "---|".repeat(cols.len())));
        for row in self.rows() {
            s.push_str(&format!("| {} |\n", row.join(" | ")));
        }
        s
    }

    /// Relative delta of one cell against a baseline strategy.
    pub fn delta(&self, strategy: Strategy, baseline: Strategy, mode: Mode, metric_index: usize) -> Option<f64> {
        let x = self.values.get(&strategy)?.get(&mode)?[metric_index];
        let b = self.values.get(&baseline)?.get(&mode)?[metric_index];
        relative_delta(x, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: &[(Strategy, Mode, f64)]) -> RunReport {
        RunReport {
            format: REPORT_FORMAT,
            config: vec![],
            seed: 1,
            cutoff: 100,
            corpus_sha256: "c".into(),
            topics_sha256: "t".into(),
            qrels_sha256: "q".into(),
            n_documents: 0,
            n_collections: 0,
            n_topics: 0,
            rejected_records: 0,
            empty_queries: BTreeMap::new(),
            metric_note: PRES_NOTE.into(),
            results: rows
                .iter()
                .map(|&(strategy, mode, v)| StrategyOutcome {
                    strategy,
                    mode,
                    eval: EvalResult { map: v, pres: v, recall: v, ..Default::default() },
                    fallback_sources: 0,
                    fallback_queries: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn two_reports_two_rows_six_metric_columns() {
        let a = report(&[(Strategy::Cori, Mode::Cooperative, 0.2), (Strategy::Cori, Mode::Uncooperative, 0.1)]);
        let b = report(&[(Strategy::Ssl, Mode::Cooperative, 0.3), (Strategy::Ssl, Mode::Uncooperative, 0.15)]);
        let c = compare(&[a, b]).unwrap();
        let rows = c.rows();
        assert_eq!(rows.len(), 2);
        // name + 6 metrics + 6 deltas per baseline
        assert_eq!(rows[0].len(), 1 + 6 + 12);
        assert!((c.delta(Strategy::Ssl, Strategy::Cori, Mode::Cooperative, 0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(rows[1][7], "+50.0%");
    }

    #[test]
    fn identical_scores_give_zero_deltas() {
        let a = report(&[(Strategy::Cori, Mode::Cooperative, 0.4), (Strategy::Ssl, Mode::Cooperative, 0.4)]);
        let c = compare(&[a.clone(), a]).unwrap();
        for s in [Strategy::Cori, Strategy::Ssl] {
            for b in [Strategy::Cori, Strategy::Ssl] {
                assert_eq!(c.delta(s, b, Mode::Cooperative, 1), Some(0.0));
            }
        }
    }

    #[test]
    fn mismatches_rejected() {
        let a = report(&[(Strategy::Cori, Mode::Cooperative, 0.4)]);
        let mut b = a.clone();
        b.qrels_sha256 = "other".into();
        assert!(compare(&[a.clone(), b]).unwrap_err().to_string().contains("qrels"));
        let mut c = a.clone();
        c.cutoff = 10;
        assert!(compare(&[a.clone(), c]).is_err());
        let d = report(&[(Strategy::Cori, Mode::Cooperative, 0.5)]);
        assert!(compare(&[a, d]).unwrap_err().to_string().contains("conflicting"));
    }

    #[test]
    fn zero_baseline_has_no_delta() {
        assert_eq!(relative_delta(0.3, 0.0), None);
        assert_eq!(relative_delta(0.3, 0.2).map(|d| (d * 1e12).round() / 1e12), Some(0.5));
    }
}
