//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p fedmerge --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fedmerge::config::{ExperimentConfig, Mode, Strategy};
use fedmerge::formats::format_run;
use fedmerge::pipeline::{prepare_query, run_experiment, write_outputs, Federation, Inputs};
use fedmerge_core::engine::RankedList;
use fedmerge_core::eval::{average_precision, pres_at, recall_at};
use fedmerge_core::merging::{
    assign_artificial_scores, cori_merge_score, gm_features, gm_training_set, ssl_merge, MergeParams,
};
use fedmerge_core::mlmodels::{
    fit_forest, fit_linear, fit_tree, ForestParams, ModelKind, ModelParams, Network, Node, TrainingSet, TreeParams,
    DEFAULT_RIDGE,
};
use fedmerge_core::selection::{cori_belief, SourceScore, CORI_B};
use fedmerge_core::synth::{generate, SynthConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const METRIC_TOL: f64 = 1e-12;
const METRIC_BUDGET: Duration = Duration::from_secs(5);
const SSL_BUDGET: Duration = Duration::from_secs(30);
const ARTIFICIAL_TOL: f64 = 1e-12;
const CORI_BELIEF_EXPECTED: f64 = 0.5084;
const CORI_BELIEF_TOL: f64 = 1e-4;
const LEAF_TOL: f64 = 1e-12;
const PLANTED_TOL: f64 = 1e-5;
const GRADIENT_TOL: f64 = 1e-4;
const DIRECTIONAL_SEEDS: u64 = 5;
const DIRECTIONAL_MIN_PASSING: usize = 4;
const DIRECTIONAL_BUDGET: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ranked(ids: &[String]) -> RankedList {
    let n = ids.len();
    RankedList::from_scored("q", "S", ids.iter().enumerate().map(|(i, d)| (d.clone(), (n - i) as f64)).collect())
}

// Reference metrics computed from first principles, without the cutoff loop.

fn brute_ap(run: &[String], rel: &BTreeSet<String>, k: usize) -> f64 {
    let top = &run[..run.len().min(k)];
    let mut sum = 0.0;
    for (i, d) in top.iter().enumerate() {
        if rel.contains(d) {
            let prefix = &top[..=i];
            let hits = prefix.iter().filter(|x| rel.contains(*x)).count();
            sum += hits as f64 / prefix.len() as f64;
        }
    }
    sum / rel.len() as f64
}

fn brute_recall(run: &[String], rel: &BTreeSet<String>, k: usize) -> f64 {
    let top: BTreeSet<&String> = run.iter().take(k).collect();
    rel.iter().filter(|d| top.contains(d)).count() as f64 / rel.len() as f64
}

/// PRES as an exact fraction: `1 - (2*sum - n(n+1)) / (2 n N)`.
fn symbolic_pres(run: &[String], rel: &BTreeSet<String>, n_max: usize) -> f64 {
    let n = rel.len() as i64;
    let mut ranks: Vec<i64> =
        run.iter().take(n_max).enumerate().filter(|(_, d)| rel.contains(*d)).map(|(i, _)| i as i64 + 1).collect();
    let missing = n - ranks.len() as i64;
    ranks.extend((1..=missing).map(|j| n_max as i64 + j));
    let sum: i64 = ranks.iter().sum();
    let num = 2 * sum - n * (n + 1);
    let den = 2 * n * n_max as i64;
    (1.0 - num as f64 / den as f64).clamp(0.0, 1.0)
}

fn metric_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let pool: Vec<String> = (0..14).map(|i| format!("d{i}")).collect();
        let n_docs = rng.random_range(0..=10);
        let mut shuffled = pool.clone();
        shuffled.shuffle(&mut rng);
        let run: Vec<String> = shuffled[..n_docs].to_vec();
        let n_rel = rng.random_range(1..=4);
        shuffled.shuffle(&mut rng);
        let rel: BTreeSet<String> = shuffled[..n_rel].iter().cloned().collect();
        let k = rng.random_range(1..=10);
        let list = ranked(&run);
        let pairs = [
            (average_precision(&list, &rel, k), brute_ap(&run, &rel, k), "AP"),
            (recall_at(&list, &rel, k), brute_recall(&run, &rel, k), "recall"),
            (pres_at(&list, &rel, k), symbolic_pres(&run, &rel, k), "PRES"),
        ];
        for (got, want, name) in pairs {
            worst = worst.max((got - want).abs());
            ensure((got - want).abs() <= METRIC_TOL, || format!("case {case}: {name} {got} vs {want}"))?;
        }
    }
    let rel: BTreeSet<String> = ["r1", "r2"].iter().map(|s| s.to_string()).collect();
    let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let hand = [
        (ids(&["r1", "r2", "x"]), 1.0),
        (ids(&["x", "y"]), 0.0),
        (ids(&["r1", "x", "y"]), 0.505),
    ];
    for (run, want) in hand {
        let got = pres_at(&ranked(&run), &rel, 100);
        ensure((got - want).abs() <= METRIC_TOL, || format!("PRES {run:?}: {got} vs {want}"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < METRIC_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("200 instances + 3 PRES cases, max |diff| {worst:.1e}, {elapsed:.2?}"))
}

fn kendall_tau(order: &[f64]) -> f64 {
    // `order` lists the reference scores in merged rank order.
    let (mut conc, mut disc) = (0i64, 0i64);
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                conc += 1;
            } else if order[i] < order[j] {
                disc += 1;
            }
        }
    }
    let pairs = conc + disc;
    if pairs == 0 {
        1.0
    } else {
        (conc - disc) as f64 / pairs as f64
    }
}

fn ssl_recovery() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut returned = 0;
    for q in 0..50 {
        let query_id = format!("q{q}");
        let n_sources = rng.random_range(2..=6);
        let sizes: Vec<usize> = (0..n_sources).map(|_| rng.random_range(5..=15)).collect();
        let total: usize = sizes.iter().sum();
        // Well separated centralized scores, shuffled across sources.
        let mut truth: Vec<f64> = (0..total).map(|i| 1.0 + i as f64 * 0.5 + rng.random_range(0.0..0.1)).collect();
        truth.shuffle(&mut rng);
        let mut truth_by_doc = BTreeMap::new();
        let mut lists = Vec::new();
        let mut central = Vec::new();
        let mut sources = Vec::new();
        let mut at = 0;
        for (s, &size) in sizes.iter().enumerate() {
            let source = format!("S{s}");
            let (a, b) = (rng.random_range(0.1..10.0), rng.random_range(-5.0..5.0));
            let mut docs = Vec::new();
            for i in 0..size {
                let doc = format!("{source}-d{i}");
                let c = truth[at + i];
                truth_by_doc.insert(doc.clone(), c);
                docs.push((doc.clone(), a * c + b));
                if i < 3 || rng.random_bool(0.3) {
                    central.push((doc, c));
                }
            }
            at += size;
            lists.push(RankedList::from_scored(&query_id, &source, docs));
            sources.push(SourceScore { source_id: source, score: rng.random_range(0.0..1.0), rank: s + 1 });
        }
        let central = RankedList::from_scored(&query_id, "CENTRAL", central);
        let run = ssl_merge(&lists, &central, &sources, &MergeParams::default(), &ModelParams::default())
            .map_err(|e| format!("query {q}: {e}"))?;
        ensure(run.entries.len() == total, || format!("query {q}: {} of {total} documents returned", run.entries.len()))?;
        ensure(run.fallback_sources.is_empty(), || format!("query {q}: unexpected fallback"))?;
        let order: Vec<f64> = run.entries.iter().map(|e| truth_by_doc[&e.doc_id]).collect();
        let tau = kendall_tau(&order);
        ensure(tau == 1.0, || format!("query {q}: tau {tau}"))?;
        returned += total;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < SSL_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("50 queries, {returned} documents, tau = 1.0 throughout, {elapsed:.2?}"))
}

fn synth_inputs(seed: u64) -> Inputs {
    Inputs::from_synth(generate(&SynthConfig::default(), seed)).expect("synthetic corpus loads")
}

fn base_config(pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v).unwrap_or_else(|e| panic!("{k}={v}: {e}"));
    }
    cfg
}

fn mm_linear_is_ssl() -> Outcome {
    let inputs = synth_inputs(7);
    let cfg = base_config(&[
        ("strategy", "ssl,mm-linear"),
        ("mode", "both"),
        ("max_topics", "20"),
        ("distortion", "random"),
        ("seed", "7"),
    ]);
    let exp = run_experiment(&cfg, &inputs).map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for mode in Mode::ALL {
        let text = |s: Strategy| {
            let lists: Vec<RankedList> = exp.runs[&(mode, s)].values().map(|r| r.to_ranked_list()).collect();
            format_run(&lists, "run")
        };
        let (ssl, mm) = (text(Strategy::Ssl), text(Strategy::Mm(ModelKind::Linear)));
        ensure(exp.runs[&(mode, Strategy::Ssl)].len() == 20, || format!("{mode}: expected 20 queries"))?;
        ensure(!ssl.is_empty(), || format!("{mode}: empty run"))?;
        ensure(ssl == mm, || format!("{mode}: run files differ"))?;
        bytes += ssl.len();
    }
    Ok(format!("20 queries x 2 modes, {bytes} identical bytes"))
}

fn artificial_scores() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut scores: Vec<f64> = (0..23).map(|_| rng.random_range(0.0..=1.0)).collect();
    scores.extend([0.0, 1.0]);
    let mut checked = 0;
    for m in 1..=200usize {
        let list = RankedList::from_scored("q", "S", (0..m).map(|i| (format!("d{i}"), 1000.0 - i as f64)).collect());
        for &s in &scores {
            let out = assign_artificial_scores(&list, s).map_err(|e| e.to_string())?;
            let v: Vec<f64> = out.entries.iter().map(|e| e.score).collect();
            ensure((v[0] - 0.6 * s).abs() <= ARTIFICIAL_TOL, || format!("m={m} s={s}: first {}", v[0]))?;
            if m > 1 {
                ensure((v[m - 1] - 0.4 * s).abs() <= ARTIFICIAL_TOL, || format!("m={m} s={s}: last {}", v[m - 1]))?;
                let step = v[1] - v[0];
                for w in v.windows(2) {
                    ensure(((w[1] - w[0]) - step).abs() <= ARTIFICIAL_TOL, || format!("m={m} s={s}: uneven step"))?;
                }
            }
            ensure(out.entries.iter().map(|e| &e.doc_id).eq(list.entries.iter().map(|e| &e.doc_id)), || {
                format!("m={m}: order changed")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} lists; a single document scores 0.6 x source score"))
}

fn cori_spot_checks() -> Outcome {
    let cw = 12_345u64;
    let p = cori_belief(50, cw, cw as f64, 1, 3, CORI_B);
    ensure((p - CORI_BELIEF_EXPECTED).abs() <= CORI_BELIEF_TOL, || format!("belief {p}"))?;
    let merged = cori_merge_score(0.5, 1.0);
    ensure(merged == 0.5, || format!("merge score {merged}"))?;
    Ok(format!("belief {p:.6}, merge score {merged}"))
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> TrainingSet {
    let features: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let targets = features.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>() + rng.random_range(-0.3..0.3)).collect();
    TrainingSet::new(features, targets).expect("valid training set")
}

fn gradient_check(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..20 {
        let dim = 1 + trial % 3;
        let mut net = Network::new(dim, &[4, 3], rng);
        for p in &mut net.params {
            *p += rng.random_range(-0.1..0.1);
        }
        let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rows: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let (_, grad) = net.loss_and_gradient(&rows, &ys);
        let h = 1e-6;
        for (i, &g) in grad.iter().enumerate() {
            let mut plus = net.clone();
            plus.params[i] += h;
            let mut minus = net.clone();
            minus.params[i] -= h;
            let numeric = (plus.loss_and_gradient(&rows, &ys).0 - minus.loss_and_gradient(&rows, &ys).0) / (2.0 * h);
            let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(1e-6);
            ensure(rel < GRADIENT_TOL, || format!("network {trial}, parameter {i}: {g} vs {numeric}"))?;
        }
    }
    Ok(())
}

fn regressors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let tree_params = TreeParams::default();
    let single = ForestParams { n_trees: 1, bootstrap: false, feature_frac: Some(1.0) };
    let mut leaves = 0;
    for case in 0..20 {
        let dim = 1 + case % 3;
        let ts = random_set(&mut rng, 40, dim);
        let seed = rng.random();
        let tree = fit_tree(&ts, tree_params, seed).map_err(|e| e.to_string())?;
        let forest = fit_forest(&ts, tree_params, single, seed).map_err(|e| e.to_string())?;
        let probe = random_set(&mut rng, 50, dim);
        for x in ts.features.iter().chain(&probe.features) {
            ensure(tree.predict(x).to_bits() == forest.predict(x).to_bits(), || format!("case {case}: forest != tree"))?;
        }
        let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (x, y) in ts.features.iter().zip(&ts.targets) {
            groups.entry(tree.leaf_of(x)).or_default().push(*y);
        }
        for (leaf, ys) in groups {
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            let Node::Leaf { value, .. } = tree.nodes[leaf] else { return Err("leaf_of returned a split".into()) };
            ensure((value - mean).abs() <= LEAF_TOL * mean.abs().max(1.0), || format!("case {case}: leaf {value} vs {mean}"))?;
            leaves += 1;
        }
    }
    let mut worst = 0.0f64;
    for case in 0..20 {
        let dim = 1 + case % 4;
        let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
        let b = rng.random_range(-5.0..5.0);
        let features: Vec<Vec<f64>> = (0..30).map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let targets = features.iter().map(|x| b + x.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>()).collect();
        let ts = TrainingSet::new(features, targets).map_err(|e| e.to_string())?;
        let (model, _) = fit_linear(&ts, DEFAULT_RIDGE).map_err(|e| e.to_string())?;
        let err = model.weights.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold((model.intercept - b).abs(), f64::max);
        worst = worst.max(err);
        ensure(err <= PLANTED_TOL, || format!("case {case}: planted parameters off by {err}"))?;
    }
    gradient_check(&mut rng)?;
    Ok(format!("20 forest/tree pairs, {leaves} leaves, planted error {worst:.1e}, 20 networks"))
}

fn directional() -> Outcome {
    let started = Instant::now();
    let synth = SynthConfig { subtopic_share: (0.01, 0.05), ..SynthConfig::default() };
    let strategies = ["cori", "ssl", "mm-poly2", "mm-poly3", "mm-forest"];
    let mut passing = 0;
    let mut lines = Vec::new();
    for seed in 1..=DIRECTIONAL_SEEDS {
        let corpus = generate(&synth, seed);
        let inputs = Inputs::from_synth(corpus).map_err(|e| e.to_string())?;
        ensure(inputs.corpus.num_collections() >= 20, || "too few collections".into())?;
        ensure(inputs.corpus.num_documents() >= 2000, || "too few documents".into())?;
        ensure(inputs.topics.len() >= 50, || "too few topics".into())?;
        let seed_text = seed.to_string();
        let cfg = base_config(&[
            ("strategy", &strategies.join(",")),
            ("mode", "cooperative"),
            ("distortion", "random"),
            ("k", "30"),
            ("sample_size", "20"),
            ("cutoff", "100"),
            ("seed", &seed_text),
        ]);
        let exp = run_experiment(&cfg, &inputs).map_err(|e| e.to_string())?;
        let get = |s: &str| {
            let o = exp.report.outcome(Mode::Cooperative, s.parse().unwrap()).expect("strategy was run");
            (o.eval.map, o.eval.recall)
        };
        let [cori, ssl, poly2, poly3, forest] = strategies.map(get);
        let ge = |a: (f64, f64), b: (f64, f64)| a.0 >= b.0 && a.1 >= b.1;
        let ok = ge(forest, cori) && ge(forest, poly2) && ge(forest, poly3) && ge(ssl, poly2) && ge(ssl, poly3);
        passing += usize::from(ok);
        let cells: Vec<String> = strategies
            .iter()
            .zip([cori, ssl, poly2, poly3, forest])
            .map(|(s, (m, r))| format!("{s} {m:.3}/{r:.3}"))
            .collect();
        lines.push(format!("    seed {seed} {}: {}", if ok { "holds" } else { "broken" }, cells.join(", ")));
    }
    println!("    MAP@100/Recall@100, cooperative, random distortion, k=30, sample 20");
    for l in &lines {
        println!("{l}");
    }
    let elapsed = started.elapsed();
    let summary = format!("ordering held on {passing}/{DIRECTIONAL_SEEDS} seeds, {elapsed:.1?}");
    ensure(elapsed < DIRECTIONAL_BUDGET, || format!("{summary}; over budget"))?;
    ensure(passing >= DIRECTIONAL_MIN_PASSING, || summary.clone())?;
    Ok(summary)
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).expect("readable output dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).expect("readable output file"));
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let inputs = synth_inputs(11);
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "1", "4"] {
        let cfg = base_config(&[
            ("strategy", "all"),
            ("mode", "both"),
            ("max_topics", "12"),
            ("distortion", "random"),
            ("seed", "11"),
            ("threads", threads),
        ]);
        let exp = run_experiment(&cfg, &inputs).map_err(|e| e.to_string())?;
        let dir = tmp.path().join(format!("run{}", outputs.len()));
        write_outputs(&exp, &dir).map_err(|e| e.to_string())?;
        outputs.push(files_under(&dir));
    }
    let first = &outputs[0];
    ensure(first.keys().any(|p| p.ends_with("report.json")), || "no report written".into())?;
    for (i, other) in outputs.iter().enumerate().skip(1) {
        ensure(first.keys().eq(other.keys()), || format!("run {i}: different file set"))?;
        for (path, bytes) in first {
            ensure(&other[path] == bytes, || format!("run {i}: {} differs", path.display()))?;
        }
    }
    Ok(format!("{} files identical across 3 runs (1, 1 and 4 threads)", first.len()))
}

fn gm_feature_audit() -> Outcome {
    let inputs = synth_inputs(13);
    let cfg = base_config(&[("distortion", "random"), ("seed", "13")]);
    let (fed, _) = Federation::build(&cfg, &inputs).map_err(|e| e.to_string())?;
    let mut audited = 0;
    for mode in Mode::ALL {
        for topic in inputs.topics.iter().take(10) {
            let trace = prepare_query(&fed, &cfg, topic, mode).map_err(|e| e.to_string())?;
            let layout: Vec<String> = trace.selected.iter().map(|s| s.source_id.clone()).collect();
            let features = gm_features(&trace.lists, &layout);
            let (overlap, ts) = gm_training_set(&features, &trace.central, &layout);
            let central: BTreeSet<&str> = trace.central.doc_ids().collect();
            let expected: Vec<&String> = features.keys().filter(|d| central.contains(d.as_str())).collect();
            ensure(overlap.iter().eq(expected.iter().copied()), || format!("{}: overlap set mismatch", trace.query_id))?;
            for (doc, x) in overlap.iter().zip(&ts.features) {
                let returned_by: BTreeSet<usize> = trace
                    .lists
                    .iter()
                    .filter(|l| l.doc_ids().any(|d| d == doc))
                    .map(|l| layout.iter().position(|s| *s == l.source_id).expect("listed source was selected"))
                    .collect();
                let nonzero: BTreeSet<usize> = x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect();
                ensure(x.len() == layout.len(), || format!("{doc}: vector length {}", x.len()))?;
                ensure(nonzero == returned_by, || {
                    format!("{} {mode} {doc}: nonzero {nonzero:?}, returned by {returned_by:?}", trace.query_id)
                })?;
                audited += 1;
            }
        }
    }
    ensure(audited > 0, || "no overlap documents to audit".into())?;
    Ok(format!("{audited} overlap documents over 10 queries x 2 modes"))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("metric oracle equivalence", metric_oracle),
        ("SSL exact recovery", ssl_recovery),
        ("MM-linear equals SSL", mm_linear_is_ssl),
        ("artificial score formula", artificial_scores),
        ("CORI spot checks", cori_spot_checks),
        ("regressor correctness", regressors),
        ("directional replication", directional),
        ("end-to-end determinism", determinism),
        ("GM feature audit", gm_feature_audit),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
