use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fuzzy_dsr::data::{generate_synthetic, load_paysim_csv, planted_rule, prepare, write_paysim_csv, FuzzyDataset};
use fuzzy_dsr::eval::{report, write_pareto_csv, Metrics};
use fuzzy_dsr::trainer::{train, write_training_log, RunMetadata, SearchMode, TrainConfig, TrainResult};

use crate::config::{RunConfig, SynthSpec};

pub fn prepared_dir(out: &Path) -> PathBuf {
    out.join("prepared")
}

pub fn results_dir(out: &Path) -> PathBuf {
    out.join("results")
}

pub fn report_dir(out: &Path) -> PathBuf {
    out.join("report")
}

/// Writes through a temporary file in the same directory, then renames,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing into {}", dir.display()))?;
    let mut w = BufWriter::new(tmp);
    body(&mut w)?;
    let tmp = w.into_inner().map_err(|e| e.into_error())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn synthetic_rows(spec: &SynthSpec) -> Result<Vec<fuzzy_dsr::data::RawTransaction>> {
    let rule = spec.planted.then(planted_rule);
    let data = generate_synthetic(spec.rows, spec.fraud_rate, spec.seed, rule.as_ref())?;
    log::info!("generated {} synthetic rows, fraud rate {:.4}", data.rows.len(), data.fraud_rate);
    Ok(data.rows)
}

fn describe(name: &str, ds: &FuzzyDataset) -> String {
    let rate = ds.n_positive() as f64 / ds.n_rows().max(1) as f64;
    format!("{name}: {} rows, {} fraud, fraud rate {rate:.4}", ds.n_rows(), ds.n_positive())
}

pub fn cmd_prepare(cfg: &RunConfig) -> Result<()> {
    let rows = match (&cfg.data.csv, &cfg.data.synthetic) {
        (Some(path), None) => load_paysim_csv(path)?,
        (None, Some(spec)) => synthetic_rows(spec)?,
        _ => unreachable!("validated"),
    };
    let prepared = prepare(&rows, &cfg.prepare)?;
    let dir = prepared_dir(&cfg.out);
    write_atomic(&dir.join("train.csv"), |w| Ok(prepared.train.write_csv(w)?))?;
    write_atomic(&dir.join("test.csv"), |w| Ok(prepared.test.write_csv(w)?))?;
    write_atomic(&dir.join("fuzzifier.json"), |w| Ok(writeln!(w, "{}", prepared.fuzzifier.to_json())?))?;
    println!("{}", describe("train", &prepared.train));
    println!("{}", describe("test", &prepared.test));
    println!("wrote {}", dir.display());
    Ok(())
}

fn read_split(out: &Path, name: &str) -> Result<FuzzyDataset> {
    let path = prepared_dir(out).join(name);
    let file =
        File::open(&path).with_context(|| format!("opening {} (run `fuzzy-dsr prepare` first)", path.display()))?;
    FuzzyDataset::read_csv(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn mode_name(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::Unconstrained => "unconstrained",
        SearchMode::Constrained => "constrained",
    }
}

/// Directory of one run: `results/<method>-<reward>-<mode>/seed-<n>`.
pub fn run_dir(results: &Path, cfg: &TrainConfig) -> PathBuf {
    let group = format!("{}-{}-{}", cfg.method, cfg.reward, mode_name(cfg.mode)).to_ascii_lowercase();
    results.join(group).join(format!("seed-{}", cfg.seed))
}

pub fn cmd_train(cfg: &RunConfig) -> Result<()> {
    let data = read_split(&cfg.out, "train.csv")?;
    let results = results_dir(&cfg.out);
    for run in cfg.runs() {
        log::info!("training {} {} {} seed {}", run.method, run.reward, mode_name(run.mode), run.seed);
        let mut result = train(&run, &data).with_context(|| format!("{} seed {}", run.method, run.seed))?;
        result.metadata = Some(RunMetadata::now());
        let dir = run_dir(&results, &run);
        write_atomic(&dir.join("training_log.csv"), |w| Ok(write_training_log(&result, w)?))?;
        write_atomic(&dir.join("result.json"), |w| Ok(writeln!(w, "{}", result.to_json())?))?;
        log::info!("best {:.4}: {}", result.best.reward, result.best.expression);
    }
    let all = load_results(&results)?;
    let table = summary_table(&all);
    write_atomic(&results.join("summary.txt"), |w| Ok(w.write_all(table.as_bytes())?))?;
    print!("{table}");
    Ok(())
}

/// Every `result.json` under `dir`, sorted by path.
pub fn load_results(dir: &Path) -> Result<Vec<TrainResult>> {
    let mut paths = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).with_context(|| format!("reading {}", d.display()))?;
        for entry in entries {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == "result.json") {
                paths.push(path);
            }
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            TrainResult::from_json(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

/// Per-run bests on the training split, with a mean row per group.
pub fn summary_table(results: &[TrainResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<6} {:<13} {:>6} {:>7} {:>6} {:>6} {:>6} {:>4}  expression",
        "method", "reward", "mode", "seed", "reward", "prec", "recall", "f1", "cx"
    );
    let mut groups: Vec<(String, Vec<&TrainResult>)> = Vec::new();
    for r in results {
        let c = &r.config;
        let key = format!("{:<12} {:<6} {:<13}", c.method.to_string(), c.reward.to_string(), mode_name(c.mode));
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    for (key, runs) in &groups {
        for r in runs {
            let m = &r.best.metrics;
            let _ = writeln!(
                out,
                "{key} {:>6} {:>7.4} {:>6.3} {:>6.3} {:>6.3} {:>4}  {}",
                r.seed, r.best.reward, m.precision, m.recall, m.f1, r.best.complexity, r.best.expression
            );
        }
        let all: Vec<Metrics> = runs.iter().map(|r| r.best.metrics).collect();
        let mean = Metrics::mean(&all).expect("groups are non-empty");
        let reward = runs.iter().map(|r| r.best.reward).sum::<f64>() / runs.len() as f64;
        let cx = runs.iter().map(|r| f64::from(r.best.complexity)).sum::<f64>() / runs.len() as f64;
        let _ = writeln!(
            out,
            "{key} {:>6} {reward:>7.4} {:>6.3} {:>6.3} {:>6.3} {cx:>4.1}  ({} seeds)",
            "mean",
            mean.precision,
            mean.recall,
            mean.f1,
            runs.len()
        );
    }
    out
}

pub fn cmd_evaluate(cfg: &RunConfig, results: Option<&Path>) -> Result<()> {
    let dir = results.map_or_else(|| results_dir(&cfg.out), Path::to_path_buf);
    if !dir.is_dir() {
        bail!("results directory {} does not exist", dir.display());
    }
    let all = load_results(&dir)?;
    if all.is_empty() {
        bail!("no result.json files under {}", dir.display());
    }
    let test = read_split(&cfg.out, "test.csv")?;
    let rep = report(&all, &test, cfg.train.threshold)?;
    let out = report_dir(&cfg.out);
    write_atomic(&out.join("report.json"), |w| Ok(writeln!(w, "{}", rep.to_json())?))?;
    let text = rep.to_text();
    write_atomic(&out.join("report.txt"), |w| Ok(w.write_all(text.as_bytes())?))?;
    write_atomic(&out.join("pareto.csv"), |w| Ok(write_pareto_csv(&rep.pareto_front, w)?))?;
    print!("{text}");
    println!("pareto front: {} expressions; wrote {}", rep.pareto_front.len(), out.display());
    Ok(())
}

pub fn cmd_synth(spec: &SynthSpec, out: &Path) -> Result<()> {
    let rows = synthetic_rows(spec)?;
    write_atomic(out, |w| Ok(write_paysim_csv(&rows, w)?))?;
    let frauds = rows.iter().filter(|r| r.is_fraud).count();
    println!("wrote {} rows ({frauds} fraud) to {}", rows.len(), out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b.txt");
        write_atomic(&path, |w| Ok(w.write_all(b"first")?)).unwrap();
        write_atomic(&path, |w| Ok(w.write_all(b"second")?)).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        let failed = write_atomic(&path, |w| {
            w.write_all(b"partial")?;
            bail!("interrupted")
        });
        assert!(failed.is_err());
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn run_dirs_are_seed_scoped() {
        let cfg = TrainConfig { seed: 3, mode: SearchMode::Constrained, ..Default::default() };
        assert_eq!(run_dir(Path::new("r"), &cfg), Path::new("r/lukasiewicz-f1-constrained/seed-3"));
    }
}
