//! Merges the results of many runs into summary tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sparsedisc::discretization::wilson_interval;

use crate::error::CliError;
use crate::runner::{RunManifest, MANIFEST};

const RESULT: &str = "result.json";

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub dir: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct Summary {
    pub runs: Vec<RunRow>,
    pub skipped: Vec<Skipped>,
    /// `(dictionary, v, C1, C2) → m → (trials, successes, runs)`.
    pub sweeps: BTreeMap<(String, u64, String, String), BTreeMap<u64, (u64, u64, u64)>>,
    /// `(command, dictionary, v, run, metric, value)`.
    pub recovery: Vec<(String, String, u64, String, String, f64)>,
    /// `(dictionary, run) → [(k, ε̂_k)]`.
    pub entropy: BTreeMap<(String, String), Vec<(u64, f64)>>,
}

#[derive(Debug, Clone)]
pub struct RunRow {
    pub run: String,
    pub command: String,
    pub dictionary: String,
    pub seed: u64,
    pub config_sha256: String,
}

fn collect_dirs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    if entries.iter().any(|p| p.file_name().is_some_and(|n| n == MANIFEST || n == RESULT)) {
        out.push(dir.to_path_buf());
    }
    for p in entries {
        if p.is_dir() {
            collect_dirs(&p, out)?;
        }
    }
    Ok(())
}

fn load(dir: &Path) -> Result<(RunManifest, Value), String> {
    let text = fs::read_to_string(dir.join(MANIFEST)).map_err(|e| format!("missing manifest: {e}"))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| format!("corrupt manifest: {e}"))?;
    let text = fs::read_to_string(dir.join(RESULT)).map_err(|e| format!("missing result: {e}"))?;
    let result: Value = serde_json::from_str(&text).map_err(|e| format!("corrupt result: {e}"))?;
    Ok((manifest, result))
}

pub fn summarize(root: &Path) -> Result<Summary, CliError> {
    let mut dirs = Vec::new();
    collect_dirs(root, &mut dirs)?;
    let mut s = Summary::default();
    for dir in dirs {
        let run = dir
            .strip_prefix(root)
            .ok()
            .map(|p| p.display().to_string())
            .filter(|p| !p.is_empty())
            .unwrap_or_else(|| ".".into());
        let (manifest, result) = match load(&dir) {
            Ok(x) => x,
            Err(reason) => {
                s.skipped.push(Skipped { dir: run, reason });
                continue;
            }
        };
        let dictionary = result["dictionary"].as_str().unwrap_or("-").to_string();
        let v = result["v"].as_u64().unwrap_or(0);
        match manifest.command.as_str() {
            "sweep-m" => {
                let key = (
                    dictionary.clone(),
                    v,
                    result["C1"].to_string(),
                    result["C2"].to_string(),
                );
                let table = s.sweeps.entry(key).or_default();
                for e in result["sweep"].as_array().into_iter().flatten() {
                    let (Some(m), Some(t), Some(k)) =
                        (e["m"].as_u64(), e["trials"].as_u64(), e["successes"].as_u64())
                    else {
                        continue;
                    };
                    let cell = table.entry(m).or_default();
                    cell.0 += t;
                    cell.1 += k;
                    cell.2 += 1;
                }
            }
            "recover" | "lebesgue" | "ls-universal" => {
                if let Some(map) = result["summary"].as_object() {
                    for (metric, value) in map {
                        if let Some(x) = value.as_f64() {
                            s.recovery.push((
                                manifest.command.clone(),
                                dictionary.clone(),
                                v,
                                run.clone(),
                                metric.clone(),
                                x,
                            ));
                        }
                    }
                }
            }
            "entropy" => {
                let pts = result["estimate"]["entropy"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter_map(|p| Some((p[0].as_u64()?, p[1].as_f64()?)))
                    .collect();
                s.entropy.insert((dictionary.clone(), run.clone()), pts);
            }
            _ => {}
        }
        s.runs.push(RunRow {
            run,
            command: manifest.command,
            dictionary,
            seed: manifest.seed,
            config_sha256: manifest.config_sha256,
        });
    }
    s.recovery.sort_by(|a, b| {
        (&a.0, &a.1, a.2, &a.3, &a.4).cmp(&(&b.0, &b.1, b.2, &b.3, &b.4))
    });
    Ok(s)
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn md_table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out.push('\n');
}

impl Summary {
    fn run_rows(&self) -> Vec<Vec<String>> {
        self.runs
            .iter()
            .map(|r| {
                vec![
                    r.run.clone(),
                    r.command.clone(),
                    r.dictionary.clone(),
                    r.seed.to_string(),
                    r.config_sha256.clone(),
                ]
            })
            .collect()
    }

    fn sweep_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for ((dict, v, c1, c2), table) in &self.sweeps {
            for (m, &(trials, successes, runs)) in table {
                let (lo, hi) = wilson_interval(successes as usize, trials as usize);
                rows.push(vec![
                    dict.clone(),
                    v.to_string(),
                    c1.clone(),
                    c2.clone(),
                    m.to_string(),
                    trials.to_string(),
                    successes.to_string(),
                    format!("{:.4}", successes as f64 / trials.max(1) as f64),
                    format!("{lo:.4}"),
                    format!("{hi:.4}"),
                    runs.to_string(),
                ]);
            }
        }
        rows
    }

    fn recovery_rows(&self) -> Vec<Vec<String>> {
        self.recovery
            .iter()
            .map(|(c, d, v, run, metric, x)| {
                vec![c.clone(), d.clone(), v.to_string(), run.clone(), metric.clone(), format!("{x}")]
            })
            .collect()
    }

    fn entropy_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for ((dict, run), pts) in &self.entropy {
            for (k, e) in pts {
                rows.push(vec![dict.clone(), run.clone(), k.to_string(), format!("{e}")]);
            }
        }
        rows
    }

    /// File name and contents of every summary artifact.
    pub fn render(&self) -> Vec<(&'static str, Vec<u8>)> {
        const RUNS: [&str; 5] = ["run", "command", "dictionary", "seed", "config_sha256"];
        const SWEEPS: [&str; 11] =
            ["dictionary", "v", "C1", "C2", "m", "trials", "successes", "estimate", "low", "high", "runs"];
        const RECOVERY: [&str; 6] = ["command", "dictionary", "v", "run", "metric", "value"];
        const ENTROPY: [&str; 4] = ["dictionary", "run", "k", "eps"];
        let (runs, sweeps, recovery, entropy) =
            (self.run_rows(), self.sweep_rows(), self.recovery_rows(), self.entropy_rows());
        let mut md = String::from("# Summary\n\n");
        let _ = writeln!(md, "{} runs, {} skipped.\n", self.runs.len(), self.skipped.len());
        if !runs.is_empty() {
            md.push_str("## Runs\n\n");
            md_table(&mut md, &RUNS, &runs);
        }
        if !sweeps.is_empty() {
            md.push_str("## Success probability by m\n\n");
            md_table(&mut md, &SWEEPS, &sweeps);
        }
        if !recovery.is_empty() {
            md.push_str("## Recovery error by v\n\n");
            md_table(&mut md, &RECOVERY, &recovery);
        }
        if !entropy.is_empty() {
            md.push_str("## Entropy estimates by k\n\n");
            md_table(&mut md, &ENTROPY, &entropy);
        }
        if !self.skipped.is_empty() {
            md.push_str("## Skipped\n\n");
            let rows: Vec<Vec<String>> =
                self.skipped.iter().map(|s| vec![s.dir.clone(), s.reason.replace('|', "/")]).collect();
            md_table(&mut md, &["dir", "reason"], &rows);
        }
        vec![
            ("summary.csv", csv_bytes(&RUNS, runs)),
            ("summary_sweeps.csv", csv_bytes(&SWEEPS, sweeps)),
            ("summary_recovery.csv", csv_bytes(&RECOVERY, recovery)),
            ("summary_entropy.csv", csv_bytes(&ENTROPY, entropy)),
            ("summary.md", md.into_bytes()),
        ]
    }
}

/// Summarizes `root` and writes the tables to `out`.
pub fn report(root: &Path, out: &Path) -> Result<Summary, CliError> {
    if !root.is_dir() {
        return Err(CliError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    let summary = summarize(root)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (name, bytes) in summary.render() {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(summary)
}
