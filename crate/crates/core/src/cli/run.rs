//! Running a resolved configuration and writing its output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::{Command, ConfigFile, MeritChoice, RunConfig};
use crate::analytics::{mean_dcc_table, mean_dcc_table_csv};
use crate::error::{Error, Result};
use crate::experiments::output::{histogram_rows, write_csv, write_json, write_jsonl};
use crate::experiments::{
    run_dcc_experiment, run_envelope_scatter, run_postpovm_bound_check, run_propcheck, run_tf_experiment,
    PropRecord, Progress, SummaryRow,
};
use crate::families::{verify_theorem1, verify_theorem2, SweepReport};
use crate::preprocess::ActingSet;
use crate::sampling::derive_sample_seed;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    config: &'a RunConfig,
    config_file: &'a ConfigFile,
    started_at: String,
    wall_time_seconds: f64,
    outputs: Vec<String>,
    error: Option<String>,
}

/// Files written and the human-readable summary for standard output.
struct RunOutput {
    files: Vec<String>,
    summary: String,
}

/// `<out>/<subcommand>-<timestamp>`, with `-1`, `-2`, … appended if taken.
fn create_run_dir(out: &Path, subcommand: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let base = format!("{subcommand}-{stamp}");
    for k in 0usize.. {
        let name = if k == 0 { base.clone() } else { format!("{base}-{k}") };
        let dir = out.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("the suffix search is unbounded")
}

/// Run `cfg`, write all outputs plus `manifest.json`, and print the summary.
/// The manifest is written even when the run fails, with the error recorded.
pub fn execute(cfg: &RunConfig, file: &ConfigFile) -> Result<PathBuf> {
    let dir = create_run_dir(&cfg.out, cfg.subcommand.name())?;
    let started_at = chrono::Utc::now().to_rfc3339();
    let clock = Instant::now();
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", cfg.workers)))
        .and_then(|pool| pool.install(|| dispatch(cfg, &dir)));
    let (outputs, error) = match &result {
        Ok(r) => (r.files.clone(), None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let manifest = Manifest {
        tool: "densecap",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cfg.subcommand.name(),
        config: cfg,
        config_file: file,
        started_at,
        wall_time_seconds: clock.elapsed().as_secs_f64(),
        outputs,
        error,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    let out = result?;
    print!("{}", out.summary);
    Ok(dir)
}

fn progress(cfg: &RunConfig, label: String, total: usize) -> Progress {
    if cfg.quiet {
        Progress::silent()
    } else {
        Progress::new(label, total)
    }
}

fn dispatch(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    match cfg.subcommand {
        Command::Dcc | Command::Tf => run_statistics(cfg, dir),
        Command::Envelope => run_envelope(cfg, dir),
        Command::Theorem1 | Command::Theorem2 => run_theorem(cfg, dir),
        Command::Meandcc => run_meandcc(cfg, dir),
        Command::Propcheck => run_props(cfg, dir),
        Command::PostpovmBound => run_postpovm(cfg, dir),
    }
}

/// Rank `r` draws its states from master seed `derive_sample_seed(seed, r)`.
fn rank_seed(cfg: &RunConfig, rank: usize) -> u64 {
    derive_sample_seed(cfg.seed, rank as u64)
}

fn run_statistics(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let settings = cfg.merit_settings();
    let mut records = Vec::new();
    let mut summary: Vec<SummaryRow> = Vec::new();
    let mut histogram = Vec::new();
    for &rank in &cfg.ranks {
        let label = format!("{} {} rank {rank}", cfg.subcommand.name(), cfg.scenario.label());
        let p = progress(cfg, label, cfg.n_samples);
        let out = if cfg.subcommand == Command::Tf {
            run_tf_experiment(rank, cfg.n_samples, &cfg.acting_sets, &settings, rank_seed(cfg, rank), &p)?
        } else {
            run_dcc_experiment(cfg.scenario, rank, cfg.n_samples, &cfg.acting_sets, &settings, rank_seed(cfg, rank), &p)?
        };
        histogram.extend(histogram_rows(rank, &out.histogram));
        records.extend(out.records);
        summary.extend(out.summary);
    }
    write_jsonl(&dir.join("samples.jsonl"), &records)?;
    write_csv(&dir.join("summary.csv"), &summary)?;
    write_csv(&dir.join("histogram.csv"), &histogram)?;
    Ok(RunOutput {
        files: vec!["samples.jsonl".into(), "summary.csv".into(), "histogram.csv".into()],
        summary: summary_table(&summary, cfg.merit),
    })
}

fn summary_table(rows: &[SummaryRow], merit: MeritChoice) -> String {
    let show = |m: MeritChoice| merit == MeritChoice::All || merit == m;
    let mut s = String::new();
    let _ = write!(s, "{:<5} {:<4} {:>4} {:<9} {:>8} {:>9} {:>8}", "scen", "obj", "rank", "acting", "nonclass", "mean", "sd");
    if show(MeritChoice::O) {
        let _ = write!(s, " {:>9} {:>8}", "mean_O", "mean_pO");
    }
    if show(MeritChoice::A1) {
        let _ = write!(s, " {:>9} {:>8}", "mean_A1", "A1>cl");
    }
    if show(MeritChoice::A2) {
        let _ = write!(s, " {:>9} {:>8}", "mean_A2", "A2>cl");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(
            s,
            "{:<5} {:<4} {:>4} {:<9} {:>7.2}% {:>9.5} {:>8.5}",
            r.scenario,
            r.objective,
            r.rank,
            r.acting_set,
            100.0 * r.fraction_nonclassical,
            r.mean,
            r.sd
        );
        if show(MeritChoice::O) {
            let _ = write!(s, " {:>9.5} {:>8.4}", r.mean_o, r.mean_p_o);
        }
        if show(MeritChoice::A1) {
            let _ = write!(s, " {:>9.5} {:>7.2}%", r.mean_a1, 100.0 * r.fraction_a1_nonclassical);
        }
        if show(MeritChoice::A2) {
            let _ = write!(s, " {:>9.5} {:>7.2}%", r.mean_a2, 100.0 * r.fraction_a2_nonclassical);
        }
        s.push('\n');
    }
    s
}

fn run_envelope(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let family = cfg.envelope_family();
    let p = progress(cfg, format!("envelope {}", cfg.scenario.label()), cfg.n_samples * cfg.ranks.len());
    let report = run_envelope_scatter(family, &cfg.ranks, cfg.n_samples, cfg.grid, cfg.seed, &p)?;
    write_csv(&dir.join("scatter.csv"), &report.points)?;
    write_json(&dir.join("checks.json"), &without(&report, "points")?)?;
    let mut s = String::from("rank  upper_violations  worst_upper  lower_violations  worst_lower\n");
    for c in &report.checks {
        let _ = writeln!(
            s,
            "{:>4}  {:>16}  {:>11.3e}  {:>16}  {:>11}",
            c.rank,
            c.upper_violations,
            c.worst_upper_margin,
            c.lower_violations.map_or("-".into(), |v| v.to_string()),
            c.worst_lower_margin.map_or("-".into(), |v| format!("{v:.3e}"))
        );
    }
    Ok(RunOutput { files: vec!["scatter.csv".into(), "checks.json".into()], summary: s })
}

fn sweep_summary(report: &SweepReport) -> String {
    let mut s = format!("{} draws ({} entangled), seed {}\n", report.n_samples, report.n_entangled, report.seed);
    for c in &report.checks {
        let _ = writeln!(s, "{:<14} violations {:>7}  worst margin {:.3e}", c.name, c.violations, c.worst_margin);
    }
    s
}

fn run_theorem(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let report = if cfg.subcommand == Command::Theorem1 {
        verify_theorem1(cfg.sweeps, cfg.seed)?
    } else {
        verify_theorem2(cfg.sweeps, cfg.seed)?
    };
    write_json(&dir.join("report.json"), &report)?;
    Ok(RunOutput { files: vec!["report.json".into()], summary: sweep_summary(&report) })
}

fn run_meandcc(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let rows = mean_dcc_table(&cfg.ranks, cfg.n_samples, cfg.seed)?;
    let csv = mean_dcc_table_csv(&rows);
    std::fs::write(dir.join("table1.csv"), &csv)?;
    write_json(&dir.join("meandcc.json"), &rows)?;
    let mut s = String::from("rank   N=2     N=dim/2  N=100   sampled(branch)  sampled(clamped)\n");
    for r in &rows {
        let _ = writeln!(
            s,
            "{:>4}  {:>6.3}  {:>7.3}  {:>6.3}  {:>15.4}  {:>16.4}",
            r.rank,
            r.small_n.mean_dcc,
            r.half_dim_n.mean_dcc,
            r.large_n.mean_dcc,
            r.numerical.quantum_branch,
            r.numerical.clamped
        );
    }
    Ok(RunOutput { files: vec!["table1.csv".into(), "meandcc.json".into()], summary: s })
}

#[derive(Serialize)]
struct RankedProp<'a> {
    rank: usize,
    #[serde(flatten)]
    record: &'a PropRecord,
}

fn run_props(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let settings = cfg.merit_settings();
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut s = String::from("rank  acting     applicable  enhanced  prop2|enhanced  prop1 consistent\n");
    for &rank in &cfg.ranks {
        for &acting in &cfg.acting_sets {
            let p = progress(cfg, format!("propcheck rank {rank} {}", acting.label()), cfg.n_samples);
            let seed = derive_sample_seed(rank_seed(cfg, rank), acting_slot(acting));
            let report = run_propcheck(rank, cfg.n_samples, acting, &settings, seed, &p)?;
            let _ = writeln!(
                s,
                "{:>4}  {:<9}  {:>10}  {:>8}  {:>13.2}%  {:>16}",
                rank,
                acting.label(),
                report.n_applicable,
                report.n_enhanced,
                100.0 * report.fraction_prop2_among_enhanced,
                report.n_prop1_consistent
            );
            lines.extend(report.records.iter().map(|r| serde_json::to_value(RankedProp { rank, record: r })).collect::<std::result::Result<Vec<_>, _>>()?);
            reports.push(without(&report, "records")?);
        }
    }
    write_jsonl(&dir.join("samples.jsonl"), &lines)?;
    write_json(&dir.join("report.json"), &reports)?;
    Ok(RunOutput { files: vec!["samples.jsonl".into(), "report.json".into()], summary: s })
}

fn acting_slot(acting: ActingSet) -> u64 {
    ActingSet::ALL.iter().position(|&a| a == acting).unwrap_or(0) as u64
}

#[derive(Serialize)]
struct PostPovmRow {
    rank: usize,
    acting: ActingSet,
    sample_index: usize,
    negativity: f64,
    dcc_before: f64,
    #[serde(rename = "O")]
    o: f64,
    #[serde(rename = "A2")]
    a2: f64,
    upper_curve: f64,
    lower_curve: Option<f64>,
}

fn run_postpovm(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let settings = cfg.merit_settings();
    let family = cfg.envelope_family();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut s = String::from("rank  acting     below_lower(A2)  O>upper  A2>upper  worst O-upper\n");
    for &rank in &cfg.ranks {
        for &acting in cfg.acting_sets.iter().filter(|&&a| a != ActingSet::None) {
            let p = progress(cfg, format!("postpovm-bound rank {rank} {}", acting.label()), cfg.n_samples);
            let seed = derive_sample_seed(rank_seed(cfg, rank), acting_slot(acting));
            let report = run_postpovm_bound_check(family, rank, cfg.n_samples, acting, &settings, seed, &p)?;
            let _ = writeln!(
                s,
                "{:>4}  {:<9}  {:>15}  {:>7}  {:>8}  {:>13.3e}",
                rank,
                acting.label(),
                report.lower_violations.map_or("-".into(), |v| v.to_string()),
                report.o_above_upper,
                report.a2_above_upper,
                report.worst_upper_margin
            );
            rows.extend(report.points.iter().map(|p| PostPovmRow {
                rank,
                acting,
                sample_index: p.sample_index,
                negativity: p.negativity,
                dcc_before: p.dcc_before,
                o: p.o,
                a2: p.a2,
                upper_curve: p.upper_curve,
                lower_curve: p.lower_curve,
            }));
            reports.push(without(&report, "points")?);
        }
    }
    if reports.is_empty() {
        return Err(Error::Config("postpovm-bound needs an acting set other than none".into()));
    }
    write_csv(&dir.join("points.csv"), &rows)?;
    write_json(&dir.join("report.json"), &reports)?;
    Ok(RunOutput { files: vec!["points.csv".into(), "report.json".into()], summary: s })
}

/// `value` as JSON with the (bulky) field `key` removed.
fn without<T: Serialize>(value: &T, key: &str) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(value)?;
    if let Some(map) = v.as_object_mut() {
        map.remove(key);
    }
    Ok(v)
}
