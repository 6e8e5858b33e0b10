//! Output directories, atomic writes and the per-experiment file layout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nlac_core::{Field, RateTable, RunLog};

use crate::config::ExperimentConfig;
use crate::dump::format_field;
use crate::error::{HarnessError, Result};
use crate::experiments::{self, BubbleRun, ConvergenceCase, MonitoredRun, Workspace};
use crate::initial::RNG_NAME;

pub const METADATA_FILE: &str = "metadata.txt";

#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| HarnessError::Io { path: root.clone(), source })?;
        Ok(OutputDir { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes through a temporary sibling and renames it into place.
    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).map_err(|source| HarnessError::Io { path: tmp.clone(), source })?;
        fs::rename(&tmp, &target).map_err(|source| HarnessError::Io { path: target.clone(), source })?;
        Ok(target)
    }

    fn write_csv(&self, name: &str, render: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|source| HarnessError::Io { path: self.root.join(name), source })?;
        self.write(name, buf)
    }

    pub fn write_runlog(&self, name: &str, log: &RunLog) -> Result<PathBuf> {
        self.write_csv(name, |w| log.write_csv(w))
    }

    pub fn write_rates(&self, name: &str, table: &RateTable) -> Result<PathBuf> {
        self.write_csv(name, |w| table.write_csv(w))
    }

    pub fn write_field(&self, name: &str, field: &Field, t: f64) -> Result<PathBuf> {
        self.write(name, format_field(field, t))
    }

    /// Config echo. `nlac <kind> --config metadata.txt` repeats the run.
    pub fn write_metadata(&self, c: &ExperimentConfig, notes: &[String]) -> Result<PathBuf> {
        let mut text = String::new();
        let _ = writeln!(text, "# nlac {} {}", env!("CARGO_PKG_VERSION"), c.kind);
        let _ = writeln!(text, "# rng: {RNG_NAME}");
        for note in notes {
            let _ = writeln!(text, "# {note}");
        }
        text.push_str(&c.to_text());
        self.write(METADATA_FILE, text)
    }
}

fn write_cases(out: &OutputDir, cases: &[ConvergenceCase]) -> Result<String> {
    let mut summary = Vec::new();
    for case in cases {
        out.write_rates(&format!("rates_{}.csv", case.label), &case.table)?;
        let last = case.table.rows.last().and_then(|r| r.rate).map_or("-".to_string(), |r| format!("{r:.4}"));
        summary.push(format!("{} {}", case.label, last));
    }
    Ok(format!("final rates: {}", summary.join(", ")))
}

fn write_monitored(out: &OutputDir, run: &MonitoredRun) -> Result<()> {
    out.write_runlog(&format!("runlog_{}.csv", run.label), &run.log)?;
    for (t, field) in &run.snapshots {
        out.write_field(&format!("{}_t{t}.field", run.label), field, *t)?;
    }
    out.write_field(&format!("{}_final.field", run.label), &run.final_state, run.t_final)?;
    Ok(())
}

fn jumps_csv(runs: &[BubbleRun]) -> String {
    let mut s = String::from("delta,predicted,measured,t_stop,steady,extinct\n");
    for b in runs {
        let _ = writeln!(
            s,
            "{:?},{:.16e},{:.16e},{:?},{},{}",
            b.delta, b.predicted, b.measured, b.run.t_final, b.run.steady, b.extinct
        );
    }
    s
}

/// Runs the configured experiment, writes its outputs under `out` and
/// returns a one-line summary.
pub fn execute(c: &ExperimentConfig, out: &OutputDir) -> Result<String> {
    use crate::config::ExperimentKind as K;
    let ws = Workspace::new();
    let mut notes = Vec::new();
    let summary = match c.kind {
        K::Run => {
            let r = experiments::single_run(c, &ws)?;
            out.write_field("initial.field", &r.initial, 0.0)?;
            out.write_field("final.field", &r.outcome.state.u, r.outcome.state.t)?;
            out.write_runlog("runlog.csv", &r.outcome.log)?;
            notes.push(format!("steps: {} steady: {}", r.outcome.state.step, r.outcome.reached_steady_state));
            format!(
                "run: {} steps to t = {}, max |u| = {:.6}",
                r.outcome.state.step,
                r.outcome.state.t,
                nlac_core::max_norm(&r.outcome.state.u)
            )
        }
        K::ConvergenceTime => write_cases(out, &experiments::convergence_time(c, &ws)?)?,
        K::ConvergenceSpace => write_cases(out, &experiments::convergence_space(c, &ws)?)?,
        K::ConvergenceDelta => write_cases(out, &experiments::convergence_delta(c, &ws)?)?,
        K::Stability => {
            let runs = experiments::stability(c, &ws)?;
            let mut parts = Vec::new();
            for r in &runs {
                write_monitored(out, r)?;
                notes.push(format!("{}: stopped at t = {} steady: {}", r.label, r.t_final, r.steady));
                parts.push(format!("{} peak {:.6} t {}", r.label, r.peak_norm(), r.t_final));
            }
            format!("stability: {}", parts.join(", "))
        }
        K::Bubble => {
            let runs = experiments::bubble(c, &ws)?;
            let mut parts = Vec::new();
            for b in &runs {
                write_monitored(out, &b.run)?;
                notes.push(format!(
                    "delta {}: jump measured at t = {} steady: {}",
                    b.delta, b.run.t_final, b.run.steady
                ));
                parts.push(format!("delta {} jump {:.6} (predicted {:.6})", b.delta, b.measured, b.predicted));
            }
            out.write("jumps.csv", jumps_csv(&runs))?;
            format!("bubble: {}", parts.join(", "))
        }
        K::Coeffs => {
            let s = experiments::coeffs(c, &ws)?;
            out.write("stencil.txt", s.to_golden())?;
            format!("coeffs: r = {}, second moment {:.12}", s.radius(), s.second_moment())
        }
    };
    out.write_metadata(c, &notes)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(dir.path().join("a/b")).unwrap();
        out.write("x.txt", "one").unwrap();
        out.write("x.txt", "two").unwrap();
        assert_eq!(fs::read_to_string(out.path().join("x.txt")).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(out.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
