//! CSV emission for experiment runs: per-trial rows, a summary table and a
//! plot-ready series, all byte-stable for a fixed seed.

use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: String,
    pub mode: String,
    pub trial_header: String,
    pub trial_rows: Vec<String>,
    pub summary: Vec<(String, String)>,
    pub plot_header: String,
    pub plot_rows: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, mode: &str, trial_header: &str, plot_header: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            mode: mode.to_string(),
            trial_header: trial_header.to_string(),
            trial_rows: Vec::new(),
            summary: Vec::new(),
            plot_header: plot_header.to_string(),
            plot_rows: Vec::new(),
        }
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from(&self.trial_header);
        out.push('\n');
        for row in &self.trial_rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        out.push_str(&format!("experiment,{}\n", self.experiment));
        out.push_str(&format!("mode,{}\n", self.mode));
        out.push_str(&format!("trials,{}\n", self.trial_rows.len()));
        for (k, v) in &self.summary {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }

    pub fn plot_csv(&self) -> String {
        let mut out = String::from(&self.plot_header);
        out.push('\n');
        for row in &self.plot_rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    /// Writes `trials.csv`, `summary.csv` and `plotdata.csv` under `dir`,
    /// creating it if needed; returns the written paths.
    pub fn write(&self, dir: impl AsRef<Path>) -> std::io::Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(3);
        for (name, content) in [
            ("trials.csv", self.trials_csv()),
            ("summary.csv", self.summary_csv()),
            ("plotdata.csv", self.plot_csv()),
        ] {
            let path = dir.join(name);
            let mut f = std::fs::File::create(&path)?;
            f.write_all(content.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }
}
