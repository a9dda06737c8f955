use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use wsntrack_core::engine::MessageKind;
use wsntrack_core::topology::NodeRole;
use wsntrack_core::{MetricsReport, SimConfig, Strategy};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
    pub config: SimConfig,
    pub output_dir: PathBuf,
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        strategies: Vec<Strategy>,
        seeds: Vec<u64>,
        config: SimConfig,
        output_dir: PathBuf,
    ) -> Self {
        Self {
            command: command.to_owned(),
            strategies,
            seeds,
            config,
            output_dir,
            started_unix_s: unix_now(),
            finished_unix_s: None,
        }
    }

    pub fn write(&self) -> Result<(), CliError> {
        let path = self.output_dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn finish(&mut self) -> Result<(), CliError> {
        self.finished_unix_s = Some(unix_now());
        self.write()
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Creates `<root>/<stem>`, or `<root>/<stem>-N` for the first free `N`.
pub fn unique_dir(root: &Path, stem: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    for n in 0u32.. {
        let name = if n == 0 {
            stem.to_owned()
        } else {
            format!("{stem}-{n}")
        };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(CliError::io(dir, e)),
        }
    }
    unreachable!("u32 range exhausted")
}

pub fn summary(report: &MetricsReport) -> String {
    let mut lines = vec![
        format!("strategy          {}", report.strategy),
        format!("seed              {}", report.seed),
        format!(
            "rounds            {} (every {} s)",
            report.rounds_run, report.round_period_s
        ),
        "messages          sent / delivered / dropped".to_owned(),
    ];
    for kind in MessageKind::ALL {
        let c = report.kind(kind);
        lines.push(format!(
            "  {:<17}{} / {} / {}",
            kind.as_str(),
            c.sent,
            c.delivered,
            c.dropped
        ));
    }
    let or_na = |v: Option<f64>, digits: usize| {
        v.map_or_else(|| "n/a".to_owned(), |x| format!("{x:.digits$}"))
    };
    lines.push(format!("sink deliveries   {}", report.total_sink_msgs()));
    lines.push(format!(
        "target-to-target  {}",
        report.target_to_target_msgs()
    ));
    lines.push(format!(
        "average hops      {}",
        or_na(report.average_hops(), 3)
    ));
    lines.push(format!(
        "energy consumed   {:.6e} mAh",
        report.total_consumed_mah()
    ));
    for role in [NodeRole::Reference, NodeRole::Target] {
        lines.push(format!(
            "{:<18}{:.6e} mAh mean, battery life {:.4e} s",
            role.as_str(),
            report.mean_consumed_mah(role),
            report.mean_battery_life_s(role)
        ));
    }
    lines.push(format!(
        "median loc. error {} m",
        or_na(report.median_localization_error(), 6)
    ));
    lines.push(format!(
        "loc. failures     {}",
        report.localization_failures
    ));
    if report.strategy == Strategy::Improved {
        lines.push(format!("leader fallbacks  {}", report.leader_fallbacks));
    }
    if report.routing_errors > 0 || report.unreachable_references > 0 {
        lines.push(format!(
            "routing errors    {} ({} references cannot reach the sink)",
            report.routing_errors, report.unreachable_references
        ));
    }
    lines.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirs_never_collide() {
        let root = tempfile::tempdir().unwrap();
        let a = unique_dir(root.path(), "run-improved-seed7").unwrap();
        let b = unique_dir(root.path(), "run-improved-seed7").unwrap();
        assert_ne!(a, b);
        assert!(b.ends_with("run-improved-seed7-1"));
    }
}
