//! Run records and the stable CSV schema.

use crate::manifest::RunManifest;
use crate::CliError;
use serde::{Deserialize, Serialize};

pub const CSV_SCHEMA: &str = "fliplab-run-csv v1";
pub const CSV_HEADER: &str = "n,seed,trial,model,phi,rule,steps,final_h,wall_time_ns,terminated";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub model: String,
    pub phi: f64,
    pub rule: String,
    pub steps: u64,
    pub final_h: f64,
    pub wall_time_ns: u128,
    pub terminated: String,
}

impl RunRecord {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            self.trial,
            self.model,
            self.phi,
            self.rule,
            self.steps,
            self.final_h,
            self.wall_time_ns,
            self.terminated
        )
    }
}

/// CSV with a versioned schema comment and the embedded manifest.
pub fn records_to_csv(records: &[RunRecord], manifest: &RunManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {CSV_SCHEMA}\n"));
    out.push_str(&format!("# manifest: {}\n", manifest.to_json()));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Parses a run CSV back into records; comment lines are skipped and the
/// header row is required.
pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CliError::Usage("csv has no header row".to_string()))?;
    if header.trim() != CSV_HEADER {
        return Err(CliError::Usage(format!("unexpected csv header: {header}")));
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(CliError::Usage(format!("csv row {} has {} fields", k + 1, fields.len())));
        }
        let bad = |what: &str| CliError::Usage(format!("csv row {}: bad {what}", k + 1));
        records.push(RunRecord {
            n: fields[0].parse().map_err(|_| bad("n"))?,
            seed: fields[1].parse().map_err(|_| bad("seed"))?,
            trial: fields[2].parse().map_err(|_| bad("trial"))?,
            model: fields[3].to_string(),
            phi: fields[4].parse().map_err(|_| bad("phi"))?,
            rule: fields[5].to_string(),
            steps: fields[6].parse().map_err(|_| bad("steps"))?,
            final_h: fields[7].parse().map_err(|_| bad("final_h"))?,
            wall_time_ns: fields[8].parse().map_err(|_| bad("wall_time_ns"))?,
            terminated: fields[9].to_string(),
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize, trial: u64, steps: u64) -> RunRecord {
        RunRecord {
            n,
            seed: 1,
            trial,
            model: "uniform(phi=0.5)".to_string(),
            phi: 0.5,
            rule: "best".to_string(),
            steps,
            final_h: 1.25,
            wall_time_ns: 10,
            terminated: "local-max".to_string(),
        }
    }

    #[test]
    fn csv_round_trips() {
        let manifest = RunManifest::new("test".to_string(), &serde_json::json!({}), 1);
        let records = vec![record(8, 0, 12), record(8, 1, 9)];
        let text = records_to_csv(&records, &manifest);
        assert!(text.starts_with(&format!("# {CSV_SCHEMA}\n# manifest: ")));
        let back = records_from_csv(&text).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(records_from_csv("").is_err());
        assert!(records_from_csv("a,b\n1,2\n").is_err());
        let text = format!("{CSV_HEADER}\n1,2,3\n");
        assert!(records_from_csv(&text).is_err());
    }
}
