use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::Direction;
use crate::stats::SampleMatrix;

use super::campaign::CampaignResult;

const MANIFEST: &str = "cells.csv";

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn trajectory_name(label: &str, run: usize) -> String {
    format!("trajectory_{label}_{run}.csv")
}

/// Writes trajectories, snapshots and a `cells.csv` manifest under `dir`.
pub fn write_campaign(result: &CampaignResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut manifest = String::from("cell,label,variant,cp,cr,mr,direction,runs,generations\n");
    for (i, cell) in result.cells.iter().enumerate() {
        let label = cell.label();
        let s = &cell.spec;
        manifest.push_str(&format!(
            "{i},{label},{},{},{},{},{},{},{}\n",
            s.variant,
            s.cp,
            s.cr,
            s.mr,
            result.direction.as_str(),
            cell.runs.len(),
            result.generations
        ));
        for run in &cell.runs {
            let mut csv = String::from("generation,collective_fitness");
            if run.test_score.is_some() {
                csv.push_str(",test_accuracy");
            }
            csv.push('\n');
            for (g, f) in run.collective.iter().enumerate() {
                csv.push_str(&format!("{g},{f}"));
                if let Some(t) = &run.test_score {
                    csv.push_str(&format!(",{}", t[g]));
                }
                csv.push('\n');
            }
            write(&dir.join(trajectory_name(&label, run.run)), csv)?;

            for (g, frame) in &run.snapshots {
                frame.write_pgm(dir.join(format!("snap_{label}_{}_g{g}.pgm", run.run)))?;
            }
            if result.record_agent_fitness {
                let mut csv = String::from("node,fitness\n");
                for (k, f) in run.final_agent_fitness.iter().enumerate() {
                    csv.push_str(&format!("{k},{f}\n"));
                }
                write(&dir.join(format!("agents_{label}_{}.csv", run.run)), csv)?;
            }
        }
    }
    write(&dir.join(MANIFEST), manifest)
}

/// Final per-run scores read back from a campaign directory.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalScores {
    pub matrix: SampleMatrix,
    /// Column the scores came from.
    pub metric: String,
}

fn last_row(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut last = None;
    for rec in reader.records() {
        last = Some(rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?);
    }
    let last = last.ok_or_else(|| Error::Config(format!("{}: empty trajectory", path.display())))?;
    let values = last
        .iter()
        .map(|v| {
            v.parse::<f64>()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((headers, values))
}

/// Loads the final score of every run. Test accuracy is used when the
/// trajectories carry it, otherwise the final collective fitness.
pub fn load_final_scores(dir: impl AsRef<Path>) -> Result<FinalScores> {
    let dir = dir.as_ref();
    let manifest = dir.join(MANIFEST);
    let mut reader =
        csv::Reader::from_path(&manifest).map_err(|e| Error::Config(format!("{}: {e}", manifest.display())))?;

    let mut algorithms = Vec::new();
    let mut samples = Vec::new();
    let mut direction = None;
    let mut metric: Option<String> = None;
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", manifest.display())))?;
        let field = |i: usize| {
            rec.get(i)
                .ok_or_else(|| Error::Config(format!("{}: short row", manifest.display())))
        };
        let label = field(1)?.to_string();
        let dir_here = match field(6)? {
            "minimize" => Direction::Minimize,
            "maximize" => Direction::Maximize,
            other => return Err(Error::Config(format!("unknown direction {other:?}"))),
        };
        let runs: usize = field(7)?
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", manifest.display())))?;

        let mut scores = Vec::with_capacity(runs);
        for run in 0..runs {
            let (headers, values) = last_row(&dir.join(trajectory_name(&label, run)))?;
            let col = headers.iter().position(|h| h == "test_accuracy").unwrap_or(1);
            let name = &headers[col];
            match &metric {
                None => metric = Some(name.clone()),
                Some(m) if m != name => {
                    return Err(Error::Config("cells report different metrics".into()));
                }
                _ => {}
            }
            scores.push(values[col]);
        }
        let d = if metric.as_deref() == Some("test_accuracy") {
            Direction::Maximize
        } else {
            dir_here
        };
        if direction.is_some_and(|x| x != d) {
            return Err(Error::Config("cells disagree on direction".into()));
        }
        direction = Some(d);
        algorithms.push(label);
        samples.push(scores);
    }
    let direction = direction.ok_or_else(|| Error::Config(format!("{}: no cells", manifest.display())))?;
    Ok(FinalScores {
        matrix: SampleMatrix {
            algorithms,
            samples,
            direction,
        },
        metric: metric.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{run_campaign, CampaignConfig};

    #[test]
    fn round_trip_final_scores() {
        let cfg = CampaignConfig::from_toml(
            r#"
            master_seed = 3
            runs = 2
            generations = 10
            snapshot_generations = [0, 10]
            record_agent_fitness = true
            [problem]
            kind = "illumination"
            rows = 2
            cols = 4
            mode = "vector"
            [[cells]]
            variant = "CopyBest"
            mr = 0.1
            [[cells]]
            variant = "XoverBest"
            cp = 0.3
            cr = 0.7
            mr = 0.1
            "#,
        )
        .unwrap();
        let res = run_campaign(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_campaign(&res, dir.path()).unwrap();

        let fs = load_final_scores(dir.path()).unwrap();
        assert_eq!(fs.metric, "collective_fitness");
        assert_eq!(fs.matrix.direction, Direction::Minimize);
        assert_eq!(
            fs.matrix.algorithms,
            vec!["CopyBest_mr0.1", "XoverBest_cp0.3_cr0.7_mr0.1"]
        );
        for (cell, scores) in res.cells.iter().zip(&fs.matrix.samples) {
            let expect: Vec<f64> = cell.runs.iter().map(|r| r.final_fitness()).collect();
            assert_eq!(&expect, scores);
        }
        assert!(dir.path().join("snap_CopyBest_mr0.1_1_g10.pgm").exists());
        assert!(dir.path().join("agents_CopyBest_mr0.1_0.csv").exists());
        let traj = fs::read_to_string(dir.path().join("trajectory_CopyBest_mr0.1_0.csv")).unwrap();
        assert_eq!(traj.lines().count(), 12);
        assert!(traj.starts_with("generation,collective_fitness\n0,"));
    }

    #[test]
    fn missing_directory_is_an_error() {
        assert!(load_final_scores("/nonexistent/netee").is_err());
    }
}
