use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapCi;
use crate::error::{ExperimentError, Result};

/// One tidy result row. Grid coordinates that do not apply are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub center: Option<String>,
    pub size: Option<usize>,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub algorithm: Option<String>,
    pub metric: String,
    pub point: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl ResultRow {
    pub fn new(experiment: &str, metric: &str, ci: BootstrapCi) -> Self {
        Self {
            experiment: experiment.into(),
            center: None,
            size: None,
            delta: None,
            theta: None,
            sigma: None,
            algorithm: None,
            metric: metric.into(),
            point: ci.point,
            ci_lo: ci.lower,
            ci_hi: ci.upper,
        }
    }

    /// Row without an interval.
    pub fn exact(experiment: &str, metric: &str, value: f64) -> Self {
        Self::new(
            experiment,
            metric,
            BootstrapCi {
                point: value,
                lower: value,
                upper: value,
                resamples: 0,
            },
        )
    }

    pub fn center(mut self, c: impl Into<String>) -> Self {
        self.center = Some(c.into());
        self
    }

    pub fn size(mut self, n: usize) -> Self {
        self.size = Some(n);
        self
    }

    pub fn delta(mut self, d: f64) -> Self {
        self.delta = Some(d);
        self
    }

    pub fn theta(mut self, t: Option<f64>) -> Self {
        self.theta = t;
        self
    }

    pub fn sigma(mut self, s: Option<f64>) -> Self {
        self.sigma = s;
        self
    }

    pub fn algorithm(mut self, a: impl Into<String>) -> Self {
        self.algorithm = Some(a.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    /// Rows matching `metric` for which `pred` holds.
    pub fn select<'a>(
        &'a self,
        metric: &'a str,
        pred: impl Fn(&ResultRow) -> bool + 'a,
    ) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.metric == metric && pred(r))
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush().map_err(|e| ExperimentError::io("<csv>", e))?;
        Ok(())
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.rows)?;
        w.write_all(b"\n").map_err(|e| ExperimentError::io("<json>", e))?;
        Ok(())
    }
}

pub fn write_jsonl<T: Serialize>(records: &[T], mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| ExperimentError::io("<jsonl>", e))?;
    }
    Ok(())
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    }
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| ExperimentError::io(path, e))
}

pub(crate) fn write_file(path: PathBuf, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<PathBuf> {
    let mut w = create(&path)?;
    f(&mut w)?;
    w.flush().map_err(|e| ExperimentError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_leaves_missing_coordinates_empty() {
        let mut t = ResultTable::default();
        t.push(ResultRow::exact("exp1-ii", "center_ii", 6.0).center("stack-3"));
        t.push(ResultRow::exact("exp3-german", "ndcg", 0.5).size(10).sigma(Some(1.0)).algorithm("dcs"));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "experiment,center,size,delta,theta,sigma,algorithm,metric,point,ci_lo,ci_hi"
        );
        assert_eq!(lines[1], "exp1-ii,stack-3,,,,,,center_ii,6.0,6.0,6.0");
        assert_eq!(lines[2], "exp3-german,,10,,,1.0,dcs,ndcg,0.5,0.5,0.5");
    }

    #[test]
    fn json_roundtrips() {
        let mut t = ResultTable::default();
        t.push(ResultRow::exact("exp2-ndcg", "mean_ndcg", 0.9).delta(0.5).theta(Some(2.0)));
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let rows: Vec<ResultRow> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(rows, t.rows);
    }
}
