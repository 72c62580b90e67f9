use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use fairrank::{Candidate, CandidateSet, Ranking};

use crate::{CliError, Result};

const ATTR_PREFIX: &str = "attr:";

fn reader(path: &Path, delimiter: u8) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_err(path, e))
}

fn data_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| data_err(path, format!("missing `{name}` column")))
}

/// Reads `id,score,attr:<name>...` rows; other columns are ignored.
pub fn read_candidates(path: &Path, delimiter: u8) -> Result<CandidateSet> {
    let mut rdr = reader(path, delimiter)?;
    let headers = rdr.headers().map_err(|e| data_err(path, e))?.clone();
    let id_col = column(&headers, "id", path)?;
    let score_col = column(&headers, "score", path)?;
    let attrs: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix(ATTR_PREFIX).map(|n| (i, n.to_string())))
        .collect();
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| data_err(path, e))?;
        let line = row + 2;
        let score: f64 = rec[score_col]
            .parse()
            .map_err(|_| data_err(path, format!("line {line}: bad score `{}`", &rec[score_col])))?;
        let attributes: BTreeMap<String, String> =
            attrs.iter().map(|(i, n)| (n.clone(), rec[*i].to_string())).collect();
        out.push(Candidate {
            id: rec[id_col].to_string(),
            score,
            attributes,
        });
    }
    CandidateSet::new(out).map_err(|e| data_err(path, e))
}

/// The `id` column of a ranking file, top first.
pub fn read_ids(path: &Path, delimiter: u8) -> Result<Vec<String>> {
    let mut rdr = reader(path, delimiter)?;
    let headers = rdr.headers().map_err(|e| data_err(path, e))?.clone();
    let id_col = column(&headers, "id", path)?;
    rdr.records()
        .map(|r| r.map(|r| r[id_col].to_string()).map_err(|e| data_err(path, e)))
        .collect()
}

/// A ranking file resolved against `ids` (candidate index -> id).
pub fn read_ranking(path: &Path, delimiter: u8, ids: &[String]) -> Result<Ranking> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let order = read_ids(path, delimiter)?
        .iter()
        .map(|id| {
            index
                .get(id.as_str())
                .copied()
                .ok_or_else(|| data_err(path, format!("unknown id `{id}`")))
        })
        .collect::<Result<Vec<usize>>>()?;
    Ranking::new(order).map_err(|e| data_err(path, e))
}
