//! Infeasible index of Mallows samples around centers of varying fairness.
//!
//! Two equal groups `A`, `B` of `group_size` candidates. The center for
//! depth `t` stacks `t` members of `A` on top of `t` members of `B`, then
//! alternates: `A^t B^t (AB)^(group_size - t)`. Depth 1 is the same ranking
//! as depth 0, so the default grid skips it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fairrank::mallows::{sample, MallowsParams};
use fairrank::metrics::infeasible_index;
use fairrank::rng::{derive_seed, trial_rng};
use fairrank::{CandidateSet, FairnessSpec, GroupAssignment, Ranking};

use crate::bootstrap::{bootstrap_ci, Statistic};
use crate::error::{ExperimentError, Result};
use crate::output::{ResultRow, ResultTable};

pub const ID: &str = "exp1-ii";
const STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Exp1Params {
    pub group_size: usize,
    pub depths: Vec<usize>,
    pub thetas: Vec<f64>,
    /// Mallows samples per (center, theta) cell.
    pub samples: usize,
}

impl Default for Exp1Params {
    fn default() -> Self {
        Self {
            group_size: 5,
            depths: vec![0, 2, 3, 4, 5],
            thetas: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            samples: 10_000,
        }
    }
}

impl Exp1Params {
    pub fn validate(&self) -> Result<()> {
        if self.group_size == 0 {
            return Err(ExperimentError::Manifest("group_size must be positive".into()));
        }
        if let Some(&t) = self.depths.iter().find(|&&t| t > self.group_size) {
            return Err(ExperimentError::Manifest(format!(
                "depth {t} exceeds group size {}",
                self.group_size
            )));
        }
        check_thetas(&self.thetas)?;
        if self.samples == 0 {
            return Err(ExperimentError::Manifest("samples must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() || thetas.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(ExperimentError::Manifest(
            "thetas must be a non-empty list of finite values >= 0".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1Record {
    pub center: String,
    pub center_ii: usize,
    pub theta: f64,
    pub sample: usize,
    pub ii: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp1Output {
    pub table: ResultTable,
    pub records: Vec<Exp1Record>,
}

pub fn center_label(depth: usize) -> String {
    format!("stack-{depth}")
}

/// Group of each position of the depth-`t` center (0 = `A`, 1 = `B`).
pub fn stacked_groups(group_size: usize, depth: usize) -> Vec<usize> {
    let mut seq = vec![0; depth];
    seq.extend(std::iter::repeat_n(1, depth));
    for _ in depth..group_size {
        seq.extend([0, 1]);
    }
    seq
}

/// Candidates `0..2 group_size` ranked in index order by the center, with
/// the matching two-group assignment and the `(1/2, 1/2)` spec.
pub fn stacked_instance(group_size: usize, depth: usize) -> Result<(CandidateSet, GroupAssignment, FairnessSpec, Ranking)> {
    let membership = stacked_groups(group_size, depth);
    let n = membership.len();
    let scores: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    let set = CandidateSet::from_scores(&scores)?;
    let groups = GroupAssignment::new("group", vec!["A".into(), "B".into()], membership)?;
    let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1)?;
    Ok((set, groups, spec, Ranking::identity(n)))
}

pub fn run(params: &Exp1Params, seed: u64, resamples: usize) -> Result<Exp1Output> {
    params.validate()?;
    let cells: Vec<(usize, f64)> = params
        .depths
        .iter()
        .flat_map(|&d| params.thetas.iter().map(move |&t| (d, t)))
        .collect();
    let results: Vec<(Vec<Exp1Record>, ResultRow)> = cells
        .par_iter()
        .map(|&(depth, theta)| -> Result<_> {
            let (_, groups, spec, center) = stacked_instance(params.group_size, depth)?;
            let center_ii = infeasible_index(&center, &groups, &spec)?.infeasible_index;
            let mallows = MallowsParams::new(center, theta)?;
            let mut rng = trial_rng(seed, &[STREAM, depth as u64, theta.to_bits()]);
            let label = center_label(depth);
            let mut records = Vec::with_capacity(params.samples);
            for i in 0..params.samples {
                let s = sample(&mallows, &mut rng);
                records.push(Exp1Record {
                    center: label.clone(),
                    center_ii,
                    theta,
                    sample: i,
                    ii: infeasible_index(&s, &groups, &spec)?.infeasible_index,
                });
            }
            let values: Vec<f64> = records.iter().map(|r| r.ii as f64).collect();
            let ci = bootstrap_ci(
                &values,
                Statistic::Mean,
                resamples,
                derive_seed(seed, &[STREAM, depth as u64, theta.to_bits(), u64::MAX]),
            )?;
            let row = ResultRow::new(ID, "mean_ii", ci).center(label).theta(Some(theta));
            Ok((records, row))
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::default();
    for &depth in &params.depths {
        let (_, groups, spec, center) = stacked_instance(params.group_size, depth)?;
        let ii = infeasible_index(&center, &groups, &spec)?.infeasible_index;
        table.push(ResultRow::exact(ID, "center_ii", ii as f64).center(center_label(depth)));
    }
    let mut records = Vec::with_capacity(cells.len() * params.samples);
    for (r, row) in results {
        records.extend(r);
        table.push(row);
    }
    Ok(Exp1Output { table, records })
}
