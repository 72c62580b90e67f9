//! Infeasible index and NDCG of Mallows samples around score-sorted
//! rankings of two groups whose score distributions are shifted by `delta`:
//! group `A` draws from `U(0, 1)`, group `B` from `U(delta, 1 + delta)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fairrank::mallows::{sample, MallowsParams};
use fairrank::metrics::{infeasible_index, ndcg};
use fairrank::rng::{derive_seed, trial_rng};
use fairrank::{ranking_from_scores, CandidateSet, FairnessSpec, GroupAssignment, Ranking};

use crate::bootstrap::{bootstrap_ci, Statistic};
use crate::error::{ExperimentError, Result};
use crate::exp1::check_thetas;
use crate::output::{ResultRow, ResultTable};

pub const ID: &str = "exp2-ndcg";
const STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Exp2Params {
    pub group_size: usize,
    pub deltas: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Score draws per delta.
    pub instances: usize,
    /// Mallows samples per (instance, theta).
    pub samples: usize,
}

impl Default for Exp2Params {
    fn default() -> Self {
        Self {
            group_size: 5,
            deltas: (0..=10).map(|i| i as f64 / 10.0).collect(),
            thetas: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            instances: 100,
            samples: 100,
        }
    }
}

impl Exp2Params {
    pub fn validate(&self) -> Result<()> {
        if self.group_size == 0 || self.instances == 0 || self.samples == 0 {
            return Err(ExperimentError::Manifest(
                "group_size, instances and samples must be positive".into(),
            ));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(ExperimentError::Manifest(
                "deltas must be a non-empty list of finite values >= 0".into(),
            ));
        }
        check_thetas(&self.thetas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Record {
    pub delta: f64,
    pub instance: usize,
    pub center_ii: usize,
    pub theta: f64,
    pub sample: usize,
    pub ii: usize,
    pub ndcg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp2Output {
    pub table: ResultTable,
    pub records: Vec<Exp2Record>,
}

/// Scores for one instance: the first `group_size` candidates are group `A`.
pub fn draw_instance(group_size: usize, delta: f64, seed: u64) -> Result<(CandidateSet, GroupAssignment, FairnessSpec)> {
    let mut rng = fairrank::rng::rng_from_seed(seed);
    let scores: Vec<f64> = (0..2 * group_size)
        .map(|i| {
            let u: f64 = rng.random();
            if i < group_size {
                u
            } else {
                u + delta
            }
        })
        .collect();
    let membership = (0..2 * group_size).map(|i| usize::from(i >= group_size)).collect();
    let set = CandidateSet::from_scores(&scores)?;
    let groups = GroupAssignment::new("group", vec!["A".into(), "B".into()], membership)?;
    let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1)?;
    Ok((set, groups, spec))
}

struct InstanceResult {
    center_ii: usize,
    records: Vec<Exp2Record>,
}

fn run_instance(params: &Exp2Params, seed: u64, delta: f64, instance: usize) -> Result<InstanceResult> {
    let (set, groups, spec) = draw_instance(
        params.group_size,
        delta,
        derive_seed(seed, &[STREAM, delta.to_bits(), instance as u64]),
    )?;
    let center: Ranking = ranking_from_scores(&set);
    let center_ii = infeasible_index(&center, &groups, &spec)?.infeasible_index;
    let mut records = Vec::with_capacity(params.thetas.len() * params.samples);
    for &theta in &params.thetas {
        let mallows = MallowsParams::new(center.clone(), theta)?;
        let mut rng = trial_rng(seed, &[STREAM, delta.to_bits(), instance as u64, theta.to_bits()]);
        for i in 0..params.samples {
            let s = sample(&mallows, &mut rng);
            records.push(Exp2Record {
                delta,
                instance,
                center_ii,
                theta,
                sample: i,
                ii: infeasible_index(&s, &groups, &spec)?.infeasible_index,
                ndcg: ndcg(&s, &set)?,
            });
        }
    }
    Ok(InstanceResult { center_ii, records })
}

pub fn run(params: &Exp2Params, seed: u64, resamples: usize) -> Result<Exp2Output> {
    params.validate()?;
    let jobs: Vec<(f64, usize)> = params
        .deltas
        .iter()
        .flat_map(|&d| (0..params.instances).map(move |i| (d, i)))
        .collect();
    let results: Vec<InstanceResult> = jobs
        .par_iter()
        .map(|&(d, i)| run_instance(params, seed, d, i))
        .collect::<Result<_>>()?;

    let ci = |values: &[f64], coords: &[u64]| {
        let mut c = vec![STREAM, u64::MAX];
        c.extend_from_slice(coords);
        bootstrap_ci(values, Statistic::Mean, resamples, derive_seed(seed, &c))
    };
    let cells: Vec<(usize, usize)> = (0..params.deltas.len())
        .flat_map(|d| (0..params.thetas.len()).map(move |t| (d, t)))
        .collect();
    let per_delta = params.instances;
    let cell_rows: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(di, ti)| -> Result<Vec<ResultRow>> {
            let (delta, theta) = (params.deltas[di], params.thetas[ti]);
            let recs = results[di * per_delta..(di + 1) * per_delta]
                .iter()
                .flat_map(|r| r.records.iter().filter(|x| x.theta == theta));
            let (ii, nd): (Vec<f64>, Vec<f64>) = recs.map(|r| (r.ii as f64, r.ndcg)).unzip();
            let coords = [delta.to_bits(), theta.to_bits()];
            Ok(vec![
                ResultRow::new(ID, "mean_ii", ci(&ii, &[coords[0], coords[1], 0])?)
                    .delta(delta)
                    .theta(Some(theta)),
                ResultRow::new(ID, "mean_ndcg", ci(&nd, &[coords[0], coords[1], 1])?)
                    .delta(delta)
                    .theta(Some(theta)),
            ])
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::default();
    for (di, &delta) in params.deltas.iter().enumerate() {
        let centers: Vec<f64> = results[di * per_delta..(di + 1) * per_delta]
            .iter()
            .map(|r| r.center_ii as f64)
            .collect();
        table.push(ResultRow::new(ID, "center_ii", ci(&centers, &[delta.to_bits()])?).delta(delta));
    }
    for rows in cell_rows {
        for r in rows {
            table.push(r);
        }
    }
    let records = results.into_iter().flat_map(|r| r.records).collect();
    Ok(Exp2Output { table, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Exp2Params {
        Exp2Params {
            deltas: vec![0.0, 1.0],
            thetas: vec![0.1, 5.0],
            instances: 10,
            samples: 20,
            ..Exp2Params::default()
        }
    }

    #[test]
    fn aggregates_match_records() {
        let out = run(&small(), 5, 200).unwrap();
        assert_eq!(out.records.len(), 2 * 10 * 2 * 20);
        for row in out.table.select("mean_ndcg", |_| true) {
            let v: Vec<f64> = out
                .records
                .iter()
                .filter(|r| Some(r.delta) == row.delta && Some(r.theta) == row.theta)
                .map(|r| r.ndcg)
                .collect();
            assert!((v.iter().sum::<f64>() / v.len() as f64 - row.point).abs() < 1e-12);
        }
        assert_eq!(out, run(&small(), 5, 200).unwrap());
    }

    #[test]
    fn full_shift_segregates_the_center() {
        let (set, groups, spec) = draw_instance(5, 1.0, 3).unwrap();
        let c = ranking_from_scores(&set);
        // every B score exceeds every A score
        assert!(c.iter().take(5).all(|x| groups.group_of(x) == 1));
        assert_eq!(infeasible_index(&c, &groups, &spec).unwrap().infeasible_index, 14);
    }
}
