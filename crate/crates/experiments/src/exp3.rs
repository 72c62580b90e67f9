//! Re-ranking prefixes of a sex-age fair ranking of the German Credit data.
//!
//! The full dataset is ranked by the greedy weakly fair center w.r.t.
//! `sex-age`; an instance of size `N` is its top `N` candidates, with that
//! prefix as the input ranking. Each algorithm variant re-ranks the instance
//! `repetitions` times; outputs are scored by NDCG and by PPfair w.r.t.
//! `sex-age` (the known attribute) and `housing` (unknown to the rankers).

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fairrank::metrics::infeasible_index;
use fairrank::rankers::{build_weakly_fair_center, CenterSource, RankerConfig, RankerRegistry};
use fairrank::rng::derive_seed;
use fairrank::{FairnessSpec, Ranking, RankingTask, SelectionCriterion};

use crate::bootstrap::{bootstrap_ci, mean, std_dev, BootstrapCi, Statistic};
use crate::error::{ExperimentError, Result};
use crate::exp1::check_thetas;
use crate::german::{GermanCredit, GermanFormat};
use crate::output::{ResultRow, ResultTable};

pub const ID: &str = "exp3-german";
const STREAM: u64 = 3;

pub const MALLOWS: &str = "mallows";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Exp3Params {
    pub data: PathBuf,
    pub format: GermanFormat,
    pub sizes: Vec<usize>,
    /// Registry names of the rankers to run.
    pub algorithms: Vec<String>,
    /// Constraint-noise levels for the non-Mallows rankers.
    pub sigmas: Vec<f64>,
    /// Mallows dispersions.
    pub thetas: Vec<f64>,
    /// Mallows sample counts.
    pub samples: Vec<usize>,
    pub criterion: SelectionCriterion,
    pub repetitions: usize,
    /// Sex-age targets in label order; default: full-dataset proportions.
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub k: usize,
}

impl Default for Exp3Params {
    fn default() -> Self {
        Self {
            data: PathBuf::from("data/german_credit.csv"),
            format: GermanFormat::default(),
            sizes: (1..=10).map(|i| 10 * i).collect(),
            algorithms: vec![
                "approx-multi-valued-ipf".into(),
                "det-const-sort".into(),
                "exact-fair-dcg".into(),
                MALLOWS.into(),
            ],
            sigmas: vec![0.0, 1.0],
            thetas: vec![0.5, 1.0],
            samples: vec![1, 15],
            criterion: SelectionCriterion::MaxNdcg,
            repetitions: 15,
            alpha: None,
            beta: None,
            k: 1,
        }
    }
}

impl Exp3Params {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(ExperimentError::Manifest(m.into()));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be a non-empty list of positive sizes");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be positive");
        }
        if self.k == 0 || self.sizes.iter().any(|&n| n < self.k) {
            return bad("k must be positive and no larger than any size");
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return bad("sigmas must be finite and >= 0");
        }
        if self.samples.contains(&0) {
            return bad("Mallows sample counts must be positive");
        }
        if self.algorithms.iter().any(|a| a == MALLOWS) {
            check_thetas(&self.thetas)?;
            if self.samples.is_empty() {
                return bad("Mallows needs at least one sample count");
            }
        }
        let registry = RankerRegistry::with_builtins();
        if let Some(a) = self.algorithms.iter().find(|a| !registry.contains(a)) {
            return Err(ExperimentError::Manifest(format!("unknown algorithm `{a}`")));
        }
        if self.alpha.is_some() != self.beta.is_some() {
            return bad("alpha and beta must be given together");
        }
        Ok(())
    }

    /// The (algorithm, config) grid, in output order.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for algo in &self.algorithms {
            if algo == MALLOWS {
                for &theta in &self.thetas {
                    for &m in &self.samples {
                        out.push(Variant {
                            label: format!("{MALLOWS}-{m}"),
                            algorithm: algo.clone(),
                            theta: Some(theta),
                            sigma: None,
                            config: RankerConfig {
                                theta,
                                samples: m,
                                criterion: self.criterion,
                                center: CenterSource::Input,
                                sigma: 0.0,
                            },
                        });
                    }
                }
            } else {
                for &sigma in &self.sigmas {
                    out.push(Variant {
                        label: algo.clone(),
                        algorithm: algo.clone(),
                        theta: None,
                        sigma: Some(sigma),
                        config: RankerConfig {
                            sigma,
                            ..RankerConfig::default()
                        },
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub algorithm: String,
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub config: RankerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp3Record {
    pub size: usize,
    pub rep: usize,
    pub algorithm: String,
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub seed: u64,
    pub feasible: bool,
    pub error: Option<String>,
    pub ndcg: Option<f64>,
    pub ii_sex_age: Option<usize>,
    pub ppfair_sex_age: Option<f64>,
    pub ii_housing: Option<usize>,
    pub ppfair_housing: Option<f64>,
    /// Candidate ids, top first.
    pub ranking: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp3Output {
    pub table: ResultTable,
    pub records: Vec<Exp3Record>,
    /// Full-dataset center, as candidate indices.
    pub center: Ranking,
}

pub fn sex_age_spec(params: &Exp3Params, data: &GermanCredit) -> Result<FairnessSpec> {
    let spec = match (&params.alpha, &params.beta) {
        (Some(a), Some(b)) => FairnessSpec::new(a.clone(), b.clone(), params.k)?,
        _ => FairnessSpec::proportional(&data.sex_age, params.k)?,
    };
    if spec.num_groups() != data.sex_age.num_groups() {
        return Err(ExperimentError::Manifest(format!(
            "alpha/beta have {} entries for {} sex-age groups",
            spec.num_groups(),
            data.sex_age.num_groups()
        )));
    }
    Ok(spec)
}

pub fn run(params: &Exp3Params, data: &GermanCredit, seed: u64, resamples: usize) -> Result<Exp3Output> {
    params.validate()?;
    if let Some(&n) = params.sizes.iter().find(|&&n| n > data.len()) {
        return Err(ExperimentError::Manifest(format!(
            "size {n} exceeds the {} records",
            data.len()
        )));
    }
    let spec = sex_age_spec(params, data)?;
    let housing_spec = FairnessSpec::proportional(&data.housing, params.k)?;
    let center = build_weakly_fair_center(&data.candidates, &data.sex_age, &spec)?;
    let variants = params.variants();
    let registry = RankerRegistry::with_builtins();

    let jobs: Vec<(usize, usize)> = params
        .sizes
        .iter()
        .flat_map(|&n| (0..params.repetitions).map(move |r| (n, r)))
        .collect();
    let per_job: Vec<Vec<Exp3Record>> = jobs
        .par_iter()
        .map(|&(size, rep)| -> Result<Vec<Exp3Record>> {
            let idx = &center.order()[..size];
            let set = data.candidates.subset(idx)?;
            let sex_age = data.sex_age.subset(idx)?;
            let housing = data.housing.subset(idx)?;
            let trial_seed = derive_seed(seed, &[STREAM, size as u64, rep as u64]);
            let task = RankingTask::new(&set, &sex_age, &spec)?
                .with_input(Ranking::identity(size))?
                .with_seed(trial_seed);
            let mut out = Vec::with_capacity(variants.len());
            for v in &variants {
                let ranker = registry.build(&v.algorithm, &v.config)?;
                let mut rec = Exp3Record {
                    size,
                    rep,
                    algorithm: v.label.clone(),
                    theta: v.theta,
                    sigma: v.sigma,
                    seed: trial_seed,
                    feasible: false,
                    error: None,
                    ndcg: None,
                    ii_sex_age: None,
                    ppfair_sex_age: None,
                    ii_housing: None,
                    ppfair_housing: None,
                    ranking: None,
                };
                match ranker.rank(&task) {
                    Ok(o) => {
                        let sa = infeasible_index(&o.ranking, &sex_age, &spec)?;
                        let ho = infeasible_index(&o.ranking, &housing, &housing_spec)?;
                        rec.feasible = true;
                        rec.ndcg = o.diagnostic("ndcg");
                        rec.ii_sex_age = Some(sa.infeasible_index);
                        rec.ppfair_sex_age = Some(sa.ppfair);
                        rec.ii_housing = Some(ho.infeasible_index);
                        rec.ppfair_housing = Some(ho.ppfair);
                        rec.ranking = Some(
                            o.ranking
                                .iter()
                                .map(|c| set.get(c).expect("ranked candidate").id.clone())
                                .collect(),
                        );
                    }
                    Err(e) if e.is_infeasibility() => rec.error = Some(e.to_string()),
                    Err(e) => return Err(e.into()),
                }
                out.push(rec);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<Exp3Record> = per_job.into_iter().flatten().collect();

    let cells: Vec<(usize, usize)> = params
        .sizes
        .iter()
        .flat_map(|&n| (0..variants.len()).map(move |v| (n, v)))
        .collect();
    let rows: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(size, vi)| aggregate(&records, &variants[vi], vi, size, seed, resamples))
        .collect::<Result<_>>()?;
    let mut table = ResultTable::default();
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(Exp3Output {
        table,
        records,
        center,
    })
}

fn aggregate(
    records: &[Exp3Record],
    v: &Variant,
    vi: usize,
    size: usize,
    seed: u64,
    resamples: usize,
) -> Result<Vec<ResultRow>> {
    let trials: Vec<&Exp3Record> = records
        .iter()
        .filter(|r| r.size == size && r.algorithm == v.label && r.theta == v.theta && r.sigma == v.sigma)
        .collect();
    let ok: Vec<&Exp3Record> = trials.iter().copied().filter(|r| r.feasible).collect();
    let row = |metric: &str, ci: BootstrapCi| {
        ResultRow::new(ID, metric, ci)
            .size(size)
            .theta(v.theta)
            .sigma(v.sigma)
            .algorithm(v.label.clone())
    };
    let infeasible = (trials.len() - ok.len()) as f64;
    let mut rows = vec![row(
        "infeasible_trials",
        BootstrapCi {
            point: infeasible,
            lower: infeasible,
            upper: infeasible,
            resamples: 0,
        },
    )];
    if ok.is_empty() {
        return Ok(rows);
    }
    let ci_seed = |m: u64| derive_seed(seed, &[STREAM, u64::MAX, size as u64, vi as u64, m]);
    let pick = |f: fn(&Exp3Record) -> Option<f64>| ok.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
    let sex_age = pick(|r| r.ppfair_sex_age);
    let housing = pick(|r| r.ppfair_housing);
    let ndcg = pick(|r| r.ndcg);
    rows.push(row("ppfair_sex_age", bootstrap_ci(&sex_age, Statistic::Median, resamples, ci_seed(0))?));
    rows.push(row("ppfair_housing", bootstrap_ci(&housing, Statistic::Median, resamples, ci_seed(1))?));
    if !ndcg.is_empty() {
        rows.push(row("ndcg", bootstrap_ci(&ndcg, Statistic::Mean, resamples, ci_seed(2))?));
        let (m, sd) = (mean(&ndcg), std_dev(&ndcg));
        rows.push(row(
            "ndcg_sd_band",
            BootstrapCi {
                point: m,
                lower: m - sd,
                upper: m + sd,
                resamples: 0,
            },
        ));
    }
    Ok(rows)
}
