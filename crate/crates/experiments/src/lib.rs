//! Manifest-driven reproduction harness for the fairrank experiments.
//!
//! | Id | Module | What it measures |
//! |----|--------|------------------|
//! | `exp1-ii` | [`exp1`] | infeasible index of Mallows samples around stacked centers |
//! | `exp2-ndcg` | [`exp2`] | infeasible index and NDCG around score-sorted rankings |
//! | `exp3-german` | [`exp3`] | fairness and NDCG of all rankers on German Credit |
//!
//! A [`Manifest`] fixes every parameter and the master seed; each trial
//! draws from a seed derived from the master seed and its grid coordinates,
//! so output files are identical across runs and thread counts.

pub mod bootstrap;
pub mod error;
pub mod exp1;
pub mod exp2;
pub mod exp3;
pub mod german;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

pub use bootstrap::{bootstrap_ci, BootstrapCi, Statistic};
pub use error::{ExperimentError, Result};
pub use german::{ingest_german_credit, GermanCredit};
pub use manifest::{ExperimentParams, Manifest};
pub use output::{ResultRow, ResultTable};

/// Seed used by the bundled manifests and the CLI when none is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Exp1(exp1::Exp1Output),
    Exp2(exp2::Exp2Output),
    Exp3(exp3::Exp3Output),
}

impl ExperimentOutput {
    pub fn table(&self) -> &ResultTable {
        match self {
            ExperimentOutput::Exp1(o) => &o.table,
            ExperimentOutput::Exp2(o) => &o.table,
            ExperimentOutput::Exp3(o) => &o.table,
        }
    }

    pub fn num_records(&self) -> usize {
        match self {
            ExperimentOutput::Exp1(o) => o.records.len(),
            ExperimentOutput::Exp2(o) => o.records.len(),
            ExperimentOutput::Exp3(o) => o.records.len(),
        }
    }

    pub fn write_raw(&self, w: impl std::io::Write) -> Result<()> {
        match self {
            ExperimentOutput::Exp1(o) => output::write_jsonl(&o.records, w),
            ExperimentOutput::Exp2(o) => output::write_jsonl(&o.records, w),
            ExperimentOutput::Exp3(o) => output::write_jsonl(&o.records, w),
        }
    }
}

/// Loads whatever data the manifest refers to and runs the experiment.
pub fn run_manifest(m: &Manifest) -> Result<ExperimentOutput> {
    m.validate()?;
    let (seed, b) = (m.seed, m.bootstrap_resamples);
    Ok(match &m.experiment {
        ExperimentParams::Exp1(p) => ExperimentOutput::Exp1(exp1::run(p, seed, b)?),
        ExperimentParams::Exp2(p) => ExperimentOutput::Exp2(exp2::run(p, seed, b)?),
        ExperimentParams::Exp3(p) => {
            let data = ingest_german_credit(m.resolve(&p.data), &p.format)?;
            ExperimentOutput::Exp3(exp3::run(p, &data, seed, b)?)
        }
    })
}

/// Writes `<id>.csv`, `<id>.json`, `<id>.manifest.json` and, if enabled,
/// `<id>.raw.jsonl` into the manifest's output directory.
pub fn write_outputs(m: &Manifest, out: &ExperimentOutput) -> Result<Vec<PathBuf>> {
    let dir = m.output_dir();
    let id = m.id();
    let mut written = vec![
        output::write_file(dir.join(format!("{id}.csv")), |w| out.table().write_csv(w))?,
        output::write_file(dir.join(format!("{id}.json")), |w| out.table().write_json(w))?,
        output::write_file(dir.join(format!("{id}.manifest.json")), |w| {
            let doc = serde_json::json!({ "sha256": m.hash(), "manifest": m });
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            Ok(())
        })?,
    ];
    if m.raw_logs {
        written.push(output::write_file(dir.join(format!("{id}.raw.jsonl")), |w| out.write_raw(w))?);
    }
    Ok(written)
}
