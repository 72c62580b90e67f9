//! Ingestion of the German Credit data.
//!
//! Expected input: delimiter-separated text with a header row. Four columns
//! are read, by header name (see [`GermanColumns`]):
//!
//! | Column | Content |
//! |--------|---------|
//! | amount | credit amount, non-negative number; the ranking score |
//! | personal status | `A91`..`A95`; `A92` and `A95` are female, the rest male |
//! | age | age in years; banded into `<35` and `>=35` |
//! | housing | `A151` rent, `A152` own, `A153` free |

use std::collections::BTreeMap;
use std::path::Path;

use fairrank::{Candidate, CandidateSet, GroupAssignment};
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

pub const SEX_AGE: &str = "sex-age";
pub const HOUSING: &str = "housing";
pub const SEX: &str = "sex";
pub const AGE_BAND: &str = "age-band";

pub const AGE_THRESHOLD: f64 = 35.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GermanColumns {
    pub amount: String,
    pub personal_status: String,
    pub age: String,
    pub housing: String,
}

impl Default for GermanColumns {
    fn default() -> Self {
        Self {
            amount: "credit_amount".into(),
            personal_status: "personal_status_and_sex".into(),
            age: "age_in_years".into(),
            housing: "housing".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GermanFormat {
    pub delimiter: char,
    pub columns: GermanColumns,
}

impl Default for GermanFormat {
    fn default() -> Self {
        Self {
            delimiter: ',',
            columns: GermanColumns::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgeBand {
    #[serde(rename = "<35")]
    Under35,
    #[serde(rename = ">=35")]
    From35,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Housing {
    Free,
    Own,
    Rent,
}

impl Sex {
    pub fn label(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

impl AgeBand {
    pub fn label(self) -> &'static str {
        match self {
            AgeBand::Under35 => "<35",
            AgeBand::From35 => ">=35",
        }
    }
}

impl Housing {
    pub fn label(self) -> &'static str {
        match self {
            Housing::Free => "free",
            Housing::Own => "own",
            Housing::Rent => "rent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GermanCreditRecord {
    pub credit_amount: f64,
    pub sex: Sex,
    pub age_band: AgeBand,
    pub housing: Housing,
}

impl GermanCreditRecord {
    pub fn sex_age_label(&self) -> String {
        format!("{} {}", self.age_band.label(), self.sex.label())
    }
}

/// Parsed dataset: candidates scored by credit amount, with attributes
/// `sex`, `age-band`, `sex-age` and `housing`.
#[derive(Debug, Clone)]
pub struct GermanCredit {
    pub records: Vec<GermanCreditRecord>,
    pub candidates: CandidateSet,
    pub sex_age: GroupAssignment,
    pub housing: GroupAssignment,
}

/// `(age band, sex, housing)` cell counts.
pub type CrossTab = BTreeMap<(AgeBand, Sex, Housing), usize>;

impl GermanCredit {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn cross_tab(&self) -> CrossTab {
        let mut t = CrossTab::new();
        for r in &self.records {
            *t.entry((r.age_band, r.sex, r.housing)).or_default() += 1;
        }
        t
    }
}

fn decode_sex(code: &str) -> Option<Sex> {
    match code {
        "A92" | "A95" => Some(Sex::Female),
        "A91" | "A93" | "A94" => Some(Sex::Male),
        _ => None,
    }
}

fn decode_housing(code: &str) -> Option<Housing> {
    match code {
        "A151" => Some(Housing::Rent),
        "A152" => Some(Housing::Own),
        "A153" => Some(Housing::Free),
        _ => None,
    }
}

pub fn ingest_german_credit(path: impl AsRef<Path>, format: &GermanFormat) -> Result<GermanCredit> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| ExperimentError::io(path, e))?;
    read_german_credit(file, format)
}

pub fn read_german_credit(reader: impl std::io::Read, format: &GermanFormat) -> Result<GermanCredit> {
    if !format.delimiter.is_ascii() {
        return Err(ExperimentError::Dataset("delimiter must be an ASCII character".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter as u8)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ExperimentError::Dataset(format!("missing column `{name}`")))
    };
    let c = &format.columns;
    let (i_amount, i_status, i_age, i_housing) = (col(&c.amount)?, col(&c.personal_status)?, col(&c.age)?, col(&c.housing)?);

    let mut records = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let row_no = idx + 1;
        let bad = |message: String| ExperimentError::Data { row: row_no, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize, name: &str| row.get(i).ok_or_else(|| bad(format!("missing `{name}`")));
        let amount_raw = field(i_amount, &c.amount)?;
        let credit_amount: f64 = amount_raw
            .parse()
            .map_err(|_| bad(format!("credit amount `{amount_raw}` is not a number")))?;
        if !credit_amount.is_finite() || credit_amount < 0.0 {
            return Err(bad(format!("credit amount {credit_amount} must be non-negative")));
        }
        let status = field(i_status, &c.personal_status)?;
        let sex = decode_sex(status).ok_or_else(|| bad(format!("unknown personal status code `{status}`")))?;
        let age_raw = field(i_age, &c.age)?;
        let age: f64 = age_raw
            .parse()
            .map_err(|_| bad(format!("age `{age_raw}` is not a number")))?;
        if !age.is_finite() || age < 0.0 {
            return Err(bad(format!("age {age} out of range")));
        }
        let age_band = if age < AGE_THRESHOLD { AgeBand::Under35 } else { AgeBand::From35 };
        let housing_raw = field(i_housing, &c.housing)?;
        let housing = decode_housing(housing_raw).ok_or_else(|| bad(format!("unknown housing code `{housing_raw}`")))?;
        records.push(GermanCreditRecord {
            credit_amount,
            sex,
            age_band,
            housing,
        });
    }
    build(records)
}

fn build(records: Vec<GermanCreditRecord>) -> Result<GermanCredit> {
    if records.is_empty() {
        return Err(ExperimentError::Dataset("no records".into()));
    }
    let candidates = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Candidate::new(format!("row{}", i + 1), r.credit_amount)
                .with_attribute(SEX, r.sex.label())
                .with_attribute(AGE_BAND, r.age_band.label())
                .with_attribute(SEX_AGE, r.sex_age_label())
                .with_attribute(HOUSING, r.housing.label())
        })
        .collect();
    let candidates = CandidateSet::new(candidates)?;
    let sex_age = GroupAssignment::from_attribute(&candidates, SEX_AGE)?;
    let housing = GroupAssignment::from_attribute(&candidates, HOUSING)?;
    if sex_age.num_groups() != 4 {
        return Err(ExperimentError::Dataset(format!(
            "expected 4 sex-age groups, found {}",
            sex_age.num_groups()
        )));
    }
    if housing.num_groups() != 3 {
        return Err(ExperimentError::Dataset(format!(
            "expected 3 housing groups, found {}",
            housing.num_groups()
        )));
    }
    Ok(GermanCredit {
        records,
        candidates,
        sex_age,
        housing,
    })
}
