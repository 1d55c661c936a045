//! JSON file formats for distributions and ensembles.
//!
//! Distribution file:
//!
//! ```json
//! { "key_length": 3, "probs": [0.225, 0.1107142857142857, ...] }
//! { "key_length": 20, "probs": "uniform" }
//! ```
//!
//! Ensemble file (distribution paths are relative to the ensemble file):
//!
//! ```json
//! { "entries": [ { "weight": 0.5, "distance": 0.0 },
//!                { "weight": 0.5, "distribution": "p.json" } ] }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::KeyDistribution;
use crate::ensemble::{DistanceEnsemble, EnsembleEntry};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Slack on total mass accepted in file form, absorbing decimal serialization.
pub const FILE_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Probs {
    Named(String),
    Dense(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
struct DistributionDoc {
    key_length: u32,
    probs: Probs,
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleEntryDoc {
    weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distribution: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleDoc {
    entries: Vec<EnsembleEntryDoc>,
}

fn malformed(origin: &str, reason: impl ToString) -> Error {
    Error::Malformed { path: origin.to_string(), reason: reason.to_string() }
}

/// Parses a distribution document. Tables summing to 1 within [`FILE_SUM_TOL`]
/// are rescaled to unit mass; anything further off is rejected.
pub fn parse_distribution<T: Scalar>(text: &str, origin: &str) -> Result<KeyDistribution<T>> {
    let doc: DistributionDoc = serde_json::from_str(text).map_err(|e| malformed(origin, e))?;
    match doc.probs {
        Probs::Named(name) if name == "uniform" => KeyDistribution::uniform(doc.key_length),
        Probs::Named(name) => Err(malformed(origin, format!("unknown distribution name '{name}'"))),
        Probs::Dense(values) => {
            if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidProbability { index, value: *v });
            }
            let sum = compensated_sum(values.iter().copied());
            if (sum - 1.0).abs() > FILE_SUM_TOL {
                return Err(Error::NotNormalized { sum, tolerance: FILE_SUM_TOL });
            }
            KeyDistribution::new(doc.key_length, values.iter().map(|v| T::lit(v / sum)).collect())
        }
    }
}

pub fn load_distribution<T: Scalar>(path: &Path) -> Result<KeyDistribution<T>> {
    let text = fs::read_to_string(path)?;
    parse_distribution(&text, &path.display().to_string())
}

/// Serializes a distribution; an exactly uniform table is written as `"uniform"`.
pub fn distribution_to_json<T: Scalar>(p: &KeyDistribution<T>) -> String {
    let probs = if p.is_uniform(T::zero()) {
        Probs::Named("uniform".into())
    } else {
        Probs::Dense(p.probs().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
    };
    let doc = DistributionDoc { key_length: p.key_length(), probs };
    let mut s = serde_json::to_string_pretty(&doc).expect("distribution serializes");
    s.push('\n');
    s
}

/// Parses an ensemble document; relative distribution paths resolve against `base_dir`.
pub fn parse_ensemble<T: Scalar>(text: &str, origin: &str, base_dir: &Path) -> Result<DistanceEnsemble<T>> {
    let doc: EnsembleDoc = serde_json::from_str(text).map_err(|e| malformed(origin, e))?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (i, e) in doc.entries.into_iter().enumerate() {
        let weight = T::lit(e.weight);
        let entry = match (e.distance, e.distribution) {
            (distance, Some(rel)) => {
                let p = load_distribution::<T>(&base_dir.join(&rel))?;
                let mut entry = EnsembleEntry::with_distribution(weight, p);
                if let Some(d) = distance {
                    entry.distance = T::lit(d);
                }
                entry
            }
            (Some(d), None) => EnsembleEntry::new(weight, T::lit(d)),
            (None, None) => return Err(malformed(origin, format!("entry {i} has neither distance nor distribution"))),
        };
        entries.push(entry);
    }
    DistanceEnsemble::new(entries)
}

pub fn load_ensemble<T: Scalar>(path: &Path) -> Result<DistanceEnsemble<T>> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_ensemble(&text, &path.display().to_string(), base)
}

/// Serializes the `(weight, distance)` pairs of an ensemble.
pub fn ensemble_to_json<T: Scalar>(e: &DistanceEnsemble<T>) -> String {
    let doc = EnsembleDoc {
        entries: e
            .entries()
            .iter()
            .map(|x| EnsembleEntryDoc {
                weight: x.weight.to_f64().unwrap_or(f64::NAN),
                distance: x.distance.to_f64(),
                distribution: None,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("ensemble serializes");
    s.push('\n');
    s
}
