use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::MTSample;
use crate::error::{Error, Result};

/// Key of the inert-carrier (nitrogen) representation.
pub const NONE_KEY: &str = "None";

/// Analyte name to latent vector. Must contain [`NONE_KEY`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub entries: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, entries: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let table = EmbeddingTable { dim, entries };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::arg("embedding dimension must be positive"));
        }
        if !self.entries.contains_key(NONE_KEY) {
            return Err(Error::Lookup(NONE_KEY.into()));
        }
        for (name, v) in &self.entries {
            if v.len() != self.dim {
                return Err(Error::arg(format!("entry {name} has length {} (dim {})", v.len(), self.dim)));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::arg(format!("entry {name} is not finite")));
            }
        }
        Ok(())
    }

    /// Two-dimensional table: "None" at the origin and the analytes spaced
    /// evenly on the unit circle starting at angle 0.
    pub fn unit_circle(analytes: &[String]) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(NONE_KEY.to_string(), vec![0.0, 0.0]);
        let a = analytes.len().max(1) as f64;
        for (i, name) in analytes.iter().enumerate() {
            let angle = std::f64::consts::TAU * i as f64 / a;
            entries.insert(name.clone(), vec![angle.cos(), angle.sin()]);
        }
        EmbeddingTable { dim: 2, entries }
    }

    pub fn get(&self, name: &str) -> Result<&[f64]> {
        self.entries
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    }

    /// Position of `name` in key order.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.entries
            .keys()
            .position(|k| k == name)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    }

    pub fn vectors(&self) -> Vec<&[f64]> {
        self.entries.values().map(Vec::as_slice).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    /// Entry closest to `e` in Euclidean distance; first key wins ties.
    pub fn nearest(&self, e: &[f64]) -> &str {
        let mut best = ("", f64::INFINITY);
        for (name, v) in &self.entries {
            let d = sq_dist(e, v);
            if d < best.1 {
                best = (name, d);
            }
        }
        best.0
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse {
            what: "embedding table".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: EmbeddingTable = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "embedding table".into(),
            message: e.to_string(),
        })?;
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-step targets for one exposure.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSequence {
    /// `targets[t]` is the latent vector the embedding should reach at `t`.
    pub targets: Vec<Vec<f64>>,
    /// Table index (key order) of each step's target.
    pub labels: Vec<usize>,
    pub onset: usize,
}

impl TargetSequence {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// "None" before flux onset, the exposure analyte's vector from the onset on.
/// Blank exposures stay at "None" throughout.
pub fn build_target_sequence(
    sample: &MTSample,
    table: &EmbeddingTable,
    analyte_names: &[String],
) -> Result<TargetSequence> {
    if sample.concentrations.len() != analyte_names.len() {
        return Err(Error::arg(format!(
            "sample {}: {} concentrations for {} analytes",
            sample.id,
            sample.concentrations.len(),
            analyte_names.len()
        )));
    }
    let exposed = sample.exposed_analytes();
    if exposed.len() > 1 {
        return Err(Error::UnsupportedInput(format!(
            "sample {} is a mixture of {} analytes",
            sample.id,
            exposed.len()
        )));
    }
    let none = table.get(NONE_KEY)?.to_vec();
    let none_idx = table.index_of(NONE_KEY)?;
    let (active, active_idx) = match exposed.first() {
        Some(&a) => {
            let name = &analyte_names[a];
            (table.get(name)?.to_vec(), table.index_of(name)?)
        }
        None => (none.clone(), none_idx),
    };
    let t = sample.len();
    let onset = sample.onset_index.min(t);
    let mut targets = Vec::with_capacity(t);
    let mut labels = Vec::with_capacity(t);
    for step in 0..t {
        if step < onset {
            targets.push(none.clone());
            labels.push(none_idx);
        } else {
            targets.push(active.clone());
            labels.push(active_idx);
        }
    }
    Ok(TargetSequence { targets, labels, onset })
}
