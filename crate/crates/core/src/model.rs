//! Tagged model container for serialization and prediction dispatch.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Points;
use crate::error::Result;
use crate::kernel::KernelModel;
use crate::linear::LinearModel;

/// Either fitted model kind, serialized as a JSON document with a `"type"`
/// tag of `"linear"` or `"kernel"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Model {
    Linear(LinearModel),
    Kernel(KernelModel),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.dim(),
            Model::Kernel(m) => m.dim(),
        }
    }

    /// Signed prediction value; the sign classifies (zero counts positive).
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Kernel(m) => m.predict(x),
        }
    }

    pub fn predict_batch(&self, points: &Points) -> Result<Vec<f64>> {
        match self {
            Model::Linear(m) => m.predict_batch(points),
            Model::Kernel(m) => m.predict_batch(points),
        }
    }

    /// Write the model as pretty-printed JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut writer = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        Ok(())
    }

    /// Load and validate a model JSON document.
    pub fn load(path: &Path) -> Result<Model> {
        let reader = BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(reader)?)
    }
}

impl From<LinearModel> for Model {
    fn from(m: LinearModel) -> Self {
        Model::Linear(m)
    }
}

impl From<KernelModel> for Model {
    fn from(m: KernelModel) -> Self {
        Model::Kernel(m)
    }
}

/// Write prediction values with their classes: a `value,class` CSV, one row
/// per query point, classes as ±1 (zero counting positive).
pub fn write_predictions_csv(values: &[f64], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["value", "class"])?;
    for v in values {
        writer.write_record(&[v.to_string(), crate::dataset::Label::from_sign(*v).to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
