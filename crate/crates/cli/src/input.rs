//! Reading and digesting input files.

use std::path::Path;

use matrange_core::compactmodel::CompactModelJson;
use matrange_core::sdp::{SdpInstance, SdpInstanceJson};
use matrange_core::tuples::TupleJson;
use matrange_core::{CompactModel, Error, MatrixTuple, Polytope, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::report::InputDigest;

pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn new() -> Self {
        Inputs { digests: Vec::new() }
    }

    fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        self.digests.push(InputDigest { role: role.to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        Ok(bytes)
    }

    fn parse<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Result<T> {
        let bytes = self.read(role, path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }

    pub fn tuple(&mut self, role: &str, path: &Path) -> Result<MatrixTuple> {
        let j: TupleJson = self.parse(role, path)?;
        MatrixTuple::from_json(&j)
    }

    pub fn polytope(&mut self, role: &str, path: &Path) -> Result<Polytope> {
        let p: Polytope = self.parse(role, path)?;
        p.validated()
    }

    /// A point list: `{"eigenvalues": …}`, `{"points": …}`, a polytope's
    /// `vertices`, or a bare array. Repeats are kept.
    pub fn points(&mut self, role: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
        let v: Value = self.parse(role, path)?;
        let list = ["eigenvalues", "points", "vertices"].iter().find_map(|k| v.get(*k).cloned()).unwrap_or(v);
        serde_json::from_value(list).map_err(|e| Error::Input(format!("{}: expected a list of points: {e}", path.display())))
    }

    /// A compact model, or a plain tuple read as a model without zeros.
    pub fn model(&mut self, role: &str, path: &Path) -> Result<CompactModel> {
        let v: Value = self.parse(role, path)?;
        if v.get("blocks").is_some() {
            let j: CompactModelJson = serde_json::from_value(v).map_err(|e| Error::Input(e.to_string()))?;
            return CompactModel::from_json(&j);
        }
        let j: TupleJson = serde_json::from_value(v).map_err(|e| Error::Input(e.to_string()))?;
        let t = MatrixTuple::from_json(&j)?;
        CompactModel::new(vec![matrange_core::compactmodel::ModelBlock { tuple: t, multiplicity: 1 }], matrange_core::ZeroSummand::None, None)
    }

    pub fn sdp(&mut self, role: &str, path: &Path) -> Result<SdpInstance> {
        let j: SdpInstanceJson = self.parse(role, path)?;
        SdpInstance::from_json(&j)
    }
}
