//! Group spec files.
//!
//! A JSON document; big integers are decimal strings:
//!
//! ```json
//! {
//!   "degree": 2,
//!   "poly_coeffs": ["-1", "-1", "1"],
//!   "torsion_orders": [2],
//!   "unit_rank": 1,
//!   "action_matrices": [
//!     [["-1", "0"], ["0", "-1"]],
//!     [["0", "1"], ["1", "1"]]
//!   ]
//! }
//! ```
//!
//! `poly_coeffs` runs from the constant term up. `action_matrices` lists the
//! torsion generators first, in generating-sequence order. Commutator weights
//! are not stored; they are recomputed on load.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{GroupSpec, IntMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecFile {
    pub degree: usize,
    pub poly_coeffs: Vec<String>,
    pub torsion_orders: Vec<u32>,
    pub unit_rank: usize,
    pub action_matrices: Vec<Vec<Vec<String>>>,
}

fn parse_int(s: &str) -> std::result::Result<BigInt, String> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| format!("bad integer {s:?}: {e}"))
}

impl GroupSpecFile {
    pub fn from_spec(spec: &GroupSpec) -> Self {
        GroupSpecFile {
            degree: spec.degree(),
            poly_coeffs: spec.poly_coeffs().iter().map(|c| c.to_string()).collect(),
            torsion_orders: spec.torsion_orders().to_vec(),
            unit_rank: spec.unit_rank(),
            action_matrices: spec
                .action_matrices()
                .iter()
                .map(|m| {
                    m.rows()
                        .into_iter()
                        .map(|r| r.into_iter().map(|x| x.to_string()).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_spec(self) -> Result<GroupSpec> {
        let poly = self
            .poly_coeffs
            .iter()
            .map(|s| parse_int(s))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(Error::InvalidGroup)?;
        let mut matrices = Vec::with_capacity(self.action_matrices.len());
        for (i, rows) in self.action_matrices.into_iter().enumerate() {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|s| parse_int(s)).collect())
                .collect::<std::result::Result<Vec<Vec<_>>, _>>()
                .map_err(Error::InvalidGroup)?;
            let m = IntMatrix::from_rows(rows)
                .ok_or_else(|| Error::InvalidGroup(format!("action matrix {i} is not square")))?;
            matrices.push(m);
        }
        GroupSpec::new(
            self.degree,
            poly,
            self.torsion_orders,
            self.unit_rank,
            matrices,
        )
    }
}

pub fn group_spec_to_string(spec: &GroupSpec) -> String {
    serde_json::to_string_pretty(&GroupSpecFile::from_spec(spec)).expect("serializable") + "\n"
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let file: GroupSpecFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidGroup(e.to_string()))?;
    file.into_spec()
}

/// Reads and validates a group spec file.
pub fn load_group_spec(path: impl AsRef<Path>) -> Result<GroupSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GroupSpecFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
    file.into_spec()
}

pub fn save_group_spec(spec: &GroupSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, group_spec_to_string(spec)).map_err(|e| Error::io(path, e))
}
