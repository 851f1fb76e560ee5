//! JSON form of a [`HypersurfaceState`], with an append-only provenance log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base_case::{Dims, HypersurfaceState, ParamSettings, ParamValue};
use crate::coeff::{CoeffError, CoeffRing};
use crate::poly::{parse_poly, PolyError, SparsePoly, VarUniverse};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateFileError {
    #[error("malformed state file: {0}")]
    Json(String),
    #[error("unsupported schema_version {0}")]
    Schema(u32),
    #[error("field `{field}`: {err}")]
    Poly { field: String, err: PolyError },
    #[error("parameter `{0}` must be \"symbolic\" or an integer")]
    Param(String),
    #[error("coefficient table: {0}")]
    Table(String),
    #[error("e has length {got}, expected {want}")]
    ELength { want: usize, got: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamJson {
    Value(u64),
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateFile {
    pub schema_version: u32,
    pub p: u64,
    pub dims: Dims,
    pub params: BTreeMap<String, ParamJson>,
    pub f0: String,
    pub a0: String,
    /// Keys `"i,j"` for `1 <= i <= m`, `1 <= j <= r + 1`.
    pub a: BTreeMap<String, String>,
    pub e: Vec<u32>,
    pub h_poly: String,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

impl StateFile {
    pub fn from_state(state: &HypersurfaceState, provenance: Vec<Provenance>) -> Self {
        let params = state
            .ring
            .params()
            .names()
            .iter()
            .map(|name| {
                let v = match state.params.get(name) {
                    ParamValue::Symbolic => ParamJson::Word("symbolic".into()),
                    ParamValue::Value(v) => ParamJson::Value(v),
                };
                (name.clone(), v)
            })
            .collect();
        let mut a = BTreeMap::new();
        for (i0, row) in state.a.iter().enumerate() {
            for (j0, c) in row.iter().enumerate() {
                a.insert(format!("{},{}", i0 + 1, j0 + 1), c.canonical_string());
            }
        }
        Self {
            schema_version: SCHEMA_VERSION,
            p: state.ring.modulus(),
            dims: state.dims,
            params,
            f0: state.f0.canonical_string(),
            a0: state.a0.canonical_string(),
            a,
            e: state.e.clone(),
            h_poly: state.h_poly.canonical_string(),
            provenance,
        }
    }

    pub fn to_state(&self) -> Result<HypersurfaceState, StateFileError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(StateFileError::Schema(self.schema_version));
        }
        let Dims { n, m, r, s, .. } = self.dims;
        let ring = CoeffRing::standard(self.p)?;
        let vars = VarUniverse::standard(n as usize, r as usize, s as usize, false);
        let parse = |field: &str, text: &str| -> Result<SparsePoly, StateFileError> {
            parse_poly(text, &vars, &ring).map_err(|err| StateFileError::Poly { field: field.to_string(), err })
        };
        let mut params = ParamSettings::symbolic();
        for (name, v) in &self.params {
            if ring.params().index_of(name).is_none() {
                return Err(StateFileError::Param(name.clone()));
            }
            match v {
                ParamJson::Value(x) => params.set(name, ParamValue::Value(x % self.p)),
                ParamJson::Word(w) if w == "symbolic" => {}
                ParamJson::Word(_) => return Err(StateFileError::Param(name.clone())),
            }
        }
        let expected = (m as usize) * (r as usize + 1);
        if self.a.len() != expected {
            return Err(StateFileError::Table(format!("{} entries, expected {expected}", self.a.len())));
        }
        let mut a = Vec::with_capacity(m as usize);
        for i in 1..=m {
            let mut row = Vec::with_capacity(r as usize + 1);
            for j in 1..=r + 1 {
                let key = format!("{i},{j}");
                let text = self.a.get(&key).ok_or_else(|| StateFileError::Table(format!("missing key {key}")))?;
                row.push(parse(&format!("a.{key}"), text)?);
            }
            a.push(row);
        }
        if self.e.len() != r as usize {
            return Err(StateFileError::ELength { want: r as usize, got: self.e.len() });
        }
        Ok(HypersurfaceState {
            f0: parse("f0", &self.f0)?,
            a0: parse("a0", &self.a0)?,
            h_poly: parse("h_poly", &self.h_poly)?,
            a,
            e: self.e.clone(),
            dims: self.dims,
            params,
            ring: ring.clone(),
            vars: vars.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, StateFileError> {
        serde_json::from_str(text).map_err(|e| StateFileError::Json(e.to_string()))
    }

    /// Replace the state, keep the log and append `entry` to it.
    pub fn advance(&self, state: &HypersurfaceState, entry: Provenance) -> Self {
        let mut log = self.provenance.clone();
        log.push(entry);
        Self::from_state(state, log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_case::{build_base_state, BaseParams, HChoice};
    use crate::double_cone::induct_step;

    fn base() -> HypersurfaceState {
        build_base_state(&BaseParams::new(3, 2, 6, 5, 101).unwrap(), HChoice::Auto).unwrap()
    }

    #[test]
    fn roundtrip_base_and_induced() {
        let st = base();
        let file = StateFile::from_state(&st, vec![Provenance { op: "construct base".into(), seed: None, detail: String::new() }]);
        let back = StateFile::from_json(&file.to_json()).unwrap().to_state().unwrap();
        assert_eq!(back, st);
        let next = induct_step(&st, 1).unwrap();
        let file2 = file.advance(&next, Provenance { op: "induct".into(), seed: None, detail: "j=1".into() });
        assert_eq!(file2.provenance.len(), 2);
        assert_eq!(file2.provenance[0], file.provenance[0]);
        assert_eq!(StateFile::from_json(&file2.to_json()).unwrap().to_state().unwrap(), next);
    }

    #[test]
    fn pinned_params_roundtrip() {
        let mut st = base();
        st.params.set("rho", ParamValue::Value(7));
        let text = StateFile::from_state(&st, vec![]).to_json();
        assert!(text.contains("\"rho\": 7"));
        assert!(text.contains("\"pi\": \"symbolic\""));
        assert_eq!(StateFile::from_json(&text).unwrap().to_state().unwrap().params, st.params);
    }

    #[test]
    fn malformed_inputs() {
        let file = StateFile::from_state(&base(), vec![]);
        let mut bad = file.clone();
        bad.f0 = "x0^2 +* x1".into();
        assert!(matches!(bad.to_state(), Err(StateFileError::Poly { .. })));
        let mut bad = file.clone();
        bad.e.pop();
        assert_eq!(bad.to_state().unwrap_err(), StateFileError::ELength { want: 6, got: 5 });
        let mut bad = file.clone();
        bad.a.remove("1,1");
        assert!(matches!(bad.to_state(), Err(StateFileError::Table(_))));
        let mut bad = file;
        bad.params.insert("pi".into(), ParamJson::Word("sym".into()));
        assert_eq!(bad.to_state().unwrap_err(), StateFileError::Param("pi".into()));
        assert!(StateFile::from_json("{").is_err());
    }
}
