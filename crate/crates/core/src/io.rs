//! JSON file formats: single states and ensembles.
//!
//! State file:
//! `{"dims":[dA,dB], "matrix_re":[[..],..], "matrix_im":[[..],..]}`; the
//! matrices may also be given flat in row-major order and `matrix_im` may be
//! omitted for real states.
//!
//! Ensemble file:
//! `{"dims":[dA,dB], "components":[{"weight":w, "type":"pure"|"mixed", "data":[..]}]}`.
//! Each `data` entry is either a real number or a `[re, im]` pair. Pure data
//! holds `dA·dB` amplitudes; mixed data holds the `(dA·dB)²` matrix entries in
//! row-major order. A mixed component may carry `"decomposition"`, a list of
//! `{"weight":q, "data":[..]}` pure states that average to it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{Component, ComponentState, Ensemble};
use crate::error::{Error, Result};
use crate::matrix::{validate_density, ComplexMatrix, DensityOperator, PureState, C64};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealMatrix {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl RealMatrix {
    fn flatten(&self) -> Vec<f64> {
        match self {
            RealMatrix::Rows(rows) => rows.iter().flatten().copied().collect(),
            RealMatrix::Flat(v) => v.clone(),
        }
    }
}

/// On-disk form of a bipartite density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub matrix_re: RealMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_im: Option<RealMatrix>,
}

impl StateFile {
    pub fn from_density(rho: &DensityOperator) -> Self {
        let d = rho.dim();
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| {
            (0..d)
                .map(|i| (0..d).map(|j| f(&m[(i, j)])).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        Self {
            dims: [rho.dim_a(), rho.dim_b()],
            matrix_re: RealMatrix::Rows(rows(|z| z.re)),
            matrix_im: Some(RealMatrix::Rows(rows(|z| z.im))),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let [da, db] = self.dims;
        let d = da * db;
        let re = self.matrix_re.flatten();
        if re.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: re.len(),
            });
        }
        let im = self.matrix_im.as_ref().map(RealMatrix::flatten);
        let m = ComplexMatrix::from_parts(d, d, &re, im.as_deref())?;
        validate_density(m, da, db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn value(&self) -> C64 {
        match *self {
            Scalar::Real(r) => C64::new(r, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentType {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurePart {
    pub weight: f64,
    pub data: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub weight: f64,
    #[serde(rename = "type")]
    pub kind: ComponentType,
    pub data: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<PurePart>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dims: [usize; 2],
    pub components: Vec<ComponentFile>,
}

fn values(data: &[Scalar]) -> Vec<C64> {
    data.iter().map(Scalar::value).collect()
}

impl EnsembleFile {
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let [da, db] = self.dims;
        let d = da * db;
        let components = self
            .components
            .iter()
            .map(|c| {
                let state = match c.kind {
                    ComponentType::Pure => ComponentState::Pure(PureState::new(values(&c.data), da, db)?),
                    ComponentType::Mixed => {
                        let m = ComplexMatrix::new(d, d, values(&c.data))?;
                        let state = validate_density(m, da, db)?;
                        let decomposition = c
                            .decomposition
                            .as_ref()
                            .map(|parts| {
                                parts
                                    .iter()
                                    .map(|p| Ok((p.weight, PureState::new(values(&p.data), da, db)?)))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .transpose()?;
                        ComponentState::Mixed {
                            state,
                            decomposition,
                        }
                    }
                };
                Ok(Component::new(c.weight, state))
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(components)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_state(path: &Path) -> std::result::Result<DensityOperator, IoError> {
    let file: StateFile = read_json(path)?;
    Ok(file.to_density()?)
}

pub fn read_ensemble(path: &Path) -> std::result::Result<Ensemble, IoError> {
    let file: EnsembleFile = read_json(path)?;
    Ok(file.to_ensemble()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{ensemble_average, formation_point};
    use crate::families::{bell_mixture, classically_correlated};

    #[test]
    fn state_round_trip_is_exact() {
        let rho = bell_mixture(0.3).unwrap();
        let text = serde_json::to_string(&StateFile::from_density(&rho)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_density().unwrap().matrix(), rho.matrix());
    }

    #[test]
    fn flat_real_state() {
        let text = r#"{"dims":[2,2],"matrix_re":[0.5,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0.5]}"#;
        let f: StateFile = serde_json::from_str(text).unwrap();
        let rho = f.to_density().unwrap();
        assert_eq!(rho, classically_correlated(&[0.5, 0.5]).unwrap());
    }

    #[test]
    fn invalid_state_reports_invariant() {
        let text = r#"{"dims":[2,2],"matrix_re":[[0.45,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0.45]]}"#;
        let f: StateFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.to_density().unwrap_err().to_string(), "TraceNotOne residual=0.1");
        let text = r#"{"dims":[2,2],"matrix_re":[[1,0],[0,0]]}"#;
        let f: StateFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_density(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ensemble_schema() {
        let h = 1.0 / 2f64.sqrt();
        let text = format!(
            r#"{{"dims":[2,2],"components":[
                {{"weight":0.5,"type":"mixed","data":[0.5,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0.5],
                  "decomposition":[{{"weight":0.5,"data":[1,0,0,0]}},{{"weight":0.5,"data":[0,0,0,1]}}]}},
                {{"weight":0.5,"type":"pure","data":[{h},0,0,[{m},0]]}}
            ]}}"#,
            h = h,
            m = -h
        );
        let f: EnsembleFile = serde_json::from_str(&text).unwrap();
        let e = f.to_ensemble().unwrap();
        let avg = ensemble_average(&e).unwrap();
        assert!(avg.matrix().max_abs_diff(bell_mixture(0.25).unwrap().matrix()) < 1e-12);
        let pt = formation_point(&e).unwrap();
        assert!((pt.q - 0.5).abs() < 1e-12 && (pt.i - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ensemble_with_bad_weights_is_rejected() {
        let text = r#"{"dims":[2,2],"components":[{"weight":0.4,"type":"pure","data":[1,0,0,0]}]}"#;
        let f: EnsembleFile = serde_json::from_str(text).unwrap();
        assert!(f.to_ensemble().is_err());
    }
}
