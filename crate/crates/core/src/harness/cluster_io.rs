//! JSON cluster files, the wire format between `forward` and `invert`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inversion::{InversionError, MeasuredCluster};
use crate::spectral::{FrequencyIndex, SpectralError};

#[derive(Debug, Error)]
pub enum ClusterFileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: file must carry either labeled roots or a bare root list")]
    MissingRoots { path: PathBuf },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Inversion(#[from] InversionError),
}

/// Serialized cluster. Either the labeled form (`interlaced` + `extra`)
/// or a bare `roots` list; labeled wins when both are present.
#[derive(Debug, Serialize, Deserialize)]
pub struct ClusterFile {
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interlaced: Option<Vec<f64>>,
    /// Two [re, im] pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<[[f64; 2]; 2]>,
    /// Unlabeled [re, im] pairs; labeling is inferred on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<[f64; 2]>>,
}

impl ClusterFile {
    pub fn from_measured(cluster: &MeasuredCluster) -> Self {
        let (z1, z2) = cluster.extra_roots();
        ClusterFile {
            k: cluster.frequency().get(),
            interlaced: Some(cluster.interlaced().to_vec()),
            extra: Some([[z1.re, z1.im], [z2.re, z2.im]]),
            roots: None,
        }
    }

    pub fn into_measured(self, path: &Path) -> Result<MeasuredCluster, ClusterFileError> {
        let k = FrequencyIndex::new(self.k)?;
        match (self.interlaced, self.extra, self.roots) {
            (Some(interlaced), Some(extra), _) => {
                let z1 = Complex64::new(extra[0][0], extra[0][1]);
                let z2 = Complex64::new(extra[1][0], extra[1][1]);
                Ok(MeasuredCluster::new(k, interlaced, (z1, z2))?)
            }
            (_, _, Some(roots)) => {
                let roots: Vec<Complex64> = roots
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                Ok(MeasuredCluster::from_roots(k, &roots)?)
            }
            _ => Err(ClusterFileError::MissingRoots {
                path: path.to_path_buf(),
            }),
        }
    }
}

pub fn write_cluster(path: &Path, cluster: &MeasuredCluster) -> Result<(), ClusterFileError> {
    let file = ClusterFile::from_measured(cluster);
    let text = serde_json::to_string_pretty(&file).expect("cluster serializes");
    std::fs::write(path, text + "\n").map_err(|source| ClusterFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_cluster(path: &Path) -> Result<MeasuredCluster, ClusterFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ClusterFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ClusterFile =
        serde_json::from_str(&text).map_err(|source| ClusterFileError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    file.into_measured(path)
}
