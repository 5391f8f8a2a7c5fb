//! Experiment driver: forward cluster reports, file-based inversion,
//! and the full reconstruction sweep with CSV/JSONL outputs.
//!
//! Sweep outputs are deterministic for a fixed configuration: the grid
//! is walked in a fixed order, seeds are assigned by grid position, and
//! wall-clock timings go to a separate `run_info.txt` so the data files
//! stay byte-identical across runs.

pub mod cluster_io;
pub mod config;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use cluster_io::{read_cluster, write_cluster, ClusterFile, ClusterFileError};
pub use config::{ConfigError, ExperimentConfig};

use crate::inversion::{invert, InversionError, MeasuredCluster, ReconstructionResult};
use crate::noise::{perturb_cluster, NoiseSpec};
use crate::relaxation::EbmModel;
use crate::spectral::{
    compute_cluster, extra_pair_localized, interlacing_holds, secular_residual, Cluster,
    FrequencyIndex, SpectralError,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Inversion(#[from] InversionError),
    #[error(transparent)]
    ClusterFile(#[from] ClusterFileError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
// forward

/// Cluster computation plus the checks a measurement report cares about.
#[derive(Debug)]
pub struct ForwardReport {
    pub model: EbmModel,
    pub cluster: Cluster,
    pub interlacing_ok: bool,
    pub secular_residuals: Vec<f64>,
    pub localization_ok: bool,
}

pub fn run_forward(
    model: &EbmModel,
    k: FrequencyIndex,
    tol: f64,
) -> Result<ForwardReport, SpectralError> {
    let cluster = compute_cluster(model, k, tol)?;
    let secular_residuals = cluster
        .real_roots()
        .iter()
        .map(|&a| secular_residual(model, k, a).unwrap_or(f64::NAN))
        .collect();
    Ok(ForwardReport {
        interlacing_ok: interlacing_holds(model, &cluster),
        localization_ok: extra_pair_localized(model, &cluster),
        secular_residuals,
        model: model.clone(),
        cluster,
    })
}

impl std::fmt::Display for ForwardReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = self.cluster.frequency();
        let (h, regime) = self.model.modulus_h();
        writeln!(
            f,
            "model: N={} D={} h={:.6} ({})",
            self.model.dimension(),
            self.model.d(),
            h,
            regime
        )?;
        writeln!(f, "k={} eta={}", k, k.eta())?;
        writeln!(f, "interlaced eigenvalues (descending):")?;
        for (j, a) in self.cluster.real_roots().iter().enumerate() {
            writeln!(f, "  a_{} = {:.12e}", j + 1, a)?;
        }
        let (z1, z2) = self.cluster.extra_roots();
        if z1.im == 0.0 {
            writeln!(f, "extra pair (real): {:.12e}, {:.12e}", z1.re, z2.re)?;
        } else {
            writeln!(f, "extra pair: {:.12e} ± {:.12e}i", z1.re, z1.im)?;
        }
        let max_secular = self
            .secular_residuals
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        writeln!(
            f,
            "interlacing: {}",
            if self.interlacing_ok { "PASS" } else { "FAIL" }
        )?;
        writeln!(f, "max secular residual: {max_secular:.3e}")?;
        write!(
            f,
            "extra-root localization: {}",
            if self.localization_ok { "PASS" } else { "FAIL" }
        )
    }
}

// ---------------------------------------------------------------------------
// invert

/// File-level inversion entry point.
pub fn run_invert(
    c1: &MeasuredCluster,
    c2: &MeasuredCluster,
    tol: f64,
) -> Result<ReconstructionResult, InversionError> {
    invert(c1, c2, tol)
}

pub fn format_reconstruction(result: &ReconstructionResult) -> String {
    let mut out = String::new();
    let n = result.r_inv.len();
    let _ = writeln!(out, "recovered dimension: {n}");
    for j in 0..n {
        let _ = writeln!(
            out,
            "  r_{} = {:.12}   b_{} = {:.12}",
            j + 1,
            result.r_inv[j],
            j + 1,
            result.b_inv[j]
        );
    }
    let _ = writeln!(out, "D (characteristic equation) = {:.12}", result.d_inv);
    let _ = writeln!(
        out,
        "D (glassy route)            = {:.12}",
        result.d_inv_glassy
    );
    let _ = writeln!(
        out,
        "last rate cross-check (Vieta) = {:.12}",
        result.diagnostics.last_rate_vieta
    );
    let _ = write!(
        out,
        "characteristic residual       = {:.3e}",
        result.diagnostics.charpoly_residual
    );
    out
}

// ---------------------------------------------------------------------------
// experiment sweep

#[derive(Debug, Serialize, Clone)]
struct ClusterRecord {
    k: u32,
    interlaced: Vec<f64>,
    extra: [[f64; 2]; 2],
}

impl ClusterRecord {
    fn from_measured(cluster: &MeasuredCluster) -> Self {
        let (z1, z2) = cluster.extra_roots();
        ClusterRecord {
            k: cluster.frequency().get(),
            interlaced: cluster.interlaced().to_vec(),
            extra: [[z1.re, z1.im], [z2.re, z2.im]],
        }
    }
}

#[derive(Debug, Serialize)]
struct ResultRecord {
    r_inv: Vec<f64>,
    b_inv: Vec<f64>,
    d_inv: f64,
    d_inv_glassy: f64,
    last_rate_vieta: f64,
    charpoly_residual: f64,
    q_residuals: Vec<f64>,
    rate_brackets: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
struct RelativeErrors {
    r: Vec<f64>,
    b: Vec<f64>,
    d: f64,
}

#[derive(Debug, Serialize)]
struct GridRecord {
    n: usize,
    d_true: f64,
    k1: u32,
    k2: u32,
    delta: f64,
    seed: u64,
    noise_mode: String,
    normalize_h: bool,
    rates_true: Vec<f64>,
    weights_true: Vec<f64>,
    h_true: f64,
    regime: String,
    exact_k1: Option<ClusterRecord>,
    exact_k2: Option<ClusterRecord>,
    measured_k1: Option<ClusterRecord>,
    measured_k2: Option<ClusterRecord>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<ResultRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_err: Option<RelativeErrors>,
}

/// One (D, δ) table row: the reconstructed modulus per frequency pair,
/// produced with the first configured seed.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub d_true: f64,
    pub delta: f64,
    pub d_inv: Vec<Option<f64>>,
}

#[derive(Debug)]
pub struct ExperimentSummary {
    pub grid_points: usize,
    pub failures: usize,
    pub table: Vec<TableRow>,
    pub out_dir: PathBuf,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary, HarnessError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|source| HarnessError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let started = Instant::now();

    // forward solves depend only on (D, k); share them across the grid
    let mut forward: HashMap<(usize, u32), Result<Cluster, String>> = HashMap::new();
    let mut cluster_for =
        |d_idx: usize, k: u32, config: &ExperimentConfig| -> Result<Cluster, String> {
            forward
                .entry((d_idx, k))
                .or_insert_with(|| {
                    let model = config
                        .model_for(config.d_values[d_idx])
                        .map_err(|e| format!("forward: {e}"))?;
                    let freq = FrequencyIndex::new(k).map_err(|e| format!("forward: {e}"))?;
                    compute_cluster(&model, freq, config.bisect_tol)
                        .map_err(|e| format!("forward: {e}"))
                })
                .clone()
        };

    let mut records: Vec<GridRecord> = Vec::new();
    let mut timings: Vec<(usize, u128)> = Vec::new();
    let mut failures = 0usize;

    for (d_idx, &d) in config.d_values.iter().enumerate() {
        for &delta in &config.deltas {
            for &(k1, k2) in &config.k_pairs {
                for &seed in &config.seeds {
                    let row_start = Instant::now();
                    let model = config.model_for(d).expect("validated config");
                    let (h, regime) = model.modulus_h();
                    let mut record = GridRecord {
                        n: config.n,
                        d_true: model.d(),
                        k1,
                        k2,
                        delta,
                        seed,
                        noise_mode: config.noise_mode.to_string(),
                        normalize_h: config.normalize_h,
                        rates_true: model.rates().to_vec(),
                        weights_true: model.weights().to_vec(),
                        h_true: h,
                        regime: regime.to_string(),
                        exact_k1: None,
                        exact_k2: None,
                        measured_k1: None,
                        measured_k2: None,
                        status: "ok".into(),
                        error: None,
                        result: None,
                        rel_err: None,
                    };

                    let outcome = (|| -> Result<(), String> {
                        let exact1 = cluster_for(d_idx, k1, config)?;
                        let exact2 = cluster_for(d_idx, k2, config)?;
                        record.exact_k1 = Some(ClusterRecord::from_measured(
                            &MeasuredCluster::from_cluster(&exact1),
                        ));
                        record.exact_k2 = Some(ClusterRecord::from_measured(
                            &MeasuredCluster::from_cluster(&exact2),
                        ));
                        let spec = NoiseSpec::new(delta, seed, config.noise_mode)
                            .map_err(|e| format!("noise: {e}"))?;
                        // one spec for both clusters: the same factor
                        // sequence perturbs paired eigenvalues coherently
                        let measured1 = perturb_cluster(&exact1, &spec);
                        let measured2 = perturb_cluster(&exact2, &spec);
                        record.measured_k1 = Some(ClusterRecord::from_measured(&measured1));
                        record.measured_k2 = Some(ClusterRecord::from_measured(&measured2));
                        let result = invert(&measured1, &measured2, config.bisect_tol)
                            .map_err(|e| format!("invert: {e}"))?;
                        let rel = RelativeErrors {
                            r: result
                                .r_inv
                                .iter()
                                .zip(model.rates())
                                .map(|(got, want)| (got - want).abs() / want.abs())
                                .collect(),
                            b: result
                                .b_inv
                                .iter()
                                .zip(model.weights())
                                .map(|(got, want)| (got - want).abs() / want.abs())
                                .collect(),
                            d: (result.d_inv - model.d()).abs() / model.d().abs(),
                        };
                        record.result = Some(ResultRecord {
                            r_inv: result.r_inv.clone(),
                            b_inv: result.b_inv.clone(),
                            d_inv: result.d_inv,
                            d_inv_glassy: result.d_inv_glassy,
                            last_rate_vieta: result.diagnostics.last_rate_vieta,
                            charpoly_residual: result.diagnostics.charpoly_residual,
                            q_residuals: result.diagnostics.q_residuals.clone(),
                            rate_brackets: result.diagnostics.rate_brackets.clone(),
                        });
                        record.rel_err = Some(rel);
                        Ok(())
                    })();

                    if let Err(message) = outcome {
                        failures += 1;
                        record.status = "error".into();
                        record.error = Some(message);
                    }
                    timings.push((records.len(), row_start.elapsed().as_micros()));
                    records.push(record);
                }
            }
        }
    }

    let table = build_table(config, &records);
    write_file(
        &config.out_dir.join("d_table.csv"),
        &render_d_table(config, &table),
    )?;
    write_file(
        &config.out_dir.join("params.csv"),
        &render_params_csv(&records),
    )?;
    write_file(
        &config.out_dir.join("records.jsonl"),
        &render_jsonl(&records),
    )?;

    let mut info = String::new();
    let _ = writeln!(
        info,
        "# run started {:?}, wall clock per grid point below",
        std::time::SystemTime::now()
    );
    let _ = writeln!(info, "grid_points = {}", records.len());
    let _ = writeln!(info, "failures = {failures}");
    for (row, micros) in &timings {
        let _ = writeln!(info, "row {row} elapsed_us {micros}");
    }
    let _ = writeln!(info, "total_elapsed_us {}", started.elapsed().as_micros());
    write_file(&config.out_dir.join("run_info.txt"), &info)?;

    Ok(ExperimentSummary {
        grid_points: records.len(),
        failures,
        table,
        out_dir: config.out_dir.clone(),
    })
}

fn build_table(config: &ExperimentConfig, records: &[GridRecord]) -> Vec<TableRow> {
    let lead_seed = config.seeds[0];
    let mut rows = Vec::new();
    for &d in &config.d_values {
        for &delta in &config.deltas {
            let d_inv = config
                .k_pairs
                .iter()
                .map(|&(k1, k2)| {
                    records
                        .iter()
                        .find(|r| {
                            r.seed == lead_seed
                                && r.k1 == k1
                                && r.k2 == k2
                                && r.delta == delta
                                && same_float(r.d_true, effective_d(config, d))
                        })
                        .and_then(|r| r.result.as_ref())
                        .map(|res| res.d_inv)
                })
                .collect();
            rows.push(TableRow {
                d_true: effective_d(config, d),
                delta,
                d_inv,
            });
        }
    }
    rows
}

fn effective_d(config: &ExperimentConfig, d: f64) -> f64 {
    config.model_for(d).map(|m| m.d()).unwrap_or(d)
}

fn same_float(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-15 * a.abs().max(b.abs())
}

fn render_d_table(config: &ExperimentConfig, table: &[TableRow]) -> String {
    let mut out = String::from("D,delta");
    for &(k1, k2) in &config.k_pairs {
        let _ = write!(out, ",k{k1}_{k2}");
    }
    out.push('\n');
    for row in table {
        let _ = write!(out, "{},{}", row.d_true, row.delta);
        for cell in &row.d_inv {
            match cell {
                Some(v) => {
                    let _ = write!(out, ",{v:.4}");
                }
                None => out.push_str(",nan"),
            }
        }
        out.push('\n');
    }
    out
}

fn render_params_csv(records: &[GridRecord]) -> String {
    let mut out = String::from("D,k1,k2,delta,seed,param,index,true_value,recovered\n");
    for record in records {
        let Some(result) = &record.result else {
            continue;
        };
        let prefix_of = |param: &str, index: usize, truth: f64, got: f64| {
            format!(
                "{},{},{},{},{},{},{},{},{}\n",
                record.d_true,
                record.k1,
                record.k2,
                record.delta,
                record.seed,
                param,
                index,
                truth,
                got
            )
        };
        for (j, (&truth, &got)) in record.rates_true.iter().zip(&result.r_inv).enumerate() {
            out.push_str(&prefix_of("r", j + 1, truth, got));
        }
        for (j, (&truth, &got)) in record.weights_true.iter().zip(&result.b_inv).enumerate() {
            out.push_str(&prefix_of("b", j + 1, truth, got));
        }
        out.push_str(&prefix_of("D", 0, record.d_true, result.d_inv));
    }
    out
}

fn render_jsonl(records: &[GridRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("record serializes"));
        out.push('\n');
    }
    out
}
