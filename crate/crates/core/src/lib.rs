//! Clustered-eigenvalue analysis of the extended Burgers viscoelastic
//! model: a forward solver for the modal eigenvalue clusters and an
//! inverse pipeline that reconstructs the relaxation parameters
//! (modulus, weights, rates) from two measured clusters, plus a
//! command-line harness that sweeps the reconstruction over a grid of
//! moduli, frequency pairs, and noise levels.

pub mod harness;
pub mod inversion;
pub mod noise;
pub mod polyutil;
pub mod relaxation;
pub mod spectral;

pub use harness::{run_experiment, run_forward, run_invert, ExperimentConfig};
pub use inversion::{
    eval_q, invert, recover_d, recover_d_glassy, recover_rates, recover_rates_with,
    recover_weights, BracketSource, InversionError, MeasuredCluster, ReconstructionResult,
};
pub use noise::{perturb_cluster, NoiseMode, NoiseSpec};
pub use polyutil::{bisect_root, Bracket, PolyError, Polynomial};
pub use relaxation::{
    approximation_error, EbmModel, ModelError, PronySeries, Regime, StretchedExponential,
};
pub use spectral::{
    build_augmented_matrix, characteristic_polynomial, compute_cluster, eigenvector,
    eval_characteristic, secular_residual, AugmentedMatrix, Cluster, FrequencyIndex, SpectralError,
};
