//! Detection of quantum channel properties through the Choi-Jamiolkowski
//! correspondence and witness operators.
//!
//! The crate is organized bottom-up:
//!
//! - [`qmath`]: dense complex tensor algebra, spectral routines, Haar sampling.
//! - [`channels`]: Kraus / superoperator / Choi representations and the named
//!   channels and gates used throughout.
//! - [`detect`]: witnesses for entanglement-breaking, separable-random-unitary
//!   and separable maps, operator Schmidt decomposition, robustness bounds.
//! - [`pptdetect`]: NPT-map detection with a physically realizable noisy
//!   partial transpose.
//! - [`measure`]: Pauli expansion of qubit witnesses, grouping into local
//!   measurement settings and finite-shot estimation.
//! - [`random`]: seeded ensembles of channels and states used by tests and
//!   benchmarks.

pub mod channels;
pub mod detect;
pub mod error;
pub mod measure;
pub mod pptdetect;
pub mod qmath;
pub mod random;

pub use channels::{
    choi_of, classify, compose, kraus_from_choi, make_named_channel, superoperator_of,
    transpose_superoperator, Channel, ChannelClass, ChannelName, ChannelParams, ChoiMatrix,
    Superoperator,
};
pub use detect::{
    alpha_sru_optimize, build_sru_witness, classify_violation, eb_witness, evaluate_witness,
    operator_schmidt, robustness_bounds, stabilizer_witness, BoundReport, SchmidtDecomposition,
    SruOptimum, Verdict, Witness, WitnessKind,
};
pub use error::{Error, Result};
pub use measure::{
    estimate_witness, group_settings, pauli_decompose, simulate_counts, MeasurementSetting,
    PauliTerm, ShotEstimate,
};
pub use pptdetect::{
    detect_npt, evaluate_ppt_witness, ppt_conjugate, ppt_witness, spa_transpose, NptReport,
    NptVerdict, PptWitness,
};
pub use qmath::{
    haar_unitary, hermitian_eig, max_entangled, ComplexMatrix, HermitianEig, Pauli, PauliString,
    PureState, C64,
};
