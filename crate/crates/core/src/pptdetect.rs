//! Detection of NPT maps on two qudits.
//!
//! A CP map `M` on `[d, d]` is PPT when `M_T = T_A . M . T_A` is again CP. The
//! witness is the partial transpose (on the first output qudit) of the
//! projector onto the eigenvector of `C_{M_T}` with the most negative
//! eigenvalue. Since `T_A` itself is not physical, the experiment realizes
//! `M . T~_A` with the noisy transpose `T~_A = (1-p) T_A + p D_{I/d^2}` at
//! the smallest noise `p = d^3 / (d^3 + 1)` that makes it CP.

use crate::channels::{
    classify, compose, kraus_from_choi, transpose_superoperator, Channel, ChoiMatrix, Superoperator,
};
use crate::detect::{Witness, WitnessKind};
use crate::error::{Error, Result};
use crate::qmath::{hermitian_eig, ComplexMatrix, C64};

/// Verdict margin: detection requires `expectation < threshold - NPT_MARGIN`.
pub const NPT_MARGIN: f64 = 1e-12;
/// Agreement required between the direct and two-term expectation values.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// Eigenvalue gaps below this mark the most negative eigenvalue as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// `T_A . M . T_A` as a superoperator and its (possibly non-PSD) Choi matrix.
#[derive(Clone, Debug)]
pub struct ConjugatedMap {
    pub superop: Superoperator,
    pub choi: ChoiMatrix,
}

fn local_dim(dims: &[usize]) -> Result<usize> {
    match dims {
        [a, b] if a == b => Ok(*a),
        _ => Err(Error::DimensionMismatch(format!(
            "expected two equal subsystems, got {dims:?}"
        ))),
    }
}

pub fn ppt_conjugate(ch: &Channel) -> Result<ConjugatedMap> {
    local_dim(ch.dims())?;
    let t = transpose_superoperator(0, ch.dims())?;
    let superop = compose(&t, &compose(ch, &t)?)?;
    let choi = superop.choi();
    Ok(ConjugatedMap { superop, choi })
}

/// Minimal depolarizing weight making the noisy partial transpose CP.
pub fn spa_noise(d: usize) -> f64 {
    let d3 = (d * d * d) as f64;
    d3 / (d3 + 1.0)
}

/// `(1-p) T_A + p D_{I/d^2}` on `[d, d]` for an arbitrary weight `p`. Not CP
/// for `p < spa_noise(d)`.
pub fn noisy_transpose_superoperator(d: usize, p: f64) -> Result<Superoperator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    let dims = [d, d];
    let t = transpose_superoperator(0, &dims)?;
    let mixed = ComplexMatrix::identity(&dims).scale(1.0 / (d * d) as f64);
    let dep = Superoperator::replacement(&mixed);
    Superoperator::linear_combination(&[(1.0 - p, &t), (p, &dep)])
}

/// The structural physical approximation of `T_A` as a CPTP channel.
pub fn spa_transpose(d: usize) -> Result<Channel> {
    let superop = noisy_transpose_superoperator(d, spa_noise(d))?;
    let kraus = kraus_from_choi(&superop.choi())?;
    Channel::new(kraus.kraus().to_vec(), vec![d, d], true)
}

/// `W_PPT = (|l><l|)^{T_A}` together with the eigen-data it was built from.
#[derive(Clone, Debug)]
pub struct PptWitness {
    pub witness: Witness,
    pub lambda_minus: f64,
    pub eigenvector: Vec<C64>,
    /// The lowest eigenvalue of `C_{M_T}` is (numerically) repeated.
    pub degenerate: bool,
}

fn lowest_eigen_witness(conj: &ConjugatedMap) -> Result<PptWitness> {
    let eig = hermitian_eig(conj.choi.matrix())?;
    let lambda_minus = eig.min();
    let degenerate = eig.values.len() > 1 && eig.values[1] - eig.values[0] < DEGENERACY_TOL;
    let eigenvector = eig.vector(0);
    let projector = ComplexMatrix::outer(
        &eigenvector,
        &eigenvector,
        conj.choi.matrix().dims().to_vec(),
    )?;
    let operator = projector.partial_transpose(0)?;
    Ok(PptWitness {
        witness: Witness::new(operator, WitnessKind::Ppt)?,
        lambda_minus,
        eigenvector,
        degenerate,
    })
}

/// Builds `W_PPT` for an NPT map; fails with
/// [`Error::NoNegativeEigenvalue`] when `C_{M_T}` is positive semidefinite.
pub fn ppt_witness(ch: &Channel) -> Result<PptWitness> {
    let conj = ppt_conjugate(ch)?;
    let w = lowest_eigen_witness(&conj)?;
    if w.lambda_minus >= 0.0 {
        return Err(Error::NoNegativeEigenvalue(w.lambda_minus));
    }
    Ok(w)
}

/// Superoperator of the realizable composite `M . T~_A`.
pub fn realizable_superoperator(ch: &Channel) -> Result<Superoperator> {
    let d = local_dim(ch.dims())?;
    compose(ch, &noisy_transpose_superoperator(d, spa_noise(d))?)
}

/// `M . T~_A` in Kraus form.
pub fn realizable_composite(ch: &Channel) -> Result<Channel> {
    let choi = realizable_superoperator(ch)?.choi();
    let k = kraus_from_choi(&choi)?;
    Channel::new(k.kraus().to_vec(), ch.dims().to_vec(), false)
}

/// `Tr[W C_{M . T~_A}]` for any channel `M` on the witness's two qudits.
pub fn evaluate_ppt_witness(w: &Witness, ch: &Channel) -> Result<f64> {
    let choi = realizable_superoperator(ch)?.choi();
    w.expectation(choi.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NptVerdict {
    NptDetected,
    NotDetected,
}

impl NptVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            NptVerdict::NptDetected => "npt_detected",
            NptVerdict::NotDetected => "not_detected",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NptReport {
    /// Lowest eigenvalue of `C_{M_T}`; non-negative when the map is PPT.
    pub lambda_minus: f64,
    /// Exact `Tr[W_PPT C_{M . T~_A}]`.
    pub expectation: f64,
    /// `(1-p) <l|C_{M_T}|l> + p <l| M_T[I/d^2] (x) I/d^2 |l>`.
    pub two_term_expectation: f64,
    /// The second factor `<l| M_T[I/d^2] (x) I/d^2 |l>` alone.
    pub depolarized_term: f64,
    pub noise_p: f64,
    /// `p / d^4` for unital maps, otherwise 0.
    pub threshold: f64,
    pub unital: bool,
    pub verdict: NptVerdict,
    pub degenerate: bool,
    pub diagnostics: Vec<String>,
}

pub fn detect_npt(ch: &Channel) -> Result<NptReport> {
    let d = local_dim(ch.dims())?;
    let conj = ppt_conjugate(ch)?;
    let mut diagnostics = Vec::new();
    let w = match ppt_witness(ch) {
        Ok(w) => w,
        Err(Error::NoNegativeEigenvalue(min)) => {
            diagnostics.push(format!(
                "C_(M_T) has no negative eigenvalue (min {min:.3e}); map is PPT and undetectable by this witness"
            ));
            lowest_eigen_witness(&conj)?
        }
        Err(e) => return Err(e),
    };
    if w.degenerate {
        diagnostics.push("most negative eigenvalue is degenerate; first eigenvector used".into());
    }

    let p = spa_noise(d);
    let expectation = evaluate_ppt_witness(&w.witness, ch)?;

    let mixed = ComplexMatrix::identity(&[d, d]).scale(1.0 / (d * d) as f64);
    let conj_on_mixed = conj.superop.apply(&mixed)?;
    let depolarized_state = conj_on_mixed.kron(&mixed);
    let depolarized_term = depolarized_state.expectation(&w.eigenvector).re;
    let conj_term = conj.choi.matrix().expectation(&w.eigenvector).re;
    let two_term_expectation = (1.0 - p) * conj_term + p * depolarized_term;
    if (two_term_expectation - expectation).abs() > CROSS_CHECK_TOL {
        return Err(Error::Numerical(format!(
            "direct expectation {expectation:.15} disagrees with two-term form {two_term_expectation:.15}"
        )));
    }

    let unital = classify(ch).unital;
    let threshold = if unital { p / (d as f64).powi(4) } else { 0.0 };
    let verdict = if expectation < threshold - NPT_MARGIN {
        NptVerdict::NptDetected
    } else {
        NptVerdict::NotDetected
    };
    Ok(NptReport {
        lambda_minus: w.lambda_minus,
        expectation,
        two_term_expectation,
        depolarized_term,
        noise_p: p,
        threshold,
        unital,
        verdict,
        degenerate: w.degenerate,
        diagnostics,
    })
}
