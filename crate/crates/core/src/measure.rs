//! Local Pauli measurements of qubit witnesses.
//!
//! A witness on `n` qubits is expanded in Pauli strings, the strings are
//! grouped into local measurement settings (one basis per qubit) and each
//! setting is sampled on the Choi state of the channel under test.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::Channel;
use crate::detect::{evaluate_witness, Witness};
use crate::error::{Error, Result};
use crate::qmath::{hermitian_eig, kron_all, ComplexMatrix, Pauli, PauliString, C64};

/// Pauli coefficients at or below this magnitude are dropped.
pub const COEFFICIENT_TOL: f64 = 1e-12;
/// Tolerance on trace and positivity of a state handed to the sampler.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: f64,
}

fn qubit_count(dims: &[usize]) -> Result<usize> {
    if dims.iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch(format!(
            "Pauli expansion needs qubit subsystems, got {dims:?}"
        )));
    }
    Ok(dims.len())
}

fn all_strings(n: usize) -> impl Iterator<Item = PauliString> {
    (0..4usize.pow(n as u32)).map(move |mut k| {
        let mut letters = vec![Pauli::I; n];
        for slot in letters.iter_mut().rev() {
            *slot = Pauli::ALL[k % 4];
            k /= 4;
        }
        PauliString::new(letters)
    })
}

/// Coefficients `Tr[P W] / 2^n` of every Pauli string with non-negligible
/// weight, in lexicographic `I < X < Y < Z` order.
pub fn pauli_decompose(w: &ComplexMatrix) -> Result<Vec<PauliTerm>> {
    let n = qubit_count(w.dims())?;
    let err = w.hermiticity_error();
    if err > COEFFICIENT_TOL {
        return Err(Error::NotHermitian(err));
    }
    let norm = (1usize << n) as f64;
    let mut terms = Vec::new();
    for string in all_strings(n) {
        let c = string.matrix().trace_product(w) / norm;
        if c.im.abs() > COEFFICIENT_TOL {
            return Err(Error::Numerical(format!(
                "coefficient of {string} has imaginary part {:.3e}",
                c.im
            )));
        }
        if c.re.abs() > COEFFICIENT_TOL {
            terms.push(PauliTerm {
                string,
                coefficient: c.re,
            });
        }
    }
    Ok(terms)
}

/// One local basis per qubit and the indices of the terms read from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSetting {
    pub bases: Vec<Pauli>,
    pub covered_terms: Vec<usize>,
}

impl MeasurementSetting {
    pub fn label(&self) -> String {
        self.bases.iter().map(|p| p.letter()).collect()
    }

    pub fn covers(&self, s: &PauliString) -> bool {
        compatible(&self.bases, s)
    }
}

fn compatible(bases: &[Pauli], s: &PauliString) -> bool {
    bases.len() == s.len()
        && bases
            .iter()
            .zip(&s.letters)
            .all(|(b, l)| *l == Pauli::I || l == b)
}

/// Greedy grouping into local settings. The identity term needs no setting.
pub fn group_settings(terms: &[PauliTerm]) -> Vec<MeasurementSetting> {
    let mut order: Vec<usize> = (0..terms.len())
        .filter(|&i| !terms[i].string.is_identity())
        .collect();
    order.sort_by_key(|&i| terms[i].string.len() - terms[i].string.weight());

    let mut settings: Vec<MeasurementSetting> = Vec::new();
    for (pos, &t) in order.iter().enumerate() {
        let s = &terms[t].string;
        if let Some(setting) = settings.iter_mut().find(|st| st.covers(s)) {
            setting.covered_terms.push(t);
            continue;
        }
        let remaining = &order[pos + 1..];
        let bases = densest_completion(s, remaining.iter().map(|&i| &terms[i].string));
        settings.push(MeasurementSetting {
            bases,
            covered_terms: vec![t],
        });
    }
    settings
}

fn densest_completion<'a>(
    s: &PauliString,
    remaining: impl Iterator<Item = &'a PauliString> + Clone,
) -> Vec<Pauli> {
    let free: Vec<usize> = (0..s.len()).filter(|&q| s.letters[q] == Pauli::I).collect();
    let mut best: Option<(usize, Vec<Pauli>)> = None;
    for mut k in 0..3usize.pow(free.len() as u32) {
        let mut bases = s.letters.clone();
        for &q in free.iter().rev() {
            bases[q] = [Pauli::X, Pauli::Y, Pauli::Z][k % 3];
            k /= 3;
        }
        let score = remaining.clone().filter(|r| compatible(&bases, r)).count();
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, bases));
        }
    }
    best.map(|(_, b)| b).unwrap_or_default()
}

fn basis_change(p: Pauli) -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    match p {
        Pauli::X => ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]], vec![2]).expect("2x2"),
        Pauli::Y => ComplexMatrix::from_rows(
            &[
                vec![C64::new(h, 0.0), C64::new(0.0, -h)],
                vec![C64::new(h, 0.0), C64::new(0.0, h)],
            ],
            vec![2],
        )
        .expect("2x2"),
        Pauli::Z | Pauli::I => ComplexMatrix::identity(&[2]),
    }
}

fn check_state(state: &ComplexMatrix) -> Result<usize> {
    let n = qubit_count(state.dims())?;
    let tr = state.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let min = hermitian_eig(state)
        .map_err(|e| Error::InvalidState(e.to_string()))?
        .min();
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(n)
}

/// Outcome probabilities in the product eigenbasis of `bases`. Outcome index
/// bit `n-1-q` is 0 for eigenvalue +1 on qubit `q`.
fn outcome_probabilities(state: &ComplexMatrix, bases: &[Pauli]) -> Vec<f64> {
    let v = kron_all(
        bases
            .iter()
            .map(|&b| basis_change(b))
            .collect::<Vec<_>>()
            .iter(),
    );
    let rotated = &(&v * state) * &v.adjoint();
    (0..rotated.side())
        .map(|i| rotated[(i, i)].re.max(0.0))
        .collect()
}

fn sample_histogram(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidState(e.to_string()))?;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}

fn setting_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Histogram of `shots` projective measurements of `state` in `setting`,
/// indexed by outcome bits (qubit 0 most significant, 0 meaning +1).
pub fn simulate_counts(
    state: &ComplexMatrix,
    setting: &MeasurementSetting,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let n = check_state(state)?;
    if setting.bases.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "setting {} on {n} qubits",
            setting.label()
        )));
    }
    let probs = outcome_probabilities(state, &setting.bases);
    sample_histogram(&probs, shots, &mut setting_rng(seed, 0))
}

/// `+1` or `-1`: product of outcome signs on the non-identity positions of `s`.
fn parity(s: &PauliString, outcome: usize) -> f64 {
    let n = s.len();
    let odd = s
        .letters
        .iter()
        .enumerate()
        .filter(|(q, l)| **l != Pauli::I && (outcome >> (n - 1 - q)) & 1 == 1)
        .count()
        % 2;
    if odd == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShotEstimate {
    pub value: f64,
    pub std_error: f64,
    pub shots_per_setting: u64,
    pub seed: u64,
}

/// Estimates `Tr[W C_M]` from `shots_per_setting` samples of every setting.
/// Zero shots selects exact evaluation.
pub fn estimate_witness(
    ch: &Channel,
    w: &Witness,
    shots_per_setting: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    if shots_per_setting == 0 {
        return Ok(ShotEstimate {
            value: evaluate_witness(w, ch)?,
            std_error: 0.0,
            shots_per_setting,
            seed,
        });
    }
    let state = ch.choi().matrix();
    check_state(state)?;
    let terms = pauli_decompose(&w.operator)?;
    let settings = group_settings(&terms);
    let constant: f64 = terms
        .iter()
        .filter(|t| t.string.is_identity())
        .map(|t| t.coefficient)
        .sum();

    let per_setting: Vec<(f64, f64)> = settings
        .par_iter()
        .enumerate()
        .map(|(k, setting)| {
            let probs = outcome_probabilities(state, &setting.bases);
            let counts =
                sample_histogram(&probs, shots_per_setting, &mut setting_rng(seed, k as u64))?;
            // Per-outcome value of the combined estimator for this setting.
            let y: Vec<f64> = (0..counts.len())
                .map(|o| {
                    setting
                        .covered_terms
                        .iter()
                        .map(|&t| terms[t].coefficient * parity(&terms[t].string, o))
                        .sum()
                })
                .collect();
            let n = shots_per_setting as f64;
            let mean = counts
                .iter()
                .zip(&y)
                .map(|(&c, v)| c as f64 * v)
                .sum::<f64>()
                / n;
            let var = if shots_per_setting > 1 {
                counts
                    .iter()
                    .zip(&y)
                    .map(|(&c, v)| c as f64 * (v - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0)
            } else {
                0.0
            };
            Ok((mean, var / n))
        })
        .collect::<Result<_>>()?;

    Ok(ShotEstimate {
        value: constant + per_setting.iter().map(|(m, _)| m).sum::<f64>(),
        std_error: per_setting.iter().map(|(_, v)| v).sum::<f64>().sqrt(),
        shots_per_setting,
        seed,
    })
}
