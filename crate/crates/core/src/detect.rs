//! Witness construction and evaluation for entanglement-breaking,
//! separable-random-unitary (SRU) and separable maps.
//!
//! For a unitary `U` on `[dA, dB]` the Choi state is the pure state
//! `|U> = (U (x) I)|alpha>` on `(A, B, C, D)`. Its overlap with the Choi states
//! of product unitaries is bounded by `alpha_sru`, and with those of product
//! (not necessarily unitary) single-Kraus maps by `alpha_s`, the largest
//! operator Schmidt coefficient of `U`. The witness `alpha^2 I - |U><U|` then
//! separates `|U>` from the corresponding convex set.

use rayon::prelude::*;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::qmath::{
    haar_unitary, hermitian_eig, polar_unitary, svd_sorted, ComplexMatrix, PauliString, C64,
    HERMITIAN_TOL,
};

/// Schmidt coefficients at or below this are treated as zero.
pub const SCHMIDT_RANK_TOL: f64 = 1e-12;
/// Default number of random starts for the SRU overlap optimizer.
pub const DEFAULT_STARTS: usize = 50;
/// Per-sweep gain below which the alternating ascent stops.
pub const SWEEP_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 500;

/// `O = sum_i sigma_i A_i (x) B_i` with `Tr[A_i^dagger A_j] = dA delta_ij` and
/// `Tr[B_i^dagger B_j] = dB delta_ij`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending, strictly positive.
    pub sigmas: Vec<f64>,
    pub a_factors: Vec<ComplexMatrix>,
    pub b_factors: Vec<ComplexMatrix>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn leading(&self) -> f64 {
        self.sigmas[0]
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut terms = self
            .sigmas
            .iter()
            .zip(self.a_factors.iter().zip(&self.b_factors))
            .map(|(&s, (a, b))| a.kron(b).scale(s));
        let first = terms.next().expect("rank >= 1");
        terms.fold(first, |acc, t| &acc + &t)
    }
}

/// Operator Schmidt decomposition by realignment and SVD.
///
/// The realigned matrix has rows indexed by the A-index pair and columns by
/// the B-index pair. Each `A_i` is rotated so that its first nonzero entry
/// (row-major) is real and positive; the compensating phase goes to `B_i`.
pub fn operator_schmidt(o: &ComplexMatrix, da: usize, db: usize) -> Result<SchmidtDecomposition> {
    if o.side() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "operator of side {} is not {da} x {db}",
            o.side()
        )));
    }
    let realigned = nalgebra::DMatrix::from_fn(da * da, db * db, |r, c| {
        let (i, j) = (r / da, r % da);
        let (k, l) = (c / db, c % db);
        o[(i * db + k, j * db + l)]
    });
    let (u, s, v_t) = svd_sorted(realigned);
    let norm = ((da * db) as f64).sqrt();
    let (sa, sb) = ((da as f64).sqrt(), (db as f64).sqrt());

    let mut sigmas = Vec::new();
    let mut a_factors = Vec::new();
    let mut b_factors = Vec::new();
    for (t, &sv) in s.iter().enumerate() {
        let sigma = sv / norm;
        if sigma <= SCHMIDT_RANK_TOL {
            break;
        }
        let mut a = ComplexMatrix::from_fn(&[da], |i, j| u[(i * da + j, t)] * sa);
        let mut b = ComplexMatrix::from_fn(&[db], |k, l| v_t[(t, k * db + l)] * sb);
        if let Some(first) = a.data().iter().find(|z| z.norm() > SCHMIDT_RANK_TOL) {
            let phase = first / first.norm();
            a = a.scale(phase.conj());
            b = b.scale(phase);
        }
        sigmas.push(sigma);
        a_factors.push(a);
        b_factors.push(b);
    }
    if sigmas.is_empty() {
        return Err(Error::Numerical(
            "operator has no Schmidt coefficient above tolerance".into(),
        ));
    }
    let rank = sigmas.len();
    Ok(SchmidtDecomposition {
        sigmas,
        a_factors,
        b_factors,
        rank,
    })
}

/// `|<U_A (x) U_B | U>| = |Tr[(U_A (x) U_B)^dagger U]| / (dA dB)`.
pub fn product_overlap(u: &ComplexMatrix, ua: &ComplexMatrix, ub: &ComplexMatrix) -> f64 {
    let d = (ua.side() * ub.side()) as f64;
    ua.kron(ub).adjoint().trace_product(u).norm() / d
}

/// One run of alternating polar ascent from a fixed initial `U_B`.
#[derive(Clone, Debug)]
pub struct AscentRun {
    pub value: f64,
    pub ua: ComplexMatrix,
    pub ub: ComplexMatrix,
    /// Objective after every half-step.
    pub history: Vec<f64>,
    pub sweeps: usize,
}

/// Alternately sets `U_A` to the polar unitary of `Tr_B[(I (x) U_B^dagger) U]`
/// and `U_B` to that of `Tr_A[(U_A^dagger (x) I) U]`. Each half-step is an
/// exact maximization, so the objective never decreases.
pub fn alternating_ascent(
    u: &ComplexMatrix,
    dims: [usize; 2],
    initial_ub: ComplexMatrix,
    max_sweeps: usize,
    tol: f64,
) -> Result<AscentRun> {
    let [da, db] = dims;
    let u = u.clone().with_dims(vec![da, db])?;
    let norm = (da * db) as f64;
    let id_a = ComplexMatrix::identity(&[da]);
    let id_b = ComplexMatrix::identity(&[db]);

    let mut ub = initial_ub.with_dims(vec![db])?;
    let mut ua = id_a.clone();
    let mut history = Vec::new();
    let mut value = f64::NEG_INFINITY;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let f = (&id_a.kron(&ub.adjoint()) * &u).partial_trace(&[0])?;
        let (next_ua, f_norm) = polar_unitary(&f);
        ua = next_ua;

        let g = (&ua.adjoint().kron(&id_b) * &u).partial_trace(&[1])?;
        let (next_ub, trace_norm) = polar_unitary(&g);
        ub = next_ub;
        history.push(f_norm / norm);
        history.push(trace_norm / norm);

        let gain = trace_norm / norm - value;
        value = value.max(trace_norm / norm);
        if gain < tol {
            break;
        }
    }
    Ok(AscentRun {
        value: product_overlap(&u, &ua, &ub),
        ua,
        ub,
        history,
        sweeps,
    })
}

/// Best product-unitary overlap found by the multistart optimizer.
#[derive(Clone, Debug)]
pub struct SruOptimum {
    pub alpha_sru: f64,
    pub ua: ComplexMatrix,
    pub ub: ComplexMatrix,
    /// Index of the winning start.
    pub best_start: usize,
}

/// Estimates `alpha_sru = max |<U_A (x) U_B|U>|` by alternating ascent from
/// `starts` Haar-random initial `U_B` (start `k` uses seed `seed + k`).
/// Starts run in parallel; ties resolve to the lowest start index.
pub fn alpha_sru_optimize(
    u: &ComplexMatrix,
    dims: [usize; 2],
    starts: usize,
    seed: u64,
) -> Result<SruOptimum> {
    if u.side() != dims[0] * dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "unitary of side {} on {dims:?}",
            u.side()
        )));
    }
    let err = u.unitarity_error();
    if err > crate::channels::UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let starts = starts.max(1);
    let runs = (0..starts)
        .into_par_iter()
        .map(|k| {
            let init = haar_unitary(dims[1], seed.wrapping_add(k as u64));
            alternating_ascent(u, dims, init, MAX_SWEEPS, SWEEP_TOL).map(|r| (k, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_start, best) = runs
        .into_iter()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("at least one start");
    Ok(SruOptimum {
        alpha_sru: best.value,
        ua: best.ua,
        ub: best.ub,
        best_start,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    EntanglementBreaking,
    Sru,
    Stabilizer,
    Ppt,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::EntanglementBreaking => "eb",
            WitnessKind::Sru => "sru",
            WitnessKind::Stabilizer => "stabilizer",
            WitnessKind::Ppt => "ppt",
        }
    }
}

/// Hermitian detection operator on a Choi space.
#[derive(Clone, Debug)]
pub struct Witness {
    pub operator: ComplexMatrix,
    pub kind: WitnessKind,
    pub alpha_sru_sq: Option<f64>,
    pub alpha_s_sq: Option<f64>,
}

impl Witness {
    pub fn new(operator: ComplexMatrix, kind: WitnessKind) -> Result<Self> {
        let err = operator.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self {
            operator,
            kind,
            alpha_sru_sq: None,
            alpha_s_sq: None,
        })
    }

    pub fn max_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.operator)
            .expect("witness is Hermitian by construction")
            .max()
    }

    /// `Tr[W rho]` for an arbitrary operator on the witness space.
    pub fn expectation(&self, rho: &ComplexMatrix) -> Result<f64> {
        if rho.dims() != self.operator.dims() {
            return Err(Error::DimensionMismatch(format!(
                "witness on {:?}, state on {:?}",
                self.operator.dims(),
                rho.dims()
            )));
        }
        let value = self.operator.trace_product(rho);
        if value.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "witness expectation has imaginary part {:.3e}",
                value.im
            )));
        }
        Ok(value.re)
    }
}

/// `alpha_sq I - |U><U|` on the four-partite Choi space of `U`. The separable
/// reference `alpha_s^2 = sigma_1^2` is attached from the operator Schmidt
/// decomposition.
pub fn build_sru_witness(u: &ComplexMatrix, dims: [usize; 2], alpha_sq: f64) -> Result<Witness> {
    if !(alpha_sq > 0.0 && alpha_sq <= 1.0) {
        return Err(Error::InvalidProbability(format!(
            "alpha^2 = {alpha_sq} not in (0, 1]"
        )));
    }
    let u = u.clone().with_dims(dims.to_vec())?;
    let channel = Channel::unitary(&u)?;
    let choi = channel.choi().matrix();
    let operator = &ComplexMatrix::identity(choi.dims()).scale(alpha_sq) - choi;
    let sigma1 = operator_schmidt(&u, dims[0], dims[1])?.leading();
    let mut w = Witness::new(operator, WitnessKind::Sru)?;
    w.alpha_sru_sq = Some(alpha_sq);
    w.alpha_s_sq = Some(sigma1 * sigma1);
    Ok(w)
}

/// `(II - XX + YY - ZZ) / 4` on the two-qubit Choi space.
pub fn eb_witness() -> Witness {
    let terms = [("+II", 0.25), ("+XX", -0.25), ("+YY", 0.25), ("+ZZ", -0.25)];
    let mut op = ComplexMatrix::zeros(&[2, 2]);
    for (s, c) in terms {
        let p: PauliString = s.parse().expect("valid literal");
        op = &op + &p.matrix().scale(c);
    }
    Witness::new(op, WitnessKind::EntanglementBreaking).expect("Hermitian")
}

/// `3 I - 2 [prod_{first half} P_i + prod_{second half} P_i]` with
/// `P_i = (I + g_i) / 2`. For four generators this is
/// `3 I - 2 [P_1 P_2 + P_3 P_4]`.
pub fn stabilizer_witness(generators: &[PauliString]) -> Result<Witness> {
    if generators.len() < 2 || !generators.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "need an even number (>= 2) of generators, got {}",
            generators.len()
        )));
    }
    let n = generators[0].len();
    if generators.iter().any(|g| g.len() != n) {
        return Err(Error::DimensionMismatch(
            "generators act on different qubit counts".into(),
        ));
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            if !generators[i].commutes_with(&generators[j]) {
                return Err(Error::NonCommutingGenerators(i, j));
            }
        }
    }
    if gf2_rank(generators) < generators.len() {
        return Err(Error::DependentGenerators);
    }
    let dims = vec![2; n];
    let id = ComplexMatrix::identity(&dims);
    let projector = |g: &PauliString| (&id + &g.matrix()).scale(0.5);
    let half = generators.len() / 2;
    let product = |gs: &[PauliString]| {
        gs.iter()
            .map(projector)
            .reduce(|acc, p| &acc * &p)
            .expect("non-empty half")
    };
    let sum = &product(&generators[..half]) + &product(&generators[half..]);
    let op = &id.scale(3.0) - &sum.scale(2.0);
    Witness::new(op.hermitian_part(), WitnessKind::Stabilizer)
}

fn gf2_rank(gens: &[PauliString]) -> usize {
    let mut rows: Vec<Vec<bool>> = gens
        .iter()
        .map(|g| {
            g.symplectic()
                .into_iter()
                .flat_map(|(x, z)| [x, z])
                .collect()
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot_row = rows[rank].clone();
                rows[r].iter_mut().zip(pivot_row).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Exact `Tr[W C_M]`.
pub fn evaluate_witness(w: &Witness, ch: &Channel) -> Result<f64> {
    w.expectation(ch.choi().matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Undetected,
    NotSru,
    NotSeparable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Undetected => "undetected",
            Verdict::NotSru => "not_sru",
            Verdict::NotSeparable => "not_separable",
        }
    }
}

/// Tiered reading of an SRU-witness value: below `alpha_sru^2 - alpha_s^2` the
/// map cannot be separable, below zero it cannot be SRU.
pub fn classify_violation(value: f64, w: &Witness) -> Result<Verdict> {
    let (Some(sru), Some(sep)) = (w.alpha_sru_sq, w.alpha_s_sq) else {
        return Err(Error::MissingReferenceCoefficients);
    };
    Ok(if value < sru - sep {
        Verdict::NotSeparable
    } else if value < 0.0 {
        Verdict::NotSru
    } else {
        Verdict::Undetected
    })
}

/// Lower bounds on the generalized robustness and on the EB mixing threshold
/// derived from one witness value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub c: f64,
    pub w_max: f64,
    pub robustness_lb: f64,
    pub mu_c_lb: f64,
}

pub fn robustness_bounds(c: f64, w: &Witness) -> BoundReport {
    let w_max = w.max_eigenvalue();
    let robustness_lb = if c < 0.0 { c.abs() / w_max } else { 0.0 };
    BoundReport {
        c,
        w_max,
        robustness_lb,
        mu_c_lb: 1.0 - 1.0 / (1.0 + robustness_lb),
    }
}

/// Phase gate `diag(1, i)`.
pub fn phase_gate() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)], vec![2]).expect("2x2")
}

/// `exp(-i theta X)`.
pub fn x_rotation(theta: f64) -> ComplexMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    ComplexMatrix::new(
        vec![
            C64::new(c, 0.0),
            C64::new(0.0, -s),
            C64::new(0.0, -s),
            C64::new(c, 0.0),
        ],
        vec![2],
    )
    .expect("2x2")
}
