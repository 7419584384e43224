//! Quantum channel representations.
//!
//! A [`Channel`] is stored in Kraus form and carries its superoperator and
//! Choi matrix, both computed at construction.
//!
//! Conventions:
//! - vectorization is column stacking, `vec(rho)[i + j*D] = rho[i][j]`, so a
//!   Kraus term contributes `conj(A) (x) A` to the superoperator;
//! - the Choi matrix is `(M (x) id)[|alpha><alpha|]` with the normalized
//!   maximally entangled state, output subsystems first and ancillas after.
//!   For a channel on `[dA, dB]` this is the four-partite order `(A, B, C, D)`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qmath::{hermitian_eig, ComplexMatrix, Pauli, C64, ONE, ZERO};

/// Tolerance for the trace-preservation and unitality checks.
pub const TP_TOL: f64 = 1e-10;
/// Choi eigenvalues above `-CP_TOL` count as non-negative.
pub const CP_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are dropped when extracting Kraus operators.
pub const KRAUS_DROP_TOL: f64 = 1e-10;
/// Negative Choi eigenvalues below `-KRAUS_PSD_TOL` reject Kraus extraction.
pub const KRAUS_PSD_TOL: f64 = 1e-9;
/// Tolerance for unitarity checks on gate inputs.
pub const UNITARY_TOL: f64 = 1e-10;

/// Linear map on operators, acting on column-stacked density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if matrix.side() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "superoperator of side {} for system dimension {d}",
                matrix.side()
            )));
        }
        let matrix = matrix.with_dims(vec![d * d])?;
        Ok(Self { matrix, dims })
    }

    pub fn identity(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(&[d * d]),
            dims: dims.to_vec(),
        }
    }

    /// The replacement map `rho -> Tr[rho] sigma`.
    pub fn replacement(sigma: &ComplexMatrix) -> Self {
        let d = sigma.side();
        let vec_sigma = vectorize(sigma);
        let mut m = ComplexMatrix::zeros(&[d * d]);
        for (r, &s) in vec_sigma.iter().enumerate() {
            for k in 0..d {
                m[(r, k + k * d)] = s;
            }
        }
        Self {
            matrix: m,
            dims: sigma.dims().to_vec(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn system_side(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.side() != self.system_side() {
            return Err(Error::DimensionMismatch(
                "operator does not match superoperator dimension".into(),
            ));
        }
        unvectorize(&self.matrix.apply(&vectorize(rho)), self.dims.clone())
    }

    /// Weighted sum `sum_k w_k S_k` of superoperators on the same system.
    pub fn linear_combination(terms: &[(f64, &Superoperator)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty superoperator combination".into()))?;
        let mut acc = ComplexMatrix::zeros(first.matrix.dims());
        for (w, s) in terms {
            if s.dims != first.dims {
                return Err(Error::DimensionMismatch(format!(
                    "combining superoperators on {:?} and {:?}",
                    first.dims, s.dims
                )));
            }
            acc = &acc + &s.matrix.scale(*w);
        }
        Self::new(acc, first.dims.clone())
    }

    /// Choi matrix by reshuffling, `C[(i,k),(j,l)] = S[i + jD, k + lD] / D`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.system_side();
        let mut cdims = self.dims.clone();
        cdims.extend_from_slice(&self.dims);
        let scale = 1.0 / d as f64;
        let m = ComplexMatrix::from_fn(&cdims, |row, col| {
            let (i, k) = (row / d, row % d);
            let (j, l) = (col / d, col % d);
            self.matrix[(i + j * d, k + l * d)] * scale
        });
        ChoiMatrix {
            matrix: m,
            source_dims: self.dims.clone(),
        }
    }
}

impl AsRef<Superoperator> for Superoperator {
    fn as_ref(&self) -> &Superoperator {
        self
    }
}

/// Choi matrix over the doubled subsystem list (outputs, then ancillas).
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    source_dims: Vec<usize>,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix, source_dims: Vec<usize>) -> Result<Self> {
        let d: usize = source_dims.iter().product();
        if matrix.side() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of side {} for system dimension {d}",
                matrix.side()
            )));
        }
        let mut cdims = source_dims.clone();
        cdims.extend_from_slice(&source_dims);
        Ok(Self {
            matrix: matrix.with_dims(cdims)?,
            source_dims,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Inverse of [`Superoperator::choi`].
    pub fn to_superoperator(&self) -> Superoperator {
        let d: usize = self.source_dims.iter().product();
        let scale = d as f64;
        let m = ComplexMatrix::from_fn(&[d * d], |r, c| {
            let (i, j) = (r % d, r / d);
            let (k, l) = (c % d, c / d);
            self.matrix[(i * d + k, j * d + l)] * scale
        });
        Superoperator {
            matrix: m,
            dims: self.source_dims.clone(),
        }
    }
}

/// Completely positive map in Kraus form.
#[derive(Clone, Debug)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
    dims: Vec<usize>,
    trace_preserving_required: bool,
    superop: Superoperator,
    choi: ChoiMatrix,
}

impl AsRef<Superoperator> for Channel {
    fn as_ref(&self) -> &Superoperator {
        &self.superop
    }
}

impl Channel {
    /// Builds a channel from Kraus operators acting on a system with the
    /// given subsystem dimensions. When `require_tp` is set the Kraus
    /// operators must satisfy `sum A^dagger A = I` to within [`TP_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>, dims: Vec<usize>, require_tp: bool) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch("no Kraus operators".into()));
        }
        let d: usize = dims.iter().product();
        let kraus = kraus
            .into_iter()
            .map(|k| {
                if k.side() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "Kraus operator of side {} on system dimension {d}",
                        k.side()
                    )));
                }
                k.with_dims(dims.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        if require_tp {
            let deficit = tp_deficit(&kraus);
            if deficit > TP_TOL {
                return Err(Error::NotTracePreserving(deficit));
            }
        }
        let superop = kraus_superoperator(&kraus, &dims);
        let choi = kraus_choi(&kraus, &dims);
        Ok(Self {
            kraus,
            dims,
            trace_preserving_required: require_tp,
            superop,
            choi,
        })
    }

    /// Unitary conjugation `rho -> U rho U^dagger`; the dims of `u` are kept.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let err = u.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        Self::new(vec![u.clone()], u.dims().to_vec(), true)
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self::new(vec![ComplexMatrix::identity(dims)], dims.to_vec(), true)
            .expect("identity is a channel")
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn trace_preserving_required(&self) -> bool {
        self.trace_preserving_required
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.superop
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.choi
    }

    /// The single Kraus operator when the channel is a unitary conjugation.
    pub fn as_unitary(&self) -> Option<&ComplexMatrix> {
        match self.kraus.as_slice() {
            [u] if u.is_unitary(UNITARY_TOL) => Some(u),
            _ => None,
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.side() != self.side() {
            return Err(Error::DimensionMismatch(
                "state does not match channel".into(),
            ));
        }
        let mut out = ComplexMatrix::zeros(rho.dims());
        for a in &self.kraus {
            out = &out + &(&(a * rho) * &a.adjoint());
        }
        Ok(out)
    }

    /// Parallel composition on the concatenated subsystem list.
    pub fn tensor(&self, other: &Channel) -> Result<Self> {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kron(b)))
            .collect();
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(
            kraus,
            dims,
            self.trace_preserving_required && other.trace_preserving_required,
        )
    }

    /// Sequential composition: `self` acts first, then `next`.
    pub fn then(&self, next: &Channel) -> Result<Self> {
        if self.dims != next.dims {
            return Err(Error::DimensionMismatch(format!(
                "composing channels on {:?} and {:?}",
                self.dims, next.dims
            )));
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        Self::new(
            kraus,
            self.dims.clone(),
            self.trace_preserving_required && next.trace_preserving_required,
        )
    }
}

/// Choi matrix `(M (x) id)[|alpha><alpha|]` of a channel.
pub fn choi_of(ch: &Channel) -> &ChoiMatrix {
    ch.choi()
}

/// Superoperator `sum_k conj(A_k) (x) A_k` of a channel.
pub fn superoperator_of(ch: &Channel) -> &Superoperator {
    ch.superoperator()
}

/// Superoperator of `outer . inner` (inner acts first).
pub fn compose(
    outer: &impl AsRef<Superoperator>,
    inner: &impl AsRef<Superoperator>,
) -> Result<Superoperator> {
    let (o, i) = (outer.as_ref(), inner.as_ref());
    if o.dims != i.dims {
        return Err(Error::DimensionMismatch(format!(
            "composing maps on {:?} and {:?}",
            o.dims, i.dims
        )));
    }
    Ok(Superoperator {
        matrix: &o.matrix * &i.matrix,
        dims: o.dims.clone(),
    })
}

/// Partial transposition of one subsystem as a (non-CP) superoperator.
pub fn transpose_superoperator(subsystem: usize, dims: &[usize]) -> Result<Superoperator> {
    if subsystem >= dims.len() {
        return Err(Error::SubsystemOutOfRange {
            index: subsystem,
            count: dims.len(),
        });
    }
    let d: usize = dims.iter().product();
    let stride: usize = dims[subsystem + 1..].iter().product();
    let ds = dims[subsystem];
    let mut m = ComplexMatrix::zeros(&[d * d]);
    for i in 0..d {
        let di = (i / stride) % ds;
        for j in 0..d {
            let dj = (j / stride) % ds;
            let ni = i - di * stride + dj * stride;
            let nj = j - dj * stride + di * stride;
            m[(ni + nj * d, i + j * d)] = ONE;
        }
    }
    Ok(Superoperator {
        matrix: m,
        dims: dims.to_vec(),
    })
}

/// Recovers Kraus operators from a Choi matrix. Eigenvectors with eigenvalue
/// above [`KRAUS_DROP_TOL`] are reshaped row-major and scaled by
/// `sqrt(lambda * D)`. The result is not required to be trace preserving.
pub fn kraus_from_choi(c: &ChoiMatrix) -> Result<Channel> {
    let eig = hermitian_eig(c.matrix())?;
    if eig.min() < -KRAUS_PSD_TOL {
        return Err(Error::NotCompletelyPositive(eig.min()));
    }
    let d: usize = c.source_dims().iter().product();
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda <= KRAUS_DROP_TOL {
            continue;
        }
        let scale = (lambda * d as f64).sqrt();
        let v = eig.vector(k);
        let data = v.iter().map(|z| z * scale).collect();
        kraus.push(ComplexMatrix::new(data, c.source_dims().to_vec())?);
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(c.source_dims()));
    }
    Channel::new(kraus, c.source_dims().to_vec(), false)
}

/// Structural flags of a channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelClass {
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    pub tp_deficit: f64,
    pub unital_deficit: f64,
    pub min_choi_eigenvalue: f64,
}

pub fn classify(ch: &Channel) -> ChannelClass {
    let tp_deficit = tp_deficit(&ch.kraus);
    let unital_deficit = unital_deficit(&ch.kraus);
    let min_choi_eigenvalue = hermitian_eig(ch.choi().matrix())
        .map(|e| e.min())
        .unwrap_or(f64::NEG_INFINITY);
    ChannelClass {
        cp: min_choi_eigenvalue >= -CP_TOL,
        tp: tp_deficit <= TP_TOL,
        unital: unital_deficit <= TP_TOL,
        tp_deficit,
        unital_deficit,
        min_choi_eigenvalue,
    }
}

/// `max |sum A^dagger A - I|`.
pub fn tp_deficit(kraus: &[ComplexMatrix]) -> f64 {
    let dims = kraus[0].dims();
    let mut sum = ComplexMatrix::zeros(dims);
    for a in kraus {
        sum = &sum + &(&a.adjoint() * a);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dims))
}

/// `max |sum A A^dagger - I|`.
pub fn unital_deficit(kraus: &[ComplexMatrix]) -> f64 {
    let dims = kraus[0].dims();
    let mut sum = ComplexMatrix::zeros(dims);
    for a in kraus {
        sum = &sum + &(a * &a.adjoint());
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dims))
}

fn kraus_superoperator(kraus: &[ComplexMatrix], dims: &[usize]) -> Superoperator {
    let d: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(&[d * d]);
    for a in kraus {
        m = &m + &a.conj().kron(a);
    }
    Superoperator {
        matrix: m.with_dims(vec![d * d]).expect("side d^2"),
        dims: dims.to_vec(),
    }
}

fn kraus_choi(kraus: &[ComplexMatrix], dims: &[usize]) -> ChoiMatrix {
    let d: usize = dims.iter().product();
    let mut cdims = dims.to_vec();
    cdims.extend_from_slice(dims);
    let mut m = ComplexMatrix::zeros(&cdims);
    // (A (x) I) sum_k |k>|k> has amplitude A[i][k] at index i*d + k.
    for a in kraus {
        let v = a.data();
        for r in 0..d * d {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..d * d {
                m[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    ChoiMatrix {
        matrix: m.scale(1.0 / d as f64),
        source_dims: dims.to_vec(),
    }
}

pub(crate) fn vectorize(rho: &ComplexMatrix) -> Vec<C64> {
    let d = rho.side();
    (0..d * d).map(|k| rho[(k % d, k / d)]).collect()
}

pub(crate) fn unvectorize(v: &[C64], dims: Vec<usize>) -> Result<ComplexMatrix> {
    let d: usize = dims.iter().product();
    if v.len() != d * d {
        return Err(Error::DimensionMismatch("vector length is not d^2".into()));
    }
    Ok(ComplexMatrix::from_fn(&dims, |i, j| v[i + j * d]))
}

/// `CNOT = diag-blocks(I, X)`, control on the first qubit.
pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(
        &[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ],
        vec![2, 2],
    )
    .expect("4x4")
}

/// Two-qutrit controlled phase `diag(1, ..., 1, -1)`.
pub fn z3_matrix() -> ComplexMatrix {
    let mut diag = vec![ONE; 9];
    diag[8] = -ONE;
    ComplexMatrix::from_diag(&diag, vec![3, 3]).expect("9x9")
}

/// Generalized Pauli (clock-and-shift) basis `X^a Z^b` on dimension `d`,
/// ordered with the identity first. For `d = 2` returns `I, X, Y, Z`.
pub fn unitary_operator_basis(d: usize) -> Vec<ComplexMatrix> {
    if d == 2 {
        return Pauli::ALL.iter().map(|p| p.matrix()).collect();
    }
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b)|k> = omega^{bk} |k + a>
            basis.push(ComplexMatrix::from_fn(&[d], |i, k| {
                if i == (k + a) % d {
                    omega.powu((b * k) as u32)
                } else {
                    ZERO
                }
            }));
        }
    }
    basis
}

/// Names of the built-in channel constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelName {
    Identity,
    Depolarizing,
    LocalDepolarizing,
    FullyDepolarizing,
    Unitary,
    Cnot,
    Z3,
    RandomUnitary,
    Sru,
}

impl ChannelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelName::Identity => "identity",
            ChannelName::Depolarizing => "depolarizing",
            ChannelName::LocalDepolarizing => "local_depolarizing",
            ChannelName::FullyDepolarizing => "fully_depolarizing",
            ChannelName::Unitary => "unitary",
            ChannelName::Cnot => "cnot",
            ChannelName::Z3 => "z3",
            ChannelName::RandomUnitary => "random_unitary",
            ChannelName::Sru => "sru",
        }
    }
}

impl FromStr for ChannelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identity" => ChannelName::Identity,
            "depolarizing" => ChannelName::Depolarizing,
            "local_depolarizing" => ChannelName::LocalDepolarizing,
            "fully_depolarizing" => ChannelName::FullyDepolarizing,
            "unitary" => ChannelName::Unitary,
            "cnot" => ChannelName::Cnot,
            "z3" => ChannelName::Z3,
            "random_unitary" => ChannelName::RandomUnitary,
            "sru" => ChannelName::Sru,
            other => return Err(Error::UnknownChannel(other.to_string())),
        })
    }
}

/// Parameters for [`make_named_channel`]; each constructor reads only the
/// fields it needs.
#[derive(Clone, Debug, Default)]
pub struct ChannelParams {
    /// Noise probability for the depolarizing families.
    pub p: Option<f64>,
    /// Target state of the fully depolarizing channel (default `I/D`).
    pub sigma: Option<ComplexMatrix>,
    pub unitary: Option<ComplexMatrix>,
    pub probs: Option<Vec<f64>>,
    /// Unitaries of a random-unitary channel.
    pub unitaries: Option<Vec<ComplexMatrix>>,
    /// Local unitaries on the first / second subsystem of an SRU channel.
    pub a_unitaries: Option<Vec<ComplexMatrix>>,
    pub b_unitaries: Option<Vec<ComplexMatrix>>,
}

pub fn make_named_channel(
    name: ChannelName,
    params: &ChannelParams,
    dims: &[usize],
) -> Result<Channel> {
    let expect_dims = |want: &[usize]| {
        if dims != want {
            Err(Error::DimensionMismatch(format!(
                "{} acts on {want:?}, got {dims:?}",
                name.as_str()
            )))
        } else {
            Ok(())
        }
    };
    match name {
        ChannelName::Identity => Ok(Channel::identity(dims)),
        ChannelName::Cnot => {
            expect_dims(&[2, 2])?;
            Channel::unitary(&cnot_matrix())
        }
        ChannelName::Z3 => {
            expect_dims(&[3, 3])?;
            Channel::unitary(&z3_matrix())
        }
        ChannelName::Depolarizing => {
            let p = probability(params.p.ok_or(Error::MissingParameter("p"))?)?;
            depolarizing(p, dims)
        }
        ChannelName::LocalDepolarizing => {
            let p = probability(params.p.ok_or(Error::MissingParameter("p"))?)?;
            let mut parts = dims.iter().map(|&d| depolarizing(p, &[d]));
            let first = parts.next().expect("non-empty dims")?;
            parts.try_fold(first, |acc, ch| acc.tensor(&ch?))
        }
        ChannelName::FullyDepolarizing => {
            let d: usize = dims.iter().product();
            let sigma = match &params.sigma {
                Some(s) => s.clone().with_dims(dims.to_vec())?,
                None => ComplexMatrix::identity(dims).scale(1.0 / d as f64),
            };
            fully_depolarizing(&sigma)
        }
        ChannelName::Unitary => {
            let u = params
                .unitary
                .as_ref()
                .ok_or(Error::MissingParameter("unitary"))?;
            Channel::unitary(&u.clone().with_dims(dims.to_vec())?)
        }
        ChannelName::RandomUnitary => {
            let probs = params
                .probs
                .as_ref()
                .ok_or(Error::MissingParameter("probs"))?;
            let us = params
                .unitaries
                .as_ref()
                .ok_or(Error::MissingParameter("unitaries"))?;
            check_distribution(probs, us.len())?;
            let kraus = probs
                .iter()
                .zip(us)
                .map(|(&p, u)| {
                    let err = u.unitarity_error();
                    if err > UNITARY_TOL {
                        return Err(Error::NotUnitary(err));
                    }
                    Ok(u.clone().with_dims(dims.to_vec())?.scale(p.sqrt()))
                })
                .collect::<Result<Vec<_>>>()?;
            Channel::new(kraus, dims.to_vec(), true)
        }
        ChannelName::Sru => {
            if dims.len() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "sru acts on two subsystems, got {dims:?}"
                )));
            }
            let probs = params
                .probs
                .as_ref()
                .ok_or(Error::MissingParameter("probs"))?;
            let a = params
                .a_unitaries
                .as_ref()
                .ok_or(Error::MissingParameter("a_unitaries"))?;
            let b = params
                .b_unitaries
                .as_ref()
                .ok_or(Error::MissingParameter("b_unitaries"))?;
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch(
                    "a_unitaries and b_unitaries differ in length".into(),
                ));
            }
            check_distribution(probs, a.len())?;
            sru_channel(probs, a, b, dims)
        }
    }
}

/// `sum_k p_k (V_k (x) W_k) rho (V_k (x) W_k)^dagger`.
pub fn sru_channel(
    probs: &[f64],
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
    dims: &[usize],
) -> Result<Channel> {
    let kraus = probs
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&p, (v, w))| {
            for u in [v, w] {
                let err = u.unitarity_error();
                if err > UNITARY_TOL {
                    return Err(Error::NotUnitary(err));
                }
            }
            if v.side() != dims[0] || w.side() != dims[1] {
                return Err(Error::DimensionMismatch(
                    "local unitary does not match subsystem dimension".into(),
                ));
            }
            v.kron(w)
                .with_dims(dims.to_vec())
                .map(|k| k.scale(p.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::new(kraus, dims.to_vec(), true)
}

/// Depolarizing channel on the whole space of dimension `D = prod(dims)`:
/// Kraus operators `sqrt(1-p) I` and `sqrt(p/(D^2-1)) P` for the non-identity
/// elements `P` of the unitary operator basis. For `D = 2` this is
/// `{sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}`.
pub fn depolarizing(p: f64, dims: &[usize]) -> Result<Channel> {
    let p = probability(p)?;
    let d: usize = dims.iter().product();
    let basis = unitary_operator_basis(d);
    let weight = (p / (d * d - 1) as f64).sqrt();
    let kraus: Vec<ComplexMatrix> = basis
        .into_iter()
        .enumerate()
        .filter_map(|(k, u)| {
            let w = if k == 0 { (1.0 - p).sqrt() } else { weight };
            (w > 0.0).then(|| u.scale(w))
        })
        .collect();
    Channel::new(kraus, dims.to_vec(), true)
}

/// Replacement channel `rho -> Tr[rho] sigma`.
pub fn fully_depolarizing(sigma: &ComplexMatrix) -> Result<Channel> {
    let herm = sigma.hermiticity_error();
    if herm > 1e-10 {
        return Err(Error::InvalidState(format!(
            "sigma is not Hermitian ({herm:.3e})"
        )));
    }
    if (sigma.trace() - ONE).norm() > 1e-10 {
        return Err(Error::InvalidState("sigma does not have unit trace".into()));
    }
    let eig = hermitian_eig(&sigma.hermitian_part())?;
    if eig.min() < -1e-10 {
        return Err(Error::InvalidState(format!(
            "sigma has negative eigenvalue {:.3e}",
            eig.min()
        )));
    }
    let d = sigma.side();
    let dims = sigma.dims().to_vec();
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-14 {
            continue;
        }
        let v = eig.vector(k);
        for j in 0..d {
            let mut e = vec![ZERO; d];
            e[j] = ONE;
            let v_scaled: Vec<C64> = v.iter().map(|z| z * lambda.sqrt()).collect();
            kraus.push(ComplexMatrix::outer(&v_scaled, &e, dims.clone())?);
        }
    }
    Channel::new(kraus, dims, true)
}

fn probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidProbability(format!("p = {p} not in [0, 1]")))
    }
}

fn check_distribution(probs: &[f64], count: usize) -> Result<()> {
    if probs.len() != count || probs.is_empty() {
        return Err(Error::InvalidProbability(format!(
            "{} probabilities for {count} operators",
            probs.len()
        )));
    }
    if let Some(&bad) = probs.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidProbability(format!(
            "p = {bad} not in [0, 1]"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidProbability(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}
