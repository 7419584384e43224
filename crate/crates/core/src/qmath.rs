//! Dense complex linear algebra over multi-subsystem Hilbert spaces.
//!
//! Every operator (state, gate, witness, superoperator) is carried by a
//! [`ComplexMatrix`]: a row-major square array together with the list of
//! subsystem dimensions whose product is the side length. Subsystem `0` is
//! the most significant factor of the Kronecker ordering.
//!
//! Spectral routines (Hermitian eigendecomposition, SVD, QR) are delegated to
//! `nalgebra`; everything that depends on the subsystem structure is
//! implemented here.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Reconstruction tolerance for spectral decompositions.
pub const SPECTRAL_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix with an explicit subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Vec<C64>,
    dims: Vec<usize>,
    side: usize,
}

impl ComplexMatrix {
    pub fn new(data: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let side = checked_side(&dims)?;
        if data.len() != side * side {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {side}x{side} matrix",
                data.len()
            )));
        }
        Ok(Self { data, dims, side })
    }

    /// Builds a matrix from rows; all rows must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: &[Vec<C64>], dims: Vec<usize>) -> Result<Self> {
        let data: Vec<C64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::DimensionMismatch(
                "matrix rows are not square".into(),
            ));
        }
        Self::new(data, dims)
    }

    pub fn from_real_rows(rows: &[&[f64]], dims: Vec<usize>) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows, dims)
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let side = dims.iter().product();
        Self {
            data: vec![ZERO; side * side],
            dims: dims.to_vec(),
            side,
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let mut m = Self::zeros(dims);
        for i in 0..m.side {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dims);
        for i in 0..m.side {
            for j in 0..m.side {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[C64], dims: Vec<usize>) -> Result<Self> {
        let side = checked_side(&dims)?;
        if diag.len() != side {
            return Err(Error::DimensionMismatch(format!(
                "diagonal of length {} for side {side}",
                diag.len()
            )));
        }
        let mut m = Self::zeros(&dims);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        Ok(m)
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64], dims: Vec<usize>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(
                "outer product of unequal vectors".into(),
            ));
        }
        let n = a.len();
        let data = (0..n * n).map(|k| a[k / n] * b[k % n].conj()).collect();
        Self::new(data, dims)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Relabels the subsystem structure without touching the entries.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        if checked_side(&dims)? != self.side {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} do not multiply to side {}",
                self.side
            )));
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.side)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(&self.dims, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.dims, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            data: self.data.iter().map(|&z| f(z)).collect(),
            dims: self.dims.clone(),
            side: self.side,
        }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        self.map(|z| z * c)
    }

    pub fn trace(&self) -> C64 {
        (0..self.side).map(|i| self[(i, i)]).sum()
    }

    /// `Tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.side, other.side, "trace_product side mismatch");
        let n = self.side;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.side, other.side, "max_abs_diff side mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.side;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest entrywise modulus of `U^dagger U - I`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = &self.adjoint() * self;
        prod.max_abs_diff(&Self::identity(&self.dims))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(&self.dims, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.side, "apply: vector length mismatch");
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<v| M |v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Kronecker product; the subsystem list is the concatenation of both.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.side, other.side);
        let side = n * m;
        let mut data = vec![ZERO; side * side];
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * side + j * m;
                    for l in 0..m {
                        data[row + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { data, dims, side }
    }

    /// Traces out every subsystem not listed in `keep`. The kept subsystems
    /// appear in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let count = self.dims.len();
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&k| k >= count) {
            return Err(Error::SubsystemOutOfRange { index: bad, count });
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let traced: Vec<usize> = (0..count).filter(|q| !keep.contains(q)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&q| self.dims[q]).collect();

        let split: Vec<(usize, usize)> = (0..self.side)
            .map(|idx| {
                let digits = to_digits(idx, &self.dims);
                let kept = from_digits(keep.iter().map(|&q| digits[q]), &kept_dims);
                let rest = from_digits(traced.iter().map(|&q| digits[q]), &traced_dims);
                (kept, rest)
            })
            .collect();

        let mut out = Self::zeros(&kept_dims);
        for i in 0..self.side {
            for j in 0..self.side {
                if split[i].1 == split[j].1 {
                    out[(split[i].0, split[j].0)] += self[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Transposes the indices of one subsystem.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<Self> {
        let count = self.dims.len();
        if subsystem >= count {
            return Err(Error::SubsystemOutOfRange {
                index: subsystem,
                count,
            });
        }
        let stride: usize = self.dims[subsystem + 1..].iter().product();
        let d = self.dims[subsystem];
        let digit = |idx: usize| (idx / stride) % d;
        let mut out = Self::zeros(&self.dims);
        for i in 0..self.side {
            let di = digit(i);
            for j in 0..self.side {
                let dj = digit(j);
                let ni = i - di * stride + dj * stride;
                let nj = j - dj * stride + di * stride;
                out[(ni, nj)] = self[(i, j)];
            }
        }
        Ok(out)
    }

    /// Reorders subsystems so that subsystem `q` of the result is subsystem
    /// `perm[q]` of the input.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_map(&self.dims, perm)?;
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = Self::zeros(&new_dims);
        for i in 0..self.side {
            for j in 0..self.side {
                out[(map[i], map[j])] = self[(i, j)];
            }
        }
        Ok(out)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.side, self.side, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(
                "non-square nalgebra matrix".into(),
            ));
        }
        let n = m.nrows();
        let data = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        Self::new(data, dims)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.side + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.side + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.side, rhs.side, "matrix product side mismatch");
        let n = self.side;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let out = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix {
            data,
            dims: self.dims.clone(),
            side: n,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.side, rhs.side, "matrix sum side mismatch");
        ComplexMatrix {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
            dims: self.dims.clone(),
            side: self.side,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.side, rhs.side, "matrix difference side mismatch");
        ComplexMatrix {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
            dims: self.dims.clone(),
            side: self.side,
        }
    }
}

fn checked_side(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("invalid dims {dims:?}")));
    }
    Ok(dims.iter().product())
}

/// Mixed-radix digits of `idx`, most significant first.
pub(crate) fn to_digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (q, &d) in dims.iter().enumerate().rev() {
        digits[q] = idx % d;
        idx /= d;
    }
    digits
}

pub(crate) fn from_digits(digits: impl Iterator<Item = usize>, dims: &[usize]) -> usize {
    digits.zip(dims).fold(0, |acc, (x, &d)| acc * d + x)
}

/// For each input basis index, its position after permuting subsystems.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() {
        return Err(Error::BadPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= dims.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::BadPermutation(perm.to_vec()));
        }
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let side: usize = dims.iter().product();
    Ok((0..side)
        .map(|idx| {
            let digits = to_digits(idx, dims);
            from_digits(perm.iter().map(|&p| digits[p]), &new_dims)
        })
        .collect())
}

/// Normalized state vector with subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let side = checked_side(&dims)?;
        if amplitudes.len() != side {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {side}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes, self.dims.clone())
            .expect("dims validated at construction")
    }

    /// Applies a unitary; the subsystem structure of the state is kept.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.side() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(
                "operator does not act on state".into(),
            ));
        }
        Self::new(u.apply(&self.amplitudes), self.dims.clone())
    }
}

/// `(1/sqrt d) sum_k |k>|k>` on dims `[d, d]`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amplitudes = vec![ZERO; d * d];
    for k in 0..d {
        amplitudes[k * d + k] = amp;
    }
    // Renormalize so the norm check holds to the last bit for every d.
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    PureState::new(amplitudes, vec![d, d])
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.side())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.side()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.dims(), |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermitianEig { values, vectors })
}

/// Singular value decomposition `m = U diag(s) V^dagger` with descending
/// singular values. Returned as (U, s, V^dagger).
pub(crate) fn svd_sorted(m: DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^dagger");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]);
    let v_sorted = DMatrix::from_fn(order.len(), v_t.ncols(), |k, j| v_t[(order[k], j)]);
    (u_sorted, order.iter().map(|&k| s[k]).collect(), v_sorted)
}

/// Unitary factor `W V^dagger` of the polar decomposition of `f = W S V^dagger`
/// together with the trace norm of `f`. The unitary maximizes
/// `|Tr[U^dagger f]|` over all unitaries `U`.
pub fn polar_unitary(f: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let (u, s, v_t) = svd_sorted(f.to_nalgebra());
    let w = u * v_t;
    let unitary = ComplexMatrix::from_nalgebra(&w, f.dims().to_vec())
        .expect("square input gives square factor");
    (unitary, s.iter().sum())
}

/// Haar-distributed unitary from a seeded generator.
pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(d, &mut rng)
}

/// Haar-distributed unitary drawn from `rng`: QR of a complex Gaussian matrix
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let z = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            ONE
        };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q, vec![d]).expect("square QR factor")
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let (a, b, c, d) = match self {
            Pauli::I => (ONE, ZERO, ZERO, ONE),
            Pauli::X => (ZERO, ONE, ONE, ZERO),
            Pauli::Y => (ZERO, -I, I, ZERO),
            Pauli::Z => (ONE, ZERO, ZERO, -ONE),
        };
        ComplexMatrix::new(vec![a, b, c, d], vec![2]).expect("2x2")
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis with a real sign, e.g. `-XIZY`.
/// Letter `0` acts on the most significant qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub negative: bool,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self {
            letters,
            negative: false,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Letters only, without the sign.
    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.letter()).collect()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mats: Vec<ComplexMatrix> = self.letters.iter().map(|p| p.matrix()).collect();
        kron_all(&mats).scale(self.sign())
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// Symplectic (x, z) bit pair per qubit.
    pub(crate) fn symplectic(&self) -> Vec<(bool, bool)> {
        self.letters
            .iter()
            .map(|p| match p {
                Pauli::I => (false, false),
                Pauli::X => (true, false),
                Pauli::Y => (true, true),
                Pauli::Z => (false, true),
            })
            .collect()
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let (negative, body) = match trimmed.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
        };
        let letters = body
            .chars()
            .map(Pauli::from_letter)
            .collect::<Option<Vec<_>>>()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::BadPauliString(s.to_string()))?;
        Ok(Self { letters, negative })
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}",
            if self.negative { '-' } else { '+' },
            self.label()
        )
    }
}

/// Kronecker product of a non-empty sequence of matrices.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .expect("kron_all needs at least one factor")
        .clone();
    iter.fold(first, |acc, m| acc.kron(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_hermitian(d: usize, dims: Vec<usize>, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(&dims, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        assert_eq!(a.side(), d);
        a.hermitian_part()
    }

    #[test]
    fn kron_identity_and_pauli_products() {
        let i2 = Pauli::I.matrix();
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(&[2, 2]));

        let xx = Pauli::X.matrix().kron(&Pauli::X.matrix());
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(xx.apply(&ket00), vec![ZERO, ZERO, ZERO, ONE]);

        let zz = Pauli::Z.matrix().kron(&Pauli::Z.matrix());
        let expected =
            ComplexMatrix::from_diag(&[c(1.0), c(-1.0), c(-1.0), c(1.0)], vec![2, 2]).unwrap();
        assert_eq!(zz, expected);
        assert_eq!(zz.dims(), &[2, 2]);
    }

    #[test]
    fn kron_is_associative() {
        let a = Pauli::Y.matrix();
        let b = ComplexMatrix::from_fn(&[3], |i, j| C64::new((i * 3 + j) as f64, -(j as f64)));
        let c = Pauli::X.matrix().scale(C64::new(2.0, 0.5));
        assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));

        let (a, b, c) = (haar_unitary(2, 1), haar_unitary(3, 2), haar_unitary(2, 3));
        assert!(a.kron(&b).kron(&c).max_abs_diff(&a.kron(&b.kron(&c))) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let rho = max_entangled(2).unwrap().projector();
        let half = ComplexMatrix::identity(&[2]).scale(0.5);
        assert!(rho.partial_trace(&[1]).unwrap().max_abs_diff(&half) < 1e-15);
        assert!(rho.partial_trace(&[0]).unwrap().max_abs_diff(&half) < 1e-15);

        let mixed = ComplexMatrix::identity(&[2, 2]).scale(0.25);
        assert!(mixed.partial_trace(&[0]).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = random_hermitian(2, vec![2], 5);
        let b = random_hermitian(3, vec![3], 6);
        let reduced = a.kron(&b).partial_trace(&[0]).unwrap();
        assert!(reduced.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        assert!(matches!(
            a.kron(&b).partial_trace(&[2]),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn partial_transpose_properties() {
        let m = random_hermitian(6, vec![2, 3], 11);
        let pt = m.partial_transpose(1).unwrap();
        assert_eq!(pt.partial_transpose(1).unwrap(), m);
        assert!((pt.trace() - m.trace()).norm() < 1e-14);

        // Real symmetric factor on the transposed side is unchanged.
        let ra = ComplexMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]], vec![2]).unwrap();
        let rb = random_hermitian(2, vec![2], 12);
        let prod = ra.kron(&rb);
        assert_eq!(prod.partial_transpose(0).unwrap(), prod);

        assert!(m.partial_transpose(2).is_err());
    }

    #[test]
    fn partial_transpose_of_bell_projector_spectrum() {
        let pt = max_entangled(2)
            .unwrap()
            .projector()
            .partial_transpose(0)
            .unwrap();
        let eig = hermitian_eig(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_moves_between_trace_factors() {
        let x = random_hermitian(4, vec![2, 2], 21);
        let y = random_hermitian(4, vec![2, 2], 22);
        let lhs = x.partial_transpose(0).unwrap().trace_product(&y);
        let rhs = x.trace_product(&y.partial_transpose(0).unwrap());
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn permute_round_trip_and_spectrum() {
        let bell = max_entangled(2).unwrap().projector();
        let acbd = bell.kron(&bell);
        let abcd = acbd.permute_subsystems(&[0, 2, 1, 3]).unwrap();
        assert_eq!(abcd.permute_subsystems(&[0, 2, 1, 3]).unwrap(), acbd);
        assert_eq!(acbd.permute_subsystems(&[0, 1, 2, 3]).unwrap(), acbd);

        let h = random_hermitian(12, vec![2, 3, 2], 31);
        let p = h.permute_subsystems(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[2, 2, 3]);
        let (e1, e2) = (hermitian_eig(&h).unwrap(), hermitian_eig(&p).unwrap());
        for (a, b) in e1.values.iter().zip(&e2.values) {
            assert!((a - b).abs() < 1e-12);
        }

        assert!(h.permute_subsystems(&[0, 0, 1]).is_err());
        assert!(h.permute_subsystems(&[0, 1]).is_err());
    }

    #[test]
    fn max_entangled_states() {
        let s = max_entangled(2).unwrap();
        let a = 1.0 / 2f64.sqrt();
        assert!((s.amplitudes()[0].re - a).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - a).abs() < 1e-15);
        assert_eq!(s.amplitudes()[1], ZERO);

        let s3 = max_entangled(3).unwrap();
        let nonzero: Vec<usize> = (0..9).filter(|&k| s3.amplitudes()[k] != ZERO).collect();
        assert_eq!(nonzero, vec![0, 4, 8]);
        let reduced = s3.projector().partial_trace(&[0]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(&[3]).scale(1.0 / 3.0)) < 1e-15);

        assert!(matches!(
            max_entangled(1),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn eig_of_simple_matrices() {
        let d = ComplexMatrix::from_diag(&[c(3.0), c(1.0), c(2.0)], vec![3]).unwrap();
        assert_eq!(hermitian_eig(&d).unwrap().values, vec![1.0, 2.0, 3.0]);

        let eig = hermitian_eig(&Pauli::X.matrix()).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14 && (eig.values[1] - 1.0).abs() < 1e-14);
        let minus = eig.vector(0);
        // |-> up to a global phase.
        assert!((minus[0] + minus[1]).norm() < 1e-12);
        assert!((minus[0].norm() - FRAC_1_SQRT_2).abs() < 1e-12);

        let not_herm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]], vec![2]).unwrap();
        assert!(matches!(
            hermitian_eig(&not_herm),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eig_reconstruction_tolerance() {
        for seed in 0..10 {
            let h = random_hermitian(9, vec![3, 3], 100 + seed);
            let eig = hermitian_eig(&h).unwrap();
            let v = &eig.vectors;
            let lambda = ComplexMatrix::from_diag(
                &eig.values.iter().map(|&x| c(x)).collect::<Vec<_>>(),
                vec![3, 3],
            )
            .unwrap();
            let rebuilt = &(v * &lambda) * &v.adjoint();
            assert!(rebuilt.max_abs_diff(&h) < SPECTRAL_TOL);
            assert!(v.unitarity_error() < SPECTRAL_TOL);
        }
    }

    #[test]
    fn haar_unitaries_are_unitary_and_deterministic() {
        for seed in 0..100 {
            for d in [2, 3] {
                assert!(haar_unitary(d, seed).unitarity_error() < 1e-12);
            }
        }
        assert_eq!(haar_unitary(3, 42), haar_unitary(3, 42));
        assert_ne!(haar_unitary(3, 42), haar_unitary(3, 43));
    }

    #[test]
    fn haar_second_moment() {
        // Integral of |Tr U|^2 over U(d) equals 1.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| haar_unitary(2, s).trace().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean |Tr U|^2 = {mean}");
    }

    #[test]
    fn pauli_strings() {
        let g: PauliString = "-XYZI".parse().unwrap();
        assert!(g.negative && g.weight() == 3 && g.label() == "XYZI");
        assert_eq!(g.to_string(), "-XYZI");
        assert_eq!(
            "+ZZ".parse::<PauliString>().unwrap().matrix(),
            Pauli::Z.matrix().kron(&Pauli::Z.matrix())
        );
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());

        let a: PauliString = "XX".parse().unwrap();
        let b: PauliString = "ZZ".parse().unwrap();
        let c: PauliString = "ZI".parse().unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.commutes_with(&c));
    }

    #[test]
    fn polar_unitary_maximizes_trace_overlap() {
        let f = random_hermitian(3, vec![3], 77).scale(C64::new(0.3, 0.8));
        let (u, norm) = polar_unitary(&f);
        assert!(u.unitarity_error() < 1e-12);
        let overlap = u.adjoint().trace_product(&f);
        assert!((overlap.re - norm).abs() < 1e-12 && overlap.im.abs() < 1e-12);
        for seed in 0..20 {
            let v = haar_unitary(3, seed);
            assert!(v.adjoint().trace_product(&f).norm() <= norm + 1e-12);
        }
    }
}
