//! Seeded random ensembles of states and channels.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::channels::{sru_channel, Channel};
use crate::qmath::{haar_unitary_with, ComplexMatrix, C64};

/// Uniform draw from the probability simplex (Dirichlet with unit weights).
pub fn dirichlet_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Haar-random pure state on `dims`.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Vec<C64> {
    let d: usize = dims.iter().product();
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Full-rank random density matrix `G G^dagger / Tr` (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dims, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr).hermitian_part()
}

/// Random CPTP channel with `n_kraus` Kraus operators, cut from the first
/// `D` columns of a Haar unitary on `D * n_kraus` dimensions.
pub fn random_channel<R: Rng + ?Sized>(dims: &[usize], n_kraus: usize, rng: &mut R) -> Channel {
    let d: usize = dims.iter().product();
    let big = haar_unitary_with(d * n_kraus, rng);
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dims, |i, j| big[(k * d + i, j)]))
        .collect();
    Channel::new(kraus, dims.to_vec(), true).expect("isometry blocks are trace preserving")
}

/// A random separable-random-unitary channel together with its ingredients.
#[derive(Clone, Debug)]
pub struct RandomSru {
    pub channel: Channel,
    pub probs: Vec<f64>,
    pub a: Vec<ComplexMatrix>,
    pub b: Vec<ComplexMatrix>,
}

/// SRU channel on `[d, d]`: mixture size uniform in `1..=max_terms`, Haar
/// local unitaries, Dirichlet-uniform weights.
pub fn random_sru<R: Rng + ?Sized>(d: usize, max_terms: usize, rng: &mut R) -> RandomSru {
    let n = rng.random_range(1..=max_terms);
    let probs = dirichlet_uniform(n, rng);
    let a: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary_with(d, rng)).collect();
    let b: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary_with(d, rng)).collect();
    let channel = sru_channel(&probs, &a, &b, &[d, d]).expect("Haar factors are unitary");
    RandomSru {
        channel,
        probs,
        a,
        b,
    }
}

/// Random separable two-party state: a mixture of up to `max_terms` products
/// of Haar-random pure states.
pub fn random_separable_state<R: Rng + ?Sized>(
    da: usize,
    db: usize,
    max_terms: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let n = rng.random_range(1..=max_terms);
    let probs = dirichlet_uniform(n, rng);
    let mut rho = ComplexMatrix::zeros(&[da, db]);
    for p in probs {
        let a = random_pure(&[da], rng);
        let b = random_pure(&[db], rng);
        let pa = ComplexMatrix::outer(&a, &a, vec![da]).expect("square");
        let pb = ComplexMatrix::outer(&b, &b, vec![db]).expect("square");
        rho = &rho + &pa.kron(&pb).scale(p);
    }
    rho
}
