//! Seeded random-state generators.
//!
//! Ginibre construction (`G G^dagger / tr`) for full-rank density operators;
//! used by the test suites and the simulation commands. Samplers take an
//! explicit RNG so callers control seeding; none of them share state.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::densmat::{basis_index, DensityMatrix};
use crate::linalg::ComplexMatrix;
use crate::photonics::TwoPhotonState;
use crate::real::Real;

fn std_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.sample::<f64, _>(StandardNormal))
}

/// Complex Ginibre matrix normalized into a density operator:
/// Hermitian, PSD, unit trace by construction.
pub fn ginibre_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(n, |_, _| Complex::new(std_normal(rng), std_normal(rng)));
    let gdag = g.adjoint();
    let gg = g.mul(&gdag).expect("same dimension");
    let tr = gg.trace().re;
    gg.scale(T::one() / tr)
}

/// Random full-rank bipartite state on the whole `d^2`-dimensional space.
pub fn random_bipartite_density<T: Real, R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> DensityMatrix<T> {
    DensityMatrix::new_unchecked(ginibre_density(d * d, rng), d)
}

/// Random maximally correlated state: a Ginibre-sampled `d x d` correlated
/// block embedded on the `|k,k>` diagonal subspace.
pub fn random_mc_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix<T> {
    let alpha = ginibre_density::<T, R>(d, rng);
    let mut mat = ComplexMatrix::zeros(d * d);
    for u in 0..d {
        for v in 0..d {
            mat[(basis_index(u, u, d), basis_index(v, v, d))] = alpha[(u, v)];
        }
    }
    DensityMatrix::new_unchecked(mat, d)
}

/// Uniform point on the probability simplex (normalized exponentials).
pub fn random_simplex<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let mut v: Vec<T> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            T::of(-u.ln())
        })
        .collect();
    let s: T = v.iter().copied().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Random diagonal noise state (uniform over the off-diagonal simplex).
pub fn random_noise_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix<T> {
    let lambda = random_simplex::<T, R>(d * (d - 1), rng);
    DensityMatrix::diagonal_noise(&lambda).expect("simplex sample is a valid noise vector")
}

/// Random normalized two-photon mode superposition over `d` mode pairs.
pub fn random_two_photon<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> TwoPhotonState<T> {
    let amps: Vec<Complex<T>> = (0..d)
        .map(|_| Complex::new(std_normal(rng), std_normal(rng)))
        .collect();
    TwoPhotonState::normalized(amps).expect("gaussian vector is nonzero almost surely")
}

/// Haar-like random unitary: the eigenvector matrix of a Ginibre-Hermitian
/// sample. Good enough for basis-invariance tests.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre_density::<T, R>(n, rng)
        .hermitian_eigen()
        .expect("Hermitian by construction")
        .vectors
}
