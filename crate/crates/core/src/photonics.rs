//! Two-copy beamsplitter parity measurement of purity.
//!
//! Two identically prepared two-photon states interfere on a 50:50
//! beamsplitter; counting the photon-number split across the output ports
//! (4-0, 0-4 and 2-2 are even, 3-1 and 1-3 odd) gives a parity observable
//! whose expectation equals the squared state overlap, and hence the purity
//! when the inputs are identical. The closed form is a plain inner product;
//! [`fock_brute_force_parity`] reproduces it by expanding the full four-photon
//! output state with explicit creation-operator bookkeeping, which is the
//! independent check the closed form is tested against.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::densmat::{basis_index, DensityMatrix};
use crate::linalg::ComplexMatrix;
use crate::real::Real;
use crate::{diag_f64, Error, NumericPolicy, Result};

/// Largest mode count the Fock expansion accepts; beyond this the term
/// bookkeeping stops being "small".
pub const MAX_FOCK_DIM: usize = 12;

/// Two-photon state over `d` correlated mode pairs: amplitudes for a photon
/// pair occupying modes `(+m, -m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> TwoPhotonState<T> {
    /// Requires the amplitudes to be normalized already (`sum |a|^2 = 1`
    /// within 1e-10).
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm_sq: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::of(1e-10) {
            return Err(Error::NotNormalized {
                sum: diag_f64(norm_sq),
                tol: 1e-10,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes the amplitudes; errors on an all-zero vector.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm_sq: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= T::zero() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero amplitude vector".into(),
            ));
        }
        let inv = norm_sq.sqrt().recip();
        Ok(Self {
            amplitudes: amplitudes.iter().map(|a| a * inv).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `<self | other> = sum_m conj(a_m) b_m`.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Parity expectation for two pure states: `|<phi_k | phi_j>|^2`.
pub fn parity_expectation_pure<T: Real>(
    j: &TwoPhotonState<T>,
    k: &TwoPhotonState<T>,
) -> Result<T> {
    let overlap = k.overlap(j)?;
    Ok(overlap.norm_sqr().min(T::one()))
}

/// Parity expectation for two mixed states supported on the correlated
/// subspace: `sum_{j,k} psi_j phi_k |<phi_k | psi_j>|^2` over their
/// eigendecompositions. Equals the purity when both arguments are the same
/// state.
///
/// Errors if either state carries more than `support_mass_tol` probability
/// outside the correlated subspace.
pub fn parity_expectation_mixed<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
) -> Result<T> {
    if rho1.dim_subsystem() != rho2.dim_subsystem() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim_subsystem(),
            got: rho2.dim_subsystem(),
        });
    }
    let tol = NumericPolicy::<T>::default().support_mass_tol;
    let b1 = correlated_block(rho1, tol)?;
    let b2 = correlated_block(rho2, tol)?;
    let e1 = b1.hermitian_eigen()?;
    let e2 = b2.hermitian_eigen()?;
    let d = rho1.dim_subsystem();
    let mut expectation = T::zero();
    for j in 0..d {
        let w1 = e1.values[j].max(T::zero());
        if w1 <= T::zero() {
            continue;
        }
        for k in 0..d {
            let w2 = e2.values[k].max(T::zero());
            if w2 <= T::zero() {
                continue;
            }
            let mut overlap = Complex::new(T::zero(), T::zero());
            for r in 0..d {
                overlap += e1.vectors[(r, j)].conj() * e2.vectors[(r, k)];
            }
            expectation += w1 * w2 * overlap.norm_sqr();
        }
    }
    Ok(expectation.min(T::one()))
}

/// Extracts the `d x d` correlated block `<u,u| rho |v,v>`, checking that the
/// uncorrelated diagonal mass is below `tol`.
fn correlated_block<T: Real>(rho: &DensityMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let q = rho.correlation_profile().q;
    if q > tol {
        return Err(Error::SupportOutsideCorrelatedSubspace {
            mass: diag_f64(q),
            tol: diag_f64(tol),
        });
    }
    let d = rho.dim_subsystem();
    Ok(ComplexMatrix::from_fn(d, |u, v| {
        rho.matrix()[(basis_index(u, u, d), basis_index(v, v, d))]
    }))
}

/// Output port of the beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    C,
    D,
}

/// One occupied output mode: port, signed mode label (`+m`/`-m`), and photon
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeOccupation {
    pub port: Port,
    pub mode: i32,
    pub count: u32,
}

/// Four-photon output state in the orthonormal Fock basis: canonical
/// occupation multisets mapped to amplitudes.
#[derive(Debug, Clone)]
pub struct FockVector<T> {
    terms: BTreeMap<Vec<ModeOccupation>, Complex<T>>,
}

impl<T: Real> FockVector<T> {
    pub fn terms(&self) -> impl Iterator<Item = (&[ModeOccupation], Complex<T>)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm(&self) -> T {
        self.terms
            .values()
            .map(|a| a.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// `P(even) - P(odd)` under the photon-number split classification:
    /// 4-0, 2-2 and 0-4 are even, 3-1 and 1-3 odd.
    pub fn parity_expectation(&self) -> T {
        let mut even = T::zero();
        let mut odd = T::zero();
        for (key, amp) in &self.terms {
            let in_c: u32 = key
                .iter()
                .filter(|occ| occ.port == Port::C)
                .map(|occ| occ.count)
                .sum();
            if in_c % 2 == 0 {
                even += amp.norm_sqr();
            } else {
                odd += amp.norm_sqr();
            }
        }
        even - odd
    }
}

/// Expands the four-photon state after the 50:50 beamsplitter, term by term.
///
/// Input `j` enters port a, input `k` port b; the splitter maps
/// `a+ -> (c+ + d+)/sqrt(2)` and `b+ -> (c+ - d+)/sqrt(2)`. Repeated
/// creation operators on one mode pick up the bosonic `sqrt(n!)` factor, so
/// the result is expressed directly in the orthonormal occupation basis and
/// its norm must come out 1; that is checked here rather than assumed.
pub fn beamsplitter_output<T: Real>(
    j: &TwoPhotonState<T>,
    k: &TwoPhotonState<T>,
) -> Result<FockVector<T>> {
    if j.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            got: k.dim(),
        });
    }
    let d = j.dim();
    if d > MAX_FOCK_DIM {
        return Err(Error::FockDimensionTooLarge {
            d,
            max: MAX_FOCK_DIM,
        });
    }

    let quarter = T::of(0.25);
    let mut raw: BTreeMap<Vec<ModeOccupation>, Complex<T>> = BTreeMap::new();
    // The four creation operators per (m, n) term: modes +m, -m from port a
    // and +n, -n from port b. Each splits into (port, sign) branches.
    for (m, aj) in j.amplitudes().iter().enumerate() {
        for (n, ak) in k.amplitudes().iter().enumerate() {
            let coeff = aj * ak * quarter;
            let modes = [
                (m as i32 + 1, false),
                (-(m as i32 + 1), false),
                (n as i32 + 1, true),
                (-(n as i32 + 1), true),
            ];
            for branch in 0..16u32 {
                let mut sign_neg = false;
                let mut occ: Vec<(Port, i32)> = Vec::with_capacity(4);
                for (bit, &(mode, from_b)) in modes.iter().enumerate() {
                    let to_d = branch & (1 << bit) != 0;
                    if to_d && from_b {
                        sign_neg = !sign_neg;
                    }
                    occ.push((if to_d { Port::D } else { Port::C }, mode));
                }
                let key = canonical_key(&occ);
                let amp = if sign_neg { -coeff } else { coeff };
                raw.entry(key)
                    .and_modify(|a| *a += amp)
                    .or_insert(amp);
            }
        }
    }

    // Convert raw operator coefficients to orthonormal-basis amplitudes:
    // (a^dagger)^n |vac> = sqrt(n!) |n>.
    let mut terms = BTreeMap::new();
    for (key, amp) in raw {
        let mut factor = T::one();
        for occ in &key {
            let mut f = 1u32;
            for i in 2..=occ.count {
                f *= i;
            }
            factor *= T::of(f as f64).sqrt();
        }
        let scaled = amp * factor;
        if scaled.norm_sqr() > T::zero() {
            terms.insert(key, scaled);
        }
    }

    let out = FockVector { terms };
    let photons_ok = out
        .terms
        .keys()
        .all(|key| key.iter().map(|occ| occ.count).sum::<u32>() == 4);
    if !photons_ok {
        return Err(Error::InvalidArgument(
            "internal: output term does not carry 4 photons".into(),
        ));
    }
    let norm = out.norm();
    if (norm - T::one()).abs() > T::of(1e-9) {
        return Err(Error::NotNormalized {
            sum: diag_f64(norm),
            tol: 1e-9,
        });
    }
    Ok(out)
}

fn canonical_key(occ: &[(Port, i32)]) -> Vec<ModeOccupation> {
    let mut counts: BTreeMap<(Port, i32), u32> = BTreeMap::new();
    for &(port, mode) in occ {
        *counts.entry((port, mode)).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|((port, mode), count)| ModeOccupation { port, mode, count })
        .collect()
}

/// Parity expectation via the full Fock expansion. Must agree with
/// [`parity_expectation_pure`] to near machine precision; the two routes are
/// kept independent so that agreement is evidence, not tautology.
pub fn fock_brute_force_parity<T: Real>(
    j: &TwoPhotonState<T>,
    k: &TwoPhotonState<T>,
) -> Result<T> {
    Ok(beamsplitter_output(j, k)?.parity_expectation())
}

/// Simulates `shots` parity measurements on two copies of `rho`:
/// `p(even) = (1 + tr(rho^2)) / 2`. Returns `(even, odd)` tallies.
///
/// The expectation of `(even - odd) / shots` is the purity. Accepts any
/// valid state; for states on the correlated subspace the underlying
/// expectation coincides with [`parity_expectation_mixed`].
pub fn simulate_parity_counts<T: Real>(
    rho: &DensityMatrix<T>,
    shots: u64,
    seed: u64,
) -> Result<(u64, u64)> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let parity = rho.purity();
    let p_even = diag_f64((T::one() + parity) / T::of(2.0)).clamp(0.0, 1.0);
    let mut rng = StdRng::seed_from_u64(seed);
    let even = Binomial::new(shots, p_even)
        .expect("probability in range")
        .sample(&mut rng);
    Ok((even, shots - even))
}

/// Multinomial sample of `shots` computational-basis coincidences over the
/// `d^2` diagonal probabilities of `rho`. Row = subsystem A outcome.
pub fn simulate_coincidence_counts<T: Real>(
    rho: &DensityMatrix<T>,
    shots: u64,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let d = rho.dim_subsystem();
    let probs: Vec<f64> = rho.diagonal_probs().iter().map(|&p| diag_f64(p)).collect();
    let total: f64 = probs.iter().sum();
    let mut rng = StdRng::seed_from_u64(seed);

    // Conditional-binomial multinomial sampling.
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass_left = total;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == probs.len() - 1 || mass_left <= 0.0 {
            counts[i] = remaining;
            break;
        }
        let cond = (p / mass_left).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, cond)
            .expect("probability in range")
            .sample(&mut rng);
        counts[i] = n;
        remaining -= n;
        mass_left -= p;
    }

    Ok((0..d)
        .map(|i| (0..d).map(|j| counts[basis_index(i, j, d)]).collect())
        .collect())
}
