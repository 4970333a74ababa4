//! Bipartite density operators: construction, validation, spectra, purity,
//! entropy, partial trace, correlation structure, and majorization.
//!
//! A [`DensityMatrix`] represents a `d x d` bipartite system as a
//! `d^2 x d^2` Hermitian, trace-one, positive semidefinite matrix. Basis
//! kets `|i, j>` (subsystem A outcome `i`, subsystem B outcome `j`, both
//! zero-based here) map to the flat index `i * d + j`.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::ComplexMatrix;
use crate::real::{shannon_entropy, xlog2, Real};
use crate::{diag_f64, Error, NumericPolicy, Result};

/// Which party of the bipartite system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Density operator of a `d x d` bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dim_subsystem: usize,
    mat: ComplexMatrix<T>,
}

/// Flat basis index of `|i, j>` for subsystem dimension `d` (zero-based).
pub fn basis_index(i: usize, j: usize, d: usize) -> usize {
    i * d + j
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `mat` as a bipartite density operator with subsystem
    /// dimension `d` under the default [`NumericPolicy`].
    pub fn new(mat: ComplexMatrix<T>, d: usize) -> Result<Self> {
        Self::new_with_policy(mat, d, &NumericPolicy::default())
    }

    pub fn new_with_policy(
        mat: ComplexMatrix<T>,
        d: usize,
        policy: &NumericPolicy<T>,
    ) -> Result<Self> {
        if mat.dim() != d * d {
            return Err(Error::BadShape {
                dim: d * d,
                len: mat.dim() * mat.dim(),
            });
        }
        validate_density(&mat, policy)?;
        Ok(Self {
            dim_subsystem: d,
            mat,
        })
    }

    /// Wraps a matrix the caller guarantees to be a valid density operator
    /// (Hermitian, trace one, PSD) of shape `d^2 x d^2`.
    pub fn new_unchecked(mat: ComplexMatrix<T>, d: usize) -> Self {
        debug_assert_eq!(mat.dim(), d * d);
        Self {
            dim_subsystem: d,
            mat,
        }
    }

    /// Maximally correlated state with correlated block `alpha`:
    /// `<i,i| rho |j,j> = alpha[i][j]` and every other entry zero.
    ///
    /// `alpha` must itself be a valid `d x d` density matrix.
    pub fn maximally_correlated(alpha: &ComplexMatrix<T>) -> Result<Self> {
        validate_density(alpha, &NumericPolicy::default())?;
        let d = alpha.dim();
        let mut mat = ComplexMatrix::zeros(d * d);
        for u in 0..d {
            for v in 0..d {
                mat[(basis_index(u, u, d), basis_index(v, v, d))] = alpha[(u, v)];
            }
        }
        Ok(Self::new_unchecked(mat, d))
    }

    /// Diagonal noise state: `<i,j| rho |i,j> = lambda[(i,j)]` for `i != j`
    /// (lexicographic pair order) and zero on the correlated diagonal.
    pub fn diagonal_noise(lambda: &[T]) -> Result<Self> {
        let d = noise_dim(lambda.len())?;
        let policy = NumericPolicy::default();
        let mut sum = T::zero();
        for (idx, &l) in lambda.iter().enumerate() {
            if l < T::zero() {
                return Err(Error::NegativeEntry {
                    index: idx,
                    value: diag_f64(l),
                });
            }
            sum += l;
        }
        if (sum - T::one()).abs() > policy.prob_tol {
            return Err(Error::NotNormalized {
                sum: diag_f64(sum),
                tol: diag_f64(policy.prob_tol),
            });
        }
        let mut mat = ComplexMatrix::zeros(d * d);
        for (k, (i, j)) in offdiag_pairs(d).enumerate() {
            let idx = basis_index(i, j, d);
            mat[(idx, idx)] = Complex::new(lambda[k], T::zero());
        }
        Ok(Self::new_unchecked(mat, d))
    }

    /// Convex mixture `gamma * rho_mc + (1 - gamma) * rho_noise`.
    ///
    /// `rho_mc` must be maximally correlated and `rho_noise` a diagonal state
    /// supported off the correlated diagonal. The endpoints reproduce the
    /// inputs exactly.
    pub fn mix(rho_mc: &Self, rho_noise: &Self, gamma: T) -> Result<Self> {
        if rho_mc.dim_subsystem != rho_noise.dim_subsystem {
            return Err(Error::DimensionMismatch {
                expected: rho_mc.dim_subsystem,
                got: rho_noise.dim_subsystem,
            });
        }
        if !(T::zero()..=T::one()).contains(&gamma) {
            return Err(Error::GammaOutOfRange {
                gamma: diag_f64(gamma),
            });
        }
        let policy = NumericPolicy::<T>::default();
        if !rho_mc.is_maximally_correlated(policy.mc_tol) {
            let q = rho_mc.correlation_profile().q;
            return Err(Error::NotMaximallyCorrelated {
                mass: diag_f64(q),
                tol: diag_f64(policy.mc_tol),
            });
        }
        rho_noise.check_noise_form(policy.mc_tol)?;
        let d = rho_mc.dim_subsystem;
        let one_minus = T::one() - gamma;
        let mat = ComplexMatrix::from_fn(d * d, |r, c| {
            rho_mc.mat[(r, c)] * gamma + rho_noise.mat[(r, c)] * one_minus
        });
        Ok(Self::new_unchecked(mat, d))
    }

    /// Pure state `|psi><psi|` from a `d^2`-dimensional state vector.
    pub fn pure(psi: &[Complex<T>], d: usize) -> Result<Self> {
        if psi.len() != d * d {
            return Err(Error::BadShape {
                dim: d * d,
                len: psi.len(),
            });
        }
        let policy = NumericPolicy::<T>::default();
        let norm_sq: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > policy.prob_tol {
            return Err(Error::NotNormalized {
                sum: diag_f64(norm_sq),
                tol: diag_f64(policy.prob_tol),
            });
        }
        let mat = ComplexMatrix::from_fn(d * d, |r, c| psi[r] * psi[c].conj());
        Ok(Self::new_unchecked(mat, d))
    }

    /// The maximally entangled state `sum_k |k,k> / sqrt(d)` as a projector.
    pub fn maximally_entangled(d: usize) -> Self {
        let amp = Complex::new(T::one() / T::of(d as f64), T::zero());
        let mut mat = ComplexMatrix::zeros(d * d);
        for u in 0..d {
            for v in 0..d {
                mat[(basis_index(u, u, d), basis_index(v, v, d))] = amp;
            }
        }
        Self::new_unchecked(mat, d)
    }

    /// The maximally mixed state `I / d^2`.
    pub fn maximally_mixed(d: usize) -> Self {
        let p = T::one() / T::of((d * d) as f64);
        let mat = ComplexMatrix::from_fn(d * d, |r, c| {
            if r == c {
                Complex::new(p, T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        Self::new_unchecked(mat, d)
    }

    pub fn dim_subsystem(&self) -> usize {
        self.dim_subsystem
    }

    pub fn dim_total(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    /// `tr(rho^2)`, computed entrywise as `sum |rho_rc|^2` (Hermiticity).
    pub fn purity(&self) -> T {
        self.mat.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues as a [`Spectrum`]: non-increasing, with negative dust in
    /// `[-psd_tol, 0)` clipped to zero and the result renormalized to sum 1.
    ///
    /// Eigenvalues below `-psd_tol` mean the matrix was never a state and
    /// surface as an error, as does eigensolver non-convergence.
    pub fn eigenvalues(&self) -> Result<Spectrum<T>> {
        let eig = self.mat.hermitian_eigen()?;
        Spectrum::from_raw(eig.values, NumericPolicy::default().psd_tol)
    }

    /// Von Neumann entropy in bits, `-sum_k phi_k log2 phi_k`.
    pub fn von_neumann_entropy(&self) -> Result<T> {
        Ok(self.eigenvalues()?.entropy())
    }

    /// Reduced state of `keep`, tracing out the other party. Returns a
    /// `d x d` density matrix.
    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix<T> {
        let d = self.dim_subsystem;
        ComplexMatrix::from_fn(d, |a, b| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..d {
                acc += match keep {
                    Subsystem::A => self.mat[(basis_index(a, k, d), basis_index(b, k, d))],
                    Subsystem::B => self.mat[(basis_index(k, a, d), basis_index(k, b, d))],
                };
            }
            acc
        })
    }

    /// True iff every uncorrelated coincidence probability `<i,j| rho |i,j>`
    /// (`i != j`) is at most `tol`.
    pub fn is_maximally_correlated(&self, tol: T) -> bool {
        let d = self.dim_subsystem;
        offdiag_pairs(d).all(|(i, j)| {
            let idx = basis_index(i, j, d);
            self.mat[(idx, idx)].re <= tol
        })
    }

    /// Splits the diagonal into correlated entries `zeta`, uncorrelated
    /// entries, and their total `q`.
    pub fn correlation_profile(&self) -> CorrelationProfile<T> {
        let d = self.dim_subsystem;
        let zeta: Vec<T> = (0..d)
            .map(|k| {
                let idx = basis_index(k, k, d);
                self.mat[(idx, idx)].re.max(T::zero())
            })
            .collect();
        let lambda_offdiag: Vec<T> = offdiag_pairs(d)
            .map(|(i, j)| {
                let idx = basis_index(i, j, d);
                self.mat[(idx, idx)].re.max(T::zero())
            })
            .collect();
        let q = lambda_offdiag.iter().copied().sum();
        CorrelationProfile {
            zeta,
            lambda_offdiag,
            q,
        }
    }

    /// All `d^2` diagonal probabilities in flat basis order.
    pub fn diagonal_probs(&self) -> Vec<T> {
        (0..self.dim_total())
            .map(|i| self.mat[(i, i)].re.max(T::zero()))
            .collect()
    }

    fn check_noise_form(&self, tol: T) -> Result<()> {
        let n = self.dim_total();
        let d = self.dim_subsystem;
        for r in 0..n {
            for c in 0..n {
                if r != c && self.mat[(r, c)].norm_sqr().sqrt() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "noise state must be diagonal; entry ({r}, {c}) is nonzero"
                    )));
                }
            }
        }
        for k in 0..d {
            let idx = basis_index(k, k, d);
            if self.mat[(idx, idx)].re > tol {
                return Err(Error::InvalidArgument(format!(
                    "noise state has mass {} on the correlated entry |{k},{k}>",
                    self.mat[(idx, idx)].re
                )));
            }
        }
        Ok(())
    }
}

fn validate_density<T: Real>(mat: &ComplexMatrix<T>, policy: &NumericPolicy<T>) -> Result<()> {
    let dev = mat.hermiticity_deviation();
    if dev > policy.hermiticity_tol {
        return Err(Error::NotHermitian {
            deviation: diag_f64(dev),
            tol: diag_f64(policy.hermiticity_tol),
        });
    }
    let tr = mat.trace();
    if (tr.re - T::one()).abs() > policy.trace_tol || tr.im.abs() > policy.trace_tol {
        return Err(Error::TraceNotOne {
            trace: diag_f64(tr.re),
            tol: diag_f64(policy.trace_tol),
        });
    }
    let eig = mat.hermitian_eigen()?;
    if let Some(&min) = eig.values.last() {
        if min < -policy.psd_tol {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: diag_f64(min),
                tol: diag_f64(policy.psd_tol),
            });
        }
    }
    Ok(())
}

/// Lexicographic `(i, j)` pairs with `i != j`, zero-based.
pub(crate) fn offdiag_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn noise_dim(len: usize) -> Result<usize> {
    for d in 2..=256usize {
        if d * (d - 1) == len {
            return Ok(d);
        }
        if d * (d - 1) > len {
            break;
        }
    }
    Err(Error::InvalidArgument(format!(
        "noise vector length {len} is not d*(d-1) for any d >= 2"
    )))
}

/// Eigenvalues of a density operator, non-increasing, clipped and
/// renormalized to sum exactly one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub(crate) fn from_raw(mut values: Vec<T>, psd_tol: T) -> Result<Self> {
        for v in &mut values {
            if *v < T::zero() {
                if *v < -psd_tol {
                    return Err(Error::NotPositiveSemidefinite {
                        min_eigenvalue: diag_f64(*v),
                        tol: diag_f64(psd_tol),
                    });
                }
                *v = T::zero();
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sum: T = values.iter().copied().sum();
        if sum > T::zero() {
            for v in &mut values {
                *v /= sum;
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `sum_k phi_k^2`; equals the purity of the source operator.
    pub fn purity(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    /// `-sum_k phi_k log2 phi_k` in bits.
    pub fn entropy(&self) -> T {
        shannon_entropy(&self.values)
    }

    /// `sum_k phi_k log2 phi_k`, the negative entropy.
    pub fn neg_entropy(&self) -> T {
        self.values.iter().map(|&v| xlog2(v)).sum()
    }

    /// Number of eigenvalues above `tol`.
    pub fn nonzero_count(&self, tol: T) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }
}

/// Diagonal structure of a bipartite state: correlated entries, uncorrelated
/// entries (lexicographic pair order), and the uncorrelated total `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile<T> {
    pub zeta: Vec<T>,
    pub lambda_offdiag: Vec<T>,
    pub q: T,
}

impl<T: Real> CorrelationProfile<T> {
    /// `zeta` renormalized to sum one; None if the correlated mass is zero.
    pub fn zeta_normalized(&self) -> Option<Vec<T>> {
        let s: T = self.zeta.iter().copied().sum();
        if s <= T::zero() {
            return None;
        }
        Some(self.zeta.iter().map(|&z| z / s).collect())
    }
}

/// Majorization check `a > b` (partial-sum dominance): with both arrays
/// sorted non-increasing and zero-padded to a common length, every prefix sum
/// of `a` must dominate that of `b` and the totals must agree, all within
/// `1e-9`.
pub fn majorizes<T: Real>(a: &[T], b: &[T]) -> bool {
    let tol = T::of(1e-9);
    let len = a.len().max(b.len());
    let mut sa: Vec<T> = a.to_vec();
    let mut sb: Vec<T> = b.to_vec();
    sa.resize(len, T::zero());
    sb.resize(len, T::zero());
    sa.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sb.sort_by(|x, y| y.partial_cmp(x).unwrap());

    let total_a: T = sa.iter().copied().sum();
    let total_b: T = sb.iter().copied().sum();
    if (total_a - total_b).abs() > tol {
        return false;
    }
    let mut pa = T::zero();
    let mut pb = T::zero();
    for k in 0..len {
        pa += sa[k];
        pb += sb[k];
        if pa < pb - tol {
            return false;
        }
    }
    true
}

// Wire format: subsystem dimension plus the flat row-major entry list as
// [re, im] pairs. Deserialization re-validates the full state contract.
#[derive(Serialize, Deserialize)]
struct DensityMatrixRepr<T> {
    d: usize,
    entries: Vec<[T; 2]>,
}

impl<T: Real + Serialize> Serialize for DensityMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DensityMatrixRepr {
            d: self.dim_subsystem,
            entries: self.mat.to_pairs(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DensityMatrixRepr::<T>::deserialize(deserializer)?;
        let mat = ComplexMatrix::from_pairs(repr.d * repr.d, &repr.entries)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        DensityMatrix::new(mat, repr.d).map_err(|e| D::Error::custom(e.to_string()))
    }
}
