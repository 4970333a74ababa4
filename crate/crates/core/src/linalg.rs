//! Minimal dense complex linear algebra: square matrices and a cyclic Jacobi
//! eigensolver for Hermitian matrices.
//!
//! Everything here targets the small operators this crate works with
//! (dimension up to a few hundred); accuracy and simplicity win over speed.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::real::Real;
use crate::{diag_f64, Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from a row-major flat slice of length `dim * dim`.
    pub fn from_flat(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                len: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds from `[re, im]` pairs, row-major.
    pub fn from_pairs(dim: usize, pairs: &[[T; 2]]) -> Result<Self> {
        let data = pairs.iter().map(|p| Complex::new(p[0], p[1])).collect();
        Self::from_flat(dim, data)
    }

    pub fn to_pairs(&self) -> Vec<[T; 2]> {
        self.data.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(
            Complex::new(T::zero(), T::zero()),
            |acc, z| acc + z,
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] = out[(r, c)] + a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Largest deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = self[(r, c)] - self[(c, r)].conj();
                worst = worst.max(d.norm_sqr().sqrt());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in non-increasing order with matching eigenvector
    /// columns (`a v_k = values[k] v_k`). Fails if the off-diagonal norm does
    /// not reach machine-level convergence within the sweep budget.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen<T>> {
        let n = self.dim;
        if n == 0 {
            return Ok(HermitianEigen {
                values: Vec::new(),
                vectors: Self::zeros(0),
            });
        }
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let frob = self.frobenius_norm().max(T::min_positive_value());
        let target = frob * T::epsilon() * T::of(n as f64);
        let max_sweeps = 64;

        let mut sweeps = 0;
        loop {
            let mut off_sq = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off_sq += a[(p, q)].norm_sqr();
                }
            }
            if off_sq.sqrt() <= target {
                break;
            }
            if sweeps >= max_sweeps {
                return Err(Error::EigenSolverFailed {
                    off_norm: diag_f64(off_sq.sqrt()),
                    sweeps,
                });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let values_raw: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| values_raw[j].partial_cmp(&values_raw[i]).unwrap());
        let values: Vec<T> = order.iter().map(|&i| values_raw[i]).collect();
        let vectors = Self::from_fn(n, |r, c| v[(r, order[c])]);
        Ok(HermitianEigen { values, vectors })
    }
}

/// Eigenvalues (non-increasing) and eigenvector columns of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// One Jacobi rotation zeroing the Hermitian pair `(p, q)`, `p < q`.
///
/// The 2x2 pivot block is first made real by a diagonal phase, then rotated
/// with the standard symmetric Jacobi angle; the combined unitary is applied
/// to `a` on both sides and accumulated into `v`.
fn jacobi_rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm_sqr().sqrt();
    if m <= T::min_positive_value() {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return;
    }
    let n = a.dim();
    let w = apq.conj() / m; // phase making the pivot real: a_pq * w = m
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (m + m);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let sw = w * s;
    let cw = w * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        let new_rp = arp * c - arq * sw;
        let new_rq = arp * s + arq * cw;
        a[(r, p)] = new_rp;
        a[(p, r)] = new_rp.conj();
        a[(r, q)] = new_rq;
        a[(q, r)] = new_rq.conj();
    }
    a[(p, p)] = Complex::new(app - t * m, T::zero());
    a[(q, q)] = Complex::new(aqq + t * m, T::zero());
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c - vrq * sw;
        v[(r, q)] = vrp * s + vrq * cw;
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}
