//! Entanglement certification bounds for maximally correlated states.
//!
//! The central quantity is the constrained minimum of the negative von
//! Neumann entropy `sum_k phi_k log2 phi_k` over all `K`-element spectra with
//! fixed total (1) and fixed purity `P`. Its closed form is
//!
//! ```text
//! phi_a log2(phi_a) + (1 - phi_a) log2((1 - phi_a) / (K - 1)),
//! phi_a = (1 + sqrt((K P - 1)(K - 1))) / K,
//! ```
//!
//! the minimizing spectrum having one large eigenvalue `phi_a` and `K - 1`
//! equal small ones. Adding the diagonal entropy `-sum zeta log2 zeta` turns
//! it into a lower bound on the relative entropy of entanglement of a
//! maximally correlated state; Donald's identity extends the bound to
//! mixtures with diagonal noise. The [`oracle`](crate::oracle) module
//! verifies the minimality claim by brute force.

use serde::{Deserialize, Serialize};

use crate::counts::CountsRecord;
use crate::densmat::DensityMatrix;
use crate::real::{shannon_entropy, xlog2, Real};
use crate::{diag_f64, Error, NumericPolicy, Result};

/// Noise attribution for the uncorrelated subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel<T> {
    /// No uncorrelated population; the state is maximally correlated.
    NoiseFree,
    /// Uniform noise over all `d(d-1)` uncorrelated outcomes.
    White,
    /// Measured per-outcome noise distribution (normalized, lexicographic
    /// pair order).
    Incoherent { lambda: Vec<T> },
}

/// How [`estimate_params_from_counts`] chooses the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChoice {
    /// Noise-free when the uncorrelated fraction is below `mc_threshold`,
    /// white otherwise.
    Auto,
    /// Treat the record as noise-free regardless of uncorrelated counts.
    ForceNoiseFree,
    White,
    Incoherent,
}

/// Estimated parameters feeding the certification bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationInput<T> {
    pub d: usize,
    /// Correlated probabilities, renormalized to sum one.
    pub zeta: Vec<T>,
    /// Weight of the maximally correlated component.
    pub gamma: T,
    pub noise_model: NoiseModel<T>,
    /// Measured purity of the full state.
    pub purity_total: T,
}

/// Structured notices attached to a report: clamping, threshold decisions,
/// and model-dependence reminders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertWarning<T> {
    /// A purity fell outside its physical interval by less than the clamp
    /// tolerance and was clamped.
    PurityClamped { raw: T, clamped: T },
    /// The uncorrelated fraction was below `mc_threshold`, so the record was
    /// declared noise-free.
    NoiseFreeThreshold { q_fraction: T, threshold: T },
    /// Auto noise selection fell back to the white-noise assumption.
    WhiteNoiseAssumed { q_fraction: T },
    /// Uncorrelated counts were present but the caller forced a noise-free
    /// model; they were ignored.
    UncorrelatedCountsIgnored { q_fraction: T },
    /// Noisy-model runs attribute all correlated diagonal mass to the
    /// maximally correlated component.
    DiagonalNoiseAttributedToMc,
    /// The certified bound was not positive, so the dimension bound is
    /// vacuous.
    VacuousDimensionBound { ree_lower_bound: T },
    /// In noisy runs the mutual-information bound refers to the maximally
    /// correlated component, not the full state.
    MutualInfoForMcComponent,
}

/// Certified bounds plus diagnostics; `input` echoes the parameters the
/// bounds were computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport<T> {
    pub d: usize,
    /// Purity of the maximally correlated component after conversion.
    pub purity_mc: T,
    /// Lower bound on `sum phi log2 phi` of the correlated component.
    pub neg_entropy_bound: T,
    /// Certified lower bound on the relative entropy of entanglement.
    pub ree_lower_bound: T,
    /// Lower bound on the number of entangled dimensions.
    pub d_star: usize,
    pub mutual_info_lower_bound: T,
    pub warnings: Vec<CertWarning<T>>,
    pub input: CertificationInput<T>,
}

/// Default grace for purity estimates just outside their physical interval.
const DEFAULT_CLAMP_TOL: f64 = 0.05;

/// Lower bound on the negative von Neumann entropy `sum phi log2 phi` of any
/// state with at most `k` nonzero eigenvalues and purity `purity`.
///
/// Exact at both endpoints: `-log2(k)` at `purity = 1/k` and `0` at
/// `purity = 1`. Purities outside `[1/k, 1]` by at most the clamp grace
/// (0.05) are clamped; anything worse is an error. `k = 1` forces
/// `purity = 1` and returns zero.
pub fn neg_entropy_lower_bound<T: Real>(k: usize, purity: T) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "eigenvalue count must be positive".into(),
        ));
    }
    let lo = T::one() / T::of(k as f64);
    let p = clamp_with_grace(purity, lo, T::one(), T::of(DEFAULT_CLAMP_TOL))?;
    if k == 1 {
        return Ok(T::zero());
    }
    let kk = T::of(k as f64);
    let km1 = T::of((k - 1) as f64);
    let disc = ((kk * p - T::one()) * km1).max(T::zero());
    let phi_a = ((T::one() + disc.sqrt()) / kk).min(T::one());
    let rest = (T::one() - phi_a).max(T::zero());
    // rest * log2(rest / (k-1)) with the 0 * log2(0) = 0 convention.
    let tail = if rest <= T::zero() {
        T::zero()
    } else {
        rest * (rest / km1).log2()
    };
    Ok(xlog2(phi_a) + tail)
}

fn clamp_with_grace<T: Real>(x: T, lo: T, hi: T, grace: T) -> Result<T> {
    if x < lo - grace || x > hi + grace {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(x),
            lo: diag_f64(lo),
            hi: diag_f64(hi),
        });
    }
    Ok(x.max(lo).min(hi))
}

/// Lower bound on the relative entropy of entanglement of a maximally
/// correlated state with correlated probabilities `zeta` and purity
/// `purity_mc`: the constrained-entropy bound plus the diagonal entropy.
pub fn ree_lower_bound_mc<T: Real>(zeta: &[T], purity_mc: T) -> Result<T> {
    validate_prob_vec(zeta)?;
    if zeta.len() < 2 {
        return Err(Error::InvalidArgument(
            "zeta must have at least two entries".into(),
        ));
    }
    Ok(neg_entropy_lower_bound(zeta.len(), purity_mc)? + shannon_entropy(zeta))
}

/// Exact relative entropy of entanglement of a maximally correlated state:
/// `sum phi log2 phi - sum zeta log2 zeta` from its spectrum and diagonal.
///
/// The closest separable state to a maximally correlated state is the
/// diagonal state `diag(zeta)`, which makes the exact value computable.
pub fn ree_exact_mc<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let tol = NumericPolicy::<T>::default().mc_tol;
    if !rho.is_maximally_correlated(tol) {
        let q = rho.correlation_profile().q;
        return Err(Error::NotMaximallyCorrelated {
            mass: diag_f64(q),
            tol: diag_f64(tol),
        });
    }
    let spectrum = rho.eigenvalues()?;
    let zeta = rho.correlation_profile().zeta;
    Ok(spectrum.neg_entropy() + shannon_entropy(&zeta))
}

/// Lower bound for a maximally correlated state mixed with diagonal noise at
/// weight `gamma`:
/// `gamma * bound_mc + gamma log2 gamma + (1 - gamma) log2(1 - gamma)`.
///
/// Reduces exactly to [`ree_lower_bound_mc`] at `gamma = 1`; `gamma = 0`
/// leaves nothing to certify and is an error.
pub fn ree_lower_bound_noisy<T: Real>(zeta: &[T], gamma: T, purity_mc: T) -> Result<T> {
    if gamma <= T::zero() {
        return Err(Error::GammaZero);
    }
    if gamma > T::one() {
        return Err(Error::GammaOutOfRange {
            gamma: diag_f64(gamma),
        });
    }
    let inner = ree_lower_bound_mc(zeta, purity_mc)?;
    Ok(gamma * inner + xlog2(gamma) + xlog2(T::one() - gamma))
}

/// Recovers the purity of the maximally correlated component from the
/// measured total purity:
/// `(P - (1 - gamma)^2 sum_m lambda_m^2) / gamma^2`.
///
/// Results outside `[1/d, 1]` by at most the policy clamp tolerance are
/// clamped with a warning; larger violations indicate inconsistent input.
pub fn purity_mc_from_total<T: Real>(
    purity_total: T,
    gamma: T,
    noise_model: &NoiseModel<T>,
    d: usize,
    policy: &NumericPolicy<T>,
) -> Result<(T, Option<CertWarning<T>>)> {
    if gamma <= T::zero() {
        return Err(Error::GammaZero);
    }
    if gamma > T::one() {
        return Err(Error::GammaOutOfRange {
            gamma: diag_f64(gamma),
        });
    }
    if purity_total <= T::zero() || purity_total > T::one() + policy.prob_tol {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(purity_total),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let sum_lambda_sq = match noise_model {
        NoiseModel::NoiseFree => T::zero(),
        NoiseModel::White => T::one() / T::of((d * (d - 1)) as f64),
        NoiseModel::Incoherent { lambda } => {
            if lambda.len() != d * (d - 1) {
                return Err(Error::DimensionMismatch {
                    expected: d * (d - 1),
                    got: lambda.len(),
                });
            }
            validate_prob_vec(lambda)?;
            lambda.iter().map(|&l| l * l).sum()
        }
    };
    let one_minus = T::one() - gamma;
    let raw = (purity_total - one_minus * one_minus * sum_lambda_sq) / (gamma * gamma);
    let lo = T::one() / T::of(d as f64);
    let clamped = clamp_with_grace(raw, lo, T::one(), policy.purity_clamp_tol)?;
    // Numerical dust below prob_tol is snapped silently; a warning means the
    // measurement genuinely left the physical interval.
    let warning = if (clamped - raw).abs() > policy.prob_tol {
        Some(CertWarning::PurityClamped { raw, clamped })
    } else {
        None
    };
    Ok((clamped, warning))
}

/// Estimates certification parameters from raw counts.
///
/// Correlated probabilities come from the diagonal normalized by the
/// correlated total, `gamma` from the correlated share of all coincidences,
/// the purity from the parity tallies `(even - odd) / total`, and the noise
/// model from `choice`. Threshold decisions come back as warnings for the
/// eventual report.
pub fn estimate_params_from_counts<T: Real>(
    counts: &CountsRecord,
    choice: NoiseChoice,
    policy: &NumericPolicy<T>,
) -> Result<(CertificationInput<T>, Vec<CertWarning<T>>)> {
    counts.validate()?;
    let total = T::of(counts.total_coincidences() as f64);
    let correlated = counts.correlated_total();
    if correlated == 0 {
        return Err(Error::NoCorrelatedCounts);
    }
    let correlated = T::of(correlated as f64);
    let q_fraction = (total - correlated) / total;

    let zeta: Vec<T> = (0..counts.d)
        .map(|k| T::of(counts.coincidences[k][k] as f64) / correlated)
        .collect();

    if counts.parity.total() == 0 {
        return Err(Error::NoParityCounts);
    }
    let parity_total = T::of(counts.parity.total() as f64);
    let purity_total =
        (T::of(counts.parity.even as f64) - T::of(counts.parity.odd as f64)) / parity_total;
    if purity_total <= T::zero() {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(purity_total),
            lo: 0.0,
            hi: 1.0,
        });
    }

    let mut warnings = Vec::new();
    let (gamma, noise_model) = match choice {
        NoiseChoice::ForceNoiseFree => {
            if q_fraction > T::zero() {
                warnings.push(CertWarning::UncorrelatedCountsIgnored { q_fraction });
            }
            (T::one(), NoiseModel::NoiseFree)
        }
        NoiseChoice::Auto => {
            if q_fraction <= policy.mc_threshold {
                warnings.push(CertWarning::NoiseFreeThreshold {
                    q_fraction,
                    threshold: policy.mc_threshold,
                });
                (T::one(), NoiseModel::NoiseFree)
            } else {
                warnings.push(CertWarning::WhiteNoiseAssumed { q_fraction });
                (correlated / total, NoiseModel::White)
            }
        }
        NoiseChoice::White => (correlated / total, NoiseModel::White),
        NoiseChoice::Incoherent => {
            let uncorr = counts.uncorrelated_total();
            let lambda: Vec<T> = if uncorr == 0 {
                vec![
                    T::one() / T::of((counts.d * (counts.d - 1)) as f64);
                    counts.d * (counts.d - 1)
                ]
            } else {
                counts
                    .uncorrelated_counts()
                    .iter()
                    .map(|&c| T::of(c as f64) / T::of(uncorr as f64))
                    .collect()
            };
            (correlated / total, NoiseModel::Incoherent { lambda })
        }
    };

    Ok((
        CertificationInput {
            d: counts.d,
            zeta,
            gamma,
            noise_model,
            purity_total,
        },
        warnings,
    ))
}

/// Lower bound on the number of entangled dimensions, `ceil(2^bound)`.
///
/// Negative bounds are vacuous and give 1. Values of `2^bound` within
/// `1e-9` of an integer snap to it before the ceiling, so exact endpoints
/// (`bound = log2(d)` giving `d`) survive the floating-point round trip.
pub fn entanglement_dim_lower_bound<T: Real>(ree_bound: T) -> usize {
    let b = ree_bound.max(T::zero());
    let x = b.exp2();
    let snap = T::of(1e-9) * x.max(T::one());
    let rounded = x.round();
    let value = if (x - rounded).abs() <= snap {
        rounded
    } else {
        x.ceil()
    };
    value.to_usize().unwrap_or(1).max(1)
}

/// Lower bound on the mutual information of a maximally correlated state:
/// `-2 sum zeta log2 zeta + neg_entropy_lower_bound(d, purity_mc)`.
pub fn mutual_info_lower_bound_mc<T: Real>(zeta: &[T], purity_mc: T) -> Result<T> {
    validate_prob_vec(zeta)?;
    if zeta.len() < 2 {
        return Err(Error::InvalidArgument(
            "zeta must have at least two entries".into(),
        ));
    }
    let two = T::of(2.0);
    Ok(two * shannon_entropy(zeta) + neg_entropy_lower_bound(zeta.len(), purity_mc)?)
}

/// Number of diagonal probabilities above `tol`: an upper bound on the rank
/// and the `K` to feed the general entropy bound.
pub fn rank_upper_bound_from_diag<T: Real>(diag_probs: &[T], tol: T) -> usize {
    diag_probs.iter().filter(|&&p| p > tol).count()
}

/// Runs the full certification: purity conversion, entropy bound, the
/// noise-free or noisy entanglement bound, the dimension bound, and the
/// mutual-information bound, with warnings collected along the way.
pub fn certify<T: Real>(
    input: &CertificationInput<T>,
    policy: &NumericPolicy<T>,
) -> Result<CertificationReport<T>> {
    validate_input(input, policy)?;
    let mut warnings = Vec::new();

    let (purity_mc, clamp_warning) = purity_mc_from_total(
        input.purity_total,
        input.gamma,
        &input.noise_model,
        input.d,
        policy,
    )?;
    warnings.extend(clamp_warning);

    let neg_entropy_bound = neg_entropy_lower_bound(input.d, purity_mc)?;
    let noise_free = matches!(input.noise_model, NoiseModel::NoiseFree) || input.gamma == T::one();
    let ree_lower_bound = if noise_free {
        ree_lower_bound_mc(&input.zeta, purity_mc)?
    } else {
        warnings.push(CertWarning::DiagonalNoiseAttributedToMc);
        ree_lower_bound_noisy(&input.zeta, input.gamma, purity_mc)?
    };

    if ree_lower_bound <= T::zero() {
        warnings.push(CertWarning::VacuousDimensionBound { ree_lower_bound });
    }
    let d_star = entanglement_dim_lower_bound(ree_lower_bound);

    if !noise_free {
        warnings.push(CertWarning::MutualInfoForMcComponent);
    }
    let mutual_info_lower_bound = mutual_info_lower_bound_mc(&input.zeta, purity_mc)?;

    Ok(CertificationReport {
        d: input.d,
        purity_mc,
        neg_entropy_bound,
        ree_lower_bound,
        d_star,
        mutual_info_lower_bound,
        warnings,
        input: input.clone(),
    })
}

fn validate_input<T: Real>(input: &CertificationInput<T>, policy: &NumericPolicy<T>) -> Result<()> {
    if input.zeta.len() != input.d {
        return Err(Error::DimensionMismatch {
            expected: input.d,
            got: input.zeta.len(),
        });
    }
    validate_prob_vec(&input.zeta)?;
    if input.gamma <= T::zero() {
        return Err(Error::GammaZero);
    }
    if input.gamma > T::one() {
        return Err(Error::GammaOutOfRange {
            gamma: diag_f64(input.gamma),
        });
    }
    if matches!(input.noise_model, NoiseModel::NoiseFree) && input.gamma != T::one() {
        return Err(Error::InvalidArgument(
            "noise-free inputs must have gamma = 1".into(),
        ));
    }
    if input.purity_total <= T::zero() || input.purity_total > T::one() + policy.prob_tol {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(input.purity_total),
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

fn validate_prob_vec<T: Real>(p: &[T]) -> Result<()> {
    let tol = NumericPolicy::<T>::default().prob_tol;
    for (index, &x) in p.iter().enumerate() {
        if x < T::zero() {
            return Err(Error::NegativeEntry {
                index,
                value: diag_f64(x),
            });
        }
    }
    let sum: T = p.iter().copied().sum();
    if (sum - T::one()).abs() > tol {
        return Err(Error::NotNormalized {
            sum: diag_f64(sum),
            tol: diag_f64(tol),
        });
    }
    Ok(())
}
