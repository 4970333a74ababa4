//! Independent verification of the constrained entropy minimum.
//!
//! The closed-form bound in [`certify`](crate::certify) claims that, over all
//! `d`-element spectra with fixed total and purity, `sum phi log2 phi` is
//! minimized by a spectrum with one large eigenvalue and `d - 1` equal small
//! ones. The stationarity analysis admits `d - 1` candidate solutions, one
//! per multiplicity `s_a` of the large eigenvalue; this module enumerates
//! them, sweeps the feasible manifold by brute force for `d` in {3, 4},
//! samples it randomly for larger `d`, and solves `d = 2` exactly. None of
//! these routes share code with the closed form they check.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::real::{xlog2, Real};
use crate::{diag_f64, Error, Result};

/// One stationary candidate: `s_a` copies of `phi_a` and `d - s_a` copies of
/// `phi_x`, meeting the total and purity constraints exactly.
///
/// Candidates with `phi_x < 0` are non-physical; their objective is the
/// `+infinity` limit of the regularized objective, which removes them from
/// any minimization without breaking the constraint bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate<T> {
    /// Multiplicity of the large eigenvalue, `1 <= s_a <= d - 1`.
    pub s_a: usize,
    /// The large eigenvalue (`> 1/d`).
    pub phi_a: T,
    /// The small eigenvalue (`< 1/d`, possibly negative for non-physical
    /// candidates).
    pub phi_x: T,
    /// `s_a phi_a log2 phi_a + (d - s_a) phi_x log2 phi_x`.
    pub objective: T,
    /// Whether `phi_x >= 0`, i.e. the candidate is a genuine spectrum.
    pub physical: bool,
}

fn check_domain<T: Real>(d: usize, purity: T) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!(
            "candidate enumeration needs d >= 3 (got {d}); use exact_d2 for d = 2"
        )));
    }
    let lo = T::one() / T::of(d as f64);
    if purity <= lo || purity > T::one() + T::of(1e-12) {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(purity),
            lo: diag_f64(lo),
            hi: 1.0,
        });
    }
    Ok(())
}

/// Candidate solution for multiplicity `s_a` at dimension `d` and purity
/// `purity` in `(1/d, 1]`:
///
/// ```text
/// phi_a = (1 + sqrt((d - s_a)/s_a * (d P - 1))) / d
/// phi_x = (1 - sqrt(s_a/(d - s_a) * (d P - 1))) / d
/// ```
pub fn candidate<T: Real>(d: usize, purity: T, s_a: usize) -> Result<Candidate<T>> {
    check_domain(d, purity)?;
    if s_a < 1 || s_a > d - 1 {
        return Err(Error::InvalidArgument(format!(
            "s_a must lie in 1..={} (got {s_a})",
            d - 1
        )));
    }
    let dd = T::of(d as f64);
    let sa = T::of(s_a as f64);
    let rest = T::of((d - s_a) as f64);
    let excess = (dd * purity - T::one()).max(T::zero());
    let phi_a = (T::one() + (rest / sa * excess).sqrt()) / dd;
    let phi_x = (T::one() - (sa / rest * excess).sqrt()) / dd;
    let physical = phi_x >= T::zero();
    let objective = if physical {
        sa * xlog2(phi_a) + rest * xlog2(phi_x)
    } else {
        T::infinity()
    };
    Ok(Candidate {
        s_a,
        phi_a,
        phi_x,
        objective,
        physical,
    })
}

/// All candidates `s_a = 1..d-1` in order.
pub fn candidates<T: Real>(d: usize, purity: T) -> Result<Vec<Candidate<T>>> {
    (1..d).map(|s_a| candidate(d, purity, s_a)).collect()
}

/// The physical candidate with the smallest objective.
///
/// The objective increases strictly with `s_a`, so this is always the
/// `s_a = 1` candidate; the enumeration does not assume that.
pub fn best_candidate<T: Real>(d: usize, purity: T) -> Result<Candidate<T>> {
    let best = candidates(d, purity)?
        .into_iter()
        .filter(|c| c.physical)
        .min_by(|a, b| a.objective.partial_cmp(&b.objective).unwrap())
        .expect("s_a = 1 is always physical");
    debug_assert_eq!(best.s_a, 1);
    Ok(best)
}

/// Brute-force minimum of `sum phi log2 phi` over the feasible manifold for
/// `d` in {3, 4} by sweeping a grid of step `resolution` and solving the
/// remaining pair of eigenvalues from the two constraints.
///
/// The returned value can only overshoot the true constrained minimum by the
/// grid discretization, so agreement with the closed form within about the
/// resolution certifies the bound independently.
pub fn grid_oracle_min<T: Real>(d: usize, purity: T, resolution: T) -> Result<T> {
    if d != 3 && d != 4 {
        return Err(Error::InvalidArgument(format!(
            "grid oracle supports d = 3 or 4 (got {d}); use sampled_oracle_min"
        )));
    }
    if resolution <= T::zero() || resolution > T::of(1e-3) {
        return Err(Error::InvalidArgument(
            "resolution must lie in (0, 1e-3]".into(),
        ));
    }
    let lo = T::one() / T::of(d as f64);
    if purity < lo - T::of(1e-12) || purity > T::one() + T::of(1e-12) {
        return Err(Error::NoFeasiblePoint {
            purity: diag_f64(purity),
            dim: d,
        });
    }
    // The feasible set at purity exactly 1/d is a single point that a grid
    // will straddle; this slack admits grid points whose constraint residual
    // is within discretization error.
    let slack = T::of(2.0) * resolution * resolution;
    let steps = (T::one() / resolution).ceil().to_usize().unwrap();
    let grid = |i: usize| T::of(i as f64) / T::of(steps as f64);

    let mut best: Option<T> = None;
    let mut consider = |vals: &[T]| {
        let obj = vals.iter().map(|&v| xlog2(v)).sum::<T>();
        best = Some(match best {
            Some(b) if b <= obj => b,
            _ => obj,
        });
    };

    match d {
        3 => {
            for i in 0..=steps {
                let p1 = grid(i);
                solve_remaining_pair(purity, p1, T::zero(), slack, |p2, p3| {
                    consider(&[p1, p2, p3])
                });
            }
        }
        4 => {
            for i in 0..=steps {
                let p1 = grid(i);
                for j in i..=steps {
                    let p2 = grid(j);
                    solve_remaining_pair(purity, p1, p2, slack, |p3, p4| {
                        consider(&[p1, p2, p3, p4])
                    });
                }
            }
        }
        _ => unreachable!(),
    }

    best.ok_or(Error::NoFeasiblePoint {
        purity: diag_f64(purity),
        dim: d,
    })
}

/// Solves the last two eigenvalues from `sum = 1` and `sum of squares = P`
/// given the fixed leading entries, and feeds the nonnegative real root pair
/// (both roots, as a multiset) to `consider`.
fn solve_remaining_pair<T: Real>(
    purity: T,
    fixed1: T,
    fixed2: T,
    slack: T,
    mut consider: impl FnMut(T, T),
) {
    let dust = T::of(1e-12);
    let s = T::one() - fixed1 - fixed2;
    if s < -dust {
        return;
    }
    let q = purity - fixed1 * fixed1 - fixed2 * fixed2;
    if q < -dust {
        return;
    }
    let disc = (q + q) - s * s;
    if disc < -slack {
        return;
    }
    let r = disc.max(T::zero()).sqrt();
    let a = (s + r) * T::of(0.5);
    let b = (s - r) * T::of(0.5);
    if b < -dust {
        return;
    }
    consider(a.max(T::zero()), b.max(T::zero()));
}

/// Weaker sanity check for `d > 4`: evaluates the objective at `samples`
/// random feasible spectra and returns the smallest value seen. Always an
/// upper bound on the true minimum.
///
/// Each sample walks from the uniform spectrum toward a Dirichlet-sampled
/// simplex point, stepping onto the purity sphere (the constraints fix the
/// step length); walks that exit the simplex are rejected. Small Dirichlet
/// concentrations keep the acceptance rate usable at high purity, where
/// feasible spectra cluster near the simplex corners.
pub fn sampled_oracle_min<T: Real>(d: usize, purity: T, samples: usize, seed: u64) -> Result<T> {
    if d < 3 {
        return Err(Error::InvalidArgument(
            "sampled oracle needs d >= 3".into(),
        ));
    }
    let lo = T::one() / T::of(d as f64);
    if purity < lo - T::of(1e-12) || purity > T::one() + T::of(1e-12) {
        return Err(Error::NoFeasiblePoint {
            purity: diag_f64(purity),
            dim: d,
        });
    }
    let radius = (purity - lo).max(T::zero()).sqrt();
    let uniform = T::one() / T::of(d as f64);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut best: Option<T> = None;
    for _ in 0..samples {
        let shape = rng.gen_range(0.05..=1.0);
        let gamma = Gamma::new(shape, 1.0).expect("valid shape");
        let mut dir: Vec<T> = (0..d)
            .map(|_| T::of(gamma.sample(&mut rng)))
            .collect();
        let total = dir.iter().copied().sum::<T>();
        if total <= T::zero() {
            continue;
        }
        for x in &mut dir {
            *x = *x / total - uniform;
        }
        let norm = dir.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm <= T::of(1e-12) {
            continue;
        }
        let mut ok = true;
        let mut obj = T::zero();
        for &x in &dir {
            let v = uniform + radius * x / norm;
            if v < T::zero() {
                ok = false;
                break;
            }
            obj += xlog2(v);
        }
        if ok {
            best = Some(match best {
                Some(b) if b <= obj => b,
                _ => obj,
            });
        }
    }
    best.ok_or(Error::NoFeasiblePoint {
        purity: diag_f64(purity),
        dim: d,
    })
}

/// The unique two-eigenvalue spectrum at purity `purity` for `d = 2`:
/// `0.5 +- 0.5 sqrt(2 P - 1)`.
pub fn exact_d2<T: Real>(purity: T) -> Result<(T, T)> {
    let half = T::of(0.5);
    if purity < half - T::of(1e-12) || purity > T::one() + T::of(1e-12) {
        return Err(Error::PurityOutOfRange {
            purity: diag_f64(purity),
            lo: 0.5,
            hi: 1.0,
        });
    }
    let r = half * (T::of(2.0) * purity - T::one()).max(T::zero()).sqrt();
    Ok((half + r, half - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::neg_entropy_lower_bound;
    use approx::assert_abs_diff_eq;

    const NEG_BOUND_K4_P05: f64 = -1.4034880984237582;

    #[test]
    fn candidate_pure_limit_d3() {
        let c = candidate(3, 1.0f64, 1).unwrap();
        assert_eq!(c.phi_a, 1.0);
        assert_abs_diff_eq!(c.phi_x, 0.0, epsilon = 1e-15);
        assert_eq!(c.objective, 0.0);
        assert!(c.physical);
    }

    #[test]
    fn candidate_d4_half_matches_closed_form() {
        let c = candidate(4, 0.5f64, 1).unwrap();
        assert_abs_diff_eq!(c.phi_a, (1.0 + 3.0f64.sqrt()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.phi_x, (1.0 - 1.0 / 3.0f64.sqrt()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.objective, NEG_BOUND_K4_P05, epsilon = 1e-12);
        // Constraint residuals.
        let sum = c.phi_a + 3.0 * c.phi_x;
        let purity = c.phi_a * c.phi_a + 3.0 * c.phi_x * c.phi_x;
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((purity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn candidate_d3_half_s2_sits_on_boundary() {
        let c = candidate(3, 0.5f64, 2).unwrap();
        assert_abs_diff_eq!(c.phi_a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.phi_x, 0.0, epsilon = 1e-12);
        let sum = 2.0 * c.phi_a + c.phi_x;
        let purity = 2.0 * c.phi_a * c.phi_a + c.phi_x * c.phi_x;
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((purity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn candidate_rejects_out_of_domain() {
        assert!(candidate(2, 0.7f64, 1).is_err());
        assert!(candidate(4, 0.25f64, 1).is_err()); // P = 1/d is not in the open interval
        assert!(candidate(4, 1.2f64, 1).is_err());
        assert!(candidate(4, 0.5f64, 0).is_err());
        assert!(candidate(4, 0.5f64, 4).is_err());
    }

    #[test]
    fn nonphysical_candidates_are_flagged_infinite() {
        // d = 4, P = 1: only s_a = 1 has phi_x >= 0.
        for s_a in 2..4 {
            let c = candidate(4, 1.0f64, s_a).unwrap();
            assert!(!c.physical);
            assert!(c.objective.is_infinite());
        }
    }

    #[test]
    fn best_candidate_is_always_first() {
        for (d, p) in [(5usize, 0.3f64), (3, 0.3334), (8, 0.9), (12, 0.5)] {
            let best = best_candidate(d, p).unwrap();
            assert_eq!(best.s_a, 1, "d = {d}, P = {p}");
        }
    }

    #[test]
    fn objective_strictly_increases_with_multiplicity() {
        for d in 3..=12usize {
            for i in 1..25 {
                let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 25.0;
                let cands = candidates(d, p).unwrap();
                let physical: Vec<_> = cands.iter().filter(|c| c.physical).collect();
                for pair in physical.windows(2) {
                    assert!(
                        pair[0].objective < pair[1].objective,
                        "d = {d}, P = {p}, s_a = {}",
                        pair[0].s_a
                    );
                }
            }
        }
    }

    #[test]
    fn candidate_gap_stays_in_unit_interval() {
        for d in 3..=12usize {
            for i in 1..25 {
                let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 25.0;
                for c in candidates(d, p).unwrap() {
                    let gap = c.phi_x - c.phi_a;
                    assert!(gap > -1.0 && gap < 0.0, "d = {d}, P = {p}, s_a = {}", c.s_a);
                }
            }
        }
    }

    #[test]
    fn constraint_residuals_tiny_for_all_candidates() {
        for d in [3usize, 5, 9] {
            for i in 1..10 {
                let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 10.0;
                for c in candidates(d, p).unwrap() {
                    let sa = c.s_a as f64;
                    let rest = (d - c.s_a) as f64;
                    let sum = sa * c.phi_a + rest * c.phi_x;
                    let purity = sa * c.phi_a * c.phi_a + rest * c.phi_x * c.phi_x;
                    assert!((sum - 1.0).abs() < 1e-10);
                    assert!((purity - p).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn best_candidate_small_eigenvalue_nonnegative() {
        for d in 3..=12usize {
            for i in 1..=20 {
                let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 20.0;
                assert!(best_candidate(d, p).unwrap().phi_x >= 0.0);
            }
        }
    }

    #[test]
    fn grid_oracle_uniform_point() {
        let min = grid_oracle_min(3, 1.0f64 / 3.0, 1e-3).unwrap();
        assert_abs_diff_eq!(min, -(3.0f64.log2()), epsilon = 1e-5);
    }

    #[test]
    fn grid_oracle_pure_point() {
        let min = grid_oracle_min(3, 1.0f64, 1e-3).unwrap();
        assert_abs_diff_eq!(min, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_oracle_d4_agrees_with_closed_form() {
        let min = grid_oracle_min(4, 0.5f64, 1e-3).unwrap();
        assert_abs_diff_eq!(min, NEG_BOUND_K4_P05, epsilon = 1e-3);
    }

    #[test]
    fn grid_oracle_rejects_infeasible() {
        assert!(matches!(
            grid_oracle_min(3, 1.2f64, 1e-3),
            Err(Error::NoFeasiblePoint { .. })
        ));
        assert!(grid_oracle_min(5, 0.5f64, 1e-3).is_err());
        assert!(grid_oracle_min(3, 0.5f64, 0.01).is_err());
    }

    #[test]
    fn grid_oracle_never_undershoots_bound() {
        for d in [3usize, 4] {
            for i in 0..=10 {
                let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 10.0;
                let grid = grid_oracle_min(d, p, 1e-3).unwrap();
                let closed = neg_entropy_lower_bound(d, p).unwrap();
                assert!(grid >= closed - 1e-9, "d = {d}, P = {p}");
                assert!((grid - closed).abs() <= 1e-3, "d = {d}, P = {p}");
            }
        }
    }

    #[test]
    fn sampled_oracle_upper_bounds_closed_form() {
        for d in [5usize, 6, 8] {
            for p in [0.3f64, 0.6, 0.9] {
                if p <= 1.0 / d as f64 {
                    continue;
                }
                let sampled = sampled_oracle_min(d, p, 20_000, 11).unwrap();
                let closed = neg_entropy_lower_bound(d, p).unwrap();
                assert!(sampled >= closed - 1e-9, "d = {d}, P = {p}");
                assert!(sampled < 0.0);
            }
        }
    }

    #[test]
    fn exact_d2_values() {
        assert_eq!(exact_d2(0.5f64).unwrap(), (0.5, 0.5));
        assert_eq!(exact_d2(1.0f64).unwrap(), (1.0, 0.0));
        let (hi, lo) = exact_d2(0.625f64).unwrap();
        assert_abs_diff_eq!(hi, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 0.25, epsilon = 1e-15);
        assert!(exact_d2(0.3f64).is_err());
        assert!(exact_d2(1.1f64).is_err());
    }
}
