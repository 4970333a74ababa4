//! Property tests for the state machinery and the certification bounds:
//! majorization, rank and purity constraints, basis invariance, tightness of
//! the closed-form bound against exact values, and the parity-purity
//! identity.

use entcert::{
    certify, fock_brute_force_parity, majorizes, neg_entropy_lower_bound,
    parity_expectation_mixed, parity_expectation_pure, purity_mc_from_total, ree_exact_mc,
    ree_lower_bound_mc, ree_lower_bound_noisy, sample, simulate_coincidence_counts,
    simulate_parity_counts, xlog2, CertificationInput, CountsRecord, DensityMatrix, NoiseModel,
    NumericPolicy, ParityTally, Subsystem,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

proptest! {
    /// Schur-Horn: the spectrum majorizes the diagonal of every valid state.
    #[test]
    fn eigenvalues_majorize_diagonal(d in 2usize..=5, seed in any::<u64>()) {
        let rho = sample::random_bipartite_density::<f64, _>(d, &mut rng(seed));
        let spectrum = rho.eigenvalues().unwrap();
        prop_assert!(majorizes(spectrum.values(), &rho.diagonal_probs()));
    }

    /// Maximally correlated states have at most d nonzero eigenvalues.
    #[test]
    fn mc_rank_at_most_d(d in 2usize..=6, seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(d, &mut rng(seed));
        let spectrum = rho.eigenvalues().unwrap();
        prop_assert!(spectrum.nonzero_count(1e-9) <= d);
    }

    /// Maximally correlated purity lies in [1/d, 1].
    #[test]
    fn mc_purity_range(d in 2usize..=6, seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(d, &mut rng(seed));
        let p = rho.purity();
        prop_assert!(p >= 1.0 / d as f64 - 1e-9 && p <= 1.0 + 1e-9);
    }

    /// Purity equals the squared sum of eigenvalues.
    #[test]
    fn purity_equals_spectrum_purity(d in 2usize..=5, seed in any::<u64>()) {
        let rho = sample::random_bipartite_density::<f64, _>(d, &mut rng(seed));
        let spectrum = rho.eigenvalues().unwrap();
        prop_assert!((rho.purity() - spectrum.purity()).abs() < 1e-9);
    }

    /// Entropy is invariant under conjugation by a random unitary.
    #[test]
    fn entropy_is_basis_invariant(d in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = sample::random_bipartite_density::<f64, _>(d, &mut r);
        let u = sample::random_unitary::<f64, _>(d * d, &mut r);
        let rotated = u.mul(rho.matrix()).unwrap().mul(&u.adjoint()).unwrap();
        let rotated = DensityMatrix::new_unchecked(rotated, d);
        let s0 = rho.von_neumann_entropy().unwrap();
        let s1 = rotated.von_neumann_entropy().unwrap();
        prop_assert!((s0 - s1).abs() < 1e-8, "s0 = {s0}, s1 = {s1}");
    }

    /// Both reduced states of a maximally correlated state equal diag(zeta).
    #[test]
    fn mc_reduced_states_are_diagonal_zeta(d in 2usize..=5, seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(d, &mut rng(seed));
        let zeta = rho.correlation_profile().zeta;
        for side in [Subsystem::A, Subsystem::B] {
            let red = rho.partial_trace(side);
            for r in 0..d {
                for c in 0..d {
                    let expect = if r == c { zeta[r] } else { 0.0 };
                    let entry = red[(r, c)];
                    prop_assert!((entry.re - expect).abs() < 1e-10);
                    prop_assert!(entry.im.abs() < 1e-10);
                }
            }
        }
    }

    /// Mixing any distribution toward uniform is majorized by the original.
    #[test]
    fn averaging_is_majorized(seed in any::<u64>(), t in 0.0f64..=1.0) {
        let p = sample::random_simplex::<f64, _>(5, &mut rng(seed));
        let uniform = 1.0 / p.len() as f64;
        let mixed: Vec<f64> = p.iter().map(|&x| (1.0 - t) * x + t * uniform).collect();
        prop_assert!(majorizes(&p, &mixed));
    }

    /// The closed-form bound never exceeds the exact value (tightness).
    #[test]
    fn bound_below_exact_ree(d in 2usize..=6, seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(d, &mut rng(seed));
        let exact = ree_exact_mc(&rho).unwrap();
        let profile = rho.correlation_profile();
        let zeta = profile.zeta_normalized().unwrap();
        let bound = ree_lower_bound_mc(&zeta, rho.purity()).unwrap();
        prop_assert!(exact >= bound - 1e-9, "exact = {exact}, bound = {bound}");
    }

    /// For d = 2 the bound is exact.
    #[test]
    fn d2_bound_is_exact(seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(2, &mut rng(seed));
        let exact = ree_exact_mc(&rho).unwrap();
        let zeta = rho.correlation_profile().zeta_normalized().unwrap();
        let bound = ree_lower_bound_mc(&zeta, rho.purity()).unwrap();
        prop_assert!((exact - bound).abs() <= 1e-9, "exact = {exact}, bound = {bound}");
    }

    /// Purity round trip: the conversion recovers the component purity of a
    /// constructed mixture exactly, and the noisy bound respects Donald's
    /// identity form against the exact component value.
    #[test]
    fn noisy_roundtrip_and_consistency(
        d in 2usize..=5,
        seed in any::<u64>(),
        gamma in 0.05f64..=0.95,
    ) {
        let mut r = rng(seed);
        let mc = sample::random_mc_state::<f64, _>(d, &mut r);
        let noise = sample::random_noise_state::<f64, _>(d, &mut r);
        let rho = DensityMatrix::mix(&mc, &noise, gamma).unwrap();

        let lambda = noise.correlation_profile().lambda_offdiag;
        let model = NoiseModel::Incoherent { lambda };
        let policy = NumericPolicy::default();
        let (p_mc, _) =
            purity_mc_from_total(rho.purity(), gamma, &model, d, &policy).unwrap();
        prop_assert!((p_mc - mc.purity()).abs() < 1e-9);

        let zeta = mc.correlation_profile().zeta_normalized().unwrap();
        let noisy_bound = ree_lower_bound_noisy(&zeta, gamma, p_mc).unwrap();
        let exact_route = gamma * ree_exact_mc(&mc).unwrap()
            + xlog2(gamma)
            + xlog2(1.0 - gamma);
        prop_assert!(noisy_bound <= exact_route + 1e-9);
    }

    /// Closed-form parity equals the brute-force Fock expansion.
    #[test]
    fn parity_closed_form_matches_fock(d in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::random_two_photon::<f64, _>(d, &mut r);
        let b = sample::random_two_photon::<f64, _>(d, &mut r);
        let closed = parity_expectation_pure(&a, &b).unwrap();
        let brute = fock_brute_force_parity(&a, &b).unwrap();
        prop_assert!((closed - brute).abs() <= 1e-9);
    }

    /// Two-copy parity of a correlated-subspace state equals its purity.
    #[test]
    fn parity_of_identical_copies_is_purity(d in 2usize..=5, seed in any::<u64>()) {
        let rho = sample::random_mc_state::<f64, _>(d, &mut rng(seed));
        let parity = parity_expectation_mixed(&rho, &rho).unwrap();
        prop_assert!((parity - rho.purity()).abs() <= 1e-9);
    }

    /// Cross parity never exceeds the larger of the two purities.
    #[test]
    fn parity_upper_bounded_by_max_purity(d in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho1 = sample::random_mc_state::<f64, _>(d, &mut r);
        let rho2 = sample::random_mc_state::<f64, _>(d, &mut r);
        let parity = parity_expectation_mixed(&rho1, &rho2).unwrap();
        prop_assert!(parity <= rho1.purity().max(rho2.purity()) + 1e-9);
    }
}

/// The d = 2 closed form agrees with the unique exact spectrum on a grid.
#[test]
fn d2_bound_matches_unique_spectrum() {
    for i in 0..=50 {
        let p = 0.5 + 0.5 * i as f64 / 50.0;
        let (hi, lo) = entcert::exact_d2(p).unwrap();
        let direct = xlog2(hi) + xlog2(lo);
        let bound = neg_entropy_lower_bound(2, p).unwrap();
        assert!((direct - bound).abs() < 1e-12, "P = {p}");
    }
}

/// Simulated counts from a known state recover its parameters as shots grow.
#[test]
fn estimator_converges_on_simulated_counts() {
    let d = 3;
    let gamma = 0.85;
    let mut r = rng(42);
    let mc = sample::random_mc_state::<f64, _>(d, &mut r);
    let noise = DensityMatrix::diagonal_noise(&vec![1.0 / 6.0; 6]).unwrap();
    let rho = DensityMatrix::mix(&mc, &noise, gamma).unwrap();

    let shots = 10_000_000u64;
    let coincidences = simulate_coincidence_counts(&rho, shots, 1).unwrap();
    let (even, odd) = simulate_parity_counts(&rho, shots, 2).unwrap();
    let record = CountsRecord {
        d,
        coincidences,
        parity: ParityTally { even, odd },
        metadata: Default::default(),
    };
    let policy = NumericPolicy::default();
    let (input, _) =
        entcert::estimate_params_from_counts::<f64>(&record, entcert::NoiseChoice::White, &policy)
            .unwrap();

    assert!((input.gamma - gamma).abs() < 1e-2, "gamma = {}", input.gamma);
    let zeta_true = mc.correlation_profile().zeta_normalized().unwrap();
    for (est, truth) in input.zeta.iter().zip(&zeta_true) {
        assert!((est - truth).abs() < 1e-2, "zeta {est} vs {truth}");
    }
    assert!((input.purity_total - rho.purity()).abs() < 1e-2);
}

/// End-to-end certification of a noise-free simulated Bell state.
#[test]
fn certify_simulated_bell_state() {
    let rho = DensityMatrix::<f64>::maximally_entangled(2);
    let shots = 1_000_000u64;
    let coincidences = simulate_coincidence_counts(&rho, shots, 3).unwrap();
    let (even, odd) = simulate_parity_counts(&rho, shots, 4).unwrap();
    let record = CountsRecord {
        d: 2,
        coincidences,
        parity: ParityTally { even, odd },
        metadata: Default::default(),
    };
    let policy = NumericPolicy::default();
    let (input, _) =
        entcert::estimate_params_from_counts::<f64>(&record, entcert::NoiseChoice::Auto, &policy)
            .unwrap();
    let report = certify(&input, &policy).unwrap();
    assert!(
        (report.ree_lower_bound - 1.0).abs() < 0.02,
        "bound = {}",
        report.ree_lower_bound
    );
    assert_eq!(report.d_star, 2);
}

/// certify() accepts an input assembled by hand and stays below log2(d).
#[test]
fn report_bound_capped_by_log_d() {
    let policy = NumericPolicy::default();
    for d in 2usize..=8 {
        let input = CertificationInput {
            d,
            zeta: vec![1.0 / d as f64; d],
            gamma: 1.0,
            noise_model: NoiseModel::NoiseFree,
            purity_total: 0.9,
        };
        let report = certify(&input, &policy).unwrap();
        assert!(report.ree_lower_bound <= (d as f64).log2() + 1e-9);
    }
}
