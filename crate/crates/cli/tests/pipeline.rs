//! Integration tests for the command pipeline: file handling, exit codes,
//! determinism, and end-to-end soundness of simulate -> certify.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use entcert::{
    certify, estimate_params_from_counts, ree_exact_mc, sample, simulate_coincidence_counts,
    simulate_parity_counts, xlog2, CountsRecord, DensityMatrix64, NoiseChoice, NumericPolicy64,
    ParityTally,
};
use entcert_cli::commands::{
    cmd_certify, cmd_curves, cmd_oracle, cmd_parity_sim, cmd_simulate, CertifyOptions, CurveMode,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entcert"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn bell_spec(dir: &Path) -> PathBuf {
    write(
        dir,
        "bell.json",
        r#"{
  "schema_version": 1,
  "d": 2,
  "alpha": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]],
  "gamma": 1.0,
  "noise": { "kind": "none" }
}"#,
    )
}

fn default_certify_options() -> CertifyOptions {
    CertifyOptions {
        noise: NoiseChoice::Auto,
        noise_flag_name: "auto".to_string(),
        mc_threshold: None,
        bootstrap: 0,
        seed: 42,
    }
}

#[test]
fn certify_simulated_bell_counts() {
    let dir = TempDir::new().unwrap();
    let spec = bell_spec(dir.path());
    let counts = dir.path().join("counts.json");
    cmd_simulate(&spec, 1_000_000, 7, &counts).unwrap();
    let report_path = dir.path().join("report.json");
    let envelope = cmd_certify(
        &counts,
        Some(&report_path),
        &default_certify_options(),
        NumericPolicy64::default(),
    )
    .unwrap();
    assert!(
        (envelope.report.ree_lower_bound - 1.0).abs() < 0.02,
        "bound = {}",
        envelope.report.ree_lower_bound
    );
    assert_eq!(envelope.report.d_star, 2);
    assert!(report_path.exists());
}

#[test]
fn certify_separable_counts_gives_zero_bound() {
    // Diagonal sigma*-like record: uniform correlated counts, parity
    // estimator at exactly 1/d.
    let dir = TempDir::new().unwrap();
    let counts = CountsRecord {
        d: 3,
        coincidences: vec![
            vec![1_000_000, 0, 0],
            vec![0, 1_000_000, 0],
            vec![0, 0, 1_000_000],
        ],
        parity: ParityTally {
            even: 2_000_000,
            odd: 1_000_000,
        },
        metadata: BTreeMap::new(),
    };
    let path = write(
        dir.path(),
        "sigma.json",
        &serde_json::to_string_pretty(&entcert_cli::io::CountsFile {
            schema_version: 1,
            record: counts,
        })
        .unwrap(),
    );
    let envelope = cmd_certify(
        &path,
        None,
        &default_certify_options(),
        NumericPolicy64::default(),
    )
    .unwrap();
    assert!(
        envelope.report.ree_lower_bound.abs() <= 1e-9,
        "bound = {}",
        envelope.report.ree_lower_bound
    );
    assert_eq!(envelope.report.d_star, 1);
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = TempDir::new().unwrap();

    let malformed = write(dir.path(), "bad.json", "{ not json");
    let status = bin()
        .args(["certify", "--input"])
        .arg(&malformed)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let negative = write(
        dir.path(),
        "negative.json",
        r#"{"schema_version":1,"d":2,"coincidences":[[-5,0],[0,5]],"parity":{"even":1,"odd":0},"metadata":{}}"#,
    );
    let status = bin()
        .args(["certify", "--input"])
        .arg(&negative)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let zero = write(
        dir.path(),
        "zero.json",
        r#"{"schema_version":1,"d":2,"coincidences":[[0,0],[0,0]],"parity":{"even":1,"odd":0},"metadata":{}}"#,
    );
    let status = bin()
        .args(["certify", "--input"])
        .arg(&zero)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Correlated diagonal empty: gamma = 0 downstream, physics error.
    let no_diag = write(
        dir.path(),
        "nodiag.json",
        r#"{"schema_version":1,"d":2,"coincidences":[[0,50],[50,0]],"parity":{"even":80,"odd":20},"metadata":{}}"#,
    );
    let status = bin()
        .args(["certify", "--input"])
        .arg(&no_diag)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn simulate_rejects_unnormalized_lambda() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "badspec.json",
        r#"{
  "schema_version": 1,
  "d": 2,
  "alpha": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]],
  "gamma": 0.9,
  "noise": { "kind": "incoherent", "lambda": [0.7, 0.7] }
}"#,
    );
    let out = dir.path().join("counts.json");
    let status = bin()
        .args(["simulate", "--shots", "1000", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let spec = bell_spec(dir.path());
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    let out3 = dir.path().join("c.json");
    cmd_simulate(&spec, 100_000, 7, &out1).unwrap();
    cmd_simulate(&spec, 100_000, 7, &out2).unwrap();
    cmd_simulate(&spec, 100_000, 8, &out3).unwrap();
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
    assert_ne!(fs::read(&out1).unwrap(), fs::read(&out3).unwrap());
}

#[test]
fn simulate_recovers_uncorrelated_fraction() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "noisy.json",
        r#"{
  "schema_version": 1,
  "d": 2,
  "alpha": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]],
  "gamma": 0.9,
  "noise": { "kind": "white" }
}"#,
    );
    let out = dir.path().join("counts.json");
    let file = cmd_simulate(&spec, 1_000_000, 11, &out).unwrap();
    let q = file.record.uncorrelated_total() as f64 / file.record.total_coincidences() as f64;
    let sigma = (0.1f64 * 0.9 / 1_000_000.0).sqrt();
    assert!((q - 0.1).abs() < 3.0 * sigma, "q = {q}");
}

#[test]
fn curve_files_have_expected_shape() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curves.csv");
    let rows = cmd_curves(2, 6, 41, CurveMode::Ree, &out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("d,purity,bound\n"));
    assert_eq!(text.lines().count(), 1 + rows.len());

    // Nondecreasing in purity within each dimension, exact endpoints.
    for d in 2usize..=6 {
        let curve: Vec<_> = rows.iter().filter(|r| r.d == d).collect();
        assert_eq!(curve.len(), 41);
        for pair in curve.windows(2) {
            assert!(pair[1].bound >= pair[0].bound - 1e-12);
        }
        assert!(curve.first().unwrap().bound.abs() <= 1e-12);
        assert!((curve.last().unwrap().bound - (d as f64).log2()).abs() <= 1e-12);
    }

    // Pointwise nondecreasing in d at the same relative grid position.
    for i in 0..41 {
        let mut prev = -1.0f64;
        for d in 2usize..=6 {
            let row = rows.iter().filter(|r| r.d == d).nth(i).unwrap();
            assert!(row.bound >= prev - 1e-12);
            prev = row.bound;
        }
    }
}

#[test]
fn curve_dstar_mode_is_integer_staircase() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("dstar.csv");
    let rows = cmd_curves(4, 4, 101, CurveMode::DStar, &out).unwrap();
    for row in &rows {
        assert_eq!(row.bound, row.bound.round());
    }
    assert_eq!(rows.last().unwrap().bound, 4.0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",1"));
    assert!(text.lines().last().unwrap().ends_with(",4"));
}

#[test]
fn curves_rejects_bad_range() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    assert!(cmd_curves(1, 4, 11, CurveMode::Ree, &out).is_err());
    assert!(cmd_curves(4, 2, 11, CurveMode::Ree, &out).is_err());
    assert!(cmd_curves(2, 65, 11, CurveMode::Ree, &out).is_err());
    assert!(cmd_curves(2, 4, 1, CurveMode::Ree, &out).is_err());
}

#[test]
fn oracle_command_verdicts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cands.csv");

    let verdict = cmd_oracle(4, 0.5, 1e-3, 0, 42, &out).unwrap();
    assert!(verdict.pass);
    assert_eq!(verdict.best_s_a, Some(1));
    assert_eq!(verdict.oracle_kind, "grid");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("s_a,phi_a,phi_x,objective,physical\n"));
    assert_eq!(text.lines().count(), 1 + 3);

    // Uniform purity: single feasible point, no two-valued candidates.
    let verdict = cmd_oracle(3, 1.0 / 3.0, 1e-3, 0, 42, &out).unwrap();
    assert!(verdict.pass);
    assert_eq!(verdict.best_s_a, None);
    assert!((verdict.closed_form + 3.0f64.log2()).abs() < 1e-9);

    // d = 2 goes through the exact two-eigenvalue solution.
    let verdict = cmd_oracle(2, 0.7, 1e-3, 0, 42, &out).unwrap();
    assert!(verdict.pass);
    assert_eq!(verdict.oracle_kind, "exact");

    // Large d uses the sampled oracle.
    let verdict = cmd_oracle(6, 0.6, 1e-3, 30_000, 42, &out).unwrap();
    assert!(verdict.pass);
    assert_eq!(verdict.oracle_kind, "sampled");
}

#[test]
fn oracle_rejects_infeasible_purity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cands.csv");
    let status = bin()
        .args([
            "oracle", "--d", "3", "--purity", "1.2", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn parity_sim_identical_and_orthogonal() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"schema_version":1,"amplitudes":[[1.0,0.0],[0.0,0.0]]}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"schema_version":1,"amplitudes":[[0.0,0.0],[1.0,0.0]]}"#,
    );
    let res = cmd_parity_sim(&a, None, 10_000, 1, None).unwrap();
    assert!(res.pass);
    assert!((res.closed_form - 1.0).abs() < 1e-12);
    assert_eq!(res.counts.unwrap().odd, 0);

    let res = cmd_parity_sim(&a, Some(&b), 0, 1, None).unwrap();
    assert!(res.pass);
    assert!(res.closed_form.abs() < 1e-12);
}

#[test]
fn mc_threshold_env_override_controls_model() {
    let dir = TempDir::new().unwrap();
    // 10% uncorrelated counts: noisy under defaults.
    let counts = write(
        dir.path(),
        "counts.json",
        r#"{"schema_version":1,"d":2,"coincidences":[[45,5],[5,45]],"parity":{"even":90,"odd":10},"metadata":{}}"#,
    );
    let report = dir.path().join("report.json");
    let status = bin()
        .args(["certify", "--input"])
        .arg(&counts)
        .arg("--out")
        .arg(&report)
        .env("ENTCERT_MC_THRESHOLD", "0.5")
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("noise_free_threshold"));
    assert!(text.contains("\"kind\": \"noise_free\""));
}

#[test]
fn bootstrap_summary_attached() {
    let dir = TempDir::new().unwrap();
    let spec = bell_spec(dir.path());
    let counts = dir.path().join("counts.json");
    cmd_simulate(&spec, 200_000, 3, &counts).unwrap();
    let mut options = default_certify_options();
    options.bootstrap = 50;
    let envelope = cmd_certify(&counts, None, &options, NumericPolicy64::default()).unwrap();
    let summary = envelope.bootstrap.expect("bootstrap block");
    assert_eq!(summary.resamples, 50);
    assert_eq!(summary.failures, 0);
    assert!(summary.ree_std.is_finite());
    assert!((summary.ree_mean - 1.0).abs() < 0.05);
    assert!(summary.ree_p025 <= summary.ree_p975);
}

/// Simulate -> certify on seeded random noisy states never overshoots the
/// exact-component route by more than the empirical 3-sigma spread.
#[test]
fn end_to_end_soundness_over_random_states() {
    let policy = NumericPolicy64::default();
    let mut rng = StdRng::seed_from_u64(0x50BA);
    let shots = 1_000_000u64;

    for case in 0..50 {
        let d = 2 + (case % 5);
        let gamma: f64 = rng.gen_range(0.5..0.98);
        let mc = sample::random_mc_state::<f64, _>(d, &mut rng);
        let noise =
            DensityMatrix64::diagonal_noise(&vec![1.0 / (d * (d - 1)) as f64; d * (d - 1)])
                .unwrap();
        let rho = DensityMatrix64::mix(&mc, &noise, gamma).unwrap();

        let exact_route = gamma * ree_exact_mc(&mc).unwrap() + xlog2(gamma) + xlog2(1.0 - gamma);

        let run = |seed: u64| -> Option<f64> {
            let coincidences = simulate_coincidence_counts(&rho, shots, seed).ok()?;
            let (even, odd) = simulate_parity_counts(&rho, shots, seed ^ 0xA5A5).ok()?;
            let record = CountsRecord {
                d,
                coincidences,
                parity: ParityTally { even, odd },
                metadata: BTreeMap::new(),
            };
            let (input, _) =
                estimate_params_from_counts::<f64>(&record, NoiseChoice::Auto, &policy).ok()?;
            Some(certify(&input, &policy).ok()?.ree_lower_bound)
        };

        let certified = match run(1000 + case as u64) {
            Some(v) => v,
            None => continue,
        };
        let replicas: Vec<f64> = (0..32u64).filter_map(|r| run(31_000 + 97 * r)).collect();
        if replicas.len() < 8 {
            continue;
        }
        let mean = replicas.iter().sum::<f64>() / replicas.len() as f64;
        let var = replicas.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / replicas.len() as f64;
        let sigma = var.sqrt();
        assert!(
            certified <= exact_route + 3.0 * sigma + 1e-6,
            "case {case}: certified {certified} vs exact-route {exact_route} (sigma {sigma})"
        );
    }
}
