//! `entcert`: certify high-dimensional bipartite entanglement from
//! coincidence counts and a single parity-based purity measurement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entcert_cli::commands::{
    cmd_certify, cmd_curves, cmd_oracle, cmd_parity_sim, cmd_simulate, CertifyOptions, CurveMode,
};
use entcert_cli::error::CliResult;
use entcert_cli::policy::policy_from_env;

#[derive(Parser)]
#[command(
    name = "entcert",
    version,
    about = "Entanglement certification for maximally correlated bipartite states",
    long_about = "Certifies high-dimensional bipartite entanglement from 2d+1 measurements: \
                  d correlated coincidence rates, the uncorrelated coincidence rate(s), and a \
                  two-copy parity measurement of purity. Exit codes: 0 success, 2 input error, \
                  3 physics/consistency error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseModelArg {
    /// Noise-free below the mc-threshold, white noise above it.
    Auto,
    /// Force the noise-free model (gamma = 1), ignoring uncorrelated counts.
    None,
    /// White noise: uniform over uncorrelated outcomes.
    White,
    /// Per-outcome noise estimated from the off-diagonal counts.
    Incoherent,
}

impl NoiseModelArg {
    fn to_choice(self) -> entcert::NoiseChoice {
        match self {
            NoiseModelArg::Auto => entcert::NoiseChoice::Auto,
            NoiseModelArg::None => entcert::NoiseChoice::ForceNoiseFree,
            NoiseModelArg::White => entcert::NoiseChoice::White,
            NoiseModelArg::Incoherent => entcert::NoiseChoice::Incoherent,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NoiseModelArg::Auto => "auto",
            NoiseModelArg::None => "none",
            NoiseModelArg::White => "white",
            NoiseModelArg::Incoherent => "incoherent",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveModeArg {
    /// Entanglement (relative entropy) lower bound.
    Ree,
    /// Entangled-dimension lower bound.
    Dstar,
}

#[derive(Subcommand)]
enum Command {
    /// Certify entanglement from a counts file and write a JSON report.
    Certify {
        /// Counts file (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Noise model applied to the uncorrelated counts.
        #[arg(long, value_enum, default_value = "auto")]
        noise_model: NoiseModelArg,
        /// Uncorrelated fraction below which the record counts as noise-free.
        #[arg(long)]
        mc_threshold: Option<f64>,
        /// Bootstrap resamples for the spread block (0 = off).
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        /// Seed for bootstrap resampling.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Emit bound-vs-purity curves for uniformly correlated states as CSV.
    Curves {
        #[arg(long, default_value_t = 2)]
        d_min: usize,
        #[arg(long, default_value_t = 12)]
        d_max: usize,
        /// Purity grid points per dimension (endpoints included).
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, value_enum, default_value = "ree")]
        mode: CurveModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate bound candidates and verify the closed form by brute force.
    Oracle {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        purity: f64,
        /// Grid step for the d = 3, 4 sweep.
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Random feasible points for d >= 5.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Candidate table (CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate coincidence and parity counts for a specified state.
    Simulate {
        /// State specification (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Counts file to write; consumable by `certify`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare closed-form and brute-force parity for two pure states.
    ParitySim {
        #[arg(long)]
        state_a: PathBuf,
        /// Defaults to state-a (identical copies).
        #[arg(long)]
        state_b: Option<PathBuf>,
        /// Optional shot-level simulation of the parity tallies.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Certify {
            input,
            out,
            noise_model,
            mc_threshold,
            bootstrap,
            seed,
        } => {
            let policy = policy_from_env()?;
            let options = CertifyOptions {
                noise: noise_model.to_choice(),
                noise_flag_name: noise_model.name().to_string(),
                mc_threshold,
                bootstrap,
                seed,
            };
            let envelope = cmd_certify(&input, out.as_deref(), &options, policy)?;
            let r = &envelope.report;
            eprintln!(
                "certified: ree_lower_bound = {:.6}, d_star = {}, purity_mc = {:.6}, warnings = {}",
                r.ree_lower_bound,
                r.d_star,
                r.purity_mc,
                r.warnings.len()
            );
            Ok(0)
        }
        Command::Curves {
            d_min,
            d_max,
            points,
            mode,
            out,
        } => {
            let mode = match mode {
                CurveModeArg::Ree => CurveMode::Ree,
                CurveModeArg::Dstar => CurveMode::DStar,
            };
            let rows = cmd_curves(d_min, d_max, points, mode, &out)?;
            eprintln!("wrote {} curve points to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Oracle {
            d,
            purity,
            resolution,
            samples,
            seed,
            out,
        } => {
            let verdict = cmd_oracle(d, purity, resolution, samples, seed, &out)?;
            println!(
                "closed-form = {:.12}, {} oracle = {:.12}, |diff| = {:.3e}, best s_a = {}: {}",
                verdict.closed_form,
                verdict.oracle_kind,
                verdict.oracle_min,
                verdict.abs_difference,
                verdict
                    .best_s_a
                    .map_or("-".to_string(), |s| s.to_string()),
                if verdict.pass { "PASS" } else { "FAIL" }
            );
            Ok(if verdict.pass { 0 } else { 3 })
        }
        Command::Simulate {
            spec,
            shots,
            seed,
            out,
        } => {
            let file = cmd_simulate(&spec, shots, seed, &out)?;
            eprintln!(
                "simulated {} coincidences and {} parity events to {}",
                file.record.total_coincidences(),
                file.record.parity.total(),
                out.display()
            );
            Ok(0)
        }
        Command::ParitySim {
            state_a,
            state_b,
            shots,
            seed,
            out,
        } => {
            let result = cmd_parity_sim(&state_a, state_b.as_deref(), shots, seed, out.as_deref())?;
            println!(
                "closed-form = {:.12}, brute-force = {:.12}, |diff| = {:.3e}: {}",
                result.closed_form,
                result.brute_force,
                result.abs_difference,
                if result.pass { "PASS" } else { "FAIL" }
            );
            Ok(if result.pass { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
