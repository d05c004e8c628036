//! Command-line surface. Flags override scenario-file values, which override
//! the documented defaults; `BIPHOTON_SEED` is the weakest seed source.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::PathBuf;

use crate::config::{
    parse_angle, parse_complex, ExperimentKind, PartialConfig, RunConfig, SEED_ENV_VAR,
};
use crate::error::CliError;
use crate::scenario;

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s)
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Parser, Debug)]
#[command(
    name = "biphoton",
    version,
    about = "Two-photon interferometry and quantum measurement simulator",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandLine>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Root seed for all sampling [default: 42, env BIPHOTON_SEED]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trials per sampled run; 0 keeps analytic-only output where allowed
    /// [default: 100000]
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Sweep or grid resolution [default: 360; nosignal grid: 32]
    #[arg(long, global = true)]
    pub points: Option<u32>,
    /// CSV output path [default: <command>.csv]
    #[arg(long = "out-csv", global = true, value_name = "PATH")]
    pub out_csv: Option<PathBuf>,
    /// JSON summary path [default: <command>.json]
    #[arg(long = "out-json", global = true, value_name = "PATH")]
    pub out_json: Option<PathBuf>,
    /// Scenario file of `key = value` lines; flags override it
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Suppress progress output [default: false]
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum CommandLine {
    /// Correlation against the phase difference over [0, 2pi)
    Scan(ScanArgs),
    /// Coincidence counting at one settings pair
    Trials(TrialsArgs),
    /// CHSH combination at four settings pairs
    Chsh(ChshArgs),
    /// Marginal flatness across a settings grid
    Nosignal(NosignalArgs),
    /// Which-path overlap sweep of fringe visibility
    Zwm(ZwmArgs),
    /// Visibility decay under repeated which-path recording
    Decohere(DecohereArgs),
    /// Correlated measurement of a two-level system
    Cat(CatArgs),
    /// Reduced state in the eigenbasis and the rotated basis
    Ambiguity(AmbiguityArgs),
}

#[derive(Args, Debug, Default)]
pub struct ScanArgs {
    /// Write the compiled joint unitary at zero settings as JSON
    #[arg(long, value_name = "PATH")]
    pub dump_unitary: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct TrialsArgs {
    /// Phase shift on the S arm, radians or pi literal [default: 0]
    #[arg(long = "phi-s", value_parser = angle, allow_hyphen_values = true)]
    pub phi_s: Option<f64>,
    /// Phase shift on the A arm, radians or pi literal [default: 0]
    #[arg(long = "phi-a", value_parser = angle, allow_hyphen_values = true)]
    pub phi_a: Option<f64>,
    /// Write the compiled joint unitary at these settings as JSON
    #[arg(long, value_name = "PATH")]
    pub dump_unitary: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ChshArgs {
    /// First S setting [default: 0]
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Second S setting [default: pi/2]
    #[arg(long = "a-prime", value_parser = angle, allow_hyphen_values = true)]
    pub a_prime: Option<f64>,
    /// First A setting [default: pi/4]
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Second A setting [default: 3pi/4]
    #[arg(long = "b-prime", value_parser = angle, allow_hyphen_values = true)]
    pub b_prime: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct NosignalArgs {}

#[derive(Args, Debug, Default)]
pub struct ZwmArgs {
    /// Which-path overlap, complex with |overlap| <= 1 [default: 0.5]
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub overlap: Option<Complex64>,
}

#[derive(Args, Debug, Default)]
pub struct DecohereArgs {
    /// Per-collision pointer angle in [0, pi/2] [default: pi/4]
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Chain length, at most 50 [default: 10]
    #[arg(long)]
    pub collisions: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct CatArgs {
    /// Amplitude of the first branch [default: 1/sqrt(2)]
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c1: Option<Complex64>,
    /// Amplitude of the second branch [default: 1/sqrt(2)]
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c2: Option<Complex64>,
}

#[derive(Args, Debug, Default)]
pub struct AmbiguityArgs {
    /// Amplitude of the first branch [default: 1/sqrt(2)]
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c1: Option<Complex64>,
    /// Amplitude of the second branch [default: 1/sqrt(2)]
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c2: Option<Complex64>,
}

/// Outcome of argument handling: a run configuration, or help/version text
/// that should be printed verbatim with exit code 0.
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    Display(String),
}

/// Full resolution pipeline from raw argv. `env_seed` is the value of
/// `BIPHOTON_SEED`, injected for testability.
pub fn parse_args<S: AsRef<str>>(argv: &[S], env_seed: Option<&str>) -> Result<Parsed, CliError> {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                return Ok(Parsed::Display(err.to_string()));
            }
            // One-line diagnostic; clap's rendering puts the cause first.
            let rendered = err.to_string();
            let first_line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let first_line = first_line.strip_prefix("error: ").unwrap_or(first_line);
            return Err(CliError::Usage(first_line.to_string()));
        }
    };

    let mut env_layer = PartialConfig::default();
    if let Some(raw) = env_seed {
        let seed = raw
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV_VAR} must be a 64-bit integer")))?;
        env_layer.seed = Some(seed);
    }

    let scenario_layer = match &cli.common.scenario {
        Some(path) => scenario::parse_file(path)?,
        None => PartialConfig::default(),
    };

    let flag_layer = flags_to_partial(&cli);
    let merged = flag_layer.over(scenario_layer.over(env_layer));
    Ok(Parsed::Run(Box::new(merged.resolve()?)))
}

fn flags_to_partial(cli: &Cli) -> PartialConfig {
    let mut partial = PartialConfig {
        seed: cli.common.seed,
        trials: cli.common.trials,
        points: cli.common.points,
        out_csv: cli.common.out_csv.clone(),
        out_json: cli.common.out_json.clone(),
        quiet: cli.common.quiet.then_some(true),
        ..Default::default()
    };
    match &cli.command {
        None => {}
        Some(CommandLine::Scan(args)) => {
            partial.command = Some(ExperimentKind::Scan);
            partial.dump_unitary = args.dump_unitary.clone();
        }
        Some(CommandLine::Trials(args)) => {
            partial.command = Some(ExperimentKind::Trials);
            partial.phi_s = args.phi_s;
            partial.phi_a = args.phi_a;
            partial.dump_unitary = args.dump_unitary.clone();
        }
        Some(CommandLine::Chsh(args)) => {
            partial.command = Some(ExperimentKind::Chsh);
            partial.chsh_a = args.a;
            partial.chsh_a_prime = args.a_prime;
            partial.chsh_b = args.b;
            partial.chsh_b_prime = args.b_prime;
        }
        Some(CommandLine::Nosignal(_)) => partial.command = Some(ExperimentKind::NoSignal),
        Some(CommandLine::Zwm(args)) => {
            partial.command = Some(ExperimentKind::Zwm);
            partial.zwm_overlap = args.overlap;
        }
        Some(CommandLine::Decohere(args)) => {
            partial.command = Some(ExperimentKind::Decohere);
            partial.theta = args.theta;
            partial.collisions = args.collisions;
        }
        Some(CommandLine::Cat(args)) => {
            partial.command = Some(ExperimentKind::Cat);
            partial.c1 = args.c1;
            partial.c2 = args.c2;
        }
        Some(CommandLine::Ambiguity(args)) => {
            partial.command = Some(ExperimentKind::Ambiguity);
            partial.c1 = args.c1;
            partial.c2 = args.c2;
        }
    }
    partial
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn run(argv: &[&str], env: Option<&str>) -> Result<RunConfig, CliError> {
        match parse_args(argv, env)? {
            Parsed::Run(config) => Ok(*config),
            Parsed::Display(_) => panic!("expected a run configuration"),
        }
    }

    #[test]
    fn scan_flags_map_onto_config() {
        let config = run(
            &["biphoton", "scan", "--points", "360", "--seed", "42"],
            None,
        )
        .unwrap();
        assert_eq!(config.command, ExperimentKind::Scan);
        assert_eq!(config.points, 360);
        assert_eq!(config.seed, 42);
        assert_eq!(config.trials, crate::config::DEFAULT_TRIALS);
    }

    #[test]
    fn chsh_defaults_to_the_optimal_quadruple() {
        let config = run(&["biphoton", "chsh"], None).unwrap();
        assert_eq!(config.chsh_a, 0.0);
        assert_eq!(config.chsh_a_prime, FRAC_PI_2);
        assert_eq!(config.chsh_b, FRAC_PI_4);
        assert_eq!(config.chsh_b_prime, 3.0 * FRAC_PI_4);
    }

    #[test]
    fn cat_amplitude_validation_both_ways() {
        // 2e-5 off the unit norm: rejected.
        let err = run(
            &["biphoton", "cat", "--c1", "0.5477", "--c2", "0.8367"],
            None,
        );
        assert!(matches!(err, Err(CliError::Usage(_))));
        // Within 1e-6: accepted and exactly renormalized.
        let config = run(
            &[
                "biphoton",
                "cat",
                "--c1",
                "0.70710678",
                "--c2",
                "0.70710678",
            ],
            None,
        )
        .unwrap();
        let norm = (config.c1.norm_sqr() + config.c2.norm_sqr()).sqrt();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pi_literals_accepted_on_the_command_line() {
        let config = run(&["biphoton", "trials", "--phi-s", "pi/3"], None).unwrap();
        assert_eq!(config.phi_s, PI / 3.0);
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let err = run(&["biphoton", "scan", "--bogus"], None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("--bogus"), "{msg}");
        assert!(!msg.contains('\n'));
    }

    #[test]
    fn missing_subcommand_is_a_usage_error() {
        let err = run(&["biphoton"], None).unwrap_err();
        assert!(err.to_string().contains("subcommand"), "{err}");
    }

    #[test]
    fn env_seed_is_weakest() {
        let config = run(&["biphoton", "scan"], Some("7")).unwrap();
        assert_eq!(config.seed, 7);
        let config = run(&["biphoton", "scan", "--seed", "9"], Some("7")).unwrap();
        assert_eq!(config.seed, 9);
    }

    #[test]
    fn flags_override_scenario_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.txt");
        std::fs::write(&path, "command = scan\nseed = 5\npoints = 16\n").unwrap();
        let path_str = path.display().to_string();
        let config = run(
            &["biphoton", "scan", "--scenario", &path_str, "--seed", "11"],
            Some("3"),
        )
        .unwrap();
        // flag > file > env
        assert_eq!(config.seed, 11);
        assert_eq!(config.points, 16);
    }

    #[test]
    fn scenario_can_name_the_command() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.txt");
        std::fs::write(&path, "command = decohere\ncollisions = 5\n").unwrap();
        let path_str = path.display().to_string();
        let config = run(&["biphoton", "--scenario", &path_str], None).unwrap();
        assert_eq!(config.command, ExperimentKind::Decohere);
        assert_eq!(config.collisions, 5);
    }

    #[test]
    fn help_lists_every_global_flag_with_defaults() {
        let parsed = parse_args(&["biphoton", "--help"], None).unwrap();
        let Parsed::Display(text) = parsed else {
            panic!("expected help text")
        };
        for flag in [
            "--seed",
            "--trials",
            "--points",
            "--out-csv",
            "--out-json",
            "--scenario",
            "--quiet",
        ] {
            assert!(text.contains(flag), "help lacks {flag}:\n{text}");
        }
        assert!(text.contains("default: 42"), "{text}");
        assert!(text.contains("default: 100000"), "{text}");
    }
}
