//! Experiment dispatch and output assembly: every command produces one CSV
//! table, one JSON summary, and a pass/fail verdict over its gates.

use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

use biphoton::experiments::{
    all_passed, basis_ambiguity_check, cat_experiment, chsh_experiment, decoherence_chain,
    no_signaling_sweep, phase_scan, trials_experiment, zwm_experiment, DecoherenceConfig,
    GateCheck,
};
use biphoton::numerics::complex_to_json;
use biphoton::optics::{build_rto, calibrate, marginals, CalibrationRecord, PhaseSettings};
use biphoton::vn_measure::{write_records_csv, StreamRng};

use crate::args::{parse_args, Parsed};
use crate::config::{ExperimentKind, RunConfig, FORMAT_VERSION};
use crate::emit::{cell_f, cell_opt_f, cell_u, to_json_string, write_file, CsvTable};
use crate::error::CliError;

pub struct RunOutput {
    pub csv_text: String,
    pub results: serde_json::Value,
    pub checks: Vec<GateCheck>,
    /// Additional files, e.g. a dumped unitary.
    pub extra: Vec<(PathBuf, String)>,
}

/// Shadow of the resolved configuration for the JSON summary.
#[derive(Serialize)]
struct ConfigJson {
    command: &'static str,
    seed: u64,
    trials: u64,
    points: u32,
    phi_s: f64,
    phi_a: f64,
    c1: [f64; 2],
    c2: [f64; 2],
    zwm_overlap: [f64; 2],
    theta: f64,
    collisions: usize,
    chsh_settings: [f64; 4],
    out_csv: String,
    out_json: String,
    quiet: bool,
}

impl ConfigJson {
    fn new(config: &RunConfig) -> Self {
        Self {
            command: config.command.name(),
            seed: config.seed,
            trials: config.trials,
            points: config.points,
            phi_s: config.phi_s,
            phi_a: config.phi_a,
            c1: [config.c1.re, config.c1.im],
            c2: [config.c2.re, config.c2.im],
            zwm_overlap: [config.zwm_overlap.re, config.zwm_overlap.im],
            theta: config.theta,
            collisions: config.collisions,
            chsh_settings: [
                config.chsh_a,
                config.chsh_a_prime,
                config.chsh_b,
                config.chsh_b_prime,
            ],
            out_csv: config.out_csv.display().to_string(),
            out_json: config.out_json.display().to_string(),
            quiet: config.quiet,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    format_version: &'a str,
    command: &'static str,
    seed: u64,
    rng_algorithm: &'static str,
    config: ConfigJson,
    results: &'a serde_json::Value,
    checks: &'a [GateCheck],
    passed: bool,
}

fn calibration_json(cal: &CalibrationRecord) -> serde_json::Value {
    json!({ "origin_shift": cal.origin_shift, "w": cal.w, "note": cal.note })
}

pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    match config.command {
        ExperimentKind::Scan => run_scan(config),
        ExperimentKind::Trials => run_trials_cmd(config),
        ExperimentKind::Chsh => run_chsh(config),
        ExperimentKind::NoSignal => run_nosignal(config),
        ExperimentKind::Zwm => run_zwm(config),
        ExperimentKind::Decohere => run_decohere(config),
        ExperimentKind::Cat => run_cat(config),
        ExperimentKind::Ambiguity => run_ambiguity(config),
    }
}

fn dump_unitary_file(
    config: &RunConfig,
    cal: &CalibrationRecord,
    settings: PhaseSettings,
) -> Vec<(PathBuf, String)> {
    match &config.dump_unitary {
        Some(path) => {
            let physical = PhaseSettings {
                phi_s: settings.phi_s - cal.origin_shift,
                phi_a: settings.phi_a,
            };
            let (_, unitary) = build_rto(physical);
            vec![(path.clone(), to_json_string(&unitary.to_json()))]
        }
        None => Vec::new(),
    }
}

fn run_scan(config: &RunConfig) -> Result<RunOutput, CliError> {
    let cal = calibrate();
    let rng = StreamRng::new(config.seed);
    let outcome = phase_scan(config.points, config.trials, &rng, &cal)?;

    let mut table = CsvTable::new(vec![
        "delta",
        "c_analytic",
        "c_empirical",
        "n_trials",
        "n11",
        "n12",
        "n21",
        "n22",
    ]);
    for (i, point) in outcome.points.iter().enumerate() {
        let counts = outcome.ledgers.get(i).map(|l| l.counts);
        let count_cell = |k: usize| counts.map(|c| cell_u(c[k])).unwrap_or_default();
        table.push(vec![
            cell_f(point.delta),
            cell_f(point.c_analytic),
            cell_opt_f(point.c_empirical),
            cell_u(point.n_trials),
            count_cell(0),
            count_cell(1),
            count_cell(2),
            count_cell(3),
        ]);
    }

    let max_analytic = outcome
        .points
        .iter()
        .map(|p| (p.c_analytic - p.delta.cos()).abs())
        .fold(0.0f64, f64::max);
    let max_empirical = outcome
        .points
        .iter()
        .filter_map(|p| p.c_empirical.map(|c| (c - p.c_analytic).abs()))
        .fold(0.0f64, f64::max);
    let results = json!({
        "points": config.points,
        "trials_per_point": config.trials,
        "max_analytic_deviation": max_analytic,
        "max_empirical_deviation": if config.trials > 0 { Some(max_empirical) } else { None },
        "calibration": calibration_json(&cal),
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: outcome.checks,
        extra: dump_unitary_file(
            config,
            &cal,
            PhaseSettings {
                phi_s: 0.0,
                phi_a: 0.0,
            },
        ),
    })
}

fn run_trials_cmd(config: &RunConfig) -> Result<RunOutput, CliError> {
    let cal = calibrate();
    let rng = StreamRng::new(config.seed);
    let settings = PhaseSettings::new(config.phi_s, config.phi_a)?;
    let outcome = trials_experiment(settings, config.trials, &rng, &cal)?;

    let mut table = CsvTable::new(vec![
        "phi_s",
        "phi_a",
        "n_trials",
        "n11",
        "n12",
        "n21",
        "n22",
        "c_empirical",
        "c_analytic",
    ]);
    let ledger = &outcome.ledger;
    table.push(vec![
        cell_f(settings.phi_s),
        cell_f(settings.phi_a),
        cell_u(ledger.total()),
        cell_u(ledger.counts[0]),
        cell_u(ledger.counts[1]),
        cell_u(ledger.counts[2]),
        cell_u(ledger.counts[3]),
        cell_f(ledger.empirical_correlation()),
        cell_f(outcome.analytic.correlation()),
    ]);

    let results = json!({
        "counts": ledger.counts,
        "frequencies": ledger.frequencies(),
        "analytic": outcome.analytic,
        "c_empirical": ledger.empirical_correlation(),
        "c_analytic": outcome.analytic.correlation(),
        "calibration": calibration_json(&cal),
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: outcome.checks,
        extra: dump_unitary_file(config, &cal, settings),
    })
}

fn run_chsh(config: &RunConfig) -> Result<RunOutput, CliError> {
    let cal = calibrate();
    let rng = StreamRng::new(config.seed);
    let outcome = chsh_experiment(
        config.chsh_a,
        config.chsh_a_prime,
        config.chsh_b,
        config.chsh_b_prime,
        config.trials,
        &rng,
        &cal,
    )?;

    let mut table = CsvTable::new(vec![
        "pair",
        "phi_s",
        "phi_a",
        "e_analytic",
        "e_empirical",
        "n_trials",
        "n11",
        "n12",
        "n21",
        "n22",
    ]);
    for (k, &(phi_s, phi_a)) in outcome.analytic.settings.iter().enumerate() {
        let ledger = outcome.ledgers.get(k);
        let empirical = outcome.empirical.as_ref().map(|e| e.e_values[k]);
        let count_cell = |idx: usize| ledger.map(|l| cell_u(l.counts[idx])).unwrap_or_default();
        table.push(vec![
            cell_u(k as u64),
            cell_f(phi_s),
            cell_f(phi_a),
            cell_f(outcome.analytic.e_values[k]),
            cell_opt_f(empirical),
            cell_u(config.trials),
            count_cell(0),
            count_cell(1),
            count_cell(2),
            count_cell(3),
        ]);
    }

    let results = json!({
        "s_analytic": outcome.analytic.s,
        "s_empirical": outcome.empirical.as_ref().map(|e| e.s),
        "e_analytic": outcome.analytic.e_values,
        "e_empirical": outcome.empirical.as_ref().map(|e| e.e_values),
        "settings": outcome.analytic.settings,
        "calibration": calibration_json(&cal),
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: outcome.checks,
        extra: Vec::new(),
    })
}

fn run_nosignal(config: &RunConfig) -> Result<RunOutput, CliError> {
    let cal = calibrate();
    let rng = StreamRng::new(config.seed);
    let report = no_signaling_sweep(config.points, config.trials, &rng, &cal)?;

    let mut table = CsvTable::new(vec![
        "phi_s",
        "phi_a",
        "p_a1",
        "p_a2",
        "p_s1",
        "p_s2",
        "max_deviation",
    ]);
    let grid = config.points;
    for i in 0..grid {
        for j in 0..grid {
            let settings = PhaseSettings::new(
                2.0 * std::f64::consts::PI * i as f64 / grid as f64,
                2.0 * std::f64::consts::PI * j as f64 / grid as f64,
            )?;
            let (a1, a2, s1, s2) = marginals(settings, &cal);
            let dev = [a1, a2, s1, s2]
                .iter()
                .map(|m| (m - 0.5).abs())
                .fold(0.0f64, f64::max);
            table.push(vec![
                cell_f(settings.phi_s),
                cell_f(settings.phi_a),
                cell_f(a1),
                cell_f(a2),
                cell_f(s1),
                cell_f(s2),
                cell_f(dev),
            ]);
        }
    }

    let results = json!({
        "grid": report.grid,
        "max_marginal_deviation": report.max_marginal_deviation,
        "empirical": report.empirical,
        "calibration": calibration_json(&cal),
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: report.checks,
        extra: Vec::new(),
    })
}

fn run_zwm(config: &RunConfig) -> Result<RunOutput, CliError> {
    let outcome = zwm_experiment(config.zwm_overlap, config.points)?;

    let mut table = CsvTable::new(vec!["phi", "p1", "p2", "p1_oracle", "p2_oracle"]);
    for point in &outcome.points {
        table.push(vec![
            cell_f(point.phi),
            cell_f(point.p1),
            cell_f(point.p2),
            cell_f(point.p1_oracle),
            cell_f(point.p2_oracle),
        ]);
    }

    let results = json!({
        "overlap": complex_to_json(outcome.overlap),
        "visibility": outcome.visibility,
        "visibility_oracle": outcome.visibility_oracle,
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: outcome.checks,
        extra: Vec::new(),
    })
}

fn run_decohere(config: &RunConfig) -> Result<RunOutput, CliError> {
    let cfg = DecoherenceConfig::new(config.theta, config.collisions)?;
    let outcome = decoherence_chain(cfg)?;

    let mut table = CsvTable::new(vec!["n", "visibility", "visibility_explicit"]);
    for point in &outcome.points {
        table.push(vec![
            cell_u(point.n as u64),
            cell_f(point.visibility),
            cell_opt_f(point.explicit),
        ]);
    }

    let results = json!({
        "theta": config.theta,
        "collisions": config.collisions,
        "final_visibility": outcome.points.last().map(|p| p.visibility),
        "points": outcome.points,
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: outcome.checks,
        extra: Vec::new(),
    })
}

fn run_cat(config: &RunConfig) -> Result<RunOutput, CliError> {
    let rng = StreamRng::new(config.seed);
    let outcome = cat_experiment(config.c1, config.c2, config.trials, &rng)?;
    let scenario = &outcome.scenario;

    let mut csv_bytes = Vec::new();
    write_records_csv(&mut csv_bytes, &scenario.records)
        .map_err(|err| CliError::Runtime(format!("record serialization failed: {err}")))?;

    let results = json!({
        "probabilities": scenario.probabilities,
        "counts": scenario.counts,
        "cross_count": scenario.cross_count,
        "purity": {
            "global": scenario.purity_global,
            "s": scenario.purity_s,
            "a": scenario.purity_a,
        },
        "entropy_bits": {
            "global": scenario.entropy_global,
            "s": scenario.entropy_s,
            "a": scenario.entropy_a,
        },
        "schmidt": {
            "coefficients": scenario.schmidt.coefficients,
            "degenerate": scenario.schmidt.degenerate,
        },
        "state": scenario.state.to_json(),
        "rho_s": scenario.rho_s.to_json(),
        "rho_a": scenario.rho_a.to_json(),
    });
    Ok(RunOutput {
        csv_text: String::from_utf8(csv_bytes).expect("records CSV is UTF-8"),
        results,
        checks: outcome.checks,
        extra: Vec::new(),
    })
}

fn run_ambiguity(config: &RunConfig) -> Result<RunOutput, CliError> {
    let report = basis_ambiguity_check(config.c1, config.c2)?;

    let mut table = CsvTable::new(vec![
        "c1_sq",
        "c2_sq",
        "s_offdiag_mag",
        "r_diag_1",
        "r_diag_2",
        "r_offdiag_re",
        "r_offdiag_im",
        "r_offdiag_mag",
        "degenerate",
    ]);
    table.push(vec![
        cell_f(report.c1_sq),
        cell_f(report.c2_sq),
        cell_f(report.s_offdiag_magnitude),
        cell_f(report.r_matrix[(0, 0)].re),
        cell_f(report.r_matrix[(1, 1)].re),
        cell_f(report.r_matrix[(0, 1)].re),
        cell_f(report.r_matrix[(0, 1)].im),
        cell_f(report.r_offdiag_magnitude),
        report.degenerate.to_string(),
    ]);

    let results = json!({
        "c1_sq": report.c1_sq,
        "c2_sq": report.c2_sq,
        "s_matrix": report.s_matrix.to_json(),
        "r_matrix": report.r_matrix.to_json(),
        "s_offdiag_magnitude": report.s_offdiag_magnitude,
        "r_offdiag_magnitude": report.r_offdiag_magnitude,
        "degenerate": report.degenerate,
    });
    Ok(RunOutput {
        csv_text: table.render(),
        results,
        checks: report.checks,
        extra: Vec::new(),
    })
}

/// Parses argv, runs the experiment, writes the outputs, and reports whether
/// every gate passed.
pub fn run_main<S: AsRef<str>>(argv: &[S], env_seed: Option<&str>) -> Result<bool, CliError> {
    let config = match parse_args(argv, env_seed)? {
        Parsed::Run(config) => *config,
        Parsed::Display(text) => {
            println!("{text}");
            return Ok(true);
        }
    };

    let started = Instant::now();
    let output = execute(&config)?;
    let passed = all_passed(&output.checks);

    let summary = Summary {
        format_version: FORMAT_VERSION,
        command: config.command.name(),
        seed: config.seed,
        rng_algorithm: StreamRng::ALGORITHM,
        config: ConfigJson::new(&config),
        results: &output.results,
        checks: &output.checks,
        passed,
    };
    write_file(&config.out_csv, &output.csv_text)?;
    write_file(&config.out_json, &to_json_string(&summary))?;
    for (path, contents) in &output.extra {
        write_file(path, contents)?;
    }

    if !config.quiet {
        println!(
            "biphoton {}: seed={} trials={} points={}",
            config.command.name(),
            config.seed,
            config.trials,
            config.points
        );
        for check in &output.checks {
            println!(
                "  {} {}: observed {:.3e}, tolerance {:.3e}",
                if check.passed { "pass" } else { "FAIL" },
                check.name,
                check.observed,
                check.tolerance
            );
        }
        println!(
            "  wrote {} and {}",
            config.out_csv.display(),
            config.out_json.display()
        );
        for (path, _) in &output.extra {
            println!("  wrote {}", path.display());
        }
        // Timing stays on stdout so the emitted files are byte-stable.
        println!(
            "  {} in {:.2}s",
            if passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    Ok(passed)
}
