//! Run configuration: documented defaults, the three-layer merge
//! (flags over scenario file over defaults, with the environment variable as
//! the weakest seed source), and the value parsers shared by flags and
//! scenario keys.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "1";
pub const SEED_ENV_VAR: &str = "BIPHOTON_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Scan,
    Trials,
    Chsh,
    NoSignal,
    Zwm,
    Decohere,
    Cat,
    Ambiguity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Scan,
        ExperimentKind::Trials,
        ExperimentKind::Chsh,
        ExperimentKind::NoSignal,
        ExperimentKind::Zwm,
        ExperimentKind::Decohere,
        ExperimentKind::Cat,
        ExperimentKind::Ambiguity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Scan => "scan",
            ExperimentKind::Trials => "trials",
            ExperimentKind::Chsh => "chsh",
            ExperimentKind::NoSignal => "nosignal",
            ExperimentKind::Zwm => "zwm",
            ExperimentKind::Decohere => "decohere",
            ExperimentKind::Cat => "cat",
            ExperimentKind::Ambiguity => "ambiguity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Sweep resolution when none is given: 32 for the settings grid of the
    /// no-signaling sweep, 360 everywhere else.
    pub fn default_points(&self) -> u32 {
        match self {
            ExperimentKind::NoSignal => 32,
            _ => 360,
        }
    }
}

/// Fully resolved run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: ExperimentKind,
    pub seed: u64,
    pub trials: u64,
    pub points: u32,
    pub phi_s: f64,
    pub phi_a: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub zwm_overlap: Complex64,
    pub theta: f64,
    pub collisions: usize,
    pub chsh_a: f64,
    pub chsh_a_prime: f64,
    pub chsh_b: f64,
    pub chsh_b_prime: f64,
    pub out_csv: PathBuf,
    pub out_json: PathBuf,
    pub dump_unitary: Option<PathBuf>,
    pub quiet: bool,
    pub format_version: String,
}

/// Documented defaults for a command.
pub fn defaults(kind: ExperimentKind) -> RunConfig {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    RunConfig {
        command: kind,
        seed: DEFAULT_SEED,
        trials: DEFAULT_TRIALS,
        points: kind.default_points(),
        phi_s: 0.0,
        phi_a: 0.0,
        c1: inv_sqrt2,
        c2: inv_sqrt2,
        zwm_overlap: Complex64::new(0.5, 0.0),
        theta: FRAC_PI_4,
        collisions: 10,
        chsh_a: 0.0,
        chsh_a_prime: FRAC_PI_2,
        chsh_b: FRAC_PI_4,
        chsh_b_prime: 3.0 * FRAC_PI_4,
        out_csv: PathBuf::from(format!("{}.csv", kind.name())),
        out_json: PathBuf::from(format!("{}.json", kind.name())),
        dump_unitary: None,
        quiet: false,
        format_version: FORMAT_VERSION.to_string(),
    }
}

/// One merge layer; unset fields fall through to the next layer.
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub command: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub points: Option<u32>,
    pub phi_s: Option<f64>,
    pub phi_a: Option<f64>,
    pub c1: Option<Complex64>,
    pub c2: Option<Complex64>,
    pub zwm_overlap: Option<Complex64>,
    pub theta: Option<f64>,
    pub collisions: Option<usize>,
    pub chsh_a: Option<f64>,
    pub chsh_a_prime: Option<f64>,
    pub chsh_b: Option<f64>,
    pub chsh_b_prime: Option<f64>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub dump_unitary: Option<PathBuf>,
    pub quiet: Option<bool>,
    pub format_version: Option<String>,
}

macro_rules! take_first {
    ($high:expr, $low:expr; $($field:ident),+ $(,)?) => {{
        let mut merged = $low;
        $( if $high.$field.is_some() { merged.$field = $high.$field; } )+
        merged
    }};
}

impl PartialConfig {
    /// Merges `self` over `weaker`: set fields in `self` win.
    pub fn over(self, weaker: PartialConfig) -> PartialConfig {
        take_first!(self, weaker;
            command, seed, trials, points, phi_s, phi_a, c1, c2, zwm_overlap,
            theta, collisions, chsh_a, chsh_a_prime, chsh_b, chsh_b_prime,
            out_csv, out_json, dump_unitary, quiet, format_version,
        )
    }

    /// Fills unset fields from the documented defaults and validates ranges.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Usage("missing required subcommand".into()))?;
        let d = defaults(command);
        let mut config = RunConfig {
            command,
            seed: self.seed.unwrap_or(d.seed),
            trials: self.trials.unwrap_or(d.trials),
            points: self.points.unwrap_or(d.points),
            phi_s: self.phi_s.unwrap_or(d.phi_s),
            phi_a: self.phi_a.unwrap_or(d.phi_a),
            c1: self.c1.unwrap_or(d.c1),
            c2: self.c2.unwrap_or(d.c2),
            zwm_overlap: self.zwm_overlap.unwrap_or(d.zwm_overlap),
            theta: self.theta.unwrap_or(d.theta),
            collisions: self.collisions.unwrap_or(d.collisions),
            chsh_a: self.chsh_a.unwrap_or(d.chsh_a),
            chsh_a_prime: self.chsh_a_prime.unwrap_or(d.chsh_a_prime),
            chsh_b: self.chsh_b.unwrap_or(d.chsh_b),
            chsh_b_prime: self.chsh_b_prime.unwrap_or(d.chsh_b_prime),
            out_csv: self.out_csv.unwrap_or(d.out_csv),
            out_json: self.out_json.unwrap_or(d.out_json),
            dump_unitary: self.dump_unitary,
            quiet: self.quiet.unwrap_or(d.quiet),
            format_version: self.format_version.unwrap_or(d.format_version),
        };
        validate(&mut config)?;
        Ok(config)
    }
}

fn validate(config: &mut RunConfig) -> Result<(), CliError> {
    if config.format_version != FORMAT_VERSION {
        return Err(CliError::Usage(format!(
            "unsupported format_version {:?} (this build writes {FORMAT_VERSION:?})",
            config.format_version
        )));
    }
    for (name, value) in [("phi_s", config.phi_s), ("phi_a", config.phi_a)] {
        if !value.is_finite() {
            return Err(CliError::Usage(format!("{name} must be finite")));
        }
    }
    if matches!(
        config.command,
        ExperimentKind::Scan | ExperimentKind::NoSignal | ExperimentKind::Zwm
    ) && config.points < 2
    {
        return Err(CliError::Usage(format!(
            "points must be at least 2, got {}",
            config.points
        )));
    }
    if config.command == ExperimentKind::Trials && config.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    // Amplitudes: small rounding in the inputs is renormalized exactly,
    // anything beyond 1e-6 is rejected.
    let norm = (config.c1.norm_sqr() + config.c2.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(CliError::Usage(format!(
            "amplitudes (c1, c2) have norm {norm:.9}, more than 1e-6 away from 1"
        )));
    }
    config.c1 /= norm;
    config.c2 /= norm;
    let overlap = config.zwm_overlap.norm();
    if overlap > 1.0 + 1e-12 {
        return Err(CliError::Usage(format!(
            "zwm_overlap magnitude {overlap:.9} exceeds 1"
        )));
    }
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&config.theta) {
        return Err(CliError::Usage(format!(
            "theta {} outside [0, pi/2]",
            config.theta
        )));
    }
    if config.collisions > biphoton::experiments::MAX_COLLISIONS {
        return Err(CliError::Usage(format!(
            "collisions {} exceeds the maximum {}",
            config.collisions,
            biphoton::experiments::MAX_COLLISIONS
        )));
    }
    Ok(())
}

impl RunConfig {
    /// Canonical scenario text; parsing it back recovers this configuration.
    pub fn to_scenario_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("command", self.command.name().to_string());
        line("seed", self.seed.to_string());
        line("trials", self.trials.to_string());
        line("points", self.points.to_string());
        line("phi_s", fmt_float(self.phi_s));
        line("phi_a", fmt_float(self.phi_a));
        line("c1", fmt_complex(self.c1));
        line("c2", fmt_complex(self.c2));
        line("zwm_overlap", fmt_complex(self.zwm_overlap));
        line("theta", fmt_float(self.theta));
        line("collisions", self.collisions.to_string());
        line("a", fmt_float(self.chsh_a));
        line("a_prime", fmt_float(self.chsh_a_prime));
        line("b", fmt_float(self.chsh_b));
        line("b_prime", fmt_float(self.chsh_b_prime));
        line("out_csv", self.out_csv.display().to_string());
        line("out_json", self.out_json.display().to_string());
        if let Some(path) = &self.dump_unitary {
            line("dump_unitary", path.display().to_string());
        }
        line("quiet", self.quiet.to_string());
        line("format_version", self.format_version.clone());
        out
    }
}

/// 17 significant digits; round-trips every double exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_float(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", fmt_float(z.re), sign, fmt_float(z.im.abs()))
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("malformed number {s:?}"))
}

/// Radians, either a plain float or a `pi` literal: `pi`, `pi/3`, `2pi/3`,
/// `-0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(pos) = t.find("pi") {
        let (coef_str, rest) = (&t[..pos], &t[pos + 2..]);
        let coefficient = match coef_str.trim() {
            "" => 1.0,
            "-" => -1.0,
            "+" => 1.0,
            other => parse_f64(other)?,
        };
        let divisor = match rest.trim() {
            "" => 1.0,
            slash if slash.starts_with('/') => {
                let d = parse_f64(&slash[1..])?;
                if d == 0.0 {
                    return Err(format!("zero divisor in angle {s:?}"));
                }
                d
            }
            _ => return Err(format!("malformed angle {s:?}")),
        };
        Ok(coefficient * PI / divisor)
    } else {
        parse_f64(t)
    }
}

/// Complex literal: `0.5`, `0.5+0.3i`, `-0.2i`, `i`, `1e-3-2e-4i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = t.strip_suffix(['i', 'I']) else {
        return Ok(Complex64::new(parse_f64(t)?, 0.0));
    };
    match split_at_last_sign(body) {
        Some((re_part, sign, im_part)) => {
            let re = parse_f64(re_part)?;
            let magnitude = if im_part.trim().is_empty() {
                1.0
            } else {
                parse_f64(im_part)?
            };
            Ok(Complex64::new(re, sign * magnitude))
        }
        None => {
            let im = match body.trim() {
                "" => 1.0,
                "-" => -1.0,
                "+" => 1.0,
                other => parse_f64(other)?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// Last top-level `+`/`-`: not the leading sign, not an exponent sign.
fn split_at_last_sign(s: &str) -> Option<(&str, f64, &str)> {
    let bytes = s.as_bytes();
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            let sign = if c == b'+' { 1.0 } else { -1.0 };
            return Some((&s[..i], sign, &s[i + 1..]));
        }
    }
    None
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.3i").unwrap(), Complex64::new(0.5, 0.3));
        assert_eq!(parse_complex("-0.2i").unwrap(), Complex64::new(0.0, -0.2));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3-2e-4i").unwrap(),
            Complex64::new(1e-3, -2e-4)
        );
        assert!(parse_complex("").is_err());
        assert!(parse_complex("nonsense").is_err());
    }

    #[test]
    fn complex_formatting_round_trips() {
        for z in [
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(-0.25, 0.125),
            Complex64::new(0.0, -1.0),
        ] {
            let back = parse_complex(&fmt_complex(z)).unwrap();
            assert_eq!(z.re.to_bits(), back.re.to_bits());
            assert_eq!(z.im.to_bits(), back.im.to_bits());
        }
    }

    #[test]
    fn merge_priority_is_left_to_right() {
        let high = PartialConfig {
            seed: Some(7),
            ..Default::default()
        };
        let low = PartialConfig {
            seed: Some(1),
            trials: Some(10),
            ..Default::default()
        };
        let merged = high.over(low);
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.trials, Some(10));
    }

    #[test]
    fn resolve_fills_documented_defaults() {
        let config = PartialConfig {
            command: Some(ExperimentKind::Chsh),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(config.seed, DEFAULT_SEED);
        assert_eq!(config.trials, DEFAULT_TRIALS);
        assert_eq!(config.chsh_a, 0.0);
        assert_eq!(config.chsh_a_prime, FRAC_PI_2);
        assert_eq!(config.chsh_b, FRAC_PI_4);
        assert_eq!(config.chsh_b_prime, 3.0 * FRAC_PI_4);
        assert_eq!(config.out_csv, PathBuf::from("chsh.csv"));
    }

    #[test]
    fn resolve_rejects_missing_command() {
        assert!(matches!(
            PartialConfig::default().resolve(),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn amplitudes_slightly_off_norm_are_renormalized() {
        let config = PartialConfig {
            command: Some(ExperimentKind::Cat),
            c1: Some(Complex64::new(0.6, 0.0)),
            c2: Some(Complex64::new(0.8000001, 0.0)),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let norm = (config.c1.norm_sqr() + config.c2.norm_sqr()).sqrt();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amplitudes_far_from_norm_are_rejected() {
        // Four-digit inputs land 2e-5 off; that is past the 1e-6 gate.
        let err = PartialConfig {
            command: Some(ExperimentKind::Cat),
            c1: Some(Complex64::new(0.5477, 0.0)),
            c2: Some(Complex64::new(0.8367, 0.0)),
            ..Default::default()
        }
        .resolve();
        assert!(matches!(err, Err(CliError::Usage(_))));
    }

    #[test]
    fn scenario_text_round_trips_defaults() {
        for kind in ExperimentKind::ALL {
            let config = defaults(kind);
            let text = config.to_scenario_text();
            let partial = crate::scenario::parse_text(&text, "inline").unwrap();
            let back = partial.resolve().unwrap();
            assert_eq!(config, back, "round trip failed for {}", kind.name());
        }
    }
}
