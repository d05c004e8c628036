//! Flat `key = value` scenario files: one pair per line, `#` comments,
//! unknown or repeated keys rejected with the offending line number.

use std::path::{Path, PathBuf};

use crate::config::{
    parse_angle, parse_bool, parse_complex, ExperimentKind, PartialConfig, RunConfig,
};
use crate::error::CliError;

pub const KNOWN_KEYS: [&str; 20] = [
    "command",
    "seed",
    "trials",
    "points",
    "phi_s",
    "phi_a",
    "c1",
    "c2",
    "zwm_overlap",
    "theta",
    "collisions",
    "a",
    "a_prime",
    "b",
    "b_prime",
    "out_csv",
    "out_json",
    "dump_unitary",
    "quiet",
    "format_version",
];

pub fn parse_file(path: &Path) -> Result<PartialConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        CliError::Usage(format!("cannot read scenario {}: {err}", path.display()))
    })?;
    parse_text(&text, &path.display().to_string())
}

pub fn parse_text(text: &str, origin: &str) -> Result<PartialConfig, CliError> {
    let mut partial = PartialConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let fail = |message: String| CliError::Usage(format!("{origin}:{line_no}: {message}"));

        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(fail(format!("expected `key = value`, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(fail(format!("unknown key `{key}`")));
        }
        if seen.iter().any(|s| s == key) {
            return Err(fail(format!("key `{key}` given twice")));
        }
        seen.push(key.to_string());
        apply(&mut partial, key, value).map_err(fail)?;
    }
    Ok(partial)
}

fn apply(partial: &mut PartialConfig, key: &str, value: &str) -> Result<(), String> {
    match key {
        "command" => {
            partial.command = Some(
                ExperimentKind::from_name(value)
                    .ok_or_else(|| format!("unknown command {value:?}"))?,
            );
        }
        "seed" => partial.seed = Some(parse_int(value)?),
        "trials" => partial.trials = Some(parse_int(value)?),
        "points" => partial.points = Some(parse_int(value)? as u32),
        "phi_s" => partial.phi_s = Some(parse_angle(value)?),
        "phi_a" => partial.phi_a = Some(parse_angle(value)?),
        "c1" => partial.c1 = Some(parse_complex(value)?),
        "c2" => partial.c2 = Some(parse_complex(value)?),
        "zwm_overlap" => partial.zwm_overlap = Some(parse_complex(value)?),
        "theta" => partial.theta = Some(parse_angle(value)?),
        "collisions" => partial.collisions = Some(parse_int(value)? as usize),
        "a" => partial.chsh_a = Some(parse_angle(value)?),
        "a_prime" => partial.chsh_a_prime = Some(parse_angle(value)?),
        "b" => partial.chsh_b = Some(parse_angle(value)?),
        "b_prime" => partial.chsh_b_prime = Some(parse_angle(value)?),
        "out_csv" => partial.out_csv = Some(PathBuf::from(value)),
        "out_json" => partial.out_json = Some(PathBuf::from(value)),
        "dump_unitary" => partial.dump_unitary = Some(PathBuf::from(value)),
        "quiet" => partial.quiet = Some(parse_bool(value)?),
        "format_version" => partial.format_version = Some(value.to_string()),
        _ => unreachable!("key validated against KNOWN_KEYS"),
    }
    Ok(())
}

fn parse_int(s: &str) -> Result<u64, String> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| format!("malformed integer {s:?}"))
}

/// Loads and fully resolves a scenario file on its own; the file must name
/// the command.
pub fn load_scenario(path: &Path) -> Result<RunConfig, CliError> {
    parse_file(path)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_minimal_scenario() {
        let partial = parse_text("command = scan\npoints = 8\n", "test").unwrap();
        assert_eq!(partial.command, Some(ExperimentKind::Scan));
        assert_eq!(partial.points, Some(8));
        let config = partial.resolve().unwrap();
        assert_eq!(config.points, 8);
        assert_eq!(config.trials, crate::config::DEFAULT_TRIALS);
    }

    #[test]
    fn parses_pi_literals_and_comments() {
        let text = "# settings for the 75% agreement point\ncommand = trials\nphi_s = pi/3  # one third turn\n";
        let config = parse_text(text, "test").unwrap().resolve().unwrap();
        assert_eq!(config.phi_s, PI / 3.0);
        assert_eq!(config.phi_a, 0.0);
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let err = parse_text("foo = 1\n", "scenario.txt").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("scenario.txt:1"), "{message}");
        assert!(message.contains("unknown key `foo`"), "{message}");
    }

    #[test]
    fn rejects_duplicate_keys() {
        let err = parse_text("command = scan\nseed = 1\nseed = 2\n", "test").unwrap_err();
        assert!(err.to_string().contains("test:3"), "{err}");
    }

    #[test]
    fn rejects_lines_without_assignment() {
        let err = parse_text("command scan\n", "test").unwrap_err();
        assert!(err.to_string().contains("key = value"), "{err}");
    }

    #[test]
    fn missing_file_is_reported() {
        let err = parse_file(Path::new("/nonexistent/scenario.txt")).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }
}
