//! Flat `key = value` scenario files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may appear
//! once. Unset keys keep the values of the base scenario, so a file can
//! either describe a scenario from scratch or adjust a preset. The sweep
//! keys must be given together.

use std::f64::consts::PI;
use std::path::Path;

use super::scenario::{Observable, Scenario, Sweep, SweepParam, TransitionSel};
use super::ScenarioError;
use crate::AtomParams;

pub const KEYS: [&str; 17] = [
    "name",
    "gamma_w",
    "omega_s",
    "omega_w",
    "delta_s",
    "delta_w",
    "transition",
    "phi",
    "observable",
    "tau_max",
    "n_tau",
    "omega_max",
    "n_omega",
    "sweep_param",
    "sweep_min",
    "sweep_max",
    "sweep_steps",
];

fn invalid(key: &str, value: &str, what: &str) -> ScenarioError {
    ScenarioError::Validation(format!("`{key} = {value}`: {what}"))
}

fn number(key: &str, value: &str) -> Result<f64, ScenarioError> {
    let v: f64 = value.parse().map_err(|_| invalid(key, value, "not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, value, "not finite"))
    }
}

fn count(key: &str, value: &str) -> Result<usize, ScenarioError> {
    value.parse().map_err(|_| invalid(key, value, "not a non-negative integer"))
}

/// Angle in radians. Also accepts `pi`, `pi/N` and `K*pi/N`.
pub fn parse_angle(key: &str, value: &str) -> Result<f64, ScenarioError> {
    let compact: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(pos) = compact.find("pi") {
        let (head, tail) = (&compact[..pos], &compact[pos + 2..]);
        let k = match head.strip_suffix('*') {
            Some(h) => number(key, h)?,
            None if head.is_empty() => 1.0,
            None if head == "-" => -1.0,
            None => return Err(invalid(key, value, "malformed multiple of pi")),
        };
        let n = match tail.strip_prefix('/') {
            Some(t) => number(key, t)?,
            None if tail.is_empty() => 1.0,
            None => return Err(invalid(key, value, "malformed multiple of pi")),
        };
        if n == 0.0 {
            return Err(invalid(key, value, "division by zero"));
        }
        return Ok(k * PI / n);
    }
    number(key, value)
}

/// Sweep keys collected before they are combined into a [`Sweep`].
#[derive(Debug, Default)]
pub struct PendingSweep {
    param: Option<SweepParam>,
    min: Option<f64>,
    max: Option<f64>,
    steps: Option<usize>,
}

/// Applies `key = value` pairs in order on top of `base`.
pub fn apply_settings<'a>(
    base: Scenario,
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<Scenario, ScenarioError> {
    let mut s = base;
    let mut sweep = PendingSweep::default();
    let mut touched = false;
    for (key, value) in pairs {
        touched |= apply_setting(&mut s, &mut sweep, key, value)?;
    }
    if touched {
        let current = s.sweep;
        let param = sweep.param.or(current.map(|c| c.param));
        let min = sweep.min.or(current.map(|c| c.min));
        let max = sweep.max.or(current.map(|c| c.max));
        let steps = sweep.steps.or(current.map(|c| c.steps));
        match (param, min, max, steps) {
            (Some(param), Some(min), Some(max), Some(steps)) => s.sweep = Some(Sweep { param, min, max, steps }),
            _ => {
                return Err(ScenarioError::Validation(
                    "sweep needs sweep_param, sweep_min, sweep_max and sweep_steps".into(),
                ))
            }
        }
    }
    Ok(s)
}

/// Applies one setting; returns whether it was a sweep key.
pub fn apply_setting(s: &mut Scenario, sweep: &mut PendingSweep, key: &str, value: &str) -> Result<bool, ScenarioError> {
    let value = value.trim();
    match key.trim() {
        "name" => s.name = value.to_string(),
        "gamma_w" => s.params.gamma_w = number(key, value)?,
        "omega_s" => s.params.omega_s = number(key, value)?,
        "omega_w" => s.params.omega_w = number(key, value)?,
        "delta_s" => s.params.delta_s = number(key, value)?,
        "delta_w" => s.params.delta_w = number(key, value)?,
        "transition" => s.transition = value.parse()?,
        "phi" => s.phi = Some(parse_angle(key, value)?),
        "observable" => s.observable = value.parse()?,
        "tau_max" => s.tau_max = Some(number(key, value)?),
        "n_tau" => s.n_tau = count(key, value)?,
        "omega_max" => s.omega_max = number(key, value)?,
        "n_omega" => s.n_omega = count(key, value)?,
        "sweep_param" => sweep.param = Some(value.parse()?),
        "sweep_min" => sweep.min = Some(number(key, value)?),
        "sweep_max" => sweep.max = Some(number(key, value)?),
        "sweep_steps" => sweep.steps = Some(count(key, value)?),
        other => {
            return Err(ScenarioError::Validation(format!(
                "unknown key `{other}` (expected one of {})",
                KEYS.join(", ")
            )))
        }
    }
    Ok(key.trim().starts_with("sweep_"))
}

/// Starting point for scenarios described from scratch.
pub fn custom_base() -> Scenario {
    Scenario::new("custom", AtomParams::resonant(0.1, 0.5, 0.1), TransitionSel::Weak, Observable::Aic)
}

/// Splits file text into `(key, value)` pairs, rejecting duplicates.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ScenarioError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ScenarioError::Validation(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if pairs.iter().any(|(seen, _)| seen == k) {
            return Err(ScenarioError::Validation(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
        pairs.push((k.to_string(), v.to_string()));
    }
    Ok(pairs)
}

/// Scenario described by config text, on top of `base`.
pub fn parse_config(text: &str, base: Scenario) -> Result<Scenario, ScenarioError> {
    let pairs = parse_pairs(text)?;
    apply_settings(base, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
}

pub fn load_config(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    let mut base = custom_base();
    if let Some(stem) = stem {
        base.name = stem;
    }
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::scenario::preset;

    #[test]
    fn parses_full_file() {
        let text = "# weak-transition noise\nomega_s = 0.5\nobservable = noise_scan\nphi = pi/2\n\
                    sweep_param = omega_w\nsweep_min = 0.01\nsweep_max = 0.2\nsweep_steps = 5\n";
        let s = parse_config(text, custom_base()).unwrap();
        assert_eq!(s.observable, Observable::NoiseScan);
        assert_eq!(s.phi, Some(PI / 2.0));
        assert_eq!(s.sweep.unwrap().steps, 5);
        s.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_duplicate_and_partial() {
        assert!(parse_config("gamma_s = 2", custom_base()).is_err());
        assert!(parse_config("omega_s = 1\nomega_s = 2", custom_base()).is_err());
        assert!(parse_config("sweep_param = omega_w", custom_base()).is_err());
        assert!(parse_config("omega_s 1", custom_base()).is_err());
        assert!(parse_config("n_tau = -3", custom_base()).is_err());
    }

    #[test]
    fn overrides_preset_sweep_partially() {
        let s = parse_config("sweep_steps = 7", preset("fig9").unwrap()).unwrap();
        let sw = s.sweep.unwrap();
        assert_eq!((sw.steps, sw.param), (7, SweepParam::OmegaW));
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("phi", "pi").unwrap(), PI);
        assert_eq!(parse_angle("phi", "3*pi/4").unwrap(), 0.75 * PI);
        assert_eq!(parse_angle("phi", "-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("phi", "0.25").unwrap(), 0.25);
        assert!(parse_angle("phi", "pi/0").is_err());
        assert!(parse_angle("phi", "2pi").is_err());
    }
}
