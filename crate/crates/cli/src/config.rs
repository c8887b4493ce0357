//! Flat `key=value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Required keys:
//! `family theta c n delta replications seed target`; optional: `kappa rmax`.

use std::collections::BTreeMap;

use diffsel_core::{DiffusionFamily, ExperimentConfig, FamilyTag, PenaltySpec, Target};

use crate::error::CliError;

const REQUIRED: [&str; 8] = [
    "family",
    "theta",
    "c",
    "n",
    "delta",
    "replications",
    "seed",
    "target",
];
const OPTIONAL: [&str; 2] = ["kappa", "rmax"];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key=value", i + 1)))?;
        let key = k.trim().to_string();
        if entries.contains_key(&key) {
            return Err(CliError::Usage(format!(
                "line {}: duplicate key '{key}'",
                i + 1
            )));
        }
        entries.insert(key, (i + 1, v.trim().to_string()));
    }

    let unknown: Vec<&str> = entries
        .keys()
        .map(String::as_str)
        .filter(|k| !REQUIRED.contains(k) && !OPTIONAL.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!(
            "unknown config keys: {}",
            unknown.join(", ")
        )));
    }
    if let Some(missing) = REQUIRED.iter().find(|k| !entries.contains_key(**k)) {
        return Err(CliError::Usage(format!(
            "missing required config key '{missing}'"
        )));
    }

    let get = |key: &str| entries.get(key).map(|(line, v)| (*line, v.as_str()));
    let family: FamilyTag = value(get("family").unwrap())?;
    let theta: f64 = value(get("theta").unwrap())?;
    let c: f64 = value(get("c").unwrap())?;
    let n: usize = value(get("n").unwrap())?;
    let delta: f64 = value(get("delta").unwrap())?;
    let replications: usize = value(get("replications").unwrap())?;
    let seed: u64 = value(get("seed").unwrap())?;
    let target: Target = value(get("target").unwrap())?;

    let family = DiffusionFamily::new(family, theta, c)?;
    let mut config = ExperimentConfig::new(family, n, delta, replications, seed, target);
    let mut spec = PenaltySpec::practical(n, delta);
    if let Some(kv) = get("kappa") {
        spec = spec.with_kappa(value(kv)?)?;
    }
    if let Some(kv) = get("rmax") {
        spec = spec.with_r_max(value(kv)?)?;
    }
    config.penalty_spec = spec;
    config.validate()?;
    Ok(config)
}

fn value<T: std::str::FromStr>((line, raw): (usize, &str)) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::Usage(format!("line {line}: cannot parse value '{raw}'")))
}
