//! Flat `key = value` run configuration for the `simulate` subcommand.
//!
//! Blank lines and lines starting with `#` are ignored. Command-line flags
//! are merged on top of the file, so a flag always wins over the same key
//! in the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use polarforge::codec::{CrcKind, DecoderConfig, LlrRule};
use polarforge::puncturing::PatternKind;
use polarforge::simkit::{preset, DecoderKind, DecoderSetup, Scenario, TrialBudget};

use crate::CliError;

pub const KEYS: [&str; 15] = [
    "scenario",
    "n_prime",
    "k",
    "patterns",
    "decoder",
    "list_size",
    "crc",
    "prune_threshold",
    "llr_rule",
    "z0",
    "ebn0",
    "max_frames",
    "min_frame_errors",
    "seed",
    "out",
];

/// Raw key/value settings before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            settings.set(key.trim(), value.trim())?;
        }
        Ok(settings)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "unknown setting {key:?}; known settings: {}",
                KEYS.join(", ")
            )));
        }
        self.values.insert(key, value.to_owned());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("{key} = {v:?}: {e}")))
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<T>()
                            .map_err(|e| CliError::Config(format!("{key} entry {s:?}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Parses an Eb/N0 list: either `a,b,c` or an inclusive range `lo:step:hi`.
pub fn parse_ebn0(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Config(format!("ebn0 = {text:?}: {msg}"));
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
    match parts.as_slice() {
        [lo, step, hi] => {
            let (lo, step, hi) = (num(lo)?, num(step)?, num(hi)?);
            if !(step > 0.0) || hi < lo {
                return Err(bad("range needs step > 0 and hi >= lo".into()));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| lo + step * i as f64).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(bad("expected a comma list or lo:step:hi".into())),
    }
}

/// Fully resolved simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub base: DecoderConfig,
    pub budget: TrialBudget,
    pub seed_was_given: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Interprets the settings. `fresh_seed` is used when no seed is set.
    pub fn resolve(s: &Settings, fresh_seed: u64) -> Result<Self, CliError> {
        let mut scenario = match s.get("scenario") {
            Some(name) => preset(name).map_err(CliError::config)?,
            None => Scenario {
                name: "custom".into(),
                n_prime: 0,
                k: 0,
                patterns: PatternKind::ALL.to_vec(),
                decoders: vec![DecoderSetup::sc()],
                z0: 0.5,
                ebn0_db: vec![1.0, 2.0, 3.0, 4.0],
            },
        };
        if let Some(n_prime) = s.parsed("n_prime")? {
            scenario.n_prime = n_prime;
        }
        if let Some(k) = s.parsed("k")? {
            scenario.k = k;
        }
        if scenario.n_prime == 0 || scenario.k == 0 {
            return Err(CliError::Config(
                "set a scenario preset or both n_prime and k".into(),
            ));
        }
        if let Some(patterns) = s.list::<PatternKind>("patterns")? {
            if patterns.is_empty() {
                return Err(CliError::Config("patterns must not be empty".into()));
            }
            scenario.patterns = patterns;
        }
        if let Some(z0) = s.parsed::<f64>("z0")? {
            scenario.z0 = z0;
        }
        if let Some(text) = s.get("ebn0") {
            scenario.ebn0_db = parse_ebn0(text)?;
        }

        let kind = s.parsed::<DecoderKind>("decoder")?;
        let lists = s.list::<usize>("list_size")?;
        let crc = s.parsed::<CrcKind>("crc")?;
        if kind.is_some() || lists.is_some() || crc.is_some() {
            let kind = kind.unwrap_or(match crc {
                Some(c) if !c.is_none() => DecoderKind::CaScl,
                _ if lists.as_ref().is_some_and(|l| l.iter().any(|&x| x > 1)) => DecoderKind::Scl,
                _ => DecoderKind::Sc,
            });
            let crc = match kind {
                DecoderKind::CaScl => crc.unwrap_or(CrcKind::for_block_length(scenario.n_prime)),
                _ => crc.unwrap_or(CrcKind::None),
            };
            let lists = lists.unwrap_or_else(|| match kind {
                DecoderKind::Sc => vec![1],
                _ => vec![8],
            });
            if lists.is_empty() {
                return Err(CliError::Config("list_size must not be empty".into()));
            }
            scenario.decoders =
                lists.into_iter().map(|list_size| DecoderSetup { kind, list_size, crc }).collect();
        }
        for d in &scenario.decoders {
            d.validate().map_err(CliError::config)?;
        }

        let mut base = DecoderConfig::default();
        if let Some(t) = s.parsed("prune_threshold")? {
            base.prune_threshold = t;
        }
        if let Some(rule) = s.parsed::<LlrRule>("llr_rule")? {
            base.llr_rule = rule;
        }
        base.validate().map_err(CliError::config)?;

        let defaults = TrialBudget::default();
        let seed = s.parsed::<u64>("seed")?;
        let budget = TrialBudget {
            max_frames: s.parsed("max_frames")?.unwrap_or(defaults.max_frames),
            min_frame_errors: s.parsed("min_frame_errors")?.unwrap_or(defaults.min_frame_errors),
            master_seed: seed.unwrap_or(fresh_seed),
        };
        budget.validate().map_err(CliError::config)?;

        Ok(RunConfig {
            scenario,
            base,
            budget,
            seed_was_given: seed.is_some(),
            out: s.get("out").map(PathBuf::from),
        })
    }
}
