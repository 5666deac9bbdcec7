//! Settings shared by the subcommands: read from a TOML file, then
//! overridden by flags.
//!
//! ```toml
//! fuel = 100000
//! seed = 0
//! depth = 2
//! format = "json"
//! signature = "sig.fmc"     # a program whose `.sig` section is used
//! write_streams = ["out"]
//! [cells]
//! c = "0"
//! [streams]
//! in = ["1", "2", "3"]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// The environment variable naming a default config file.
pub const CONFIG_ENV: &str = "FMC_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`, expected text or json")),
        }
    }
}

/// The PRNG seed: fixed, or drawn from the system clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seed {
    Fixed(u64),
    Random,
}

impl Seed {
    pub fn value(self) -> u64 {
        match self {
            Seed::Fixed(s) => s,
            Seed::Random => std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_nanos() as u64),
        }
    }
}

impl std::str::FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> Result<Seed, String> {
        if s == "random" {
            return Ok(Seed::Random);
        }
        s.parse()
            .map(Seed::Fixed)
            .map_err(|_| format!("seed must be a number or `random`, got `{s}`"))
    }
}

/// The contents of a config file; every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub signature: Option<PathBuf>,
    pub fuel: Option<u64>,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub format: Option<Format>,
    #[serde(default)]
    pub cells: BTreeMap<String, String>,
    #[serde(default)]
    pub streams: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub write_streams: Vec<String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut cfg = FileConfig::parse(&text)?;
        // Paths in the file are relative to the file.
        if let (Some(sig), Some(dir)) = (&cfg.signature, path.parent()) {
            cfg.signature = Some(dir.join(sig));
        }
        Ok(cfg)
    }

    /// The file named by `explicit`, else by `FMC_CONFIG`, else defaults.
    pub fn discover(explicit: Option<&Path>) -> Result<FileConfig, CliError> {
        match explicit {
            Some(p) => FileConfig::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => FileConfig::load(Path::new(&p)),
                _ => Ok(FileConfig::default()),
            },
        }
    }
}

/// Resolved settings.
#[derive(Clone, Debug)]
pub struct Config {
    pub signature: Option<PathBuf>,
    pub fuel: u64,
    pub seed: Seed,
    pub depth: usize,
    pub format: Format,
    pub cells: BTreeMap<String, String>,
    /// Scripted read streams: values, first read first.
    pub streams: BTreeMap<String, Vec<String>>,
    pub write_streams: Vec<String>,
}

/// Flag values; `None` leaves the file's setting in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub signature: Option<PathBuf>,
    pub fuel: Option<u64>,
    pub seed: Option<Seed>,
    pub depth: Option<usize>,
    pub format: Option<Format>,
    pub cells: Vec<(String, String)>,
    pub streams: Vec<(String, Vec<String>)>,
}

impl Config {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Config {
        let mut cells = file.cells;
        cells.extend(flags.cells);
        let mut streams = file.streams;
        streams.extend(flags.streams);
        Config {
            signature: flags.signature.or(file.signature),
            fuel: flags.fuel.or(file.fuel).unwrap_or(100_000),
            seed: flags.seed.or(file.seed.map(Seed::Fixed)).unwrap_or(Seed::Fixed(0)),
            depth: flags.depth.or(file.depth).unwrap_or(2),
            format: flags.format.or(file.format).unwrap_or_default(),
            cells,
            streams,
            write_streams: file.write_streams,
        }
    }
}

/// Split `name=value`.
pub fn key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    if k.is_empty() {
        return Err(format!("empty name in `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file = FileConfig::parse("fuel = 7\nseed = 3\n[cells]\nc = \"1\"\nd = \"2\"\n").unwrap();
        let flags = Overrides {
            fuel: Some(9),
            cells: vec![("c".into(), "5".into())],
            ..Overrides::default()
        };
        let cfg = Config::resolve(file, flags);
        assert_eq!(cfg.fuel, 9);
        assert_eq!(cfg.seed, Seed::Fixed(3));
        assert_eq!(cfg.cells["c"], "5");
        assert_eq!(cfg.cells["d"], "2");
        assert_eq!(cfg.format, Format::Text);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::parse("fule = 3").is_err());
    }

    #[test]
    fn seeds_and_pairs_parse() {
        assert_eq!("random".parse::<Seed>().unwrap(), Seed::Random);
        assert_eq!("12".parse::<Seed>().unwrap(), Seed::Fixed(12));
        assert!("x".parse::<Seed>().is_err());
        assert_eq!(key_value("c=0").unwrap(), ("c".to_string(), "0".to_string()));
        assert!(key_value("=0").is_err());
    }
}
