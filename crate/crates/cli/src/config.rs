//! Flat key-value run configuration. Every key has a default, so a minimal
//! config is a single `input = <path>` line. `#` starts a comment; `input`
//! may repeat to concatenate several streams into one untrimmed sequence.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clustering algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Hpgmk,
    Kmeans,
    Pso,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hpgmk" => Ok(Algorithm::Hpgmk),
            "kmeans" | "km" => Ok(Algorithm::Kmeans),
            "pso" => Ok(Algorithm::Pso),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Hpgmk => "hpgmk",
            Algorithm::Kmeans => "kmeans",
            Algorithm::Pso => "pso",
        }
    }
}

/// Input stream format, including the CAD-60 subject-directory convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Csv,
    Cad60,
    Cad60Dir,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "cad60" | "cad-60" => Ok(InputFormat::Cad60),
            "cad60-dir" | "cad-60-dir" => Ok(InputFormat::Cad60Dir),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Resolved run configuration; serialized into reports for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: InputFormat,
    pub bone_tolerance: f64,
    pub drop_corrupt: bool,
    pub smoothing_window: usize,
    pub neutral_frame: Option<PathBuf>,
    pub variance_threshold: f64,
    pub window_len: usize,
    pub algorithm: Algorithm,
    pub k: usize,
    pub repeat: usize,
    pub seed: u64,
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub mutation_iterations: usize,
    pub w_max: f64,
    pub w_min: f64,
    pub c1_max: f64,
    pub c1_min: f64,
    pub c2_max: f64,
    pub c2_min: f64,
    pub h0: f64,
    pub out: Option<PathBuf>,
    pub dump_stages: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            format: InputFormat::Csv,
            bone_tolerance: 0.5,
            drop_corrupt: false,
            smoothing_window: 1,
            neutral_frame: None,
            variance_threshold: 0.95,
            window_len: 15,
            algorithm: Algorithm::Hpgmk,
            k: 2,
            repeat: 30,
            seed: 42,
            swarm_size: 20,
            max_iterations: 50,
            mutation_iterations: 10,
            w_max: 0.9,
            w_min: 0.4,
            c1_max: 2.5,
            c1_min: 0.0,
            c2_max: 2.5,
            c2_min: 0.0,
            h0: 1.0,
            out: None,
            dump_stages: false,
        }
    }
}

impl RunConfig {
    /// Parse a config file and validate it (referenced files must exist,
    /// repeat >= 1, and so on).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.inputs = config.inputs.iter().map(|p| resolve(base, p)).collect();
        config.neutral_frame = config.neutral_frame.map(|p| resolve(base, &p));
        config.out = config.out.map(|p| resolve(base, &p));
        config.validate()?;
        Ok(config)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut config = Self::default();
        for (li, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                path: origin.to_string(),
                line: li + 1,
                message: format!("expected key = value, found {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            config
                .set(key, value)
                .map_err(|e| Error::Config {
                    path: origin.to_string(),
                    line: li + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::InvalidConfig(format!("key {key}: cannot parse {value:?}"))
            })
        }
        match key {
            "input" => self.inputs.push(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "bone_tolerance" => self.bone_tolerance = num(key, value)?,
            "drop_corrupt" => self.drop_corrupt = num(key, value)?,
            "smoothing_window" => self.smoothing_window = num(key, value)?,
            "neutral_frame" => self.neutral_frame = Some(PathBuf::from(value)),
            "variance_threshold" => self.variance_threshold = num(key, value)?,
            "window_len" => self.window_len = num(key, value)?,
            "algorithm" => self.algorithm = value.parse()?,
            "k" => self.k = num(key, value)?,
            "repeat" => self.repeat = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "np" | "swarm_size" => self.swarm_size = num(key, value)?,
            "t_max" | "max_iterations" => self.max_iterations = num(key, value)?,
            "mutation_iters" | "mutation_iterations" => {
                self.mutation_iterations = num(key, value)?
            }
            "w_max" => self.w_max = num(key, value)?,
            "w_min" => self.w_min = num(key, value)?,
            "c1_max" => self.c1_max = num(key, value)?,
            "c1_min" => self.c1_min = num(key, value)?,
            "c2_max" => self.c2_max = num(key, value)?,
            "c2_min" => self.c2_min = num(key, value)?,
            "h0" => self.h0 = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "dump_stages" => self.dump_stages = num(key, value)?,
            other => {
                return Err(Error::InvalidConfig(format!("unknown key {other:?}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::InvalidConfig("at least one input is required".into()));
        }
        for p in &self.inputs {
            if !p.exists() {
                return Err(Error::InvalidConfig(format!("input {} does not exist", p.display())));
            }
        }
        if let Some(p) = &self.neutral_frame {
            if !p.exists() {
                return Err(Error::InvalidConfig(format!(
                    "neutral_frame {} does not exist",
                    p.display()
                )));
            }
        }
        if self.repeat < 1 {
            return Err(Error::InvalidConfig("repeat must be >= 1".into()));
        }
        if self.window_len < 2 {
            return Err(Error::InvalidConfig("window_len must be >= 2".into()));
        }
        if self.smoothing_window == 0 || self.smoothing_window.is_multiple_of(2) {
            return Err(Error::InvalidConfig("smoothing_window must be a positive odd integer".into()));
        }
        if !(self.variance_threshold > 0.0 && self.variance_threshold <= 1.0) {
            return Err(Error::InvalidConfig("variance_threshold must be in (0, 1]".into()));
        }
        Ok(())
    }

    /// HPGMK parameters for one run, with the per-run seed already applied.
    pub fn hpgmk_params(&self, seed: u64) -> had_core::HpgmkParams {
        had_core::HpgmkParams {
            k: self.k,
            swarm_size: self.swarm_size,
            max_iterations: self.max_iterations,
            mutation_iterations: self.mutation_iterations,
            w_max: self.w_max,
            w_min: self.w_min,
            c1_max: self.c1_max,
            c1_min: self.c1_min,
            c2_max: self.c2_max,
            c2_min: self.c2_min,
            h0: self.h0,
            seed,
        }
    }

    /// Output directory: the configured one, else `$HAD_OUT_ROOT/<name>`,
    /// else `out/<name>`.
    pub fn out_dir(&self, name: &str) -> PathBuf {
        if let Some(out) = &self.out {
            return out.clone();
        }
        let root = std::env::var_os("HAD_OUT_ROOT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        root.join(name)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_one_input_line() {
        let c = RunConfig::parse("input = data.csv\n", "test").unwrap();
        assert_eq!(c.inputs, vec![PathBuf::from("data.csv")]);
        assert_eq!(c.k, 2);
        assert_eq!(c.repeat, 30);
        assert_eq!(c.window_len, 15);
        assert_eq!(c.algorithm, Algorithm::Hpgmk);
    }

    #[test]
    fn comments_repeats_and_overrides() {
        let text = "\
# experiment
input = a.csv
input = b.csv   # second take
algorithm = kmeans
k = 5
repeat = 10
variance_threshold = 0.9
dump_stages = true
";
        let c = RunConfig::parse(text, "test").unwrap();
        assert_eq!(c.inputs.len(), 2);
        assert_eq!(c.algorithm, Algorithm::Kmeans);
        assert_eq!(c.k, 5);
        assert_eq!(c.repeat, 10);
        assert!(c.dump_stages);
    }

    #[test]
    fn unknown_keys_and_bad_values_name_the_line() {
        let err = RunConfig::parse("input = a\nnonsense = 1\n", "cfg").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(RunConfig::parse("k = banana\n", "cfg").is_err());
        assert!(RunConfig::parse("just a line\n", "cfg").is_err());
    }

    #[test]
    fn validation_rules() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_err()); // no inputs
        c.inputs.push(PathBuf::from("/definitely/not/there.csv"));
        assert!(c.validate().is_err());
    }
}
