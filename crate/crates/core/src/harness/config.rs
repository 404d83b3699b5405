//! Experiment settings: a TOML file with one table per command (top-level keys
//! apply to every command), overridden key by key from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::TvVariant;
use crate::solvers::Algorithm;
use crate::toy::ToyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Denoise,
    Svm,
    Toy,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Denoise => "denoise",
            Command::Svm => "svm",
            Command::Toy => "toy",
            Command::Validate => "validate",
        }
    }

    const ALL: [Command; 4] = [
        Command::Denoise,
        Command::Svm,
        Command::Toy,
        Command::Validate,
    ];
}

/// Flat string settings for one command, after merging file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn scalar_to_string(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::Array(items) => items
            .iter()
            .map(scalar_to_string)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => None,
    }
}

impl Settings {
    /// Reads `path` (if given), keeps the top-level keys and the table named
    /// after `command`, then applies `overrides` (flags win).
    pub fn load(
        command: Command,
        path: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            s = Self::parse(command, &text)?;
        }
        for (k, v) in overrides {
            s.values.insert(k.replace('-', "_"), v.clone());
        }
        Ok(s)
    }

    pub fn parse(command: Command, text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("config file: {e}")))?;
        let mut values = BTreeMap::new();
        let mut insert = |k: &str, v: &toml::Value| -> Result<()> {
            let s = scalar_to_string(v)
                .ok_or_else(|| Error::Config(format!("key '{k}' must be a scalar or a list")))?;
            values.insert(k.to_string(), s);
            Ok(())
        };
        for (k, v) in &table {
            if let toml::Value::Table(_) = v {
                if !Command::ALL.iter().any(|c| c.name() == k) {
                    return Err(Error::Config(format!("unknown section [{k}]")));
                }
            } else {
                insert(k, v)?;
            }
        }
        if let Some(toml::Value::Table(section)) = table.get(command.name()) {
            for (k, v) in section {
                insert(k, v)?;
            }
        }
        Ok(Self { values })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Self {
            values: pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    fn check_known(&self, command: Command, known: &[&str]) -> Result<()> {
        for k in self.values.keys() {
            if !COMMON_KEYS.contains(&k.as_str()) && !known.contains(&k.as_str()) {
                return Err(Error::Config(format!(
                    "unknown key '{k}' for {}",
                    command.name()
                )));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
    }

    fn parse_as<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::Config(format!("invalid value '{s}' for {key}")))
            })
            .transpose()
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_as(key)?.unwrap_or(default))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key)
            .map(|s| {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("invalid number '{t}' in {key}")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }
}

const COMMON_KEYS: [&str; 5] = ["algorithm", "iterations", "seed", "tol", "out"];

/// Options shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonOptions {
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: PathBuf,
}

impl CommonOptions {
    fn from_settings(s: &Settings, defaults: CommonOptions) -> Result<Self> {
        let c = Self {
            algorithm: s.get("algorithm", defaults.algorithm)?,
            iterations: s.get("iterations", defaults.iterations)?,
            seed: s.get("seed", defaults.seed)?,
            tol: s.parse_as("tol")?.or(defaults.tol),
            out: s.path("out").unwrap_or(defaults.out),
        };
        if let Some(t) = c.tol {
            if !(t > 0.0) {
                return Err(Error::Config("tol must be positive".into()));
            }
        }
        Ok(c)
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseExperiment {
    pub common: CommonOptions,
    /// Clean input image; a synthetic phantom when absent.
    pub input: Option<PathBuf>,
    pub size: usize,
    pub noise: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub variant: TvVariant,
    pub levels: usize,
    pub tau0: f64,
    pub sigma0: [f64; 2],
    pub lambda: f64,
    pub vu_tau: f64,
    pub vu_sigma: [f64; 2],
    /// Accelerated iterations for the RMSE reference; 0 measures RMSE against the clean image.
    pub reference_iters: usize,
}

fn pair(v: Option<Vec<f64>>, key: &str, default: [f64; 2]) -> Result<[f64; 2]> {
    match v {
        None => Ok(default),
        Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
        Some(v) => Err(Error::Config(format!(
            "{key} needs two values, got {}",
            v.len()
        ))),
    }
}

impl DenoiseExperiment {
    pub const KEYS: &'static [&'static str] = &[
        "input",
        "size",
        "noise",
        "lambda1",
        "lambda2",
        "variant",
        "levels",
        "tau0",
        "sigma0",
        "lambda",
        "vu_tau",
        "vu_sigma",
        "reference_iters",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_known(Command::Denoise, Self::KEYS)?;
        let common = CommonOptions::from_settings(
            s,
            CommonOptions {
                algorithm: Algorithm::Accel,
                iterations: 5000,
                seed: 0,
                tol: Some(1e-4),
                out: PathBuf::from("out/denoise"),
            },
        )?;
        let noise: f64 = s.get("noise", 0.06)?;
        if !(noise >= 0.0) {
            return Err(Error::Config("noise must be nonnegative".into()));
        }
        let variant = s.get("variant", TvVariant::Isotropic)?;
        let defaults = crate::imaging::DenoiseConfig::for_noise_level(noise, variant);
        let steps = crate::imaging::DenoiseSteps::default();
        let e = Self {
            common,
            input: s.path("input"),
            size: s.get("size", 64)?,
            noise,
            lambda1: positive("lambda1", s.get("lambda1", defaults.lambda1)?)?,
            lambda2: positive("lambda2", s.get("lambda2", defaults.lambda2)?)?,
            variant,
            levels: s.get("levels", defaults.wavelet_levels)?,
            tau0: s.get("tau0", steps.tau0)?,
            sigma0: pair(s.list("sigma0")?, "sigma0", steps.sigma0)?,
            lambda: s.get("lambda", steps.lambda)?,
            vu_tau: s.get("vu_tau", steps.vu_tau)?,
            vu_sigma: pair(s.list("vu_sigma")?, "vu_sigma", steps.vu_sigma)?,
            reference_iters: s.get("reference_iters", 10_000)?,
        };
        if e.size == 0 {
            return Err(Error::Config("size must be positive".into()));
        }
        Ok(e)
    }

    pub fn denoise_config(&self) -> crate::imaging::DenoiseConfig {
        crate::imaging::DenoiseConfig {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            variant: self.variant,
            wavelet_levels: self.levels,
        }
    }

    pub fn steps(&self) -> crate::imaging::DenoiseSteps {
        crate::imaging::DenoiseSteps {
            tau0: self.tau0,
            sigma0: self.sigma0,
            lambda: self.lambda,
            vu_tau: self.vu_tau,
            vu_sigma: self.vu_sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmExperiment {
    pub common: CommonOptions,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// `csv` or `idx`.
    pub format: String,
    pub train_labels: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub label_negative: u8,
    pub label_positive: u8,
    pub skip_unmapped: bool,
    /// Seeded subsample size of the training set (0 keeps everything).
    pub subsample: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub separation: f64,
    pub c: f64,
    pub sigmas: Vec<f64>,
}

impl SvmExperiment {
    pub const KEYS: &'static [&'static str] = &[
        "train",
        "test",
        "format",
        "train_labels",
        "test_labels",
        "label_negative",
        "label_positive",
        "skip_unmapped",
        "subsample",
        "n_train",
        "n_test",
        "dim",
        "separation",
        "c",
        "sigmas",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_known(Command::Svm, Self::KEYS)?;
        let common = CommonOptions::from_settings(
            s,
            CommonOptions {
                algorithm: Algorithm::Accel,
                iterations: 1500,
                seed: 0,
                tol: None,
                out: PathBuf::from("out/svm"),
            },
        )?;
        if common.algorithm != Algorithm::Accel {
            return Err(Error::Config(
                "svm training runs the accelerated method only".into(),
            ));
        }
        let e = Self {
            common,
            train: s.path("train"),
            test: s.path("test"),
            format: s.get("format", "csv".to_string())?,
            train_labels: s.path("train_labels"),
            test_labels: s.path("test_labels"),
            label_negative: s.get("label_negative", 8)?,
            label_positive: s.get("label_positive", 9)?,
            skip_unmapped: s.get("skip_unmapped", false)?,
            subsample: s.get("subsample", 0)?,
            n_train: s.get("n_train", 200)?,
            n_test: s.get("n_test", 200)?,
            dim: s.get("dim", 10)?,
            separation: s.get("separation", 4.0)?,
            c: positive("c", s.get("c", 1.0)?)?,
            sigmas: s
                .list("sigmas")?
                .unwrap_or_else(|| vec![0.15, 0.175, 0.2, 0.25, 0.5]),
        };
        if e.sigmas.is_empty() {
            return Err(Error::Config("sigmas must not be empty".into()));
        }
        for &sg in &e.sigmas {
            positive("kernel sigma", sg)?;
        }
        if e.format != "csv" && e.format != "idx" {
            return Err(Error::Config(format!(
                "unknown dataset format '{}'",
                e.format
            )));
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyExperiment {
    pub common: CommonOptions,
    pub kind: ToyKind,
    pub dim: usize,
    pub z: f64,
    pub nu: f64,
    pub lambda: f64,
    /// `None` picks the largest `τ₀` allowed for `sigma0`.
    pub tau0: Option<f64>,
    pub sigma0: f64,
    pub vu_tau: f64,
    pub vu_sigma: f64,
    pub theta: Option<f64>,
}

impl FromStr for ToyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ToyKind::Quadratic),
            "forward" => Ok(ToyKind::Forward),
            other => Err(Error::Config(format!(
                "unknown toy kind '{other}' (quadratic or forward)"
            ))),
        }
    }
}

impl ToyExperiment {
    pub const KEYS: &'static [&'static str] = &[
        "kind", "dim", "z", "nu", "lambda", "tau0", "sigma0", "vu_tau", "vu_sigma", "theta",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_known(Command::Toy, Self::KEYS)?;
        let common = CommonOptions::from_settings(
            s,
            CommonOptions {
                algorithm: Algorithm::Accel,
                iterations: 10_000,
                seed: 0,
                tol: None,
                out: PathBuf::from("out/toy"),
            },
        )?;
        let e = Self {
            common,
            kind: s.get("kind", ToyKind::Forward)?,
            dim: s.get("dim", 1)?,
            z: s.get("z", 1.0)?,
            nu: s.get("nu", 0.0)?,
            lambda: s.get("lambda", 2.0)?,
            tau0: s.parse_as("tau0")?,
            sigma0: s.get("sigma0", 0.5)?,
            vu_tau: s.get("vu_tau", 0.5)?,
            vu_sigma: s.get("vu_sigma", 0.5)?,
            theta: s.parse_as("theta")?,
        };
        if e.dim == 0 || !(e.nu >= 0.0) {
            return Err(Error::Config(
                "dim must be positive and nu nonnegative".into(),
            ));
        }
        Ok(e)
    }
}

/// Parameters checked by `validate`; which ones matter depends on the algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidateExperiment {
    pub common: CommonOptions,
    pub gamma: f64,
    pub eta: f64,
    pub lambda: f64,
    pub tau0: f64,
    pub sigma0: Vec<f64>,
    pub norms_sq: Vec<f64>,
    pub tau: f64,
    pub sigma: Vec<f64>,
    /// Cocoercivity of `C` for the baseline condition.
    pub beta: f64,
    /// Baseline: strong monotonicity of the `D_i` (default `∞`, i.e. `D_i⁻¹ = 0`).
    /// Linear rate: Lipschitz constants of the `D_i⁻¹` (default 0).
    pub nu: Option<Vec<f64>>,
    pub delta: Vec<f64>,
    pub theta: Option<f64>,
}

impl ValidateExperiment {
    pub const KEYS: &'static [&'static str] = &[
        "gamma", "eta", "lambda", "tau0", "sigma0", "norms_sq", "tau", "sigma", "beta", "nu",
        "delta", "theta",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_known(Command::Validate, Self::KEYS)?;
        let common = CommonOptions::from_settings(
            s,
            CommonOptions {
                algorithm: Algorithm::Accel,
                iterations: 0,
                seed: 0,
                tol: None,
                out: PathBuf::from("out/validate"),
            },
        )?;
        let norms_sq = s.list("norms_sq")?.unwrap_or_else(|| vec![8.0]);
        let m = norms_sq.len();
        Ok(Self {
            common,
            gamma: s.get("gamma", 1.0)?,
            eta: s.get("eta", 1.0)?,
            lambda: s.get("lambda", 2.0)?,
            tau0: s.get("tau0", 1.0)?,
            sigma0: s.list("sigma0")?.unwrap_or_else(|| vec![0.15; m]),
            tau: s.get("tau", 0.1)?,
            sigma: s.list("sigma")?.unwrap_or_else(|| vec![0.1; m]),
            beta: s.get("beta", 1.0)?,
            nu: s.list("nu")?,
            delta: s.list("delta")?.unwrap_or_else(|| vec![1.0; m]),
            theta: s.parse_as("theta")?,
            norms_sq,
        })
    }
}
