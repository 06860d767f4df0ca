//! Experiment configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use bv_noise::{ClassicalKind, FitModel, QuantumKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const DEFAULT_GRID_POINTS: usize = 21;
pub const DEFAULT_SQUEEZE_AREA: f64 = 0.524;
pub const DEFAULT_SQUEEZE_POINTS: usize = 11;
pub const DEFAULT_CLT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sweep,
    #[serde(alias = "squeezed")]
    SqueezedSweep,
    Advantage,
    Clt,
    Fit,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::SqueezedSweep => "squeezed_sweep",
            Experiment::Advantage => "advantage",
            Experiment::Clt => "clt",
            Experiment::Fit => "fit",
        }
    }
}

/// Either one value or a list, as accepted in the JSON file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Fields of the JSON configuration file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub family: Option<OneOrMany<String>>,
    pub n: Option<OneOrMany<usize>>,
    pub n_range: Option<String>,
    pub grid: Option<OneOrMany<f64>>,
    pub sigma_bar: Option<OneOrMany<f64>>,
    #[serde(rename = "D", alias = "d")]
    pub area: Option<f64>,
    pub seed: Option<u64>,
    pub max_samples: Option<u64>,
    pub samples: Option<u64>,
    pub model: Option<String>,
    pub input: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }
}

/// Command-line overrides, in the same raw string form the flags arrive in.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub family: Option<String>,
    pub n: Option<String>,
    pub n_range: Option<String>,
    pub grid: Option<String>,
    pub sigma_bar: Option<String>,
    pub area: Option<f64>,
    pub seed: Option<u64>,
    pub max_samples: Option<u64>,
    pub samples: Option<u64>,
    pub model: Option<String>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Uniform,
    Gaussian,
    Cauchy,
    Discrete,
    Squeezed,
}

impl Family {
    pub const SWEEPABLE: [Family; 4] = [Family::Uniform, Family::Gaussian, Family::Cauchy, Family::Discrete];

    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text.trim().to_ascii_lowercase().as_str() {
            "uniform" | "uniformcap" | "uniform_cap" => Ok(Family::Uniform),
            "gaussian" | "sphericalgaussian" | "spherical_gaussian" | "vmf" => Ok(Family::Gaussian),
            "cauchy" | "sphericalcauchy" | "spherical_cauchy" => Ok(Family::Cauchy),
            "discrete" | "discretecircular" | "discrete_circular" | "circular" => Ok(Family::Discrete),
            "squeezed" => Ok(Family::Squeezed),
            other => Err(CliError::Config(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Gaussian => "gaussian",
            Family::Cauchy => "cauchy",
            Family::Discrete => "discrete",
            Family::Squeezed => "squeezed",
        }
    }

    pub fn quantum(&self) -> QuantumKind {
        match self {
            Family::Uniform => QuantumKind::UniformCap,
            Family::Gaussian => QuantumKind::SphericalGaussian,
            Family::Cauchy => QuantumKind::SphericalCauchy,
            Family::Discrete => QuantumKind::DiscreteCircular,
            Family::Squeezed => QuantumKind::Squeezed,
        }
    }

    pub fn classical(&self) -> Option<ClassicalKind> {
        bv_noise::quench::matching_classical(self.quantum())
    }
}

/// A fully resolved experiment. Its JSON serialisation is what the output
/// header's hash covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub families: Vec<Family>,
    pub ns: Vec<usize>,
    /// σ̄ values for `sweep`, axis ratios for `squeezed_sweep`.
    pub grid: Vec<f64>,
    pub sigma_bars: Vec<f64>,
    #[serde(rename = "D")]
    pub area: f64,
    pub seed: u64,
    pub max_samples: u64,
    pub samples: u64,
    pub model: Option<String>,
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

fn parse_f64(text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("not a number: {text:?}")))
}

/// Parses `0,0.5,1` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (a, b) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad point count in {text:?}")))?;
        if count < 2 {
            return Err(CliError::Config(format!("grid {text:?} needs at least two points")));
        }
        return Ok(linspace(a, b, count));
    }
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_f64).collect()
}

pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                a + (b - a) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

fn parse_ns(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad n {s:?}")))
        })
        .collect()
}

/// Parses `a..b` or `a-b`, both inclusive.
pub fn parse_n_range(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("bad n range {text:?}, expected like 1..25"));
    let (a, b) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .or_else(|| text.split_once('-'))
        .ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

/// The squeezed-sweep default: `count` ratios log-spaced over `[D/π, π/D]`,
/// symmetric about `r = 1` with `r = 1` in the middle when `count` is odd.
pub fn default_ratio_grid(area: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = bv_noise::disorder::squeeze_ratio_range(area);
    linspace(lo.ln(), hi.ln(), count)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else if 2 * i + 1 == count {
                1.0
            } else {
                x.exp()
            }
        })
        .collect()
}

impl ExperimentConfig {
    pub fn resolve(experiment: Experiment, file: ConfigFile, flags: Overrides) -> Result<Self, CliError> {
        if let Some(e) = file.experiment {
            if e != experiment {
                return Err(CliError::Config(format!(
                    "config is for experiment {:?} but {:?} was requested",
                    e.name(),
                    experiment.name()
                )));
            }
        }
        let families = match flags.family {
            Some(f) => f.split(',').map(Family::parse).collect::<Result<Vec<_>, _>>()?,
            None => match file.family {
                Some(f) => f.into_vec().iter().map(|s| Family::parse(s)).collect::<Result<Vec<_>, _>>()?,
                None => match experiment {
                    Experiment::Sweep | Experiment::Clt => vec![Family::Uniform],
                    Experiment::SqueezedSweep => vec![Family::Squeezed],
                    Experiment::Advantage => Family::SWEEPABLE.to_vec(),
                    Experiment::Fit => vec![],
                },
            },
        };
        let ns = if let Some(t) = flags.n {
            parse_ns(&t)?
        } else if let Some(t) = flags.n_range {
            parse_n_range(&t)?
        } else if let Some(n) = file.n {
            n.into_vec()
        } else if let Some(t) = file.n_range {
            parse_n_range(&t)?
        } else {
            match experiment {
                Experiment::Sweep => vec![1, 2, 10],
                Experiment::SqueezedSweep => vec![10],
                Experiment::Advantage => (1..=25).collect(),
                Experiment::Clt => vec![5, 10, 20, 50],
                Experiment::Fit => vec![],
            }
        };
        let area = flags.area.or(file.area).unwrap_or(DEFAULT_SQUEEZE_AREA);
        let grid = match flags.grid {
            Some(t) => parse_grid(&t)?,
            None => match file.grid {
                Some(g) => g.into_vec(),
                None => match experiment {
                    Experiment::SqueezedSweep => default_ratio_grid(area, DEFAULT_SQUEEZE_POINTS),
                    _ => linspace(0.0, 1.0, DEFAULT_GRID_POINTS),
                },
            },
        };
        let sigma_bars = match flags.sigma_bar {
            Some(t) => parse_grid(&t)?,
            None => match file.sigma_bar {
                Some(s) => s.into_vec(),
                None => match experiment {
                    Experiment::Clt => vec![0.2],
                    _ => vec![0.2, 0.4, 0.6],
                },
            },
        };
        let seed = flags.seed.or(file.seed);
        let seed = match (experiment, seed) {
            (Experiment::Fit, s) => s.unwrap_or(0),
            (_, Some(s)) => s,
            (_, None) => return Err(CliError::Config("a seed is required (--seed or \"seed\" in the config)".into())),
        };
        let cfg = ExperimentConfig {
            experiment,
            families,
            ns,
            grid,
            sigma_bars,
            area,
            seed,
            max_samples: flags
                .max_samples
                .or(file.max_samples)
                .unwrap_or(bv_noise::quench::DEFAULT_MAX_SAMPLES),
            samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_CLT_SAMPLES),
            model: flags.model.or(file.model),
            input: flags.input.or(file.input),
            output_path: flags.out.or(file.output_path),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        if self.ns.contains(&0) {
            return err("n must be at least 1".into());
        }
        match self.experiment {
            Experiment::Sweep | Experiment::Advantage | Experiment::Clt => {
                if let Some(f) = self.families.iter().find(|f| **f == Family::Squeezed) {
                    return err(format!("family {} has no classical counterpart here", f.name()));
                }
                let axis = if self.experiment == Experiment::Sweep {
                    &self.grid
                } else {
                    &self.sigma_bars
                };
                if axis.is_empty() || axis.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return err("sigma_bar values must lie in [0, 1]".into());
                }
            }
            Experiment::SqueezedSweep => {
                if self.families != [Family::Squeezed] {
                    return err("the squeezed sweep only runs the squeezed family".into());
                }
                if !(self.area > 0.0 && self.area <= std::f64::consts::PI) {
                    return err(format!("D = {} must lie in (0, pi]", self.area));
                }
                let (lo, hi) = bv_noise::disorder::squeeze_ratio_range(self.area);
                if self.grid.is_empty()
                    || self.grid.iter().any(|&r| !(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)))
                {
                    return err(format!("ratios must lie in [{lo}, {hi}] for D = {}", self.area));
                }
            }
            Experiment::Fit => {
                if self.input.is_none() {
                    return err("fit needs an input CSV (--input)".into());
                }
                if let Some(m) = &self.model {
                    parse_fit_model(m)?;
                }
                if self.families.len() > 1 {
                    return err("fit takes at most one family".into());
                }
            }
        }
        if matches!(self.experiment, Experiment::Sweep | Experiment::SqueezedSweep | Experiment::Advantage)
            && self.max_samples < bv_noise::quench::MIN_SAMPLES
        {
            return err(format!(
                "max_samples must be at least {}",
                bv_noise::quench::MIN_SAMPLES
            ));
        }
        if self.experiment == Experiment::Clt && self.samples < 2 {
            return err("clt needs at least two samples".into());
        }
        Ok(())
    }

    /// Hex SHA-256 of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `gauss`, `gauss-quad`, `gauss-pure` or `auto`; `auto` maps to `None`.
pub fn parse_fit_model(text: &str) -> Result<Option<FitModel>, CliError> {
    match text.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "auto" => Ok(None),
        "gauss" | "gauss-only" | "gaussonly" => Ok(Some(FitModel::GaussOnly)),
        "gauss-quad" | "gaussquad" => Ok(Some(FitModel::GaussQuad)),
        "gauss-pure" | "gausspure" => Ok(Some(FitModel::GaussPure)),
        other => Err(CliError::Config(format!("unknown fit model {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0,0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("0:1:21").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 1.0);
        assert!((g[10] - 0.5).abs() < 1e-15);
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_range("2-4").unwrap(), vec![2, 3, 4]);
        assert!(parse_n_range("0..3").is_err());
        assert!(parse_n_range("5..3").is_err());
    }

    #[test]
    fn ratio_grid_is_symmetric() {
        let g = default_ratio_grid(0.524, 11);
        assert_eq!(g[5], 1.0);
        for i in 0..11 {
            assert!((g[i] * g[10 - i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile = serde_json::from_str(
            r#"{"experiment":"sweep","family":"gaussian","n":[1,2],"seed":5,"grid":[0,0.5,1]}"#,
        )
        .unwrap();
        let flags = Overrides {
            seed: Some(9),
            n: Some("3".into()),
            ..Overrides::default()
        };
        let c = ExperimentConfig::resolve(Experiment::Sweep, file, flags).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.ns, vec![3]);
        assert_eq!(c.families, vec![Family::Gaussian]);
        assert_eq!(c.grid, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn seed_is_required() {
        let r = ExperimentConfig::resolve(Experiment::Sweep, ConfigFile::default(), Overrides::default());
        assert!(matches!(r, Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ConfigFile>(r#"{"seeed": 1}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let mk = |seed| {
            ExperimentConfig::resolve(
                Experiment::Sweep,
                ConfigFile::default(),
                Overrides {
                    seed: Some(seed),
                    ..Overrides::default()
                },
            )
            .unwrap()
        };
        assert_eq!(mk(1).hash(), mk(1).hash());
        assert_ne!(mk(1).hash(), mk(2).hash());
        assert_eq!(mk(1).hash().len(), 64);
    }
}
