use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const FILE_NAME: &str = "multiportlab.toml";
pub const ENV_PREFIX: &str = "MPLAB_";

/// Settings shared by several subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub tolerance: f64,
    pub samples: usize,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, samples: 256, out_dir: None, seed: 0 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Layer {
    tolerance: Option<f64>,
    samples: Option<usize>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
}

impl CliConfig {
    /// Defaults, then the config file, then `MPLAB_*` variables. Flags are
    /// applied by the caller through [`CliConfig::with_flags`].
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = explicit.map(Path::to_path_buf).or_else(discover) {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let layer: Layer =
                toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
            cfg.apply(layer);
        }
        cfg.apply(env_layer()?);
        Ok(cfg)
    }

    fn apply(&mut self, layer: Layer) {
        if let Some(t) = layer.tolerance {
            self.tolerance = t;
        }
        if let Some(s) = layer.samples {
            self.samples = s;
        }
        if let Some(d) = layer.out_dir {
            self.out_dir = Some(d);
        }
        if let Some(s) = layer.seed {
            self.seed = s;
        }
    }

    pub fn with_flags(
        mut self,
        tolerance: Option<f64>,
        samples: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        self.apply(Layer { tolerance, samples, out_dir: None, seed });
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.samples < 3 {
            return Err(CliError::Usage(format!("samples must be at least 3, got {}", self.samples)));
        }
        Ok(())
    }

    /// Relative output paths land in `out_dir` when one is configured.
    pub fn output_path(&self, out: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if out.is_relative() => dir.join(out),
            _ => out.to_path_buf(),
        }
    }
}

fn discover() -> Option<PathBuf> {
    let cwd = env::current_dir().ok().map(|d| d.join(FILE_NAME));
    let home = env::var_os("HOME").map(|h| PathBuf::from(h).join(FILE_NAME));
    [cwd, home].into_iter().flatten().find(|p| p.is_file())
}

fn env_layer() -> Result<Layer, CliError> {
    fn var<T: std::str::FromStr>(key: &str) -> Result<Option<T>, CliError> {
        let name = format!("{ENV_PREFIX}{key}");
        match env::var(&name) {
            Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("cannot parse {name}={v}"))),
            Err(_) => Ok(None),
        }
    }
    Ok(Layer {
        tolerance: var("TOLERANCE")?,
        samples: var("SAMPLES")?,
        out_dir: env::var_os(format!("{ENV_PREFIX}OUT_DIR")).map(PathBuf::from),
        seed: var("SEED")?,
    })
}
