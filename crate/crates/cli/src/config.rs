//! Experiment configuration: a plain `key=value` file with per-flag
//! overrides, where flags always win over the file.

use std::path::{Path, PathBuf};

use geodesy::error::{GeodesyError, Result};
use geodesy::surfaces::SurfaceSpec;

use crate::parse::{parse_count_list, parse_real_list, parse_surface};

/// Fully resolved configuration of a distance or embedding experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Surface the clouds are sampled from.
    pub surface: SurfaceSpec,
    /// Sample sizes, one experiment cell per size.
    pub sample_sizes: Vec<usize>,
    /// Neighborhood radii for the graph-based estimates.
    pub radii: Vec<f64>,
    /// Independent repeats per cell.
    pub repeats: usize,
    /// Number of random vertex pairs the errors are averaged over.
    pub pair_subsample: usize,
    /// Landmark count for embedding experiments.
    pub landmark_count: usize,
    /// Master seed; every repeat derives its own stream from it.
    pub seed: u64,
    /// Directory the CSV and SVG outputs are written into.
    pub outdir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            surface: SurfaceSpec::sphere(1.0).expect("unit sphere is valid"),
            sample_sizes: vec![1000],
            radii: vec![0.2, 0.3, 0.4, 0.5],
            repeats: 1,
            pair_subsample: 100,
            landmark_count: 30,
            seed: 7,
            outdir: PathBuf::from("out"),
        }
    }
}

/// Optional command-line overrides; `None` keeps the file (or default) value.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub surface: Option<String>,
    pub sample_sizes: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    pub repeats: Option<usize>,
    pub pair_subsample: Option<usize>,
    pub landmark_count: Option<usize>,
    pub seed: Option<u64>,
    pub outdir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Resolves a configuration: defaults, then the file, then the overrides.
    pub fn load(file: Option<&Path>, over: &ConfigOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        cfg.apply_overrides(over)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                GeodesyError::Parse(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply_pair(key.trim(), value.trim()).map_err(|e| {
                GeodesyError::Parse(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        let bad_count =
            |k: &str, v: &str| GeodesyError::Parse(format!("{k}={v:?} is not a count"));
        match key {
            "surface" => self.surface = parse_surface(value)?,
            "sizes" => self.sample_sizes = parse_count_list(value)?,
            "radii" => self.radii = parse_real_list(value)?,
            "repeats" => {
                self.repeats = value.parse().map_err(|_| bad_count(key, value))?;
            }
            "pairs" => {
                self.pair_subsample = value.parse().map_err(|_| bad_count(key, value))?;
            }
            "landmarks" => {
                self.landmark_count = value.parse().map_err(|_| bad_count(key, value))?;
            }
            "seed" => {
                self.seed = value.parse().map_err(|_| bad_count(key, value))?;
            }
            "outdir" => self.outdir = PathBuf::from(value),
            other => {
                return Err(GeodesyError::Parse(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    fn apply_overrides(&mut self, over: &ConfigOverrides) -> Result<()> {
        if let Some(s) = &over.surface {
            self.surface = parse_surface(s)?;
        }
        if let Some(v) = &over.sample_sizes {
            self.sample_sizes = v.clone();
        }
        if let Some(v) = &over.radii {
            self.radii = v.clone();
        }
        if let Some(v) = over.repeats {
            self.repeats = v;
        }
        if let Some(v) = over.pair_subsample {
            self.pair_subsample = v;
        }
        if let Some(v) = over.landmark_count {
            self.landmark_count = v;
        }
        if let Some(v) = over.seed {
            self.seed = v;
        }
        if let Some(v) = &over.outdir {
            self.outdir = v.clone();
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(GeodesyError::invalid("repeats must be at least 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(GeodesyError::invalid("need at least one sample size"));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 4) {
            return Err(GeodesyError::invalid(format!("sample size {n} is too small")));
        }
        if self.radii.is_empty() {
            return Err(GeodesyError::invalid("need at least one radius"));
        }
        if let Some(&r) = self.radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(GeodesyError::invalid(format!("radius {r} must be positive")));
        }
        if self.pair_subsample == 0 {
            return Err(GeodesyError::invalid("pair subsample must be at least 1"));
        }
        let min_n = *self.sample_sizes.iter().min().expect("nonempty");
        if self.pair_subsample > min_n * (min_n - 1) / 2 {
            return Err(GeodesyError::invalid(format!(
                "pair subsample {} exceeds the {} distinct pairs of {min_n} points",
                self.pair_subsample,
                min_n * (min_n - 1) / 2
            )));
        }
        if self.landmark_count < 2 {
            return Err(GeodesyError::invalid("need at least two landmarks"));
        }
        Ok(())
    }
}
