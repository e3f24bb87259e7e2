use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Output directory override; takes precedence over the config file but not
/// over `--out-dir`.
pub const OUTPUT_DIR_ENV: &str = "FQC_OUTPUT_DIR";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUTPUT_DIR: &str = "fqc-out";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Csv
    }

    pub fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Repetition,
    Color,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Ramsey,
    Bell,
    Choi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SourceArg {
    Fock,
    Poisson,
}

impl From<SourceArg> for fermiqc::pairing::Source {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Fock => Self::Fock,
            SourceArg::Poisson => Self::Poisson,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// table row whose expected image gets its sign flipped
    pub inject_fault: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodesSection {
    pub family: Family,
    /// repetition length
    pub n: usize,
    /// color-code distance
    pub d: usize,
    /// per-site, per-round phase-error probability
    pub noise: f64,
    /// per-site, per-round single-Majorana error probability
    pub loss: f64,
    pub shots: usize,
    pub rounds: usize,
}

impl Default for CodesSection {
    fn default() -> Self {
        Self {
            family: Family::Repetition,
            n: 3,
            d: 3,
            noise: 0.0,
            loss: 0.0,
            shots: 10_000,
            rounds: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FftSection {
    pub sizes: Vec<usize>,
}

impl Default for FftSection {
    fn default() -> Self {
        Self {
            sizes: vec![2, 4, 8, 16],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairingSection {
    pub experiment: Experiment,
    /// Ramsey molecule numbers
    pub n: Vec<usize>,
    /// molecule numbers of the mode driving the prepared or tested gate
    pub n2: Vec<f64>,
    /// tomography mode occupation; converged by doubling when absent
    pub n1: Option<f64>,
    pub source: SourceArg,
    /// Ramsey phase grid size
    pub points: usize,
    /// relative change that ends the doubling of `n1`
    pub convergence: f64,
    pub max_n1: f64,
}

impl Default for PairingSection {
    fn default() -> Self {
        Self {
            experiment: Experiment::Ramsey,
            n: vec![10, 20, 50, 100, 200],
            n2: vec![10.0, 20.0, 50.0, 100.0],
            n1: None,
            source: SourceArg::Fock,
            points: 32,
            convergence: 0.05,
            max_n1: 1.0e6,
        }
    }
}

/// Everything a run depends on. Loaded from `--config`, then overridden by
/// flags; the resolved copy is embedded in every JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    /// replaces the pass threshold of every verification check
    pub tolerance: Option<f64>,
    pub verify: VerifySection,
    pub codes: CodesSection,
    pub fft: FftSection,
    pub pairing: PairingSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            output_dir: None,
            format: Format::Both,
            tolerance: None,
            verify: VerifySection::default(),
            codes: CodesSection::default(),
            fft: FftSection::default(),
            pairing: PairingSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                bail!("tolerance {t} must lie in (0, 1)");
            }
        }
        Ok(())
    }

    /// Flag, then environment, then config file, then the default.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(f) = flag {
            return f.to_path_buf();
        }
        if let Some(env) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(env);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}
