use std::path::Path;

use serde::Deserialize;
use spz_core::kernels::Tolerance;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Contents of the file named by `SPZ_CONFIG`. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub r: Option<usize>,
    pub tolerance: Option<f64>,
    pub abs_tolerance: Option<f64>,
    pub esc_block_rows: Option<usize>,
    pub block_sizes: Option<Vec<usize>>,
    pub group_size: Option<usize>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Default)]
pub struct Overrides {
    pub r: Option<usize>,
    pub tolerance: Option<f64>,
    pub esc_block_rows: Option<usize>,
    pub block_sizes: Option<Vec<usize>>,
    pub group_size: Option<usize>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub r: usize,
    pub tol: Tolerance,
    pub esc_block_rows: usize,
    pub block_sizes: Vec<usize>,
    pub group_size: usize,
    pub format: Format,
}

pub const DEFAULT_BLOCK_SIZES: [usize; 6] = [1, 4, 16, 64, 256, 1024];

impl Settings {
    /// Flags win over the config file, which wins over built-in defaults.
    pub fn resolve(flags: Overrides, file: FileConfig) -> Result<Self, CliError> {
        let tol_default = Tolerance::default();
        let r = flags.r.or(file.r).unwrap_or(spz_core::DEFAULT_R);
        if !(spz_core::MIN_R..=spz_core::MAX_R).contains(&r) {
            return Err(CliError::Usage(format!(
                "R must be within {}..={}, got {r}",
                spz_core::MIN_R,
                spz_core::MAX_R
            )));
        }
        let s = Settings {
            r,
            tol: Tolerance {
                rel: flags.tolerance.or(file.tolerance).unwrap_or(tol_default.rel),
                abs: file.abs_tolerance.unwrap_or(tol_default.abs),
            },
            esc_block_rows: flags.esc_block_rows.or(file.esc_block_rows).unwrap_or(64),
            block_sizes: flags.block_sizes.or(file.block_sizes).unwrap_or_else(|| DEFAULT_BLOCK_SIZES.to_vec()),
            group_size: flags.group_size.or(file.group_size).unwrap_or(r),
            format: flags.format.or(file.format).unwrap_or_default(),
        };
        if s.esc_block_rows == 0 || s.block_sizes.is_empty() || s.block_sizes.contains(&0) {
            return Err(CliError::Usage("block sizes must be at least 1".into()));
        }
        if s.group_size == 0 {
            return Err(CliError::Usage("group size must be at least 1".into()));
        }
        if !(s.tol.rel >= 0.0 && s.tol.abs >= 0.0) {
            return Err(CliError::Usage("tolerances must be non-negative".into()));
        }
        Ok(s)
    }
}
