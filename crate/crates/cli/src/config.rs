//! Optional TOML experiment manifest. Every key mirrors a flag; flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use treebed_core::{Norm, Strategy};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub region: RegionConfig,
    pub norm: Option<Norm>,
    pub strategy: Option<Strategy>,
    pub scan_cap: Option<u32>,
    pub output_path: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub x_radius: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_manifest() {
        let cfg: FileConfig = toml::from_str(
            r#"
            n = 2
            p = 7
            seed = 9
            samples = 100
            norm = "linf"
            strategy = "same_horosphere"
            scan_cap = 32
            output_path = "out.json"
            format = "csv"
            [region]
            t_min = -2.0
            x_radius = 10.0
            "#,
        )
        .unwrap();
        assert_eq!((cfg.n, cfg.p, cfg.seed), (Some(2), Some(7), Some(9)));
        assert_eq!(cfg.norm, Some(Norm::Linf));
        assert_eq!(cfg.strategy, Some(Strategy::SameHorosphere));
        assert_eq!(cfg.region.t_min, Some(-2.0));
        assert_eq!(cfg.region.t_max, None);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("dimension = 3").is_err());
    }
}
