//! Run configuration: a flat `key = value` file, overridden by command line
//! flags, overridden in turn by `FIG8_*` environment variables.

use fig8::saddle::SigmaMode;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown output format {s:?} (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub threads: usize,
    pub cache_dir: PathBuf,
    pub quad_tol: f64,
    pub output_format: OutputFormat,
    pub m_multiplicity: i64,
    pub sigma_mode: SigmaMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            cache_dir: PathBuf::from(".fig8-cache"),
            quad_tol: 1e-6,
            output_format: OutputFormat::Csv,
            m_multiplicity: 4,
            sigma_mode: SigmaMode::Calibrate,
        }
    }
}

pub const KEYS: [&str; 6] = ["threads", "cache_dir", "quad_tol", "output_format", "m_multiplicity", "sigma_mode"];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(format!("line {}: unknown key {k:?}", no + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Values from `FIG8_<KEY>` variables.
pub fn env_layer<I: IntoIterator<Item = (String, String)>>(vars: I) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (k, v) in vars {
        if let Some(key) = k.strip_prefix("FIG8_") {
            let key = key.to_ascii_lowercase();
            if KEYS.contains(&key.as_str()) {
                out.insert(key, v);
            }
        }
    }
    out
}

impl RunConfig {
    /// Apply the layers in order; later layers win.
    pub fn resolve(layers: &[&BTreeMap<String, String>]) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        for layer in layers {
            for (k, v) in layer.iter() {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let bad = |e: &dyn std::fmt::Display| format!("{key} = {v:?}: {e}");
        match key {
            "threads" => self.threads = v.parse().map_err(|e| bad(&e))?,
            "cache_dir" => self.cache_dir = PathBuf::from(v),
            "quad_tol" => self.quad_tol = v.parse().map_err(|e| bad(&e))?,
            "output_format" => self.output_format = v.parse().map_err(|e: String| bad(&e))?,
            "m_multiplicity" => self.m_multiplicity = v.parse().map_err(|e| bad(&e))?,
            "sigma_mode" => self.sigma_mode = v.parse().map_err(|e: fig8::Error| bad(&e))?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.threads < 1 {
            return Err("threads must be at least 1".into());
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-4) {
            return Err(format!("quad_tol = {} must lie in (0, 1e-4]", self.quad_tol));
        }
        if self.m_multiplicity < 1 {
            return Err("m_multiplicity must be positive".into());
        }
        Ok(())
    }

    /// File at `path` (if given), then `flags`, then the process environment.
    pub fn load(path: Option<&Path>, flags: &BTreeMap<String, String>) -> Result<Self, String> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                parse_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let env = env_layer(std::env::vars());
        Self::resolve(&[&file, flags, &env])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn layers_override_in_order() {
        let file = parse_file("threads = 2\nquad_tol = 1e-5 # tighter\n\nsigma_mode=zero\n").unwrap();
        let flags = map(&[("threads", "3")]);
        let env = env_layer(vec![("FIG8_THREADS".to_string(), "5".to_string()), ("HOME".into(), "/x".into())]);
        let cfg = RunConfig::resolve(&[&file, &flags, &env]).unwrap();
        assert_eq!(cfg.threads, 5);
        assert_eq!(cfg.quad_tol, 1e-5);
        assert_eq!(cfg.sigma_mode, SigmaMode::Zero);
        let cfg = RunConfig::resolve(&[&file, &flags]).unwrap();
        assert_eq!(cfg.threads, 3);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_file("nonsense").is_err());
        assert!(parse_file("colour = red").is_err());
        assert!(RunConfig::resolve(&[&map(&[("threads", "0")])]).is_err());
        assert!(RunConfig::resolve(&[&map(&[("quad_tol", "0.1")])]).is_err());
        assert!(RunConfig::resolve(&[&map(&[("sigma_mode", "random")])]).is_err());
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&[]).unwrap();
        assert_eq!(cfg.m_multiplicity, 4);
        assert_eq!(cfg.output_format, OutputFormat::Csv);
    }
}
