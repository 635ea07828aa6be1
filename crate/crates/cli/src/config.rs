//! Flat `key = value` configuration for `simulate`.

use std::fs;
use std::path::Path;

use catrisk_core::PopulationSpec;

/// Population plus the deal it faces. `seed` stays `None` until chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: PopulationSpec,
    pub seed: Option<u64>,
    pub r: f64,
    pub p: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { spec: PopulationSpec::default(), seed: None, r: 220_000.0, p: 1e-9 }
    }
}

pub const KEYS: [&str; 11] = [
    "n_agents",
    "eu_fraction",
    "l_min",
    "l_max",
    "gamma_exp_lo",
    "gamma_exp_hi",
    "lambda_lo",
    "lambda_hi",
    "seed",
    "r",
    "p",
];

impl SimConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value, got '{line}'", n + 1))?;
            self.set(key.trim(), value.trim()).map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let real = || value.parse::<f64>().map_err(|_| format!("invalid number '{value}' for {key}"));
        let s = &mut self.spec;
        match key {
            "n_agents" => s.n_agents = value.parse().map_err(|_| format!("invalid count '{value}' for n_agents"))?,
            "eu_fraction" => s.eu_fraction = real()?,
            "l_min" => s.l_min = real()?,
            "l_max" => s.l_max = real()?,
            "gamma_exp_lo" => s.gamma_exp_lo = real()?,
            "gamma_exp_hi" => s.gamma_exp_hi = real()?,
            "lambda_lo" => s.lambda_lo = real()?,
            "lambda_hi" => s.lambda_hi = real()?,
            "seed" => self.seed = Some(value.parse().map_err(|_| format!("invalid seed '{value}'"))?),
            "r" => self.r = real()?,
            "p" => self.p = real()?,
            _ => return Err(format!("unknown key '{key}' (expected one of {})", KEYS.join(", "))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut cfg = SimConfig::default();
        cfg.apply_text("# population\nn_agents = 50\n\neu_fraction=0.25  # a quarter\nseed = 7\np = 1e-10\n")
            .unwrap();
        assert_eq!(cfg.spec.n_agents, 50);
        assert_eq!(cfg.spec.eu_fraction, 0.25);
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.p, 1e-10);
        assert_eq!(cfg.spec.l_min, PopulationSpec::default().l_min);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut cfg = SimConfig::default();
        assert!(cfg.apply_text("n_agents 50").unwrap_err().contains("line 1"));
        assert!(cfg.apply_text("colour = red").unwrap_err().contains("unknown key 'colour'"));
        assert!(cfg.apply_text("l_min = lots").unwrap_err().contains("'lots'"));
    }
}
